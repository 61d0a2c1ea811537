// rwmark: reversible watermarking for encrypted grayscale images.
// Subcommands: prepare, embed, extract, restore, attack, experiment, summary.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "rwmark/attack.hpp"
#include "rwmark/codec.hpp"
#include "rwmark/errors.hpp"
#include "rwmark/experiment.hpp"
#include "rwmark/metrics.hpp"

namespace {

using namespace rwmark;

// Exit codes: 1 generic, 2 capacity, 3 integrity, 4 extract, 5 restore.
constexpr int kExitGeneric = 1;
constexpr int kExitCapacity = 2;
constexpr int kExitIntegrity = 3;
constexpr int kExitExtract = 4;
constexpr int kExitRestore = 5;

BitVec read_payload_hex(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open payload file " + path);
  std::string hex, line;
  while (std::getline(f, line)) {
    for (char c : line) {
      if (!isspace(static_cast<unsigned char>(c))) hex.push_back(c);
    }
  }
  if (hex.empty()) throw ParseError("payload file is empty");
  BitVec bits;
  bits.reserve(hex.size() * 4);
  for (char c : hex) {
    int v;
    if (c >= '0' && c <= '9') {
      v = c - '0';
    } else if (c >= 'a' && c <= 'f') {
      v = c - 'a' + 10;
    } else if (c >= 'A' && c <= 'F') {
      v = c - 'A' + 10;
    } else {
      throw ParseError("payload file contains a non-hex character");
    }
    for (int b = 3; b >= 0; --b) bits.push_back(static_cast<uint8_t>((v >> b) & 1));
  }
  return bits;
}

void write_payload_hex(const BitVec& bits, const std::string& path) {
  static const char* digits = "0123456789abcdef";
  std::string hex;
  for (size_t i = 0; i < bits.size(); i += 4) {
    int v = 0;
    for (size_t b = 0; b < 4; ++b) {
      v = (v << 1) | (i + b < bits.size() ? bits[i + b] : 0);
    }
    hex.push_back(digits[v]);
  }
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw ParseError("cannot write " + path);
  f << hex << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust reversible watermarking for encrypted grayscale images"};
  app.require_subcommand(1);

  std::string in_path, out_path, key_image, key_shuffle, key_watermark;
  std::string payload_file, reference_file, config_file, plot_dir, attack_kind;
  uint32_t max_payload = 128;
  int rs_k = 3;
  int64_t known_length = -1;
  double variance = 0.01, ratio = 0.1;
  int qf = 50;
  int cx = 0, cy = 0, cw = 0, ch = 0;
  uint64_t seed = 0;

  auto* prepare = app.add_subcommand("prepare", "compress, encrypt and reserve watermark room");
  prepare->add_option("--in", in_path, "input PGM")->required();
  prepare->add_option("--out", out_path, "output carrier PGM")->required();
  prepare->add_option("--key-image", key_image, "32 hex chars")->required();
  prepare->add_option("--key-shuffle", key_shuffle, "32 hex chars")->required();
  prepare->add_option("--max-payload", max_payload, "reserved payload bits (default 128)");

  auto* embed = app.add_subcommand("embed", "embed a watermark into a prepared carrier");
  embed->add_option("--in", in_path, "carrier PGM")->required();
  embed->add_option("--out", out_path, "marked PGM")->required();
  embed->add_option("--key-watermark", key_watermark, "32 hex chars")->required();
  embed->add_option("--payload-file", payload_file, "payload bits as hex")->required();
  embed->add_option("--rs-k", rs_k, "RS(31,k) message symbols (default 3)");

  auto* extract = app.add_subcommand("extract", "extract the watermark from a (possibly attacked) image");
  extract->add_option("--in", in_path, "marked/attacked PGM")->required();
  extract->add_option("--key-watermark", key_watermark, "32 hex chars")->required();
  extract->add_option("--out", out_path, "write extracted payload hex here");
  extract->add_option("--reference", reference_file, "reference payload hex; prints BER");
  extract->add_option("--rs-k", rs_k, "RS(31,k) message symbols (default 3)");
  extract->add_option("--known-length", known_length, "payload bits, skips the header vote");

  auto* restore = app.add_subcommand("restore", "losslessly restore the original image");
  restore->add_option("--in", in_path, "marked PGM")->required();
  restore->add_option("--out", out_path, "restored PGM")->required();
  restore->add_option("--key-image", key_image, "32 hex chars")->required();
  restore->add_option("--key-shuffle", key_shuffle, "32 hex chars")->required();

  auto* attack = app.add_subcommand("attack", "apply a simulated attack");
  attack->add_option("--in", in_path, "input PGM")->required();
  attack->add_option("--out", out_path, "output PGM")->required();
  attack->add_option("--attack", attack_kind, "gaussian | jpeg | crop_fixed | crop_random")
      ->required();
  attack->add_option("--variance", variance, "gaussian: normalized variance");
  attack->add_option("--qf", qf, "jpeg: quality factor in [1,100]");
  attack->add_option("--x", cx, "crop_fixed: left column");
  attack->add_option("--y", cy, "crop_fixed: top row");
  attack->add_option("--width", cw, "crop_fixed: width");
  attack->add_option("--height", ch, "crop_fixed: height");
  attack->add_option("--ratio", ratio, "crop_random: cropped pixel ratio");
  attack->add_option("--seed", seed, "attack seed");

  auto* experiment = app.add_subcommand("experiment", "run a configured experiment grid");
  experiment->add_option("--config", config_file, "config file")->required();
  experiment->add_option("--out", out_path, "override the config's output CSV path");

  auto* summary = app.add_subcommand("summary", "summarize an experiment CSV");
  summary->add_option("--in", in_path, "results CSV")->required();
  summary->add_option("--out", out_path, "write the text summary here (default stdout)");
  summary->add_option("--plot-dir", plot_dir, "emit gnuplot-ready .dat files into this directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (prepare->parsed()) {
      GrayImage img = pgm_load_file(in_path);
      KeyBundle keys;
      keys.image_key = seed_from_hex(key_image);
      keys.shuffle_key = seed_from_hex(key_shuffle);
      PrepareInfo info;
      GrayImage carrier = owner_prepare(img, keys, max_payload, &info);
      pgm_save_file(carrier, out_path);
      std::cout << "flag=" << int(info.flag) << " displaced_bits=" << info.displaced_bits
                << " stream_bits=" << info.stream_bits
                << " reserved_payload=" << info.reserved_payload
                << " feasible_payload=" << info.feasible_payload << "\n";
    } else if (embed->parsed()) {
      GrayImage carrier = pgm_load_file(in_path);
      BitVec payload = read_payload_hex(payload_file);
      GrayImage marked = embed_watermark(carrier, payload, seed_from_hex(key_watermark), rs_k);
      pgm_save_file(marked, out_path);
      std::cout << "embedded_bits=" << payload.size() << "\n";
    } else if (extract->parsed()) {
      GrayImage img = pgm_load_file(in_path);
      ExtractResult res = extract_watermark(img, seed_from_hex(key_watermark), rs_k, known_length);
      if (!out_path.empty()) write_payload_hex(res.payload, out_path);
      std::cout << "length=" << res.length << " flag=" << int(res.flag)
                << " failed_codewords=" << res.failed_codewords
                << " corrected_symbols=" << res.corrected_symbols << "\n";
      if (!reference_file.empty()) {
        BitVec ref = read_payload_hex(reference_file);
        if (ref.size() != res.payload.size()) {
          std::cout << "ber=0.5 (length mismatch: reference " << ref.size() << " bits)\n";
        } else {
          std::cout << "ber=" << ber(res.payload, ref) << "\n";
        }
      }
    } else if (restore->parsed()) {
      GrayImage marked = pgm_load_file(in_path);
      GrayImage restored =
          restore_image(marked, seed_from_hex(key_image), seed_from_hex(key_shuffle));
      pgm_save_file(restored, out_path);
      std::cout << "restored " << restored.width << "x" << restored.height << "\n";
    } else if (attack->parsed()) {
      GrayImage img = pgm_load_file(in_path);
      AttackSpec spec;
      spec.seed = seed;
      if (attack_kind == "gaussian") {
        spec.kind = AttackSpec::Kind::Gaussian;
        spec.variance = variance;
      } else if (attack_kind == "jpeg") {
        spec.kind = AttackSpec::Kind::Jpeg;
        spec.qf = qf;
      } else if (attack_kind == "crop_fixed") {
        spec.kind = AttackSpec::Kind::CropFixed;
        spec.rect = {cx, cy, cw, ch};
      } else if (attack_kind == "crop_random") {
        spec.kind = AttackSpec::Kind::CropRandom;
        spec.ratio = ratio;
      } else {
        throw ParseError("unknown attack kind: " + attack_kind);
      }
      pgm_save_file(apply_attack(img, spec), out_path);
    } else if (experiment->parsed()) {
      ExperimentConfig cfg = parse_config_file(config_file);
      if (!out_path.empty()) cfg.out_path = out_path;
      ExperimentOutput out = run_experiment(cfg);
      std::cout << out.rows.size() << " rows -> " << cfg.out_path << " (" << out.skip_log.size()
                << " skipped)\n";
      for (const auto& s : out.skip_log) std::cerr << "skipped: " << s << "\n";
    } else if (summary->parsed()) {
      auto rows = read_csv(in_path);
      std::string text = emit_summary(rows);
      if (out_path.empty()) {
        std::cout << text;
      } else {
        std::ofstream f(out_path, std::ios::trunc);
        if (!f) throw ParseError("cannot write " + out_path);
        f << text;
      }
      if (!plot_dir.empty()) write_plot_data(rows, plot_dir);
    }
  } catch (const CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    std::cerr << "max feasible payload bits: " << e.max_feasible_bits << "\n";
    return kExitCapacity;
  } catch (const IntegrityError& e) {
    std::cerr << "integrity error: " << e.what() << "\n";
    return kExitIntegrity;
  } catch (const ExtractFailure& e) {
    std::cerr << "extract failure: " << e.what() << "\n";
    return kExitExtract;
  } catch (const RestoreFailure& e) {
    std::cerr << "restore failure: " << e.what() << "\n";
    return kExitRestore;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitGeneric;
  }
  return 0;
}
