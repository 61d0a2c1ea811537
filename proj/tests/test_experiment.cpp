#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "rwmark/errors.hpp"
#include "rwmark/experiment.hpp"
#include "rwmark/synth.hpp"

using namespace rwmark;

namespace {

namespace fs = std::filesystem;

struct TempCorpus {
  fs::path dir;
  explicit TempCorpus(const std::string& name, int count, int size = 128) {
    dir = fs::temp_directory_path() / name;
    fs::create_directories(dir);
    for (int i = 0; i < count; ++i) {
      double grain = (i % 2) ? 9.5 : 1.0;
      GrayImage img = synth_natural(size, size, 500 + i, grain);
      char buf[16];
      std::snprintf(buf, sizeof(buf), "%03d.pgm", i);
      pgm_save_file(img, (dir / buf).string());
    }
  }
  ~TempCorpus() { fs::remove_all(dir); }
};

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config parsing: keys, lists, comments, and errors") {
  std::string text =
      "# comment\n"
      "corpus_dir = /tmp/x\n"
      "experiment = noise_sweep\n"
      "payload_bits = 64\n"
      "variances = 0.01, 0.02\n"
      "trial_seeds = 5,6\n"
      "image_limit = 3\n"
      "timing = off\n"
      "key_image = ffffffffffffffffffffffffffffffff\n";
  ExperimentConfig cfg = parse_config_text(text);
  CHECK(cfg.corpus_dir == "/tmp/x");
  CHECK(cfg.payload_bits == 64);
  CHECK(cfg.variances == std::vector<double>{0.01, 0.02});
  CHECK(cfg.trial_seeds == std::vector<uint64_t>{5, 6});
  CHECK(cfg.image_limit == 3);
  CHECK(cfg.timing == false);
  CHECK(seed_to_hex(cfg.key_image) == "ffffffffffffffffffffffffffffffff");

  CHECK_THROWS_AS(parse_config_text("bogus_key = 1\n"), ParseError);
  CHECK_THROWS_AS(parse_config_text("payload_bits == oops\n"), ParseError);
  CHECK_THROWS_AS(parse_config_text("just a line\n"), ParseError);
}

TEST_CASE("noise_sweep row arithmetic: images x variances x seeds plus aggregates") {
  TempCorpus corpus("rwmark_test_noise", 2);
  ExperimentConfig cfg = parse_config_text(
      "experiment = noise_sweep\n"
      "variances = 0.01, 0.02\n"
      "trial_seeds = 1, 2, 3\n"
      "timing = off\n");
  cfg.corpus_dir = corpus.dir.string();
  cfg.out_path = (corpus.dir / "out.csv").string();
  ExperimentOutput out = run_experiment(cfg);
  int trial_rows = 0, aggregate_rows = 0;
  for (const auto& r : out.rows) {
    if (r.status == "aggregate") {
      ++aggregate_rows;
    } else {
      ++trial_rows;
    }
  }
  CHECK(trial_rows == 2 * 2 * 3);
  CHECK(aggregate_rows == 2);
  CHECK(out.skip_log.empty());
  // no attack at these variances on clean carriers: all zero BER
  for (const auto& r : out.rows) CHECK(r.value == 0.0);
}

TEST_CASE("experiment reruns are byte-identical with timing off") {
  TempCorpus corpus("rwmark_test_det", 2);
  ExperimentConfig cfg = parse_config_text(
      "experiment = crop_random_curve\n"
      "ratios = 0.10\n"
      "trial_seeds = 1, 2\n"
      "timing = off\n");
  cfg.corpus_dir = corpus.dir.string();
  cfg.out_path = (corpus.dir / "a.csv").string();
  run_experiment(cfg);
  std::string first = slurp(cfg.out_path);
  cfg.out_path = (corpus.dir / "b.csv").string();
  run_experiment(cfg);
  CHECK(first == slurp(cfg.out_path));
  CHECK(!first.empty());
}

TEST_CASE("worker count does not change results") {
  TempCorpus corpus("rwmark_test_workers", 2);
  ExperimentConfig cfg = parse_config_text(
      "experiment = noise_sweep\n"
      "variances = 0.02\n"
      "trial_seeds = 1, 2\n"
      "timing = off\n");
  cfg.corpus_dir = corpus.dir.string();
  cfg.workers = 1;
  cfg.out_path = (corpus.dir / "w1.csv").string();
  run_experiment(cfg);
  cfg.workers = 4;
  cfg.out_path = (corpus.dir / "w4.csv").string();
  run_experiment(cfg);
  CHECK(slurp((corpus.dir / "w1.csv").string()) == slurp((corpus.dir / "w4.csv").string()));
}

TEST_CASE("oversized payloads land images in the skip log, never silently dropped") {
  TempCorpus corpus("rwmark_test_skip", 2, 64);  // 64x64 cannot carry 128 bits
  ExperimentConfig cfg = parse_config_text(
      "experiment = reversibility\n"
      "payload_bits = 128\n"
      "timing = off\n");
  cfg.corpus_dir = corpus.dir.string();
  cfg.out_path = (corpus.dir / "out.csv").string();
  ExperimentOutput out = run_experiment(cfg);
  CHECK(out.rows.empty());
  CHECK(out.skip_log.size() == 2);
  for (const auto& entry : out.skip_log) {
    CHECK(entry.find("capacity") != std::string::npos);
  }
  CHECK(fs::exists(cfg.out_path + ".skiplog"));
}

TEST_CASE("reversibility experiment reports identical restorations") {
  TempCorpus corpus("rwmark_test_rev", 3);
  ExperimentConfig cfg = parse_config_text(
      "experiment = reversibility\n"
      "timing = off\n");
  cfg.corpus_dir = corpus.dir.string();
  cfg.out_path = (corpus.dir / "out.csv").string();
  ExperimentOutput out = run_experiment(cfg);
  REQUIRE(out.rows.size() == 3);
  for (const auto& r : out.rows) CHECK(r.status == "identical");
  std::string summary = emit_summary(out.rows);
  CHECK(summary.find("identical: 3/3") != std::string::npos);
}

TEST_CASE("CSV writer/reader roundtrip and header validation") {
  std::vector<ResultRow> rows = {
      {"img.pgm", "jpeg_curve", "qf=20", 0.015625, "ok", 12},
      {"(mean)", "jpeg_curve", "qf=20", 0.015625, "aggregate", 0},
  };
  fs::path p = fs::temp_directory_path() / "rwmark_rows.csv";
  write_csv(rows, p.string());
  auto back = read_csv(p.string());
  REQUIRE(back.size() == 2);
  CHECK(back[0].image == "img.pgm");
  CHECK(back[0].value == doctest::Approx(0.015625));
  CHECK(back[1].status == "aggregate");
  std::ofstream bad(p.string(), std::ios::trunc);
  bad << "wrong,header\n";
  bad.close();
  CHECK_THROWS_AS(read_csv(p.string()), ParseError);
  fs::remove(p);
}

TEST_CASE("summary shapes: empty set and Table-I style for crop_table") {
  CHECK(emit_summary({}).find("(none)") != std::string::npos);

  std::vector<ResultRow> rows;
  for (const char* size : {"64", "128", "256"}) {
    for (const char* pos : {"top_left", "middle", "top_right"}) {
      rows.push_back({"a.pgm", "crop_table",
                      std::string("size=") + size + ";pos=" + pos, 0.0, "ok", 0});
      rows.push_back({"(mean)", "crop_table",
                      std::string("size=") + size + ";pos=" + pos, 0.01, "aggregate", 0});
    }
  }
  std::string text = emit_summary(rows);
  CHECK(text.find("top_left") != std::string::npos);
  CHECK(text.find("average") != std::string::npos);
  CHECK(text.find("64x64") != std::string::npos);
  // one header + three size rows
  int lines = 0;
  for (char ch : text) lines += ch == '\n';
  CHECK(lines >= 5);
}

TEST_CASE("plot data files are written for curve experiments") {
  std::vector<ResultRow> rows = {
      {"(mean)", "jpeg_curve", "qf=20", 0.25, "aggregate", 0},
      {"(mean)", "jpeg_curve", "qf=80", 0.0, "aggregate", 0},
  };
  fs::path dir = fs::temp_directory_path() / "rwmark_plots";
  write_plot_data(rows, dir.string());
  std::string data = slurp((dir / "jpeg_curve.dat").string());
  CHECK(data.find("20 0.250000") != std::string::npos);
  CHECK(data.find("80 0.000000") != std::string::npos);
  fs::remove_all(dir);
}
