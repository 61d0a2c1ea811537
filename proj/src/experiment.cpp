#include "rwmark/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

#include "rwmark/attack.hpp"
#include "rwmark/codec.hpp"
#include "rwmark/errors.hpp"
#include "rwmark/metrics.hpp"

namespace rwmark {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

uint64_t derive_seed(uint64_t a, uint64_t b, uint64_t c) {
  uint64_t x = a * 0x9e3779b97f4a7c15ull ^ (b + 0xbf58476d1ce4e5b9ull) ^ (c << 32);
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebull;
  x ^= x >> 31;
  return x;
}

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

void parallel_for(size_t njobs, int workers, const std::function<void(size_t)>& fn) {
  if (njobs == 0) return;
  unsigned nthreads = workers > 0 ? static_cast<unsigned>(workers)
                                  : std::max(1u, std::thread::hardware_concurrency());
  nthreads = std::min<unsigned>(nthreads, static_cast<unsigned>(njobs));
  if (nthreads <= 1) {
    for (size_t i = 0; i < njobs; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (unsigned t = 0; t < nthreads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        size_t i = next.fetch_add(1);
        if (i >= njobs) return;
        fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

struct PreparedImage {
  std::string name;
  GrayImage original;
  GrayImage marked;   // carrier with the payload embedded (rs_k = 3)
  GrayImage carrier;  // encrypted, pre-embedding
  BitVec payload;
  PrepareInfo info;
};

constexpr const char* kDefaultKeyImage = "00112233445566778899aabbccddeeff";
constexpr const char* kDefaultKeyShuffle = "8899aabbccddeeff0011223344556677";
constexpr const char* kDefaultKeyWatermark = "deadbeefcafebabe0123456789abcdef";

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  cfg.key_image = seed_from_hex(kDefaultKeyImage);
  cfg.key_shuffle = seed_from_hex(kDefaultKeyShuffle);
  cfg.key_watermark = seed_from_hex(kDefaultKeyWatermark);

  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "corpus_dir") {
        cfg.corpus_dir = value;
      } else if (key == "experiment") {
        cfg.experiment = value;
      } else if (key == "out") {
        cfg.out_path = value;
      } else if (key == "payload_bits") {
        cfg.payload_bits = static_cast<uint32_t>(std::stoul(value));
      } else if (key == "key_image") {
        cfg.key_image = seed_from_hex(value);
      } else if (key == "key_shuffle") {
        cfg.key_shuffle = seed_from_hex(value);
      } else if (key == "key_watermark") {
        cfg.key_watermark = seed_from_hex(value);
      } else if (key == "variances") {
        cfg.variances.clear();
        for (const auto& v : split_list(value)) cfg.variances.push_back(std::stod(v));
      } else if (key == "k_list") {
        cfg.k_list.clear();
        for (const auto& v : split_list(value)) cfg.k_list.push_back(std::stoi(v));
      } else if (key == "qf_list") {
        cfg.qf_list.clear();
        for (const auto& v : split_list(value)) cfg.qf_list.push_back(std::stoi(v));
      } else if (key == "crop_sizes") {
        cfg.crop_sizes.clear();
        for (const auto& v : split_list(value)) cfg.crop_sizes.push_back(std::stoi(v));
      } else if (key == "crop_positions") {
        cfg.crop_positions = split_list(value);
      } else if (key == "ratios") {
        cfg.ratios.clear();
        for (const auto& v : split_list(value)) cfg.ratios.push_back(std::stod(v));
      } else if (key == "trial_seeds") {
        cfg.trial_seeds.clear();
        for (const auto& v : split_list(value)) cfg.trial_seeds.push_back(std::stoull(v));
      } else if (key == "image_limit") {
        cfg.image_limit = std::stoi(value);
      } else if (key == "workers") {
        cfg.workers = std::stoi(value);
      } else if (key == "timing") {
        if (value == "on") {
          cfg.timing = true;
        } else if (value == "off") {
          cfg.timing = false;
        } else {
          throw ParseError("timing must be on or off");
        }
      } else {
        throw ParseError("unknown config key: " + key);
      }
    } catch (const std::invalid_argument&) {
      throw ParseError("config line " + std::to_string(lineno) + ": bad value for " + key);
    } catch (const std::out_of_range&) {
      throw ParseError("config line " + std::to_string(lineno) + ": value out of range for " + key);
    }
  }

  // Per-experiment grid defaults.
  if (cfg.variances.empty()) {
    if (cfg.experiment == "rs_heatmap") {
      for (int i = 1; i <= 10; ++i) cfg.variances.push_back(i * 0.01);
    } else {
      cfg.variances = {0.01, 0.02, 0.03};
    }
  }
  if (cfg.k_list.empty()) {
    for (int k = 1; k <= 29; k += 2) cfg.k_list.push_back(k);
  }
  if (cfg.qf_list.empty()) cfg.qf_list = {20, 40, 60, 80, 100};
  if (cfg.crop_sizes.empty()) cfg.crop_sizes = {64, 128, 256};
  if (cfg.crop_positions.empty()) cfg.crop_positions = {"top_left", "middle", "top_right"};
  if (cfg.ratios.empty()) cfg.ratios = {0.05, 0.10, 0.15, 0.20, 0.25, 0.30};
  if (cfg.trial_seeds.empty()) cfg.trial_seeds = {1, 2, 3};
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open config " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

namespace {

struct TrialJob {
  size_t image_idx;
  size_t point_idx;
  size_t trial_idx;
  AttackSpec attack;
  std::string params;       // full (with trial)
  std::string point_params; // aggregation key
  int rs_k = 3;
  bool known_length = false;
};

double run_trial_ber(const PreparedImage& img, const GrayImage& marked, const TrialJob& job,
                     const ExperimentConfig& cfg, std::string& status) {
  GrayImage attacked = apply_attack(marked, job.attack);
  try {
    ExtractResult ex =
        extract_watermark(attacked, cfg.key_watermark, job.rs_k,
                          job.known_length ? static_cast<int64_t>(cfg.payload_bits) : -1);
    if (ex.payload.size() != img.payload.size()) {
      status = "length_mismatch";
      return 0.5;  // equivalent to an uninformed guess
    }
    status = "ok";
    return ber(ex.payload, img.payload);
  } catch (const ExtractFailure&) {
    status = "extract_failure";
    return 0.5;
  }
}

void append_aggregates(std::vector<ResultRow>& rows, const std::string& experiment,
                       const std::vector<std::string>& point_order) {
  std::map<std::string, std::pair<double, int>> acc;
  for (const auto& r : rows) {
    if (r.status == "aggregate") continue;
    std::string key = r.params;
    size_t t = key.find(";trial=");
    if (t != std::string::npos) key = key.substr(0, t);
    auto& slot = acc[key];
    slot.first += r.value;
    slot.second += 1;
  }
  for (const auto& point : point_order) {
    auto it = acc.find(point);
    if (it == acc.end()) continue;
    ResultRow agg;
    agg.image = "(mean)";
    agg.experiment = experiment;
    agg.params = point;
    agg.value = it->second.first / it->second.second;
    agg.status = "aggregate";
    agg.elapsed_ms = 0;
    rows.push_back(agg);
  }
}

}  // namespace

ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  ExperimentOutput out;

  if (cfg.experiment.empty()) throw ParseError("config: experiment is required");
  if (cfg.corpus_dir.empty()) throw ParseError("config: corpus_dir is required");

  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(cfg.corpus_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".pgm") {
      files.push_back(entry.path().string());
    }
  }
  std::sort(files.begin(), files.end());
  if (cfg.image_limit > 0 && static_cast<int>(files.size()) > cfg.image_limit) {
    files.resize(cfg.image_limit);
  }
  if (files.empty()) throw ParseError("no .pgm images in " + cfg.corpus_dir);

  // Phase 1: load + prepare + embed, in parallel across images.
  std::vector<PreparedImage> prepared(files.size());
  std::vector<std::string> skip(files.size());
  const bool needs_embed = cfg.experiment != "stat_table";
  parallel_for(files.size(), cfg.workers, [&](size_t i) {
    PreparedImage& p = prepared[i];
    p.name = fs::path(files[i]).filename().string();
    try {
      p.original = pgm_load_file(files[i]);
    } catch (const Error& e) {
      skip[i] = std::string("unreadable: ") + e.what();
      return;
    }
    KeyBundle keys{cfg.key_image, cfg.key_shuffle, cfg.key_watermark};
    try {
      p.carrier = owner_prepare(p.original, keys, cfg.payload_bits, &p.info);
    } catch (const CapacityError&) {
      skip[i] = "capacity";
      return;
    } catch (const Error& e) {
      skip[i] = std::string("prepare failed: ") + e.what();
      return;
    }
    if (p.info.feasible_payload < cfg.payload_bits) {
      skip[i] = "capacity";
      return;
    }
    p.payload = keystream(cfg.key_watermark, cfg.payload_bits, domain::kPayload + i);
    if (needs_embed) {
      try {
        p.marked = embed_watermark(p.carrier, p.payload, cfg.key_watermark, 3);
      } catch (const Error& e) {
        skip[i] = std::string("embed failed: ") + e.what();
        return;
      }
    }
  });

  std::vector<size_t> usable;
  for (size_t i = 0; i < prepared.size(); ++i) {
    if (skip[i].empty()) {
      usable.push_back(i);
    } else {
      out.skip_log.push_back(prepared[i].name + "\t" + skip[i]);
    }
  }

  std::vector<ResultRow> rows;
  std::vector<std::string> point_order;

  auto run_attack_grid = [&](const std::vector<TrialJob>& protos) {
    // protos: one job per (point, trial); expand across usable images.
    std::vector<TrialJob> jobs;
    for (size_t ui = 0; ui < usable.size(); ++ui) {
      for (const TrialJob& proto : protos) {
        TrialJob j = proto;
        j.image_idx = usable[ui];
        // Seeded attacks get per-(image, point, trial) derived seeds.
        if (j.attack.kind == AttackSpec::Kind::Gaussian ||
            j.attack.kind == AttackSpec::Kind::CropRandom) {
          j.attack.seed = derive_seed(j.attack.seed, usable[ui], j.point_idx);
        }
        jobs.push_back(j);
      }
    }
    rows.assign(jobs.size(), {});
    parallel_for(jobs.size(), cfg.workers, [&](size_t i) {
      const TrialJob& j = jobs[i];
      const PreparedImage& p = prepared[j.image_idx];
      ResultRow r;
      r.image = p.name;
      r.experiment = cfg.experiment;
      r.params = j.params;
      int64_t t0 = now_ms();
      try {
        const GrayImage* marked = &p.marked;
        GrayImage remarked;
        if (j.rs_k != 3) {
          remarked = embed_watermark(p.carrier, p.payload, cfg.key_watermark, j.rs_k);
          marked = &remarked;
        }
        r.value = run_trial_ber(p, *marked, j, cfg, r.status);
      } catch (const Error& e) {
        r.status = std::string("error:") + e.what();
        r.value = 0.5;
      }
      r.elapsed_ms = cfg.timing ? now_ms() - t0 : 0;
      rows[i] = r;
    });
  };

  if (cfg.experiment == "noise_sweep" || cfg.experiment == "rs_heatmap" ||
      cfg.experiment == "jpeg_curve" || cfg.experiment == "crop_table" ||
      cfg.experiment == "crop_random_curve") {
    std::vector<TrialJob> protos;
    size_t point = 0;
    if (cfg.experiment == "noise_sweep") {
      for (double v : cfg.variances) {
        std::string pp = "variance=" + fmt("%.4f", v);
        point_order.push_back(pp);
        for (size_t t = 0; t < cfg.trial_seeds.size(); ++t) {
          TrialJob j;
          j.point_idx = point;
          j.trial_idx = t;
          j.attack = {AttackSpec::Kind::Gaussian, v, 0, {}, 0.0, cfg.trial_seeds[t]};
          j.params = pp + ";trial=" + std::to_string(cfg.trial_seeds[t]);
          j.point_params = pp;
          protos.push_back(j);
        }
        ++point;
      }
    } else if (cfg.experiment == "rs_heatmap") {
      for (int k : cfg.k_list) {
        for (double v : cfg.variances) {
          std::string pp = "k=" + std::to_string(k) + ";variance=" + fmt("%.4f", v);
          point_order.push_back(pp);
          for (size_t t = 0; t < cfg.trial_seeds.size(); ++t) {
            TrialJob j;
            j.point_idx = point;
            j.trial_idx = t;
            j.attack = {AttackSpec::Kind::Gaussian, v, 0, {}, 0.0, cfg.trial_seeds[t]};
            j.params = pp + ";trial=" + std::to_string(cfg.trial_seeds[t]);
            j.point_params = pp;
            j.rs_k = k;
            j.known_length = true;  // k and L are out-of-band in this ablation
            protos.push_back(j);
          }
          ++point;
        }
      }
    } else if (cfg.experiment == "jpeg_curve") {
      for (int qf : cfg.qf_list) {
        std::string pp = "qf=" + std::to_string(qf);
        point_order.push_back(pp);
        TrialJob j;
        j.point_idx = point++;
        j.trial_idx = 0;
        j.attack.kind = AttackSpec::Kind::Jpeg;
        j.attack.qf = qf;
        j.params = pp;
        j.point_params = pp;
        protos.push_back(j);
      }
    } else if (cfg.experiment == "crop_table") {
      for (int size : cfg.crop_sizes) {
        for (const std::string& pos : cfg.crop_positions) {
          std::string pp = "size=" + std::to_string(size) + ";pos=" + pos;
          point_order.push_back(pp);
          TrialJob j;
          j.point_idx = point++;
          j.trial_idx = 0;
          j.attack.kind = AttackSpec::Kind::CropFixed;
          j.params = pp;
          j.point_params = pp;
          // Rect resolved per image (dims may differ); stash preset in params.
          protos.push_back(j);
        }
      }
    } else {  // crop_random_curve
      for (double ratio : cfg.ratios) {
        std::string pp = "ratio=" + fmt("%.4f", ratio);
        point_order.push_back(pp);
        for (size_t t = 0; t < cfg.trial_seeds.size(); ++t) {
          TrialJob j;
          j.point_idx = point;
          j.trial_idx = t;
          j.attack.kind = AttackSpec::Kind::CropRandom;
          j.attack.ratio = ratio;
          j.attack.seed = cfg.trial_seeds[t];
          j.params = pp + ";trial=" + std::to_string(cfg.trial_seeds[t]);
          j.point_params = pp;
          protos.push_back(j);
        }
        ++point;
      }
    }

    // crop_table rectangles depend on the image dimensions; resolve per job.
    if (cfg.experiment == "crop_table") {
      std::vector<TrialJob> resolved;
      for (size_t ui = 0; ui < usable.size(); ++ui) {
        const PreparedImage& p = prepared[usable[ui]];
        for (TrialJob j : protos) {
          size_t size_idx = j.point_idx / cfg.crop_positions.size();
          size_t pos_idx = j.point_idx % cfg.crop_positions.size();
          int size = cfg.crop_sizes[size_idx];
          CropPosition cp = crop_position_from_name(cfg.crop_positions[pos_idx]);
          j.attack.rect = crop_preset(p.marked.width, p.marked.height, size, cp);
          j.image_idx = usable[ui];
          resolved.push_back(j);
        }
      }
      rows.assign(resolved.size(), {});
      parallel_for(resolved.size(), cfg.workers, [&](size_t i) {
        const TrialJob& j = resolved[i];
        const PreparedImage& p = prepared[j.image_idx];
        ResultRow r;
        r.image = p.name;
        r.experiment = cfg.experiment;
        r.params = j.params;
        int64_t t0 = now_ms();
        try {
          r.value = run_trial_ber(p, p.marked, j, cfg, r.status);
        } catch (const Error& e) {
          r.status = std::string("error:") + e.what();
          r.value = 0.5;
        }
        r.elapsed_ms = cfg.timing ? now_ms() - t0 : 0;
        rows[i] = r;
      });
    } else {
      run_attack_grid(protos);
    }
    append_aggregates(rows, cfg.experiment, point_order);
  } else if (cfg.experiment == "stat_table") {
    struct StatJob {
      size_t image_idx;
      std::vector<ResultRow> rows;
    };
    std::vector<StatJob> jobs(usable.size());
    parallel_for(usable.size(), cfg.workers, [&](size_t ui) {
      size_t i = usable[ui];
      const PreparedImage& p = prepared[i];
      GrayImage marked = embed_watermark(p.carrier, p.payload, cfg.key_watermark, 3);
      auto push = [&](const std::string& params, double v) {
        jobs[ui].rows.push_back({p.name, cfg.experiment, params, v, "value", 0});
      };
      push("metric=entropy;stage=original", entropy(p.original));
      push("metric=entropy;stage=encrypted", entropy(p.carrier));
      push("metric=entropy;stage=watermarked", entropy(marked));
      const char* dirs[3] = {"V", "H", "D"};
      Adjacency adjs[3] = {Adjacency::Vertical, Adjacency::Horizontal, Adjacency::Diagonal};
      for (int d = 0; d < 3; ++d) {
        push(std::string("metric=corr_") + dirs[d] + ";stage=original",
             adjacent_correlation(p.original, adjs[d], 10000, 42).value);
        push(std::string("metric=corr_") + dirs[d] + ";stage=encrypted",
             adjacent_correlation(p.carrier, adjs[d], 10000, 42).value);
        push(std::string("metric=corr_") + dirs[d] + ";stage=watermarked",
             adjacent_correlation(marked, adjs[d], 10000, 42).value);
      }
      push("metric=npcr;stage=encrypted", npcr(p.carrier, p.original));
      push("metric=npcr;stage=watermarked", npcr(marked, p.original));
    });
    for (auto& j : jobs) {
      for (auto& r : j.rows) rows.push_back(std::move(r));
    }
  } else if (cfg.experiment == "reversibility") {
    rows.assign(usable.size(), {});
    parallel_for(usable.size(), cfg.workers, [&](size_t ui) {
      size_t i = usable[ui];
      const PreparedImage& p = prepared[i];
      ResultRow r;
      r.image = p.name;
      r.experiment = cfg.experiment;
      r.params = "flag=" + std::to_string(p.info.flag);
      int64_t t0 = now_ms();
      try {
        GrayImage restored = restore_image(p.marked, cfg.key_image, cfg.key_shuffle);
        bool same = restored == p.original;
        r.status = same ? "identical" : "mismatch";
        r.value = same ? 0.0 : 1.0;
      } catch (const Error& e) {
        r.status = std::string("error:") + e.what();
        r.value = 1.0;
      }
      r.elapsed_ms = cfg.timing ? now_ms() - t0 : 0;
      rows[ui] = r;
    });
  } else {
    throw ParseError("unknown experiment: " + cfg.experiment);
  }

  out.rows = std::move(rows);
  write_csv(out.rows, cfg.out_path);
  {
    std::ofstream f(cfg.out_path + ".skiplog", std::ios::trunc);
    for (const auto& line : out.skip_log) f << line << "\n";
  }
  return out;
}

void write_csv(const std::vector<ResultRow>& rows, const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw ParseError("cannot write " + path);
  f << "image,experiment,params,ber,extract_status,elapsed_ms\n";
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.6f", r.value);
    f << r.image << ',' << r.experiment << ',' << r.params << ',' << buf << ',' << r.status << ','
      << r.elapsed_ms << "\n";
  }
}

std::vector<ResultRow> read_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open " + path);
  std::string line;
  if (!std::getline(f, line)) throw ParseError("empty CSV " + path);
  if (trim(line) != "image,experiment,params,ber,extract_status,elapsed_ms") {
    throw ParseError("CSV header mismatch in " + path);
  }
  std::vector<ResultRow> rows;
  int lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 6) {
      throw ParseError("CSV line " + std::to_string(lineno) + ": expected 6 fields");
    }
    ResultRow r;
    r.image = fields[0];
    r.experiment = fields[1];
    r.params = fields[2];
    try {
      r.value = std::stod(fields[3]);
      r.elapsed_ms = std::stoll(fields[5]);
    } catch (const std::exception&) {
      throw ParseError("CSV line " + std::to_string(lineno) + ": bad numeric field");
    }
    r.status = fields[4];
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace {

std::string param_value(const std::string& params, const std::string& key) {
  size_t pos = 0;
  while (pos < params.size()) {
    size_t sep = params.find(';', pos);
    std::string part = params.substr(pos, sep == std::string::npos ? sep : sep - pos);
    size_t eq = part.find('=');
    if (eq != std::string::npos && part.substr(0, eq) == key) return part.substr(eq + 1);
    if (sep == std::string::npos) break;
    pos = sep + 1;
  }
  return "";
}

}  // namespace

std::string emit_summary(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  if (rows.empty()) {
    os << "experiment: (none)\n";
    return os.str();
  }
  const std::string& exp = rows.front().experiment;
  os << "experiment: " << exp << "\n";

  std::vector<const ResultRow*> aggregates;
  for (const auto& r : rows) {
    if (r.status == "aggregate") aggregates.push_back(&r);
  }

  if (exp == "crop_table") {
    // Table-I shape: one row per size, columns = positions + average (BER %).
    std::vector<std::string> sizes, positions;
    for (const auto* a : aggregates) {
      std::string s = param_value(a->params, "size");
      std::string p = param_value(a->params, "pos");
      if (std::find(sizes.begin(), sizes.end(), s) == sizes.end()) sizes.push_back(s);
      if (std::find(positions.begin(), positions.end(), p) == positions.end())
        positions.push_back(p);
    }
    os << "  crop size |";
    for (const auto& p : positions) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), " %10s", p.c_str());
      os << buf;
    }
    os << "    average\n";
    for (const auto& s : sizes) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "  %4sx%-4s |", s.c_str(), s.c_str());
      os << buf;
      double sum = 0;
      int count = 0;
      for (const auto& p : positions) {
        double v = 0;
        for (const auto* a : aggregates) {
          if (param_value(a->params, "size") == s && param_value(a->params, "pos") == p) {
            v = a->value;
          }
        }
        std::snprintf(buf, sizeof(buf), " %9.3f%%", v * 100.0);
        os << buf;
        sum += v;
        ++count;
      }
      std::snprintf(buf, sizeof(buf), " %9.3f%%\n", count ? sum / count * 100.0 : 0.0);
      os << buf;
    }
  } else if (exp == "stat_table") {
    os << "  image                metric            stage         value\n";
    for (const auto& r : rows) {
      if (r.status != "value") continue;
      char buf[160];
      std::snprintf(buf, sizeof(buf), "  %-20s %-17s %-12s %9.4f\n", r.image.c_str(),
                    param_value(r.params, "metric").c_str(),
                    param_value(r.params, "stage").c_str(), r.value);
      os << buf;
    }
  } else if (exp == "reversibility") {
    int identical = 0, total = 0;
    for (const auto& r : rows) {
      if (r.status == "aggregate") continue;
      ++total;
      if (r.status == "identical") ++identical;
    }
    os << "  identical: " << identical << "/" << total << "\n";
  } else {
    os << "  point                                   mean BER\n";
    for (const auto* a : aggregates) {
      char buf[128];
      std::snprintf(buf, sizeof(buf), "  %-38s %9.6f\n", a->params.c_str(), a->value);
      os << buf;
    }
  }
  return os.str();
}

void write_plot_data(const std::vector<ResultRow>& rows, const std::string& dir) {
  if (rows.empty()) return;
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const std::string& exp = rows.front().experiment;

  // Series key -> (x, y) points; heatmap splits one series per k.
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  for (const auto& r : rows) {
    if (r.status != "aggregate") continue;
    std::string x;
    std::string name = exp;
    if (exp == "noise_sweep" || exp == "rs_heatmap") {
      x = param_value(r.params, "variance");
      if (exp == "rs_heatmap") name += "_k" + param_value(r.params, "k");
    } else if (exp == "jpeg_curve") {
      x = param_value(r.params, "qf");
    } else if (exp == "crop_random_curve") {
      x = param_value(r.params, "ratio");
    } else {
      continue;
    }
    if (x.empty()) continue;
    series[name].emplace_back(std::stod(x), r.value);
  }
  for (const auto& [name, points] : series) {
    std::ofstream f(fs::path(dir) / (name + ".dat"), std::ios::trunc);
    for (const auto& [x, y] : points) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%g %.6f\n", x, y);
      f << buf;
    }
  }
}

}  // namespace rwmark
