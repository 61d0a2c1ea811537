#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rwmark/cipher.hpp"

namespace rwmark {

// Flat key-value config (one `key = value` per line, '#' comments, lists
// comma-separated). Unset grids fall back to per-experiment defaults.
struct ExperimentConfig {
  std::string corpus_dir;
  std::string experiment;  // noise_sweep | rs_heatmap | crop_table |
                           // crop_random_curve | jpeg_curve | stat_table | reversibility
  std::string out_path = "results.csv";
  uint32_t payload_bits = 128;
  Seed128 key_image{};
  Seed128 key_shuffle{};
  Seed128 key_watermark{};
  std::vector<double> variances;
  std::vector<int> k_list;
  std::vector<int> qf_list;
  std::vector<int> crop_sizes;
  std::vector<std::string> crop_positions;
  std::vector<double> ratios;
  std::vector<uint64_t> trial_seeds;
  int image_limit = 10;  // desk scale; raise for full runs
  int workers = 0;       // 0 = hardware concurrency
  bool timing = true;    // off -> elapsed_ms column is 0, reruns byte-identical
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

// CSV columns: image, experiment, params, ber, extract_status, elapsed_ms.
// For stat_table the ber column carries the metric value.
struct ResultRow {
  std::string image;
  std::string experiment;
  std::string params;
  double value = 0.0;
  std::string status;
  int64_t elapsed_ms = 0;
};

struct ExperimentOutput {
  std::vector<ResultRow> rows;          // trial rows, then aggregate rows
  std::vector<std::string> skip_log;    // "image<TAB>reason"
};

// Runs the configured experiment over the corpus and writes the CSV (plus
// `<out>.skiplog`). Rows are ordered canonically regardless of scheduling.
ExperimentOutput run_experiment(const ExperimentConfig& config);

void write_csv(const std::vector<ResultRow>& rows, const std::string& path);
std::vector<ResultRow> read_csv(const std::string& path);

// Aligned text tables (Table-I shape for crop_table, curve tables otherwise).
std::string emit_summary(const std::vector<ResultRow>& rows);

// Two-column gnuplot-ready files per curve, written into dir.
void write_plot_data(const std::vector<ResultRow>& rows, const std::string& dir);

}  // namespace rwmark
