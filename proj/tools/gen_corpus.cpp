// Generates a deterministic synthetic PGM corpus for tests and experiments.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "rwmark/synth.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Synthetic grayscale corpus generator"};
  std::string out_dir = "corpus";
  int count = 10;
  int size = 512;
  uint64_t seed = 1;
  bool baboon = false;
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--count", count, "number of images");
  app.add_option("--size", size, "image side length");
  app.add_option("--seed", seed, "base seed");
  app.add_flag("--baboon", baboon, "also emit the entropy-tuned baboon surrogate");
  CLI11_PARSE(app, argc, argv);

  try {
    std::filesystem::create_directories(out_dir);
    // Grain cycles through mild texture levels; all stay compressible enough
    // to carry a 128-bit payload, some with the rearrangement flag set.
    const double grains[] = {0.0, 2.5, 5.0, 9.0};
    for (int i = 0; i < count; ++i) {
      double grain = grains[i % 4];
      rwmark::GrayImage img = rwmark::synth_natural(size, size, seed + i, grain);
      char name[32];
      std::snprintf(name, sizeof(name), "%03d.pgm", i);
      rwmark::pgm_save_file(img, (std::filesystem::path(out_dir) / name).string());
    }
    if (baboon) {
      rwmark::GrayImage img = rwmark::synth_baboon_like(seed);
      rwmark::pgm_save_file(img, (std::filesystem::path(out_dir) / "baboon_surrogate.pgm").string());
    }
    std::cout << "wrote " << count << (baboon ? " + 1" : "") << " images to " << out_dir << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
