#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rwmark {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input: PGM headers, hex strings, config files, CSV.
struct ParseError : Error {
  using Error::Error;
};

// Valid input outside the supported envelope (maxval > 255, oversized dims).
struct UnsupportedError : Error {
  using Error::Error;
};

// Requested payload does not fit; carries the largest feasible payload.
struct CapacityError : Error {
  uint64_t max_feasible_bits;
  CapacityError(const std::string& msg, uint64_t max_feasible)
      : Error(msg), max_feasible_bits(max_feasible) {}
};

// Redundant header copies disagree on an unattacked carrier.
struct IntegrityError : Error {
  using Error::Error;
};

// Watermark extraction cannot proceed (e.g. all length fields cropped).
struct ExtractFailure : Error {
  using Error::Error;
};

// Lossless restoration failed; the image was tampered with or attacked.
struct RestoreFailure : Error {
  using Error::Error;
};

// Self-delimiting bitstream ended early or decoded inconsistently.
struct CorruptStream : Error {
  using Error::Error;
};

}  // namespace rwmark
