#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace aisgd {

/// Raised for rejected inputs: bad arguments, invalid configs, unknown names.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a file cannot be opened, read, parsed or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RngSeed {
  std::uint64_t value = 0;
};

using Rng = std::mt19937_64;

/// Independent generator for a named sub-stream of a seed. Distinct
/// `stream` ids give decorrelated sequences from the same user seed.
inline Rng make_rng(RngSeed seed, std::uint64_t stream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed.value),
                    static_cast<std::uint32_t>(seed.value >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

}  // namespace aisgd
