#pragma once

#include "aisgd/datagen.hpp"

#include <filesystem>
#include <iosfwd>

namespace aisgd {

enum class LabelMode {
  binary,  // label > 0 -> +1, otherwise -1
  raw,
};

/// Reads "<label> <index>:<value> ..." lines with 1-based, strictly
/// increasing indices into a sparse dataset. Blank lines and lines starting
/// with '#' are skipped. The dimension is the largest index seen.
Dataset read_libsvm(const std::filesystem::path& path, LabelMode mode = LabelMode::binary);
Dataset read_libsvm(std::istream& in, LabelMode mode = LabelMode::binary);

/// Writes values with 17 significant digits; zero entries of dense samples
/// are omitted.
void write_libsvm(const std::filesystem::path& path, const Dataset& data);
void write_libsvm(std::ostream& out, const Dataset& data);

}  // namespace aisgd
