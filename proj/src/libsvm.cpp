#include "aisgd/libsvm.hpp"

#include "aisgd/experiment.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>

namespace aisgd {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

std::string_view next_token(std::string_view& rest) {
  std::size_t b = 0;
  while (b < rest.size() && is_space(rest[b])) ++b;
  std::size_t e = b;
  while (e < rest.size() && !is_space(rest[e])) ++e;
  auto tok = rest.substr(b, e - b);
  rest = rest.substr(e);
  return tok;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

[[noreturn]] void malformed(std::size_t line, const std::string& why) {
  throw IoError("libsvm line " + std::to_string(line) + ": " + why);
}

}  // namespace

Dataset read_libsvm(std::istream& in, LabelMode mode) {
  Dataset data;
  data.storage = Storage::sparse;
  std::vector<SparseVector> rows;
  std::vector<double> labels;
  std::size_t max_index = 0;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view rest = line;
    auto label_tok = next_token(rest);
    if (label_tok.empty() || label_tok.front() == '#') continue;

    double label;
    if (!parse_number(label_tok, label) || !std::isfinite(label)) {
      malformed(line_no, "bad label '" + std::string(label_tok) + "'");
    }
    SparseVector row;
    for (auto tok = next_token(rest); !tok.empty(); tok = next_token(rest)) {
      if (tok.front() == '#') break;
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos) {
        malformed(line_no, "expected <index>:<value>, got '" + std::string(tok) + "'");
      }
      std::uint64_t idx;
      double val;
      if (!parse_number(tok.substr(0, colon), idx) || idx == 0 ||
          idx > std::numeric_limits<std::uint32_t>::max()) {
        malformed(line_no, "bad feature index in '" + std::string(tok) + "'");
      }
      if (!parse_number(tok.substr(colon + 1), val) || !std::isfinite(val)) {
        malformed(line_no, "bad feature value in '" + std::string(tok) + "'");
      }
      const auto zero_based = static_cast<std::uint32_t>(idx - 1);
      if (!row.index.empty() && zero_based <= row.index.back()) {
        malformed(line_no, "feature indices must be strictly increasing");
      }
      row.index.push_back(zero_based);
      row.value.push_back(val);
      max_index = std::max<std::size_t>(max_index, idx);
    }
    rows.push_back(std::move(row));
    labels.push_back(mode == LabelMode::binary ? (label > 0.0 ? 1.0 : -1.0) : label);
  }
  if (in.bad()) throw IoError("read error while parsing libsvm data");
  if (rows.empty()) throw IoError("libsvm input contains no samples");

  data.p = std::max<std::size_t>(max_index, 1);
  data.samples.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].dim = data.p;
    data.samples.push_back({FeatureVector(std::move(rows[i])), labels[i]});
  }
  return data;
}

Dataset read_libsvm(const std::filesystem::path& path, LabelMode mode) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return read_libsvm(in, mode);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void write_libsvm(std::ostream& out, const Dataset& data) {
  for (const auto& s : data.samples) {
    out << format_real(s.y);
    s.x.for_each_nonzero([&](std::size_t i, double v) {
      if (v != 0.0 || s.x.is_sparse()) out << ' ' << (i + 1) << ':' << format_real(v);
    });
    out << '\n';
  }
}

void write_libsvm(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_libsvm(out, data);
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace aisgd
