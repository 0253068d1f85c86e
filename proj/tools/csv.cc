//
// Copyright 2026 The privcusum Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "csv.h"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <system_error>

#include "absl/status/status.h"
#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"

namespace privcusum::cli {
namespace {

absl::Status LineError(int64_t line, absl::string_view message) {
  return absl::InvalidArgumentError(absl::StrCat("line ", line, ": ", message));
}

std::vector<absl::string_view> SplitFields(absl::string_view line) {
  return absl::StrSplit(line, ',');
}

// Reads the next non-empty line, stripping a trailing '\r'. Returns false at
// end of input.
bool NextLine(std::istream& in, std::string& line, int64_t& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!absl::StripAsciiWhitespace(line).empty()) return true;
  }
  return false;
}

absl::Status ExpectHeader(absl::string_view line, int64_t line_no,
                          const std::vector<std::string>& expected) {
  const std::string want = absl::StrJoin(expected, ",");
  if (absl::StripAsciiWhitespace(line) != want) {
    return LineError(line_no, absl::StrCat("expected header '", want, "', got '",
                                           line, "'"));
  }
  return absl::OkStatus();
}

std::string FormatVector(const std::vector<double>& v) {
  std::vector<std::string> parts;
  parts.reserve(v.size());
  for (double x : v) parts.push_back(FormatDouble(x));
  return absl::StrJoin(parts, ";");
}

absl::StatusOr<std::vector<double>> ParseVector(absl::string_view text) {
  std::vector<double> out;
  for (absl::string_view part : absl::StrSplit(text, ';')) {
    absl::StatusOr<double> v = ParseDouble(part);
    if (!v.ok()) return v.status();
    out.push_back(*v);
  }
  return out;
}

// Parses the data row `t,v1,...,vk` into its time stamp and values.
absl::Status ParseRow(absl::string_view line, int64_t line_no, size_t columns,
                      int64_t previous_t, int64_t& t, std::vector<double>& values) {
  const std::vector<absl::string_view> fields = SplitFields(line);
  if (fields.size() != columns) {
    return LineError(line_no, absl::StrCat("expected ", columns, " fields, got ",
                                           fields.size()));
  }
  absl::StatusOr<int64_t> stamp = ParseInt(fields[0]);
  if (!stamp.ok()) return LineError(line_no, stamp.status().message());
  if (*stamp <= previous_t) {
    return LineError(line_no, absl::StrCat("time stamp ", *stamp,
                                           " does not follow ", previous_t));
  }
  t = *stamp;
  values.resize(columns - 1);
  for (size_t i = 1; i < columns; ++i) {
    absl::StatusOr<double> v = ParseDouble(fields[i]);
    if (!v.ok()) return LineError(line_no, v.status().message());
    values[i - 1] = *v;
  }
  return absl::OkStatus();
}

absl::Status ParseMetadata(absl::string_view comment, int64_t line_no,
                           PrivateMetadata& meta, bool& seen_kind) {
  comment.remove_prefix(1);  // '#'
  for (absl::string_view item : absl::StrSplit(comment, ',', absl::SkipWhitespace())) {
    item = absl::StripAsciiWhitespace(item);
    const size_t eq = item.find('=');
    if (eq == absl::string_view::npos) {
      return LineError(line_no, absl::StrCat("malformed metadata item '", item, "'"));
    }
    const absl::string_view key = item.substr(0, eq);
    const absl::string_view value = item.substr(eq + 1);
    absl::Status st = absl::OkStatus();
    auto number = [&](double& out) {
      absl::StatusOr<double> v = ParseDouble(value);
      if (v.ok()) out = *v; else st = v.status();
    };
    auto vector = [&](std::vector<double>& out) {
      absl::StatusOr<std::vector<double>> v = ParseVector(value);
      if (v.ok()) out = *std::move(v); else st = v.status();
    };
    if (key == "kind") {
      meta.kind = std::string(value);
      seen_kind = true;
    } else if (key == "h") {
      number(meta.h);
    } else if (key == "alpha") {
      number(meta.alpha);
    } else if (key == "M") {
      number(meta.m);
    } else if (key == "L") {
      number(meta.interval_length);
    } else if (key == "seed") {
      uint64_t seed = 0;
      const auto [ptr, ec] =
          std::from_chars(value.data(), value.data() + value.size(), seed);
      if (ec != std::errc() || ptr != value.data() + value.size()) {
        st = absl::InvalidArgumentError(absl::StrCat("bad seed '", value, "'"));
      }
      meta.seed = seed;
    } else if (key == "zero_noise") {
      if (value != "0" && value != "1") {
        st = absl::InvalidArgumentError("zero_noise must be 0 or 1");
      }
      meta.zero_noise = value == "1";
    } else if (key == "dim") {
      // Implied by lower/upper; accepted for readability.
    } else if (key == "lower") {
      vector(meta.lower);
    } else if (key == "upper") {
      vector(meta.upper);
    } else {
      st = absl::InvalidArgumentError(absl::StrCat("unknown metadata key '", key, "'"));
    }
    if (!st.ok()) return LineError(line_no, st.message());
  }
  return absl::OkStatus();
}

}  // namespace

std::string FormatDouble(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

absl::StatusOr<double> ParseDouble(absl::string_view text) {
  text = absl::StripAsciiWhitespace(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    return absl::InvalidArgumentError(absl::StrCat("not a number: '", text, "'"));
  }
  return value;
}

absl::StatusOr<int64_t> ParseInt(absl::string_view text) {
  text = absl::StripAsciiWhitespace(text);
  int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    return absl::InvalidArgumentError(absl::StrCat("not an integer: '", text, "'"));
  }
  return value;
}

absl::StatusOr<RawTable> ReadRawCsv(std::istream& in) {
  std::string line;
  int64_t line_no = 0;
  if (!NextLine(in, line, line_no)) {
    return absl::InvalidArgumentError("raw CSV is empty (missing header)");
  }
  const std::vector<absl::string_view> header = SplitFields(line);
  RawTable table;
  table.dim = static_cast<int>(header.size()) - 2;
  if (table.dim < 0) return LineError(line_no, "header needs at least 't,y'");
  std::vector<std::string> expected = {"t"};
  for (int a = 1; a <= table.dim; ++a) expected.push_back(absl::StrCat("x", a));
  expected.push_back("y");
  if (absl::Status st = ExpectHeader(line, line_no, expected); !st.ok()) return st;

  std::vector<double> values;
  int64_t previous_t = std::numeric_limits<int64_t>::min();
  while (NextLine(in, line, line_no)) {
    RawObservation obs;
    if (absl::Status st = ParseRow(line, line_no, header.size(), previous_t,
                                   obs.time_index, values);
        !st.ok()) {
      return st;
    }
    previous_t = obs.time_index;
    obs.x = Eigen::Map<const Eigen::VectorXd>(values.data(), table.dim);
    obs.y = values.back();
    table.rows.push_back(std::move(obs));
  }
  return table;
}

void WriteRawCsv(std::ostream& out, int dim,
                 std::span<const RawObservation> rows) {
  out << "t";
  for (int a = 1; a <= dim; ++a) out << ",x" << a;
  out << ",y\n";
  for (const RawObservation& row : rows) {
    out << row.time_index;
    for (int a = 0; a < dim; ++a) out << ',' << FormatDouble(row.x[a]);
    out << ',' << FormatDouble(row.y) << '\n';
  }
}

absl::StatusOr<PrivateTable> ReadPrivateCsv(std::istream& in) {
  PrivateTable table;
  std::string line;
  int64_t line_no = 0;
  bool seen_kind = false;
  bool have_header = false;
  while (NextLine(in, line, line_no)) {
    if (line.front() == '#') {
      if (absl::Status st = ParseMetadata(line, line_no, table.metadata, seen_kind);
          !st.ok()) {
        return st;
      }
      continue;
    }
    have_header = true;
    break;
  }
  if (!seen_kind) {
    return absl::InvalidArgumentError(
        "privatized CSV lacks the '# kind=...' metadata line");
  }
  if (!have_header) return absl::InvalidArgumentError("privatized CSV lacks a header");
  const PrivateMetadata& meta = table.metadata;
  const bool univariate = meta.kind == "univariate";
  if (!univariate && meta.kind != "regression") {
    return absl::InvalidArgumentError(absl::StrCat("unknown stream kind '", meta.kind, "'"));
  }
  const std::vector<absl::string_view> header = SplitFields(line);
  std::vector<std::string> expected = {"t"};
  if (univariate) {
    expected.push_back("z");
    table.num_bins = 0;
  } else {
    if (meta.lower.empty() || meta.lower.size() != meta.upper.size()) {
      return absl::InvalidArgumentError(
          "regression metadata needs lower/upper bounds of equal dimension");
    }
    if (header.size() < 3 || (header.size() - 1) % 2 != 0) {
      return LineError(line_no, "header must read t,w1..wN,z1..zN");
    }
    table.num_bins = static_cast<int64_t>(header.size() - 1) / 2;
    for (int64_t j = 1; j <= table.num_bins; ++j) expected.push_back(absl::StrCat("w", j));
    for (int64_t j = 1; j <= table.num_bins; ++j) expected.push_back(absl::StrCat("z", j));
  }
  if (absl::Status st = ExpectHeader(line, line_no, expected); !st.ok()) return st;

  std::vector<double> values;
  int64_t previous_t = std::numeric_limits<int64_t>::min();
  while (NextLine(in, line, line_no)) {
    PrivateObservation obs;
    if (absl::Status st = ParseRow(line, line_no, expected.size(), previous_t,
                                   obs.time_index, values);
        !st.ok()) {
      return st;
    }
    previous_t = obs.time_index;
    if (univariate) {
      obs.z = Eigen::VectorXd::Constant(1, values[0]);
    } else {
      obs.w = Eigen::Map<const Eigen::VectorXd>(values.data(), table.num_bins);
      obs.z = Eigen::Map<const Eigen::VectorXd>(values.data() + table.num_bins,
                                                table.num_bins);
    }
    table.rows.push_back(std::move(obs));
  }
  return table;
}

void WritePrivateCsvHeader(std::ostream& out, const PrivateMetadata& meta,
                           int64_t num_bins) {
  out << "# kind=" << meta.kind;
  if (meta.kind == "univariate") {
    out << ", alpha=" << FormatDouble(meta.alpha)
        << ", L=" << FormatDouble(meta.interval_length);
  } else {
    out << ", h=" << FormatDouble(meta.h) << ", alpha=" << FormatDouble(meta.alpha)
        << ", M=" << FormatDouble(meta.m);
  }
  out << ", seed=" << meta.seed << ", zero_noise=" << (meta.zero_noise ? 1 : 0);
  if (meta.kind != "univariate") {
    out << ", dim=" << meta.lower.size() << ", lower=" << FormatVector(meta.lower)
        << ", upper=" << FormatVector(meta.upper);
  }
  out << "\nt";
  if (meta.kind == "univariate") {
    out << ",z\n";
    return;
  }
  for (int64_t j = 1; j <= num_bins; ++j) out << ",w" << j;
  for (int64_t j = 1; j <= num_bins; ++j) out << ",z" << j;
  out << '\n';
}

void WritePrivateCsvRow(std::ostream& out, const PrivateObservation& row) {
  out << row.time_index;
  for (Eigen::Index j = 0; j < row.w.size(); ++j) out << ',' << FormatDouble(row.w[j]);
  for (Eigen::Index j = 0; j < row.z.size(); ++j) out << ',' << FormatDouble(row.z[j]);
  out << '\n';
}

}  // namespace privcusum::cli
