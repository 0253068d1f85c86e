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

#ifndef PRIVCUSUM_TOOLS_CSV_H_
#define PRIVCUSUM_TOOLS_CSV_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "privcusum/privacy.h"

namespace privcusum::cli {

// Shortest decimal form that parses back to the same double; "inf", "-inf"
// and "nan" for non-finite values.
std::string FormatDouble(double value);
absl::StatusOr<double> ParseDouble(absl::string_view text);
absl::StatusOr<int64_t> ParseInt(absl::string_view text);

// Raw stream: header `t,x1,...,xd,y` (`t,y` when d = 0), rows in strictly
// increasing t.
struct RawTable {
  int dim = 0;
  std::vector<RawObservation> rows;
};

absl::StatusOr<RawTable> ReadRawCsv(std::istream& in);
void WriteRawCsv(std::ostream& out, int dim,
                 std::span<const RawObservation> rows);

// Self-describing header of a privatized stream, written as one comment
// line: `# kind=regression, h=0.25, alpha=1, M=2, seed=7, dim=1, ...`.
struct PrivateMetadata {
  std::string kind = "regression";  // regression | univariate
  double h = 0.0;                   // regression only
  double alpha = 1.0;
  double m = 0.0;                   // regression only
  double interval_length = 1.0;     // univariate only
  uint64_t seed = 0;
  bool zero_noise = false;
  std::vector<double> lower;        // regression only
  std::vector<double> upper;

  bool operator==(const PrivateMetadata&) const = default;
};

// Regression rows carry w and z of equal length N; univariate rows have an
// empty w and a one-element z (header `t,z`).
struct PrivateTable {
  PrivateMetadata metadata;
  int64_t num_bins = 0;
  std::vector<PrivateObservation> rows;
};

absl::StatusOr<PrivateTable> ReadPrivateCsv(std::istream& in);
void WritePrivateCsvHeader(std::ostream& out, const PrivateMetadata& metadata,
                           int64_t num_bins);
void WritePrivateCsvRow(std::ostream& out, const PrivateObservation& row);

}  // namespace privcusum::cli

#endif  // PRIVCUSUM_TOOLS_CSV_H_
