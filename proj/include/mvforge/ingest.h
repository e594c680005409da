// Copyright 2026 The mvforge Authors
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

#ifndef MVFORGE_INGEST_H_
#define MVFORGE_INGEST_H_

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mvforge {

enum class DataType { kQuantitative, kNominal, kOrdinal, kTemporal, kBoolean };

inline constexpr int kNumDataTypes = 5;

std::string_view data_type_name(DataType type);
std::optional<DataType> parse_data_type(std::string_view name);

// A cell is either a value or absent (empty field in the source CSV).
using Cell = std::optional<std::string>;

struct Column {
  int index = 0;
  std::string header;
  DataType inferred_type = DataType::kNominal;
  std::vector<Cell> values;
};

struct DataTable {
  std::string table_id;
  std::string name;
  std::vector<Column> columns;
  std::size_t row_count = 0;

  int num_columns() const { return static_cast<int>(columns.size()); }
};

// Order matches the statistics block of the column embedding.
enum class ProfileStat {
  kRowCountLog,
  kMissingRatio,
  kDistinctCountLog,
  kDistinctRatio,
  kNormMean,
  kNormStd,
  kNormMedian,
  kSkewnessClamped,
  kRangeLog,
  kMonotonicIncreasing,
  kMonotonicDecreasing,
  kIsSortedAny,
  kNegativeRatio,
  kZeroRatio,
  kIntegerRatio,
  kOutlierRatio,
  kMeanCharLengthLog,
  kMaxCharLengthLog,
  kIsYearLike,
  kMonthNameRatio,
  kWeekdayNameRatio,
  kAllUniqueFlag,
  kModeFrequencyRatio,
  kEntropyNorm,
};

inline constexpr int kProfileSize = 24;

struct ColumnProfile {
  std::array<double, kProfileSize> values{};

  double operator[](ProfileStat stat) const {
    return values[static_cast<std::size_t>(stat)];
  }
  double& operator[](ProfileStat stat) {
    return values[static_cast<std::size_t>(stat)];
  }

  static std::string_view name(ProfileStat stat);
};

// Cells longer than this are truncated before profiling.
inline constexpr std::size_t kMaxCellBytes = 1024;

// RFC-4180 CSV with a header row. Columns are typed on the way out.
// Throws Error{kEmptyInput} or Error{kMalformedCsv}.
DataTable parse_csv(std::string_view bytes, std::string name);

DataType infer_type(const Column& column);

ColumnProfile profile(const Column& column);

// Helpers shared with featurize and the synthetic corpus generator.
std::optional<double> parse_number(std::string_view text);
std::optional<double> parse_iso_datetime(std::string_view text);
bool satisfies_year_rule(const Column& column);
bool is_month_name(std::string_view text);
bool is_weekday_name(std::string_view text);

}  // namespace mvforge

#endif  // MVFORGE_INGEST_H_
