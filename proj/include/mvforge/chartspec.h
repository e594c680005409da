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

#ifndef MVFORGE_CHARTSPEC_H_
#define MVFORGE_CHARTSPEC_H_

#include <array>
#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mvforge/featurize.h"
#include "mvforge/ingest.h"

namespace mvforge {

// Order doubles as the type-head output order and the tie-break order.
enum class ChartType { kScatter, kBar, kLine, kPie, kArea };

inline constexpr int kNumChartTypes = 5;
inline constexpr std::array<ChartType, kNumChartTypes> kAllChartTypes = {
    ChartType::kScatter, ChartType::kBar, ChartType::kLine, ChartType::kPie,
    ChartType::kArea};

std::string_view chart_type_name(ChartType type);
std::optional<ChartType> parse_chart_type(std::string_view name);

enum class Channel { kX, kY, kColor, kSize, kColumn, kRow, kTheta };

std::string_view channel_name(Channel channel);
std::optional<Channel> parse_channel(std::string_view name);

enum class Aggregate { kNone, kMean, kSum, kCount };

std::string_view aggregate_name(Aggregate aggregate);
std::optional<Aggregate> parse_aggregate(std::string_view name);

// A channel either encodes a table column or, with Aggregate::kCount and no
// column, the record count.
struct Encoding {
  std::optional<int> column;
  bool bin = false;
  Aggregate aggregate = Aggregate::kNone;

  bool operator==(const Encoding&) const = default;
};

struct ChartSpec {
  ColumnSet columns;
  ChartType type = ChartType::kBar;
  std::map<Channel, Encoding> encodings;

  bool operator==(const ChartSpec&) const = default;
};

bool is_dimension(DataType type);

// Deterministic channel assignment for a column selection.
ChartSpec assign_encodings(const DataTable& table, const std::vector<int>& columns,
                           ChartType type);

// Throws Error{kInvalidEdit} when the spec breaks a chart invariant against
// this table: unknown columns, channels not allowed for the type, column set
// and encodings disagreeing, or a missing primary channel.
void validate_spec(const DataTable& table, const ChartSpec& spec);

nlohmann::json vegalite_json(const ChartSpec& spec, const DataTable& table);

// Canonical text: sorted keys, no insignificant whitespace.
std::string emit_vegalite(const ChartSpec& spec, const DataTable& table);

struct ChartIdentity {
  ColumnSet columns;
  std::optional<ChartType> type;

  auto operator<=>(const ChartIdentity&) const = default;
};

ChartIdentity chart_identity(const ChartSpec& spec, bool drop_alternative_types = true);

std::string field_name(const DataTable& table, int column);

nlohmann::json to_json(const ChartSpec& spec);
// Throws Error{kInvalidEdit} on malformed input.
ChartSpec chart_spec_from_json(const nlohmann::json& j);

}  // namespace mvforge

#endif  // MVFORGE_CHARTSPEC_H_
