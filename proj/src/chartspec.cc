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

#include "mvforge/chartspec.h"

#include <algorithm>
#include <set>

#include "mvforge/error.h"

namespace mvforge {
namespace {

using nlohmann::json;

void fill(ChartSpec& spec, const std::vector<int>& remaining,
          std::initializer_list<Channel> order) {
  auto channel = order.begin();
  for (int c : remaining) {
    if (channel == order.end()) break;
    spec.encodings[*channel++] = Encoding{c};
  }
}

std::string vegalite_type(DataType type) {
  switch (type) {
    case DataType::kQuantitative: return "quantitative";
    case DataType::kOrdinal: return "ordinal";
    case DataType::kTemporal: return "temporal";
    case DataType::kNominal:
    case DataType::kBoolean: return "nominal";
  }
  return "nominal";
}

std::string_view mark_name(ChartType type) {
  switch (type) {
    case ChartType::kScatter: return "point";
    case ChartType::kBar: return "bar";
    case ChartType::kLine: return "line";
    case ChartType::kPie: return "arc";
    case ChartType::kArea: return "area";
  }
  return "point";
}

bool channel_allowed(ChartType type, Channel channel) {
  if (type == ChartType::kPie) {
    return channel != Channel::kX && channel != Channel::kY;
  }
  return channel != Channel::kTheta;
}

ColumnSet checked_columns(const DataTable& table, const std::vector<int>& columns) {
  ColumnSet cols = canonical_columns(columns);
  if (cols.empty() || static_cast<int>(cols.size()) > kMaxChartColumns) {
    throw Error(ErrorCode::kCardinality,
                "a chart encodes 1-4 columns, got " + std::to_string(cols.size()));
  }
  for (int c : cols) {
    if (c < 0 || c >= table.num_columns()) {
      throw Error(ErrorCode::kIndex, "column " + std::to_string(c) + " not in table");
    }
  }
  return cols;
}

}  // namespace

std::string_view chart_type_name(ChartType type) {
  switch (type) {
    case ChartType::kScatter: return "scatter";
    case ChartType::kBar: return "bar";
    case ChartType::kLine: return "line";
    case ChartType::kPie: return "pie";
    case ChartType::kArea: return "area";
  }
  return "bar";
}

std::optional<ChartType> parse_chart_type(std::string_view name) {
  for (ChartType t : kAllChartTypes) {
    if (chart_type_name(t) == name) return t;
  }
  return std::nullopt;
}

std::string_view channel_name(Channel channel) {
  switch (channel) {
    case Channel::kX: return "x";
    case Channel::kY: return "y";
    case Channel::kColor: return "color";
    case Channel::kSize: return "size";
    case Channel::kColumn: return "column";
    case Channel::kRow: return "row";
    case Channel::kTheta: return "theta";
  }
  return "x";
}

std::optional<Channel> parse_channel(std::string_view name) {
  for (int i = 0; i <= static_cast<int>(Channel::kTheta); ++i) {
    auto c = static_cast<Channel>(i);
    if (channel_name(c) == name) return c;
  }
  return std::nullopt;
}

std::string_view aggregate_name(Aggregate aggregate) {
  switch (aggregate) {
    case Aggregate::kNone: return "none";
    case Aggregate::kMean: return "mean";
    case Aggregate::kSum: return "sum";
    case Aggregate::kCount: return "count";
  }
  return "none";
}

std::optional<Aggregate> parse_aggregate(std::string_view name) {
  for (int i = 0; i <= static_cast<int>(Aggregate::kCount); ++i) {
    auto a = static_cast<Aggregate>(i);
    if (aggregate_name(a) == name) return a;
  }
  return std::nullopt;
}

bool is_dimension(DataType type) { return type != DataType::kQuantitative; }

ChartSpec assign_encodings(const DataTable& table, const std::vector<int>& columns,
                           ChartType type) {
  ChartSpec spec;
  spec.columns = checked_columns(table, columns);
  spec.type = type;

  std::vector<int> dims, measures;
  for (int c : spec.columns) {
    (is_dimension(table.columns[static_cast<std::size_t>(c)].inferred_type) ? dims
                                                                           : measures)
        .push_back(c);
  }
  const Encoding count{std::nullopt, false, Aggregate::kCount};

  if (type == ChartType::kPie) {
    std::vector<int> remaining;
    if (!dims.empty()) {
      spec.encodings[Channel::kColor] = Encoding{dims[0]};
      spec.encodings[Channel::kTheta] = measures.empty() ? count : Encoding{measures[0]};
      remaining.assign(dims.begin() + 1, dims.end());
      if (!measures.empty()) remaining.insert(remaining.end(), measures.begin() + 1, measures.end());
    } else {
      spec.encodings[Channel::kColor] = Encoding{measures[0], true};
      spec.encodings[Channel::kTheta] =
          measures.size() > 1 ? Encoding{measures[1]} : count;
      if (measures.size() > 2) remaining.assign(measures.begin() + 2, measures.end());
    }
    fill(spec, remaining, {Channel::kColumn, Channel::kRow, Channel::kSize});
    return spec;
  }

  std::vector<int> remaining;
  if (!dims.empty()) {
    int x = dims[0];
    if (type == ChartType::kLine || type == ChartType::kArea) {
      auto temporal = std::find_if(dims.begin(), dims.end(), [&](int c) {
        return table.columns[static_cast<std::size_t>(c)].inferred_type ==
               DataType::kTemporal;
      });
      if (temporal != dims.end()) x = *temporal;
    }
    spec.encodings[Channel::kX] = Encoding{x};
    spec.encodings[Channel::kY] = measures.empty() ? count : Encoding{measures[0]};
    for (int d : dims) {
      if (d != x) remaining.push_back(d);
    }
    if (!measures.empty()) remaining.insert(remaining.end(), measures.begin() + 1, measures.end());
  } else {
    const bool bin = type == ChartType::kBar;
    spec.encodings[Channel::kX] = Encoding{measures[0], bin};
    if (measures.size() > 1) {
      spec.encodings[Channel::kY] =
          Encoding{measures[1], false, bin ? Aggregate::kMean : Aggregate::kNone};
      remaining.assign(measures.begin() + 2, measures.end());
    } else {
      spec.encodings[Channel::kY] = count;
    }
  }
  fill(spec, remaining, {Channel::kColor, Channel::kSize, Channel::kColumn, Channel::kRow});
  return spec;
}

void validate_spec(const DataTable& table, const ChartSpec& spec) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidEdit, what); };
  if (spec.columns != canonical_columns(spec.columns)) fail("columns must be sorted and unique");
  if (spec.columns.empty() || static_cast<int>(spec.columns.size()) > kMaxChartColumns) {
    fail("a chart encodes 1-4 columns");
  }
  for (int c : spec.columns) {
    if (c < 0 || c >= table.num_columns()) fail("column " + std::to_string(c) + " not in table");
  }
  std::set<int> encoded;
  for (const auto& [channel, enc] : spec.encodings) {
    if (!channel_allowed(spec.type, channel)) {
      fail(std::string("channel ") + std::string(channel_name(channel)) + " not valid for " +
           std::string(chart_type_name(spec.type)));
    }
    if (enc.column) {
      if (!std::binary_search(spec.columns.begin(), spec.columns.end(), *enc.column)) {
        fail("encoded column " + std::to_string(*enc.column) + " not in the chart's columns");
      }
      encoded.insert(*enc.column);
    } else if (enc.aggregate != Aggregate::kCount || enc.bin) {
      fail("an encoding without a column must be an unbinned count");
    }
  }
  if (encoded.size() != spec.columns.size()) fail("every chart column must be encoded");
  const Channel primary = spec.type == ChartType::kPie ? Channel::kTheta : Channel::kX;
  if (!spec.encodings.count(primary)) {
    fail(std::string("missing ") + std::string(channel_name(primary)) + " channel");
  }
}

std::string field_name(const DataTable& table, int column) {
  const std::string& header = table.columns[static_cast<std::size_t>(column)].header;
  return header.empty() ? "column_" + std::to_string(column) : header;
}

nlohmann::json vegalite_json(const ChartSpec& spec, const DataTable& table) {
  json encoding = json::object();
  for (const auto& [channel, enc] : spec.encodings) {
    json e = json::object();
    if (enc.column) {
      e["field"] = field_name(table, *enc.column);
      e["type"] = vegalite_type(table.columns[static_cast<std::size_t>(*enc.column)].inferred_type);
      if (enc.bin || enc.aggregate == Aggregate::kMean || enc.aggregate == Aggregate::kSum) {
        e["type"] = "quantitative";
      }
    } else {
      e["type"] = "quantitative";
    }
    if (enc.bin) e["bin"] = true;
    if (enc.aggregate != Aggregate::kNone) e["aggregate"] = aggregate_name(enc.aggregate);
    encoding[std::string(channel_name(channel))] = std::move(e);
  }
  return json{{"$schema", "https://vega.github.io/schema/vega-lite/v5.json"},
              {"data", {{"name", "table"}}},
              {"mark", mark_name(spec.type)},
              {"encoding", std::move(encoding)}};
}

std::string emit_vegalite(const ChartSpec& spec, const DataTable& table) {
  return vegalite_json(spec, table).dump();
}

ChartIdentity chart_identity(const ChartSpec& spec, bool drop_alternative_types) {
  ChartIdentity id{canonical_columns(spec.columns), std::nullopt};
  if (!drop_alternative_types) id.type = spec.type;
  return id;
}

nlohmann::json to_json(const ChartSpec& spec) {
  json encodings = json::object();
  for (const auto& [channel, enc] : spec.encodings) {
    json e = json::object();
    if (enc.column) e["column"] = *enc.column;
    if (enc.bin) e["bin"] = true;
    if (enc.aggregate != Aggregate::kNone) e["aggregate"] = aggregate_name(enc.aggregate);
    encodings[std::string(channel_name(channel))] = std::move(e);
  }
  return json{{"columns", spec.columns},
              {"chart_type", chart_type_name(spec.type)},
              {"encodings", std::move(encodings)}};
}

ChartSpec chart_spec_from_json(const nlohmann::json& j) {
  auto fail = [](const std::string& what) -> ChartSpec {
    throw Error(ErrorCode::kInvalidEdit, what);
  };
  if (!j.is_object()) return fail("chart spec must be an object");
  ChartSpec spec;
  try {
    spec.columns = j.at("columns").get<std::vector<int>>();
    auto type = parse_chart_type(j.at("chart_type").get<std::string>());
    if (!type) return fail("unknown chart type");
    spec.type = *type;
    if (j.contains("encodings")) {
      for (const auto& [name, e] : j.at("encodings").items()) {
        auto channel = parse_channel(name);
        if (!channel) return fail("unknown channel " + name);
        Encoding enc;
        if (e.contains("column") && !e.at("column").is_null()) enc.column = e.at("column").get<int>();
        enc.bin = e.value("bin", false);
        if (e.contains("aggregate")) {
          auto agg = parse_aggregate(e.at("aggregate").get<std::string>());
          if (!agg) return fail("unknown aggregate");
          enc.aggregate = *agg;
        }
        spec.encodings[*channel] = enc;
      }
    }
  } catch (const nlohmann::json::exception& e) {
    return fail(std::string("malformed chart spec: ") + e.what());
  }
  return spec;
}

}  // namespace mvforge
