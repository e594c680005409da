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

#include "mvforge/mvstate.h"

#include <algorithm>

#include "mvforge/error.h"

namespace mvforge {

std::vector<ChartSpec> MVState::specs() const {
  std::vector<ChartSpec> out;
  out.reserve(charts.size());
  for (const MvChart& c : charts) out.push_back(c.spec);
  return out;
}

GridCell default_layout(std::size_t position) {
  const int p = static_cast<int>(position);
  return GridCell{(p % 3) * 4, (p / 3) * 4, 4, 4};
}

MvIdentity mv_identity(const MVState& mv) {
  MvIdentity id;
  id.reserve(mv.charts.size());
  for (const MvChart& c : mv.charts) id.push_back(chart_identity(c.spec, false));
  std::sort(id.begin(), id.end());
  return id;
}

nlohmann::json to_json(const GridCell& cell) {
  return {{"x", cell.x}, {"y", cell.y}, {"w", cell.w}, {"h", cell.h}};
}

GridCell grid_cell_from_json(const nlohmann::json& j) {
  try {
    GridCell c{j.at("x").get<int>(), j.at("y").get<int>(), j.at("w").get<int>(),
               j.at("h").get<int>()};
    if (c.x < 0 || c.y < 0 || c.w < 1 || c.h < 1) {
      throw Error(ErrorCode::kInvalidEdit, "layout must have x, y >= 0 and w, h >= 1");
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidEdit, std::string("malformed layout: ") + e.what());
  }
}

nlohmann::json to_json(const MvChart& chart, const DataTable* table) {
  nlohmann::json j = {
      {"spec", to_json(chart.spec)}, {"locked", chart.locked}, {"layout", to_json(chart.layout)}};
  if (table != nullptr) j["vegalite"] = vegalite_json(chart.spec, *table);
  return j;
}

// Accepts the nested form ({spec, locked, layout}) and the flat API form.
MvChart mv_chart_from_json(const nlohmann::json& j) {
  MvChart chart;
  try {
    chart.spec = chart_spec_from_json(j.contains("spec") ? j.at("spec") : j);
    chart.locked = j.value("locked", false);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidEdit, std::string("malformed chart: ") + e.what());
  }
  if (j.contains("layout")) chart.layout = grid_cell_from_json(j.at("layout"));
  return chart;
}

nlohmann::json to_json(const MVState& mv, const DataTable* table) {
  nlohmann::json charts = nlohmann::json::array();
  for (const MvChart& c : mv.charts) charts.push_back(to_json(c, table));
  return nlohmann::json{{"charts", std::move(charts)}};
}

MVState mv_state_from_json(const nlohmann::json& j) {
  MVState mv;
  if (!j.is_object() || !j.contains("charts") || !j.at("charts").is_array()) {
    throw Error(ErrorCode::kInvalidEdit, "MV state needs a charts array");
  }
  for (const auto& c : j.at("charts")) mv.charts.push_back(mv_chart_from_json(c));
  return mv;
}

}  // namespace mvforge
