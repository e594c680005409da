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

#ifndef MVFORGE_MVSTATE_H_
#define MVFORGE_MVSTATE_H_

#include <vector>

#include "json.hpp"
#include "mvforge/chartspec.h"

namespace mvforge {

// Grid placement; presentation only, never scored.
struct GridCell {
  int x = 0;
  int y = 0;
  int w = 4;
  int h = 4;

  bool operator==(const GridCell&) const = default;
};

struct MvChart {
  ChartSpec spec;
  bool locked = false;
  GridCell layout;

  bool operator==(const MvChart&) const = default;
};

// A multiple-view dashboard: charts in authoring order.
struct MVState {
  std::vector<MvChart> charts;

  std::size_t size() const { return charts.size(); }
  bool empty() const { return charts.empty(); }
  std::vector<ChartSpec> specs() const;
  bool operator==(const MVState&) const = default;
};

// Default placement of the chart at `position` in a three-wide grid.
GridCell default_layout(std::size_t position);

// Multiset of chart identities (columns and type); ignores order, layout and
// locks.
using MvIdentity = std::vector<ChartIdentity>;
MvIdentity mv_identity(const MVState& mv);

nlohmann::json to_json(const GridCell& cell);
GridCell grid_cell_from_json(const nlohmann::json& j);
nlohmann::json to_json(const MvChart& chart, const DataTable* table = nullptr);
MvChart mv_chart_from_json(const nlohmann::json& j);

// With a table, each chart also carries its Vega-Lite rendering.
nlohmann::json to_json(const MVState& mv, const DataTable* table = nullptr);
MVState mv_state_from_json(const nlohmann::json& j);

}  // namespace mvforge

#endif  // MVFORGE_MVSTATE_H_
