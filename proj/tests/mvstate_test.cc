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

#include "gtest/gtest.h"
#include "mvforge/error.h"
#include "test_support.h"

namespace mvforge {
namespace {

using nlohmann::json;

MVState two_chart_mv(const DataTable& t) {
  MVState mv;
  mv.charts.push_back({assign_encodings(t, {0, 1}, ChartType::kBar), true, default_layout(0)});
  mv.charts.push_back({assign_encodings(t, {3, 4}, ChartType::kLine), false, default_layout(1)});
  return mv;
}

TEST(DefaultLayoutTest, ThreeWideGridOfFourByFourCells) {
  EXPECT_EQ(default_layout(0), (GridCell{0, 0, 4, 4}));
  EXPECT_EQ(default_layout(1), (GridCell{4, 0, 4, 4}));
  EXPECT_EQ(default_layout(2), (GridCell{8, 0, 4, 4}));
  EXPECT_EQ(default_layout(3), (GridCell{0, 4, 4, 4}));
}

TEST(MvIdentityTest, IgnoresOrderLayoutAndLocks) {
  const DataTable t = testing::sample_table();
  MVState a = two_chart_mv(t);
  MVState b;
  b.charts = {a.charts[1], a.charts[0]};
  b.charts[0].layout = {1, 2, 3, 4};
  b.charts[1].locked = false;
  EXPECT_EQ(mv_identity(a), mv_identity(b));
  b.charts[0].spec = assign_encodings(t, {3, 4}, ChartType::kArea);
  EXPECT_NE(mv_identity(a), mv_identity(b));
}

TEST(MvStateJsonTest, RoundTrips) {
  const DataTable t = testing::sample_table();
  const MVState mv = two_chart_mv(t);
  EXPECT_EQ(mv_state_from_json(to_json(mv)), mv);
  // The rendered form carries Vega-Lite and still parses back.
  const json rendered = to_json(mv, &t);
  ASSERT_TRUE(rendered.at("charts").at(0).contains("vegalite"));
  EXPECT_EQ(rendered["charts"][0]["vegalite"]["mark"], "bar");
  EXPECT_EQ(mv_state_from_json(rendered), mv);
}

TEST(GridCellJsonTest, RejectsDegenerateCells) {
  EXPECT_THROW(grid_cell_from_json({{"x", 0}, {"y", 0}, {"w", 0}, {"h", 4}}), Error);
  EXPECT_THROW(grid_cell_from_json({{"x", -1}, {"y", 0}, {"w", 2}, {"h", 4}}), Error);
  EXPECT_EQ(grid_cell_from_json({{"x", 2}, {"y", 3}, {"w", 5}, {"h", 6}}), (GridCell{2, 3, 5, 6}));
}

}  // namespace
}  // namespace mvforge
