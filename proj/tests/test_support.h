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

#ifndef MVFORGE_TESTS_TEST_SUPPORT_H_
#define MVFORGE_TESTS_TEST_SUPPORT_H_

#include <filesystem>
#include <random>
#include <string>

#include "mvforge/bundle.h"
#include "mvforge/ingest.h"

namespace mvforge::testing {

// Six columns: nominal, quantitative, nominal, temporal, quantitative,
// quantitative.
inline std::string sample_csv() {
  return "region,sales,color,date,units,price\n"
         "north,10.5,red,2021-01-01,3,9.99\n"
         "south,22.0,blue,2021-01-02,5,4.50\n"
         "east,13.25,red,2021-01-03,2,7.25\n"
         "west,8.0,green,2021-01-04,7,3.10\n"
         "north,17.5,blue,2021-01-05,4,5.55\n"
         "south,11.0,green,2021-01-06,6,6.80\n";
}

inline DataTable sample_table() { return parse_csv(sample_csv(), "sample"); }

// Nine columns for service latency checks.
inline std::string wide_csv(int rows = 40) {
  std::string csv = "city,year,category,revenue,cost,profit,units,rating,flag\n";
  std::mt19937_64 rng(11);
  const char* cities[] = {"Oslo", "Lima", "Pune", "Kyiv"};
  const char* cats[] = {"A", "B", "C"};
  for (int r = 0; r < rows; ++r) {
    std::uniform_real_distribution<double> u(0.0, 100.0);
    csv += std::string(cities[rng() % 4]) + "," + std::to_string(2000 + r % 20) + "," +
           cats[rng() % 3] + "," + std::to_string(u(rng)) + "," + std::to_string(u(rng)) + "," +
           std::to_string(u(rng) - 50.0) + "," + std::to_string(rng() % 50) + "," +
           std::to_string(1 + rng() % 5) + "," + (rng() % 2 ? "true" : "false") + "\n";
  }
  return csv;
}

// A randomly initialized bundle of the default shape for `kind`.
inline ModelBundle random_bundle(ModelKind kind, std::uint64_t seed) {
  ModelBundle b = make_bundle(kind);
  b.model.initialize(seed);
  return b;
}

// Fresh, empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("mvforge_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace mvforge::testing

#endif  // MVFORGE_TESTS_TEST_SUPPORT_H_
