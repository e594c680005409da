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

#include "mvforge/ingest.h"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <set>
#include <unordered_map>

#include "mvforge/error.h"

namespace mvforge {
namespace {

constexpr double kTypeThreshold = 0.95;

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

const std::vector<std::vector<std::string_view>>& ordinal_vocabularies() {
  // Each inner list is ordered; entries sharing a rank are aliases.
  static const std::vector<std::vector<std::string_view>> vocab = {
      {"january", "february", "march", "april", "may", "june", "july",
       "august", "september", "october", "november", "december"},
      {"jan", "feb", "mar", "apr", "may", "jun", "jul", "aug", "sep", "oct",
       "nov", "dec"},
      {"monday", "tuesday", "wednesday", "thursday", "friday", "saturday",
       "sunday"},
      {"mon", "tue", "wed", "thu", "fri", "sat", "sun"},
      {"low", "medium", "high"},
      {"small", "medium", "large"},
  };
  return vocab;
}

// Month and weekday vocabularies accept both spellings; the returned rank is
// shared between the full and abbreviated forms.
std::optional<int> vocabulary_rank(std::string_view lowered, int vocab_group) {
  const auto& vocab = ordinal_vocabularies();
  auto find_in = [&](int v) -> std::optional<int> {
    const auto& words = vocab[static_cast<std::size_t>(v)];
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (words[i] == lowered) return static_cast<int>(i);
    }
    return std::nullopt;
  };
  switch (vocab_group) {
    case 0: {  // months
      if (auto r = find_in(0)) return r;
      if (lowered == "sept") return 8;
      return find_in(1);
    }
    case 1: {  // weekdays
      if (auto r = find_in(2)) return r;
      if (lowered == "tues") return 1;
      if (lowered == "thur" || lowered == "thurs") return 3;
      return find_in(3);
    }
    case 2: return find_in(4);
    case 3: return find_in(5);
    default: return std::nullopt;
  }
}

constexpr int kNumVocabGroups = 4;

std::string_view truncated(const std::string& s) {
  return std::string_view(s).substr(0, kMaxCellBytes);
}

bool is_boolean_token(std::string_view lowered) {
  return lowered == "true" || lowered == "false" || lowered == "0" ||
         lowered == "1" || lowered == "yes" || lowered == "no";
}

bool boolean_value(std::string_view lowered) {
  return lowered == "true" || lowered == "1" || lowered == "yes";
}

bool header_mentions_time(std::string_view header) {
  std::string h = lower(header);
  return h.find("year") != std::string::npos ||
         h.find("date") != std::string::npos;
}

std::optional<int> parse_year_token(std::string_view text) {
  text = trim(text);
  if (text.size() != 4) return std::nullopt;
  int value = 0;
  for (char c : text) {
    if (c < '0' || c > '9') return std::nullopt;
    value = value * 10 + (c - '0');
  }
  if (value < 1500 || value > 2100) return std::nullopt;
  return value;
}

// Ordinal vocabulary shared by every distinct value, if any.
std::optional<int> ordinal_group(const Column& column) {
  std::set<std::string> distinct;
  for (const Cell& cell : column.values) {
    if (cell) distinct.insert(lower(trim(truncated(*cell))));
  }
  if (distinct.empty()) return std::nullopt;
  for (int g = 0; g < kNumVocabGroups; ++g) {
    bool all = std::all_of(distinct.begin(), distinct.end(), [&](const auto& v) {
      return vocabulary_rank(v, g).has_value();
    });
    if (all) return g;
  }
  return std::nullopt;
}

// Numeric reading of each present cell, in row order; nullopt where the cell
// has no numeric interpretation under the column's type.
std::vector<std::optional<double>> numeric_view(const Column& column) {
  std::vector<std::optional<double>> out;
  out.reserve(column.values.size());
  const bool year_rule = column.inferred_type == DataType::kTemporal &&
                         satisfies_year_rule(column);
  std::optional<int> group;
  if (column.inferred_type == DataType::kOrdinal) group = ordinal_group(column);
  for (const Cell& cell : column.values) {
    if (!cell) {
      out.emplace_back();
      continue;
    }
    std::string_view text = truncated(*cell);
    switch (column.inferred_type) {
      case DataType::kQuantitative:
        out.push_back(parse_number(text));
        break;
      case DataType::kTemporal:
        if (year_rule) {
          auto y = parse_year_token(text);
          out.push_back(y ? std::optional<double>(*y) : std::nullopt);
        } else {
          out.push_back(parse_iso_datetime(text));
        }
        break;
      case DataType::kBoolean: {
        std::string l = lower(trim(text));
        out.push_back(is_boolean_token(l)
                          ? std::optional<double>(boolean_value(l) ? 1.0 : 0.0)
                          : std::nullopt);
        break;
      }
      case DataType::kOrdinal: {
        auto r = group ? vocabulary_rank(lower(trim(text)), *group) : std::nullopt;
        out.push_back(r ? std::optional<double>(*r) : std::nullopt);
        break;
      }
      case DataType::kNominal:
        out.emplace_back();
        break;
    }
  }
  return out;
}

double log_scaled(double count, double cap) {
  return std::log1p(count) / std::log1p(cap);
}

}  // namespace

std::string_view data_type_name(DataType type) {
  switch (type) {
    case DataType::kQuantitative: return "quantitative";
    case DataType::kNominal: return "nominal";
    case DataType::kOrdinal: return "ordinal";
    case DataType::kTemporal: return "temporal";
    case DataType::kBoolean: return "boolean";
  }
  return "nominal";
}

std::optional<DataType> parse_data_type(std::string_view name) {
  for (int i = 0; i < kNumDataTypes; ++i) {
    auto t = static_cast<DataType>(i);
    if (data_type_name(t) == name) return t;
  }
  return std::nullopt;
}

std::string_view ColumnProfile::name(ProfileStat stat) {
  static constexpr std::array<std::string_view, kProfileSize> kNames = {
      "row_count_log",        "missing_ratio",
      "distinct_count_log",   "distinct_ratio",
      "norm_mean",            "norm_std",
      "norm_median",          "skewness_clamped",
      "range_log",            "monotonic_increasing",
      "monotonic_decreasing", "is_sorted_any",
      "negative_ratio",       "zero_ratio",
      "integer_ratio",        "outlier_ratio",
      "mean_char_length_log", "max_char_length_log",
      "is_year_like",         "month_name_ratio",
      "weekday_name_ratio",   "all_unique_flag",
      "mode_frequency_ratio", "entropy_norm"};
  return kNames[static_cast<std::size_t>(stat)];
}

std::optional<double> parse_number(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  // from_chars accepts "inf"/"nan"; only finite decimal forms count.
  char first = text.front() == '-' && text.size() > 1 ? text[1] : text.front();
  if (!(first >= '0' && first <= '9') && first != '.') return std::nullopt;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

std::optional<double> parse_iso_datetime(std::string_view text) {
  text = trim(text);
  auto digits = [&](std::size_t pos, std::size_t n) -> std::optional<int> {
    if (pos + n > text.size()) return std::nullopt;
    int v = 0;
    for (std::size_t i = pos; i < pos + n; ++i) {
      char c = text[i];
      if (c < '0' || c > '9') return std::nullopt;
      v = v * 10 + (c - '0');
    }
    return v;
  };
  auto y = digits(0, 4);
  if (!y || text.size() < 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  auto m = digits(5, 2);
  auto d = digits(8, 2);
  if (!m || !d) return std::nullopt;
  using namespace std::chrono;
  year_month_day ymd{year{*y}, month{static_cast<unsigned>(*m)},
                     day{static_cast<unsigned>(*d)}};
  if (!ymd.ok()) return std::nullopt;
  double days = static_cast<double>(sys_days{ymd}.time_since_epoch().count());
  if (text.size() == 10) return days;
  if (text[10] != 'T' && text[10] != ' ') return std::nullopt;
  auto hh = digits(11, 2);
  if (!hh || text.size() < 16 || text[13] != ':') return std::nullopt;
  auto mm = digits(14, 2);
  if (!mm || *hh > 23 || *mm > 59) return std::nullopt;
  std::size_t pos = 16;
  int ss = 0;
  if (pos < text.size() && text[pos] == ':') {
    auto s = digits(pos + 1, 2);
    if (!s || *s > 60) return std::nullopt;
    ss = *s;
    pos += 3;
    if (pos < text.size() && text[pos] == '.') {
      ++pos;
      std::size_t start = pos;
      while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
      if (pos == start) return std::nullopt;
    }
  }
  if (pos < text.size()) {
    if (text[pos] == 'Z') {
      ++pos;
    } else if (text[pos] == '+' || text[pos] == '-') {
      auto oh = digits(pos + 1, 2);
      if (!oh || pos + 6 != text.size() || text[pos + 3] != ':') return std::nullopt;
      auto om = digits(pos + 4, 2);
      if (!om) return std::nullopt;
      pos += 6;
    }
  }
  if (pos != text.size()) return std::nullopt;
  return days + (*hh * 3600.0 + *mm * 60.0 + ss) / 86400.0;
}

bool satisfies_year_rule(const Column& column) {
  if (!header_mentions_time(column.header)) return false;
  bool any = false;
  for (const Cell& cell : column.values) {
    if (!cell) continue;
    if (!parse_year_token(truncated(*cell))) return false;
    any = true;
  }
  return any;
}

bool is_month_name(std::string_view text) {
  return vocabulary_rank(lower(trim(text)), 0).has_value();
}

bool is_weekday_name(std::string_view text) {
  return vocabulary_rank(lower(trim(text)), 1).has_value();
}

DataTable parse_csv(std::string_view bytes, std::string name) {
  DataTable table;
  table.name = std::move(name);
  char id[24];
  std::snprintf(id, sizeof(id), "t%016llx",
                static_cast<unsigned long long>(fnv1a(bytes)));
  table.table_id = id;

  std::string_view input = bytes;
  if (input.substr(0, 3) == "\xEF\xBB\xBF") input.remove_prefix(3);
  if (input.empty()) throw Error(ErrorCode::kEmptyInput, "input has no bytes");

  std::vector<std::vector<Cell>> rows;
  std::vector<Cell> row;
  std::string field;
  bool quoted_field = false;
  bool in_quotes = false;
  std::size_t line = 1;
  std::size_t quote_line = 0;
  std::size_t quote_offset = 0;

  auto end_field = [&] {
    if (!quoted_field && trim(field).empty()) {
      row.emplace_back();
    } else {
      row.emplace_back(quoted_field ? field : std::string(trim(field)));
    }
    field.clear();
    quoted_field = false;
  };
  auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row.clear();
  };

  for (std::size_t i = 0; i < input.size(); ++i) {
    char c = input[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < input.size() && input[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!trim(field).empty()) {
          throw Error(ErrorCode::kMalformedCsv,
                      "stray quote at line " + std::to_string(line) +
                          ", byte " + std::to_string(i));
        }
        field.clear();
        in_quotes = true;
        quoted_field = true;
        quote_line = line;
        quote_offset = i;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < input.size() && input[i + 1] == '\n') ++i;
        [[fallthrough]];
      case '\n':
        end_row();
        ++line;
        break;
      default:
        field.push_back(c);
    }
  }
  if (in_quotes) {
    throw Error(ErrorCode::kMalformedCsv,
                "unclosed quote opened at line " + std::to_string(quote_line) +
                    ", byte " + std::to_string(quote_offset));
  }
  if (!field.empty() || quoted_field || !row.empty()) end_row();

  if (rows.empty() || rows.front().empty()) {
    throw Error(ErrorCode::kEmptyInput, "no header row");
  }
  const std::vector<Cell>& header = rows.front();
  const std::size_t width = header.size();
  if (rows.size() < 2) throw Error(ErrorCode::kEmptyInput, "no data rows");

  table.columns.resize(width);
  for (std::size_t c = 0; c < width; ++c) {
    table.columns[c].index = static_cast<int>(c);
    table.columns[c].header = header[c].value_or("");
    table.columns[c].values.reserve(rows.size() - 1);
  }
  for (std::size_t r = 1; r < rows.size(); ++r) {
    std::vector<Cell>& cells = rows[r];
    if (cells.size() > width) {
      throw Error(ErrorCode::kMalformedCsv,
                  "row " + std::to_string(r + 1) + " has " +
                      std::to_string(cells.size()) + " fields, header has " +
                      std::to_string(width));
    }
    for (std::size_t c = 0; c < width; ++c) {
      table.columns[c].values.push_back(c < cells.size() ? std::move(cells[c])
                                                         : Cell{});
    }
  }
  table.row_count = rows.size() - 1;
  for (Column& column : table.columns) column.inferred_type = infer_type(column);
  return table;
}

DataType infer_type(const Column& column) {
  std::size_t present = 0, booleans = 0, temporals = 0, numbers = 0;
  for (const Cell& cell : column.values) {
    if (!cell) continue;
    ++present;
    std::string_view text = truncated(*cell);
    if (is_boolean_token(lower(trim(text)))) ++booleans;
    if (parse_iso_datetime(text)) ++temporals;
    if (parse_number(text)) ++numbers;
  }
  if (present == 0) return DataType::kNominal;
  const double n = static_cast<double>(present);
  if (booleans / n >= kTypeThreshold) return DataType::kBoolean;
  if (temporals / n >= kTypeThreshold || satisfies_year_rule(column)) {
    return DataType::kTemporal;
  }
  if (numbers / n >= kTypeThreshold) return DataType::kQuantitative;
  if (ordinal_group(column)) return DataType::kOrdinal;
  return DataType::kNominal;
}

ColumnProfile profile(const Column& column) {
  ColumnProfile p;
  const std::size_t n = column.values.size();
  p[ProfileStat::kRowCountLog] = log_scaled(static_cast<double>(n), 1e6);

  std::vector<std::string_view> present;
  present.reserve(n);
  for (const Cell& cell : column.values) {
    if (cell) present.push_back(truncated(*cell));
  }
  const std::size_t m = present.size();
  if (n > 0) {
    p[ProfileStat::kMissingRatio] =
        static_cast<double>(n - m) / static_cast<double>(n);
  }
  p[ProfileStat::kIsYearLike] = satisfies_year_rule(column) ? 1.0 : 0.0;
  if (m == 0) {
    // Row count and missing ratio are the only defined statistics.
    p[ProfileStat::kIsYearLike] = 0.0;
    return p;
  }
  const double dm = static_cast<double>(m);

  const auto numeric = numeric_view(column);
  std::vector<double> nums;
  for (const auto& v : numeric) {
    if (v) nums.push_back(*v);
  }
  const bool quantitative = column.inferred_type == DataType::kQuantitative;

  // Value histogram: numeric identity for quantitative columns, raw text
  // otherwise.
  std::map<std::string, std::size_t> histogram;
  if (quantitative) {
    std::map<double, std::size_t> by_value;
    for (double v : nums) ++by_value[v];
    std::size_t unparsed = m - nums.size();
    std::size_t k = 0;
    for (const auto& [value, count] : by_value) {
      histogram["#" + std::to_string(k++)] = count;
    }
    if (unparsed > 0) {
      for (std::string_view s : present) {
        if (!parse_number(s)) ++histogram["$" + std::string(s)];
      }
    }
  } else {
    for (std::string_view s : present) ++histogram[std::string(s)];
  }
  const double distinct = static_cast<double>(histogram.size());
  p[ProfileStat::kDistinctCountLog] = log_scaled(distinct, 1e6);
  p[ProfileStat::kDistinctRatio] = distinct / dm;
  p[ProfileStat::kAllUniqueFlag] = histogram.size() == m ? 1.0 : 0.0;
  std::size_t mode = 0;
  double entropy = 0.0;
  for (const auto& [key, count] : histogram) {
    mode = std::max(mode, count);
    double q = static_cast<double>(count) / dm;
    entropy -= q * std::log(q);
  }
  p[ProfileStat::kModeFrequencyRatio] = static_cast<double>(mode) / dm;
  if (histogram.size() >= 2) {
    p[ProfileStat::kEntropyNorm] = std::clamp(entropy / std::log(distinct), 0.0, 1.0);
  }

  // Order statistics: numeric comparison when the column has a numeric
  // reading, byte-wise text comparison otherwise.
  std::size_t increasing = 0, decreasing = 0, pairs = 0;
  bool non_decreasing = true, non_increasing = true;
  auto tally = [&](auto prev, auto cur) {
    ++pairs;
    if (cur > prev) {
      ++increasing;
      non_increasing = false;
    } else if (cur < prev) {
      ++decreasing;
      non_decreasing = false;
    }
  };
  if (!nums.empty()) {
    for (std::size_t i = 1; i < nums.size(); ++i) tally(nums[i - 1], nums[i]);
  } else {
    for (std::size_t i = 1; i < present.size(); ++i) tally(present[i - 1], present[i]);
  }
  if (pairs > 0) {
    p[ProfileStat::kMonotonicIncreasing] = static_cast<double>(increasing) / pairs;
    p[ProfileStat::kMonotonicDecreasing] = static_cast<double>(decreasing) / pairs;
    p[ProfileStat::kIsSortedAny] = (non_decreasing || non_increasing) ? 1.0 : 0.0;
  }

  if (!nums.empty()) {
    const double dn = static_cast<double>(nums.size());
    const auto [min_it, max_it] = std::minmax_element(nums.begin(), nums.end());
    const double lo = *min_it, hi = *max_it;
    const double range = hi - lo;
    std::size_t negatives = 0, zeros = 0;
    for (double v : nums) {
      if (v < 0) ++negatives;
      if (v == 0) ++zeros;
    }
    p[ProfileStat::kNegativeRatio] = negatives / dn;
    p[ProfileStat::kZeroRatio] = zeros / dn;
    const double magnitude = std::max(std::abs(lo), std::abs(hi));
    if (magnitude > 0) {
      p[ProfileStat::kRangeLog] = std::log1p(range / magnitude) / std::log(3.0);
    }
    if (range > 0) {
      std::vector<double> norm(nums.size());
      std::transform(nums.begin(), nums.end(), norm.begin(),
                     [&](double v) { return (v - lo) / range; });
      double mean = 0.0;
      for (double v : norm) mean += v;
      mean /= dn;
      double m2 = 0.0, m3 = 0.0;
      for (double v : norm) {
        double d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
      }
      m2 /= dn;
      m3 /= dn;
      const double sd = std::sqrt(m2);
      p[ProfileStat::kNormMean] = mean;
      p[ProfileStat::kNormStd] = sd;
      std::vector<double> sorted = norm;
      std::sort(sorted.begin(), sorted.end());
      const std::size_t mid = sorted.size() / 2;
      p[ProfileStat::kNormMedian] = sorted.size() % 2 == 1
                                        ? sorted[mid]
                                        : 0.5 * (sorted[mid - 1] + sorted[mid]);
      if (nums.size() >= 3 && sd > 0) {
        double skew = m3 / (sd * sd * sd);
        p[ProfileStat::kSkewnessClamped] = std::clamp(skew, -3.0, 3.0) / 3.0;
      }
      if (sd > 0) {
        std::size_t outliers = 0;
        for (double v : norm) {
          if (std::abs(v - mean) / sd > 3.0) ++outliers;
        }
        p[ProfileStat::kOutlierRatio] = outliers / dn;
      }
      // Fraction of values on the grid lo + k * step, where step is the
      // smallest gap between distinct values. Invariant under positive
      // rescaling, and 1.0 for integer-coded data.
      std::vector<double> uniq = sorted;
      uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
      double step = 1.0;
      for (std::size_t i = 1; i < uniq.size(); ++i) {
        step = std::min(step, uniq[i] - uniq[i - 1]);
      }
      if (step > 0) {
        std::size_t on_grid = 0;
        for (double v : norm) {
          double k = v / step;
          if (std::abs(k - std::round(k)) < 1e-6) ++on_grid;
        }
        p[ProfileStat::kIntegerRatio] = on_grid / dn;
      }
    }
  }

  if (!quantitative) {
    double total = 0.0;
    std::size_t longest = 0;
    for (std::string_view s : present) {
      total += static_cast<double>(s.size());
      longest = std::max(longest, s.size());
    }
    p[ProfileStat::kMeanCharLengthLog] =
        log_scaled(total / dm, static_cast<double>(kMaxCellBytes));
    p[ProfileStat::kMaxCharLengthLog] =
        log_scaled(static_cast<double>(longest), static_cast<double>(kMaxCellBytes));
  }

  std::size_t months = 0, weekdays = 0;
  for (std::string_view s : present) {
    if (is_month_name(s)) ++months;
    if (is_weekday_name(s)) ++weekdays;
  }
  p[ProfileStat::kMonthNameRatio] = months / dm;
  p[ProfileStat::kWeekdayNameRatio] = weekdays / dm;

  for (double& v : p.values) {
    if (!std::isfinite(v)) v = 0.0;
  }
  return p;
}

}  // namespace mvforge
