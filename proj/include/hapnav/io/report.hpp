/*
Copyright 2026 The hapnav Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS-IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#ifndef HAPNAV_IO_REPORT_HPP
#define HAPNAV_IO_REPORT_HPP

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hapnav/eval/stats.hpp"
#include "hapnav/eval/trial.hpp"
#include "hapnav/io/log_io.hpp"

namespace hapnav::io {

struct NavigationRow {
  Condition condition = Condition::HapDir;
  int sessions = 0;
  std::vector<eval::TrialOutcome> trials;
  eval::ClassCounts counts;

  int n() const { return static_cast<int>(trials.size()); }
  double ratio(eval::TrialClass c) const {
    if (trials.empty()) return 0.0;
    const int k = c == eval::TrialClass::Perfect ? counts.perfect : c == eval::TrialClass::Good ? counts.good : counts.miss;
    return static_cast<double>(k) / static_cast<double>(trials.size());
  }
  std::vector<double> arrival_times() const {
    std::vector<double> v;
    for (const auto& t : trials) v.push_back(t.arrival_time);
    return v;
  }
  /// Mean travel distance over trials of one class; nullopt if none.
  std::optional<double> mean_distance(eval::TrialClass c) const {
    double s = 0.0;
    int k = 0;
    for (const auto& t : trials) {
      if (t.cls == c) {
        s += t.travel_distance;
        ++k;
      }
    }
    if (k == 0) return std::nullopt;
    return s / k;
  }
  int front_back_errs() const {
    int k = 0;
    for (const auto& t : trials) k += t.front_back_err ? 1 : 0;
    return k;
  }
};

struct FrontDetectRow {
  Condition condition = Condition::HapDir;
  int sessions = 0;
  std::vector<double> errors;
};

struct PairTest {
  std::string a, b;
  eval::TestResult result;
  double p_holm = 1.0;
};

struct Report {
  std::vector<NavigationRow> navigation;
  std::vector<FrontDetectRow> front_detect;
  std::vector<PairTest> arrival_tests;  // rank-sum on arrival times
  std::vector<PairTest> score_tests;    // signed-rank on questionnaire scores
};

namespace detail {

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

inline double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

inline void holm_fill(std::vector<PairTest>& tests) {
  std::vector<double> p;
  for (const auto& t : tests) p.push_back(t.result.p_value);
  const auto adj = eval::holm_correct(p);
  for (std::size_t i = 0; i < tests.size(); ++i) tests[i].p_holm = adj[i];
}

inline std::string fixed(double v, int prec) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

inline std::string pad(std::string s, std::size_t w) {
  if (s.size() < w) s.insert(s.begin(), w - s.size(), ' ');
  return s;
}

inline json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace detail

/// Questionnaire scores: one row per participant, one column per condition.
/// First row is the header ("participant,NT,NT&Hap,..."), '#' lines are comments.
struct ScoreTable {
  std::vector<std::string> conditions;
  std::vector<std::vector<double>> rows;
};

inline ScoreTable parse_scores(const std::string& text, const std::string& source = "scores") {
  ScoreTable t;
  std::istringstream in(text);
  std::string line;
  long lineno = 0;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(s);
    while (std::getline(ss, cell, ',')) {
      const auto b = cell.find_first_not_of(" \t\r");
      const auto e = cell.find_last_not_of(" \t\r");
      out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    return out;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    const auto cells = split(line);
    if (t.conditions.empty()) {
      if (cells.size() < 3) throw LogFormatError(lineno, "need a participant column and >= 2 conditions", source);
      t.conditions.assign(cells.begin() + 1, cells.end());
      continue;
    }
    if (cells.size() != t.conditions.size() + 1) throw LogFormatError(lineno, "wrong number of columns", source);
    std::vector<double> row;
    for (std::size_t i = 1; i < cells.size(); ++i) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cells[i], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != cells[i].size() || !std::isfinite(v)) {
        throw LogFormatError(lineno, "score '" + cells[i] + "' is not a number", source);
      }
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  if (t.conditions.empty()) throw LogFormatError(lineno, "no header row", source);
  if (t.rows.empty()) throw LogFormatError(lineno, "no score rows", source);
  return t;
}

/// Pairwise signed-rank tests over every pair of score columns, Holm-adjusted.
inline std::vector<PairTest> score_tests(const ScoreTable& t) {
  std::vector<PairTest> out;
  for (std::size_t i = 0; i < t.conditions.size(); ++i) {
    for (std::size_t j = i + 1; j < t.conditions.size(); ++j) {
      std::vector<double> d;
      for (const auto& r : t.rows) d.push_back(r[i] - r[j]);
      out.push_back({t.conditions[i], t.conditions[j], eval::wilcoxon_signed_rank(d), 1.0});
    }
  }
  if (!out.empty()) detail::holm_fill(out);
  return out;
}

/// Pools logs by condition (several logs of one condition are several
/// participants) and computes the tables and tests.
inline Report build_report(const std::vector<world::SessionLog>& logs, const world::WorldSpec& w) {
  Report r;
  std::map<Condition, NavigationRow> nav;
  std::map<Condition, FrontDetectRow> fd;
  for (const auto& log : logs) {
    const auto c = log.header.condition;
    if (log.header.mode == Mode::Navigation) {
      auto& row = nav[c];
      row.condition = c;
      ++row.sessions;
      for (auto& t : eval::classify_trials(log, w)) row.trials.push_back(std::move(t));
    } else {
      auto& row = fd[c];
      row.condition = c;
      ++row.sessions;
      for (double e : eval::answer_errors(log)) row.errors.push_back(e);
    }
  }
  for (auto& [c, row] : nav) {
    row.counts = eval::count_classes(row.trials);
    r.navigation.push_back(std::move(row));
  }
  for (auto& [c, row] : fd) r.front_detect.push_back(std::move(row));

  for (std::size_t i = 0; i < r.navigation.size(); ++i) {
    for (std::size_t j = i + 1; j < r.navigation.size(); ++j) {
      const auto a = r.navigation[i].arrival_times(), b = r.navigation[j].arrival_times();
      if (a.empty() || b.empty()) continue;
      r.arrival_tests.push_back({std::string(to_string(r.navigation[i].condition)),
                                 std::string(to_string(r.navigation[j].condition)), eval::wilcoxon_rank_sum(a, b), 1.0});
    }
  }
  if (!r.arrival_tests.empty()) detail::holm_fill(r.arrival_tests);
  return r;
}

inline std::string format_report(const Report& r) {
  using detail::fixed;
  using detail::pad;
  std::ostringstream os;
  if (!r.navigation.empty()) {
    os << "Group ratio of navigation task\n";
    os << pad("", 12) << pad("Perfect", 9) << pad("Good", 9) << pad("Miss", 9) << pad("n", 6) << "\n";
    for (const auto& row : r.navigation) {
      os << std::string(to_string(row.condition)) + std::string(12 - to_string(row.condition).size(), ' ')
         << pad(fixed(row.ratio(eval::TrialClass::Perfect), 2), 9) << pad(fixed(row.ratio(eval::TrialClass::Good), 2), 9)
         << pad(fixed(row.ratio(eval::TrialClass::Miss), 2), 9) << pad(std::to_string(row.n()), 6) << "\n";
    }
    os << "\nArrival and distance\n";
    os << pad("", 12) << pad("arrive_s", 10) << pad("sd_s", 8) << pad("perfect_m", 11) << pad("miss_m", 9)
       << pad("fb_err", 8) << "\n";
    for (const auto& row : r.navigation) {
      const auto at = row.arrival_times();
      const auto pm = row.mean_distance(eval::TrialClass::Perfect);
      const auto mm = row.mean_distance(eval::TrialClass::Miss);
      os << std::string(to_string(row.condition)) + std::string(12 - to_string(row.condition).size(), ' ')
         << pad(fixed(detail::mean(at), 1), 10) << pad(fixed(detail::sample_sd(at), 1), 8)
         << pad(pm ? fixed(*pm, 1) : "-", 11) << pad(mm ? fixed(*mm, 1) : "-", 9)
         << pad(std::to_string(row.front_back_errs()), 8) << "\n";
    }
  }
  if (!r.front_detect.empty()) {
    if (!r.navigation.empty()) os << "\n";
    os << "Front detection\n";
    os << pad("", 12) << pad("mean_abs", 10) << pad("within30", 10) << pad("n", 6) << "\n";
    for (const auto& row : r.front_detect) {
      os << std::string(to_string(row.condition)) + std::string(12 - to_string(row.condition).size(), ' ');
      if (row.errors.empty()) {
        os << pad("-", 10) << pad("-", 10) << pad("0", 6) << "\n";
        continue;
      }
      const auto s = eval::front_detect_summary(row.errors);
      os << pad(fixed(s.mean_abs, 2), 10) << pad(fixed(s.pct_within_30, 3), 10) << pad(std::to_string(s.n), 6) << "\n";
    }
  }
  auto tests = [&](const char* title, const std::vector<PairTest>& ts) {
    if (ts.empty()) return;
    os << "\n" << title << "\n";
    os << pad("pair", 24) << pad("stat", 10) << pad("p", 10) << pad("p_holm", 10) << "  method\n";
    for (const auto& t : ts) {
      os << pad(t.a + " vs " + t.b, 24) << pad(fixed(t.result.statistic, 1), 10) << pad(fixed(t.result.p_value, 4), 10)
         << pad(fixed(t.p_holm, 4), 10) << "  " << t.result.method << "\n";
    }
  };
  tests("Arrival time, rank-sum", r.arrival_tests);
  tests("Scores, signed-rank", r.score_tests);
  return os.str();
}

inline json to_json(const Report& r) {
  json nav = json::array(), fd = json::array();
  for (const auto& row : r.navigation) {
    const auto at = row.arrival_times();
    nav.push_back({{"condition", to_string(row.condition)},
                   {"sessions", row.sessions},
                   {"n", row.n()},
                   {"perfect", row.ratio(eval::TrialClass::Perfect)},
                   {"good", row.ratio(eval::TrialClass::Good)},
                   {"miss", row.ratio(eval::TrialClass::Miss)},
                   {"arrival_mean", detail::mean(at)},
                   {"arrival_sd", detail::sample_sd(at)},
                   {"perfect_distance", detail::opt_json(row.mean_distance(eval::TrialClass::Perfect))},
                   {"miss_distance", detail::opt_json(row.mean_distance(eval::TrialClass::Miss))},
                   {"front_back_errs", row.front_back_errs()}});
  }
  for (const auto& row : r.front_detect) {
    json j = {{"condition", to_string(row.condition)}, {"sessions", row.sessions}, {"n", row.errors.size()}};
    if (!row.errors.empty()) {
      const auto s = eval::front_detect_summary(row.errors);
      j["mean_abs"] = s.mean_abs;
      j["within_30"] = s.pct_within_30;
    }
    fd.push_back(j);
  }
  auto tests = [](const std::vector<PairTest>& ts) {
    json a = json::array();
    for (const auto& t : ts) {
      a.push_back({{"a", t.a},
                   {"b", t.b},
                   {"statistic", t.result.statistic},
                   {"p", t.result.p_value},
                   {"p_holm", t.p_holm},
                   {"method", t.result.method}});
    }
    return a;
  };
  return {{"navigation", nav},
          {"front_detect", fd},
          {"arrival_tests", tests(r.arrival_tests)},
          {"score_tests", tests(r.score_tests)}};
}

}  // namespace hapnav::io

#endif  // HAPNAV_IO_REPORT_HPP
