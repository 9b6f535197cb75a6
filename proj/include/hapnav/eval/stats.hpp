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

#ifndef HAPNAV_EVAL_STATS_HPP
#define HAPNAV_EVAL_STATS_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hapnav::eval {

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  int n = 0;  // signed-rank: nonzero pairs; rank-sum: n1 + n2
  int n1 = 0;
  int n2 = 0;
  std::string method;
};

enum class PMethod { Auto, Exact, Normal };

inline constexpr int kSignedRankExactMax = 25;
inline constexpr int kRankSumExactMax = 12;

/// Midranks (1-based) of the values, ties sharing their average rank.
inline std::vector<double> midranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

/// Sum of t^3 - t over tie groups.
inline double tie_term(std::span<const double> v) {
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  double acc = 0.0;
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t j = i;
    while (j + 1 < s.size() && s[j + 1] == s[i]) ++j;
    const double t = static_cast<double>(j - i + 1);
    acc += t * t * t - t;
    i = j + 1;
  }
  return acc;
}

namespace detail {

inline double two_sided(double lower, double upper) { return std::min(1.0, 2.0 * std::min(lower, upper)); }

inline double normal_two_sided(double stat, double mean, double var) {
  if (!(var > 0.0)) return 1.0;
  const double dev = std::abs(stat - mean) - 0.5;
  if (dev <= 0.0) return 1.0;
  return std::min(1.0, std::erfc(dev / std::sqrt(var) / std::numbers::sqrt2));
}

}  // namespace detail

/// Two-sided Wilcoxon signed-rank test on paired differences. Zero
/// differences are dropped before ranking.
inline TestResult wilcoxon_signed_rank(std::span<const double> diffs, PMethod method = PMethod::Auto) {
  std::vector<double> d;
  for (double x : diffs) {
    if (!std::isfinite(x)) throw std::domain_error("wilcoxon_signed_rank: non-finite difference");
    if (x != 0.0) d.push_back(x);
  }
  TestResult res;
  res.n = static_cast<int>(d.size());
  if (d.empty()) {
    res.method = "degenerate";
    return res;
  }
  std::vector<double> mag(d.size());
  std::transform(d.begin(), d.end(), mag.begin(), [](double x) { return std::abs(x); });
  const auto ranks = midranks(mag);
  double w_plus = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] > 0.0) w_plus += ranks[i];
  }
  res.statistic = w_plus;
  const int n = res.n;
  const bool exact = method == PMethod::Exact || (method == PMethod::Auto && n <= kSignedRankExactMax);
  if (exact) {
    // distribution of the doubled statistic; doubled midranks are integers
    std::vector<int> r2(d.size());
    int total = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      r2[i] = static_cast<int>(std::lround(2.0 * ranks[i]));
      total += r2[i];
    }
    std::vector<double> count(static_cast<std::size_t>(total) + 1, 0.0);
    count[0] = 1.0;
    int reach = 0;
    for (int r : r2) {
      reach += r;
      for (int s = reach; s >= r; --s) count[static_cast<std::size_t>(s)] += count[static_cast<std::size_t>(s - r)];
    }
    const auto obs = static_cast<int>(std::lround(2.0 * w_plus));
    double lo = 0.0, hi = 0.0;
    for (int s = 0; s <= total; ++s) {
      if (s <= obs) lo += count[static_cast<std::size_t>(s)];
      if (s >= obs) hi += count[static_cast<std::size_t>(s)];
    }
    const double all = std::ldexp(1.0, n);
    res.p_value = detail::two_sided(lo / all, hi / all);
    res.method = "exact";
  } else {
    const double nn = n;
    const double mean = nn * (nn + 1.0) / 4.0;
    const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term(mag) / 48.0;
    res.p_value = detail::normal_two_sided(w_plus, mean, var);
    res.method = "normal";
  }
  return res;
}

/// Two-sided Wilcoxon rank-sum test; the statistic is the rank sum of `a`.
inline TestResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b,
                                    PMethod method = PMethod::Auto) {
  if (a.empty() || b.empty()) throw std::domain_error("wilcoxon_rank_sum: empty sample");
  std::vector<double> all(a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  for (double x : all) {
    if (!std::isfinite(x)) throw std::domain_error("wilcoxon_rank_sum: non-finite value");
  }
  const auto ranks = midranks(all);
  const int n1 = static_cast<int>(a.size()), n2 = static_cast<int>(b.size()), nt = n1 + n2;
  double w = 0.0;
  for (int i = 0; i < n1; ++i) w += ranks[static_cast<std::size_t>(i)];
  TestResult res;
  res.statistic = w;
  res.n = nt;
  res.n1 = n1;
  res.n2 = n2;
  const bool exact = method == PMethod::Exact || (method == PMethod::Auto && nt <= kRankSumExactMax);
  if (exact) {
    // count[k][s]: subsets of size k with doubled rank sum s
    int total = 0;
    std::vector<int> r2(ranks.size());
    for (std::size_t i = 0; i < ranks.size(); ++i) {
      r2[i] = static_cast<int>(std::lround(2.0 * ranks[i]));
      total += r2[i];
    }
    const auto width = static_cast<std::size_t>(total) + 1;
    std::vector<double> count(static_cast<std::size_t>(n1 + 1) * width, 0.0);
    auto at = [&](int k, int s) -> double& { return count[static_cast<std::size_t>(k) * width + static_cast<std::size_t>(s)]; };
    at(0, 0) = 1.0;
    for (int r : r2) {
      for (int k = n1; k >= 1; --k) {
        for (int s = total; s >= r; --s) at(k, s) += at(k - 1, s - r);
      }
    }
    const auto obs = static_cast<int>(std::lround(2.0 * w));
    double lo = 0.0, hi = 0.0, sum = 0.0;
    for (int s = 0; s <= total; ++s) {
      const double c = at(n1, s);
      sum += c;
      if (s <= obs) lo += c;
      if (s >= obs) hi += c;
    }
    res.p_value = detail::two_sided(lo / sum, hi / sum);
    res.method = "exact";
  } else {
    const double N = nt;
    const double mean = n1 * (N + 1.0) / 2.0;
    const double var = static_cast<double>(n1) * n2 / 12.0 * ((N + 1.0) - tie_term(all) / (N * (N - 1.0)));
    res.p_value = detail::normal_two_sided(w, mean, var);
    res.method = "normal";
  }
  return res;
}

/// Holm step-down adjustment, returned in input order.
inline std::vector<double> holm_correct(std::span<const double> p) {
  for (double x : p) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("holm_correct: p-value outside [0, 1]");
  }
  const std::size_t m = p.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  std::vector<double> out(m);
  double running = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    running = std::max(running, std::min(1.0, static_cast<double>(m - i) * p[order[i]]));
    out[order[i]] = running;
  }
  return out;
}

}  // namespace hapnav::eval

#endif  // HAPNAV_EVAL_STATS_HPP
