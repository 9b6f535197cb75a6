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

#include "hapnav/eval/stats.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

namespace hapnav::eval {
namespace {

// Oracle: two-sided p as the share of all 2^n sign flips whose statistic is
// at least as far from the null mean as the observed one.
double signed_rank_oracle(const std::vector<double>& diffs) {
  std::vector<double> d;
  for (double x : diffs) {
    if (x != 0.0) d.push_back(x);
  }
  if (d.empty()) return 1.0;
  const std::size_t n = d.size();
  std::vector<double> mag(n);
  for (std::size_t i = 0; i < n; ++i) mag[i] = std::abs(d[i]);
  // midranks by counting
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n; ++i) {
    double less = 0, equal = 0;
    for (std::size_t j = 0; j < n; ++j) {
      less += mag[j] < mag[i];
      equal += mag[j] == mag[i];
    }
    rank[i] = less + (equal + 1.0) / 2.0;
  }
  double total = 0, obs = 0;
  for (std::size_t i = 0; i < n; ++i) {
    total += 2 * rank[i];
    if (d[i] > 0) obs += 2 * rank[i];
  }
  const double dev = std::abs(2 * obs - total);  // |2*(W - mean)| in doubled units
  std::uint64_t hits = 0;
  for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1) s += 2 * rank[i];
    }
    if (std::abs(2 * s - total) >= dev) ++hits;
  }
  return std::min(1.0, static_cast<double>(hits) / std::ldexp(1.0, static_cast<int>(n)));
}

// Oracle: enumerate every size-n1 subset of the pooled sample. With ties
// the null distribution is not symmetric, so the two-sided p doubles the
// smaller tail.
double rank_sum_oracle(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> all = a;
  all.insert(all.end(), b.begin(), b.end());
  const std::size_t n = all.size(), n1 = a.size();
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n; ++i) {
    double less = 0, equal = 0;
    for (std::size_t j = 0; j < n; ++j) {
      less += all[j] < all[i];
      equal += all[j] == all[i];
    }
    rank[i] = 2 * less + equal + 1.0;  // doubled midrank
  }
  double obs = 0;
  for (std::size_t i = 0; i < n1; ++i) obs += rank[i];
  std::uint64_t lower = 0, upper = 0, count = 0;
  for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcountll(mask)) != n1) continue;
    ++count;
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1) s += rank[i];
    }
    lower += s <= obs;
    upper += s >= obs;
  }
  return std::min(1.0, 2.0 * static_cast<double>(std::min(lower, upper)) / static_cast<double>(count));
}

TEST(SignedRank, AllZerosIsDegenerate) {
  const std::vector<double> z = {0.0, 0.0, 0.0};
  const auto r = wilcoxon_signed_rank(z);
  EXPECT_EQ(r.p_value, 1.0);
  EXPECT_EQ(r.n, 0);
}

TEST(SignedRank, OneToFive) {
  const std::vector<double> d = {1, 2, 3, 4, 5};
  const auto r = wilcoxon_signed_rank(d);
  EXPECT_EQ(r.p_value, 2.0 / 32.0);
  EXPECT_EQ(r.statistic, 15.0);
  EXPECT_EQ(r.method, "exact");
}

TEST(SignedRank, MatchesEnumerationExactly) {
  std::mt19937 gen(17);
  std::uniform_int_distribution<int> len(1, 8), val(-4, 4);
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> d(static_cast<std::size_t>(len(gen)));
    for (auto& x : d) x = val(gen);  // small integers force ties and zeros
    ASSERT_EQ(wilcoxon_signed_rank(d).p_value, signed_rank_oracle(d)) << t;
  }
}

TEST(SignedRank, NormalBranchCloseToExactAtCrossover) {
  std::mt19937 gen(5);
  std::normal_distribution<double> nd(0.3, 1.0);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    std::vector<double> d(kSignedRankExactMax);
    for (auto& x : d) x = nd(gen);
    const double e = wilcoxon_signed_rank(d, PMethod::Exact).p_value;
    const double a = wilcoxon_signed_rank(d, PMethod::Normal).p_value;
    worst = std::max(worst, std::abs(e - a));
  }
  EXPECT_LE(worst, 0.01);
  std::vector<double> big(40, 1.0);
  EXPECT_EQ(wilcoxon_signed_rank(big).method, "normal");
}

TEST(RankSum, Examples) {
  const std::vector<double> a = {1, 2, 3}, b = {4, 5, 6};
  const auto r = wilcoxon_rank_sum(a, b);
  EXPECT_DOUBLE_EQ(r.p_value, 0.1);
  EXPECT_EQ(r.statistic, 6.0);
  EXPECT_EQ(wilcoxon_rank_sum(a, a).p_value, 1.0);
  EXPECT_THROW(wilcoxon_rank_sum(a, std::vector<double>{}), std::domain_error);
}

TEST(RankSum, PermutationInvariant) {
  std::vector<double> a = {3.1, 0.2, 5.5, 1.0}, b = {2.2, 9.0, 4.4, 0.7, 6.1};
  const double p = wilcoxon_rank_sum(a, b).p_value;
  std::mt19937 gen(1);
  for (int i = 0; i < 10; ++i) {
    std::shuffle(a.begin(), a.end(), gen);
    std::shuffle(b.begin(), b.end(), gen);
    EXPECT_EQ(wilcoxon_rank_sum(a, b).p_value, p);
  }
}

TEST(RankSum, MatchesEnumerationExactly) {
  std::mt19937 gen(29);
  std::uniform_int_distribution<int> total(2, 12), val(0, 6);
  for (int t = 0; t < 1000; ++t) {
    const int n = total(gen);
    const int n1 = std::uniform_int_distribution<int>(1, n - 1)(gen);
    std::vector<double> a(static_cast<std::size_t>(n1)), b(static_cast<std::size_t>(n - n1));
    for (auto& x : a) x = val(gen);
    for (auto& x : b) x = val(gen);
    ASSERT_EQ(wilcoxon_rank_sum(a, b).p_value, rank_sum_oracle(a, b)) << t;
  }
}

TEST(RankSum, NormalBranchCloseToExactAtCrossover) {
  std::mt19937 gen(8);
  std::normal_distribution<double> nd(0.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    std::vector<double> a(6), b(6);
    for (auto& x : a) x = nd(gen) + 0.5;
    for (auto& x : b) x = nd(gen);
    worst = std::max(worst, std::abs(wilcoxon_rank_sum(a, b, PMethod::Exact).p_value -
                                     wilcoxon_rank_sum(a, b, PMethod::Normal).p_value));
  }
  EXPECT_LE(worst, 0.02);
}

TEST(Holm, HandComputed) {
  EXPECT_EQ(holm_correct(std::vector<double>{0.03}), std::vector<double>{0.03});
  const auto h = holm_correct(std::vector<double>{0.01, 0.04});
  EXPECT_DOUBLE_EQ(h[0], 0.02);
  EXPECT_DOUBLE_EQ(h[1], 0.04);
  const auto g = holm_correct(std::vector<double>{0.04, 0.5, 0.01});
  EXPECT_DOUBLE_EQ(g[2], 0.03);
  EXPECT_DOUBLE_EQ(g[0], 0.08);
  EXPECT_DOUBLE_EQ(g[1], 0.5);
  EXPECT_THROW(holm_correct(std::vector<double>{1.2}), std::domain_error);
}

TEST(Holm, MonotoneAndNotBelowInput) {
  std::mt19937 gen(4);
  std::uniform_real_distribution<double> u(0.0, 0.3);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> p(9);
    for (auto& x : p) x = u(gen);
    const auto h = holm_correct(p);
    std::vector<std::size_t> idx(9);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return p[a] < p[b]; });
    for (std::size_t i = 0; i < 9; ++i) {
      ASSERT_GE(h[i], p[i]);
      ASSERT_LE(h[i], 1.0);
      if (i > 0) {
        ASSERT_GE(h[idx[i]], h[idx[i - 1]]);
      }
    }
  }
}

}  // namespace
}  // namespace hapnav::eval
