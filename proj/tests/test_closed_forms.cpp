#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "qslab/closed_forms.hpp"
#include "qslab/harness.hpp"
#include "qslab/identities.hpp"

using namespace qslab;

namespace {

FormulaParams params(std::initializer_list<std::pair<const std::string, std::string>> kv) { return {kv}; }

}  // namespace

TEST(Harmonic, Values) {
  EXPECT_EQ(harmonic(0), 0);
  EXPECT_EQ(harmonic(3), Rational(11, 6));
  EXPECT_EQ(harmonic(4, 2), Rational(205, 144));
  EXPECT_THROW(harmonic(3, 0), ParameterError);
}

TEST(Catalog, SpotValues) {
  EXPECT_EQ(eval_exact("qs_mean", params({{"n", "3"}})), Rational(8, 3));
  EXPECT_EQ(eval_exact("qs_var", params({{"n", "1"}})), 0);
  EXPECT_EQ(eval_exact("qs_var", params({{"n", "2"}})), 0);
  EXPECT_EQ(eval_exact("qs_var", params({{"n", "3"}})), Rational(2, 9));
  for (long n = 1; n <= 30; ++n) EXPECT_EQ(forms::median_sample_passes(n, 0), n);
  EXPECT_EQ(forms::median_select_cost(1), Rational(8, 3));
  EXPECT_EQ(forms::remedian_select_cost(1, 2), Rational(32, 3));
  EXPECT_EQ(forms::leading_coeff_median(1), Rational(12, 7));
  EXPECT_EQ(forms::multipivot_stage_coeff(2), Rational(2, 5));
  EXPECT_EQ(forms::multipivot_stage_coeff(1), 1);
  EXPECT_EQ(forms::dual_partition_mean(2), 1);
  EXPECT_EQ(forms::inversion_bound({5, 3}), 15);
  EXPECT_EQ(forms::info_bound(BigInt(40320)), 16);
  EXPECT_EQ(forms::info_bound(BigInt(1)), 0);
  EXPECT_EQ(forms::abar(4), 2);
  EXPECT_EQ(forms::abar(3), Rational(5, 3));
  EXPECT_EQ(forms::quickselect_mean(1, 1), 0);
  EXPECT_EQ(forms::quickselect_mean(3, 2), Rational(8, 3));
  EXPECT_NEAR(to_double(forms::qs_mean(100)), 647.85, 0.01);
  EXPECT_NEAR(to_double(forms::qs_var(100)), 3539, 1);
  EXPECT_NEAR(forms::speedup_uniform(), 0.72135, 1e-5);
  EXPECT_NEAR(forms::kdim_factor(4), 0.541, 1e-3);
}

TEST(Catalog, ErrorsAndFlags) {
  EXPECT_THROW(eval_formula("nope", {}), ParameterError);
  EXPECT_THROW(eval_formula("qs_mean", {}), ParameterError);
  EXPECT_THROW(eval_formula("qs_mean", params({{"n", "x"}})), ParameterError);
  EXPECT_THROW(eval_formula("quickselect_mean", params({{"n", "3"}, {"m", "4"}})), ParameterError);
  EXPECT_THROW(eval_formula("qs_swaps", params({{"n", "1"}})), ParameterError);
  auto v = eval_formula("dual_swaps_asym", params({{"n", "10"}}));
  EXPECT_TRUE(v.asymptotic);
  auto f = eval_formula("speedup_uniform", {});
  EXPECT_FALSE(f.exact);
  EXPECT_THROW(eval_exact("speedup_uniform", {}), ParameterError);
  for (auto& e : formula_catalog()) EXPECT_FALSE(e.domain.empty() && !e.params.empty()) << e.name;
}

TEST(Catalog, CutoffFormsSolveTheirRecurrences) {
  // C: toll n+1 above m, zero at or below m.
  // S: toll (n-2)/6 above m, zero at or below m.
  for (long m = 0; m <= 5; ++m) {
    std::vector<Rational> C(40, Rational(0)), S(40, Rational(0)), P(40, Rational(0));
    for (long n = m + 1; n < 40; ++n) {
      Rational sc = 0, ss = 0, sp = 0;
      for (long j = 1; j <= n; ++j) {
        sc += C[j - 1] + C[n - j];
        ss += S[j - 1] + S[n - j];
        sp += P[j - 1] + P[n - j];
      }
      C[n] = n + 1 + sc / n;
      S[n] = make_rational(n - 2, 6) + ss / n;
      P[n] = 1 + sp / n;
      EXPECT_EQ(C[n], forms::cutoff_mean(n, m)) << n << " " << m;
      EXPECT_EQ(S[n], forms::cutoff_swaps(n, m)) << n << " " << m;
      EXPECT_EQ(P[n], forms::cutoff_stages(n, m)) << n << " " << m;
    }
  }
}

TEST(Catalog, MultisetConsistency) {
  for (long n = 1; n <= 20; ++n) EXPECT_EQ(forms::multiset_mean(std::vector<long>(n, 1)), forms::qs_mean(n));
  EXPECT_EQ(forms::multiset_mean({7}), 6);
}

TEST(Catalog, MultisetExactIndependentOracle) {
  // Two keys of values u < v meet iff no value strictly between them is the
  // first pivot drawn among [u, v]; comparisons are then N - n + sum over
  // value pairs i < j of 2 s_i s_j / (s_i + ... + s_j).
  std::vector<std::vector<long>> cases = {{2, 1}, {1, 3, 2}, {4, 4}, {1, 1, 5, 2}, {3, 2, 1, 2, 3}};
  for (auto& s : cases) {
    long N = std::accumulate(s.begin(), s.end(), 0L), n = static_cast<long>(s.size());
    Rational v = N - n;
    for (long i = 0; i < n; ++i)
      for (long j = i + 1; j < n; ++j) {
        long span = 0;
        for (long t = i; t <= j; ++t) span += s[t];
        v += make_rational(2 * s[i] * s[j], span);
      }
    EXPECT_EQ(forms::multiset_mean_exact(s), v);
  }
}

TEST(Catalog, DualFppConsistency) {
  for (long n = 0; n <= 64; ++n)
    EXPECT_EQ(forms::dual_fpp(n) + forms::qs_mean(n) - forms::qs_mean(n) * forms::qs_mean(n), forms::qs_var(n)) << n;
}

TEST(Catalog, SecondFactorialMomentFromDistribution) {
  for (long n = 0; n <= 12; ++n) {
    auto d = gf_distribution("single", n);
    EXPECT_EQ(factorial_moment(d, 2), 2 * forms::qs_B(n)) << n;
    EXPECT_EQ(factorial_moment(d, 2), forms::dual_fpp(n)) << n;
  }
}

TEST(Catalog, DualAsymptoticFormsAreOnlyAsymptotic) {
  // Seed values of the exact recurrences differ from the closed forms.
  EXPECT_NE(forms::dual_swaps_asym(2), 2);
  EXPECT_EQ(forms::dual_swaps_asym(2), Rational(38, 25));
}

TEST(Catalog, AlbaceaAndSamplesortTerms) {
  EXPECT_EQ(forms::albacea_estimate(1), 0);
  auto p = forms::samplesort_mean(10000, 63);
  EXPECT_GT(p.total, 0);
  EXPECT_THROW(forms::samplesort_mean(10, 5), ParameterError);
}

TEST(Catalog, MultipivotComparisonCoefficient) {
  EXPECT_EQ(forms::multipivot_comparison_coeff(1), 2);
  EXPECT_EQ(forms::multipivot_comparison_coeff(2), Rational(2, 1) * Rational(5, 3) / Rational(5, 6) / 2);
}

TEST(Identities, HoldForOneToSixtyFour) {
  for (auto& id : harmonic_identities())
    for (long n = 1; n <= 64; ++n) EXPECT_TRUE(harmonic_identity_check(id.name, n)) << id.name << " n=" << n;
}

TEST(Identities, WorkedValuesAndErrors) {
  auto s = identity_sides("weighted_harmonic_sum", 4);
  EXPECT_EQ(s.lhs, Rational(83, 6));
  EXPECT_EQ(s.rhs, Rational(83, 6));
  auto c = identity_sides("harmonic_over_successor", 1);
  EXPECT_EQ(c.lhs, 1);
  EXPECT_THROW(harmonic_identity_check("nope", 3), ParameterError);
  EXPECT_THROW(harmonic_identity_check("harmonic_prefix_sum", 0), ParameterError);
}

TEST(Remedian, BetaOne) {
  auto p = remedian_split_probabilities(1, 1);
  ASSERT_EQ(p.size(), 3u);
  EXPECT_EQ(p[0], 0);
  EXPECT_EQ(p[1], 1);
  EXPECT_EQ(p[2], 0);
  auto q = remedian_split_probabilities(2, 1);
  EXPECT_EQ(q[2], 1);
}

TEST(Remedian, NintherMatchesBruteForce) {
  auto p = remedian_split_probabilities(1, 2);
  ASSERT_EQ(p.size(), 9u);
  EXPECT_EQ(std::accumulate(p.begin(), p.end(), Rational(0)), 1);
  std::vector<int> perm(9);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<unsigned long> count(9, 0);
  unsigned long total = 0;
  do {
    int med[3];
    for (int g = 0; g < 3; ++g) {
      int a = perm[3 * g], b = perm[3 * g + 1], c = perm[3 * g + 2];
      med[g] = std::max(std::min(a, b), std::min(std::max(a, b), c));
    }
    int m = std::max(std::min(med[0], med[1]), std::min(std::max(med[0], med[1]), med[2]));
    ++count[m];
    ++total;
  } while (std::next_permutation(perm.begin(), perm.end()));
  for (int j = 0; j < 9; ++j) EXPECT_EQ(p[j], make_rational(count[j], total)) << j;
}

TEST(Remedian, BetaThreeSumsToOneAndIsSymmetric) {
  auto p = remedian_split_probabilities(1, 3);
  ASSERT_EQ(p.size(), 27u);
  EXPECT_EQ(std::accumulate(p.begin(), p.end(), Rational(0)), 1);
  for (std::size_t j = 0; j < 27; ++j) EXPECT_EQ(p[j], p[26 - j]);
  auto q = remedian_split_probabilities(2, 2);
  EXPECT_EQ(std::accumulate(q.begin(), q.end(), Rational(0)), 1);
  EXPECT_THROW(remedian_split_probability(1, 2, 9), ParameterError);
}
