#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "core.hpp"

namespace qslab {

namespace forms {

inline Rational H(long n, int k = 1) { return harmonic(n, k); }
inline Rational R(long p, long q = 1) { return make_rational(p, q); }

inline Rational qs_mean(long n) { return 2 * (n + 1) * H(n) - 4 * n; }

inline Rational qs_var(long n) {
  Rational N = n;
  return 7 * N * N - 4 * (N + 1) * (N + 1) * H(n, 2) - 2 * (N + 1) * H(n) + 13 * N;
}

inline Rational qs_stages(long n) { return n; }

inline Rational qs_swaps(long n) {
  require(n >= 2, "qs_swaps: formula holds for n >= 2");
  return (n + 1) * H(n) / 3 - R(n, 9) - R(5, 18);
}

inline Rational qs_B(long n) {
  Rational N = n, h = H(n);
  return 2 * (N + 1) * (N + 1) * h * h - (8 * N + 2) * (N + 1) * h + N * (23 * N + 17) / 2 -
         2 * (N + 1) * (N + 1) * H(n, 2);
}

inline Rational cutoff_mean(long n, long m) {
  require(m >= 0 && n > m, "cutoff_mean: needs n > m >= 0");
  return (n + 1) * (2 * H(n + 1) - 2 * H(m + 2) + 1);
}

inline Rational cutoff_stages(long n, long m) {
  require(m >= 0 && n > m, "cutoff_stages: needs n > m >= 0");
  return R(2 * (n + 1), m + 2) - 1;
}

inline Rational cutoff_swaps(long n, long m) {
  require(m >= 0 && n > m, "cutoff_swaps: needs n > m >= 0");
  return (n + 1) * (H(n + 1) / 3 - H(m + 2) / 3 + R(1, 6) - R(1, m + 2)) + R(1, 2);
}

// Closed form for a multiset of n distinct values with multiplicities s.
inline Rational multiset_mean(const std::vector<long>& s) {
  require(!s.empty(), "multiset_mean: needs at least one multiplicity");
  long N = 0;
  for (long x : s) {
    require(x >= 1, "multiset_mean: multiplicities must be >= 1");
    N += x;
  }
  long n = static_cast<long>(s.size());
  return 2 * (1 + R(1, n)) * N * H(n) - 3 * N - n;
}

// Exact expectation from the partition recurrence
// E(s) = N - 1 + (1/N) sum_i s_i (E(s_1..s_{i-1}) + E(s_{i+1}..s_n)).
inline Rational multiset_mean_exact(const std::vector<long>& s) {
  require(!s.empty(), "multiset_mean_exact: needs at least one multiplicity");
  const std::size_t n = s.size();
  std::vector<long> pre(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    require(s[i] >= 1, "multiset_mean_exact: multiplicities must be >= 1");
    pre[i + 1] = pre[i] + s[i];
  }
  // E[a][b] for the contiguous value block [a, b).
  std::vector<std::vector<Rational>> E(n + 1, std::vector<Rational>(n + 1));
  for (std::size_t len = 1; len <= n; ++len)
    for (std::size_t a = 0; a + len <= n; ++a) {
      std::size_t b = a + len;
      long N = pre[b] - pre[a];
      Rational acc = 0;
      for (std::size_t i = a; i < b; ++i) acc += s[i] * (E[a][i] + E[i + 1][b]);
      E[a][b] = N - 1 + acc / N;
    }
  return E[0][n];
}

inline Rational multiset_upper_ref(long N) { return 2 * N * (H(N) + 1) - 2; }

inline Rational quickselect_mean(long n, long m) {
  require(m >= 1 && m <= n, "quickselect_mean: needs 1 <= m <= n");
  return 2 * (n + 3 + (n + 1) * H(n) - (m + 2) * H(m) - (n - m + 3) * H(n + 1 - m));
}

inline Rational median_select_cost(long k) {
  require(k >= 0, "median_select_cost: k >= 0");
  return 2 * (2 * k + 4 + (2 * k + 2) * H(2 * k + 1) - 2 * (k + 3) * H(k + 1));
}

// Average selection overhead of one remedian of (2k+1)^beta keys.
inline Rational remedian_select_cost(long k, long beta) {
  require(k >= 0 && beta >= 1, "remedian_select_cost: k >= 0, beta >= 1");
  BigInt calls = 0, p = 1;
  for (long b = 0; b < beta; ++b) {
    calls += p;
    p *= 2 * k + 1;
  }
  return Rational(calls) * median_select_cost(k);
}

inline Rational median_sample_passes(long n, long k) {
  require(k >= 0, "median_sample_passes: k >= 0");
  return Rational(n + 1) / (2 * (H(2 * k + 2) - H(k + 1))) - 1;
}

inline Rational leading_coeff_median(long k) {
  require(k >= 0, "leading_coeff_median: k >= 0");
  return 1 / (H(2 * k + 2) - H(k + 1));
}

inline double van_emden_coeff(long k) { return std::numbers::ln2 * to_double(leading_coeff_median(k)); }

inline Rational dual_partition_mean(long n) {
  require(n >= 2, "dual_partition_mean: n >= 2");
  return R(5 * n - 7, 3);
}

inline Rational dual_var(long n) { return qs_var(n); }

inline Rational dual_fpp(long n) {
  Rational N = n, h = H(n + 1);
  return 4 * (N + 1) * (N + 1) * (h * h - H(n + 1, 2)) - 4 * h * (N + 1) * (4 * N + 3) + 23 * N * N + 33 * N + 12;
}

inline Rational dual_swaps_asym(long n) { return R(4, 5) * (n + 1) * H(n) - R(24 * n + 4, 25); }
inline Rational dual_stages_asym(long n) { return R(2 * (n + 1), 5) - R(1, 2); }
inline Rational dual_swaps_partition_mean(long n) { return R(2 * (n + 1), 3); }

struct SamplesortParts {
  Rational sample_sort;  // cost of sorting the 2t+1 sample
  double insertion;      // binary insertion of the rest, approximate
  Rational buckets;      // sorting the 2t+2 buckets
  double total;
};

inline SamplesortParts samplesort_mean(long n, long t) {
  require(t >= 0 && 2 * t + 1 < n, "samplesort_mean: needs 2t+1 < n");
  SamplesortParts p;
  p.sample_sort = 2 * (2 * t + 2) * H(2 * t + 1) - 4 * (2 * t + 1);
  p.insertion = static_cast<double>(n - 2 * t - 1) * std::log2(static_cast<double>(2 * t + 1));
  p.buckets = 2 * (n + 1) * (H(n + 1) - H(2 * (t + 1))) - 2 * (n - 2 * t - 1);
  p.total = to_double(p.sample_sort) + p.insertion + to_double(p.buckets);
  return p;
}

inline double samplesort_corollary(long n, long l) {
  double N = static_cast<double>(n), L = static_cast<double>(l);
  return 1.386 * N * std::log2(N) - 0.386 * (N - L) * std::log2(L) - 2 * N - 0.846 * L;
}

inline Rational albacea_estimate(long n) {
  require(n >= 1, "albacea_estimate: n >= 1");
  long c = ceil_log2(static_cast<unsigned long long>(n) + 1);
  return Rational(n) * c - (BigInt(1) << static_cast<unsigned>(c)) - n + c + 1;
}

inline Rational abar(long s) {
  require(s >= 1, "abar: s >= 1");
  long c = ceil_log2(static_cast<unsigned long long>(s));
  return c + R(s - (1L << c), s);
}

inline Rational multipivot_stage_coeff(long k) {
  require(k >= 1, "multipivot_stage_coeff: k >= 1");
  return 1 / ((k + 1) * (H(k + 1) - 1));
}

inline Rational multipivot_comparison_coeff(long k) {
  require(k >= 1, "multipivot_comparison_coeff: k >= 1");
  long c = ceil_log2(static_cast<unsigned long long>(k) + 1);
  return (c + 1 - R(1L << c, k + 1)) / (H(k + 1) - 1);
}

inline Rational genq_coeff(long k, long t, const Rational& a) {
  require(k >= 2 && t >= 0, "genq_coeff: needs k >= 2, t >= 0");
  return a / (H(k * (t + 1)) - H(t + 1));
}

inline Rational inversion_bound(const std::vector<long>& m) {
  long n = 0;
  BigInt within = 0;
  for (long x : m) {
    require(x >= 0, "inversion_bound: chain sizes must be >= 0");
    n += x;
    within += binomial(static_cast<unsigned long>(x), 2);
  }
  return Rational(binomial(static_cast<unsigned long>(n), 2) - within);
}

inline long info_bound(const BigInt& e) {
  require(e >= 1, "info_bound: e >= 1");
  return ceil_log2_big(e);
}

inline double fk_upper(const BigInt& e, long n) { return log2_big(e) + 2.0 * static_cast<double>(n); }

inline long setup_lb(long w) { return w - 1; }

inline double log2_factorial(double x) { return std::lgamma(x + 1) / std::numbers::ln2; }

inline double uniform_poset_log2e(long n) {
  double N = static_cast<double>(n);
  return log2_factorial(N / 2) + 2 * log2_factorial(N / 4);
}

inline double speedup_uniform() { return 1 / (2 * std::numbers::ln2); }
inline double kdim_factor(long k) { return (1 - 1.0 / static_cast<double>(k)) / (2 * std::numbers::ln2); }
inline double interval_ch7_lb(long n) { return static_cast<double>(n) / 4 * std::log2(static_cast<double>(n)); }

inline Rational levels_ratio(long d, long k) {
  require(d >= 1 && k >= 1, "levels_ratio: d, k >= 1");
  return d * qs_mean(k) / qs_mean(d * k);
}

inline double martingale_var_ref(long n) {
  double N = static_cast<double>(n);
  return 7 - 2 * std::numbers::pi * std::numbers::pi / 3 - 2 * std::log(N) / N;
}

inline double durand_ninther(long n) {
  double N = static_cast<double>(n), L = std::log(N);
  return 1.5697 * N * L - 1.0363 * N + 1.5697 * L - 7.3484;
}

}  // namespace forms

// Name-addressed catalog.
struct FormulaParams {
  std::map<std::string, std::string> raw;

  bool has(const std::string& k) const { return raw.count(k) != 0; }
  const std::string& get(const std::string& k) const {
    auto it = raw.find(k);
    if (it == raw.end()) throw ParameterError("missing parameter: " + k);
    return it->second;
  }
  long integer(const std::string& k) const {
    const auto& s = get(k);
    try {
      std::size_t pos = 0;
      long v = std::stol(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ParameterError("parameter " + k + " must be an integer, got '" + s + "'");
    }
  }
  BigInt big(const std::string& k) const {
    BigInt v;
    if (v.set_str(get(k), 10) != 0) throw ParameterError("parameter " + k + " must be an integer");
    return v;
  }
  Rational rational(const std::string& k) const {
    Rational v;
    try {
      v = Rational(get(k));
      v.canonicalize();
    } catch (const std::exception&) {
      throw ParameterError("parameter " + k + " must be a rational p/q");
    }
    if (v.get_den() == 0) throw ParameterError("parameter " + k + " has zero denominator");
    return v;
  }
  std::vector<long> list(const std::string& k) const {
    std::vector<long> out;
    std::stringstream ss(get(k));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        out.push_back(std::stol(item));
      } catch (const std::exception&) {
        throw ParameterError("parameter " + k + " must be a comma separated integer list");
      }
    }
    return out;
  }
};

struct FormulaValue {
  bool exact = true;       // value is an exact rational
  bool asymptotic = false;  // closed form valid only as n grows
  Rational q;
  double x = 0;

  std::string str() const { return exact ? to_string(q) : format_float(x); }
};

struct FormulaEntry {
  std::string name;
  std::vector<std::string> params;
  std::string domain;
  bool exact;
  bool asymptotic;
  std::function<FormulaValue(const FormulaParams&)> eval;
};

namespace detail {

inline FormulaValue exact_value(const Rational& q, bool asym = false) {
  FormulaValue v;
  v.q = q;
  v.x = to_double(q);
  v.asymptotic = asym;
  return v;
}

inline FormulaValue float_value(double x, bool asym) {
  FormulaValue v;
  v.exact = false;
  v.x = x;
  v.asymptotic = asym;
  return v;
}

}  // namespace detail

inline const std::vector<FormulaEntry>& formula_catalog() {
  using namespace forms;
  using detail::exact_value;
  using detail::float_value;
  using P = const FormulaParams&;
  static const std::vector<FormulaEntry> cat = {
      {"qs_mean", {"n"}, "n >= 0", true, false, [](P p) { return exact_value(qs_mean(p.integer("n"))); }},
      {"qs_var", {"n"}, "n >= 0", true, false, [](P p) { return exact_value(qs_var(p.integer("n"))); }},
      {"qs_stages", {"n"}, "n >= 0", true, false, [](P p) { return exact_value(qs_stages(p.integer("n"))); }},
      {"qs_swaps", {"n"}, "n >= 2", true, false, [](P p) { return exact_value(qs_swaps(p.integer("n"))); }},
      {"qs_B", {"n"}, "n >= 0", true, false, [](P p) { return exact_value(qs_B(p.integer("n"))); }},
      {"cutoff_mean", {"n", "m"}, "n > m >= 0", true, false,
       [](P p) { return exact_value(cutoff_mean(p.integer("n"), p.integer("m"))); }},
      {"cutoff_stages", {"n", "m"}, "n > m >= 0", true, false,
       [](P p) { return exact_value(cutoff_stages(p.integer("n"), p.integer("m"))); }},
      {"cutoff_swaps", {"n", "m"}, "n > m >= 0", true, false,
       [](P p) { return exact_value(cutoff_swaps(p.integer("n"), p.integer("m"))); }},
      {"multiset_mean", {"s"}, "s = comma separated multiplicities >= 1; exact when all equal", true, false,
       [](P p) { return exact_value(multiset_mean(p.list("s"))); }},
      {"multiset_mean_exact", {"s"}, "s = comma separated multiplicities >= 1", true, false,
       [](P p) { return exact_value(multiset_mean_exact(p.list("s"))); }},
      {"multiset_upper_ref", {"N"}, "N >= 1", true, true,
       [](P p) { return exact_value(multiset_upper_ref(p.integer("N")), true); }},
      {"quickselect_mean", {"n", "m"}, "1 <= m <= n", true, false,
       [](P p) { return exact_value(quickselect_mean(p.integer("n"), p.integer("m"))); }},
      {"median_select_cost", {"k"}, "k >= 0", true, false,
       [](P p) { return exact_value(median_select_cost(p.integer("k"))); }},
      {"remedian_select_cost", {"k", "beta"}, "k >= 0, beta >= 1", true, false,
       [](P p) { return exact_value(remedian_select_cost(p.integer("k"), p.integer("beta"))); }},
      {"median_sample_passes", {"n", "k"}, "k >= 0", true, true,
       [](P p) { return exact_value(median_sample_passes(p.integer("n"), p.integer("k")), true); }},
      {"dual_partition_mean", {"n"}, "n >= 2", true, false,
       [](P p) { return exact_value(dual_partition_mean(p.integer("n"))); }},
      {"dual_var", {"n"}, "n >= 0", true, false, [](P p) { return exact_value(dual_var(p.integer("n"))); }},
      {"dual_fpp", {"n"}, "n >= 0", true, false, [](P p) { return exact_value(dual_fpp(p.integer("n"))); }},
      {"dual_swaps_asym", {"n"}, "n >= 1", true, true,
       [](P p) { return exact_value(dual_swaps_asym(p.integer("n")), true); }},
      {"dual_stages_asym", {"n"}, "n >= 1", true, true,
       [](P p) { return exact_value(dual_stages_asym(p.integer("n")), true); }},
      {"samplesort_mean", {"n", "t"}, "2t+1 < n", false, true,
       [](P p) { return float_value(samplesort_mean(p.integer("n"), p.integer("t")).total, true); }},
      {"samplesort_corollary", {"n", "l"}, "1 <= l < n", false, true,
       [](P p) { return float_value(samplesort_corollary(p.integer("n"), p.integer("l")), true); }},
      {"albacea_estimate", {"n"}, "n >= 1", true, false,
       [](P p) { return exact_value(albacea_estimate(p.integer("n"))); }},
      {"abar", {"s"}, "s >= 1", true, false, [](P p) { return exact_value(abar(p.integer("s"))); }},
      {"multipivot_stage_coeff", {"k"}, "k >= 1", true, false,
       [](P p) { return exact_value(multipivot_stage_coeff(p.integer("k"))); }},
      {"multipivot_comparison_coeff", {"k"}, "k >= 1", true, false,
       [](P p) { return exact_value(multipivot_comparison_coeff(p.integer("k"))); }},
      {"leading_coeff_median", {"k"}, "k >= 0", true, false,
       [](P p) { return exact_value(leading_coeff_median(p.integer("k"))); }},
      {"van_emden_coeff", {"k"}, "k >= 0", false, true,
       [](P p) { return float_value(van_emden_coeff(p.integer("k")), true); }},
      {"genq_coeff", {"k", "t", "abar"}, "k >= 2, t >= 0, abar = average first-stage coefficient", true, false,
       [](P p) { return exact_value(genq_coeff(p.integer("k"), p.integer("t"), p.rational("abar"))); }},
      {"inversion_bound", {"m"}, "m = comma separated chain sizes", true, false,
       [](P p) { return exact_value(inversion_bound(p.list("m"))); }},
      {"fk_upper", {"e", "n"}, "e >= 1", false, false,
       [](P p) { return float_value(fk_upper(p.big("e"), p.integer("n")), false); }},
      {"info_bound", {"e"}, "e >= 1", true, false,
       [](P p) { return exact_value(Rational(info_bound(p.big("e")))); }},
      {"setup_lb", {"w"}, "w >= 1", true, false, [](P p) { return exact_value(Rational(setup_lb(p.integer("w")))); }},
      {"uniform_poset_log2e", {"n"}, "n >= 1", false, true,
       [](P p) { return float_value(uniform_poset_log2e(p.integer("n")), true); }},
      {"speedup_uniform", {}, "", false, true, [](P) { return float_value(speedup_uniform(), true); }},
      {"kdim_factor", {"k"}, "k >= 1", false, true,
       [](P p) { return float_value(kdim_factor(p.integer("k")), true); }},
      {"interval_ch7_lb", {"n"}, "n >= 1", false, true,
       [](P p) { return float_value(interval_ch7_lb(p.integer("n")), true); }},
      {"levels_ratio", {"d", "k"}, "d, k >= 1", true, false,
       [](P p) { return exact_value(levels_ratio(p.integer("d"), p.integer("k"))); }},
      {"martingale_var_ref", {"n"}, "n >= 1", false, true,
       [](P p) { return float_value(martingale_var_ref(p.integer("n")), true); }},
      {"durand_ninther", {"n"}, "n >= 2", false, true,
       [](P p) { return float_value(durand_ninther(p.integer("n")), true); }},
  };
  return cat;
}

inline const FormulaEntry& find_formula(const std::string& name) {
  for (auto& e : formula_catalog())
    if (e.name == name) return e;
  throw ParameterError("unknown formula: " + name);
}

inline FormulaValue eval_formula(const std::string& name, const FormulaParams& p) {
  const auto& e = find_formula(name);
  for (auto& k : e.params)
    if (!p.has(k)) throw ParameterError(name + ": missing parameter " + k);
  return e.eval(p);
}

inline Rational eval_exact(const std::string& name, const FormulaParams& p) {
  auto v = eval_formula(name, p);
  if (!v.exact) throw ParameterError(name + " has no exact rational value");
  return v.q;
}

}  // namespace qslab
