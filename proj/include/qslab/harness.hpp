#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "closed_forms.hpp"
#include "core.hpp"
#include "rng.hpp"
#include "sorting.hpp"

namespace qslab {

// Comparison count -> exact probability.
using ExactDistribution = std::map<std::uint64_t, Rational>;

inline Rational total_mass(const ExactDistribution& d) {
  Rational s = 0;
  for (auto& [x, p] : d) s += p;
  return s;
}

// E[X(X-1)...(X-k+1)].
inline Rational factorial_moment(const ExactDistribution& d, int k) {
  require(k >= 1, "factorial moment: k >= 1");
  Rational s = 0;
  for (auto& [x, p] : d) {
    BigInt f = 1;
    for (int i = 0; i < k; ++i) {
      long v = static_cast<long>(x) - i;
      if (v <= 0) {
        f = 0;
        break;
      }
      f *= v;
    }
    s += p * Rational(f);
  }
  return s;
}

inline Rational dist_mean(const ExactDistribution& d) { return factorial_moment(d, 1); }

inline Rational central_moment(const ExactDistribution& d, int k) {
  Rational m = dist_mean(d), s = 0;
  for (auto& [x, p] : d) {
    Rational dx = Rational(static_cast<unsigned long>(x)) - m, pw = 1;
    for (int i = 0; i < k; ++i) pw *= dx;
    s += p * pw;
  }
  return s;
}

inline Rational dist_variance(const ExactDistribution& d) {
  return factorial_moment(d, 2) + factorial_moment(d, 1) - dist_mean(d) * dist_mean(d);
}

// Exact distribution from the comparison-count recurrences. Polynomials are
// coefficient vectors indexed by count.
inline ExactDistribution gf_distribution(const std::string& variant, long n) {
  require(n >= 0, "distribution: n >= 0");
  if (n > 12) throw CapacityError("generating-function distribution supports n <= 12");
  using Poly = std::vector<Rational>;
  auto mul = [](const Poly& a, const Poly& b) {
    Poly r(a.size() + b.size() - 1, Rational(0));
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] != 0)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
  };
  auto add_shifted = [](Poly& acc, const Poly& p, std::size_t shift, const Rational& w) {
    if (acc.size() < p.size() + shift) acc.resize(p.size() + shift, Rational(0));
    for (std::size_t i = 0; i < p.size(); ++i) acc[i + shift] += w * p[i];
  };
  std::vector<Poly> f{{Rational(1)}, {Rational(1)}};
  for (long m = 2; m <= n; ++m) {
    Poly acc;
    if (variant == "single") {
      for (long j = 1; j <= m; ++j) add_shifted(acc, mul(f[j - 1], f[m - j]), m - 1, Rational(1, m));
    } else if (variant == "dual") {
      Rational w = make_rational(2, m * (m - 1));
      for (long i = 1; i <= m; ++i)
        for (long j = i + 1; j <= m; ++j)
          add_shifted(acc, mul(mul(f[i - 1], f[j - i - 1]), f[m - j]), 2 * m - i - 2, w);
    } else {
      throw ParameterError("distribution: variant must be single or dual");
    }
    f.push_back(acc);
  }
  ExactDistribution d;
  const Poly& p = f[n];
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] != 0) d[i] = p[i];
  return d;
}

// Replays a sorting routine under every pivot-choice path. The routine gets an
// EnumChooser and returns its tally.
struct EnumerationResult {
  ExactDistribution comparisons;
  Rational mean_comparisons = 0, mean_exchanges = 0, mean_stages = 0;
  std::uint64_t paths = 0;
};

inline EnumerationResult enumerate_paths(const std::function<CostTally(EnumChooser&)>& run,
                                         std::uint64_t max_paths = 50'000'000) {
  EnumerationResult r;
  EnumChooser ch;
  do {
    if (++r.paths > max_paths) throw CapacityError("enumeration: too many choice paths");
    CostTally t = run(ch);
    Rational w = ch.weight();
    r.comparisons[t.comparisons] += w;
    r.mean_comparisons += w * Rational(static_cast<unsigned long>(t.comparisons));
    r.mean_exchanges += w * Rational(static_cast<unsigned long>(t.exchanges));
    r.mean_stages += w * Rational(static_cast<unsigned long>(t.stages));
  } while (ch.next());
  return r;
}

inline std::vector<int> iota_keys(long n) {
  std::vector<int> v(static_cast<std::size_t>(n));
  std::iota(v.begin(), v.end(), 0);
  return v;
}

// Comparison distribution of an engine, enumerating its pivot choices on a
// fixed input (the count does not depend on the input order).
inline EnumerationResult exhaustive_engine(const std::string& variant, long n, long k = 1) {
  require(n >= 0, "exhaustive: n >= 0");
  if (n > 10) throw CapacityError("exhaustive engine enumeration supports n <= 10");
  auto base = iota_keys(n);
  std::reverse(base.begin(), base.end());
  return enumerate_paths([&](EnumChooser& ch) {
    auto a = base;
    if (variant == "single") return quicksort_single_inplace(a, ch);
    if (variant == "dual") return quicksort_dual_inplace(a, ch);
    if (variant == "multi") return quicksort_multi_inplace(a, static_cast<std::size_t>(k), ch);
    if (variant == "quickselect") return quickselect_with(a, static_cast<std::size_t>(k), ch).second;
    throw ParameterError("exhaustive: unknown variant " + variant);
  });
}

// Mean exchanges of the single-pivot engine averaged over all n! inputs and
// all pivot choices. Memoized on the relative-order pattern of a subarray.
inline Rational exhaustive_single_exchanges(long n) {
  require(n >= 0, "exhaustive exchanges: n >= 0");
  if (n > 9) throw CapacityError("exhaustive exchanges support n <= 9");
  std::map<std::vector<int>, Rational> memo;
  std::function<Rational(const std::vector<int>&)> E = [&](const std::vector<int>& pat) -> Rational {
    const std::size_t len = pat.size();
    if (len <= 1) return 0;
    auto it = memo.find(pat);
    if (it != memo.end()) return it->second;
    Rational acc = 0;
    for (std::size_t p = 0; p < len; ++p) {
      std::vector<int> a(pat);
      detail::Ctx<int> c{a, {}};
      std::swap(a[p], a[len - 1]);
      std::size_t q = detail::partition_single(c, 0, len - 1);
      auto norm = [](std::vector<int> v) {
        std::vector<int> s(v);
        std::sort(s.begin(), s.end());
        for (auto& x : v) x = static_cast<int>(std::lower_bound(s.begin(), s.end(), x) - s.begin());
        return v;
      };
      std::vector<int> left(a.begin(), a.begin() + q), right(a.begin() + q + 1, a.end());
      acc += Rational(static_cast<unsigned long>(c.t.exchanges)) + E(norm(left)) + E(norm(right));
    }
    Rational v = acc / static_cast<unsigned long>(len);
    memo.emplace(pat, v);
    return v;
  };
  auto perm = iota_keys(n);
  Rational sum = 0;
  unsigned long count = 0;
  do {
    sum += E(perm);
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return sum / count;
}

// Moments of a sample, computed in index order.
struct SampleStats {
  std::uint64_t count = 0;
  double mean = 0, var = 0, skew = 0;
  double stderr_mean() const { return count > 1 ? std::sqrt(var / static_cast<double>(count)) : 0; }
};

inline SampleStats sample_stats(const std::vector<double>& xs) {
  SampleStats s;
  double m2 = 0, m3 = 0, mean = 0;
  std::uint64_t n = 0;
  for (double x : xs) {
    const std::uint64_t n1 = n;
    ++n;
    const double delta = x - mean, dn = delta / static_cast<double>(n), term1 = delta * dn * static_cast<double>(n1);
    mean += dn;
    m3 += term1 * dn * static_cast<double>(n - 2) - 3 * dn * m2;
    m2 += term1;
  }
  s.count = n;
  s.mean = mean;
  s.var = n > 1 ? m2 / static_cast<double>(n - 1) : 0;
  s.skew = (n > 2 && m2 > 0) ? std::sqrt(static_cast<double>(n)) * m3 / std::pow(m2, 1.5) : 0;
  return s;
}

inline unsigned default_jobs() {
  unsigned h = std::thread::hardware_concurrency();
  return h == 0 ? 1 : h;
}

// Runs trial(rng, index) for every index with per-trial stream
// derive_seed(master, index). Results come back in index order, so any
// aggregate is independent of the worker count.
template <class R>
std::vector<R> run_trials(std::uint64_t trials, std::uint64_t master, unsigned jobs,
                          const std::function<R(Rng&, std::uint64_t)>& trial) {
  std::vector<R> out(trials);
  if (jobs == 0) jobs = 1;
  jobs = static_cast<unsigned>(std::min<std::uint64_t>(jobs, std::max<std::uint64_t>(trials, 1)));
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto worker = [&] {
    for (;;) {
      std::uint64_t i = next.fetch_add(1);
      if (i >= trials) return;
      try {
        Rng rng(derive_seed(master, i));
        out[i] = trial(rng, i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
        next = trials;
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (err) std::rethrow_exception(err);
  return out;
}

inline std::vector<int> random_permutation(long n, Rng& rng) {
  auto v = iota_keys(n);
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
  return v;
}

struct VariantSpec {
  std::string variant = "single";
  long k = 1;
  long beta = 1;
  long cutoff = 0;
  long sample = 1;
  long rank = 1;
  std::vector<long> mult;

  std::string params() const {
    std::string s;
    auto add = [&](const std::string& key, const std::string& v) { s += (s.empty() ? "" : ";") + key + "=" + v; };
    if (variant == "multi" || variant == "median" || variant == "remedian") add("k", std::to_string(k));
    if (variant == "remedian") add("beta", std::to_string(beta));
    if (variant == "samplesort") add("sample", std::to_string(sample));
    if (variant == "quickselect") add("m", std::to_string(rank));
    if (variant == "multiset") {
      std::string m;
      for (std::size_t i = 0; i < mult.size(); ++i) m += (i ? "," : "") + std::to_string(mult[i]);
      add("s", m);
    }
    if (cutoff > 0) add("cutoff", std::to_string(cutoff));
    return s;
  }
};

// One run of a variant on a random input of n keys.
inline CostTally run_variant(const VariantSpec& v, long n, Rng& rng) {
  require(n >= 0, "n must be >= 0");
  const auto cutoff = static_cast<std::size_t>(v.cutoff);
  if (v.variant == "multiset") {
    std::vector<int> a;
    for (std::size_t i = 0; i < v.mult.size(); ++i)
      for (long r = 0; r < v.mult[i]; ++r) a.push_back(static_cast<int>(i));
    for (std::size_t i = a.size(); i > 1; --i) std::swap(a[i - 1], a[rng.below(i)]);
    RandomChooser ch(rng.split(1));
    return quicksort_multiset_inplace(a, ch);
  }
  auto a = random_permutation(n, rng);
  RandomChooser ch(rng.split(1));
  if (v.variant == "single") return quicksort_single_inplace(a, ch, cutoff);
  if (v.variant == "dual") return quicksort_dual_inplace(a, ch, cutoff);
  if (v.variant == "multi") return quicksort_multi_inplace(a, static_cast<std::size_t>(v.k), ch, cutoff);
  if (v.variant == "median") {
    std::size_t c = std::max<std::size_t>(cutoff, static_cast<std::size_t>(2 * v.k + 1));
    return quicksort_median_sample_inplace(a, static_cast<std::size_t>(v.k), ch, c);
  }
  if (v.variant == "remedian") {
    std::size_t c = std::max<std::size_t>(cutoff, static_cast<std::size_t>(2 * v.k + 1));
    return quicksort_remedian_inplace(a, static_cast<std::size_t>(v.k), static_cast<std::size_t>(v.beta), ch, c);
  }
  if (v.variant == "samplesort") return samplesort_inplace(a, static_cast<std::size_t>(v.sample), ch);
  if (v.variant == "quickselect") return quickselect_with(a, static_cast<std::size_t>(v.rank), ch).second;
  throw ParameterError("unknown variant: " + v.variant);
}

// Exact reference mean for a variant, when a closed form exists.
inline std::optional<Rational> exact_reference(const VariantSpec& v, long n, const std::string& metric) {
  using namespace forms;
  if (metric == "comparisons") {
    if (v.variant == "single" || v.variant == "dual") {
      if (v.cutoff > 0 && v.variant == "single") return std::nullopt;
      if (v.cutoff == 0) return qs_mean(n);
    }
    if (v.variant == "multi" && v.k == 1 && v.cutoff == 0) return qs_mean(n);
    if (v.variant == "quickselect") return quickselect_mean(n, v.rank);
    if (v.variant == "multiset") return multiset_mean_exact(v.mult);
  }
  if (metric == "stages") {
    if ((v.variant == "single") && v.cutoff == 0) return qs_stages(n);
    if (v.variant == "single" && v.cutoff > 0 && n > v.cutoff) return cutoff_stages(n, v.cutoff);
  }
  if (metric == "exchanges" && v.variant == "single" && v.cutoff == 0 && n >= 2) return qs_swaps(n);
  return std::nullopt;
}

struct ExperimentReport {
  std::string variant, params, metric = "comparisons";
  long n = 0;
  std::uint64_t trials = 0, seed = 0;
  SampleStats stats;
  std::optional<Rational> reference;
  double radius = 0;
  double tolerance = 0;
  bool pass = true;
};

inline double metric_of(const CostTally& t, const std::string& metric) {
  if (metric == "comparisons") return static_cast<double>(t.comparisons);
  if (metric == "exchanges") return static_cast<double>(t.exchanges);
  if (metric == "stages") return static_cast<double>(t.stages);
  throw ParameterError("metric must be comparisons, exchanges or stages");
}

inline ExperimentReport montecarlo(const VariantSpec& v, long n, std::uint64_t trials, std::uint64_t seed,
                                   unsigned jobs, const std::string& metric = "comparisons", double tolerance = 0) {
  require(trials >= 100, "montecarlo needs trials >= 100");
  metric_of(CostTally{}, metric);
  std::vector<double> xs = run_trials<double>(trials, seed, jobs, [&](Rng& rng, std::uint64_t) {
    return metric_of(run_variant(v, n, rng), metric);
  });
  ExperimentReport r;
  r.variant = v.variant;
  r.params = v.params();
  r.metric = metric;
  r.n = n;
  r.trials = trials;
  r.seed = seed;
  r.stats = sample_stats(xs);
  r.radius = 3 * r.stats.stderr_mean();
  r.tolerance = tolerance;
  r.reference = exact_reference(v, n, metric);
  if (r.reference) r.pass = std::fabs(r.stats.mean - to_double(*r.reference)) <= r.radius + tolerance;
  return r;
}

struct MartingalePoint {
  long n;
  double empirical_var;
  double reference;
  Rational exact_var;  // Var(C_n)/(n+1)^2
};

inline std::vector<MartingalePoint> martingale_variance(const std::vector<long>& grid, std::uint64_t trials,
                                                        std::uint64_t seed, unsigned jobs) {
  require(std::is_sorted(grid.begin(), grid.end()), "martingale grid must be ascending");
  std::vector<MartingalePoint> out;
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    long n = grid[gi];
    require(n >= 1, "martingale grid values must be >= 1");
    const double mean = to_double(forms::qs_mean(n));
    VariantSpec v;
    auto xs = run_trials<double>(trials, derive_seed(seed, gi), jobs, [&](Rng& rng, std::uint64_t) {
      return (static_cast<double>(run_variant(v, n, rng).comparisons) - mean) / static_cast<double>(n + 1);
    });
    auto st = sample_stats(xs);
    Rational ex = forms::qs_var(n) / Rational((n + 1) * (n + 1));
    out.push_back({n, st.var, forms::martingale_var_ref(n), ex});
  }
  return out;
}

struct SkewPoint {
  long n;
  double skew;
  double stderr_skew;
  int sign;  // -1, 0 or +1 when the 3-sigma interval excludes 0, else 0
  std::optional<Rational> exact_third_central;
};

inline std::vector<SkewPoint> skewness_report(const std::vector<long>& grid, std::uint64_t trials, std::uint64_t seed,
                                              unsigned jobs) {
  std::vector<SkewPoint> out;
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    long n = grid[gi];
    if (n < 3) continue;
    VariantSpec v;
    auto xs = run_trials<double>(trials, derive_seed(seed, gi), jobs, [&](Rng& rng, std::uint64_t) {
      return static_cast<double>(run_variant(v, n, rng).comparisons);
    });
    auto st = sample_stats(xs);
    double T = static_cast<double>(trials);
    double se = std::sqrt(6 * T * (T - 1) / ((T - 2) * (T + 1) * (T + 3)));
    SkewPoint p{n, st.skew, se, 0, std::nullopt};
    if (std::fabs(st.skew) > 3 * se) p.sign = st.skew < 0 ? -1 : 1;
    if (n <= 12) p.exact_third_central = central_moment(gf_distribution("single", n), 3);
    out.push_back(p);
  }
  return out;
}

}  // namespace qslab
