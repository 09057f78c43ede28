#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <optional>
#include <string>
#include <vector>

#include "closed_forms.hpp"
#include "graph_order.hpp"
#include "harness.hpp"
#include "poset.hpp"
#include "sorting.hpp"

namespace qslab {

template <class T>
struct MergeResult {
  std::vector<T> merged;
  std::uint64_t comparisons = 0;
  bool schedule_complete = true;  // shellsort only: schedule alone sorted the input
};

namespace detail {

template <class T, class Less>
void gap_insertion(std::vector<T>& a, std::size_t start, std::size_t gap, Less& less) {
  for (std::size_t i = start + gap; i < a.size(); i += gap) {
    std::size_t j = i;
    while (j >= start + gap && less(a[j], a[j - gap])) {
      std::swap(a[j], a[j - gap]);
      j -= gap;
    }
  }
}

}  // namespace detail

// Chains are concatenated and d is the longest chain length. Pass t = 1, 2, ...
// uses gap g = d - t + 1 and starts at position t; each subarray
// a_j, a_{j+g}, ... with t <= j <= min(t+g-1, N-g) is insertion sorted. The
// run ends with one comparison of positions d and d+1. If the schedule leaves
// the array unsorted, a full insertion pass finishes it and
// schedule_complete is false.
template <class T>
MergeResult<T> merge_chains_shellsort(const std::vector<std::vector<T>>& chains) {
  MergeResult<T> r;
  std::size_t d = 0;
  for (auto& c : chains) {
    if (!std::is_sorted(c.begin(), c.end())) throw ParameterError("shellsort merge: every chain must be ascending");
    if (c.empty()) continue;
    r.merged.insert(r.merged.end(), c.begin(), c.end());
    d = std::max(d, c.size());
  }
  const std::size_t N = r.merged.size();
  auto less = [&](const T& x, const T& y) {
    ++r.comparisons;
    return x < y;
  };
  auto& a = r.merged;
  for (std::size_t t = 1; d >= t + 1; ++t) {
    const std::size_t g = d - t + 1;
    if (N < g) continue;
    const std::size_t last = std::min(t + g - 1, N - g);
    for (std::size_t j = t; j <= last; ++j) detail::gap_insertion(a, j - 1, g, less);
  }
  if (d >= 1 && d < N && less(a[d], a[d - 1])) std::swap(a[d - 1], a[d]);
  if (!std::is_sorted(a.begin(), a.end())) {
    r.schedule_complete = false;
    detail::gap_insertion(a, 0, 1, less);
  }
  return r;
}

// Pairwise two-pointer merges, always merging the two shortest chains.
template <class T>
MergeResult<T> merge_chains_binary(const std::vector<std::vector<T>>& chains) {
  MergeResult<T> r;
  std::vector<std::vector<T>> pool;
  for (auto& c : chains) {
    if (!std::is_sorted(c.begin(), c.end())) throw ParameterError("binary merge: every chain must be ascending");
    if (!c.empty()) pool.push_back(c);
  }
  while (pool.size() > 1) {
    std::stable_sort(pool.begin(), pool.end(), [](auto& x, auto& y) { return x.size() < y.size(); });
    auto A = std::move(pool[0]), B = std::move(pool[1]);
    pool.erase(pool.begin(), pool.begin() + 2);
    std::vector<T> out;
    out.reserve(A.size() + B.size());
    std::size_t i = 0, j = 0;
    while (i < A.size() && j < B.size()) {
      ++r.comparisons;
      if (B[j] < A[i]) out.push_back(B[j++]);
      else out.push_back(A[i++]);
    }
    out.insert(out.end(), A.begin() + static_cast<long>(i), A.end());
    out.insert(out.end(), B.begin() + static_cast<long>(j), B.end());
    pool.push_back(std::move(out));
  }
  if (!pool.empty()) r.merged = std::move(pool[0]);
  return r;
}

// "5,7,9;4,6" -> {{5,7,9},{4,6}}
inline std::vector<std::vector<long>> parse_chains(const std::string& s) {
  std::vector<std::vector<long>> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ';')) {
    std::vector<long> c;
    std::stringstream ps(part);
    std::string item;
    while (std::getline(ps, item, ',')) {
      if (item.find_first_not_of(" \t") == std::string::npos) continue;
      try {
        std::size_t pos = 0;
        long v = std::stol(item, &pos);
        if (item.find_first_not_of(" \t", pos) != std::string::npos) throw std::invalid_argument(item);
        c.push_back(v);
      } catch (const std::exception&) {
        throw ParameterError("chain list: '" + item + "' is not an integer");
      }
    }
    out.push_back(std::move(c));
  }
  return out;
}

// ---- completing a hidden order ----

// Element wrapper ordered by its hidden rank.
struct Ranked {
  std::size_t id;
  std::size_t rank;
  bool operator<(const Ranked& o) const { return rank < o.rank; }
  bool operator==(const Ranked& o) const { return id == o.id; }
};

struct SortUnderOrderResult {
  std::vector<std::size_t> order;
  std::uint64_t comparisons_used = 0;
  std::optional<long> info_bound;
  std::optional<long> fk_upper;
  double ratio_vs_plain = 0;
  std::string strategy;
  std::size_t chains = 0;
};

inline std::vector<std::size_t> ranks_of(const Poset& P, const std::vector<std::size_t>& hidden) {
  if (!is_linear_extension(P, hidden)) throw ConsistencyError("hidden order is not a linear extension of the poset");
  std::vector<std::size_t> rank(P.size());
  for (std::size_t i = 0; i < hidden.size(); ++i) rank[hidden[i]] = i;
  return rank;
}

// Longest chain among the remaining elements, repeatedly.
inline std::vector<std::vector<std::size_t>> greedy_chain_decomposition(const Poset& P) {
  const std::size_t n = P.size();
  auto lev = level_index(P);
  std::vector<std::size_t> topo(n);
  std::iota(topo.begin(), topo.end(), 0);
  std::stable_sort(topo.begin(), topo.end(), [&](auto a, auto b) { return lev[a] < lev[b]; });
  Bits remaining(n);
  remaining.set();
  std::vector<std::vector<std::size_t>> chains;
  std::vector<std::size_t> best(n), prev(n);
  while (remaining.any()) {
    std::size_t top = npos;
    for (std::size_t x : topo) {
      if (!remaining.test(x)) continue;
      best[x] = 1;
      prev[x] = npos;
      Bits below = P.down(x) & remaining;
      for (auto y = below.find_first(); y != Bits::npos; y = below.find_next(y))
        if (best[y] + 1 > best[x]) {
          best[x] = best[y] + 1;
          prev[x] = y;
        }
      if (top == npos || best[x] > best[top]) top = x;
    }
    std::vector<std::size_t> c;
    for (std::size_t x = top; x != npos; x = prev[x]) c.push_back(x);
    std::reverse(c.begin(), c.end());
    for (auto x : c) remaining.reset(x);
    chains.push_back(std::move(c));
  }
  return chains;
}

inline constexpr std::size_t dilworth_exact_max_n = 12;
inline constexpr std::size_t chain_strategy_max_n = 4000;

inline std::vector<std::vector<std::size_t>> chain_decomposition(const Poset& P) {
  if (P.size() <= dilworth_exact_max_n) {
    auto chains = min_chain_cover(P, hopcroft_karp(P));
    std::sort(chains.begin(), chains.end(), [](auto& a, auto& b) { return a.size() > b.size(); });
    return chains;
  }
  return greedy_chain_decomposition(P);
}

inline void fill_bounds(const Poset& P, SortUnderOrderResult& r) {
  const std::size_t n = P.size();
  if (n <= max_extension_count_n) {
    BigInt e = count_linear_extensions(P);
    r.info_bound = forms::info_bound(e);
    r.fk_upper = static_cast<long>(std::ceil(forms::fk_upper(e, static_cast<long>(n)) - 1e-9));
  }
  double plain = to_double(forms::qs_mean(static_cast<long>(n)));
  r.ratio_vs_plain = plain > 0 ? static_cast<double>(r.comparisons_used) / plain : 0;
}

inline void verify_against_hidden(const SortUnderOrderResult& r, const std::vector<std::size_t>& hidden) {
  if (r.order != hidden) throw ConsistencyError("completion did not reproduce the hidden order");
}

// Blocks B_1 < B_2 < ... with every element of a block below every element of
// later blocks. Posts come out as singleton blocks.
inline std::vector<std::vector<std::size_t>> linear_sum_blocks(const Poset& P) {
  const std::size_t n = P.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return P.down(a).count() < P.down(b).count(); });
  std::vector<std::vector<std::size_t>> blocks;
  std::vector<std::size_t> cur;
  Bits above(n), outside(n);
  above.set();
  outside.set();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t x = idx[i];
    cur.push_back(x);
    above &= P.up(x);
    outside.reset(x);
    if (outside.is_subset_of(above)) {
      blocks.push_back(std::move(cur));
      cur.clear();
      above.set();
    }
  }
  return blocks;
}

inline std::vector<Ranked> merge_block(const Poset& P, const std::vector<std::size_t>& block,
                                       const std::vector<std::size_t>& rank, const std::string& merge,
                                       SortUnderOrderResult& r) {
  Poset B = P.induced(block);
  auto chains = chain_decomposition(B);
  std::vector<std::vector<Ranked>> rc;
  for (auto& c : chains) {
    std::vector<Ranked> v;
    for (auto x : c) v.push_back({block[x], rank[block[x]]});
    rc.push_back(std::move(v));
  }
  r.chains += chains.size();
  MergeResult<Ranked> m;
  if (merge == "shellsort") m = merge_chains_shellsort(rc);
  else m = merge_chains_binary(rc);
  r.comparisons_used += m.comparisons;
  return m.merged;
}

// Split into linear-sum blocks, cover each block by chains and merge them.
inline SortUnderOrderResult sort_by_chains(const Poset& P, const std::vector<std::size_t>& hidden,
                                           const std::string& merge) {
  if (merge != "shellsort" && merge != "binary") throw ParameterError("merge strategy must be shellsort or binary");
  if (P.size() > chain_strategy_max_n) throw CapacityError("chain completion supports n <= 4000");
  auto rank = ranks_of(P, hidden);
  SortUnderOrderResult r;
  r.strategy = merge;
  for (auto& block : linear_sum_blocks(P))
    for (auto& x : merge_block(P, block, rank, merge, r)) r.order.push_back(x.id);
  verify_against_hidden(r, hidden);
  fill_bounds(P, r);
  return r;
}

inline bool levels_stratified(const Poset& P, const std::vector<std::vector<std::size_t>>& levels) {
  for (std::size_t i = 0; i + 1 < levels.size(); ++i)
    for (auto x : levels[i])
      for (auto y : levels[i + 1])
        if (!P.less(x, y)) return false;
  return true;
}

// Each level sorted on its own by the single-pivot engine. Levels that are
// not fully stacked fall back to chain merging.
inline SortUnderOrderResult sort_levels(const Poset& P, const std::vector<std::size_t>& hidden, std::uint64_t seed) {
  auto rank = ranks_of(P, hidden);
  auto lev = level_index(P);
  std::size_t h = 0;
  for (auto l : lev) h = std::max(h, l);
  std::vector<std::vector<std::size_t>> levels(h);
  for (std::size_t x = 0; x < P.size(); ++x) levels[lev[x] - 1].push_back(x);
  if (!levels_stratified(P, levels)) {
    auto r = sort_by_chains(P, hidden, "binary");
    r.strategy = "levels-fallback-binary";
    return r;
  }
  SortUnderOrderResult r;
  r.strategy = "levels";
  Rng master(seed);
  for (std::size_t i = 0; i < levels.size(); ++i) {
    std::vector<Ranked> v;
    for (auto x : levels[i]) v.push_back({x, rank[x]});
    RandomChooser ch(master.split(i));
    r.comparisons_used += quicksort_single_inplace(v, ch).comparisons;
    for (auto& x : v) r.order.push_back(x.id);
  }
  verify_against_hidden(r, hidden);
  fill_bounds(P, r);
  return r;
}

inline SortUnderOrderResult sort_under_poset(const Poset& P, const std::vector<std::size_t>& hidden,
                                             const std::string& strategy, std::uint64_t seed) {
  if (strategy == "levels") return sort_levels(P, hidden, seed);
  if (strategy == "shellsort" || strategy == "binary") return sort_by_chains(P, hidden, strategy);
  if (strategy == "best") {
    auto a = sort_by_chains(P, hidden, "binary");
    auto b = sort_by_chains(P, hidden, "shellsort");
    auto c = sort_levels(P, hidden, seed);
    SortUnderOrderResult* best = &a;
    if (b.comparisons_used < best->comparisons_used) best = &b;
    if (c.comparisons_used < best->comparisons_used) best = &c;
    return *best;
  }
  throw ParameterError("strategy must be levels, shellsort, binary or best");
}

// ---- speedup experiments ----

struct PosetModel {
  std::string name = "levels";
  long d = 0, k = 0;
  double p = 0.5;

  std::string params() const {
    if (name == "levels") return "d=" + std::to_string(d) + ";k=" + std::to_string(k);
    if (name == "kdim") return "k=" + std::to_string(k);
    if (name == "bipartite" || name == "graph") return "p=" + format_float(p);
    return "";
  }
};

inline Poset generate_model(const PosetModel& m, long n, Rng& rng) {
  require(n >= 0, "n must be >= 0");
  const auto N = static_cast<std::size_t>(n);
  if (m.name == "levels") {
    require(m.d >= 1 && m.k >= 1 && m.d * m.k == n, "levels model needs d*k = n");
    return gen_levels(static_cast<std::size_t>(m.d), static_cast<std::size_t>(m.k));
  }
  if (m.name == "kdim") return gen_kdim_order(N, static_cast<std::size_t>(m.k), rng);
  if (m.name == "bipartite") {
    require(n % 2 == 0, "bipartite model needs an even n (two sides of n/2)");
    return gen_bipartite_order(N / 2, m.p, rng);
  }
  if (m.name == "interval") return gen_interval_order(N, rng).poset();
  if (m.name == "graph") return gen_random_graph_order(N, m.p, rng);
  if (m.name == "uniform")
    return gen_uniform_poset(N, rng, n <= 5 ? UniformMode::exact : UniformMode::approximate);
  if (m.name == "chain") return chain_poset(N);
  if (m.name == "antichain") return antichain_poset(N);
  throw ParameterError("unknown poset model: " + m.name);
}

// Model estimate of log2 e(P) when exact counting is out of reach.
inline std::optional<double> model_log2e_estimate(const PosetModel& m, long n) {
  if (m.name == "levels") return static_cast<double>(m.d) * forms::log2_factorial(static_cast<double>(m.k));
  if (m.name == "kdim") return (1 - 1.0 / static_cast<double>(m.k)) * forms::log2_factorial(static_cast<double>(n));
  if (m.name == "bipartite")
    return 2 * forms::log2_factorial(static_cast<double>(n) / 2) - std::log2(eta_function(m.p));
  if (m.name == "interval") return forms::interval_ch7_lb(n);
  if (m.name == "uniform") return forms::uniform_poset_log2e(n);
  if (m.name == "chain") return 0.0;
  if (m.name == "antichain") return forms::log2_factorial(static_cast<double>(n));
  return std::nullopt;
}

// e(P) when the model fixes it whatever the draw.
inline std::optional<BigInt> model_exact_extensions(const PosetModel& m, long n) {
  if (m.name == "levels") {
    BigInt e = 1, f = factorial(m.k);
    for (long i = 0; i < m.d; ++i) e *= f;
    return e;
  }
  if (m.name == "chain") return BigInt(1);
  if (m.name == "antichain") return factorial(n);
  return std::nullopt;
}

struct PosetTrialRow {
  std::uint64_t trial = 0;
  std::uint64_t comparisons_used = 0;
  std::optional<long> info_bound, fk_upper;
  double ratio = 0;
  bool estimate_only = false;
};

struct SpeedupReport {
  PosetModel model;
  long n = 0;
  std::uint64_t trials = 0, seed = 0;
  std::string strategy;
  std::vector<PosetTrialRow> rows;
  SampleStats ratio;
  double info_ratio = 0;  // log2 e(P) (exact mean or estimate) / plain quicksort mean
  bool estimate_only = false;
};

inline SpeedupReport speedup_experiment(const PosetModel& m, long n, std::uint64_t trials, std::uint64_t seed,
                                        unsigned jobs, const std::string& strategy = "levels") {
  require(trials >= 1, "trials must be >= 1");
  SpeedupReport rep{m, n, trials, seed, strategy, {}, {}, 0, false};
  const double plain = to_double(forms::qs_mean(n));
  struct Out {
    PosetTrialRow row;
    double log2e = 0;
  };
  auto outs = run_trials<Out>(trials, seed, jobs, [&](Rng& rng, std::uint64_t i) {
    Out o;
    o.row.trial = i;
    Poset P = generate_model(m, n, rng);
    auto hidden = hidden_order(P, rng);
    try {
      auto r = sort_under_poset(P, hidden, strategy, rng.engine()());
      o.row.comparisons_used = r.comparisons_used;
      o.row.info_bound = r.info_bound;
      o.row.fk_upper = r.fk_upper;
      o.row.ratio = r.ratio_vs_plain;
    } catch (const CapacityError&) {
      o.row.estimate_only = true;
    }
    if (!o.row.info_bound) {
      if (auto e = model_exact_extensions(m, n)) {
        o.row.info_bound = forms::info_bound(*e);
        o.row.fk_upper = static_cast<long>(std::ceil(forms::fk_upper(*e, n) - 1e-9));
      }
    }
    if (P.size() <= max_extension_count_n) o.log2e = log2_big(count_linear_extensions(P));
    else o.log2e = model_log2e_estimate(m, n).value_or(NAN);
    return o;
  });
  std::vector<double> ratios;
  double sum_log2e = 0;
  for (auto& o : outs) {
    rep.rows.push_back(o.row);
    if (o.row.estimate_only) rep.estimate_only = true;
    else ratios.push_back(o.row.ratio);
    sum_log2e += o.log2e;
  }
  rep.ratio = sample_stats(ratios);
  rep.info_ratio = plain > 0 ? sum_log2e / static_cast<double>(trials) / plain : 0;
  return rep;
}

}  // namespace qslab
