#pragma once

#include <algorithm>
#include <boost/dynamic_bitset.hpp>
#include <cstdint>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <ostream>
#include <queue>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"
#include "rng.hpp"

namespace qslab {

using Bits = boost::dynamic_bitset<std::uint64_t>;

// Strict partial order on 0..n-1, stored transitively closed.
class Poset {
 public:
  Poset() = default;
  explicit Poset(std::size_t n) : n_(n), up_(n, Bits(n)), down_(n, Bits(n)) {}

  // Asserted pairs (a, b) mean a < b. Throws on a cycle, naming it.
  static Poset from_relations(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& rel) {
    std::vector<std::vector<std::size_t>> adj(n);
    for (auto [a, b] : rel) {
      require(a < n && b < n, "relation refers to an element outside 0..n-1");
      if (a == b) throw ParameterError("partial order violation: cycle " + std::to_string(a + 1) + " < " +
                                       std::to_string(a + 1));
      adj[a].push_back(b);
    }
    auto order = topological_order(adj);
    Poset p(n);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      std::size_t a = *it;
      for (std::size_t b : adj[a]) {
        p.up_[a].set(b);
        p.up_[a] |= p.up_[b];
      }
    }
    p.rebuild_down();
    return p;
  }

  // Builds from an already closed relation given as up-sets.
  static Poset from_closed_rows(std::vector<Bits> up) {
    Poset p(up.size());
    p.up_ = std::move(up);
    p.rebuild_down();
    return p;
  }

  std::size_t size() const { return n_; }
  bool less(std::size_t a, std::size_t b) const { return up_[a].test(b); }
  bool comparable(std::size_t a, std::size_t b) const { return a == b || less(a, b) || less(b, a); }
  const Bits& up(std::size_t a) const { return up_[a]; }
  const Bits& down(std::size_t a) const { return down_[a]; }

  std::size_t relation_count() const {
    std::size_t c = 0;
    for (auto& r : up_) c += r.count();
    return c;
  }

  std::vector<std::pair<std::size_t, std::size_t>> relations() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t a = 0; a < n_; ++a)
      for (auto b = up_[a].find_first(); b != Bits::npos; b = up_[a].find_next(b)) out.emplace_back(a, b);
    return out;
  }

  // Covering pairs a < b with nothing in between.
  std::vector<std::pair<std::size_t, std::size_t>> covers() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t a = 0; a < n_; ++a)
      for (auto b = up_[a].find_first(); b != Bits::npos; b = up_[a].find_next(b))
        if (!(up_[a] & down_[b]).any()) out.emplace_back(a, b);
    return out;
  }

  bool is_closed() const {
    for (std::size_t a = 0; a < n_; ++a) {
      if (up_[a].test(a)) return false;
      for (auto b = up_[a].find_first(); b != Bits::npos; b = up_[a].find_next(b)) {
        if (up_[b].test(a)) return false;
        if (!up_[b].is_subset_of(up_[a])) return false;
      }
    }
    return true;
  }

  // Restriction to the listed elements, relabelled 0..m-1 in list order.
  Poset induced(const std::vector<std::size_t>& elems) const {
    std::vector<Bits> up(elems.size(), Bits(elems.size()));
    for (std::size_t i = 0; i < elems.size(); ++i)
      for (std::size_t j = 0; j < elems.size(); ++j)
        if (less(elems[i], elems[j])) up[i].set(j);
    return from_closed_rows(std::move(up));
  }

  friend bool operator==(const Poset& a, const Poset& b) { return a.n_ == b.n_ && a.up_ == b.up_; }

  static std::vector<std::size_t> topological_order(const std::vector<std::vector<std::size_t>>& adj) {
    const std::size_t n = adj.size();
    std::vector<int> state(n, 0);
    std::vector<std::size_t> order, parent(n, n);
    order.reserve(n);
    for (std::size_t s = 0; s < n; ++s) {
      if (state[s]) continue;
      std::vector<std::pair<std::size_t, std::size_t>> st{{s, 0}};
      state[s] = 1;
      while (!st.empty()) {
        auto& [v, i] = st.back();
        if (i < adj[v].size()) {
          std::size_t w = adj[v][i++];
          if (state[w] == 1) {
            std::string cyc = std::to_string(w + 1);
            for (std::size_t x = v; x != w; x = parent[x]) cyc = std::to_string(x + 1) + " < " + cyc;
            cyc = std::to_string(w + 1) + " < " + cyc;
            throw ParameterError("partial order violation: cycle " + cyc);
          }
          if (state[w] == 0) {
            state[w] = 1;
            parent[w] = v;
            st.emplace_back(w, 0);
          }
        } else {
          state[v] = 2;
          order.push_back(v);
          st.pop_back();
        }
      }
    }
    std::reverse(order.begin(), order.end());
    return order;
  }

 private:
  void rebuild_down() {
    down_.assign(n_, Bits(n_));
    for (std::size_t a = 0; a < n_; ++a)
      for (auto b = up_[a].find_first(); b != Bits::npos; b = up_[a].find_next(b)) down_[b].set(a);
  }

  std::size_t n_ = 0;
  std::vector<Bits> up_, down_;
};

inline Poset chain_poset(std::size_t n) {
  std::vector<Bits> up(n, Bits(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) up[i].set(j);
  return Poset::from_closed_rows(std::move(up));
}

inline Poset antichain_poset(std::size_t n) { return Poset(n); }

// Linear sum: every element of a below every element of b.
inline Poset linear_sum(const Poset& a, const Poset& b) {
  const std::size_t n = a.size() + b.size();
  std::vector<Bits> up(n, Bits(n));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a.size(); ++j)
      if (a.less(i, j)) up[i].set(j);
    for (std::size_t j = 0; j < b.size(); ++j) up[i].set(a.size() + j);
  }
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      if (b.less(i, j)) up[a.size() + i].set(a.size() + j);
  return Poset::from_closed_rows(std::move(up));
}

// ---- generators ----

inline Poset gen_random_graph_order(std::size_t n, double p, Rng& rng) {
  require(p >= 0 && p <= 1, "graph order: p must lie in [0, 1]");
  std::vector<Bits> up(n, Bits(n));
  std::vector<std::vector<std::size_t>> edges(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (rng.bernoulli(p)) edges[i].push_back(j);
  for (std::size_t i = n; i-- > 0;)
    for (std::size_t j : edges[i])
      if (!up[i].test(j)) {
        up[i].set(j);
        up[i] |= up[j];
      }
  return Poset::from_closed_rows(std::move(up));
}

// Height of a random graph order without storing the relation.
inline std::size_t graph_order_height(std::size_t n, double p, Rng& rng) {
  require(p >= 0 && p <= 1, "graph order: p must lie in [0, 1]");
  std::vector<std::size_t> h(n, 1);
  std::size_t best = n ? 1 : 0;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < j; ++i)
      if (rng.bernoulli(p)) h[j] = std::max(h[j], h[i] + 1);
    best = std::max(best, h[j]);
  }
  return best;
}

inline std::vector<std::size_t> random_order(std::size_t n, Rng& rng) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), 0);
  for (std::size_t i = n; i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
  return v;
}

inline Poset gen_kdim_order(std::size_t n, std::size_t k, Rng& rng) {
  require(k >= 1, "k-dimensional order: k must be >= 1");
  std::vector<std::vector<std::size_t>> pos(k, std::vector<std::size_t>(n));
  for (std::size_t d = 0; d < k; ++d) {
    auto ord = random_order(n, rng);
    for (std::size_t r = 0; r < n; ++r) pos[d][ord[r]] = r;
  }
  std::vector<Bits> up(n, Bits(n));
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) {
      if (x == y) continue;
      bool all = true;
      for (std::size_t d = 0; d < k && all; ++d) all = pos[d][x] < pos[d][y];
      if (all) up[x].set(y);
    }
  return Poset::from_closed_rows(std::move(up));
}

// X = 0..n-1, Y = n..2n-1; x < y independently with probability p.
inline Poset gen_bipartite_order(std::size_t n, double p, Rng& rng) {
  require(p >= 0 && p <= 1, "bipartite order: p must lie in [0, 1]");
  std::vector<Bits> up(2 * n, Bits(2 * n));
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      if (rng.bernoulli(p)) up[x].set(n + y);
  return Poset::from_closed_rows(std::move(up));
}

struct IntervalOrder {
  std::vector<std::pair<double, double>> intervals;

  std::size_t size() const { return intervals.size(); }
  bool less(std::size_t i, std::size_t j) const { return intervals[i].second < intervals[j].first; }

  Poset poset() const {
    const std::size_t n = size();
    std::vector<Bits> up(n, Bits(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j && less(i, j)) up[i].set(j);
    return Poset::from_closed_rows(std::move(up));
  }

  // Largest antichain: the most intervals sharing a point.
  std::size_t width() const {
    std::vector<std::pair<double, int>> ev;
    for (auto& [a, b] : intervals) {
      ev.emplace_back(a, 0);
      ev.emplace_back(b, 1);
    }
    std::sort(ev.begin(), ev.end());
    std::size_t cur = 0, best = 0;
    for (auto& [x, kind] : ev) {
      if (kind == 0) best = std::max(best, ++cur);
      else --cur;
    }
    return best;
  }

  // Longest chain: greedy by right endpoint.
  std::size_t height() const {
    std::vector<std::size_t> idx(size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return intervals[a].second < intervals[b].second; });
    std::size_t count = 0;
    double last = -std::numeric_limits<double>::infinity();
    for (auto i : idx)
      if (intervals[i].first > last) {
        ++count;
        last = intervals[i].second;
      }
    return count;
  }
};

inline IntervalOrder gen_interval_order(std::size_t n, Rng& rng) {
  IntervalOrder io;
  io.intervals.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double a = rng.uniform01(), b = rng.uniform01();
    io.intervals.emplace_back(std::min(a, b), std::max(a, b));
  }
  return io;
}

// d levels of k elements; every element of a level is below every element of
// the next one. Element ids are level-major.
inline Poset gen_levels(std::size_t d, std::size_t k) {
  const std::size_t n = d * k;
  std::vector<Bits> up(n, Bits(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = (i / k + 1) * k; j < n; ++j) up[i].set(j);
  return Poset::from_closed_rows(std::move(up));
}

// All labelled posets on n <= 5 elements, as closed up-set rows.
inline const std::vector<Poset>& all_labelled_posets(std::size_t n) {
  if (n > 5) throw CapacityError("labelled poset enumeration supports n <= 5");
  static std::map<std::size_t, std::vector<Poset>> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (a != b) pairs.emplace_back(a, b);
  std::vector<Poset> out;
  const std::uint64_t total = std::uint64_t{1} << pairs.size();
  std::vector<std::uint32_t> row(n);
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    std::fill(row.begin(), row.end(), 0);
    for (std::size_t i = 0; i < pairs.size(); ++i)
      if (mask >> i & 1) row[pairs[i].first] |= 1u << pairs[i].second;
    bool ok = true;
    for (std::size_t a = 0; a < n && ok; ++a)
      for (std::size_t b = 0; b < n && ok; ++b)
        if (row[a] >> b & 1) {
          if (row[b] >> a & 1) ok = false;
          else if ((row[b] & ~row[a]) != 0) ok = false;
        }
    if (!ok) continue;
    std::vector<Bits> up(n, Bits(n));
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        if (row[a] >> b & 1) up[a].set(b);
    out.push_back(Poset::from_closed_rows(std::move(up)));
  }
  return cache.emplace(n, std::move(out)).first->second;
}

enum class UniformMode { exact, approximate };

// Exact mode samples uniformly among all labelled posets (n <= 5).
// Approximate mode draws three levels of sizes about n/4, n/2, n/4: each middle
// element sits above a random half of the bottom and below a random half of
// the top, with at least one of each; bottom is entirely below top.
inline Poset gen_uniform_poset(std::size_t n, Rng& rng, UniformMode mode = UniformMode::exact) {
  if (mode == UniformMode::exact) {
    if (n > 5) throw CapacityError("exact uniform posets support n <= 5; use the approximate mode");
    const auto& all = all_labelled_posets(n);
    return all[rng.below(all.size())];
  }
  if (n < 3) return gen_uniform_poset(n, rng, UniformMode::exact);
  std::size_t bottom = std::max<std::size_t>(1, (n + 2) / 4), top = std::max<std::size_t>(1, (n + 2) / 4);
  const std::size_t mid = n - bottom - top;
  auto label = random_order(n, rng);
  std::vector<std::pair<std::size_t, std::size_t>> rel;
  auto B = [&](std::size_t i) { return label[i]; };
  auto M = [&](std::size_t i) { return label[bottom + i]; };
  auto T = [&](std::size_t i) { return label[bottom + mid + i]; };
  for (std::size_t i = 0; i < bottom; ++i)
    for (std::size_t j = 0; j < top; ++j) rel.emplace_back(B(i), T(j));
  for (std::size_t m = 0; m < mid; ++m) {
    bool lo = false, hi = false;
    for (std::size_t i = 0; i < bottom; ++i)
      if (rng.bernoulli(0.5)) rel.emplace_back(B(i), M(m)), lo = true;
    for (std::size_t j = 0; j < top; ++j)
      if (rng.bernoulli(0.5)) rel.emplace_back(M(m), T(j)), hi = true;
    if (!lo) rel.emplace_back(B(rng.below(bottom)), M(m));
    if (!hi) rel.emplace_back(M(m), T(rng.below(top)));
  }
  return Poset::from_relations(n, rel);
}

// ---- counting ----

inline constexpr std::size_t max_extension_count_n = 20;

// Downset dynamic programming; exact since 20! < 2^64.
inline BigInt count_linear_extensions(const Poset& P) {
  const std::size_t n = P.size();
  if (n > max_extension_count_n) throw CapacityError("linear extension counting supports n <= 20");
  if (n == 0) return 1;
  std::vector<std::uint32_t> pred(n, 0);
  for (std::size_t x = 0; x < n; ++x)
    for (auto y = P.down(x).find_first(); y != Bits::npos; y = P.down(x).find_next(y)) pred[x] |= 1u << y;
  const std::uint32_t full = (n == 32) ? ~0u : ((1u << n) - 1);
  std::vector<std::uint64_t> dp(std::size_t{1} << n, 0);
  dp[0] = 1;
  for (std::uint32_t m = 0; m < full; ++m) {
    if (!dp[m]) continue;
    for (std::size_t x = 0; x < n; ++x)
      if (!(m >> x & 1) && (pred[x] & ~m) == 0) dp[m | (1u << x)] += dp[m];
  }
  BigInt r;
  mpz_import(r.get_mpz_t(), 1, -1, sizeof(std::uint64_t), 0, 0, &dp[full]);
  return r;
}

inline bool is_linear_extension(const Poset& P, const std::vector<std::size_t>& order) {
  const std::size_t n = P.size();
  if (order.size() != n) return false;
  std::vector<std::size_t> pos(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (order[i] >= n || pos[order[i]] != n) return false;
    pos[order[i]] = i;
  }
  for (auto [a, b] : P.relations())
    if (pos[a] > pos[b]) return false;
  return true;
}

inline BigInt count_linear_extensions_brute(const Poset& P) {
  if (P.size() > 10) throw CapacityError("brute-force extension counting supports n <= 10");
  std::vector<std::size_t> perm(P.size());
  std::iota(perm.begin(), perm.end(), 0);
  unsigned long c = 0;
  do c += is_linear_extension(P, perm);
  while (std::next_permutation(perm.begin(), perm.end()));
  return c;
}

// Uniform random linear extension by downset counting (n <= 20).
inline std::vector<std::size_t> random_linear_extension(const Poset& P, Rng& rng) {
  const std::size_t n = P.size();
  if (n > max_extension_count_n) throw CapacityError("uniform extension sampling supports n <= 20");
  std::vector<std::uint32_t> pred(n, 0);
  for (std::size_t x = 0; x < n; ++x)
    for (auto y = P.down(x).find_first(); y != Bits::npos; y = P.down(x).find_next(y)) pred[x] |= 1u << y;
  const std::uint32_t full = n ? ((1u << n) - 1) : 0;
  // ways[m] = extensions of the complement of downset m.
  std::vector<std::uint64_t> ways(std::size_t{1} << n, 0);
  ways[full] = 1;
  for (std::uint32_t m = full; m-- > 0;) {
    std::uint64_t w = 0;
    for (std::size_t x = 0; x < n; ++x)
      if (!(m >> x & 1) && (pred[x] & ~m) == 0) w += ways[m | (1u << x)];
    ways[m] = w;
  }
  std::vector<std::size_t> order;
  std::uint32_t m = 0;
  while (order.size() < n) {
    std::uint64_t r = 0;
    {
      const std::uint64_t bound = ways[m];
      const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
      std::uint64_t x;
      do x = rng.engine()();
      while (x >= limit);
      r = x % bound;
    }
    for (std::size_t x = 0; x < n; ++x)
      if (!(m >> x & 1) && (pred[x] & ~m) == 0) {
        std::uint64_t w = ways[m | (1u << x)];
        if (r < w) {
          order.push_back(x);
          m |= 1u << x;
          break;
        }
        r -= w;
      }
  }
  return order;
}

// Random linear extension for any n: repeatedly take a uniformly chosen
// minimal element. Not uniform over extensions.
inline std::vector<std::size_t> random_topological_order(const Poset& P, Rng& rng) {
  const std::size_t n = P.size();
  std::vector<std::size_t> indeg(n), avail, order;
  for (std::size_t x = 0; x < n; ++x) {
    indeg[x] = P.down(x).count();
    if (indeg[x] == 0) avail.push_back(x);
  }
  while (!avail.empty()) {
    std::size_t i = rng.below(avail.size());
    std::size_t x = avail[i];
    avail[i] = avail.back();
    avail.pop_back();
    order.push_back(x);
    for (auto y = P.up(x).find_first(); y != Bits::npos; y = P.up(x).find_next(y))
      if (--indeg[y] == 0) avail.push_back(y);
  }
  return order;
}

inline std::vector<std::size_t> hidden_order(const Poset& P, Rng& rng) {
  return P.size() <= max_extension_count_n ? random_linear_extension(P, rng) : random_topological_order(P, rng);
}

// ---- structure ----

// Maximum matching on the comparability digraph (left a -> right b for a < b).
struct ChainMatching {
  std::vector<std::size_t> match_right;  // for left a: matched b or npos
  std::vector<std::size_t> match_left;   // for right b: matched a or npos
  std::size_t size = 0;
};

inline constexpr std::size_t npos = static_cast<std::size_t>(-1);

inline ChainMatching hopcroft_karp(const Poset& P) {
  const std::size_t n = P.size();
  ChainMatching M{std::vector<std::size_t>(n, npos), std::vector<std::size_t>(n, npos), 0};
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t a = 0; a < n; ++a)
    for (auto b = P.up(a).find_first(); b != Bits::npos; b = P.up(a).find_next(b)) adj[a].push_back(b);
  std::vector<std::size_t> dist(n);
  const std::size_t INF = npos;
  auto bfs = [&] {
    std::queue<std::size_t> q;
    bool found = false;
    for (std::size_t a = 0; a < n; ++a) {
      if (M.match_right[a] == npos) {
        dist[a] = 0;
        q.push(a);
      } else {
        dist[a] = INF;
      }
    }
    while (!q.empty()) {
      std::size_t a = q.front();
      q.pop();
      for (std::size_t b : adj[a]) {
        std::size_t a2 = M.match_left[b];
        if (a2 == npos) found = true;
        else if (dist[a2] == INF) {
          dist[a2] = dist[a] + 1;
          q.push(a2);
        }
      }
    }
    return found;
  };
  std::vector<std::size_t> it(n);
  std::function<bool(std::size_t)> dfs = [&](std::size_t a) -> bool {
    for (; it[a] < adj[a].size(); ++it[a]) {
      std::size_t b = adj[a][it[a]];
      std::size_t a2 = M.match_left[b];
      if (a2 == npos || (dist[a2] == dist[a] + 1 && dfs(a2))) {
        M.match_right[a] = b;
        M.match_left[b] = a;
        ++it[a];
        return true;
      }
    }
    dist[a] = INF;
    return false;
  };
  while (bfs()) {
    std::fill(it.begin(), it.end(), 0);
    for (std::size_t a = 0; a < n; ++a)
      if (M.match_right[a] == npos && dfs(a)) ++M.size;
  }
  return M;
}

// Minimum chain cover from a maximum matching.
inline std::vector<std::vector<std::size_t>> min_chain_cover(const Poset& P, const ChainMatching& M) {
  std::vector<std::vector<std::size_t>> chains;
  for (std::size_t s = 0; s < P.size(); ++s) {
    if (M.match_left[s] != npos) continue;
    std::vector<std::size_t> c;
    for (std::size_t x = s; x != npos; x = M.match_right[x]) c.push_back(x);
    chains.push_back(std::move(c));
  }
  return chains;
}

// Maximum antichain via the Konig cover of the matching graph.
inline std::vector<std::size_t> max_antichain(const Poset& P, const ChainMatching& M) {
  const std::size_t n = P.size();
  std::vector<char> zl(n, 0), zr(n, 0);
  std::queue<std::size_t> q;
  for (std::size_t a = 0; a < n; ++a)
    if (M.match_right[a] == npos) {
      zl[a] = 1;
      q.push(a);
    }
  while (!q.empty()) {
    std::size_t a = q.front();
    q.pop();
    for (auto b = P.up(a).find_first(); b != Bits::npos; b = P.up(a).find_next(b)) {
      if (zr[b] || M.match_right[a] == b) continue;
      zr[b] = 1;
      std::size_t a2 = M.match_left[b];
      if (a2 != npos && !zl[a2]) {
        zl[a2] = 1;
        q.push(a2);
      }
    }
  }
  std::vector<std::size_t> anti;
  for (std::size_t x = 0; x < n; ++x)
    if (zl[x] && !zr[x]) anti.push_back(x);
  return anti;
}

inline bool is_antichain(const Poset& P, const std::vector<std::size_t>& s) {
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j)
      if (P.comparable(s[i], s[j])) return false;
  return true;
}

inline bool is_chain(const Poset& P, const std::vector<std::size_t>& s) {
  for (std::size_t i = 0; i + 1 < s.size(); ++i)
    if (!P.less(s[i], s[i + 1])) return false;
  return true;
}

// Level of x = length of the longest chain ending at x (1-based).
inline std::vector<std::size_t> level_index(const Poset& P) {
  const std::size_t n = P.size();
  std::vector<std::size_t> lev(n, 0), indeg(n);
  std::vector<std::size_t> order;
  std::queue<std::size_t> q;
  for (std::size_t x = 0; x < n; ++x) {
    indeg[x] = P.down(x).count();
    if (!indeg[x]) q.push(x);
  }
  while (!q.empty()) {
    std::size_t x = q.front();
    q.pop();
    order.push_back(x);
    for (auto y = P.up(x).find_first(); y != Bits::npos; y = P.up(x).find_next(y))
      if (--indeg[y] == 0) q.push(y);
  }
  for (std::size_t x : order) {
    std::size_t best = 0;
    for (auto y = P.down(x).find_first(); y != Bits::npos; y = P.down(x).find_next(y)) best = std::max(best, lev[y]);
    lev[x] = best + 1;
  }
  return lev;
}

struct PosetMetrics {
  std::size_t width = 0, height = 0;
  std::vector<std::vector<std::size_t>> levels;
  std::vector<std::size_t> posts;
  std::vector<std::vector<std::size_t>> factors;
  std::vector<std::size_t> antichain;
  std::vector<std::vector<std::size_t>> chain_cover;
  std::optional<BigInt> extension_count;
  double log2_extensions = 0;
  bool log2_exact = false;
};

// Elements split at posts: each factor ends with a post, a last factor may
// follow the top post.
inline std::vector<std::vector<std::size_t>> split_at_posts(const Poset& P, const std::vector<std::size_t>& posts) {
  std::vector<std::size_t> ps(posts);
  std::sort(ps.begin(), ps.end(), [&](auto a, auto b) { return P.less(a, b); });
  std::vector<std::vector<std::size_t>> out;
  std::vector<char> used(P.size(), 0);
  for (std::size_t u : ps) {
    std::vector<std::size_t> f;
    for (auto y = P.down(u).find_first(); y != Bits::npos; y = P.down(u).find_next(y))
      if (!used[y]) f.push_back(y);
    f.push_back(u);
    for (auto x : f) used[x] = 1;
    out.push_back(std::move(f));
  }
  std::vector<std::size_t> rest;
  for (std::size_t x = 0; x < P.size(); ++x)
    if (!used[x]) rest.push_back(x);
  if (!rest.empty()) out.push_back(std::move(rest));
  return out;
}

inline PosetMetrics metrics(const Poset& P) {
  PosetMetrics m;
  const std::size_t n = P.size();
  auto lev = level_index(P);
  for (std::size_t x = 0; x < n; ++x) {
    m.height = std::max(m.height, lev[x]);
  }
  m.levels.assign(m.height, {});
  for (std::size_t x = 0; x < n; ++x) m.levels[lev[x] - 1].push_back(x);
  auto M = hopcroft_karp(P);
  m.chain_cover = min_chain_cover(P, M);
  m.antichain = max_antichain(P, M);
  m.width = m.antichain.size();
  if (m.width != m.chain_cover.size() || !is_antichain(P, m.antichain))
    throw ConsistencyError("width: antichain and chain cover disagree");
  for (std::size_t x = 0; x < n; ++x)
    if (P.up(x).count() + P.down(x).count() + 1 == n) m.posts.push_back(x);
  m.factors = split_at_posts(P, m.posts);
  if (n <= max_extension_count_n) {
    m.extension_count = count_linear_extensions(P);
    m.log2_extensions = log2_big(*m.extension_count);
    m.log2_exact = true;
  }
  return m;
}

inline std::size_t max_antichain_brute(const Poset& P) {
  const std::size_t n = P.size();
  if (n > 16) throw CapacityError("brute-force antichain supports n <= 16");
  std::size_t best = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    std::vector<std::size_t> s;
    for (std::size_t x = 0; x < n; ++x)
      if (mask >> x & 1) s.push_back(x);
    if (s.size() > best && is_antichain(P, s)) best = s.size();
  }
  return best;
}

// Minimum over linear extensions of the number of consecutive incomparable
// pairs; dynamic programming over (downset, last element).
inline std::size_t setup_number(const Poset& P) {
  const std::size_t n = P.size();
  if (n > 16) throw CapacityError("setup number supports n <= 16");
  if (n <= 1) return 0;
  std::vector<std::uint32_t> pred(n, 0);
  for (std::size_t x = 0; x < n; ++x)
    for (auto y = P.down(x).find_first(); y != Bits::npos; y = P.down(x).find_next(y)) pred[x] |= 1u << y;
  const std::uint32_t full = (1u << n) - 1;
  const std::uint8_t INF = 255;
  std::vector<std::uint8_t> dp((std::size_t{1} << n) * n, INF);
  for (std::size_t x = 0; x < n; ++x)
    if (!pred[x]) dp[(std::size_t{1} << x) * n + x] = 0;
  for (std::uint32_t m = 1; m < full; ++m)
    for (std::size_t last = 0; last < n; ++last) {
      std::uint8_t v = dp[std::size_t{m} * n + last];
      if (v == INF) continue;
      for (std::size_t x = 0; x < n; ++x)
        if (!(m >> x & 1) && (pred[x] & ~m) == 0) {
          std::uint8_t w = v + (P.less(last, x) ? 0 : 1);
          auto& cell = dp[std::size_t{m | (1u << x)} * n + x];
          cell = std::min(cell, w);
        }
    }
  std::uint8_t best = INF;
  for (std::size_t x = 0; x < n; ++x) best = std::min(best, dp[std::size_t{full} * n + x]);
  return best;
}

// ---- file format ----

inline Poset read_poset(std::istream& in) {
  std::string line;
  auto next_line = [&](std::string& out) {
    while (std::getline(in, out)) {
      auto p = out.find('#');
      if (p != std::string::npos) out.erase(p);
      if (out.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };
  if (!next_line(line)) throw ParameterError("poset file: missing element count");
  long n;
  {
    std::istringstream ss(line);
    std::string extra;
    if (!(ss >> n) || n < 0 || (ss >> extra)) throw ParameterError("poset file: first line must be n");
  }
  std::vector<std::pair<std::size_t, std::size_t>> rel;
  long lineno = 1;
  while (next_line(line)) {
    ++lineno;
    std::istringstream ss(line);
    long i, j;
    std::string extra;
    if (!(ss >> i >> j) || (ss >> extra))
      throw ParameterError("poset file: expected 'i j' on relation line " + std::to_string(lineno));
    if (i < 1 || j < 1 || i > n || j > n)
      throw ParameterError("poset file: element out of range 1.." + std::to_string(n));
    rel.emplace_back(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1));
  }
  return Poset::from_relations(static_cast<std::size_t>(n), rel);
}

inline void write_poset(std::ostream& out, const Poset& P) {
  out << P.size() << "\n";
  for (auto [a, b] : P.covers()) out << a + 1 << " " << b + 1 << "\n";
}

}  // namespace qslab
