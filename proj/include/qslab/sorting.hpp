#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "core.hpp"
#include "rng.hpp"

namespace qslab {

struct CostTally {
  std::uint64_t comparisons = 0;
  std::uint64_t exchanges = 0;
  std::uint64_t stages = 0;

  CostTally& operator+=(const CostTally& o) {
    comparisons += o.comparisons;
    exchanges += o.exchanges;
    stages += o.stages;
    return *this;
  }
  friend bool operator==(const CostTally&, const CostTally&) = default;
};

template <class T>
struct SortResult {
  std::vector<T> sorted;
  CostTally tally;
};

// Pivot choices come from a chooser: pick(m) is uniform on [0, m).
class RandomChooser {
 public:
  explicit RandomChooser(Rng rng) : rng_(std::move(rng)) {}
  explicit RandomChooser(std::uint64_t seed) : rng_(seed) {}
  std::size_t pick(std::size_t m) { return rng_.below(m); }
  Rng& rng() { return rng_; }

 private:
  Rng rng_;
};

// Walks every sequence of choices in depth-first order. Each complete run
// has probability weight() = prod 1/m over the picks it made.
class EnumChooser {
 public:
  std::size_t pick(std::size_t m) {
    if (m <= 1) return 0;
    if (pos_ < path_.size()) {
      auto [c, r] = path_[pos_++];
      if (r != m) throw ConsistencyError("enumeration: choice ranges changed between runs");
      return c;
    }
    path_.emplace_back(0, m);
    ++pos_;
    return 0;
  }

  Rational weight() const {
    BigInt den = 1;
    for (auto& [c, r] : path_) den *= static_cast<unsigned long>(r);
    return make_rational(1, den);
  }

  bool next() {
    if (pos_ != path_.size()) throw ConsistencyError("enumeration: run did not replay its path");
    while (!path_.empty() && path_.back().first + 1 == path_.back().second) path_.pop_back();
    pos_ = 0;
    if (path_.empty()) return false;
    ++path_.back().first;
    return true;
  }

 private:
  std::vector<std::pair<std::size_t, std::size_t>> path_;
  std::size_t pos_ = 0;
};

namespace detail {

template <class T>
void require_distinct(const std::vector<T>& a) {
  std::vector<T> b(a);
  std::sort(b.begin(), b.end());
  if (std::adjacent_find(b.begin(), b.end(), [](const T& x, const T& y) { return !(x < y) && !(y < x); }) != b.end())
    throw ParameterError("keys must be pairwise distinct");
}

template <class T>
struct Ctx {
  std::vector<T>& a;
  CostTally t;
  bool less(const T& x, const T& y) {
    ++t.comparisons;
    return x < y;
  }
};

template <class T>
void insertion_sort(Ctx<T>& c, std::size_t lo, std::size_t len) {
  for (std::size_t i = 1; i < len; ++i) {
    std::size_t j = lo + i;
    while (j > lo && c.less(c.a[j], c.a[j - 1])) {
      std::swap(c.a[j], c.a[j - 1]);
      ++c.t.exchanges;
      --j;
    }
  }
}

// Two-pointer partition with the pivot already at position hi. Every
// non-pivot key is compared exactly once. Returns the pivot's final index.
template <class T>
std::size_t partition_single(Ctx<T>& c, std::size_t lo, std::size_t hi) {
  auto& a = c.a;
  if (lo == hi) return lo;
  const T v = a[hi];
  std::size_t i = lo, j = hi - 1;
  for (;;) {
    while (i <= j && c.less(a[i], v)) ++i;
    while (j > i && c.less(v, a[j])) --j;
    if (i >= j) break;
    std::swap(a[i], a[j]);
    ++c.t.exchanges;
    ++i;
    --j;
  }
  std::swap(a[i], a[hi]);
  ++c.t.exchanges;
  return i;
}

// Moves `count` uniformly chosen distinct elements of [lo, lo+len) to the
// front of the range. Not counted as exchanges.
template <class T, class Ch>
void draw_to_front(std::vector<T>& a, Ch& ch, std::size_t lo, std::size_t len, std::size_t count) {
  for (std::size_t r = 0; r < count; ++r) {
    std::size_t j = r + ch.pick(len - r);
    std::swap(a[lo + r], a[lo + j]);
  }
}

template <class T, class Ch>
std::size_t quickselect_range(Ctx<T>& c, Ch& ch, std::size_t lo, std::size_t len, std::size_t rank) {
  for (;;) {
    if (len == 1) return lo;
    std::size_t hi = lo + len - 1;
    std::size_t p = lo + ch.pick(len);
    std::swap(c.a[p], c.a[hi]);
    std::size_t q = partition_single(c, lo, hi);
    std::size_t r = q - lo;
    if (r == rank) return q;
    if (rank < r) {
      len = r;
    } else {
      rank -= r + 1;
      len = hi - q;
      lo = q + 1;
    }
  }
}

template <class T, class Ch>
void quicksort_single_range(Ctx<T>& c, Ch& ch, std::size_t lo0, std::size_t len0, std::size_t cutoff) {
  std::vector<std::pair<std::size_t, std::size_t>> stack{{lo0, len0}};
  while (!stack.empty()) {
    auto [lo, len] = stack.back();
    stack.pop_back();
    if (len == 0) continue;
    if (cutoff > 0 && len <= cutoff) {
      insertion_sort(c, lo, len);
      continue;
    }
    ++c.t.stages;
    if (len == 1) continue;
    std::size_t hi = lo + len - 1;
    std::size_t p = lo + ch.pick(len);
    std::swap(c.a[p], c.a[hi]);
    std::size_t q = partition_single(c, lo, hi);
    stack.emplace_back(q + 1, hi - q);
    stack.emplace_back(lo, q - lo);
  }
}

// Binary search of x among sorted pivots p[0..k); returns segment in [0, k].
template <class T>
std::size_t classify(Ctx<T>& c, const T& x, const T* p, std::size_t k) {
  std::size_t lo = 0, hi = k;
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (c.less(x, p[mid])) hi = mid; else lo = mid + 1;
  }
  return lo;
}

// Lays out segments and pivots as seg0 p0 seg1 p1 ... seg_k and counts keys
// that changed position.
template <class T>
void scatter(Ctx<T>& c, std::size_t lo, std::size_t len, const std::vector<std::size_t>& seg_of,
             std::size_t k, std::vector<std::size_t>& seg_start, std::vector<std::size_t>& seg_len) {
  seg_len.assign(k + 1, 0);
  for (std::size_t i = 0; i < len; ++i)
    if (seg_of[i] <= k) ++seg_len[seg_of[i]];
  seg_start.assign(k + 1, 0);
  std::vector<std::size_t> pivot_pos(k);
  std::size_t off = 0;
  for (std::size_t s = 0; s <= k; ++s) {
    seg_start[s] = lo + off;
    off += seg_len[s];
    if (s < k) pivot_pos[s] = lo + off++;
  }
  std::vector<T> out(len);
  std::vector<std::size_t> fill(seg_start);
  std::size_t pivot_seen = 0;
  for (std::size_t i = 0; i < len; ++i) {
    std::size_t dst;
    if (seg_of[i] > k) dst = pivot_pos[pivot_seen++];
    else dst = fill[seg_of[i]]++;
    if (dst != lo + i) ++c.t.exchanges;
    out[dst - lo] = c.a[lo + i];
  }
  std::copy(out.begin(), out.end(), c.a.begin() + lo);
}

}  // namespace detail

// Uniform random pivot, rightmost-pivot two-pointer partition. Subarrays of at
// most `cutoff` keys (cutoff > 0) are finished by insertion sort.
template <class T, class Ch>
CostTally quicksort_single_inplace(std::vector<T>& a, Ch& ch, std::size_t cutoff = 0) {
  detail::Ctx<T> c{a, {}};
  detail::quicksort_single_range(c, ch, 0, a.size(), cutoff);
  return c.t;
}

template <class T>
SortResult<T> quicksort_single(std::vector<T> keys, std::uint64_t seed, std::size_t cutoff = 0) {
  detail::require_distinct(keys);
  RandomChooser ch(seed);
  auto t = quicksort_single_inplace(keys, ch, cutoff);
  return {std::move(keys), t};
}

// Dual pivot: the two pivots are compared first, each key is compared with the
// smaller pivot and, if larger, with the larger pivot. Exchanges count keys
// moved into the outer segments plus the two pivot placements.
template <class T, class Ch>
CostTally quicksort_dual_inplace(std::vector<T>& a, Ch& ch, std::size_t cutoff = 0) {
  detail::Ctx<T> c{a, {}};
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, a.size()}};
  std::vector<T> small, mid, large;
  while (!stack.empty()) {
    auto [lo, len] = stack.back();
    stack.pop_back();
    if (len < 2) continue;
    if (cutoff > 0 && len <= cutoff) {
      detail::insertion_sort(c, lo, len);
      continue;
    }
    ++c.t.stages;
    std::size_t hi = lo + len - 1;
    detail::draw_to_front(a, ch, lo, len, 2);
    std::swap(a[lo + 1], a[hi]);
    if (c.less(a[hi], a[lo])) std::swap(a[lo], a[hi]);
    const T p = a[lo], q = a[hi];
    small.clear();
    mid.clear();
    large.clear();
    for (std::size_t i = lo + 1; i < hi; ++i) {
      if (c.less(a[i], p)) small.push_back(a[i]);
      else if (c.less(a[i], q)) mid.push_back(a[i]);
      else large.push_back(a[i]);
    }
    c.t.exchanges += small.size() + large.size() + 2;
    std::size_t w = lo;
    for (auto& x : small) a[w++] = x;
    a[w++] = p;
    for (auto& x : mid) a[w++] = x;
    a[w++] = q;
    for (auto& x : large) a[w++] = x;
    stack.emplace_back(lo + small.size() + mid.size() + 2, large.size());
    stack.emplace_back(lo + small.size() + 1, mid.size());
    stack.emplace_back(lo, small.size());
  }
  return c.t;
}

template <class T>
SortResult<T> quicksort_dual(std::vector<T> keys, std::uint64_t seed, std::size_t cutoff = 0) {
  detail::require_distinct(keys);
  RandomChooser ch(seed);
  auto t = quicksort_dual_inplace(keys, ch, cutoff);
  return {std::move(keys), t};
}

// k pivots, sorted by insertion sort; the other keys are placed by binary
// search. A subarray with fewer than k keys is insertion sorted. One with
// exactly k keys is all pivots and counts as a stage.
template <class T, class Ch>
CostTally quicksort_multi_inplace(std::vector<T>& a, std::size_t k, Ch& ch, std::size_t cutoff = 0) {
  require(k >= 1, "multi: pivot count k must be >= 1");
  detail::Ctx<T> c{a, {}};
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, a.size()}};
  std::vector<std::size_t> seg_of, seg_start, seg_len;
  std::vector<T> piv;
  while (!stack.empty()) {
    auto [lo, len] = stack.back();
    stack.pop_back();
    if (len == 0) continue;
    if (len < k || (cutoff > 0 && len <= cutoff)) {
      detail::insertion_sort(c, lo, len);
      continue;
    }
    ++c.t.stages;
    detail::draw_to_front(a, ch, lo, len, k);
    detail::insertion_sort(c, lo, k);
    piv.assign(a.begin() + lo, a.begin() + lo + k);
    seg_of.assign(len, k + 1);
    for (std::size_t i = k; i < len; ++i) seg_of[i] = detail::classify(c, a[lo + i], piv.data(), k);
    detail::scatter(c, lo, len, seg_of, k, seg_start, seg_len);
    for (std::size_t s = k + 1; s-- > 0;) stack.emplace_back(seg_start[s], seg_len[s]);
  }
  return c.t;
}

template <class T>
SortResult<T> quicksort_multi(std::vector<T> keys, std::size_t k, std::uint64_t seed, std::size_t cutoff = 0) {
  detail::require_distinct(keys);
  RandomChooser ch(seed);
  auto t = quicksort_multi_inplace(keys, k, ch, cutoff);
  return {std::move(keys), t};
}

namespace detail {

inline std::size_t ipow(std::size_t b, std::size_t e) {
  std::size_t r = 1;
  while (e--) r *= b;
  return r;
}

// Remedian of the s^beta keys at [lo, lo + s^beta); s = 2k+1. Returns index.
template <class T, class Ch>
std::size_t remedian_range(Ctx<T>& c, Ch& ch, std::size_t lo, std::size_t k, std::size_t beta) {
  const std::size_t s = 2 * k + 1;
  if (beta == 1) return quickselect_range(c, ch, lo, s, k);
  const std::size_t g = ipow(s, beta - 1);
  for (std::size_t grp = 0; grp < s; ++grp) {
    std::size_t r = remedian_range(c, ch, lo + grp * g, k, beta - 1);
    std::swap(c.a[lo + grp], c.a[r]);
  }
  return quickselect_range(c, ch, lo, s, k);
}

// Quicksort whose pivot is the remedian of a random sample of (2k+1)^beta
// keys; beta drops while the sample does not fit. Partition toll is
// (len - 1) key comparisons plus 2 sentinel comparisons.
template <class T, class Ch>
void quicksort_remedian_range(Ctx<T>& c, Ch& ch, std::size_t k, std::size_t beta, std::size_t cutoff) {
  const std::size_t s = 2 * k + 1;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, c.a.size()}};
  while (!stack.empty()) {
    auto [lo, len] = stack.back();
    stack.pop_back();
    if (len == 0) continue;
    if (len <= cutoff) {
      insertion_sort(c, lo, len);
      continue;
    }
    ++c.t.stages;
    std::size_t b = beta;
    while (b > 0 && ipow(s, b) > len) --b;
    std::size_t hi = lo + len - 1;
    std::size_t p;
    if (b == 0) {
      p = lo + ch.pick(len);
    } else {
      draw_to_front(c.a, ch, lo, len, ipow(s, b));
      p = remedian_range(c, ch, lo, k, b);
    }
    std::swap(c.a[p], c.a[hi]);
    std::size_t q = partition_single(c, lo, hi);
    c.t.comparisons += 2;
    stack.emplace_back(q + 1, hi - q);
    stack.emplace_back(lo, q - lo);
  }
}

}  // namespace detail

template <class T, class Ch>
CostTally quicksort_median_sample_inplace(std::vector<T>& a, std::size_t k, Ch& ch, std::size_t cutoff) {
  require(cutoff >= 2 * k + 1, "median sample: cutoff must be >= 2k+1");
  detail::Ctx<T> c{a, {}};
  detail::quicksort_remedian_range(c, ch, k, 1, cutoff);
  return c.t;
}

template <class T>
SortResult<T> quicksort_median_sample(std::vector<T> keys, std::size_t k, std::uint64_t seed, std::size_t cutoff) {
  detail::require_distinct(keys);
  RandomChooser ch(seed);
  auto t = quicksort_median_sample_inplace(keys, k, ch, cutoff);
  return {std::move(keys), t};
}

template <class T, class Ch>
CostTally quicksort_remedian_inplace(std::vector<T>& a, std::size_t k, std::size_t beta, Ch& ch, std::size_t cutoff) {
  require(beta >= 1, "remedian: beta must be >= 1");
  require(cutoff >= 2 * k + 1, "remedian: cutoff must be >= 2k+1");
  detail::Ctx<T> c{a, {}};
  detail::quicksort_remedian_range(c, ch, k, beta, cutoff);
  return c.t;
}

template <class T>
SortResult<T> quicksort_remedian(std::vector<T> keys, std::size_t k, std::size_t beta, std::uint64_t seed,
                                 std::size_t cutoff) {
  detail::require_distinct(keys);
  RandomChooser ch(seed);
  auto t = quicksort_remedian_inplace(keys, k, beta, ch, cutoff);
  return {std::move(keys), t};
}

// Sample of 2^j - 1 keys sorted by quicksort_single, the rest placed by binary
// search (median first, then quartiles, ...), buckets sorted by quicksort_single.
template <class T, class Ch>
CostTally samplesort_inplace(std::vector<T>& a, std::size_t sample_size, Ch& ch) {
  const std::size_t n = a.size();
  require(sample_size >= 1 && ((sample_size + 1) & sample_size) == 0, "samplesort: sample size must be 2^k - 1");
  require(sample_size < n, "samplesort: sample size must be < n");
  detail::Ctx<T> c{a, {}};
  detail::draw_to_front(a, ch, 0, n, sample_size);
  detail::quicksort_single_range(c, ch, 0, sample_size, 0);
  ++c.t.stages;
  std::vector<T> piv(a.begin(), a.begin() + sample_size);
  std::vector<std::size_t> seg_of(n, sample_size + 1), seg_start, seg_len;
  for (std::size_t i = sample_size; i < n; ++i) seg_of[i] = detail::classify(c, a[i], piv.data(), sample_size);
  detail::scatter(c, 0, n, seg_of, sample_size, seg_start, seg_len);
  for (std::size_t s = 0; s <= sample_size; ++s) detail::quicksort_single_range(c, ch, seg_start[s], seg_len[s], 0);
  return c.t;
}

template <class T>
SortResult<T> samplesort(std::vector<T> keys, std::size_t sample_size, std::uint64_t seed) {
  detail::require_distinct(keys);
  RandomChooser ch(seed);
  auto t = samplesort_inplace(keys, sample_size, ch);
  return {std::move(keys), t};
}

// m is 1-based.
template <class T, class Ch>
std::pair<T, CostTally> quickselect_with(std::vector<T> a, std::size_t m, Ch& ch) {
  require(m >= 1 && m <= a.size(), "quickselect: rank out of range");
  detail::Ctx<T> c{a, {}};
  std::size_t idx = detail::quickselect_range(c, ch, 0, a.size(), m - 1);
  return {a[idx], c.t};
}

template <class T>
std::pair<T, CostTally> quickselect(std::vector<T> keys, std::size_t m, std::uint64_t seed) {
  detail::require_distinct(keys);
  RandomChooser ch(seed);
  return quickselect_with(std::move(keys), m, ch);
}

// Ternary partition for keys with repeats; a three-way comparison counts once.
template <class T, class Ch>
CostTally quicksort_multiset_inplace(std::vector<T>& a, Ch& ch) {
  detail::Ctx<T> c{a, {}};
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, a.size()}};
  std::vector<std::size_t> seg_of, seg_start, seg_len;
  while (!stack.empty()) {
    auto [lo, len] = stack.back();
    stack.pop_back();
    if (len == 0) continue;
    ++c.t.stages;
    if (len == 1) continue;
    std::size_t pv = lo + ch.pick(len);
    std::swap(a[lo], a[pv]);
    const T v = a[lo];
    seg_of.assign(len, 1);
    for (std::size_t i = 1; i < len; ++i) {
      ++c.t.comparisons;
      const T& x = a[lo + i];
      seg_of[i] = x < v ? 0 : (v < x ? 2 : 1);
    }
    // Equal keys sit in the middle segment with the pivot.
    seg_len.assign(3, 0);
    for (auto s : seg_of) ++seg_len[s];
    std::vector<std::size_t> fill{lo, lo + seg_len[0], lo + seg_len[0] + seg_len[1]};
    seg_start = fill;
    std::vector<T> out(len);
    for (std::size_t i = 0; i < len; ++i) {
      std::size_t dst = fill[seg_of[i]]++;
      if (dst != lo + i) ++c.t.exchanges;
      out[dst - lo] = a[lo + i];
    }
    std::copy(out.begin(), out.end(), a.begin() + lo);
    stack.emplace_back(seg_start[2], seg_len[2]);
    stack.emplace_back(seg_start[0], seg_len[0]);
  }
  return c.t;
}

template <class T>
SortResult<T> quicksort_multiset(std::vector<T> keys, std::uint64_t seed) {
  RandomChooser ch(seed);
  auto t = quicksort_multiset_inplace(keys, ch);
  return {std::move(keys), t};
}

}  // namespace qslab
