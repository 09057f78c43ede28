#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"

namespace qslab {

struct IdentitySides {
  Rational lhs, rhs;
  bool holds() const { return lhs == rhs; }
};

struct HarmonicIdentity {
  std::string name;
  std::string statement;
  std::function<IdentitySides(long)> sides;
};

namespace detail {

inline Rational Hn(long n, int k = 1) { return harmonic(n, k); }
inline Rational mean_cmp(long j) { return 2 * (j + 1) * Hn(j) - 4 * j; }
inline Rational Hsq_minus_H2(long n) {
  Rational h = Hn(n);
  return h * h - Hn(n, 2);
}

}  // namespace detail

inline const std::vector<HarmonicIdentity>& harmonic_identities() {
  using detail::Hn;
  using detail::Hsq_minus_H2;
  using detail::mean_cmp;
  static const std::vector<HarmonicIdentity> ids = {
      {"weighted_harmonic_sum", "sum_{j=1}^n j H_{j-1} = n(n+1)H_{n+1}/2 - n(n+5)/4",
       [](long n) {
         Rational l = 0;
         for (long j = 1; j <= n; ++j) l += j * Hn(j - 1);
         Rational N = n;
         return IdentitySides{l, N * (N + 1) * Hn(n + 1) / 2 - N * (N + 5) / 4};
       }},
      {"sum_of_means", "sum_{j=1}^n M_{j-1} = n(n+1)H_{n+1} - (5n^2+n)/2",
       [](long n) {
         Rational l = 0;
         for (long j = 1; j <= n; ++j) l += mean_cmp(j - 1);
         Rational N = n;
         return IdentitySides{l, N * (N + 1) * Hn(n + 1) - (5 * N * N + N) / 2};
       }},
      {"mean_product_convolution",
       "sum M_{j-1}M_{n-j} = 4 sum jH_{j-1}(n-j+1)H_{n-j} - 8n(n^2-1)H_{n+1}/3 + 44n(n^2-1)/9",
       [](long n) {
         Rational l = 0, w = 0;
         for (long j = 1; j <= n; ++j) {
           l += mean_cmp(j - 1) * mean_cmp(n - j);
           w += j * Hn(j - 1) * (n - j + 1) * Hn(n - j);
         }
         Rational N = n;
         return IdentitySides{l, 4 * w - 8 * N * (N * N - 1) * Hn(n + 1) / 3 + 44 * N * (N * N - 1) / 9};
       }},
      {"square_weighted_harmonic_sum",
       "sum_{j=1}^n j^2 H_{j-1} = (6n(n+1)(2n+1)H_{n+1} - n(n+1)(4n+23))/36",
       [](long n) {
         Rational l = 0;
         for (long j = 1; j <= n; ++j) l += j * j * Hn(j - 1);
         Rational N = n;
         return IdentitySides{l, (6 * N * (N + 1) * (2 * N + 1) * Hn(n + 1) - N * (N + 1) * (4 * N + 23)) / 36};
       }},
      {"reflected_weighted_harmonic_sum",
       "sum_{j=1}^n j(n-j+1)H_{n-j} = (6nH_{n+1}(n^2+3n+2) - 5n^3 - 27n^2 - 22n)/36",
       [](long n) {
         Rational l = 0;
         for (long j = 1; j <= n; ++j) l += j * (n - j + 1) * Hn(n - j);
         Rational N = n;
         return IdentitySides{
             l, (6 * N * Hn(n + 1) * (N * N + 3 * N + 2) - 5 * N * N * N - 27 * N * N - 22 * N) / 36};
       }},
      {"harmonic_product_symmetry", "sum_{j=1}^n j H_{j-1} H_{n+1-j} = (n+2)/2 sum_{j=1}^n H_j H_{n-j}",
       [](long n) {
         Rational l = 0, r = 0;
         for (long j = 1; j <= n; ++j) {
           l += j * Hn(j - 1) * Hn(n + 1 - j);
           r += Hn(j) * Hn(n - j);
         }
         return IdentitySides{l, Rational(n + 2) / 2 * r};
       }},
      {"harmonic_product_convolution",
       "sum_{i=1}^n H_i H_{n+1-i} = (n+2)(H_{n+1}^2 - H_{n+1}^(2)) - 2(n+1)(H_{n+1} - 1)",
       [](long n) {
         Rational l = 0;
         for (long i = 1; i <= n; ++i) l += Hn(i) * Hn(n + 1 - i);
         return IdentitySides{l, (n + 2) * Hsq_minus_H2(n + 1) - 2 * (n + 1) * (Hn(n + 1) - 1)};
       }},
      {"harmonic_product_expansion",
       "sum_{i=1}^n H_i H_{n+1-i} = sum_{j=1}^n ((n+2-j)H_{n+1-j} - (n+1-j))/j",
       [](long n) {
         Rational l = 0, r = 0;
         for (long i = 1; i <= n; ++i) l += Hn(i) * Hn(n + 1 - i);
         for (long j = 1; j <= n; ++j) r += ((n + 2 - j) * Hn(n + 1 - j) - (n + 1 - j)) / Rational(j);
         return IdentitySides{l, r};
       }},
      {"reciprocal_harmonic_step",
       "sum_{j=1}^n H_{n+1-j}/j = sum_{j=1}^{n-1} H_{n-j}/j + 2H_n/(n+1)",
       [](long n) {
         Rational l = 0, r = 0;
         for (long j = 1; j <= n; ++j) l += Hn(n + 1 - j) / j;
         for (long j = 1; j <= n - 1; ++j) r += Hn(n - j) / j;
         return IdentitySides{l, r + 2 * Hn(n) / (n + 1)};
       }},
      {"reciprocal_harmonic_convolution", "sum_{j=1}^n H_{n+1-j}/j = H_{n+1}^2 - H_{n+1}^(2)",
       [](long n) {
         Rational l = 0;
         for (long j = 1; j <= n; ++j) l += Hn(n + 1 - j) / j;
         return IdentitySides{l, Hsq_minus_H2(n + 1)};
       }},
      {"harmonic_over_successor", "H_{n+1}^2 - H_{n+1}^(2) = 2 sum_{j=1}^n H_j/(j+1)",
       [](long n) {
         Rational r = 0;
         for (long j = 1; j <= n; ++j) r += Hn(j) / (j + 1);
         return IdentitySides{Hsq_minus_H2(n + 1), 2 * r};
       }},
      {"harmonic_prefix_sum", "sum_{j=1}^n H_j = (n+1)H_n - n",
       [](long n) {
         Rational l = 0;
         for (long j = 1; j <= n; ++j) l += Hn(j);
         return IdentitySides{l, (n + 1) * Hn(n) - n};
       }},
      {"split_harmonic_convolution",
       "sum_{j=1}^n H_j H_{n-j} = (n+1)((H_{n+1}^2 - H_{n+1}^(2)) - 2(H_{n+1} - 1))",
       [](long n) {
         Rational l = 0;
         for (long j = 1; j <= n; ++j) l += Hn(j) * Hn(n - j);
         return IdentitySides{l, (n + 1) * (Hsq_minus_H2(n + 1) - 2 * (Hn(n + 1) - 1))};
       }},
  };
  return ids;
}

inline const HarmonicIdentity& find_identity(const std::string& name) {
  for (auto& id : harmonic_identities())
    if (id.name == name) return id;
  throw ParameterError("unknown identity: " + name);
}

inline IdentitySides identity_sides(const std::string& name, long n) {
  require(n >= 1, "identity check needs n >= 1");
  return find_identity(name).sides(n);
}

inline bool harmonic_identity_check(const std::string& name, long n) { return identity_sides(name, n).holds(); }

// p[j] = probability that the remedian of a random (2k+1)^beta sample is its
// (j+1)-th smallest element. Conditions on the element x of rank j sitting in
// the first group: its rank a inside the group is hypergeometric, it is the
// group remedian with probability p^{beta-1}_a, and exactly k of the other
// groups must have their remedian below x.
inline std::vector<Rational> remedian_split_probabilities(long k, long beta) {
  require(k >= 0, "remedian probabilities: k >= 0");
  require(beta >= 0, "remedian probabilities: beta >= 0");
  const long s = 2 * k + 1;
  std::vector<Rational> p{Rational(1)};
  long G = 1;
  for (long b = 1; b <= beta; ++b) {
    const long N = G * s;
    if (N > 4096) throw CapacityError("remedian probabilities: sample too large");
    std::vector<Rational> F(G + 1, Rational(0));
    for (long u = 0; u < G; ++u) F[u + 1] = F[u] + p[u];
    std::vector<BigInt> cg(G + 1);
    for (long u = 0; u <= G; ++u) cg[u] = binomial(G, u);
    std::vector<Rational> next(N);
    const long others = s - 1, pool = others * G;
    for (long j = 0; j < N; ++j) {
      Rational total = 0;
      for (long a = 0; a < G; ++a) {
        if (a > j || G - 1 - a > N - 1 - j || p[a] == 0) continue;
        const long S = j - a;
        if (S > pool || pool - S != N - 1 - j - (G - 1 - a)) continue;
        Rational hyp = make_rational(binomial(j, a) * binomial(N - 1 - j, G - 1 - a), binomial(N - 1, G - 1));
        // dp[sum][below] over the other groups.
        std::vector<std::vector<Rational>> dp(S + 1, std::vector<Rational>(k + 1, Rational(0)));
        dp[0][0] = 1;
        for (long g = 0; g < others; ++g) {
          std::vector<std::vector<Rational>> nd(S + 1, std::vector<Rational>(k + 1, Rational(0)));
          for (long sum = 0; sum <= S; ++sum)
            for (long c = 0; c <= k; ++c) {
              if (dp[sum][c] == 0) continue;
              for (long bb = 0; bb <= G && sum + bb <= S; ++bb) {
                Rational w = dp[sum][c] * Rational(cg[bb]);
                if (c + 1 <= k) nd[sum + bb][c + 1] += w * F[bb];
                nd[sum + bb][c] += w * (1 - F[bb]);
              }
            }
          dp = std::move(nd);
        }
        total += hyp * p[a] * dp[S][k] / Rational(binomial(pool, S));
      }
      next[j] = total;
    }
    p = std::move(next);
    G = N;
  }
  return p;
}

inline Rational remedian_split_probability(long k, long beta, long j) {
  require(beta >= 1, "remedian probability: beta >= 1");
  auto p = remedian_split_probabilities(k, beta);
  require(j >= 0 && j < static_cast<long>(p.size()), "remedian probability: j out of range");
  return p[j];
}

}  // namespace qslab
