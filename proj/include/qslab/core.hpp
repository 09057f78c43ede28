#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace qslab {

using Rational = mpq_class;
using BigInt = mpz_class;

// Exit-code carrying error types. The CLI maps them to 2, 3 and 1.
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConsistencyError : std::logic_error {
  using std::logic_error::logic_error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ParameterError(what);
}

inline Rational make_rational(const BigInt& p, const BigInt& q = 1) {
  Rational r(p, q);
  r.canonicalize();
  return r;
}

inline std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline std::string format_float(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline double to_double(const Rational& q) { return q.get_d(); }

// H_n^(k) with H_0 = 0. Cached per order; the cache only grows.
inline Rational harmonic(long n, int k = 1) {
  require(k >= 1, "harmonic: order must be >= 1");
  require(n >= 0, "harmonic: n must be >= 0");
  static std::mutex mu;
  static std::vector<std::vector<Rational>> cache;
  std::lock_guard<std::mutex> lock(mu);
  if (cache.size() < static_cast<std::size_t>(k)) cache.resize(k);
  auto& c = cache[k - 1];
  if (c.empty()) c.push_back(Rational(0));
  while (c.size() <= static_cast<std::size_t>(n)) {
    BigInt i = static_cast<unsigned long>(c.size());
    BigInt p;
    mpz_pow_ui(p.get_mpz_t(), i.get_mpz_t(), static_cast<unsigned long>(k));
    c.push_back(c.back() + make_rational(1, p));
  }
  return c[n];
}

inline double harmonic_d(long n) {
  if (n < 100000) {
    double s = 0;
    for (long i = n; i >= 1; --i) s += 1.0 / static_cast<double>(i);
    return s;
  }
  const double x = static_cast<double>(n);
  return std::log(x) + 0.57721566490153286 + 1 / (2 * x) - 1 / (12 * x * x);
}

inline BigInt factorial(unsigned long n) {
  BigInt r;
  mpz_fac_ui(r.get_mpz_t(), n);
  return r;
}

inline BigInt binomial(unsigned long n, unsigned long k) {
  BigInt r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

inline double log2_big(const BigInt& x) {
  if (x <= 0) return -INFINITY;
  long e = 0;
  double m = mpz_get_d_2exp(&e, x.get_mpz_t());
  return std::log2(m) + static_cast<double>(e);
}

// ceil(log2 x) for x >= 1, exact.
inline long ceil_log2_big(const BigInt& x) {
  if (x <= 1) return 0;
  BigInt y = x - 1;
  return static_cast<long>(mpz_sizeinbase(y.get_mpz_t(), 2));
}

inline long ceil_log2(unsigned long long s) {
  long c = 0;
  while ((1ULL << c) < s) ++c;
  return c;
}

}  // namespace qslab
