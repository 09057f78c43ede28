#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <complex>
#include <string>
#include <vector>

#include "closed_forms.hpp"
#include "core.hpp"

namespace qslab {

using Complex = std::complex<double>;

enum class IndicialFamily { median, multi, general };

inline IndicialFamily parse_family(const std::string& s) {
  if (s == "median") return IndicialFamily::median;
  if (s == "multi") return IndicialFamily::multi;
  if (s == "general") return IndicialFamily::general;
  throw ParameterError("family must be median, multi or general");
}

inline std::string family_name(IndicialFamily f) {
  switch (f) {
    case IndicialFamily::median: return "median";
    case IndicialFamily::multi: return "multi";
    case IndicialFamily::general: return "general";
  }
  return "?";
}

// Signed Stirling numbers of the first kind: x^(m falling) = sum_i s(m,i) x^i.
inline std::vector<std::vector<BigInt>> stirling1(long m) {
  std::vector<std::vector<BigInt>> s(m + 1, std::vector<BigInt>(m + 1, 0));
  s[0][0] = 1;
  for (long n = 1; n <= m; ++n)
    for (long i = 1; i <= n; ++i) s[n][i] = s[n - 1][i - 1] - (n - 1) * s[n - 1][i];
  return s;
}

// Stirling numbers of the second kind: x^m = sum_i S(m,i) x^(i falling).
inline std::vector<std::vector<BigInt>> stirling2(long m) {
  std::vector<std::vector<BigInt>> S(m + 1, std::vector<BigInt>(m + 1, 0));
  S[0][0] = 1;
  for (long n = 1; n <= m; ++n)
    for (long i = 1; i <= n; ++i) S[n][i] = S[n - 1][i - 1] + i * S[n - 1][i];
  return S;
}

struct IndicialPolynomial {
  IndicialFamily family;
  long k = 0, t = 0;
  std::vector<Rational> falling;  // coefficient of Theta^(i falling)
  std::vector<Rational> coeffs;   // monomial coefficients, index = power

  long degree() const { return static_cast<long>(coeffs.size()) - 1; }

  Rational eval(const Rational& x) const {
    Rational r = 0;
    for (std::size_t i = coeffs.size(); i-- > 0;) r = r * x + coeffs[i];
    return r;
  }
  Rational derivative_at(const Rational& x) const {
    Rational r = 0;
    for (std::size_t i = coeffs.size(); i-- > 1;) r = r * x + coeffs[i] * static_cast<unsigned long>(i);
    return r;
  }
  template <class C>
  C eval_c(const C& x) const {
    C r = 0;
    for (std::size_t i = coeffs.size(); i-- > 0;) r = r * x + C(to_double(coeffs[i]));
    return r;
  }
  template <class C>
  C deriv_c(const C& x) const {
    C r = 0;
    for (std::size_t i = coeffs.size(); i-- > 1;) r = r * x + C(to_double(coeffs[i]) * static_cast<double>(i));
    return r;
  }
};

inline IndicialPolynomial build_indicial(IndicialFamily fam, long k, long t = 0) {
  require(k >= 1, "indicial: k must be >= 1");
  require(t >= 0, "indicial: t must be >= 0");
  IndicialPolynomial p{fam, k, t, {}, {}};
  auto sign = [](long e) { return (e % 2 == 0) ? 1 : -1; };
  // C(Theta, m) = Theta^(m falling) / m!
  auto add_binom = [&](long m, const Rational& w) {
    if (static_cast<long>(p.falling.size()) <= m) p.falling.resize(m + 1, Rational(0));
    p.falling[m] += w / Rational(factorial(m));
  };
  switch (fam) {
    case IndicialFamily::multi:
      p.falling.assign(k + 1, Rational(0));
      p.falling[k] = sign(k);
      p.falling[0] = -Rational(factorial(k + 1));
      break;
    case IndicialFamily::median:
      add_binom(2 * k + 1, -1);
      add_binom(k, -2 * sign(k));
      break;
    case IndicialFamily::general: {
      require(k >= 2, "indicial: the general family needs k >= 2");
      const long K = k * (t + 1) - 1;
      add_binom(K, sign(K));
      add_binom(t, -k * sign(t));
      break;
    }
  }
  const long d = static_cast<long>(p.falling.size()) - 1;
  auto s1 = stirling1(d);
  p.coeffs.assign(d + 1, Rational(0));
  for (long m = 0; m <= d; ++m)
    if (p.falling[m] != 0)
      for (long i = 0; i <= m; ++i) p.coeffs[i] += p.falling[m] * Rational(s1[m][i]);
  while (p.coeffs.size() > 1 && p.coeffs.back() == 0) p.coeffs.pop_back();
  if (p.eval(-2) != 0) throw ConsistencyError("indicial polynomial does not vanish at -2");
  return p;
}

struct RootSet {
  std::vector<Complex> roots;
  double max_residual = 0;
  double min_gap = 0;
  bool all_simple = false;
  bool contains_minus_two = false;
  bool min_real_part_is_minus_two = false;
  bool expected_real_roots_present = false;
  std::vector<long> expected_real_roots;
  double max_real_part = 0;
};

inline std::vector<long> expected_real_roots(IndicialFamily fam, long k, long t) {
  std::vector<long> r;
  switch (fam) {
    case IndicialFamily::multi:
      r.push_back(-2);
      if (k % 2 == 0) r.push_back(k + 1);
      break;
    case IndicialFamily::median:
      for (long i = 0; i < k; ++i) r.push_back(i);
      r.push_back(-2);
      if (k % 2 == 1) r.push_back(3 * k + 2);
      break;
    case IndicialFamily::general:
      for (long i = 0; i < t; ++i) r.push_back(i);
      r.push_back(-2);
      if ((k + t) % 2 == 1) r.push_back(k * (t + 1) + t);
      break;
  }
  std::sort(r.begin(), r.end());
  return r;
}

// Companion-matrix eigenvalues, then Newton polishing in long double.
inline RootSet find_roots(const IndicialPolynomial& p) {
  const long d = p.degree();
  require(d >= 1, "find_roots: degree must be >= 1");
  RootSet rs;
  const double lead = to_double(p.coeffs[d]);
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(d, d);
  for (long i = 1; i < d; ++i) C(i, i - 1) = 1;
  for (long i = 0; i < d; ++i) C(i, d - 1) = -to_double(p.coeffs[i]) / lead;
  Eigen::EigenSolver<Eigen::MatrixXd> es(C, false);
  if (es.info() != Eigen::Success) throw ConsistencyError("find_roots: eigenvalue iteration did not converge");
  using LC = std::complex<long double>;
  for (long i = 0; i < d; ++i) {
    LC z(es.eigenvalues()[i].real(), es.eigenvalues()[i].imag());
    std::string trace;
    for (int it = 0; it < 60; ++it) {
      LC f = p.eval_c(z), df = p.deriv_c(z);
      if (std::abs(df) == 0) break;
      LC step = f / df;
      z -= step;
      if (std::abs(step) <= 1e-18L * std::max<long double>(1, std::abs(z))) break;
    }
    rs.roots.emplace_back(static_cast<double>(z.real()), static_cast<double>(z.imag()));
  }
  // Pair conjugates exactly and snap tiny imaginary parts.
  for (auto& z : rs.roots)
    if (std::fabs(z.imag()) < 1e-8) z = Complex(z.real(), 0.0);
  std::sort(rs.roots.begin(), rs.roots.end(), [](const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  for (std::size_t i = 0; i + 1 < rs.roots.size(); ++i) {
    auto& a = rs.roots[i];
    auto& b = rs.roots[i + 1];
    if (a.imag() < 0 && std::abs(a - std::conj(b)) < 1e-8) {
      double re = (a.real() + b.real()) / 2, im = (b.imag() - a.imag()) / 2;
      a = Complex(re, -im);
      b = Complex(re, im);
    }
  }
  for (auto& z : rs.roots) {
    LC zl(z.real(), z.imag());
    long double scale = 0, az = std::abs(zl), pw = 1;
    for (auto& c : p.coeffs) {
      scale += std::fabs(static_cast<long double>(to_double(c))) * pw;
      pw *= az;
    }
    rs.max_residual = std::max(rs.max_residual, static_cast<double>(std::abs(p.eval_c(zl)) / scale));
  }
  rs.min_gap = INFINITY;
  for (std::size_t i = 0; i < rs.roots.size(); ++i)
    for (std::size_t j = i + 1; j < rs.roots.size(); ++j)
      rs.min_gap = std::min(rs.min_gap, std::abs(rs.roots[i] - rs.roots[j]));
  rs.all_simple = rs.min_gap > 1e-6;
  double min_re = INFINITY;
  rs.max_real_part = -INFINITY;
  for (auto& z : rs.roots) {
    if (std::abs(z - Complex(-2, 0)) < 1e-8) rs.contains_minus_two = true;
    min_re = std::min(min_re, z.real());
    rs.max_real_part = std::max(rs.max_real_part, z.real());
  }
  bool others_right = true;
  for (auto& z : rs.roots)
    if (std::abs(z - Complex(-2, 0)) >= 1e-8 && z.real() <= -2 + 1e-9) others_right = false;
  rs.min_real_part_is_minus_two = rs.contains_minus_two && std::fabs(min_re + 2) < 1e-8 && others_right;
  rs.expected_real_roots = expected_real_roots(p.family, p.k, p.t);
  rs.expected_real_roots_present = true;
  for (long r : rs.expected_real_roots) {
    bool found = p.eval(r) == 0;
    bool numeric = std::any_of(rs.roots.begin(), rs.roots.end(),
                               [&](const Complex& z) { return std::abs(z - Complex(static_cast<double>(r), 0)) < 1e-7; });
    if (!found || !numeric) rs.expected_real_roots_present = false;
  }
  return rs;
}

inline bool certified(const RootSet& r) {
  return r.all_simple && r.contains_minus_two && r.min_real_part_is_minus_two && r.expected_real_roots_present &&
         r.max_residual < 1e-9;
}

struct SpecialValues {
  Rational S_at_minus2;  // S = P/(Theta+2) at -2, equal to P'(-2)
  Rational P_at_minus1;
  Rational closed_form_S;  // the quoted closed form of S(-2)
  Rational leading;        // leading asymptotic coefficient derived from S(-2)
};

inline SpecialValues indicial_special_values(IndicialFamily fam, long k, long t = 0) {
  auto p = build_indicial(fam, k, t);
  SpecialValues v;
  v.S_at_minus2 = p.derivative_at(-2);
  v.P_at_minus1 = p.eval(-1);
  switch (fam) {
    case IndicialFamily::multi:
      v.closed_form_S = -Rational(factorial(k + 1)) * (harmonic(k + 1) - 1);
      v.leading = Rational(factorial(k)) / abs(v.S_at_minus2);
      break;
    case IndicialFamily::median:
      v.closed_form_S = -(2 * k + 2) * (harmonic(2 * k + 2) - harmonic(k + 1));
      v.leading = Rational(2 * k + 2) / abs(v.S_at_minus2);
      break;
    case IndicialFamily::general:
      v.closed_form_S = -Rational(k * (t + 1)) * (harmonic(k * (t + 1)) - harmonic(t + 1));
      v.leading = Rational(k * (t + 1)) / abs(v.S_at_minus2);
      break;
  }
  return v;
}

// Coefficient of (n+1) in the mean stage count of the k-pivot scheme, from
// the exact polynomial: the -2 constant s = P(-1) / (k P'(-2)).
inline Rational stage_coefficient_exact(long k) {
  auto p = build_indicial(IndicialFamily::multi, k);
  return p.eval(-1) / (k * p.derivative_at(-2));
}

struct VandermondeSolution {
  std::vector<Complex> roots;
  std::vector<Complex> constants;
  std::vector<Complex> product_form;  // stages only
  Complex minus_two_constant;
  double residual = 0;
};

// Solves sum_i s_i r_i^(m falling) = rhs_m, m = 0..k-1, over the roots of the
// k-pivot polynomial. rhs_m = (-1)^(m+1) m! (a((m+1)H_m - m)/(H_{k+1}-1) + (a-b)/k);
// stages are a = 0, b = 1.
inline VandermondeSolution vandermonde_constants(long k, const std::string& kind = "stages", const Rational& a = 0,
                                                 const Rational& b = 1) {
  require(k >= 1, "vandermonde: k >= 1");
  Rational A = a, B = b;
  if (kind == "stages") {
    A = 0;
    B = 1;
  } else if (kind != "generic") {
    throw ParameterError("vandermonde: kind must be stages or generic");
  }
  auto p = build_indicial(IndicialFamily::multi, k);
  auto rs = find_roots(p);
  if (!rs.all_simple) throw ConsistencyError("vandermonde: repeated roots make the system singular");
  VandermondeSolution sol;
  sol.roots = rs.roots;
  const Rational hk = harmonic(k + 1) - 1;
  std::vector<Rational> rhs_f(k);
  for (long m = 0; m < k; ++m) {
    Rational inner = A * ((m + 1) * harmonic(m) - m) / hk + (A - B) / k;
    rhs_f[m] = (m % 2 == 0 ? -1 : 1) * Rational(factorial(m)) * inner;
  }
  // Power-basis rows: x^m = sum_i S(m,i) x^(i falling).
  auto S2 = stirling2(k);
  Eigen::MatrixXcd V(k, k);
  Eigen::VectorXcd rhs(k);
  for (long m = 0; m < k; ++m) {
    Rational r = 0;
    for (long i = 0; i <= m; ++i) r += Rational(S2[m][i]) * rhs_f[i];
    rhs(m) = Complex(to_double(r), 0);
    for (long i = 0; i < k; ++i) V(m, i) = std::pow(rs.roots[i], static_cast<double>(m));
  }
  Eigen::VectorXcd s = V.fullPivLu().solve(rhs);
  for (long i = 0; i < k; ++i) sol.constants.push_back(s(i));
  // Defining conditions in the falling basis.
  for (long m = 0; m < k; ++m) {
    Complex lhs = 0;
    for (long i = 0; i < k; ++i) {
      Complex f = 1;
      for (long j = 0; j < m; ++j) f *= rs.roots[i] - static_cast<double>(j);
      lhs += s(i) * f;
    }
    sol.residual = std::max(sol.residual, std::abs(lhs - to_double(rhs_f[m])));
  }
  for (long i = 0; i < k; ++i) {
    Complex num = 1, den = static_cast<double>(k);
    for (long j = 0; j < k; ++j)
      if (j != i) {
        num *= rs.roots[j] + 1.0;
        den *= rs.roots[i] - rs.roots[j];
      }
    sol.product_form.push_back((k % 2 == 1 ? 1.0 : -1.0) * num / den);
  }
  for (long i = 0; i < k; ++i)
    if (std::abs(rs.roots[i] + 2.0) < 1e-8) sol.minus_two_constant = s(i);
  return sol;
}

}  // namespace qslab
