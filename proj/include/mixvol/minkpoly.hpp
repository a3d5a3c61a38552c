#pragma once

// The volume polynomial V(λ) = Vol(λ₁P₁ + ⋯ + λ_kP_k), recovered exactly by
// interpolation on the grid λ = μ + 1 over all exponents μ with |μ| = n.

#include "mixvol/geometry.hpp"
#include "mixvol/linalg.hpp"

#include <map>
#include <thread>

namespace mixvol {

using Exponent = std::vector<int>;

/// All exponent vectors of length k summing to n, in lexicographic order.
inline std::vector<Exponent> compositions(int n, int k) {
  std::vector<Exponent> out;
  if (k <= 0 || n < 0) return out;
  Exponent cur(static_cast<std::size_t>(k), 0);
  auto rec = [&](auto&& self, int i, int left) -> void {
    if (i == k - 1) {
      cur[static_cast<std::size_t>(i)] = left;
      out.push_back(cur);
      return;
    }
    for (int a = left; a >= 0; --a) {
      cur[static_cast<std::size_t>(i)] = a;
      self(self, i + 1, left - a);
    }
  };
  rec(rec, 0, n);
  std::sort(out.begin(), out.end());
  return out;
}

inline Rational monomial(const Vector& lambda, const Exponent& mu) {
  Rational r = 1;
  for (std::size_t i = 0; i < mu.size(); ++i) r *= pow(lambda[i], static_cast<unsigned>(mu[i]));
  return r;
}

inline int total_degree(const Exponent& a) {
  int s = 0;
  for (int x : a) s += x;
  return s;
}

struct MinkowskiPolynomial {
  int n = 0;
  int k = 0;
  std::map<Exponent, Rational> coeffs;  // zero coefficients are not stored

  Rational evaluate(const Vector& lambda) const {
    if (lambda.size() != static_cast<std::size_t>(k)) throw ValidationError("lambda has wrong length");
    Rational s = 0;
    for (const auto& [mu, c] : coeffs) s += c * monomial(lambda, mu);
    return s;
  }

  Rational coefficient(const Exponent& alpha) const {
    if (alpha.size() != static_cast<std::size_t>(k)) throw ValidationError("alpha has wrong length");
    if (std::any_of(alpha.begin(), alpha.end(), [](int a) { return a < 0; }))
      throw ValidationError("alpha has a negative entry");
    if (total_degree(alpha) != n) throw ValidationError("alpha must sum to n");
    auto it = coeffs.find(alpha);
    return it == coeffs.end() ? Rational(0) : it->second;
  }
};

inline Rational coefficient(const MinkowskiPolynomial& v, const Exponent& alpha) { return v.coefficient(alpha); }
inline Rational evaluate(const MinkowskiPolynomial& v, const Vector& lambda) { return v.evaluate(lambda); }

inline Rational evaluate_volume(std::span<const Polytope> polys, const Vector& lambda, const ExactLimits& limits = {}) {
  if (lambda.size() != polys.size()) throw ValidationError("lambda has wrong length");
  for (const auto& l : lambda)
    if (sgn(l) <= 0) throw ValidationError("lambda must be positive");
  return minkowski_sum(polys, std::span<const Rational>(lambda), limits).volume();
}

inline MinkowskiPolynomial interpolate_coefficients(std::span<const Polytope> polys, int workers = 1,
                                                    const ExactLimits& limits = {}) {
  if (polys.empty()) throw ValidationError("no polytopes");
  MinkowskiPolynomial v;
  v.n = static_cast<int>(polys.front().ambient_dim());
  v.k = static_cast<int>(polys.size());
  if (v.n > limits.max_dim) throw ValidationError("exact H-rep unsupported above limit");

  const std::vector<Exponent> monos = compositions(v.n, v.k);
  const std::size_t m = monos.size();
  std::vector<Vector> grid(m);
  for (std::size_t r = 0; r < m; ++r)
    for (int a : monos[r]) grid[r].emplace_back(a + 1);

  std::vector<Rational> values(m);
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t r = begin; r < m; r += stride) values[r] = evaluate_volume(polys, grid[r], limits);
  };
  const std::size_t w = static_cast<std::size_t>(std::clamp(workers, 1, static_cast<int>(m)));
  if (w == 1) {
    work(0, 1);
  } else {
    std::vector<std::exception_ptr> errors(w);
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < w; ++t)
      pool.emplace_back([&, t] {
        try {
          work(t, w);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  Matrix a(m, Vector(m));
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < m; ++c) a[r][c] = monomial(grid[r], monos[c]);
  const auto sol = solve(a, values);
  if (!sol) throw NumericalError("singular interpolation system");
  for (std::size_t c = 0; c < m; ++c) {
    if (sgn((*sol)[c]) < 0) throw NumericalError("negative volume-polynomial coefficient");
    if (sgn((*sol)[c]) != 0) v.coeffs.emplace(monos[c], (*sol)[c]);
  }
  return v;
}

/// c_α together with α!·c_α and c_α / multinomial(n; α).
struct Normalization {
  Rational coefficient;
  Rational derivative_form;
  Rational standard_mixed_volume;
};

inline Normalization convert_normalization(const Rational& c, const Exponent& alpha) {
  Integer alpha_factorial = 1;
  for (int a : alpha) alpha_factorial *= factorial(static_cast<unsigned>(a));
  return {c, c * Rational(alpha_factorial), c / Rational(multinomial(alpha))};
}

/// d_i = largest μ_i over nonzero monomials with μ_j = α_j for all j > i;
/// d_k = deg_{x_k} V. An entry is -1 when no monomial qualifies.
inline std::vector<int> degrees_d(const MinkowskiPolynomial& v, const Exponent& alpha) {
  (void)v.coefficient(alpha);
  std::vector<int> d(static_cast<std::size_t>(v.k), -1);
  for (const auto& [mu, c] : v.coeffs) {
    for (int i = 0; i < v.k; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      bool tail = true;
      if (i < v.k - 1)
        for (int j = i + 1; j < v.k; ++j) tail = tail && mu[static_cast<std::size_t>(j)] == alpha[static_cast<std::size_t>(j)];
      if (tail) d[ui] = std::max(d[ui], mu[ui]);
    }
  }
  return d;
}

/// Indices i with d_i > dim(P_i); empty on every valid volume polynomial.
inline std::vector<int> degree_bound_violations(const std::vector<int>& d, std::span<const Polytope> polys) {
  std::vector<int> bad;
  for (std::size_t i = 0; i < d.size() && i < polys.size(); ++i)
    if (d[i] > polys[i].dim()) bad.push_back(static_cast<int>(i));
  return bad;
}

inline std::string to_string(const Exponent& a) {
  std::string s = "(";
  for (std::size_t i = 0; i < a.size(); ++i) s += (i ? "," : "") + std::to_string(a[i]);
  return s + ")";
}

}  // namespace mixvol
