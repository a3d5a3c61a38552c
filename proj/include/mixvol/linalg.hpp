#pragma once

// Small dense exact linear algebra over the rationals (row-major matrices).

#include "mixvol/rational.hpp"

#include <optional>
#include <utility>

namespace mixvol {

using Matrix = std::vector<Vector>;

struct RowEchelon {
  Matrix rows;              // nonzero rows of the reduced row echelon form
  std::vector<int> pivots;  // pivot column of each row
};

/// Reduced row echelon form. `cols` is needed when `m` has no rows.
inline RowEchelon reduced_row_echelon(Matrix m, std::size_t cols) {
  RowEchelon out;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < m.size(); ++c) {
    std::size_t piv = r;
    while (piv < m.size() && sgn(m[piv][c]) == 0) ++piv;
    if (piv == m.size()) continue;
    std::swap(m[r], m[piv]);
    const Rational inv = 1 / m[r][c];
    for (std::size_t j = c; j < cols; ++j) m[r][j] *= inv;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == r || sgn(m[i][c]) == 0) continue;
      const Rational f = m[i][c];
      for (std::size_t j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
    }
    out.pivots.push_back(static_cast<int>(c));
    ++r;
  }
  m.resize(r);
  out.rows = std::move(m);
  return out;
}

inline int rank(const Matrix& m, std::size_t cols) {
  return static_cast<int>(reduced_row_echelon(m, cols).pivots.size());
}

/// Basis of { x : m x = 0 }.
inline std::vector<Vector> nullspace(const Matrix& m, std::size_t cols) {
  const RowEchelon e = reduced_row_echelon(m, cols);
  std::vector<bool> is_pivot(cols, false);
  for (int p : e.pivots) is_pivot[static_cast<std::size_t>(p)] = true;
  std::vector<Vector> basis;
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    Vector v = zeros(cols);
    v[f] = 1;
    for (std::size_t r = 0; r < e.rows.size(); ++r) {
      v[static_cast<std::size_t>(e.pivots[r])] = -e.rows[r][f];
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

inline Rational determinant(Matrix m) {
  const std::size_t n = m.size();
  Rational det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && sgn(m[piv][c]) == 0) ++piv;
    if (piv == n) return 0;
    if (piv != c) {
      std::swap(m[piv], m[c]);
      det = -det;
    }
    det *= m[c][c];
    const Rational inv = 1 / m[c][c];
    for (std::size_t i = c + 1; i < n; ++i) {
      if (sgn(m[i][c]) == 0) continue;
      const Rational f = m[i][c] * inv;
      for (std::size_t j = c; j < n; ++j) m[i][j] -= f * m[c][j];
    }
  }
  return det;
}

/// Unique solution of the square system a x = b, or nullopt when singular.
inline std::optional<Vector> solve(const Matrix& a, const Vector& b) {
  const std::size_t n = a.size();
  Matrix aug = a;
  for (std::size_t i = 0; i < n; ++i) aug[i].push_back(b[i]);
  const RowEchelon e = reduced_row_echelon(std::move(aug), n + 1);
  if (e.pivots.size() != n || e.pivots.back() != static_cast<int>(n - 1)) return std::nullopt;
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = e.rows[i][n];
  return x;
}

inline Matrix transpose(const Matrix& m, std::size_t cols) {
  Matrix t(cols, Vector(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) t[j][i] = m[i][j];
  return t;
}

/// Gram determinant det(B B^T) of the rows of b.
inline Rational gram_determinant(const Matrix& b) {
  Matrix g(b.size(), Vector(b.size()));
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) g[i][j] = dot(b[i], b[j]);
  return determinant(std::move(g));
}

/// Positive multiple of v with coprime integer entries (v must be nonzero).
inline Vector primitive_integer(const Vector& v) {
  Integer lcm_den = 1;
  for (const auto& q : v) mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(), q.get_den_mpz_t());
  std::vector<Integer> ints;
  ints.reserve(v.size());
  Integer g = 0;
  for (const auto& q : v) {
    Integer x = q.get_num() * (lcm_den / q.get_den());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
    ints.push_back(std::move(x));
  }
  if (g == 0) throw NumericalError("primitive_integer: zero vector");
  Vector out;
  out.reserve(v.size());
  for (auto& x : ints) out.emplace_back(Integer(x / g));
  return out;
}

}  // namespace mixvol
