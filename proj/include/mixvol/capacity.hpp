#pragma once

// Capacity Cap_α(V) = inf_{λ>0} V(λ)/λ^α and the constants that bound c_α
// against it.
//
// In log coordinates g(y) = log Σ_μ c_μ e^{<μ-α, y>} is convex. Only the
// monomials on the face F of the Newton polytope that contains α in its
// relative interior matter for the infimum; restricted to the directions of F
// the problem is strictly convex with an interior minimizer, which is found by
// damped Newton steps. The result is certified from below by the entropy dual
//   inf g >= Σ_μ q_μ log(c_μ / q_μ)   for q >= 0, Σ q = 1, Σ q_μ μ = α,
// with q the Newton weights at the optimum projected exactly onto that set.

#include "mixvol/minkpoly.hpp"

#include <cmath>
#include <numbers>

namespace mixvol {

struct CapacityOptions {
  double tol = 1e-9;       // target for log(value at y*) - log Cap
  int max_iter = 200;
  double box_radius = 0;   // reported only; 0 disables the check
};

struct CapacityResult {
  Exponent alpha;
  std::vector<double> y_star;  // y_k pinned to 0
  Vector lambda_real;          // e^{y*} as exact binary rationals
  double cap_value = 0;        // V(e^{y*}) / e^{<α,y*>}
  Rational cap_upper;          // exact ratio at lambda_real
  double cap_lower = 0;        // entropy-dual lower bound
  double certified_gap = 0;    // log(cap_value) - log(cap_lower)
  double infimum_estimate = 0; // value of the face-restricted minimum
  bool zero_capacity = false;  // α outside the Newton polytope
  int newton_face_dim = 0;
  bool hit_box = false;
  double box_radius = 0;
  std::vector<double> trajectory;  // g along the iterates
  int iterations = 0;
};

/// ‖y‖_∞ bound 64·n²·(log₂ n + n·L + log₂ m₀ + 1).
inline double search_box_radius(int n, int L, int m0) {
  return 64.0 * n * n * (std::log2(std::max(n, 1)) + n * L + std::log2(std::max(m0, 1)) + 1);
}

namespace detail {

inline double log_rational(const Rational& q) {
  long en = 0, ed = 0;
  const double mn = mpz_get_d_2exp(&en, q.get_num_mpz_t());
  const double md = mpz_get_d_2exp(&ed, q.get_den_mpz_t());
  return std::log(mn) - std::log(md) + static_cast<double>(en - ed) * std::numbers::ln2;
}

inline double log_sum_exp(const std::vector<double>& xs) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : xs) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

// Solves a small symmetric system by Gaussian elimination with partial pivoting.
inline std::optional<std::vector<double>> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    if (std::abs(a[p][c]) < 1e-300) return std::nullopt;
    std::swap(a[p], a[c]);
    std::swap(b[p], b[c]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t j = c; j < n; ++j) a[r][j] -= f * a[c][j];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t c = n; c-- > 0;) {
    double s = b[c];
    for (std::size_t j = c + 1; j < n; ++j) s -= a[c][j] * x[j];
    x[c] = s / a[c][c];
  }
  return x;
}

struct LogTerm {
  double log_c;
  std::vector<double> e;  // exponent in the reduced coordinates
};

inline double eval_terms(const std::vector<LogTerm>& terms, const std::vector<double>& u) {
  std::vector<double> xs;
  xs.reserve(terms.size());
  for (const auto& t : terms) {
    double s = t.log_c;
    for (std::size_t j = 0; j < u.size(); ++j) s += t.e[j] * u[j];
    xs.push_back(s);
  }
  return log_sum_exp(xs);
}

// Entropy-dual bound: q is moved onto {q >= 0, Σq = 1, Σ q_μ μ = α} by an
// exact L1 projection, then Σ q log(c/q) is evaluated.
inline double entropy_lower_bound(const std::vector<Exponent>& mus, const std::vector<Rational>& cs,
                                  const std::vector<double>& q, const Exponent& alpha) {
  const std::size_t m = mus.size(), k = alpha.size();
  LinearProgram lp(3 * m);
  for (std::size_t j = m; j < 3 * m; ++j) lp.objective[j] = -1;
  Vector ones = zeros(3 * m);
  for (std::size_t j = 0; j < m; ++j) ones[j] = 1;
  lp.add_equality(ones, 1);
  for (std::size_t i = 0; i < k; ++i) {
    Vector row = zeros(3 * m);
    for (std::size_t j = 0; j < m; ++j) row[j] = mus[j][i];
    lp.add_equality(row, alpha[i]);
  }
  for (std::size_t j = 0; j < m; ++j) {
    Vector row = zeros(3 * m);
    row[j] = 1;
    row[m + j] = -1;
    row[2 * m + j] = 1;
    Rational qj(static_cast<long>(std::llround(std::clamp(q[j], 0.0, 1.0) * 1099511627776.0)), 1099511627776UL);
    qj.canonicalize();
    lp.add_equality(row, qj);
  }
  const LPSolution sol = solve_to_vertex(lp);
  if (sol.status != LPStatus::optimal) throw NumericalError("capacity certificate LP failed");
  double lb = 0;
  for (std::size_t j = 0; j < m; ++j) {
    const Rational& qj = sol.point[j];
    if (sgn(qj) == 0) continue;
    lb += to_double(qj) * (log_rational(cs[j]) - log_rational(qj));
  }
  return lb;
}

}  // namespace detail

inline CapacityResult capacity_minimize(const MinkowskiPolynomial& v, const Exponent& alpha,
                                        const CapacityOptions& opt = {}) {
  if (!(opt.tol > 0)) throw ValidationError("capacity tolerance must be positive");
  (void)v.coefficient(alpha);
  const std::size_t k = static_cast<std::size_t>(v.k);
  CapacityResult res;
  res.alpha = alpha;
  res.box_radius = opt.box_radius;

  auto mark_zero = [&] {
    res.zero_capacity = true;
    res.y_star.assign(k, 0.0);
    res.lambda_real = Vector(k, Rational(1));
    res.cap_upper = 0;
    return res;
  };
  if (v.coeffs.empty()) return mark_zero();

  Point a_pt;
  for (int a : alpha) a_pt.emplace_back(a);
  std::vector<Point> supp;
  for (const auto& [mu, c] : v.coeffs) {
    Point p;
    for (int x : mu) p.emplace_back(x);
    supp.push_back(std::move(p));
  }
  const Polytope newton = convex_hull(supp, ExactLimits{std::max(kDefaultExactDimLimit, v.k)});
  if (!contains(newton, a_pt)) return mark_zero();

  std::vector<const Facet*> tight;
  for (const auto& f : newton.hrep().inequalities)
    if (dot(f.normal, a_pt) == f.offset) tight.push_back(&f);

  std::vector<Exponent> face_mus;
  std::vector<Rational> face_cs;
  std::vector<std::pair<const Exponent*, const Rational*>> outside;
  std::size_t idx = 0;
  for (const auto& [mu, c] : v.coeffs) {
    const Point& p = supp[idx++];
    const bool on = std::all_of(tight.begin(), tight.end(), [&](const Facet* f) { return dot(f->normal, p) == f->offset; });
    if (on) {
      face_mus.push_back(mu);
      face_cs.push_back(c);
    } else {
      outside.emplace_back(&mu, &c);
    }
  }

  Matrix diffs;
  for (const auto& mu : face_mus) {
    Vector d;
    for (std::size_t i = 0; i < k; ++i) d.emplace_back(mu[i] - alpha[i]);
    diffs.push_back(std::move(d));
  }
  const Matrix basis = reduced_row_echelon(diffs, k).rows;
  const std::size_t r = basis.size();
  res.newton_face_dim = static_cast<int>(r);

  std::vector<detail::LogTerm> terms;
  for (std::size_t j = 0; j < face_mus.size(); ++j) {
    detail::LogTerm t{detail::log_rational(face_cs[j]), std::vector<double>(r, 0.0)};
    for (std::size_t b = 0; b < r; ++b) t.e[b] = to_double(dot(basis[b], diffs[j]));
    terms.push_back(std::move(t));
  }

  // Damped Newton on h(u) = log Σ_F c_μ e^{<B(μ-α), u>}.
  std::vector<double> u(r, 0.0);
  double h = detail::eval_terms(terms, u);
  res.trajectory.push_back(h);
  std::vector<double> weights(terms.size());
  auto derivatives = [&](std::vector<double>& grad, std::vector<std::vector<double>>& hess) {
    std::vector<double> xs;
    for (const auto& t : terms) {
      double s = t.log_c;
      for (std::size_t j = 0; j < r; ++j) s += t.e[j] * u[j];
      xs.push_back(s);
    }
    const double lse = detail::log_sum_exp(xs);
    grad.assign(r, 0.0);
    hess.assign(r, std::vector<double>(r, 0.0));
    for (std::size_t m = 0; m < terms.size(); ++m) {
      weights[m] = std::exp(xs[m] - lse);
      for (std::size_t a = 0; a < r; ++a) {
        grad[a] += weights[m] * terms[m].e[a];
        for (std::size_t b = 0; b < r; ++b) hess[a][b] += weights[m] * terms[m].e[a] * terms[m].e[b];
      }
    }
    for (std::size_t a = 0; a < r; ++a)
      for (std::size_t b = 0; b < r; ++b) hess[a][b] -= grad[a] * grad[b];
  };

  std::vector<double> grad;
  std::vector<std::vector<double>> hess;
  bool converged = (r == 0);
  if (r == 0) std::fill(weights.begin(), weights.end(), 1.0);
  for (int it = 0; it < opt.max_iter && !converged; ++it) {
    derivatives(grad, hess);
    std::vector<double> dir;
    std::vector<double> neg(r);
    for (std::size_t a = 0; a < r; ++a) neg[a] = -grad[a];
    if (auto nd = detail::solve_dense(hess, neg)) dir = *nd;
    double slope = 0;
    for (std::size_t a = 0; a < r; ++a) slope += grad[a] * (dir.empty() ? 0.0 : dir[a]);
    if (dir.empty() || !(slope < 0)) {
      dir = neg;
      slope = 0;
      for (double g : grad) slope -= g * g;
    }
    if (-slope < 1e-24) {
      converged = true;
      break;
    }
    double step = 1;
    std::vector<double> trial(r);
    double ht = h;
    for (int bt = 0; bt < 80; ++bt) {
      for (std::size_t a = 0; a < r; ++a) trial[a] = u[a] + step * dir[a];
      ht = detail::eval_terms(terms, trial);
      if (ht <= h + 1e-4 * step * slope) break;
      step /= 2;
    }
    if (!(ht <= h)) {
      converged = -slope < 1e-16;
      break;
    }
    u = trial;
    h = ht;
    res.trajectory.push_back(h);
    res.iterations = it + 1;
  }
  if (r > 0) derivatives(grad, hess);
  res.infimum_estimate = h;

  // y = Bᵀu, then pushed along the face normal until the monomials off the face are negligible.
  std::vector<double> y(k, 0.0);
  for (std::size_t b = 0; b < r; ++b)
    for (std::size_t i = 0; i < k; ++i) y[i] += to_double(basis[b][i]) * u[b];
  std::vector<double> normal(k, 0.0);
  for (const Facet* f : tight)
    for (std::size_t i = 0; i < k; ++i) normal[i] += to_double(f->normal[i]);

  auto full_g = [&](const std::vector<double>& yy) {
    std::vector<double> xs;
    for (const auto& [mu, c] : v.coeffs) {
      double s = detail::log_rational(c);
      for (std::size_t i = 0; i < k; ++i) s += (mu[i] - alpha[i]) * yy[i];
      xs.push_back(s);
    }
    return detail::log_sum_exp(xs);
  };
  std::vector<double> y_final = y;
  if (!outside.empty()) {
    const double limit = opt.box_radius > 0 ? opt.box_radius : 1e4;
    for (double s = 1;; s *= 2) {
      for (std::size_t i = 0; i < k; ++i) y_final[i] = y[i] + s * normal[i];
      if (full_g(y_final) - h <= opt.tol / 10) break;
      if (s > limit) {
        res.hit_box = true;
        break;
      }
    }
  }
  const double pin = y_final[k - 1];
  for (auto& yi : y_final) yi -= pin;
  if (opt.box_radius > 0)
    for (double yi : y_final) res.hit_box = res.hit_box || std::abs(yi) > opt.box_radius;

  res.y_star = y_final;
  for (double yi : y_final) res.lambda_real.push_back(from_double(std::exp(yi)));
  res.cap_upper = v.evaluate(res.lambda_real) / monomial(res.lambda_real, alpha);
  res.cap_value = std::exp(full_g(y_final));

  const double lb = detail::entropy_lower_bound(face_mus, face_cs, weights, alpha);
  res.cap_lower = std::exp(lb);
  const double slack = 64 * std::numeric_limits<double>::epsilon() * (std::abs(lb) + std::abs(h) + 1);
  res.certified_gap = std::max(0.0, std::log(res.cap_value) - lb) + slack;
  if (res.certified_gap > opt.tol)
    throw NumericalError("capacity did not reach tolerance: gap " + std::to_string(res.certified_gap) +
                         " at log value " + std::to_string(h));
  return res;
}

/// λ_i = round(2^bits · e^{y_i} / min_j e^{y_j}), with the bound n·k·2^{1-bits} on the
/// change of log V(λ)/λ^α caused by the rounding.
struct ScaledLambda {
  Vector lambda;
  int scale_bits = 0;
  double log_ratio_perturbation = 0;
};

inline ScaledLambda integer_lambda(const CapacityResult& cap, int n, int scale_bits = 20) {
  if (scale_bits < 1) throw ValidationError("scale_bits must be at least 1");
  ScaledLambda out;
  out.scale_bits = scale_bits;
  const std::size_t k = cap.y_star.size();
  out.log_ratio_perturbation = static_cast<double>(n) * static_cast<double>(k) * std::ldexp(1.0, 1 - scale_bits);
  const double lo = *std::min_element(cap.y_star.begin(), cap.y_star.end());
  for (double yi : cap.y_star) {
    const double x = std::ldexp(std::exp(yi - lo), scale_bits);
    if (!std::isfinite(x)) throw NumericalError("scaling vector overflows");
    Integer z;
    mpz_set_d(z.get_mpz_t(), std::floor(x + 0.5));
    out.lambda.emplace_back(z);
  }
  return out;
}

namespace detail {

// (a+1)^{a+1} / a^a with 0^0 = 1.
inline Rational pair_factor(int a) {
  return pow(Rational(a + 1), static_cast<unsigned>(a + 1)) / pow(Rational(a), static_cast<unsigned>(a));
}

}  // namespace detail

inline Rational constant_A(const std::vector<int>& d, const Exponent& alpha) {
  if (d.size() != alpha.size()) throw ValidationError("d and alpha lengths differ");
  Rational a = 1;
  for (std::size_t i = 1; i < alpha.size(); ++i) {
    Rational f = detail::pair_factor(alpha[i]);
    if (d[i] >= alpha[i]) f = std::min(f, detail::pair_factor(d[i] - alpha[i]));
    a *= f;
  }
  return a;
}

inline Rational constant_Atilde(const Exponent& alpha) {
  Rational a = 1;
  for (std::size_t i = 1; i < alpha.size(); ++i) a *= detail::pair_factor(alpha[i]);
  return a;
}

inline double a_upper_bound(int n, int k) {
  if (k <= 1) return 1;
  return std::pow(std::numbers::e * (n + k - 1) / (k - 1), k - 1);
}

/// inf_{x,y>0} (Σ_{j=0}^{d} x^j y^{d-j}) / (x^{d-a} y^a).
inline double cap_pair(int d, int a) {
  if (a < 0 || a > d) throw ValidationError("cap_pair needs 0 <= alpha <= d");
  if (a == 0 || a == d) return 1;
  // φ(s) = log Σ_j e^{(j-(d-a)) s} is convex with φ'(-∞) < 0 < φ'(∞).
  auto phi = [&](double s) {
    std::vector<double> xs;
    for (int j = 0; j <= d; ++j) xs.push_back((j - (d - a)) * s);
    return detail::log_sum_exp(xs);
  };
  auto dphi = [&](double s) {
    const double base = phi(s);
    double m = 0;
    for (int j = 0; j <= d; ++j) m += (j - (d - a)) * std::exp((j - (d - a)) * s - base);
    return m;
  };
  double lo = -1, hi = 1;
  while (dphi(lo) > 0) lo *= 2;
  while (dphi(hi) < 0) hi *= 2;
  for (int it = 0; it < 200; ++it) {
    const double mid = (lo + hi) / 2;
    (dphi(mid) < 0 ? lo : hi) = mid;
  }
  return std::exp(phi((lo + hi) / 2));
}

struct BoundsReport {
  Exponent alpha;
  std::vector<int> d;
  Rational A;
  Rational A_tilde;
  double a_upper = 1;
  Rational coefficient;
  Rational derivative_form;
  double cap = 0;
  double certified_gap = 0;
  double blp_low = 0;     // Cap / A
  double blp_middle = 0;  // Cap / Π cap_pair(d_i, α_i)
  bool has_gurvits = false;
  double gurvits_low = 0;  // n!/nⁿ · Cap
  double gurvits_high = 0; // Cap
  std::vector<int> degree_violations;
  bool constants_pass = false;
  bool blp_pass = false;
  bool gurvits_pass = true;
  bool degree_pass = true;

  bool all_pass() const { return constants_pass && blp_pass && gurvits_pass && degree_pass; }
};

inline BoundsReport bound_report(const MinkowskiPolynomial& v, const Exponent& alpha, const CapacityResult& cap,
                                 std::span<const Polytope> polys = {}) {
  BoundsReport b;
  b.alpha = alpha;
  b.d = degrees_d(v, alpha);
  b.A = constant_A(b.d, alpha);
  b.A_tilde = constant_Atilde(alpha);
  b.a_upper = a_upper_bound(v.n, v.k);
  b.coefficient = v.coefficient(alpha);
  b.derivative_form = convert_normalization(b.coefficient, alpha).derivative_form;
  b.cap = cap.zero_capacity ? 0.0 : cap.cap_value;
  b.certified_gap = cap.certified_gap;

  const double rel = 1e-12;
  const double c = to_double(b.coefficient);
  const double c_hi = c * std::exp(b.certified_gap) * (1 + rel);
  b.constants_pass = b.A <= b.A_tilde && to_double(b.A) <= b.a_upper * (1 + rel);

  b.blp_low = b.cap / to_double(b.A);
  double pair_product = 1;
  bool pairs_defined = true;
  for (std::size_t i = 1; i < alpha.size(); ++i) {
    if (b.d[i] < alpha[i]) {
      pairs_defined = false;
      break;
    }
    pair_product *= cap_pair(b.d[i], alpha[i]);
  }
  b.blp_middle = pairs_defined ? b.cap / pair_product : b.blp_low;
  if (cap.zero_capacity) {
    b.blp_pass = sgn(b.coefficient) == 0;
  } else {
    b.blp_pass = pairs_defined && b.blp_low <= b.blp_middle * (1 + rel) && b.blp_middle <= c_hi &&
                 c <= b.cap * (1 + rel);
  }

  b.has_gurvits = v.k == v.n && std::all_of(alpha.begin(), alpha.end(), [](int a) { return a == 1; });
  if (b.has_gurvits) {
    b.gurvits_low = to_double(Rational(factorial(static_cast<unsigned>(v.n))) / pow(Rational(v.n), static_cast<unsigned>(v.n))) * b.cap;
    b.gurvits_high = b.cap;
    const double df = to_double(b.derivative_form);
    b.gurvits_pass = b.gurvits_low <= df * std::exp(b.certified_gap) * (1 + rel) && df <= b.gurvits_high * (1 + rel);
  }
  if (!polys.empty()) {
    b.degree_violations = degree_bound_violations(b.d, polys);
    b.degree_pass = b.degree_violations.empty();
  }
  return b;
}

/// Throws when a proven bound fails, which can only mean a bug.
inline void require_bounds(const BoundsReport& b) {
  if (!b.constants_pass) throw NumericalError("inconsistent constants: A <= A_tilde <= a_upper violated");
  if (!b.blp_pass) throw NumericalError("inconsistent bounds: Cap/A <= c_alpha <= Cap violated");
  if (!b.gurvits_pass) throw NumericalError("inconsistent bounds: Gurvits sandwich violated");
  if (!b.degree_pass) throw NumericalError("inconsistent degrees: d_i > dim(P_i)");
}

}  // namespace mixvol
