#pragma once

// Randomized estimate of the coefficient c_α of the volume polynomial.
//
//   1. λ: near-capacity integer scaling vector.
//   2. V(λ): exact (desk mode) or a rejection estimate (sampled mode).
//   3. N = ⌈3·A·e·ε⁻²·ln(4/δ)⌉ uniform samples z of Σ λᵢPᵢ.
//   4. Each z is split as Σ z⁽ⁱ⁾ by an optimal vertex of the weight LP with
//      objective Σ <xⁱ, z⁽ⁱ⁾> for generic shifts xⁱ; z counts as a hit when the
//      minimal face of λᵢPᵢ containing z⁽ⁱ⁾ has dimension αᵢ for every i.
//   5. Estimate (T/N)·V(λ)/λ^α.

#include "mixvol/capacity.hpp"
#include "mixvol/minkpoly.hpp"
#include "mixvol/sampling.hpp"

#include <chrono>
#include <thread>

namespace mixvol {

struct Instance {
  int n = 0;
  int k = 0;
  std::vector<Polytope> polytopes;
  Exponent alpha;
  int L = 0;
  int m0 = 0;

  /// Validates and derives L (coordinates bounded by 2^L) and m₀ (max vertex count).
  static Instance make(std::vector<Polytope> polys, Exponent alpha) {
    if (polys.empty()) throw ValidationError("instance has no polytopes");
    Instance in;
    in.n = polys.front().ambient_dim();
    in.k = static_cast<int>(polys.size());
    if (in.n < 1) throw ValidationError("ambient dimension must be positive");
    Integer bound = 0;
    for (const auto& p : polys) {
      if (p.ambient_dim() != in.n) throw ValidationError("polytopes live in different dimensions");
      in.m0 = std::max(in.m0, static_cast<int>(p.num_vertices()));
      for (const auto& v : p.vertices())
        for (const auto& c : v) {
          if (!is_integer(c)) throw ValidationError("vertices must be integer points");
          bound = std::max(bound, Integer(abs(c.get_num())));
        }
    }
    while ((Integer(1) << static_cast<mp_bitcnt_t>(in.L)) < bound) ++in.L;
    if (alpha.size() != polys.size()) throw ValidationError("alpha must have one entry per polytope");
    if (std::any_of(alpha.begin(), alpha.end(), [](int a) { return a < 0; }))
      throw ValidationError("alpha entries must be nonnegative");
    if (total_degree(alpha) != in.n) throw ValidationError("alpha must sum to n");
    in.polytopes = std::move(polys);
    in.alpha = std::move(alpha);
    return in;
  }
};

/// N = ⌈3·A·e·ε⁻²·ln(4/δ)⌉.
inline std::uint64_t required_samples(const Rational& A, double eps, double delta) {
  if (!(eps > 0 && eps <= 1)) throw ValidationError("eps must lie in (0, 1]");
  if (!(delta > 0 && delta < 1)) throw ValidationError("delta must lie in (0, 1)");
  if (A < 1) throw ValidationError("A must be at least 1");
  const double n = 3 * to_double(A) * std::numbers::e / (eps * eps) * std::log(4 / delta);
  return static_cast<std::uint64_t>(std::ceil(n));
}

struct Decomposition {
  std::vector<std::vector<Rational>> weights;  // weights[i][j] for vertex j of Pᵢ
  std::vector<Point> parts;
  std::vector<FaceDescriptor> faces;  // minimal face of Pᵢ containing z⁽ⁱ⁾/λᵢ
  std::vector<int> support_dims;      // |{j : w_ij > 0}| - 1
  std::vector<int> face_dims;
  bool unique = true;
  Rational objective;
};

inline Decomposition decompose(const Point& z, std::span<const Polytope> polys, const Vector& lambda,
                               const ShiftVectors& shifts) {
  const std::size_t k = polys.size();
  if (lambda.size() != k || shifts.x.size() != k) throw ValidationError("decompose: length mismatch");
  std::vector<std::vector<Point>> sets;
  for (const auto& p : polys) sets.push_back(p.vertices());
  LinearProgram lp = detail::minkowski_weight_lp(sets, lambda, z, 0);
  std::size_t col = 0;
  for (std::size_t i = 0; i < k; ++i)
    for (const auto& v : sets[i]) lp.objective[col++] = lambda[i] * dot(shifts.x[i], v);
  const LPSolution sol = solve_to_vertex(lp);
  if (sol.status == LPStatus::infeasible) throw ValidationError("z not in Minkowski sum");
  if (sol.status != LPStatus::optimal) throw NumericalError("decomposition LP unbounded");

  Decomposition d;
  // Ties that only reweight vertices inside a fixed part do not change the decomposition.
  for (const auto& e : sol.tied_edges) {
    std::size_t c = 0;
    for (std::size_t i = 0; i < k && d.unique; ++i) {
      Point shift = zeros(z.size());
      for (const auto& v : sets[i]) shift = shift + e[c++] * v;
      if (shift != zeros(z.size())) d.unique = false;
    }
  }
  d.objective = sol.objective_value;
  col = 0;
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<Rational> w;
    Point part = zeros(z.size());
    int support = 0;
    for (const auto& v : sets[i]) {
      const Rational& wij = sol.point[col++];
      if (sgn(wij) != 0) {
        ++support;
        part = part + (wij * lambda[i]) * v;
      }
      w.push_back(wij);
    }
    d.weights.push_back(std::move(w));
    d.faces.push_back(minimal_face(polys[i], (1 / lambda[i]) * part));
    d.face_dims.push_back(d.faces.back().dim);
    d.support_dims.push_back(support - 1);
    d.parts.push_back(std::move(part));
  }
  return d;
}

/// True iff the minimal-face dimensions equal α.
inline bool face_dimension_test(const Decomposition& d, const Exponent& alpha) {
  if (d.face_dims.size() != alpha.size()) throw ValidationError("alpha length mismatch");
  return std::equal(d.face_dims.begin(), d.face_dims.end(), alpha.begin());
}

inline bool support_matches_faces(const Decomposition& d) { return d.support_dims == d.face_dims; }

enum class EstimateMode { exact, sampled };

inline const char* to_string(EstimateMode m) { return m == EstimateMode::exact ? "exact" : "sampled"; }

struct EstimateConfig {
  EstimateMode mode = EstimateMode::exact;
  int d2 = 32;
  int scale_bits = 20;
  int workers = 1;
  std::optional<Vector> fixed_lambda;  // skips the capacity step for λ
  ExactLimits limits;
};

struct EstimateReport {
  int n = 0;
  int k = 0;
  Exponent alpha;
  double eps = 0;
  double delta = 0;
  std::uint64_t seed = 0;
  EstimateConfig config;

  Rational estimate_coefficient;
  Rational estimate_derivative_form;
  Rational estimate_standard;
  std::uint64_t N = 0;
  std::uint64_t T = 0;
  Rational p_hat;
  Vector lambda;
  Rational V_at_lambda;
  bool V_exact = true;
  bool lambda_from_capacity = true;
  double lambda_log_ratio_perturbation = 0;
  std::optional<CapacityResult> capacity;
  std::optional<BoundsReport> bounds;
  ShiftVectors shifts;

  // Diagnostics.
  std::uint64_t sampler_trials = 0;
  std::uint64_t sampler_accepted = 0;
  std::uint64_t rounding_rejections = 0;
  std::uint64_t volume_trials = 0;
  double w1_bound = 0;
  std::uint64_t non_unique = 0;
  std::uint64_t support_mismatch = 0;
  std::uint64_t dimension_violations = 0;
  std::optional<Rational> p_oracle;  // c_α λ^α / V(λ), desk mode only
  double hit_probability_floor = 0;  // 1 / (A e^{ε_cap})
  std::vector<std::string> warnings;
  std::map<std::string, double> timings;
};

namespace detail {

struct WorkerTally {
  std::uint64_t hits = 0;
  std::uint64_t non_unique = 0;
  std::uint64_t support_mismatch = 0;
  std::uint64_t dimension_violations = 0;
  std::uint64_t trials = 0;
  std::uint64_t accepted = 0;
  std::uint64_t rounding_rejections = 0;
};

inline WorkerTally run_worker(const Instance& in, const Vector& lambda, const ShiftVectors& shifts, int d2,
                              const ExactLimits& limits, std::uint64_t count, Rng rng) {
  WorkerTally t;
  MinkowskiSumSampler sampler(in.polytopes, lambda, d2, limits);
  for (std::uint64_t s = 0; s < count; ++s) {
    const Point z = sampler.sample(rng);
    const Decomposition d = decompose(z, in.polytopes, lambda, shifts);
    Point total = zeros(z.size());
    for (const auto& p : d.parts) total = total + p;
    if (total != z) throw NumericalError("decomposition parts do not sum to z");
    int dims = 0;
    for (int f : d.face_dims) dims += f;
    if (dims > in.n) ++t.dimension_violations;
    if (!d.unique) ++t.non_unique;
    if (!support_matches_faces(d)) ++t.support_mismatch;
    if (face_dimension_test(d, in.alpha)) ++t.hits;
  }
  t.trials = sampler.trials();
  t.accepted = sampler.accepted();
  t.rounding_rejections = sampler.rounding_rejections();
  return t;
}

/// Stopping-rule estimate of the acceptance probability (relative error ε w.p. 1 - δ).
inline Rational stopping_rule_probability(MinkowskiSumSampler& s, Rng& rng, double eps, double delta,
                                          std::uint64_t& trials) {
  const double upsilon = 1 + (1 + eps) * 4 * (std::numbers::e - 2) * std::log(2 / delta) / (eps * eps);
  const auto target = static_cast<std::uint64_t>(std::ceil(upsilon));
  std::uint64_t hits = 0;
  trials = 0;
  while (hits < target) {
    ++trials;
    if (s.trial(rng)) ++hits;
    if (trials >= 1'000'000 && hits * 1'000'000 < trials) throw NumericalError("volume estimate: acceptance below 1e-6");
  }
  return Rational(static_cast<unsigned long>(target)) / Rational(static_cast<unsigned long>(trials));
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

inline EstimateReport estimate_mixed_volume(const Instance& in, double eps, double delta, std::uint64_t seed,
                                            const EstimateConfig& cfg = {}) {
  const auto t_start = std::chrono::steady_clock::now();
  if (!(eps > 0 && eps <= 1)) throw ValidationError("eps must lie in (0, 1]");
  if (!(delta > 0 && delta < 1)) throw ValidationError("delta must lie in (0, 1)");
  if (cfg.workers < 1) throw ValidationError("workers must be at least 1");
  if (cfg.d2 < 1) throw ValidationError("D2 must be at least 1");
  EstimateReport r;
  r.n = in.n;
  r.k = in.k;
  r.alpha = in.alpha;
  r.eps = eps;
  r.delta = delta;
  r.seed = seed;
  r.config = cfg;

  if (minkowski_sum_dim(in.polytopes) < in.n) {
    r.warnings.push_back("Minkowski sum is lower-dimensional; mixed volume is 0");
    r.estimate_coefficient = r.estimate_derivative_form = r.estimate_standard = 0;
    r.p_hat = 0;
    r.lambda = Vector(static_cast<std::size_t>(in.k), Rational(1));
    r.V_at_lambda = 0;
    r.timings["total"] = detail::seconds_since(t_start);
    return r;
  }

  // Capacity and constants.
  auto t0 = std::chrono::steady_clock::now();
  const MinkowskiPolynomial v = interpolate_coefficients(in.polytopes, cfg.workers, cfg.limits);
  CapacityOptions copt;
  copt.tol = eps / 4;
  copt.box_radius = search_box_radius(in.n, in.L, in.m0);
  r.capacity = capacity_minimize(v, in.alpha, copt);
  r.bounds = bound_report(v, in.alpha, *r.capacity, in.polytopes);
  if (r.capacity->hit_box) r.warnings.push_back("capacity minimizer reached the search box");
  if (r.capacity->zero_capacity) r.warnings.push_back("alpha lies outside the Newton polytope; capacity is 0");
  if (!r.bounds->all_pass()) r.warnings.push_back("bound report flagged an inconsistency");
  const Rational A = r.bounds->A;
  r.hit_probability_floor = 1 / (to_double(A) * std::exp(copt.tol));
  if (cfg.fixed_lambda) {
    r.lambda = *cfg.fixed_lambda;
    r.lambda_from_capacity = false;
  } else if (r.capacity->zero_capacity) {
    r.lambda = Vector(static_cast<std::size_t>(in.k), Rational(1));
    r.lambda_from_capacity = false;
  } else {
    const ScaledLambda s = integer_lambda(*r.capacity, in.n, cfg.scale_bits);
    r.lambda = s.lambda;
    r.lambda_log_ratio_perturbation = s.log_ratio_perturbation;
  }
  if (r.lambda.size() != static_cast<std::size_t>(in.k)) throw ValidationError("lambda has wrong length");
  r.timings["capacity"] = detail::seconds_since(t0);

  // Volume at λ.
  t0 = std::chrono::steady_clock::now();
  const Rational lambda_alpha = monomial(r.lambda, in.alpha);
  if (cfg.mode == EstimateMode::exact) {
    r.V_at_lambda = evaluate_volume(in.polytopes, r.lambda, cfg.limits);
    r.p_oracle = v.coefficient(in.alpha) * lambda_alpha / r.V_at_lambda;
  } else {
    MinkowskiSumSampler vs(in.polytopes, r.lambda, cfg.d2, cfg.limits);
    Rng vrng(seed, static_cast<std::uint64_t>(cfg.workers) + 1);
    r.V_at_lambda = detail::stopping_rule_probability(vs, vrng, eps, delta / 2, r.volume_trials) * vs.box_volume();
    r.V_exact = false;
    r.warnings.push_back("V(lambda) is a randomized estimate");
  }
  r.timings["volume"] = detail::seconds_since(t0);

  // Sampling loop.
  t0 = std::chrono::steady_clock::now();
  r.N = required_samples(A, eps, delta);
  Rng shift_rng(seed, 0);
  r.shifts = sample_shifts(in.k, in.n, cfg.d2, shift_rng);
  const auto w = static_cast<std::uint64_t>(cfg.workers);
  std::vector<detail::WorkerTally> tallies(w);
  std::vector<std::exception_ptr> errors(w);
  auto job = [&](std::uint64_t i) {
    try {
      const std::uint64_t count = r.N / w + (i < r.N % w ? 1 : 0);
      tallies[i] = detail::run_worker(in, r.lambda, r.shifts, cfg.d2, cfg.limits, count, Rng(seed, i + 1));
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (w == 1) {
    job(0);
  } else {
    std::vector<std::thread> pool;
    for (std::uint64_t i = 0; i < w; ++i) pool.emplace_back(job, i);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  for (const auto& t : tallies) {
    r.T += t.hits;
    r.non_unique += t.non_unique;
    r.support_mismatch += t.support_mismatch;
    r.dimension_violations += t.dimension_violations;
    r.sampler_trials += t.trials;
    r.sampler_accepted += t.accepted;
    r.rounding_rejections += t.rounding_rejections;
  }
  r.timings["sampling"] = detail::seconds_since(t0);
  r.w1_bound = std::sqrt(static_cast<double>(in.n)) * std::ldexp(1.0, -cfg.d2);
  if (r.non_unique > 0) r.warnings.push_back("some decompositions had tied optima; shifts may not be generic");
  if (r.dimension_violations > 0) r.warnings.push_back("face dimensions summed above n");

  r.p_hat = Rational(static_cast<unsigned long>(r.T)) / Rational(static_cast<unsigned long>(r.N));
  r.estimate_coefficient = r.p_hat * r.V_at_lambda / lambda_alpha;
  const Normalization conv = convert_normalization(r.estimate_coefficient, in.alpha);
  r.estimate_derivative_form = conv.derivative_form;
  r.estimate_standard = conv.standard_mixed_volume;
  r.timings["total"] = detail::seconds_since(t_start);
  return r;
}

}  // namespace mixvol
