#pragma once

// Randomness for the estimator.
//
// Generator: std::mt19937_64, seeded with splitmix64(splitmix64(seed) ^ stream_id).
// Only raw 64-bit outputs are used, so draws are reproducible across standard
// libraries. Stream 0 supplies shift vectors; sample workers use streams 1..W.
//
// Uniform points in Σ λᵢPᵢ come from rejection in the integer bounding box.
// Coordinates are drawn on the grid 2^{-(D₂+16)}ℤ, then rounded to 2^{-D₂}ℤ;
// a rounded point that leaves the sum is discarded and redrawn.

#include "mixvol/geometry.hpp"
#include "mixvol/linprog.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace mixvol {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed), stream_(stream_id), engine_(splitmix64(splitmix64(seed) ^ stream_id)) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }
  static constexpr const char* algorithm() { return "mt19937_64/splitmix64"; }

  std::uint64_t bits() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound), by rejection on the bit length of bound.
  Integer below(const Integer& bound) {
    if (sgn(bound) <= 0) throw ValidationError("Rng::below needs a positive bound");
    const std::size_t nbits = mpz_sizeinbase(bound.get_mpz_t(), 2);
    for (;;) {
      Integer r = 0;
      std::size_t have = 0;
      while (have < nbits) {
        const std::size_t take = std::min<std::size_t>(64, nbits - have);
        std::uint64_t w = bits();
        if (take < 64) w &= (std::uint64_t{1} << take) - 1;
        Integer part;
        mpz_import(part.get_mpz_t(), 1, 1, sizeof(w), 0, 0, &w);
        r = (r << static_cast<mp_bitcnt_t>(take)) + part;
        have += take;
      }
      if (r < bound) return r;
    }
  }

  /// Uniform integer in [lo, hi].
  Integer between(const Integer& lo, const Integer& hi) { return lo + below(hi - lo + 1); }

  /// Standard normal by Box-Muller.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0;
    while (u1 == 0) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2 * std::log(u1));
    spare_ = r * std::sin(2 * std::numbers::pi * u2);
    has_spare_ = true;
    return r * std::cos(2 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0;
};

/// Nearest point of 2^{-D₂}ℤⁿ, ties toward -∞.
inline Point grid_round(const Point& y, int d2) {
  if (d2 < 1) throw ValidationError("D2 must be at least 1");
  Point out;
  out.reserve(y.size());
  const Rational scale = pow2(d2);
  for (const auto& c : y) {
    const Rational x = c * scale - Rational(1, 2);
    Integer m;
    mpz_cdiv_q(m.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    out.emplace_back(Rational(m) / scale);
  }
  return out;
}

/// Membership in Σ λᵢPᵢ: H-representation of the sum up to the exact limit, LP above it.
class SumMembership {
 public:
  SumMembership(std::span<const Polytope> polys, const Vector& lambda, const ExactLimits& limits = {})
      : lambda_(lambda) {
    if (polys.empty()) throw ValidationError("no polytopes");
    if (lambda.size() != polys.size()) throw ValidationError("lambda has wrong length");
    for (const auto& p : polys) vertex_sets_.push_back(p.vertices());
    if (polys.front().ambient_dim() <= limits.max_dim) {
      sum_ = minkowski_sum(polys, std::span<const Rational>(lambda), limits);
      exact_ = true;
    }
  }

  bool contains(const Point& z) const {
    if (exact_) return mixvol::contains(sum_, z);
    return in_minkowski_sum(vertex_sets_, lambda_, z);
  }
  bool uses_hrep() const { return exact_; }
  const std::vector<std::vector<Point>>& vertex_sets() const { return vertex_sets_; }
  const Vector& lambda() const { return lambda_; }

 private:
  Vector lambda_;
  std::vector<std::vector<Point>> vertex_sets_;
  Polytope sum_;
  bool exact_ = false;
};

class MinkowskiSumSampler {
 public:
  static constexpr int kFineExtraBits = 16;

  MinkowskiSumSampler(std::span<const Polytope> polys, const Vector& lambda, int d2 = 32, const ExactLimits& limits = {})
      : member_(polys, lambda, limits), d2_(d2) {
    if (d2 < 1) throw ValidationError("D2 must be at least 1");
    for (const auto& l : lambda)
      if (sgn(l) <= 0 || !is_integer(l)) throw ValidationError("lambda must be positive integers");
    const std::size_t n = static_cast<std::size_t>(polys.front().ambient_dim());
    lo_.assign(n, Integer(0));
    hi_.assign(n, Integer(0));
    for (std::size_t i = 0; i < polys.size(); ++i) {
      const Integer l = lambda[i].get_num();
      for (std::size_t j = 0; j < n; ++j) {
        Rational mn = polys[i].vertex(0)[j], mx = mn;
        for (const auto& v : polys[i].vertices()) {
          mn = std::min(mn, v[j]);
          mx = std::max(mx, v[j]);
        }
        if (!is_integer(mn) || !is_integer(mx)) throw ValidationError("sampler needs lattice polytopes");
        lo_[j] += l * mn.get_num();
        hi_[j] += l * mx.get_num();
      }
    }
    fine_ = Integer(1) << static_cast<mp_bitcnt_t>(d2 + kFineExtraBits);
  }

  /// One bounding-box draw on the fine grid.
  Point draw_box(Rng& rng) const {
    Point z;
    for (std::size_t j = 0; j < lo_.size(); ++j) {
      const Integer m = rng.below((hi_[j] - lo_[j]) * fine_ + 1);
      z.emplace_back(Rational(lo_[j]) + ratio(m, fine_));
    }
    return z;
  }

  /// One rejection trial; the fine point is accepted iff it lies in the sum.
  std::optional<Point> trial(Rng& rng) {
    ++trials_;
    Point z = draw_box(rng);
    if (!member_.contains(z)) return std::nullopt;
    ++accepted_;
    return z;
  }

  /// A point of the sum on the 2^{-D₂} grid.
  Point sample(Rng& rng) {
    for (;;) {
      if (trials_ >= kBudgetCheck && static_cast<double>(accepted_) < 1e-6 * static_cast<double>(trials_))
        throw NumericalError("rejection acceptance below 1e-6; use hit-and-run sampling");
      auto fine = trial(rng);
      if (!fine) continue;
      Point z = grid_round(*fine, d2_);
      if (member_.contains(z)) return z;
      ++rounding_rejections_;
    }
  }

  Rational box_volume() const {
    Rational v = 1;
    for (std::size_t j = 0; j < lo_.size(); ++j) v *= Rational(hi_[j] - lo_[j]);
    return v;
  }
  const std::vector<Integer>& box_lo() const { return lo_; }
  const std::vector<Integer>& box_hi() const { return hi_; }
  std::uint64_t trials() const { return trials_; }
  std::uint64_t accepted() const { return accepted_; }
  std::uint64_t rounding_rejections() const { return rounding_rejections_; }
  double acceptance_rate() const { return trials_ ? static_cast<double>(accepted_) / static_cast<double>(trials_) : 0.0; }
  /// W₁ distance bound √n·2^{-D₂} between the rounded law and the uniform law.
  double w1_bound() const { return std::sqrt(static_cast<double>(lo_.size())) * std::ldexp(1.0, -d2_); }
  const SumMembership& membership() const { return member_; }
  int d2() const { return d2_; }

 private:
  static constexpr std::uint64_t kBudgetCheck = 1'000'000;
  SumMembership member_;
  int d2_;
  std::vector<Integer> lo_, hi_;
  Integer fine_;
  std::uint64_t trials_ = 0;
  std::uint64_t accepted_ = 0;
  std::uint64_t rounding_rejections_ = 0;
};

inline Point sample_uniform(std::span<const Polytope> polys, const Vector& lambda, Rng& rng, int d2 = 32) {
  MinkowskiSumSampler s(polys, lambda, d2);
  return s.sample(rng);
}

struct ShiftVectors {
  std::vector<Vector> x;
  int d2 = 0;
};

/// x¹..x^{k-1} uniform on 2^{-D₂}ℤⁿ ∩ [-1,1]ⁿ and x^k = -Σ xⁱ, redrawn until x^k ∈ [-1,1]ⁿ.
inline ShiftVectors sample_shifts(int k, int n, int d2, Rng& rng) {
  if (k < 1 || n < 1) throw ValidationError("sample_shifts needs k, n >= 1");
  if (d2 < 1) throw ValidationError("D2 must be at least 1");
  const Integer g = Integer(1) << static_cast<mp_bitcnt_t>(d2);
  ShiftVectors s;
  s.d2 = d2;
  for (;;) {
    s.x.assign(static_cast<std::size_t>(k), zeros(static_cast<std::size_t>(n)));
    Vector last = zeros(static_cast<std::size_t>(n));
    for (int i = 0; i + 1 < k; ++i) {
      for (int j = 0; j < n; ++j) {
        const Rational c = ratio(rng.between(-g, g), g);
        s.x[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = c;
        last[static_cast<std::size_t>(j)] -= c;
      }
    }
    if (std::all_of(last.begin(), last.end(), [](const Rational& c) { return abs(c) <= 1; })) {
      s.x.back() = last;
      return s;
    }
  }
}

/// Hit-and-run walk started at an interior point. Directions are Gaussian
/// rounded to 2^{-20}ℤⁿ, chord positions uniform on a 2^{-40} subdivision of
/// the chord, and iterates are kept on the 2^{-(D₂+16)} grid. Not certified uniform.
inline Point hit_and_run(std::span<const Polytope> polys, const Vector& lambda, const Point& z0, int steps, Rng& rng,
                         int d2 = 32) {
  if (steps < 0) throw ValidationError("steps must be nonnegative");
  if (steps == 0) return z0;
  const SumMembership member(polys, lambda);
  const auto& sets = member.vertex_sets();
  const std::size_t n = z0.size();
  const int fine = d2 + MinkowskiSumSampler::kFineExtraBits;
  const Integer t_den = Integer(1) << 40;
  Point z = z0;
  bool first = true;
  for (int s = 0; s < steps; ++s) {
    Vector d;
    for (;;) {
      d.clear();
      for (std::size_t j = 0; j < n; ++j) {
        Rational c = from_double(std::round(rng.normal() * 1048576.0)) / 1048576;
        d.push_back(c);
      }
      if (std::any_of(d.begin(), d.end(), [](const Rational& c) { return sgn(c) != 0; })) break;
    }
    const Chord chord = chord_extent(sets, lambda, z, d);
    if (chord.t_min == chord.t_max) {
      if (first) throw NumericalError("degenerate chord: hit-and-run must start in the interior");
      continue;
    }
    first = false;
    for (int attempt = 0; attempt < 16; ++attempt) {
      const Rational t = chord.t_min + (chord.t_max - chord.t_min) * ratio(rng.below(t_den + 1), t_den);
      Point next = grid_round(z + t * d, fine);
      if (member.contains(next)) {
        z = std::move(next);
        break;
      }
    }
  }
  return z;
}

}  // namespace mixvol
