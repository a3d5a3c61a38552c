#include "mixvol/minkpoly.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace mixvol;
using namespace mixvol::testing;

namespace {

std::vector<Polytope> square_triangle() { return {unit_square(), right_triangle()}; }
std::vector<Polytope> segments() { return {segment_x(), segment_y()}; }

// Polarization over shoelace areas of brute-force hulls:
// V(λ) = a λ₁² + b λ₁λ₂ + c λ₂² with a = |P₁|, c = |P₂|, b = |P₁+P₂| - a - c.
std::array<Rational, 3> planar_pair_oracle(const Polytope& p, const Polytope& q) {
  const Rational a = shoelace_area(brute_force_hull_2d(p.vertices()));
  const Rational c = shoelace_area(brute_force_hull_2d(q.vertices()));
  const Rational s = shoelace_area(brute_force_hull_2d(all_vertex_sums_2d(p.vertices(), q.vertices())));
  return {a, s - a - c, c};
}

}  // namespace

TEST(Compositions, CountsAndOrder) {
  EXPECT_EQ(compositions(2, 2), (std::vector<Exponent>{{0, 2}, {1, 1}, {2, 0}}));
  EXPECT_EQ(compositions(3, 3).size(), 10u);
  EXPECT_EQ(compositions(6, 5).size(), 210u);
}

TEST(EvaluateVolume, Examples) {
  const auto st = square_triangle();
  EXPECT_EQ(evaluate_volume(st, Vector{1, 1}), Rational(7, 2));
  EXPECT_EQ(evaluate_volume(st, Vector{2, 1}), Rational(17, 2));
  const auto seg = segments();
  EXPECT_EQ(evaluate_volume(seg, Vector{Rational(3, 2), 5}), Rational(15, 2));
  EXPECT_THROW(evaluate_volume(st, Vector{0, 1}), ValidationError);
}

TEST(Interpolate, SquareTriangle) {
  const auto v = interpolate_coefficients(square_triangle());
  EXPECT_EQ(v.n, 2);
  EXPECT_EQ(v.k, 2);
  const std::map<Exponent, Rational> expected{{{2, 0}, 1}, {{1, 1}, 2}, {{0, 2}, Rational(1, 2)}};
  EXPECT_EQ(v.coeffs, expected);
  EXPECT_EQ(v.coefficient({1, 1}), 2);
  EXPECT_EQ(v.coefficient({2, 0}), 1);
  EXPECT_THROW(v.coefficient({1, 2}), ValidationError);
  EXPECT_THROW(v.coefficient({1}), ValidationError);
}

TEST(Interpolate, CubeAndSegments) {
  const std::vector<Polytope> cube{unit_cube()};
  const auto vc = interpolate_coefficients(cube);
  EXPECT_EQ(vc.coeffs, (std::map<Exponent, Rational>{{{3}, 1}}));
  const auto vs = interpolate_coefficients(segments());
  EXPECT_EQ(vs.coeffs, (std::map<Exponent, Rational>{{{1, 1}, 1}}));
  EXPECT_EQ(vs.coefficient({2, 0}), 0);
}

TEST(Interpolate, MatchesPolarizationOracleOnRandomPlanarPairs) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 25; ++trial) {
    const auto polys = random_instance(rng, 2, 2, 5, 4);
    const auto oracle = planar_pair_oracle(polys[0], polys[1]);
    const auto v = interpolate_coefficients(polys);
    EXPECT_EQ(v.coefficient({2, 0}), oracle[0]);
    EXPECT_EQ(v.coefficient({1, 1}), oracle[1]);
    EXPECT_EQ(v.coefficient({0, 2}), oracle[2]);
  }
}

TEST(Interpolate, ParallelMatchesSerial) {
  std::mt19937_64 rng(12);
  const auto polys = random_instance(rng, 3, 3, 5, 2);
  EXPECT_EQ(interpolate_coefficients(polys, 4).coeffs, interpolate_coefficients(polys, 1).coeffs);
}

TEST(Interpolate, AgreesWithDirectVolumeAtFreshPoints) {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<long> num(1, 12), den(1, 7);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 2 + trial % 2, k = 2 + (trial / 2) % 2;
    const auto polys = random_instance(rng, n, k, 5, 3);
    const auto v = interpolate_coefficients(polys);
    for (const auto& [mu, c] : v.coeffs) {
      EXPECT_EQ(total_degree(mu), n);
      EXPECT_GT(c, 0);
    }
    EXPECT_EQ(v.evaluate(Vector(static_cast<std::size_t>(k), Rational(1))), minkowski_sum(polys).volume());
    for (int s = 0; s < 10; ++s) {
      Vector lambda;
      for (int i = 0; i < k; ++i) {
        Rational q(num(rng), den(rng));
        q.canonicalize();
        lambda.push_back(q);
      }
      EXPECT_EQ(v.evaluate(lambda), evaluate_volume(polys, lambda));
    }
  }
}

TEST(EvaluateVolume, Homogeneity) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const auto polys = random_instance(rng, 2 + trial % 2, 2, 5, 3);
    const int n = polys[0].ambient_dim();
    const Vector lambda{Rational(3, 2), Rational(2, 5)};
    const Rational t(7, 3);
    EXPECT_EQ(evaluate_volume(polys, t * lambda), pow(t, static_cast<unsigned>(n)) * evaluate_volume(polys, lambda));
  }
}

TEST(EvaluateVolume, MonotoneUnderEnlargement) {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<long> c(-6, 6);
  for (int trial = 0; trial < 10; ++trial) {
    auto polys = random_instance(rng, 2, 2, 4, 3);
    const Vector lambda{2, 3};
    const Rational before = evaluate_volume(polys, lambda);
    auto pts = polys[1].vertices();
    pts.push_back(P({c(rng), c(rng)}));
    polys[1] = convex_hull(pts);
    EXPECT_GE(evaluate_volume(polys, lambda), before);
  }
}

TEST(VolumePolynomial, LogConcaveAlongPositiveLines) {
  // A volume polynomial is log-concave on the positive orthant: V(m)² >= V(a)·V(b) at m = (a+b)/2.
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<long> num(1, 9);
  for (int trial = 0; trial < 8; ++trial) {
    const auto polys = random_instance(rng, 3, 3, 5, 2);
    const auto v = interpolate_coefficients(polys);
    for (int s = 0; s < 10; ++s) {
      Vector a, b;
      for (int i = 0; i < 3; ++i) {
        a.emplace_back(num(rng));
        b.emplace_back(num(rng));
      }
      const Vector m = Rational(1, 2) * (a + b);
      EXPECT_GE(v.evaluate(m) * v.evaluate(m), v.evaluate(a) * v.evaluate(b));
    }
  }
}

TEST(ConvertNormalization, Examples) {
  const auto a = convert_normalization(2, {1, 1});
  EXPECT_EQ(a.coefficient, 2);
  EXPECT_EQ(a.derivative_form, 2);
  EXPECT_EQ(a.standard_mixed_volume, 1);
  const auto b = convert_normalization(Rational(1, 6), {3});
  EXPECT_EQ(b.derivative_form, 1);
  EXPECT_EQ(b.standard_mixed_volume, Rational(1, 6));
  const auto c = convert_normalization(1, {1, 1});
  EXPECT_EQ(c.standard_mixed_volume, Rational(1, 2));
  const auto d = convert_normalization(Rational(1, 2), {0, 2});
  EXPECT_EQ(d.derivative_form, 1);
  EXPECT_EQ(d.standard_mixed_volume, Rational(1, 2));
}

TEST(DegreesD, Examples) {
  EXPECT_EQ(degrees_d(interpolate_coefficients(square_triangle()), {1, 1}), (std::vector<int>{1, 2}));
  EXPECT_EQ(degrees_d(interpolate_coefficients(segments()), {1, 1}), (std::vector<int>{1, 1}));
  const std::vector<Polytope> cube{unit_cube()};
  EXPECT_EQ(degrees_d(interpolate_coefficients(cube), {3}), (std::vector<int>{3}));
  // p = x₁x₂ has no monomial with μ₂ = 0.
  EXPECT_EQ(degrees_d(interpolate_coefficients(segments()), {2, 0}), (std::vector<int>{-1, 1}));
}

TEST(DegreesD, BoundedByDimensionOnRandomInstances) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 2 + trial % 2, k = 2 + (trial / 2) % 2;
    const auto polys = random_instance(rng, n, k, 4, 3);
    const auto v = interpolate_coefficients(polys);
    for (const auto& alpha : compositions(n, k)) {
      EXPECT_TRUE(degree_bound_violations(degrees_d(v, alpha), polys).empty());
    }
  }
}
