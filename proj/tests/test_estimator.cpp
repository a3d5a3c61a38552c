#include "mixvol/estimator.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace mixvol;
using namespace mixvol::testing;

namespace {

Instance square_triangle(Exponent alpha = {1, 1}) { return Instance::make({unit_square(), right_triangle()}, alpha); }

ShiftVectors fixed_shifts() {
  const Vector x{Rational(1, 3), Rational(1, 7)};
  return {{x, Rational(-1) * x}, 32};
}

}  // namespace

TEST(Instance, DerivesBoundsAndValidates) {
  const Instance in = Instance::make({convex_hull({P({0, 0}), P({5, 0}), P({0, -3})}), unit_square()}, {1, 1});
  EXPECT_EQ(in.L, 3);
  EXPECT_EQ(in.m0, 4);
  EXPECT_THROW(Instance::make({unit_square(), right_triangle()}, {2, 1}), ValidationError);
  EXPECT_THROW(Instance::make({unit_square(), right_triangle()}, {1}), ValidationError);
  EXPECT_THROW(Instance::make({unit_square(), unit_cube()}, {1, 1}), ValidationError);
  EXPECT_THROW(Instance::make({convex_hull({Point{Rational(1, 2), 0}, P({1, 1})})}, {2}), ValidationError);
}

TEST(RequiredSamples, Examples) {
  EXPECT_EQ(required_samples(4, 0.1, 0.05), 14294u);
  EXPECT_EQ(required_samples(1, 1, 0.5), 17u);
  EXPECT_THROW(required_samples(1, 0, 0.5), ValidationError);
  EXPECT_THROW(required_samples(1, 0.5, 1), ValidationError);
  EXPECT_THROW(required_samples(Rational(1, 2), 0.5, 0.5), ValidationError);
}

TEST(Decompose, VertexOfSum) {
  const Instance in = square_triangle();
  const auto d = decompose(P({0, 0}), in.polytopes, Vector{1, 1}, fixed_shifts());
  EXPECT_EQ(d.parts, (std::vector<Point>{P({0, 0}), P({0, 0})}));
  EXPECT_EQ(d.face_dims, (std::vector<int>{0, 0}));
  EXPECT_EQ(d.support_dims, (std::vector<int>{0, 0}));
}

TEST(Decompose, RightEdgeSaturation) {
  const Instance in = square_triangle();
  const auto d = decompose(Point{2, Rational(1, 2)}, in.polytopes, Vector{1, 1}, fixed_shifts());
  EXPECT_EQ(d.parts[1], P({1, 0}));
  EXPECT_EQ(d.parts[0], (Point{1, Rational(1, 2)}));
  EXPECT_EQ(d.face_dims, (std::vector<int>{1, 0}));
  for (const auto& w : d.weights) {
    Rational s = 0;
    for (const auto& x : w) s += x;
    EXPECT_EQ(s, 1);
  }
}

TEST(Decompose, OutsidePointIsRejected) {
  const Instance in = square_triangle();
  EXPECT_THROW(decompose(P({2, 2}), in.polytopes, Vector{1, 1}, fixed_shifts()), ValidationError);
}

TEST(Decompose, InvariantsOnRandomSamples) {
  std::mt19937_64 gen(8);
  Rng rng(3, 1);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 2 + trial % 2, k = 2 + (trial / 2) % 2;
    const auto polys = random_instance(gen, n, k, 5, 2);
    const Vector lambda(static_cast<std::size_t>(k), Rational(2));
    Rng srng(trial, 0);
    const auto shifts = sample_shifts(k, n, 32, srng);
    MinkowskiSumSampler sampler(polys, lambda, 32);
    for (int s = 0; s < 100; ++s) {
      const Point z = sampler.sample(rng);
      const auto d = decompose(z, polys, lambda, shifts);
      Point total = zeros(static_cast<std::size_t>(n));
      int dims = 0;
      for (std::size_t i = 0; i < d.parts.size(); ++i) {
        total = total + d.parts[i];
        dims += d.face_dims[i];
        EXPECT_TRUE(contains(polys[i], (1 / lambda[i]) * d.parts[i]));
      }
      EXPECT_EQ(total, z);
      EXPECT_LE(dims, n);
    }
  }
}

TEST(FaceDimensionTest, Examples) {
  Decomposition d;
  d.face_dims = {1, 1};
  EXPECT_TRUE(face_dimension_test(d, {1, 1}));
  d.face_dims = {2, 0};
  EXPECT_FALSE(face_dimension_test(d, {1, 1}));
  EXPECT_THROW(face_dimension_test(d, {2}), ValidationError);
}

TEST(Estimate, SegmentsAreExact) {
  const Instance in = Instance::make({segment_x(), segment_y()}, {1, 1});
  const auto r = estimate_mixed_volume(in, 0.1, 0.05, 42);
  EXPECT_EQ(r.p_hat, 1);
  EXPECT_EQ(r.T, r.N);
  EXPECT_EQ(r.estimate_coefficient, 1);
  EXPECT_EQ(r.estimate_derivative_form, 1);
  EXPECT_EQ(r.estimate_standard, Rational(1, 2));
}

TEST(Estimate, SingleCube) {
  const Instance in = Instance::make({unit_cube()}, {3});
  const auto r = estimate_mixed_volume(in, 0.5, 0.1, 1);
  EXPECT_EQ(r.p_hat, 1);
  EXPECT_EQ(r.estimate_coefficient, 1);
  EXPECT_EQ(r.estimate_derivative_form, 6);
}

TEST(Estimate, DegenerateSumIsZero) {
  const Instance in = Instance::make({segment_x(), convex_hull({P({0, 0}), P({3, 0})})}, {1, 1});
  const auto r = estimate_mixed_volume(in, 0.1, 0.05, 42);
  EXPECT_EQ(r.estimate_coefficient, 0);
  ASSERT_FALSE(r.warnings.empty());
  EXPECT_NE(r.warnings.front().find("lower-dimensional"), std::string::npos);
}

TEST(Estimate, SquareTriangleNearTwo) {
  const auto r = estimate_mixed_volume(square_triangle(), 0.1, 0.05, 42);
  EXPECT_EQ(r.N, 14294u);
  EXPECT_EQ(r.lambda, (Vector{1048576, 1482910}));
  EXPECT_GE(r.estimate_coefficient, Rational(18, 10));
  EXPECT_LE(r.estimate_coefficient, Rational(22, 10));
  EXPECT_EQ(r.dimension_violations, 0u);
  EXPECT_EQ(r.non_unique, 0u);
  ASSERT_TRUE(r.p_oracle.has_value());
  EXPECT_GE(to_double(*r.p_oracle), r.hit_probability_floor);
  EXPECT_EQ(r.estimate_coefficient, r.p_hat * r.V_at_lambda / monomial(r.lambda, {1, 1}));
}

TEST(Estimate, ReproducibleAndWorkerCountRecorded) {
  EstimateConfig cfg;
  cfg.workers = 3;
  const auto a = estimate_mixed_volume(square_triangle(), 0.5, 0.2, 9, cfg);
  const auto b = estimate_mixed_volume(square_triangle(), 0.5, 0.2, 9, cfg);
  EXPECT_EQ(a.T, b.T);
  EXPECT_EQ(a.estimate_coefficient, b.estimate_coefficient);
  EXPECT_EQ(a.config.workers, 3);
}

TEST(Estimate, UnbiasedAtFixedLambda) {
  // λ = (1,1): p = c_α / V = 2 / (7/2) = 4/7 and the estimate is (T/N)·7/2.
  EstimateConfig cfg;
  cfg.fixed_lambda = Vector{1, 1};
  const int runs = 50;
  std::vector<double> est;
  for (int s = 0; s < runs; ++s) est.push_back(to_double(estimate_mixed_volume(square_triangle(), 0.5, 0.2, 1000 + s, cfg).estimate_coefficient));
  double mean = 0, var = 0;
  for (double e : est) mean += e;
  mean /= runs;
  for (double e : est) var += (e - mean) * (e - mean);
  var /= runs - 1;
  EXPECT_NEAR(mean, 2.0, 3 * std::sqrt(var / runs));
}

TEST(Estimate, SampledModeEstimatesVolume) {
  EstimateConfig cfg;
  cfg.mode = EstimateMode::sampled;
  cfg.fixed_lambda = Vector{1, 1};
  const auto r = estimate_mixed_volume(square_triangle(), 0.2, 0.1, 5, cfg);
  EXPECT_FALSE(r.V_exact);
  EXPECT_NEAR(to_double(r.V_at_lambda), 3.5, 3.5 * 0.2);
  EXPECT_GT(r.volume_trials, 0u);
}

TEST(Estimate, RejectsBadParameters) {
  EXPECT_THROW(estimate_mixed_volume(square_triangle(), 0, 0.1, 1), ValidationError);
  EXPECT_THROW(estimate_mixed_volume(square_triangle(), 0.1, 1.5, 1), ValidationError);
  EstimateConfig cfg;
  cfg.workers = 0;
  EXPECT_THROW(estimate_mixed_volume(square_triangle(), 0.1, 0.1, 1, cfg), ValidationError);
}

TEST(Decompose, ZeroShiftsFlagTies) {
  const Instance in = square_triangle();
  const ShiftVectors zero{{zeros(2), zeros(2)}, 32};
  EXPECT_FALSE(decompose(Point{1, Rational(1, 2)}, in.polytopes, Vector{1, 1}, zero).unique);
  EXPECT_TRUE(decompose(Point{1, Rational(1, 2)}, in.polytopes, Vector{1, 1}, fixed_shifts()).unique);
}
