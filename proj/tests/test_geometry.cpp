#include "mixvol/geometry.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace mixvol;
using mixvol::testing::P;

TEST(AffineRank, Examples) {
  EXPECT_EQ(affine_rank(std::vector<Point>{P({0, 0})}), 0);
  EXPECT_EQ(affine_rank(std::vector<Point>{P({0, 0}), P({1, 0}), P({0, 1})}), 2);
  EXPECT_EQ(affine_rank(std::vector<Point>{P({0, 0, 0}), P({1, 1, 1}), P({2, 2, 2})}), 1);
  EXPECT_THROW(affine_rank(std::vector<Point>{}), ValidationError);
}

TEST(ConvexHull, PrunesDuplicatesAndInteriorPoints) {
  const Polytope sq = convex_hull({P({0, 0}), P({1, 0}), P({1, 1}), P({0, 1}), P({0, 0})});
  EXPECT_EQ(sq.vertices(), (std::vector<Point>{P({0, 0}), P({0, 1}), P({1, 0}), P({1, 1})}));

  const Polytope seg = convex_hull({P({0, 0}), P({2, 0}), P({1, 0})});
  EXPECT_EQ(seg.vertices(), (std::vector<Point>{P({0, 0}), P({2, 0})}));
  EXPECT_EQ(seg.dim(), 1);
}

TEST(ConvexHull, FivePointExampleMatchesBruteForce) {
  const std::vector<Point> pts{P({0, 0}), P({1, 0}), P({0, 1}), P({1, 1}), P({1, 2})};
  const auto oracle = mixvol::testing::brute_force_hull_2d(pts);
  ASSERT_EQ(oracle.size(), 4u);
  EXPECT_EQ(convex_hull(pts).vertices(), oracle);
  EXPECT_EQ(oracle, (std::vector<Point>{P({0, 0}), P({0, 1}), P({1, 0}), P({1, 2})}));
}

TEST(ConvexHull, RandomPlanarSetsMatchBruteForce) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<long> c(-5, 5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Point> pts;
    const int m = 3 + trial % 8;
    for (int i = 0; i < m; ++i) pts.push_back(P({c(rng), c(rng)}));
    if (affine_rank(pts) < 2) continue;
    const Polytope hull = convex_hull(pts);
    EXPECT_EQ(hull.vertices(), mixvol::testing::brute_force_hull_2d(pts));
    EXPECT_EQ(hull.volume(), mixvol::testing::shoelace_area(hull.vertices()));
  }
}

TEST(ConvexHull, DimensionMismatchThrows) {
  EXPECT_THROW(convex_hull({P({0, 0}), P({1, 0, 0})}), ValidationError);
}

TEST(HRepresentation, UnitSquare) {
  const Polytope sq = mixvol::testing::unit_square();
  const auto& h = h_representation(sq);
  EXPECT_TRUE(h.equalities.empty());
  ASSERT_EQ(h.inequalities.size(), 4u);
  std::vector<Facet> expected{{P({-1, 0}), 0}, {P({0, -1}), 0}, {P({0, 1}), 1}, {P({1, 0}), 1}};
  for (const auto& f : expected) {
    EXPECT_NE(std::find(h.inequalities.begin(), h.inequalities.end(), f), h.inequalities.end());
  }
}

TEST(HRepresentation, SegmentCarriesEquality) {
  const Polytope seg = mixvol::testing::segment_x();
  const auto& h = h_representation(seg);
  ASSERT_EQ(h.equalities.size(), 1u);
  EXPECT_EQ(h.equalities[0], (Facet{P({0, 1}), 0}));
  ASSERT_EQ(h.inequalities.size(), 2u);
  EXPECT_EQ(h.inequalities[0], (Facet{P({-1, 0}), 0}));
  EXPECT_EQ(h.inequalities[1], (Facet{P({1, 0}), 1}));
}

TEST(HRepresentation, RightTriangle) {
  const Polytope tri = mixvol::testing::right_triangle();
  const auto& h = h_representation(tri);
  std::vector<Vector> normals;
  for (const auto& f : h.inequalities) normals.push_back(f.normal);
  std::sort(normals.begin(), normals.end());
  EXPECT_EQ(normals, (std::vector<Vector>{P({-1, 0}), P({0, -1}), P({1, 1})}));
}

TEST(HRepresentation, AboveLimitThrows) {
  std::vector<Point> pts{zeros(7)};
  for (int i = 0; i < 7; ++i) {
    Point e = zeros(7);
    e[static_cast<std::size_t>(i)] = 1;
    pts.push_back(e);
  }
  const Polytope simplex7 = convex_hull(pts);
  EXPECT_FALSE(simplex7.has_hrep());
  EXPECT_EQ(simplex7.num_vertices(), 8u);
  EXPECT_THROW(h_representation(simplex7), ValidationError);
  EXPECT_THROW(volume(simplex7), ValidationError);
  // LP fallback still answers membership.
  Point inside(7, Rational(1, 10));
  EXPECT_TRUE(contains(simplex7, inside));
  EXPECT_FALSE(contains(simplex7, Point(7, Rational(1, 5))));
  // A raised limit makes it exact again.
  EXPECT_EQ(convex_hull(pts, ExactLimits{7}).volume(), Rational(1, 5040));
}

TEST(HRepresentation, RoundTripRecoversVertices) {
  // Vertices of {x : all facets} are the points where d tight facets meet with full rank.
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const Polytope p = mixvol::testing::random_lattice_polytope(rng, 3, 8, 4);
    if (!p.full_dimensional()) continue;
    const auto& h = p.hrep();
    // Enumerate all triples of facets, solve, keep feasible points.
    std::set<Point> recovered;
    const auto& F = h.inequalities;
    for (std::size_t a = 0; a < F.size(); ++a)
      for (std::size_t b = a + 1; b < F.size(); ++b)
        for (std::size_t c = b + 1; c < F.size(); ++c) {
          auto x = solve(Matrix{F[a].normal, F[b].normal, F[c].normal}, Vector{F[a].offset, F[b].offset, F[c].offset});
          if (!x) continue;
          bool ok = true;
          for (const auto& f : F) ok = ok && dot(f.normal, *x) <= f.offset;
          if (ok) recovered.insert(*x);
        }
    EXPECT_EQ(std::vector<Point>(recovered.begin(), recovered.end()), p.vertices());
  }
}

TEST(Volume, CubeAndSimplices) {
  EXPECT_EQ(volume(mixvol::testing::unit_cube()), 1);
  for (int n = 1; n <= 6; ++n) {
    EXPECT_EQ(volume(mixvol::testing::standard_simplex(n)), Rational(Integer(1), factorial(static_cast<unsigned>(n))));
  }
  EXPECT_EQ(volume(mixvol::testing::segment_x()), 0);
}

TEST(Volume, SquarePlusTriangleIsSevenHalves) {
  using namespace mixvol::testing;
  const auto sq = unit_square(), tri = right_triangle();
  const Rational oracle = shoelace_area(brute_force_hull_2d(all_vertex_sums_2d(sq.vertices(), tri.vertices())));
  ASSERT_EQ(oracle, Rational(7, 2));
  std::vector<Polytope> polys{sq, tri};
  EXPECT_EQ(volume(minkowski_sum(polys)), oracle);
}

TEST(Volume, PermutationAndTranslationInvariant) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<long> c(-4, 4);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<Point> pts;
    for (int i = 0; i < 9; ++i) pts.push_back(P({c(rng), c(rng), c(rng)}));
    const Rational v = convex_hull(pts).volume();
    std::shuffle(pts.begin(), pts.end(), rng);
    EXPECT_EQ(convex_hull(pts).volume(), v);
    const Point shift = P({c(rng), c(rng), c(rng)});
    for (auto& p : pts) p = p + shift;
    EXPECT_EQ(convex_hull(pts).volume(), v);
  }
}

TEST(Volume, DilationScalesByPowerOfDimension) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<long> num(1, 9), den(1, 5);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 3;
    const Polytope p = mixvol::testing::random_lattice_polytope(rng, n, 7, 3);
    Rational t(num(rng), den(rng));
    t.canonicalize();
    EXPECT_EQ(dilate(p, t).volume(), pow(t, static_cast<unsigned>(n)) * p.volume());
  }
}

TEST(MinkowskiSum, SquarePlusTriangleVertices) {
  using namespace mixvol::testing;
  std::vector<Polytope> polys{unit_square(), right_triangle()};
  const Polytope sum = minkowski_sum(polys);
  EXPECT_EQ(sum.vertices(), brute_force_hull_2d(all_vertex_sums_2d(polys[0].vertices(), polys[1].vertices())));
  EXPECT_EQ(sum.vertices(), (std::vector<Point>{P({0, 0}), P({0, 2}), P({1, 2}), P({2, 0}), P({2, 1})}));
}

TEST(MinkowskiSum, DilateAndBox) {
  using namespace mixvol::testing;
  std::vector<Polytope> one{right_triangle()};
  std::vector<Rational> two{2};
  EXPECT_EQ(minkowski_sum(one, two).vertices(), (std::vector<Point>{P({0, 0}), P({0, 2}), P({2, 0})}));
  std::vector<Polytope> segs{segment_x(), segment_y()};
  EXPECT_EQ(minkowski_sum(segs).vertices(), unit_square().vertices());
  EXPECT_THROW(minkowski_sum(std::vector<Polytope>{}), ValidationError);
}

TEST(MinkowskiSum, AssociativeAndCommutative) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + trial % 2;
    std::vector<Polytope> a{mixvol::testing::random_lattice_polytope(rng, n, 5, 3),
                            mixvol::testing::random_lattice_polytope(rng, n, 5, 3),
                            mixvol::testing::random_lattice_polytope(rng, n, 5, 3)};
    const Polytope abc = minkowski_sum(a);
    std::vector<Polytope> ab{a[0], a[1]};
    std::vector<Polytope> ab_c{minkowski_sum(ab), a[2]};
    std::vector<Polytope> cba{a[2], a[1], a[0]};
    EXPECT_EQ(minkowski_sum(ab_c).vertices(), abc.vertices());
    EXPECT_EQ(minkowski_sum(cba).vertices(), abc.vertices());
  }
}

TEST(MinimalFace, SquareExamples) {
  const Polytope sq = mixvol::testing::unit_square();
  const FaceDescriptor edge = minimal_face(sq, Point{Rational(1, 2), 0});
  EXPECT_EQ(edge.dim, 1);
  EXPECT_EQ(face_points(sq, edge), (std::vector<Point>{P({0, 0}), P({1, 0})}));
  EXPECT_EQ(minimal_face(sq, Point{Rational(1, 2), Rational(1, 2)}).dim, 2);
  const FaceDescriptor corner = minimal_face(sq, P({0, 0}));
  EXPECT_EQ(corner.dim, 0);
  EXPECT_EQ(face_points(sq, corner), (std::vector<Point>{P({0, 0})}));
  EXPECT_THROW(minimal_face(sq, P({2, 0})), ValidationError);
}

TEST(MinimalFace, IdempotentOnBarycenters) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 15; ++trial) {
    const Polytope p = mixvol::testing::random_lattice_polytope(rng, 3, 8, 3);
    for (const FaceDescriptor& f : all_faces(p)) {
      Point bary = zeros(3);
      for (const auto& v : face_points(p, f)) bary = bary + v;
      bary = Rational(1, static_cast<unsigned long>(f.vertex_indices.size())) * bary;
      EXPECT_EQ(minimal_face(p, bary), f);
    }
  }
}

TEST(MinimalFace, LowerDimensionalBody) {
  const Polytope seg = convex_hull({P({0, 0, 0}), P({2, 2, 2})});
  EXPECT_EQ(minimal_face(seg, P({1, 1, 1})).dim, 1);
  EXPECT_EQ(minimal_face(seg, P({2, 2, 2})).dim, 0);
  EXPECT_THROW(minimal_face(seg, P({1, 1, 0})), ValidationError);
}

TEST(AllFaces, CubeFaceCounts) {
  std::vector<int> by_dim(4, 0);
  for (const auto& f : all_faces(mixvol::testing::unit_cube())) ++by_dim[static_cast<std::size_t>(f.dim)];
  EXPECT_EQ(by_dim, (std::vector<int>{8, 12, 6, 1}));
}

TEST(Contains, Examples) {
  using namespace mixvol::testing;
  EXPECT_TRUE(contains(unit_square(), Point{Rational(1, 2), Rational(1, 2)}));
  EXPECT_FALSE(contains(unit_square(), P({2, 0})));
  EXPECT_TRUE(contains(right_triangle(), Point{Rational(1, 2), Rational(1, 2)}));
  EXPECT_FALSE(contains_interior(right_triangle(), Point{Rational(1, 2), Rational(1, 2)}));
}

TEST(RelativeVolume, TiltedSegmentAndSquare) {
  // |(3,4)| = 5.
  EXPECT_EQ(relative_volume_squared(std::vector<Point>{P({0, 0}), P({3, 4})}).squared, 25);
  // Unit square embedded in the plane x = y (edges (1,1,0) and (0,0,1)): area sqrt(2).
  EXPECT_EQ(relative_volume_squared(std::vector<Point>{P({0, 0, 0}), P({1, 1, 0}), P({0, 0, 1}), P({1, 1, 1})}).squared, 2);
}
