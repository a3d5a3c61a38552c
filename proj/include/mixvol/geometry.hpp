#pragma once

// Exact polytope primitives over the rationals.
//
// A Polytope is built once by convex_hull() and is immutable afterwards. Up to
// the exact-geometry dimension limit the hull also carries an irredundant
// H-representation: facet inequalities plus, for lower-dimensional bodies, the
// equalities of the affine hull. Facet normals are primitive integer vectors.
//
// The hull is computed by beneath-beyond insertion of the points (sorted
// lexicographically) in the coordinates of a projection that is injective on
// the affine hull. The resulting simplicial boundary complex also gives the
// volume: the cone from the lexicographically least vertex over every boundary
// simplex, each simplex contributing |det| / n!.

#include "mixvol/linalg.hpp"
#include "mixvol/linprog.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <span>
#include <string>

namespace mixvol {

inline constexpr int kDefaultExactDimLimit = 6;

struct ExactLimits {
  int max_dim = kDefaultExactDimLimit;
};

/// Halfspace <normal, x> <= offset (or the hyperplane, for equalities).
struct Facet {
  Vector normal;
  Rational offset;

  friend bool operator==(const Facet&, const Facet&) = default;
};

struct HRepresentation {
  std::vector<Facet> inequalities;
  std::vector<Facet> equalities;
};

/// A face given by the sorted indices of its vertices in the parent polytope.
struct FaceDescriptor {
  std::vector<int> vertex_indices;
  int dim = -1;

  friend bool operator==(const FaceDescriptor&, const FaceDescriptor&) = default;
  friend auto operator<=>(const FaceDescriptor& a, const FaceDescriptor& b) {
    if (a.dim != b.dim) return a.dim <=> b.dim;
    return a.vertex_indices <=> b.vertex_indices;
  }
};

class Polytope;
inline Polytope convex_hull(std::span<const Point> points, const ExactLimits& limits = {});

class Polytope {
 public:
  Polytope() = default;

  const std::vector<Point>& vertices() const { return vertices_; }
  const Point& vertex(std::size_t i) const { return vertices_[i]; }
  std::size_t num_vertices() const { return vertices_.size(); }
  int ambient_dim() const { return ambient_; }
  int dim() const { return dim_; }
  bool full_dimensional() const { return dim_ == ambient_; }

  /// False above the exact-geometry limit; then only LP-based queries work.
  bool has_hrep() const { return has_hrep_; }
  const HRepresentation& hrep() const;
  /// Vertex indices lying on each facet, parallel to hrep().inequalities.
  const std::vector<std::vector<int>>& facet_vertices() const { return facet_vertices_; }

  /// n-dimensional volume (0 when not full-dimensional).
  const Rational& volume() const;

  const std::string& name() const { return name_; }
  Polytope named(std::string name) const {
    Polytope p = *this;
    p.name_ = std::move(name);
    return p;
  }

 private:
  friend Polytope convex_hull(std::span<const Point>, const ExactLimits&);

  std::string name_;
  int ambient_ = 0;
  int dim_ = -1;
  std::vector<Point> vertices_;
  bool has_hrep_ = false;
  HRepresentation hrep_;
  std::vector<std::vector<int>> facet_vertices_;
  Rational volume_;
};

// ---------------------------------------------------------------------------

inline int affine_rank(std::span<const Point> points) {
  if (points.empty()) throw ValidationError("empty point set");
  const std::size_t n = points.front().size();
  Matrix dirs;
  dirs.reserve(points.size() - 1);
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].size() != n) throw ValidationError("dimension mismatch among points");
    dirs.push_back(points[i] - points.front());
  }
  return rank(dirs, n);
}

namespace detail {

struct AffineFrame {
  RowEchelon directions;       // RREF basis of the direction space
  std::vector<Facet> equalities;
};

inline AffineFrame affine_frame(std::span<const Point> points) {
  const std::size_t n = points.front().size();
  Matrix dirs;
  for (std::size_t i = 1; i < points.size(); ++i) dirs.push_back(points[i] - points.front());
  AffineFrame f;
  f.directions = reduced_row_echelon(std::move(dirs), n);
  for (const Vector& a : nullspace(f.directions.rows, n)) {
    Vector normal = primitive_integer(a);
    Rational offset = dot(normal, points.front());
    f.equalities.push_back(Facet{std::move(normal), std::move(offset)});
  }
  return f;
}

inline Point project(const Point& p, const std::vector<int>& coords) {
  Point out;
  out.reserve(coords.size());
  for (int c : coords) out.push_back(p[static_cast<std::size_t>(c)]);
  return out;
}

// Simplicial boundary complex of a full-dimensional point set in R^d, d >= 2.
struct SimplicialHull {
  struct Simplex {
    std::vector<int> idx;  // sorted point indices
    Vector normal;         // outward, not normalized
    Rational offset;
  };
  std::vector<Simplex> simplices;
};

inline SimplicialHull::Simplex oriented_simplex(const std::vector<Point>& pts, std::vector<int> idx, const Point& interior) {
  std::sort(idx.begin(), idx.end());
  const std::size_t d = interior.size();
  Matrix diffs;
  for (std::size_t i = 1; i < idx.size(); ++i)
    diffs.push_back(pts[static_cast<std::size_t>(idx[i])] - pts[static_cast<std::size_t>(idx[0])]);
  std::vector<Vector> ns = nullspace(diffs, d);
  if (ns.size() != 1) throw NumericalError("degenerate boundary simplex in hull construction");
  Vector normal = std::move(ns.front());
  Rational offset = dot(normal, pts[static_cast<std::size_t>(idx[0])]);
  if (dot(normal, interior) > offset) {
    for (auto& x : normal) x = -x;
    offset = -offset;
  }
  return {std::move(idx), std::move(normal), std::move(offset)};
}

inline SimplicialHull beneath_beyond(const std::vector<Point>& pts) {
  const std::size_t d = pts.front().size();
  // Greedy affinely independent start.
  std::vector<int> start{0};
  Matrix dirs;
  for (std::size_t i = 1; i < pts.size() && start.size() < d + 1; ++i) {
    Matrix trial = dirs;
    trial.push_back(pts[i] - pts[0]);
    if (rank(trial, d) == static_cast<int>(trial.size())) {
      dirs = std::move(trial);
      start.push_back(static_cast<int>(i));
    }
  }
  if (start.size() != d + 1) throw NumericalError("beneath_beyond: point set is not full-dimensional");
  Point interior = zeros(d);
  for (int i : start) interior = interior + pts[static_cast<std::size_t>(i)];
  interior = Rational(1, static_cast<unsigned long>(d + 1)) * interior;

  SimplicialHull hull;
  for (std::size_t skip = 0; skip < start.size(); ++skip) {
    std::vector<int> idx;
    for (std::size_t j = 0; j < start.size(); ++j)
      if (j != skip) idx.push_back(start[j]);
    hull.simplices.push_back(oriented_simplex(pts, std::move(idx), interior));
  }
  std::vector<bool> used(pts.size(), false);
  for (int i : start) used[static_cast<std::size_t>(i)] = true;

  for (std::size_t p = 0; p < pts.size(); ++p) {
    if (used[p]) continue;
    std::vector<SimplicialHull::Simplex> kept;
    std::map<std::vector<int>, int> ridge_count;
    bool any_visible = false;
    for (auto& s : hull.simplices) {
      if (dot(s.normal, pts[p]) > s.offset) {
        any_visible = true;
        for (std::size_t drop = 0; drop < s.idx.size(); ++drop) {
          std::vector<int> ridge;
          for (std::size_t j = 0; j < s.idx.size(); ++j)
            if (j != drop) ridge.push_back(s.idx[j]);
          ++ridge_count[ridge];
        }
      } else {
        kept.push_back(std::move(s));
      }
    }
    if (!any_visible) {
      // Re-collect: nothing was moved out of visible simplices, kept holds all.
      hull.simplices = std::move(kept);
      continue;
    }
    for (auto& [ridge, count] : ridge_count) {
      if (count != 1) continue;
      std::vector<int> idx = ridge;
      idx.push_back(static_cast<int>(p));
      kept.push_back(oriented_simplex(pts, std::move(idx), interior));
    }
    hull.simplices = std::move(kept);
  }
  return hull;
}

inline std::vector<Point> sorted_unique(std::span<const Point> points) {
  std::vector<Point> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

inline bool in_convex_hull_lp(std::span<const Point> points, const Point& y) {
  std::vector<std::vector<Point>> sets{std::vector<Point>(points.begin(), points.end())};
  const Rational one = 1;
  return in_minkowski_sum(sets, std::span<const Rational>(&one, 1), y);
}

}  // namespace detail

/// Pruned V-representation (plus H-representation up to the dimension limit).
inline Polytope convex_hull(std::span<const Point> points, const ExactLimits& limits) {
  if (points.empty()) throw ValidationError("empty point set");
  const std::size_t n = points.front().size();
  for (const auto& p : points)
    if (p.size() != n) throw ValidationError("dimension mismatch among points");

  std::vector<Point> pts = detail::sorted_unique(points);
  Polytope poly;
  poly.ambient_ = static_cast<int>(n);

  if (static_cast<int>(n) > limits.max_dim) {
    // LP pruning only; no H-representation.
    for (std::size_t i = 0; i < pts.size(); ++i) {
      std::vector<Point> others;
      for (std::size_t j = 0; j < pts.size(); ++j)
        if (j != i) others.push_back(pts[j]);
      if (others.empty() || !detail::in_convex_hull_lp(others, pts[i])) poly.vertices_.push_back(pts[i]);
    }
    poly.dim_ = affine_rank(poly.vertices_);
    poly.has_hrep_ = false;
    return poly;
  }

  const detail::AffineFrame frame = detail::affine_frame(pts);
  const std::vector<int>& coords = frame.directions.pivots;
  const int d = static_cast<int>(coords.size());
  poly.dim_ = d;
  poly.has_hrep_ = true;
  poly.hrep_.equalities = frame.equalities;

  if (d == 0) {
    poly.vertices_ = {pts.front()};
    poly.volume_ = (n == 0) ? Rational(1) : Rational(0);
    return poly;
  }

  std::vector<Point> proj;
  proj.reserve(pts.size());
  for (const auto& p : pts) proj.push_back(detail::project(p, coords));

  auto lift = [&](const Vector& local) {
    Vector a = zeros(n);
    for (int j = 0; j < d; ++j) a[static_cast<std::size_t>(coords[static_cast<std::size_t>(j)])] = local[static_cast<std::size_t>(j)];
    return a;
  };

  std::vector<Facet> facets;
  std::vector<std::size_t> vertex_ids;  // indices into pts

  if (d == 1) {
    // Extremes along the single projected coordinate.
    std::size_t lo = 0, hi = 0;
    for (std::size_t i = 1; i < proj.size(); ++i) {
      if (proj[i][0] < proj[lo][0]) lo = i;
      if (proj[i][0] > proj[hi][0]) hi = i;
    }
    vertex_ids = {std::min(lo, hi), std::max(lo, hi)};
    facets.push_back(Facet{lift(Vector{Rational(-1)}), Rational(-proj[lo][0])});
    facets.push_back(Facet{lift(Vector{Rational(1)}), proj[hi][0]});
    if (n == 1) poly.volume_ = proj[hi][0] - proj[lo][0];
  } else {
    const detail::SimplicialHull sh = detail::beneath_beyond(proj);
    std::map<std::pair<Vector, Rational>, std::size_t> distinct;
    for (const auto& s : sh.simplices) {
      Vector normal = primitive_integer(s.normal);
      Rational offset = dot(normal, proj[static_cast<std::size_t>(s.idx.front())]);
      distinct.emplace(std::make_pair(std::move(normal), std::move(offset)), distinct.size());
    }
    std::vector<std::pair<Vector, Rational>> planes(distinct.size());
    for (auto& [key, id] : distinct) planes[id] = key;

    std::set<int> touched;
    for (const auto& s : sh.simplices) touched.insert(s.idx.begin(), s.idx.end());
    for (int i : touched) {
      Matrix tight;
      for (const auto& [normal, offset] : planes)
        if (dot(normal, proj[static_cast<std::size_t>(i)]) == offset) tight.push_back(normal);
      if (rank(tight, static_cast<std::size_t>(d)) == d) vertex_ids.push_back(static_cast<std::size_t>(i));
    }
    std::sort(planes.begin(), planes.end());
    for (auto& [normal, offset] : planes) facets.push_back(Facet{primitive_integer(lift(normal)), offset});

    if (d == static_cast<int>(n)) {
      Rational vol = 0;
      const Point& apex = proj.front();  // lexicographically least, always a vertex
      for (const auto& s : sh.simplices) {
        Matrix m;
        for (int i : s.idx) m.push_back(proj[static_cast<std::size_t>(i)] - apex);
        vol += abs(determinant(std::move(m)));
      }
      poly.volume_ = vol / Rational(factorial(static_cast<unsigned>(n)));
    }
  }

  for (std::size_t id : vertex_ids) poly.vertices_.push_back(pts[id]);
  poly.hrep_.inequalities = std::move(facets);
  for (const auto& f : poly.hrep_.inequalities) {
    std::vector<int> on;
    for (std::size_t v = 0; v < poly.vertices_.size(); ++v)
      if (dot(f.normal, poly.vertices_[v]) == f.offset) on.push_back(static_cast<int>(v));
    poly.facet_vertices_.push_back(std::move(on));
  }
  return poly;
}

inline Polytope convex_hull(std::initializer_list<Point> points, const ExactLimits& limits = {}) {
  std::vector<Point> v(points);
  return convex_hull(std::span<const Point>(v), limits);
}

inline const HRepresentation& Polytope::hrep() const {
  if (!has_hrep_) throw ValidationError("exact H-rep unsupported above limit");
  return hrep_;
}

inline const Rational& Polytope::volume() const {
  if (!has_hrep_) throw ValidationError("exact volume unsupported above limit");
  return volume_;
}

inline const HRepresentation& h_representation(const Polytope& p) { return p.hrep(); }

inline Rational volume(const Polytope& p) { return p.volume(); }

/// Membership, boundary included.
inline bool contains(const Polytope& p, const Point& y) {
  if (static_cast<int>(y.size()) != p.ambient_dim()) throw ValidationError("dimension mismatch in contains()");
  if (!p.has_hrep()) return detail::in_convex_hull_lp(p.vertices(), y);
  const HRepresentation& h = p.hrep();
  for (const auto& e : h.equalities)
    if (dot(e.normal, y) != e.offset) return false;
  for (const auto& f : h.inequalities)
    if (dot(f.normal, y) > f.offset) return false;
  return true;
}

/// Membership in the interior (relative to the ambient space).
inline bool contains_interior(const Polytope& p, const Point& y) {
  if (!p.full_dimensional()) return false;
  for (const auto& f : p.hrep().inequalities)
    if (dot(f.normal, y) >= f.offset) return false;
  return true;
}

inline Polytope dilate(const Polytope& p, const Rational& t, const ExactLimits& limits = {}) {
  std::vector<Point> pts;
  for (const auto& v : p.vertices()) pts.push_back(t * v);
  return convex_hull(pts, limits).named(p.name());
}

inline Polytope translate(const Polytope& p, const Vector& shift, const ExactLimits& limits = {}) {
  std::vector<Point> pts;
  for (const auto& v : p.vertices()) pts.push_back(v + shift);
  return convex_hull(pts, limits).named(p.name());
}

/// sum_i scalars[i] * polys[i], as the pruned hull of all vertex sums.
inline Polytope minkowski_sum(std::span<const Polytope> polys, std::span<const Rational> scalars,
                              const ExactLimits& limits = {}) {
  if (polys.empty()) throw ValidationError("minkowski_sum: empty list");
  if (scalars.size() != polys.size()) throw ValidationError("minkowski_sum: scalar count mismatch");
  const int n = polys.front().ambient_dim();
  std::vector<Point> acc;
  for (std::size_t i = 0; i < polys.size(); ++i) {
    if (polys[i].ambient_dim() != n) throw ValidationError("minkowski_sum: dimension mismatch");
    if (sgn(scalars[i]) <= 0) throw ValidationError("minkowski_sum: scalars must be positive");
    std::vector<Point> next;
    for (const auto& v : polys[i].vertices()) {
      Point sv = scalars[i] * v;
      if (i == 0) {
        next.push_back(std::move(sv));
        continue;
      }
      for (const auto& a : acc) next.push_back(a + sv);
    }
    if (i + 1 == polys.size()) return convex_hull(next, limits);
    acc = convex_hull(next, limits).vertices();
  }
  return {};
}

inline Polytope minkowski_sum(std::span<const Polytope> polys, const ExactLimits& limits = {}) {
  std::vector<Rational> ones(polys.size(), Rational(1));
  return minkowski_sum(polys, ones, limits);
}

/// Affine dimension of sum_i polys[i].
inline int minkowski_sum_dim(std::span<const Polytope> polys) {
  if (polys.empty()) throw ValidationError("minkowski_sum_dim: empty list");
  const std::size_t n = static_cast<std::size_t>(polys.front().ambient_dim());
  Matrix dirs;
  for (const auto& p : polys)
    for (std::size_t j = 1; j < p.num_vertices(); ++j) dirs.push_back(p.vertex(j) - p.vertex(0));
  return rank(dirs, n);
}

inline int face_dim(const Polytope& p, const std::vector<int>& vertex_indices) {
  std::vector<Point> pts;
  for (int i : vertex_indices) pts.push_back(p.vertex(static_cast<std::size_t>(i)));
  return affine_rank(pts);
}

/// The unique face F of P with y in relint F.
inline FaceDescriptor minimal_face(const Polytope& p, const Point& y) {
  if (!contains(p, y)) throw ValidationError("point outside polytope");
  const HRepresentation& h = p.hrep();
  std::vector<bool> keep(p.num_vertices(), true);
  for (std::size_t f = 0; f < h.inequalities.size(); ++f) {
    if (dot(h.inequalities[f].normal, y) != h.inequalities[f].offset) continue;
    std::vector<bool> on(p.num_vertices(), false);
    for (int v : p.facet_vertices()[f]) on[static_cast<std::size_t>(v)] = true;
    for (std::size_t v = 0; v < keep.size(); ++v) keep[v] = keep[v] && on[v];
  }
  FaceDescriptor face;
  for (std::size_t v = 0; v < keep.size(); ++v)
    if (keep[v]) face.vertex_indices.push_back(static_cast<int>(v));
  face.dim = face_dim(p, face.vertex_indices);
  return face;
}

/// Every nonempty face of P (P itself included), ordered by (dim, indices).
inline std::vector<FaceDescriptor> all_faces(const Polytope& p) {
  std::set<std::vector<int>> seen;
  std::vector<int> everything(p.num_vertices());
  for (std::size_t i = 0; i < everything.size(); ++i) everything[i] = static_cast<int>(i);
  std::vector<std::vector<int>> frontier{everything};
  seen.insert(everything);
  while (!frontier.empty()) {
    std::vector<std::vector<int>> next;
    for (const auto& face : frontier) {
      for (const auto& fv : p.facet_vertices()) {
        std::vector<int> meet;
        std::set_intersection(face.begin(), face.end(), fv.begin(), fv.end(), std::back_inserter(meet));
        if (meet.empty() || meet.size() == face.size()) continue;
        if (seen.insert(meet).second) next.push_back(std::move(meet));
      }
    }
    frontier = std::move(next);
  }
  std::vector<FaceDescriptor> out;
  for (const auto& s : seen) out.push_back(FaceDescriptor{s, face_dim(p, s)});
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<Point> face_points(const Polytope& p, const FaceDescriptor& f) {
  std::vector<Point> pts;
  for (int i : f.vertex_indices) pts.push_back(p.vertex(static_cast<std::size_t>(i)));
  return pts;
}

/// Squared dim(pts)-dimensional Euclidean volume of conv(pts), together with the
/// RREF direction basis it was measured against.
struct RelativeVolume {
  Rational squared;
  Matrix basis;  // rows span the direction space; identity on the pivot columns
};

inline RelativeVolume relative_volume_squared(std::span<const Point> pts) {
  const detail::AffineFrame frame = detail::affine_frame(pts);
  RelativeVolume out;
  out.basis = frame.directions.rows;
  if (out.basis.empty()) {
    out.squared = 1;  // a point has unit 0-dimensional volume
    return out;
  }
  std::vector<Point> proj;
  for (const auto& p : pts) proj.push_back(detail::project(p, frame.directions.pivots));
  const Rational v = convex_hull(proj).volume();
  out.squared = v * v * gram_determinant(out.basis);
  return out;
}

}  // namespace mixvol
