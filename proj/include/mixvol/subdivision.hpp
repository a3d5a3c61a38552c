#pragma once

// Exact mixed subdivision of Σ λᵢPᵢ induced by shift vectors x¹,…,x^k.
//
// A tuple of faces (F₁,…,F_k) with Σ dim Fᵢ = n spans a cell Σ λᵢFᵢ when some v
// makes every v + xⁱ maximized over λᵢPᵢ exactly on λᵢFᵢ. The cells tile the
// sum, and those of signature α carry total volume λ^α·c_α.

#include "mixvol/geometry.hpp"
#include "mixvol/linalg.hpp"
#include "mixvol/linprog.hpp"
#include "mixvol/sampling.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

namespace mixvol {

class NonGenericShifts : public NumericalError {
 public:
  NonGenericShifts() : NumericalError("shift vectors not generic; resample") {}
};

struct SubdivisionCell {
  std::vector<FaceDescriptor> face_tuple;
  Polytope cell_polytope;
  std::vector<int> signature;
  Rational volume;
  // Squared parallelepiped volume [F₁,…,F_k]² of unit cubes in the face directions.
  std::optional<Rational> bracket_squared;
};

struct SubdivisionOptions {
  std::uint64_t max_tuples = 1000000;
  int workers = 1;
  ExactLimits limits;
};

namespace detail {

// Linear span of the face directions (RREF rows) and the squared volume of λF in them.
struct FaceFrame {
  Matrix basis;
  Rational scaled_volume_squared;
};

inline FaceFrame face_frame(const std::vector<Point>& pts, const Rational& lambda) {
  const RelativeVolume rv = relative_volume_squared(pts);
  Rational scale = 1;
  for (std::size_t j = 0; j < rv.basis.size(); ++j) scale *= lambda * lambda;
  return {rv.basis, rv.squared * scale};
}

// Margin of {v : <v + x, u - f> = 0 for u in F, < 0 for the other vertices u}.
inline void append_normal_cone_rows(StrictSystem& sys, const Polytope& p, const FaceDescriptor& f, const Vector& x) {
  std::vector<bool> in_face(p.num_vertices(), false);
  for (int i : f.vertex_indices) in_face[static_cast<std::size_t>(i)] = true;
  const Point& base = p.vertex(static_cast<std::size_t>(f.vertex_indices.front()));
  for (std::size_t u = 0; u < p.num_vertices(); ++u) {
    const Vector d = p.vertex(u) - base;
    if (in_face[u]) {
      if (static_cast<int>(u) == f.vertex_indices.front()) continue;
      sys.eq_rows.push_back(d);
      sys.eq_rhs.push_back(-dot(d, x));
    } else {
      sys.strict_rows.push_back(d);
      sys.strict_rhs.push_back(-dot(d, x));
    }
  }
}

inline void face_tuples(const std::vector<std::vector<FaceDescriptor>>& faces, int n, std::uint64_t cap,
                        std::vector<std::vector<int>>& out) {
  const std::size_t k = faces.size();
  std::vector<int> pick(k, 0);
  // Largest dimension still reachable by the remaining polytopes.
  std::vector<int> tail(k + 1, 0);
  for (std::size_t i = k; i-- > 0;) tail[i] = tail[i + 1] + faces[i].back().dim;
  auto rec = [&](auto&& self, std::size_t i, int used) -> void {
    if (i == k) {
      if (used == n) {
        if (out.size() >= cap) throw ValidationError("subdivision: face tuple count exceeds the configured cap");
        out.push_back(pick);
      }
      return;
    }
    for (std::size_t j = 0; j < faces[i].size(); ++j) {
      const int d = faces[i][j].dim;
      if (used + d > n) break;  // faces are sorted by dimension
      if (used + d + tail[i + 1] < n) continue;
      pick[i] = static_cast<int>(j);
      self(self, i + 1, used + d);
    }
  };
  rec(rec, 0, 0);
}

}  // namespace detail

/// Cells of the mixed subdivision, in lexicographic order of face tuples.
inline std::vector<SubdivisionCell> enumerate_cells(std::span<const Polytope> polys, const Vector& lambda,
                                                    const ShiftVectors& shifts, const SubdivisionOptions& opt = {}) {
  const std::size_t k = polys.size();
  if (k == 0) throw ValidationError("enumerate_cells: empty instance");
  if (lambda.size() != k || shifts.x.size() != k) throw ValidationError("enumerate_cells: length mismatch");
  if (std::any_of(lambda.begin(), lambda.end(), [](const Rational& l) { return sgn(l) <= 0; }))
    throw ValidationError("enumerate_cells: lambda must be positive");
  if (opt.workers < 1) throw ValidationError("enumerate_cells: workers must be positive");
  const int n = polys.front().ambient_dim();

  std::vector<std::vector<FaceDescriptor>> faces;
  for (const auto& p : polys) {
    if (p.ambient_dim() != n) throw ValidationError("enumerate_cells: dimension mismatch");
    faces.push_back(all_faces(p));
  }
  std::vector<std::vector<int>> tuples;
  detail::face_tuples(faces, n, opt.max_tuples, tuples);

  std::vector<std::optional<SubdivisionCell>> found(tuples.size());
  std::vector<char> tie(tuples.size(), 0);
  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t t = first; t < tuples.size(); t += stride) {
      std::vector<Polytope> parts;
      std::vector<std::vector<Point>> pts;
      for (std::size_t i = 0; i < k; ++i) {
        pts.push_back(face_points(polys[i], faces[i][static_cast<std::size_t>(tuples[t][i])]));
        parts.push_back(convex_hull(pts.back(), opt.limits));
      }
      if (minkowski_sum_dim(parts) != n) continue;
      StrictSystem sys;
      sys.num_vars = static_cast<std::size_t>(n);
      for (std::size_t i = 0; i < k; ++i)
        detail::append_normal_cone_rows(sys, polys[i], faces[i][static_cast<std::size_t>(tuples[t][i])], shifts.x[i]);
      const MarginResult m = strict_feasibility_margin(sys);
      if (m.status == MarginStatus::finite && sgn(m.margin) == 0) {
        tie[t] = 1;
        continue;
      }
      if (!m.strictly_feasible()) continue;

      SubdivisionCell cell;
      Matrix stacked;
      Rational gram_product = 1;
      for (std::size_t i = 0; i < k; ++i) {
        const FaceDescriptor& f = faces[i][static_cast<std::size_t>(tuples[t][i])];
        cell.face_tuple.push_back(f);
        cell.signature.push_back(f.dim);
        const detail::FaceFrame fr = detail::face_frame(pts[i], lambda[i]);
        for (const auto& row : fr.basis) stacked.push_back(row);
        gram_product *= gram_determinant(fr.basis);
      }
      cell.cell_polytope = minkowski_sum(parts, std::span<const Rational>(lambda), opt.limits);
      cell.volume = cell.cell_polytope.volume();
      const Rational det = determinant(stacked);
      cell.bracket_squared = det * det / gram_product;
      found[t] = std::move(cell);
    }
  };
  const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(opt.workers), std::max<std::size_t>(tuples.size(), 1));
  if (w == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < w; ++i) pool.emplace_back(work, i, w);
    for (auto& th : pool) th.join();
  }
  if (std::any_of(tie.begin(), tie.end(), [](char c) { return c != 0; })) throw NonGenericShifts();

  std::vector<SubdivisionCell> cells;
  for (auto& c : found)
    if (c) cells.push_back(std::move(*c));
  return cells;
}

/// Checks volume² = [F₁,…,F_k]²·Π vol²(λᵢFᵢ) for one cell.
inline bool bracket_identity_holds(const SubdivisionCell& cell, std::span<const Polytope> polys, const Vector& lambda) {
  if (!cell.bracket_squared) return false;
  Rational rhs = *cell.bracket_squared;
  for (std::size_t i = 0; i < cell.face_tuple.size(); ++i)
    rhs *= detail::face_frame(face_points(polys[i], cell.face_tuple[i]), lambda[i]).scaled_volume_squared;
  return cell.volume * cell.volume == rhs;
}

/// Σ volumes of the cells whose signature equals α.
inline Rational alpha_cell_sum(std::span<const SubdivisionCell> cells, const std::vector<int>& alpha) {
  Rational s = 0;
  for (const auto& c : cells)
    if (c.signature == alpha) s += c.volume;
  return s;
}

inline std::map<std::vector<int>, Rational> signature_sums(std::span<const SubdivisionCell> cells) {
  std::map<std::vector<int>, Rational> out;
  for (const auto& c : cells) out[c.signature] += c.volume;
  return out;
}

struct SubdivisionAudit {
  Rational cell_volume_sum;
  Rational sum_volume;
  bool volume_ok = false;
  int audited_points = 0;
  int overlaps = 0;   // audited points interior to two cells
  int uncovered = 0;  // audited points of the sum outside every cell
  std::vector<std::string> failures;

  bool ok() const { return failures.empty(); }
};

/// Exact volume identity plus a random audit of coverage and interior-disjointness.
inline SubdivisionAudit verify_subdivision(std::span<const SubdivisionCell> cells, std::span<const Polytope> polys,
                                           const Vector& lambda, std::uint64_t seed = 0, int audit_points = 1000,
                                           const ExactLimits& limits = {}) {
  SubdivisionAudit a;
  const Polytope sum = minkowski_sum(polys, std::span<const Rational>(lambda), limits);
  a.sum_volume = sum.volume();
  for (const auto& c : cells) a.cell_volume_sum += c.volume;
  a.volume_ok = a.cell_volume_sum == a.sum_volume;
  if (!a.volume_ok)
    a.failures.push_back("cell volumes sum to " + to_string(a.cell_volume_sum) + ", expected " + to_string(a.sum_volume));

  const std::size_t n = static_cast<std::size_t>(sum.ambient_dim());
  Point lo = sum.vertex(0), hi = sum.vertex(0);
  for (const auto& v : sum.vertices())
    for (std::size_t j = 0; j < n; ++j) {
      lo[j] = std::min(lo[j], v[j]);
      hi[j] = std::max(hi[j], v[j]);
    }
  Rng rng(seed, 0);
  const Integer grid = Integer(1) << 32;
  while (a.audited_points < audit_points && a.sum_volume > 0) {
    Point z(n);
    for (std::size_t j = 0; j < n; ++j) z[j] = lo[j] + (hi[j] - lo[j]) * ratio(rng.below(grid + 1), grid);
    if (!contains(sum, z)) continue;
    ++a.audited_points;
    int interior = 0;
    bool covered = false;
    for (const auto& c : cells) {
      if (contains_interior(c.cell_polytope, z)) ++interior;
      covered = covered || contains(c.cell_polytope, z);
    }
    if (interior > 1) ++a.overlaps;
    if (!covered) ++a.uncovered;
  }
  if (a.overlaps > 0) a.failures.push_back(std::to_string(a.overlaps) + " audited points lie in two cell interiors");
  if (a.uncovered > 0) a.failures.push_back(std::to_string(a.uncovered) + " audited points are not covered");
  return a;
}

namespace detail {

inline std::string svg_number(const Rational& q) {
  std::ostringstream os;
  os.precision(6);
  os << to_double(q);
  return os.str();
}

// Cell fill: hue of Pᵢ when the whole signature sits on i, grey otherwise.
inline std::string cell_color(const std::vector<int>& signature, int n) {
  static const char* hues[] = {"#4a78c2", "#d0453c", "#4f9d55", "#c98a2b", "#8a5bb5", "#3aa6a6"};
  for (std::size_t i = 0; i < signature.size(); ++i)
    if (signature[i] == n) return hues[i % std::size(hues)];
  return "#b4b4b4";
}

inline std::vector<Point> counterclockwise(const Polytope& p) {
  std::vector<Point> v = p.vertices();
  Point c = zeros(2);
  for (const auto& x : v) c = c + x;
  c = (1 / Rational(static_cast<long>(v.size()))) * c;
  std::sort(v.begin(), v.end(), [&](const Point& a, const Point& b) {
    const double ta = std::atan2(to_double(a[1] - c[1]), to_double(a[0] - c[0]));
    const double tb = std::atan2(to_double(b[1] - c[1]), to_double(b[0] - c[0]));
    return ta < tb;
  });
  return v;
}

}  // namespace detail

/// SVG drawing of a planar subdivision; y grows upward as in the plane.
inline std::string render_svg(std::span<const SubdivisionCell> cells, std::span<const Polytope> polys) {
  if (cells.empty()) throw ValidationError("export_svg: no cells");
  if (cells.front().cell_polytope.ambient_dim() != 2) throw ValidationError("export_svg: only n = 2 is supported");
  Rational x0 = cells.front().cell_polytope.vertex(0)[0], x1 = x0;
  Rational y0 = cells.front().cell_polytope.vertex(0)[1], y1 = y0;
  for (const auto& c : cells)
    for (const auto& v : c.cell_polytope.vertices()) {
      x0 = std::min(x0, v[0]);
      x1 = std::max(x1, v[0]);
      y0 = std::min(y0, v[1]);
      y1 = std::max(y1, v[1]);
    }
  const Rational span = std::max(x1 - x0, y1 - y0);
  const Rational pad = span / 10;
  const Rational font = span / 24;
  const Rational legend_h = font * Rational(3, 2) * static_cast<long>(polys.size() + 1) + pad;
  auto X = [&](const Rational& x) { return detail::svg_number(x); };
  auto Y = [&](const Rational& y) { return detail::svg_number(-y); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << X(x0 - pad) << ' ' << Y(y1 + pad) << ' '
     << X(x1 - x0 + 2 * pad) << ' ' << X(y1 - y0 + 2 * pad + legend_h) << "\">\n";
  os << "<g stroke=\"#222\" stroke-width=\"" << X(span / 200) << "\" stroke-linejoin=\"round\">\n";
  for (const auto& c : cells) {
    os << "<polygon fill=\"" << detail::cell_color(c.signature, 2) << "\" points=\"";
    bool first = true;
    for (const auto& v : detail::counterclockwise(c.cell_polytope)) {
      os << (first ? "" : " ") << X(v[0]) << ',' << Y(v[1]);
      first = false;
    }
    os << "\"/>\n";
  }
  os << "</g>\n<g font-family=\"sans-serif\" font-size=\"" << X(font) << "\" text-anchor=\"middle\">\n";
  for (const auto& c : cells) {
    Point m = zeros(2);
    for (const auto& v : c.cell_polytope.vertices()) m = m + v;
    m = (1 / Rational(static_cast<long>(c.cell_polytope.num_vertices()))) * m;
    os << "<text x=\"" << X(m[0]) << "\" y=\"" << Y(m[1]) << "\" dominant-baseline=\"middle\">" << to_string(c.volume)
       << "</text>\n";
  }
  os << "</g>\n";

  // Legend below the drawing.
  std::vector<std::pair<std::string, std::string>> entries;
  for (std::size_t i = 0; i < polys.size(); ++i) {
    std::vector<int> pure(polys.size(), 0);
    pure[i] = 2;
    const std::string name = polys[i].name().empty() ? "P" + std::to_string(i + 1) : polys[i].name();
    entries.emplace_back(detail::cell_color(pure, 2), name);
  }
  entries.emplace_back(detail::cell_color({}, 2), "mixed cells");
  const Rational row = font * Rational(3, 2);
  Rational y = -(y0 - pad);
  os << "<g font-family=\"sans-serif\" font-size=\"" << X(font) << "\">\n";
  for (const auto& [color, label] : entries) {
    os << "<rect x=\"" << X(x0) << "\" y=\"" << X(y) << "\" width=\"" << X(font) << "\" height=\"" << X(font)
       << "\" fill=\"" << color << "\" stroke=\"#222\" stroke-width=\"" << X(span / 400) << "\"/>\n";
    os << "<text x=\"" << X(x0 + font * 2) << "\" y=\"" << X(y + font) << "\">" << label << "</text>\n";
    y += row;
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

inline void export_svg(std::span<const SubdivisionCell> cells, std::span<const Polytope> polys, const std::string& path) {
  const std::string svg = render_svg(cells, polys);
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open " + path);
  out << svg;
}

}  // namespace mixvol
