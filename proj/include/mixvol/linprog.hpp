#pragma once

// Exact rational linear programming.
//
// Two-phase primal simplex on a dense tableau with Bland's rule: the entering
// column is the lowest-index column with positive reduced cost, the leaving row
// is the minimum-ratio row whose basic column has the lowest index. Bland's rule
// cannot cycle, so degenerate problems always terminate, and the pivot sequence
// (hence the returned vertex) is a pure function of the input.

#include "mixvol/linalg.hpp"

#include <algorithm>
#include <span>

namespace mixvol {

enum class LPStatus { optimal, infeasible, unbounded };

inline const char* to_string(LPStatus s) {
  switch (s) {
    case LPStatus::optimal: return "optimal";
    case LPStatus::infeasible: return "infeasible";
    case LPStatus::unbounded: return "unbounded";
  }
  return "?";
}

/// maximize <objective, x>  s.t.  eq_rows x = eq_rhs,  le_rows x <= le_rhs,
/// x_j >= 0 unless free_vars[j].
struct LinearProgram {
  std::size_t num_vars = 0;
  Vector objective;
  Matrix eq_rows;
  Vector eq_rhs;
  Matrix le_rows;
  Vector le_rhs;
  std::vector<bool> free_vars;  // empty means all variables are nonnegative

  explicit LinearProgram(std::size_t vars = 0) : num_vars(vars), objective(zeros(vars)) {}

  void add_equality(Vector row, Rational rhs) {
    eq_rows.push_back(std::move(row));
    eq_rhs.push_back(std::move(rhs));
  }
  void add_inequality(Vector row, Rational rhs) {
    le_rows.push_back(std::move(row));
    le_rhs.push_back(std::move(rhs));
  }
  bool is_free(std::size_t j) const { return !free_vars.empty() && free_vars[j]; }

  void validate() const {
    auto bad = [&](const Matrix& rows, const Vector& rhs) {
      if (rows.size() != rhs.size()) return true;
      return std::any_of(rows.begin(), rows.end(), [&](const Vector& r) { return r.size() != num_vars; });
    };
    if (objective.size() != num_vars || bad(eq_rows, eq_rhs) || bad(le_rows, le_rhs) ||
        (!free_vars.empty() && free_vars.size() != num_vars)) {
      throw ValidationError("linear program has inconsistent dimensions");
    }
  }
};

struct LPSolution {
  LPStatus status = LPStatus::infeasible;
  Vector point;
  Rational objective_value;
  bool is_vertex = false;
  std::vector<int> basis;           // basic columns of the internal standard form
  bool alternative_optima = false;  // a nonbasic column has zero reduced cost at the optimum
  std::vector<Vector> tied_edges;   // zero-cost edge directions admitting a positive step
  Vector ray;                       // improving direction when unbounded
};

namespace detail {

class Simplex {
 public:
  explicit Simplex(const LinearProgram& lp) : lp_(lp) { build(); }

  LPSolution run() {
    LPSolution sol;
    if (!phase_one()) {
      sol.status = LPStatus::infeasible;
      return sol;
    }
    set_objective(phase_two_costs());
    const int blocked = iterate();
    if (blocked >= 0) {
      sol.status = LPStatus::unbounded;
      sol.ray = unbounded_ray(blocked);
      sol.point = original_point();
      return sol;
    }
    sol.status = LPStatus::optimal;
    sol.point = original_point();
    sol.objective_value = dot(lp_.objective, sol.point);
    for (int b : basic_) sol.basis.push_back(b);
    std::sort(sol.basis.begin(), sol.basis.end());
    std::vector<bool> in_basis(ncols_, false);
    for (int b : basic_) in_basis[static_cast<std::size_t>(b)] = true;
    for (std::size_t j = 0; j < ncols_; ++j) {
      if (!in_basis[j] && !artificial(j) && sgn(obj_[j]) == 0) {
        sol.alternative_optima = true;
        if (positive_step(j)) sol.tied_edges.push_back(unbounded_ray(static_cast<int>(j)));
      }
    }
    sol.is_vertex = active_rank(sol.point) == static_cast<int>(lp_.num_vars);
    return sol;
  }

 private:
  bool artificial(std::size_t j) const { return j >= first_artificial_; }

  void build() {
    const std::size_t n = lp_.num_vars;
    pos_col_.resize(n);
    neg_col_.assign(n, -1);
    std::size_t c = 0;
    for (std::size_t j = 0; j < n; ++j) {
      pos_col_[j] = static_cast<int>(c++);
      if (lp_.is_free(j)) neg_col_[j] = static_cast<int>(c++);
    }
    const std::size_t structural = c;
    const std::size_t n_eq = lp_.eq_rows.size();
    const std::size_t n_le = lp_.le_rows.size();
    const std::size_t slack0 = structural;
    first_artificial_ = slack0 + n_le;

    // Decide which rows need an artificial variable.
    std::vector<bool> needs_art(n_eq + n_le, true);
    std::size_t n_art = 0;
    for (std::size_t r = 0; r < n_eq + n_le; ++r) {
      if (r >= n_eq && sgn(lp_.le_rhs[r - n_eq]) >= 0) needs_art[r] = false;
      if (needs_art[r]) ++n_art;
    }
    ncols_ = first_artificial_ + n_art;
    rows_.assign(n_eq + n_le, zeros(ncols_ + 1));
    basic_.assign(n_eq + n_le, -1);

    std::size_t art = first_artificial_;
    for (std::size_t r = 0; r < n_eq + n_le; ++r) {
      const bool is_eq = r < n_eq;
      const Vector& src = is_eq ? lp_.eq_rows[r] : lp_.le_rows[r - n_eq];
      const Rational& rhs = is_eq ? lp_.eq_rhs[r] : lp_.le_rhs[r - n_eq];
      const bool negate = sgn(rhs) < 0;
      Vector& row = rows_[r];
      for (std::size_t j = 0; j < n; ++j) {
        if (sgn(src[j]) == 0) continue;
        row[static_cast<std::size_t>(pos_col_[j])] = negate ? Rational(-src[j]) : src[j];
        if (neg_col_[j] >= 0) row[static_cast<std::size_t>(neg_col_[j])] = negate ? src[j] : Rational(-src[j]);
      }
      if (!is_eq) row[slack0 + (r - n_eq)] = negate ? -1 : 1;
      row[ncols_] = negate ? Rational(-rhs) : rhs;
      if (needs_art[r]) {
        row[art] = 1;
        basic_[r] = static_cast<int>(art++);
      } else {
        basic_[r] = static_cast<int>(slack0 + (r - n_eq));
      }
    }
  }

  // Reduced costs of `costs` under the current basis; obj_[ncols_] holds -z.
  void set_objective(const Vector& costs) {
    costs_ = costs;
    obj_ = costs;
    obj_.push_back(0);
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      const Rational& cb = costs_[static_cast<std::size_t>(basic_[r])];
      if (sgn(cb) == 0) continue;
      for (std::size_t j = 0; j <= ncols_; ++j) {
        if (sgn(rows_[r][j]) != 0) obj_[j] -= cb * rows_[r][j];
      }
    }
  }

  void pivot(std::size_t r, std::size_t c) {
    Vector& prow = rows_[r];
    const Rational inv = 1 / prow[c];
    std::vector<std::size_t> nz;
    for (std::size_t j = 0; j <= ncols_; ++j) {
      if (sgn(prow[j]) != 0) {
        prow[j] *= inv;
        nz.push_back(j);
      }
    }
    auto eliminate = [&](Vector& row) {
      if (sgn(row[c]) == 0) return;
      const Rational f = row[c];
      for (std::size_t j : nz) row[j] -= f * prow[j];
    };
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (i != r) eliminate(rows_[i]);
    }
    eliminate(obj_);
    basic_[r] = static_cast<int>(c);
  }

  // Runs Bland pivots to optimality. Returns -1 at optimum, or the entering
  // column that proved unboundedness.
  int iterate() {
    for (;;) {
      std::size_t enter = ncols_;
      for (std::size_t j = 0; j < ncols_; ++j) {
        if (banned_artificials_ && artificial(j)) continue;
        if (sgn(obj_[j]) > 0) {
          enter = j;
          break;
        }
      }
      if (enter == ncols_) return -1;
      std::size_t leave = rows_.size();
      Rational best;
      for (std::size_t r = 0; r < rows_.size(); ++r) {
        if (sgn(rows_[r][enter]) <= 0) continue;
        Rational ratio = rows_[r][ncols_] / rows_[r][enter];
        if (leave == rows_.size() || ratio < best || (ratio == best && basic_[r] < basic_[leave])) {
          best = std::move(ratio);
          leave = r;
        }
      }
      if (leave == rows_.size()) return static_cast<int>(enter);
      pivot(leave, enter);
    }
  }

  bool phase_one() {
    if (first_artificial_ == ncols_) return true;
    Vector costs = zeros(ncols_);
    for (std::size_t j = first_artificial_; j < ncols_; ++j) costs[j] = -1;
    set_objective(costs);
    iterate();
    if (sgn(obj_[ncols_]) != 0) return false;
    // Drive zero-level artificials out of the basis; drop redundant rows.
    for (std::size_t r = 0; r < rows_.size();) {
      if (!artificial(static_cast<std::size_t>(basic_[r]))) {
        ++r;
        continue;
      }
      std::size_t c = 0;
      while (c < first_artificial_ && sgn(rows_[r][c]) == 0) ++c;
      if (c < first_artificial_) {
        pivot(r, c);
        ++r;
      } else {
        rows_.erase(rows_.begin() + static_cast<std::ptrdiff_t>(r));
        basic_.erase(basic_.begin() + static_cast<std::ptrdiff_t>(r));
      }
    }
    banned_artificials_ = true;
    return true;
  }

  Vector phase_two_costs() const {
    Vector costs = zeros(ncols_);
    for (std::size_t j = 0; j < lp_.num_vars; ++j) {
      costs[static_cast<std::size_t>(pos_col_[j])] = lp_.objective[j];
      if (neg_col_[j] >= 0) costs[static_cast<std::size_t>(neg_col_[j])] = -lp_.objective[j];
    }
    return costs;
  }

  Vector standard_values() const {
    Vector x = zeros(ncols_);
    for (std::size_t r = 0; r < rows_.size(); ++r) x[static_cast<std::size_t>(basic_[r])] = rows_[r][ncols_];
    return x;
  }

  Vector to_original(const Vector& x) const {
    Vector out = zeros(lp_.num_vars);
    for (std::size_t j = 0; j < lp_.num_vars; ++j) {
      out[j] = x[static_cast<std::size_t>(pos_col_[j])];
      if (neg_col_[j] >= 0) out[j] -= x[static_cast<std::size_t>(neg_col_[j])];
    }
    return out;
  }

  Vector original_point() const { return to_original(standard_values()); }

  bool positive_step(std::size_t enter) const {
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      if (sgn(rows_[r][enter]) > 0 && sgn(rows_[r][ncols_]) == 0) return false;
    }
    return true;
  }

  Vector unbounded_ray(int enter) const {
    Vector d = zeros(ncols_);
    d[static_cast<std::size_t>(enter)] = 1;
    for (std::size_t r = 0; r < rows_.size(); ++r) d[static_cast<std::size_t>(basic_[r])] = -rows_[r][static_cast<std::size_t>(enter)];
    return to_original(d);
  }

  int active_rank(const Vector& x) const {
    Matrix active = lp_.eq_rows;
    for (std::size_t r = 0; r < lp_.le_rows.size(); ++r) {
      if (dot(lp_.le_rows[r], x) == lp_.le_rhs[r]) active.push_back(lp_.le_rows[r]);
    }
    for (std::size_t j = 0; j < lp_.num_vars; ++j) {
      if (!lp_.is_free(j) && sgn(x[j]) == 0) {
        Vector e = zeros(lp_.num_vars);
        e[j] = 1;
        active.push_back(std::move(e));
      }
    }
    return rank(active, lp_.num_vars);
  }

  const LinearProgram& lp_;
  std::vector<int> pos_col_, neg_col_;
  std::size_t first_artificial_ = 0;
  std::size_t ncols_ = 0;
  bool banned_artificials_ = false;
  Matrix rows_;
  std::vector<int> basic_;
  Vector costs_;
  Vector obj_;
};

}  // namespace detail

/// Solves `lp` to an optimal basic feasible solution.
inline LPSolution solve_to_vertex(const LinearProgram& lp) {
  lp.validate();
  return detail::Simplex(lp).run();
}

// ---------------------------------------------------------------------------
// Strict feasibility

/// eq_rows x = eq_rhs, weak_rows x <= weak_rhs, strict_rows x < strict_rhs; x free.
struct StrictSystem {
  std::size_t num_vars = 0;
  Matrix eq_rows;
  Vector eq_rhs;
  Matrix weak_rows;
  Vector weak_rhs;
  Matrix strict_rows;
  Vector strict_rhs;
};

enum class MarginStatus { finite, unbounded, infeasible };

struct MarginResult {
  MarginStatus status = MarginStatus::infeasible;
  Rational margin;  // meaningful when status == finite
  Vector witness;   // a point attaining the margin (finite) or a feasible base point (unbounded)
  Vector ray;       // direction along which the margin grows without bound

  bool strictly_feasible() const {
    return status == MarginStatus::unbounded || (status == MarginStatus::finite && sgn(margin) > 0);
  }
};

/// Maximizes s subject to strict_rows x + s <= strict_rhs and the weak rows.
/// The strict system is solvable iff the result is unbounded or has margin > 0.
inline MarginResult strict_feasibility_margin(const StrictSystem& sys) {
  const std::size_t n = sys.num_vars;
  LinearProgram lp(n + 1);
  lp.free_vars.assign(n + 1, true);
  lp.objective[n] = 1;
  auto widen = [&](const Vector& row, bool with_margin) {
    Vector r = row;
    r.emplace_back(with_margin ? 1 : 0);
    return r;
  };
  for (std::size_t i = 0; i < sys.eq_rows.size(); ++i) lp.add_equality(widen(sys.eq_rows[i], false), sys.eq_rhs[i]);
  for (std::size_t i = 0; i < sys.weak_rows.size(); ++i) lp.add_inequality(widen(sys.weak_rows[i], false), sys.weak_rhs[i]);
  for (std::size_t i = 0; i < sys.strict_rows.size(); ++i)
    lp.add_inequality(widen(sys.strict_rows[i], true), sys.strict_rhs[i]);

  const LPSolution sol = solve_to_vertex(lp);
  MarginResult out;
  if (sol.status == LPStatus::infeasible) return out;
  out.witness.assign(sol.point.begin(), sol.point.begin() + static_cast<std::ptrdiff_t>(n));
  if (sol.status == LPStatus::unbounded) {
    out.status = MarginStatus::unbounded;
    out.ray.assign(sol.ray.begin(), sol.ray.begin() + static_cast<std::ptrdiff_t>(n));
    return out;
  }
  out.status = MarginStatus::finite;
  out.margin = sol.point[n];
  return out;
}

// ---------------------------------------------------------------------------
// Minkowski-sum LPs over vertex-presented polytopes

namespace detail {

// Variables w_ij >= 0 (per polytope i, vertex j) followed by `extra` columns.
// Rows: sum_j w_ij = 1 for every i, and sum_ij w_ij s_i v_ij - extra_part = target.
inline LinearProgram minkowski_weight_lp(std::span<const std::vector<Point>> vertex_sets, std::span<const Rational> scalars,
                                         const Point& target, std::size_t extra) {
  const std::size_t n = target.size();
  std::size_t nw = 0;
  for (const auto& vs : vertex_sets) nw += vs.size();
  LinearProgram lp(nw + extra);
  std::size_t col = 0;
  Matrix coupling(n, zeros(nw + extra));
  for (std::size_t i = 0; i < vertex_sets.size(); ++i) {
    Vector sum_row = zeros(nw + extra);
    for (const auto& v : vertex_sets[i]) {
      if (v.size() != n) throw ValidationError("dimension mismatch in Minkowski LP");
      sum_row[col] = 1;
      for (std::size_t d = 0; d < n; ++d) coupling[d][col] = scalars[i] * v[d];
      ++col;
    }
    lp.add_equality(std::move(sum_row), 1);
  }
  for (std::size_t d = 0; d < n; ++d) lp.add_equality(std::move(coupling[d]), target[d]);
  return lp;
}

}  // namespace detail

/// Exact membership of z in sum_i s_i conv(vertex_sets[i]).
inline bool in_minkowski_sum(std::span<const std::vector<Point>> vertex_sets, std::span<const Rational> scalars,
                             const Point& z) {
  return solve_to_vertex(detail::minkowski_weight_lp(vertex_sets, scalars, z, 0)).status == LPStatus::optimal;
}

struct Chord {
  Rational t_min;
  Rational t_max;
};

/// Extent of the line z + t d inside sum_i s_i conv(vertex_sets[i]).
inline Chord chord_extent(std::span<const std::vector<Point>> vertex_sets, std::span<const Rational> scalars,
                          const Point& z, const Vector& d) {
  if (std::all_of(d.begin(), d.end(), [](const Rational& q) { return sgn(q) == 0; })) {
    throw ValidationError("chord direction must be nonzero");
  }
  LinearProgram lp = detail::minkowski_weight_lp(vertex_sets, scalars, z, 1);
  const std::size_t t_col = lp.num_vars - 1;
  lp.free_vars.assign(lp.num_vars, false);
  lp.free_vars[t_col] = true;
  const std::size_t k = vertex_sets.size();
  for (std::size_t r = 0; r < d.size(); ++r) lp.eq_rows[k + r][t_col] = -d[r];

  lp.objective[t_col] = 1;
  const LPSolution hi = solve_to_vertex(lp);
  if (hi.status == LPStatus::infeasible) throw ValidationError("chord_extent: base point is not in the Minkowski sum");
  if (hi.status != LPStatus::optimal) throw NumericalError("chord_extent: unbounded chord");
  lp.objective[t_col] = -1;
  const LPSolution lo = solve_to_vertex(lp);
  return Chord{lo.point[t_col], hi.point[t_col]};
}

}  // namespace mixvol
