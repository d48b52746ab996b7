#include "lakeoc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace lakeoc {

namespace {

VectorXd line_direction(const SliceManifold& sm) {
  if (sm.x0.size() == 0 || sm.x0.size() != sm.x1.size())
    throw SpecificationError("slice manifold has no anchors");
  VectorXd d = sm.x0 - sm.x1;
  if (d.norm() < 1e-12)
    throw SpecificationError("slice manifold anchors coincide");
  return d;
}

/// One slice manifold reduced to an objective curve J(alpha) over the
/// common line parameter, restricted to the maximal initial stretch on
/// which alpha moves strictly one way (folded manifolds revisit states
/// whose optimal value belongs to the first pass).
struct Curve {
  std::vector<double> alpha;  // ascending
  std::vector<double> J;

  double lo() const { return alpha.front(); }
  double hi() const { return alpha.back(); }

  double operator()(double a) const {
    if (a <= alpha.front()) return J.front();
    if (a >= alpha.back()) return J.back();
    auto it = std::upper_bound(alpha.begin(), alpha.end(), a);
    std::size_t i = (it - alpha.begin()) - 1;
    double w = (a - alpha[i]) / (alpha[i + 1] - alpha[i]);
    return (1 - w) * J[i] + w * J[i + 1];
  }

  /// Linear extrapolation from the end of the curve nearest to a.
  double limit_toward(double a) const {
    std::size_t m = alpha.size();
    if (m < 2) return J.front();
    std::size_t i = (std::abs(a - alpha.front()) < std::abs(a - alpha.back()))
                        ? 1
                        : m - 1;
    double slope = (J[i] - J[i - 1]) / (alpha[i] - alpha[i - 1]);
    double base = (i == 1) ? alpha[0] : alpha[m - 1];
    double val = (i == 1) ? J[0] : J[m - 1];
    return val + slope * (a - base);
  }
};

Curve reduce_to_curve(const ContinuationRun& run, const VectorXd& origin,
                      const VectorXd& d, int n,
                      std::size_t* keep_out = nullptr) {
  double dd = d.squaredNorm();
  std::vector<double> a, J;
  for (const SliceRecord& r : run.slice.records) {
    if (!r.admissible) break;
    a.push_back((r.X0.head(n) - origin).dot(d) / dd);
    J.push_back(r.objective);
  }
  if (a.empty()) throw SpecificationError("slice manifold has no records");
  // Maximal initial strictly monotone stretch.
  std::size_t keep = 1;
  double dir = 0;
  for (std::size_t i = 1; i < a.size(); ++i) {
    double step = a[i] - a[i - 1];
    if (dir == 0) dir = (step > 0) ? 1 : (step < 0 ? -1 : 0);
    if (dir == 0 || step * dir <= 0) break;
    keep = i + 1;
  }
  a.resize(keep);
  J.resize(keep);
  if (keep_out) *keep_out = keep;
  if (dir < 0) {
    std::reverse(a.begin(), a.end());
    std::reverse(J.begin(), J.end());
  }
  Curve c;
  c.alpha = std::move(a);
  c.J = std::move(J);
  return c;
}

/// One side of an objective comparison: a run, its target, the monotone
/// record prefix usable for seeding, and the run's own anchor states
/// (kappa = 0 at A0, kappa = 1 at A1).
struct Side {
  const ContinuationRun& run;
  const Equilibrium& target;
  std::size_t keep = 0;
  VectorXd A0, A1;
};

Side make_side(const ContinuationRun& run, const Equilibrium& target) {
  Side s{run, target, 0, VectorXd(), VectorXd()};
  if (run.variant == HomotopyVariant::Spp) {
    s.A0 = run.slice.x1;
    s.A1 = run.slice.x0;
  } else {
    s.A0 = run.slice.x0;
    s.A1 = run.slice.x1;
  }
  return s;
}

struct PathValue {
  PathSolution path;
  double J = std::numeric_limits<double>::quiet_NaN();
};

/// Objective of the side's slice manifold at the shared line point x,
/// evaluated by re-solving the run's own BVP with kappa pinned there. NaN
/// when the pinned problem has no solution (the manifold does not extend
/// to x).
PathValue side_value(const CanonicalModel& model, const Side& side,
                     const VectorXd& x, const HomotopyOptions& opts) {
  PathValue pv;
  VectorXd dl = side.A1 - side.A0;
  double k = (x - side.A0).dot(dl) / dl.squaredNorm();
  std::size_t best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < side.keep; ++i) {
    double dist = std::abs(side.run.slice.records[i].kappa - k);
    if (dist < bd) {
      bd = dist;
      best = i;
    }
  }
  try {
    pv.path = solve_on_slice(model, side.run, side.target, k, best, opts);
  } catch (const NumericalError&) {
    return pv;
  }
  pv.J = model.objective_value(pv.path.mesh.Y.col(0));
  return pv;
}

/// State vector of a run's target equilibrium, recovered from the anchors.
const VectorXd& target_states(const ContinuationRun& run) {
  return run.variant == HomotopyVariant::Spp ? run.slice.x1 : run.slice.x0;
}

bool has_stalled(const ContinuationRun& run) {
  if (run.target_reached) return false;
  return true;
}

}  // namespace

bool comparable(const SliceManifold& a, const SliceManifold& b, double tol) {
  VectorXd da = line_direction(a), db = line_direction(b);
  VectorXd ua = da / da.norm(), ub = db / db.norm();
  double parallel = std::min((ua - ub).norm(), (ua + ub).norm());
  if (parallel >= tol) return false;
  VectorXd r = b.x1 - a.x1;
  double offset = (r - ua * ua.dot(r)).norm() / (1.0 + r.norm());
  return offset < tol;
}

CrossingResult find_indifference_point(const CanonicalModel& model,
                                       const ContinuationRun& run1,
                                       const Equilibrium& target1,
                                       const ContinuationRun& run2,
                                       const Equilibrium& target2,
                                       const HomotopyOptions& opts) {
  if (!comparable(run1.slice, run2.slice))
    throw SpecificationError("slice manifolds are not comparable");
  int n = model.num_states();
  const VectorXd origin = run1.slice.x1;
  const VectorXd d = line_direction(run1.slice);
  Side s1 = make_side(run1, target1);
  Side s2 = make_side(run2, target2);
  Curve c1 = reduce_to_curve(run1, origin, d, n, &s1.keep);
  Curve c2 = reduce_to_curve(run2, origin, d, n, &s2.keep);

  double lo = std::max(c1.lo(), c2.lo());
  double hi = std::min(c1.hi(), c2.hi());
  if (hi - lo < 1e-12)
    throw SpecificationError("slice manifolds do not intersect");

  // Candidate brackets: every sign change of J1 - J2 on the interpolated
  // curves over the shared range.
  std::vector<double> grid{lo, hi};
  for (double v : c1.alpha)
    if (v > lo && v < hi) grid.push_back(v);
  for (double v : c2.alpha)
    if (v > lo && v < hi) grid.push_back(v);
  std::sort(grid.begin(), grid.end());
  std::vector<std::pair<double, double>> brackets;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    double g0 = c1(grid[i]) - c2(grid[i]);
    double g1 = c1(grid[i + 1]) - c2(grid[i + 1]);
    if (g0 == 0 || g0 * g1 < 0) brackets.emplace_back(grid[i], grid[i + 1]);
  }

  CrossingResult res;
  auto probe = [&](double a, PathValue& p1, PathValue& p2) {
    VectorXd x = origin + a * d;
    p1 = side_value(model, s1, x, opts);
    p2 = side_value(model, s2, x, opts);
    return p1.J - p2.J;
  };

  // Polish each candidate on the true objective gap until one converges
  // (Illinois variant of regula falsi; the interpolated curves only seed
  // the brackets). A candidate whose probes cannot be solved is an
  // artifact of extrapolated coverage and is skipped.
  for (auto [al, ar] : brackets) {
    PathValue l1, l2, r1, r2;
    double fl = probe(al, l1, l2);
    double fr = probe(ar, r1, r2);
    if (!std::isfinite(fl) || !std::isfinite(fr) || fl * fr > 0) continue;
    double best_a = (al + ar) / 2;
    PathValue b1, b2;
    double fb = std::numeric_limits<double>::quiet_NaN();
    for (int it = 0; it < 60; ++it) {
      double a = ar - fr * (ar - al) / (fr - fl);
      if (!(a > al && a < ar)) a = (al + ar) / 2;
      PathValue p1, p2;
      double f = probe(a, p1, p2);
      if (!std::isfinite(f)) {
        a = (al + ar) / 2;
        f = probe(a, p1, p2);
        if (!std::isfinite(f)) break;
      }
      best_a = a;
      fb = f;
      b1 = std::move(p1);
      b2 = std::move(p2);
      if (std::abs(f) < 1e-9 || ar - al < 1e-14) break;
      if (f * fl < 0) {
        ar = a;
        fr = f;
      } else {
        al = a;
        fl = f;
        fr /= 2;  // Illinois damping against one-sided stagnation
      }
    }
    if (!std::isfinite(fb) || std::abs(fb) > 1e-6) continue;

    IndifferencePoint pt;
    pt.alpha = best_a;
    pt.xI = origin + best_a * d;
    pt.path1 = std::move(b1.path);
    pt.path2 = std::move(b2.path);
    pt.objective = (b1.J + b2.J) / 2;
    pt.heterogeneous = (pt.xI.maxCoeff() - pt.xI.minCoeff()) > 1e-6;
    res.status = CrossingStatus::Found;
    res.point = std::move(pt);
    return res;
  }
  return res;
}

StructureReport classify_structure(const CanonicalModel& model,
                                   const std::vector<Equilibrium>& equilibria,
                                   const std::vector<ContinuationRun>& runs,
                                   const HomotopyOptions& opts) {
  StructureReport rep;
  if (runs.empty()) {
    rep.detail = "no continuation runs supplied";
    return rep;
  }
  int n = model.num_states();

  // Match each run to its target equilibrium by state.
  std::vector<int> target_idx;
  for (const ContinuationRun& run : runs) {
    const VectorXd& ts = target_states(run);
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < equilibria.size(); ++j) {
      double dist = (equilibria[j].states() - ts).norm();
      if (dist < best_d) {
        best_d = dist;
        best = static_cast<int>(j);
      }
    }
    if (best < 0 || best_d > 1e-6 * (1.0 + ts.norm())) {
      rep.detail = "run target not found in the equilibrium list";
      return rep;
    }
    if (!equilibria[best].spectral.spp) {
      rep.detail = "run targets a non-SPP equilibrium";
      return rep;
    }
    target_idx.push_back(best);
  }

  std::vector<int> distinct;
  for (int t : target_idx)
    if (std::find(distinct.begin(), distinct.end(), t) == distinct.end())
      distinct.push_back(t);
  if (distinct.size() == 1) {
    rep.kind = StructureKind::Unique;
    rep.detail = "single basin of attraction";
    return rep;
  }
  if (distinct.size() > 2) {
    rep.detail = "more than two distinct targets on one line";
    return rep;
  }

  // First run toward each of the two targets.
  const ContinuationRun* r1 = nullptr;
  const ContinuationRun* r2 = nullptr;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (target_idx[i] == distinct[0] && !r1) r1 = &runs[i];
    if (target_idx[i] == distinct[1] && !r2) r2 = &runs[i];
  }
  const Equilibrium& t1 = equilibria[distinct[0]];
  const Equilibrium& t2 = equilibria[distinct[1]];
  if (!comparable(r1->slice, r2->slice)) {
    rep.detail = "slice manifolds are not comparable";
    return rep;
  }

  bool overlap = true;
  CrossingResult cr;
  try {
    cr = find_indifference_point(model, *r1, t1, *r2, t2, opts);
  } catch (const SpecificationError&) {
    overlap = false;
  }

  if (overlap && cr.status == CrossingStatus::Found) {
    VectorXd u1 = model.control(cr.point.path1.mesh.Y.col(0));
    VectorXd u2 = model.control(cr.point.path2.mesh.Y.col(0));
    if ((u1 - u2).cwiseAbs().maxCoeff() > 1e-6) {
      rep.kind = StructureKind::Indifference;
      rep.crossing = std::move(cr);
      rep.detail = "objective curves cross with distinct policies";
      return rep;
    }
    rep.detail = "objective crossing without a policy discontinuity";
    return rep;
  }

  if (overlap && r1->target_reached && r2->target_reached) {
    rep.kind = StructureKind::Unique;
    rep.detail = "one objective curve dominates on the shared range";
    return rep;
  }

  // Threshold candidate: both runs stopped short of each other and a
  // non-SPP equilibrium sits on the line between them.
  if (!has_stalled(*r1) && !has_stalled(*r2)) {
    rep.detail = "no crossing and no stall";
    return rep;
  }
  const VectorXd origin = r1->slice.x1;
  const VectorXd d = line_direction(r1->slice);
  Curve c1 = reduce_to_curve(*r1, origin, d, n);
  Curve c2 = reduce_to_curve(*r2, origin, d, n);
  double dd = d.squaredNorm();
  int best_eq = -1;
  double best_score = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < equilibria.size(); ++j) {
    if (equilibria[j].spectral.spp) continue;
    VectorXd es = equilibria[j].states();
    double a = (es - origin).dot(d) / dd;
    double off = (es - origin - a * d).norm() / (1.0 + es.norm());
    if (off > 1e-4 || a < -0.5 || a > 1.5) continue;
    double score = std::abs(a - c1.hi()) + std::abs(a - c2.lo()) +
                   std::abs(a - c1.lo()) + std::abs(a - c2.hi());
    if (score < best_score) {
      best_score = score;
      best_eq = static_cast<int>(j);
    }
  }
  if (best_eq < 0) {
    rep.detail = "no non-SPP equilibrium on the line";
    return rep;
  }
  const Equilibrium& sep = equilibria[best_eq];
  double a_sep = (sep.states() - origin).dot(d) / dd;
  double J_sep = model.objective_value(sep.X);
  double gap = std::max(std::abs(c1.limit_toward(a_sep) - J_sep),
                        std::abs(c2.limit_toward(a_sep) - J_sep));
  rep.threshold_objective = J_sep;
  rep.continuity_gap = gap;
  if (gap < 1e-4) {
    rep.kind = StructureKind::Threshold;
    rep.detail = "objective continuous across the non-SPP equilibrium";
  } else {
    rep.detail = "objective limits do not meet the separatrix value";
  }
  return rep;
}

std::vector<std::pair<double, double>> objective_curve(
    const CanonicalModel& model, const SliceManifold& sm) {
  int n = static_cast<int>(sm.x0.size());
  std::vector<std::pair<double, double>> out;
  for (const SliceRecord& r : sm.records) {
    if (!r.admissible) continue;
    out.emplace_back(model.spatial_norm(r.X0.head(n)), r.objective);
  }
  return out;
}

double quadrature_objective(const CanonicalModel& model,
                            const PathSolution& path) {
  double T = path.T;
  double rho = model.params().rho;
  BvpProblem pr;
  pr.dim = model.dim();
  pr.f = [&](double, const VectorXd& X, const VectorXd&) {
    return (T * model.rhs(X)).eval();
  };
  auto g = [&](double t, const VectorXd& X) {
    return T * std::exp(-rho * T * t) * model.payoff(X);
  };
  const BvpMesh& mesh = path.mesh;
  double J = 0;
  for (std::size_t i = 0; i + 1 < mesh.t.size(); ++i) {
    double h = mesh.t[i + 1] - mesh.t[i];
    double tm = (mesh.t[i] + mesh.t[i + 1]) / 2;
    VectorXd Xm = eval_solution(pr, mesh, tm);
    J += h / 6.0 *
         (g(mesh.t[i], mesh.Y.col(i)) + 4.0 * g(tm, Xm) +
          g(mesh.t[i + 1], mesh.Y.col(i + 1)));
  }
  J += std::exp(-rho * T) * model.payoff(path.target.X) / rho;
  return J;
}

}  // namespace lakeoc
