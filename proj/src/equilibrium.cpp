#include "lakeoc/equilibrium.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace lakeoc {

namespace {

constexpr double kFlatTol = 1e-8;

bool is_flat(const VectorXd& states) {
  return states.maxCoeff() - states.minCoeff() < kFlatTol;
}

bool is_symmetric(const VectorXd& states) {
  return (states - states.reverse()).cwiseAbs().maxCoeff() < 1e-6;
}

int sign_of(double v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

/// Sign of det(M) via LU, immune to overflow of the determinant value.
int det_sign(const MatrixXd& M) {
  Eigen::PartialPivLU<MatrixXd> lu(M);
  int s = lu.permutationP().determinant();  // +-1
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    double d = lu.matrixLU()(i, i);
    if (d == 0.0) return 0;
    if (d < 0) s = -s;
  }
  return s;
}

/// Helper around model evaluation with one free scalar parameter.
class ParamFamily {
 public:
  ParamFamily(const CanonicalModel& model, std::string parameter)
      : base_(model), name_(std::move(parameter)) {}

  std::unique_ptr<CanonicalModel> at(double p) const {
    return base_.with_params(set_param(base_.params(), name_, p));
  }

  VectorXd rhs(const VectorXd& y) const {
    return at(y(y.size() - 1))->rhs(y.head(y.size() - 1));
  }

  /// d x (d+1) Jacobian [dF/dX | dF/dp]; the parameter column by central
  /// differences (models are smooth in every parameter).
  MatrixXd extended_jacobian(const VectorXd& y) const {
    Eigen::Index d = y.size() - 1;
    double p = y(d);
    MatrixXd J(d, d + 1);
    J.leftCols(d) = at(p)->jacobian(y.head(d));
    double h = 1e-6 * std::max(1.0, std::abs(p));
    J.col(d) =
        (at(p + h)->rhs(y.head(d)) - at(p - h)->rhs(y.head(d))) / (2 * h);
    return J;
  }

  const std::string& name() const { return name_; }

 private:
  const CanonicalModel& base_;
  std::string name_;
};

/// Solve [J_ext; r^T] t = e_last, normalized; the curve tangent when r is
/// the previous tangent or a secant.
VectorXd tangent_at(const ParamFamily& fam, const VectorXd& y,
                    const VectorXd& r) {
  Eigen::Index d = y.size() - 1;
  MatrixXd M(d + 1, d + 1);
  M.topRows(d) = fam.extended_jacobian(y);
  M.row(d) = r.transpose();
  VectorXd e = VectorXd::Zero(d + 1);
  e(d) = 1.0;
  VectorXd t = M.partialPivLu().solve(e);
  double nrm = t.norm();
  if (!std::isfinite(nrm) || nrm == 0)
    throw NumericalError("singular system while computing branch tangent");
  return t / nrm;
}

/// Newton corrector for the extended system with a fixed constraint row:
/// F(y) = 0, r^T (y - y_ref) = 0. Returns false on nonconvergence.
bool correct(const ParamFamily& fam, VectorXd& y, const VectorXd& r,
             const VectorXd& y_ref, double tol, int max_iter,
             int* iters_used = nullptr) {
  Eigen::Index d = y.size() - 1;
  for (int it = 0; it < max_iter; ++it) {
    VectorXd F;
    try {
      F = fam.rhs(y);
    } catch (const NumericalError&) {
      return false;
    }
    double cres = r.dot(y - y_ref);
    if (F.cwiseAbs().maxCoeff() < tol && std::abs(cres) < tol) {
      if (iters_used) *iters_used = it;
      return true;
    }
    MatrixXd M(d + 1, d + 1);
    M.topRows(d) = fam.extended_jacobian(y);
    M.row(d) = r.transpose();
    VectorXd rhs(d + 1);
    rhs << -F, -cres;
    VectorXd dy = M.partialPivLu().solve(rhs);
    if (!dy.allFinite()) return false;
    y += dy;
  }
  return false;
}

int bordered_det_sign(const ParamFamily& fam, const VectorXd& y,
                      const VectorXd& t) {
  Eigen::Index d = y.size() - 1;
  MatrixXd M(d + 1, d + 1);
  M.topRows(d) = fam.extended_jacobian(y);
  M.row(d) = t.transpose();
  return det_sign(M);
}

}  // namespace

Equilibrium classify_equilibrium(const CanonicalModel& model,
                                 const VectorXd& X) {
  Equilibrium eq;
  eq.X = X;
  eq.params = model.params();
  eq.residual_norm = model.rhs(X).cwiseAbs().maxCoeff();
  eq.spectral = classify(model.jacobian(X), model.params().rho);
  eq.flat = is_flat(X.head(X.size() / 2));
  eq.admissible = model.admissible(X);
  eq.symmetric = is_symmetric(X.head(X.size() / 2));
  return eq;
}

Equilibrium newton_solve(const CanonicalModel& model, const VectorXd& guess,
                         const NewtonOptions& opts) {
  VectorXd X = guess;
  double res = std::numeric_limits<double>::infinity();
  for (int it = 0; it < opts.max_iter; ++it) {
    VectorXd F = model.rhs(X);
    res = F.cwiseAbs().maxCoeff();
    if (res < opts.tol) return classify_equilibrium(model, X);
    VectorXd dx = model.jacobian(X).partialPivLu().solve(-F);
    if (!dx.allFinite())
      throw NonConvergenceError("Newton step not finite", res);
    // Damping: halve until the residual decreases.
    double alpha = 1.0;
    for (int h = 0; h <= opts.max_halvings; ++h) {
      VectorXd Xn = X + alpha * dx;
      double rn;
      try {
        rn = model.rhs(Xn).cwiseAbs().maxCoeff();
      } catch (const NumericalError&) {
        rn = std::numeric_limits<double>::infinity();
      }
      if (rn < res || rn < opts.tol) {
        X = Xn;
        break;
      }
      alpha /= 2;
      if (h == opts.max_halvings) X += alpha * dx;  // last resort
    }
  }
  VectorXd F = model.rhs(X);
  if (F.cwiseAbs().maxCoeff() < opts.tol)
    return classify_equilibrium(model, X);
  throw NonConvergenceError("equilibrium Newton did not converge", res);
}

VectorXd lift_flat(const VectorXd& X0d, int N) {
  if (X0d.size() != 2) throw DimensionError("lift_flat expects a 0D point");
  VectorXd X(2 * (N + 1));
  X.head(N + 1).setConstant(X0d(0));
  X.tail(N + 1).setConstant(X0d(1));
  // Boundary costates carry half quadrature weight.
  X(N + 1) = X0d(1) / 2;
  X(2 * N + 1) = X0d(1) / 2;
  return X;
}

std::vector<Equilibrium> find_equilibria_0d(const Lake0D& model,
                                            double state_max, int starts) {
  const ModelParams& p = model.params();
  std::vector<Equilibrium> found;
  for (int k = 1; k <= starts; ++k) {
    double P = state_max * k / starts;
    // Costate guess from the stationary costate equation.
    double s = 2 * P / std::pow(1 + P * P, 2);
    double denom = p.rho + p.b - s;
    if (std::abs(denom) < 1e-8) continue;
    VectorXd guess(2);
    guess << P, -2 * p.c * P / denom;
    try {
      Equilibrium eq = newton_solve(model, guess);
      bool dup = false;
      for (const auto& e : found)
        if ((e.X - eq.X).cwiseAbs().maxCoeff() < 1e-6) dup = true;
      if (!dup && eq.admissible) found.push_back(std::move(eq));
    } catch (const NumericalError&) {
      continue;
    }
  }
  std::sort(found.begin(), found.end(),
            [](const auto& a, const auto& b) { return a.X(0) < b.X(0); });
  return found;
}

Branch continue_equilibria(const CanonicalModel& model,
                           const Equilibrium& start,
                           const std::string& parameter,
                           const EqContinuationOptions& opts) {
  ParamFamily fam(model, parameter);
  const Eigen::Index d = model.dim();

  Branch branch;
  branch.parameter_name = parameter;

  VectorXd y(d + 1);
  y << start.X, get_param(start.params, parameter);
  branch.points.push_back(start.X);
  branch.param_values.push_back(y(d));

  // First tangent: border with the parameter direction.
  VectorXd e_p = VectorXd::Zero(d + 1);
  e_p(d) = 1.0;
  VectorXd t;
  if (opts.initial_direction.size() == d + 1) {
    VectorXd r = opts.initial_direction.normalized();
    t = tangent_at(fam, y, r);
    if (t.dot(r) < 0) t = -t;
  } else {
    t = tangent_at(fam, y, e_p);
    if (t(d) < 0) t = -t;
    if (opts.backward) t = -t;
  }

  double h = opts.init_step;
  int prev_det = bordered_det_sign(fam, y, t);
  double prev_tp = t(d);
  int consecutive_failures = 0;

  while (static_cast<int>(branch.points.size()) < opts.max_points) {
    VectorXd y_pred = y + h * t;
    VectorXd y_new = y_pred;
    int iters = 0;
    bool ok = correct(fam, y_new, t, y_pred, opts.newton_tol, 8, &iters);
    if (ok) {
      double step_len = (y_new - y).norm();
      if (step_len > 3 * h + 1e-12) ok = false;  // corrector jumped branches
    }
    if (!ok) {
      h /= 2;
      if (h < opts.min_step && ++consecutive_failures >= 3) {
        branch.stalled = true;
        break;
      }
      h = std::max(h, opts.min_step);
      continue;
    }
    consecutive_failures = 0;

    VectorXd t_new = tangent_at(fam, y_new, t);
    if (t_new.dot(t) < 0) t_new = -t_new;
    int det_new = bordered_det_sign(fam, y_new, t_new);
    double tp_new = t_new(d);

    // Event localization by bisection between y and y_new.
    auto localize = [&](EventKind kind) {
      VectorXd a = y, b = y_new;
      VectorXd secant = (b - a).normalized();
      int sa = kind == EventKind::BranchPoint
                   ? bordered_det_sign(fam, a, secant)
                   : sign_of(tangent_at(fam, a, secant)(d));
      for (int it = 0; it < 60; ++it) {
        if (std::abs(b(d) - a(d)) < opts.event_param_tol &&
            (b - a).norm() < 1e-5 * std::max(1.0, y.norm()))
          break;
        VectorXd mid = 0.5 * (a + b);
        if (!correct(fam, mid, secant, mid, opts.newton_tol, 8)) break;
        int sm = kind == EventKind::BranchPoint
                     ? bordered_det_sign(fam, mid, secant)
                     : sign_of(tangent_at(fam, mid, secant)(d));
        if (sm == sa)
          a = mid;
        else
          b = mid;
      }
      BranchEvent ev;
      ev.index = static_cast<int>(branch.points.size()) - 1;
      ev.kind = kind;
      VectorXd loc = 0.5 * (a + b);
      correct(fam, loc, secant, loc, opts.newton_tol, 8);
      ev.param = loc(d);
      ev.X = loc.head(d);
      ev.tangent = tangent_at(fam, loc, secant);
      branch.events.push_back(std::move(ev));
    };

    if (prev_det != 0 && det_new != 0 && det_new != prev_det)
      localize(EventKind::BranchPoint);
    else if (sign_of(prev_tp) != 0 && sign_of(tp_new) != 0 &&
             sign_of(tp_new) != sign_of(prev_tp))
      localize(EventKind::Fold);

    y = y_new;
    t = t_new;
    prev_det = det_new;
    prev_tp = tp_new;
    branch.points.push_back(y.head(d));
    branch.param_values.push_back(y(d));

    if (y(d) < opts.param_min || y(d) > opts.param_max) break;
    if (iters <= 2) h = std::min(h * 1.3, opts.max_step);
  }
  return branch;
}

BranchSwitch switch_branch(const CanonicalModel& model,
                           const BranchEvent& branch_point,
                           const std::string& parameter, double amplitude) {
  if (amplitude == 0.0)
    throw SpecificationError("branch switching needs a nonzero amplitude");
  ParamFamily fam(model, parameter);
  const Eigen::Index d = model.dim();
  VectorXd y_bp(d + 1);
  y_bp << branch_point.X, branch_point.param;

  // The extended Jacobian at a branch point has a 2D null space containing
  // the branch tangent; the bifurcating direction is the other null vector.
  MatrixXd J = fam.extended_jacobian(y_bp);
  Eigen::JacobiSVD<MatrixXd> svd(J, Eigen::ComputeFullV);
  VectorXd t = branch_point.tangent.normalized();
  VectorXd psi = svd.matrixV().col(d);
  psi -= psi.dot(t) * t;
  if (psi.norm() < 1e-8) {
    psi = svd.matrixV().col(d - 1);
    psi -= psi.dot(t) * t;
  }
  if (psi.norm() < 1e-8)
    throw NumericalError("no transversal null direction at branch point");
  psi.normalize();

  for (double amp : {amplitude, -amplitude, 2 * amplitude, -2 * amplitude}) {
    VectorXd y = y_bp + amp * psi;
    if (!correct(fam, y, psi, y, 1e-10, 12)) continue;
    // Reject a fall-back onto the original branch: the converged point must
    // keep a transversal offset from the branch-point tangent line.
    VectorXd dy = y - y_bp;
    double transversal = (dy - dy.dot(t) * t).norm();
    if (transversal < 0.1 * std::abs(amp)) continue;
    auto m = fam.at(y(d));
    BranchSwitch bs;
    bs.equilibrium = classify_equilibrium(*m, y.head(d));
    bs.direction = dy.normalized();
    return bs;
  }
  throw NumericalError(
      "branch switch failed: corrector fell back onto the original branch "
      "(try a larger amplitude)");
}

std::vector<Equilibrium> equilibria_at(const CanonicalModel& model,
                                       const std::string& parameter,
                                       const std::vector<Branch>& branches,
                                       double value, double merge_tol) {
  auto m = model.with_params(set_param(model.params(), parameter, value));
  std::vector<Equilibrium> out;
  auto add_unique = [&](const Equilibrium& eq) {
    for (const auto& e : out)
      if ((e.X - eq.X).cwiseAbs().maxCoeff() < merge_tol) return;
    out.push_back(eq);
  };
  for (const auto& br : branches) {
    for (std::size_t i = 1; i < br.points.size(); ++i) {
      double p0 = br.param_values[i - 1], p1 = br.param_values[i];
      if ((p0 - value) * (p1 - value) > 0) continue;
      if (p0 == p1) continue;
      double w = (value - p0) / (p1 - p0);
      VectorXd guess = (1 - w) * br.points[i - 1] + w * br.points[i];
      try {
        add_unique(newton_solve(*m, guess));
      } catch (const NumericalError&) {
        continue;
      }
    }
  }
  std::sort(out.begin(), out.end(), [&](const auto& a, const auto& b) {
    return m->spatial_norm(a.states()) < m->spatial_norm(b.states());
  });
  return out;
}

CensusResult run_branch_census(const Lake1D& model,
                               const std::string& parameter,
                               const CensusOptions& opts) {
  CensusResult result;
  const ModelParams& p = model.params();
  const double target_value = get_param(p, parameter);

  // Flat equilibria via the 0D model.
  ModelParams p0 = p;
  p0.N = 0;
  Lake0D m0(p0);
  auto eq0 = find_equilibria_0d(m0);
  if (eq0.empty()) return result;

  EqContinuationOptions copts = opts.continuation;
  std::vector<BranchEvent> pending;  // flat-branch BPs (generation 1)

  auto run_both_ways = [&](const Equilibrium& start,
                           const EqContinuationOptions& base,
                           std::vector<BranchEvent>* bps) {
    for (bool backward : {false, true}) {
      EqContinuationOptions o = base;
      o.backward = backward;
      o.initial_direction.resize(0);
      Branch br = continue_equilibria(model, start, parameter, o);
      if (bps)
        for (const auto& ev : br.events)
          if (ev.kind == EventKind::BranchPoint) bps->push_back(ev);
      result.branches.push_back(std::move(br));
    }
  };

  // Continue every lifted flat equilibrium in both directions. The flat
  // curves may be disconnected (scenario I) or one folded curve
  // (scenario II); duplicates are merged in the final slice.
  for (const auto& e0 : eq0) {
    VectorXd lifted = lift_flat(e0.X, p.N);
    Equilibrium eq1 = newton_solve(model, lifted);
    run_both_ways(eq1, copts, &pending);
  }
  std::size_t n_flat_branches = result.branches.size();

  // Count distinct flat-branch events.
  auto count_unique = [](std::vector<BranchEvent>& evs) {
    std::vector<BranchEvent> uniq;
    for (auto& e : evs) {
      bool dup = false;
      for (const auto& u : uniq)
        if (std::abs(u.param - e.param) < 1e-4 &&
            (u.X - e.X).cwiseAbs().maxCoeff() < 1e-3)
          dup = true;
      if (!dup) uniq.push_back(e);
    }
    evs = uniq;
    return static_cast<int>(uniq.size());
  };
  result.num_flat_branch_points = count_unique(pending);
  std::vector<BranchEvent> flat_folds;
  for (std::size_t i = 0; i < n_flat_branches; ++i)
    for (const auto& ev : result.branches[i].events)
      if (ev.kind == EventKind::Fold) flat_folds.push_back(ev);
  result.num_flat_folds = count_unique(flat_folds);

  // Follow bifurcating branches to the requested depth.
  EqContinuationOptions bopts = copts;
  bopts.max_points = opts.bp_max_points;
  bopts.max_step = opts.bp_max_step;
  for (int depth = 1; depth <= opts.branch_depth; ++depth) {
    std::vector<BranchEvent> next;
    for (const auto& ev : pending) {
      BranchSwitch bs;
      try {
        bs = switch_branch(model, ev, parameter, opts.switch_amplitude);
      } catch (const NumericalError&) {
        continue;
      }
      for (int dir : {+1, -1}) {
        EqContinuationOptions o = bopts;
        o.initial_direction = dir * bs.direction;
        Branch br =
            continue_equilibria(model, bs.equilibrium, parameter, o);
        if (depth < opts.branch_depth)
          for (const auto& e2 : br.events)
            if (e2.kind == EventKind::BranchPoint) next.push_back(e2);
        result.branches.push_back(std::move(br));
      }
    }
    count_unique(next);
    pending = std::move(next);
  }

  result.equilibria =
      equilibria_at(model, parameter, result.branches, target_value);

  // The model is invariant under spatial reflection, so the census is
  // closed under it: add the mirror image of every asymmetric equilibrium.
  auto mirrored = model.with_params(p);
  std::size_t found = result.equilibria.size();
  for (std::size_t i = 0; i < found; ++i) {
    const Equilibrium& e = result.equilibria[i];
    if (e.symmetric) continue;
    VectorXd Xm(e.X.size());
    Eigen::Index n = e.X.size() / 2;
    Xm.head(n) = e.X.head(n).reverse();
    Xm.tail(n) = e.X.tail(n).reverse();
    bool dup = false;
    for (const auto& other : result.equilibria)
      if ((other.X - Xm).cwiseAbs().maxCoeff() < 1e-6) dup = true;
    if (!dup)
      result.equilibria.push_back(classify_equilibrium(*mirrored, Xm));
  }
  std::sort(result.equilibria.begin(), result.equilibria.end(),
            [&](const auto& a, const auto& b) {
              return model.spatial_norm(a.states()) <
                     model.spatial_norm(b.states());
            });
  return result;
}

}  // namespace lakeoc
