#include "lakeoc/homotopy.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "lakeoc/spectral.hpp"

namespace lakeoc {

namespace {

/// Piecewise-linear lookup of a nodewise table, clamped at the ends.
struct NodeTable {
  std::vector<double> t;
  MatrixXd Y;

  VectorXd at(double x) const {
    int M = static_cast<int>(t.size());
    if (x <= t.front()) return Y.col(0);
    if (x >= t.back()) return Y.col(M - 1);
    int i = static_cast<int>(std::upper_bound(t.begin(), t.end(), x) -
                             t.begin()) - 1;
    i = std::clamp(i, 0, M - 2);
    double s = (x - t[i]) / (t[i + 1] - t[i]);
    return (1 - s) * Y.col(i) + s * Y.col(i + 1);
  }
};

struct Tangent {
  NodeTable nodes;
  VectorXd zp;
};

VectorXd trapezoid_w(const std::vector<double>& t) {
  VectorXd w = VectorXd::Zero(t.size());
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    double h = t[i + 1] - t[i];
    w(i) += h / 2;
    w(i + 1) += h / 2;
  }
  return w;
}

/// Pin the continuation parameter: the last constraint row becomes
/// p(index) = value.
void set_pin_row(BvpProblem& pr, int index, double value) {
  auto& row = pr.integral_rows.back();
  int d = pr.dim;
  row.weight = [d](double) { return VectorXd::Zero(d); };
  row.param_coeff = VectorXd::Zero(pr.num_params);
  row.param_coeff(index) = 1.0;
  row.rhs = value;
}

/// The Moore-Penrose corrector plane: solutions orthogonal (in the
/// extended inner product) to the tangent, through the predictor.
void set_orthogonality_row(BvpProblem& pr, const Tangent& tang,
                           const BvpMesh& predictor) {
  auto& row = pr.integral_rows.back();
  NodeTable nodes = tang.nodes;
  row.weight = [nodes](double t) { return nodes.at(t); };
  row.param_coeff = tang.zp;
  VectorXd tw = trapezoid_w(predictor.t);
  double rhs = tang.zp.dot(predictor.p);
  for (int i = 0; i < static_cast<int>(predictor.t.size()); ++i)
    rhs += tw(i) * nodes.at(predictor.t[i]).dot(predictor.Y.col(i));
  row.rhs = rhs;
}

Tangent tangent_at(const BvpProblem& pr, const BvpMesh& mesh) {
  auto [Zn, zp] = bvp_tangent(pr, mesh);
  return {{mesh.t, std::move(Zn)}, std::move(zp)};
}

double extended_dot(const Tangent& a, const Tangent& b) {
  VectorXd tw = trapezoid_w(b.nodes.t);
  double acc = a.zp.dot(b.zp);
  for (int i = 0; i < static_cast<int>(b.nodes.t.size()); ++i)
    acc += tw(i) * a.nodes.at(b.nodes.t[i]).dot(b.nodes.Y.col(i));
  return acc;
}

void flip(Tangent& t) {
  t.nodes.Y = -t.nodes.Y;
  t.zp = -t.zp;
}

struct StepRec {
  BvpMesh mesh;
  int iters = 0;
  double h = 0;
  double arclength = 0;
};

struct DriveResult {
  std::vector<StepRec> steps;
  std::vector<RunEvent> events;
  bool reached = false;
};

/// Predictor-corrector loop shared by all homotopy variants. The problem's
/// last constraint row is owned by the driver (pin or orthogonality); the
/// parameter p(primary) is steered toward opts.kappa_target.
DriveResult drive(BvpProblem& pr, const BvpMesh& start, int primary,
                  const HomotopyOptions& opts,
                  const std::function<bool(const BvpMesh&)>& admissible,
                  const std::function<bool(const BvpMesh&)>& valid) {
  DriveResult out;
  const double target = opts.kappa_target;

  auto accept = [&](BvpResult&& res, double h, double arc) {
    out.steps.push_back({std::move(res.mesh), res.newton_iters, h, arc});
    if (!admissible(out.steps.back().mesh))
      out.events.push_back(
          {RunEventKind::AdmissibilityViolation,
           static_cast<int>(out.steps.size()) - 1});
  };

  set_pin_row(pr, primary, start.p(primary));
  accept(solve_bvp(pr, start, opts.bvp), 0, 0);
  if (std::abs(out.steps.back().mesh.p(primary) - target) < 1e-8) {
    out.events.push_back({RunEventKind::TargetHit, 0});
    out.reached = true;
    return out;
  }

  Tangent tang = tangent_at(pr, out.steps.back().mesh);
  // Orient the first tangent toward the kappa target.
  double dir = tang.zp(primary) * (target - out.steps.back().mesh.p(primary));
  if (dir < 0) flip(tang);

  double h = std::clamp(opts.init_step, opts.min_step, opts.max_step);
  double arc = 0;
  int min_fails = 0;

  while (static_cast<int>(out.steps.size()) <= opts.max_steps) {
    const BvpMesh& prev = out.steps.back().mesh;
    BvpMesh predictor = prev;
    predictor.Y += h * tang.nodes.Y;
    predictor.p += h * tang.zp;
    set_orthogonality_row(pr, tang, predictor);

    BvpResult res;
    bool ok = true;
    try {
      res = solve_bvp(pr, predictor, opts.bvp);
      ok = valid(res.mesh);
    } catch (const NumericalError&) {
      ok = false;
    }
    if (!ok) {
      if (h <= opts.min_step * (1 + 1e-12)) {
        if (++min_fails >= 3) {
          out.events.push_back({RunEventKind::Stall,
                                static_cast<int>(out.steps.size()) - 1});
          return out;
        }
      } else {
        h = std::max(h / 2, opts.min_step);
      }
      continue;
    }
    min_fails = 0;

    double k_prev = prev.p(primary);
    double k_new = res.mesh.p(primary);
    int iters = res.newton_iters;

    bool crossed = (k_prev - target) * (k_new - target) < 0 ||
                   std::abs(k_new - target) < 1e-8;
    if (crossed && std::abs(k_new - target) >= 1e-8) {
      // Interpolate between the previous step and the overshooting
      // corrector, then re-correct with the parameter pinned at the
      // target; only the pinned solution enters the run.
      const BvpMesh& a = prev;
      const BvpMesh& b = res.mesh;
      double theta = (target - k_prev) / (k_new - k_prev);
      BvpMesh guess = b;
      NodeTable ta{a.t, a.Y};
      for (int i = 0; i < static_cast<int>(b.t.size()); ++i)
        guess.Y.col(i) = (1 - theta) * ta.at(b.t[i]) + theta * b.Y.col(i);
      guess.p = (1 - theta) * a.p + theta * b.p;
      guess.p(primary) = target;
      set_pin_row(pr, primary, target);
      bool pinned = false;
      for (const BvpMesh* g : {static_cast<const BvpMesh*>(&guess), &b}) {
        BvpMesh start2 = *g;
        start2.p(primary) = target;
        try {
          BvpResult fin = solve_bvp(pr, start2, opts.bvp);
          if (!valid(fin.mesh)) continue;
          arc += theta * h;
          accept(std::move(fin), theta * h, arc);
          pinned = true;
          break;
        } catch (const NumericalError&) {
        }
      }
      if (!pinned) {
        // Could not land exactly on the target; keep the overshooting
        // step and continue.
        arc += h;
        accept(std::move(res), h, arc);
        set_orthogonality_row(pr, tang, predictor);
        Tangent next = tangent_at(pr, out.steps.back().mesh);
        if (extended_dot(tang, next) < 0) flip(next);
        tang = std::move(next);
        continue;
      }
      out.events.push_back({RunEventKind::TargetHit,
                            static_cast<int>(out.steps.size()) - 1});
      out.reached = true;
      return out;
    }

    arc += h;
    accept(std::move(res), h, arc);
    if (crossed) {
      out.events.push_back({RunEventKind::TargetHit,
                            static_cast<int>(out.steps.size()) - 1});
      out.reached = true;
      return out;
    }

    Tangent next = tangent_at(pr, out.steps.back().mesh);
    if (extended_dot(tang, next) < 0) flip(next);
    tang = std::move(next);
    if (iters <= 2) h = std::min(h * 1.3, opts.max_step);
  }
  return out;
}

/// BVP for a stable-path homotopy toward `target`. The initial condition
/// is X(0) = a1 + (1 - kappa)(a0 - a1) + sum_i kappa_i v_i: the run moves
/// from a0 (kappa = 0) toward a1. With a free horizon the last parameter
/// is T and the end-distance row |X(1) - Xhat| = eps is appended.
BvpProblem build_stable_problem(const CanonicalModel& model,
                                const Equilibrium& target,
                                const VectorXd& a0, const VectorXd& a1,
                                const std::vector<VectorXd>& vecs,
                                double T_fixed, bool moving, double eps) {
  const int n = model.num_states();
  const int d = 2 * n;
  const MatrixXd F = asymptotic_bc_matrix(target.spectral);
  const int nu = static_cast<int>(F.cols());
  const int nk = 1 + static_cast<int>(vecs.size());
  const int np = nk + (moving ? 1 : 0);
  const VectorXd Xhat = target.X;

  BvpProblem pr;
  pr.dim = d;
  pr.num_params = np;
  pr.f = [&model, T_fixed, moving](double, const VectorXd& X,
                                   const VectorXd& p) {
    double T = moving ? p(p.size() - 1) : T_fixed;
    return (T * model.rhs(X)).eval();
  };
  pr.dfdX = [&model, T_fixed, moving](double, const VectorXd& X,
                                      const VectorXd& p) {
    double T = moving ? p(p.size() - 1) : T_fixed;
    return (T * model.jacobian(X)).eval();
  };
  pr.dfdp = [&model, d, np, moving](double, const VectorXd& X,
                                    const VectorXd&) {
    MatrixXd fp = MatrixXd::Zero(d, np);
    if (moving) fp.col(np - 1) = model.rhs(X);
    return fp;
  };

  const int rows = n + nu + (moving ? 1 : 0);
  pr.bc = [=](const VectorXd& Xa, const VectorXd& Xb, const VectorXd& p) {
    VectorXd line = a1 + (1 - p(0)) * (a0 - a1);
    for (std::size_t i = 0; i < vecs.size(); ++i)
      line += p(1 + static_cast<int>(i)) * vecs[i];
    VectorXd g(rows);
    g.head(n) = Xa.head(n) - line;
    g.segment(n, nu) = F.transpose() * (Xhat - Xb);
    if (moving) g(rows - 1) = (Xb - Xhat).norm() - eps;
    return g;
  };
  pr.dbc = [=](const VectorXd&, const VectorXd& Xb, const VectorXd&) {
    MatrixXd Ga = MatrixXd::Zero(rows, d);
    MatrixXd Gb = MatrixXd::Zero(rows, d);
    MatrixXd Gp = MatrixXd::Zero(rows, np);
    Ga.topLeftCorner(n, n).setIdentity();
    Gb.block(n, 0, nu, d) = -F.transpose();
    Gp.col(0).head(n) = a0 - a1;
    for (std::size_t i = 0; i < vecs.size(); ++i)
      Gp.col(1 + static_cast<int>(i)).head(n) = -vecs[i];
    if (moving) {
      VectorXd delta = Xb - Xhat;
      double nrm = std::max(delta.norm(), 1e-300);
      Gb.row(rows - 1) = delta.transpose() / nrm;
    }
    return std::make_tuple(Ga, Gb, Gp);
  };
  pr.integral_rows.emplace_back();  // driver-owned constraint row
  return pr;
}

std::function<bool(const BvpMesh&)> node_admissibility(
    const CanonicalModel& model, int copies) {
  int d = 2 * model.num_states();
  return [&model, copies, d](const BvpMesh& mesh) {
    for (int i = 0; i < static_cast<int>(mesh.t.size()); ++i)
      for (int k = 0; k < copies; ++k)
        if (!model.admissible(mesh.Y.col(i).segment(k * d, d))) return false;
    return true;
  };
}

std::function<bool(const BvpMesh&)> end_distance_guard(const VectorXd& Xhat,
                                                       double factor) {
  double lim = factor * (1 + Xhat.norm());
  return [Xhat, lim](const BvpMesh& mesh) {
    return (mesh.Y.col(mesh.Y.cols() - 1) - Xhat).norm() <= lim;
  };
}

ContinuationRun collect_run(const CanonicalModel& model,
                            HomotopyVariant variant, DriveResult&& dr,
                            const VectorXd& x0, const VectorXd& x1,
                            const std::vector<VectorXd>& vecs, double T_fixed,
                            bool moving, double eps) {
  ContinuationRun run;
  run.variant = variant;
  run.free_vectors = vecs;
  run.horizon = T_fixed;
  run.moving_horizon = moving;
  run.epsilon = eps;
  run.target_reached = dr.reached;
  run.events = std::move(dr.events);
  run.slice.x0 = x0;
  run.slice.x1 = x1;
  for (auto& s : dr.steps) {
    SliceRecord rec;
    rec.kappa = s.mesh.p(0);
    rec.arclength = s.arclength;
    rec.X0 = s.mesh.Y.col(0);
    rec.objective = model.objective_value(rec.X0);
    rec.admissible = true;
    HomotopyStep step;
    step.kappas = s.mesh.p;
    step.T = moving ? s.mesh.p(s.mesh.p.size() - 1) : T_fixed;
    step.newton_iters = s.iters;
    step.step_width = s.h;
    step.mesh = std::move(s.mesh);
    run.steps.push_back(std::move(step));
    run.slice.records.push_back(std::move(rec));
  }
  for (const auto& ev : run.events)
    if (ev.kind == RunEventKind::AdmissibilityViolation)
      run.slice.records[ev.step].admissible = false;
  return run;
}

int numeric_rank(const MatrixXd& A) {
  Eigen::JacobiSVD<MatrixXd> svd(A);
  double thresh = std::max(A.rows(), A.cols()) * 1e-12 *
                  (svd.singularValues().size() ? svd.singularValues()(0) : 0);
  int r = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > thresh) ++r;
  return r;
}

double pick_horizon(const Equilibrium& target, const HomotopyOptions& opts) {
  return opts.horizon > 0 ? opts.horizon : truncation_time(target.spectral);
}

/// Resample a path mesh onto prescribed nodes via its quintic interpolant.
MatrixXd resample_path(const CanonicalModel& model, const PathSolution& path,
                       const std::vector<double>& t) {
  BvpProblem pr;
  pr.dim = static_cast<int>(path.mesh.Y.rows());
  pr.f = [&model, T = path.T](double, const VectorXd& X, const VectorXd&) {
    return (T * model.rhs(X)).eval();
  };
  MatrixXd out(pr.dim, t.size());
  for (std::size_t i = 0; i < t.size(); ++i)
    out.col(i) = eval_solution(pr, path.mesh, t[i]);
  return out;
}

}  // namespace

ContinuationRun stable_path_homotopy(const CanonicalModel& model,
                                     const Equilibrium& target,
                                     const VectorXd& x0,
                                     const HomotopyOptions& opts) {
  const int n = model.num_states();
  if (!target.spectral.spp)
    throw SpecificationError(
        "stable_path_homotopy needs a target with the saddle point "
        "property; use the non-SPP variant");
  if (x0.size() != n)
    throw DimensionError("anchor state vector has the wrong length");

  VectorXd x1 = target.states();
  double T = pick_horizon(target, opts);
  // The run moves from the equilibrium states (kappa = 0) to x0.
  BvpProblem pr = build_stable_problem(model, target, x1, x0, {}, T,
                                       false, 0);
  BvpMesh start = BvpMesh::uniform(opts.initial_intervals, target.X,
                                   VectorXd::Zero(1));
  if ((x0 - x1).cwiseAbs().maxCoeff() < 1e-10)
    start.p(0) = opts.kappa_target;  // the line is degenerate
  DriveResult dr =
      drive(pr, start, 0, opts, node_admissibility(model, 1),
            end_distance_guard(target.X, opts.end_distance_factor));
  return collect_run(model, HomotopyVariant::Spp, std::move(dr), x0, x1, {},
                     T, false, 0);
}

ContinuationRun stable_path_homotopy_nonspp(
    const CanonicalModel& model, const Equilibrium& target,
    const VectorXd& x0, const VectorXd& x1,
    const std::vector<VectorXd>& free_vectors, const HomotopyOptions& opts) {
  const int n = model.num_states();
  if (x0.size() != n || x1.size() != n)
    throw DimensionError("anchor state vectors have the wrong length");
  if (target.spectral.n_c != 0)
    throw SpecificationError("target equilibrium is not hyperbolic");
  int needed = n - target.spectral.n_s;
  if (static_cast<int>(free_vectors.size()) != needed)
    throw SpecificationError("need one free vector per missing stable "
                             "dimension (" + std::to_string(needed) + ")");
  MatrixXd span(n, 1 + needed);
  span.col(0) = x0 - x1;
  for (int i = 0; i < needed; ++i) {
    if (free_vectors[i].size() != n)
      throw DimensionError("free vector has the wrong length");
    span.col(1 + i) = free_vectors[i];
  }
  if (numeric_rank(span) != 1 + needed)
    throw SpecificationError(
        "anchor difference and free vectors must span independently");
  if ((x0 - target.states()).cwiseAbs().maxCoeff() > 1e-8)
    throw SpecificationError(
        "the run starts from the constant equilibrium solution, so x0 "
        "must equal the target's states");

  double T = pick_horizon(target, opts);
  BvpProblem pr = build_stable_problem(model, target, x0, x1, free_vectors,
                                       T, false, 0);
  BvpMesh start = BvpMesh::uniform(
      opts.initial_intervals, target.X,
      VectorXd::Zero(1 + static_cast<int>(free_vectors.size())));
  DriveResult dr =
      drive(pr, start, 0, opts, node_admissibility(model, 1),
            end_distance_guard(target.X, opts.end_distance_factor));
  return collect_run(model, HomotopyVariant::NonSpp, std::move(dr), x0, x1,
                     free_vectors, T, false, 0);
}

ContinuationRun enable_moving_horizon(const ContinuationRun& run,
                                      const CanonicalModel& model,
                                      const Equilibrium& target,
                                      const HomotopyOptions& opts) {
  if (run.steps.empty())
    throw SpecificationError("cannot extend a run without accepted steps");
  const BvpMesh& last = run.steps.back().mesh;
  VectorXd a0, a1;
  if (run.variant == HomotopyVariant::Spp) {
    a0 = run.slice.x1;
    a1 = run.slice.x0;
  } else {
    a0 = run.slice.x0;
    a1 = run.slice.x1;
  }
  double T0 = run.steps.back().T;
  double eps = (last.Y.col(last.Y.cols() - 1) - target.X).norm();
  BvpProblem pr = build_stable_problem(model, target, a0, a1,
                                       run.free_vectors, 0, true, eps);
  BvpMesh start = last;
  start.p.conservativeResize(last.p.size() + 1);
  start.p(start.p.size() - 1) = T0;
  DriveResult dr =
      drive(pr, start, 0, opts, node_admissibility(model, 1),
            [](const BvpMesh&) { return true; });
  ContinuationRun cont =
      collect_run(model, run.variant, std::move(dr), run.slice.x0,
                  run.slice.x1, run.free_vectors, T0, true, eps);
  return cont;
}

VectorXd hamiltonian_gradient(const CanonicalModel& model,
                              const VectorXd& X) {
  int n = model.num_states();
  VectorXd r = model.rhs(X);
  VectorXd g(2 * n);
  g.head(n) = model.params().rho * X.tail(n) - r.tail(n);
  g.tail(n) = r.head(n);
  return g;
}

PathSolution final_path(const ContinuationRun& run,
                        const Equilibrium& target) {
  if (run.steps.empty())
    throw SpecificationError("run has no accepted steps");
  PathSolution p;
  p.mesh = run.steps.back().mesh;
  p.T = run.steps.back().T;
  p.target = target;
  return p;
}

ContinuationRun continue_stable_path(const CanonicalModel& model,
                                     const PathSolution& start,
                                     const VectorXd& x0,
                                     const HomotopyOptions& opts) {
  const int n = model.num_states();
  if (x0.size() != n)
    throw DimensionError("anchor state vector has the wrong length");
  if (start.mesh.Y.rows() != 2 * n)
    throw DimensionError("starting path has the wrong dimension");
  if (!start.target.spectral.spp)
    throw SpecificationError(
        "continue_stable_path needs a path toward an SPP target");
  const VectorXd a0 = start.mesh.Y.col(0).head(n);
  const double T = start.T;
  BvpProblem pr =
      build_stable_problem(model, start.target, a0, x0, {}, T, false, 0);
  BvpMesh sm = start.mesh;
  sm.p = VectorXd::Zero(1);
  DriveResult dr = drive(
      pr, sm, 0, opts, node_admissibility(model, 1),
      end_distance_guard(start.target.X, opts.end_distance_factor));
  return collect_run(model, HomotopyVariant::Spp, std::move(dr), x0, a0, {},
                     T, false, 0);
}

PathSolution solve_on_slice(const CanonicalModel& model,
                            const ContinuationRun& run,
                            const Equilibrium& target, double kappa,
                            std::size_t start_index,
                            const HomotopyOptions& opts) {
  if (start_index >= run.steps.size())
    throw SpecificationError("slice step index out of range");
  VectorXd a0, a1;
  if (run.variant == HomotopyVariant::Spp) {
    a0 = run.slice.x1;
    a1 = run.slice.x0;
  } else {
    a0 = run.slice.x0;
    a1 = run.slice.x1;
  }
  BvpProblem pr = build_stable_problem(model, target, a0, a1,
                                       run.free_vectors, run.horizon,
                                       run.moving_horizon, run.epsilon);
  set_pin_row(pr, 0, kappa);
  BvpMesh start = run.steps[start_index].mesh;
  start.p(0) = kappa;
  BvpResult res = solve_bvp(pr, start, opts.bvp);
  if (!node_admissibility(model, 1)(res.mesh))
    throw NumericalError("pinned solution violates admissibility");
  if (!run.moving_horizon &&
      !end_distance_guard(target.X, opts.end_distance_factor)(res.mesh))
    throw NumericalError("pinned solution drifts from the target");
  PathSolution p;
  p.T = run.moving_horizon ? res.mesh.p(res.mesh.p.size() - 1)
                           : run.horizon;
  p.mesh = std::move(res.mesh);
  p.target = target;
  return p;
}

IndifferenceRun continue_indifference_point(
    const CanonicalModel& model, const PathSolution& path1,
    const PathSolution& path2, const VectorXd& from_xI,
    const VectorXd& to_xI, const VectorXd& V, const HomotopyOptions& opts) {
  const int n = model.num_states();
  const int d2 = 2 * n;
  const int d = 4 * n;
  if (from_xI.size() != n || to_xI.size() != n || V.size() != n)
    throw DimensionError("state vectors have the wrong length");
  if (!path1.target.spectral.spp || !path2.target.spectral.spp)
    throw SpecificationError(
        "both paths must converge to SPP equilibria");
  MatrixXd span(n, 2);
  span.col(0) = from_xI - to_xI;
  span.col(1) = V;
  if (numeric_rank(span) != 2)
    throw SpecificationError(
        "the correction vector must leave the anchor line");

  const double T1 = path1.T, T2 = path2.T;
  const MatrixXd F1 = asymptotic_bc_matrix(path1.target.spectral);
  const MatrixXd F2 = asymptotic_bc_matrix(path2.target.spectral);
  const VectorXd Y1 = path1.target.X, Y2 = path2.target.X;
  const double rho = model.params().rho;

  BvpProblem pr;
  pr.dim = d;
  pr.num_params = 2;
  pr.f = [&model, T1, T2, d2](double, const VectorXd& X, const VectorXd&) {
    VectorXd f(2 * d2);
    f.head(d2) = T1 * model.rhs(X.head(d2));
    f.tail(d2) = T2 * model.rhs(X.tail(d2));
    return f;
  };
  pr.dfdX = [&model, T1, T2, d2](double, const VectorXd& X,
                                 const VectorXd&) {
    MatrixXd A = MatrixXd::Zero(2 * d2, 2 * d2);
    A.topLeftCorner(d2, d2) = T1 * model.jacobian(X.head(d2));
    A.bottomRightCorner(d2, d2) = T2 * model.jacobian(X.tail(d2));
    return A;
  };
  pr.dfdp = [d](double, const VectorXd&, const VectorXd&) {
    return MatrixXd::Zero(d, 2);
  };

  auto grad_h = [&model](const VectorXd& X) {
    return hamiltonian_gradient(model, X);
  };

  const int rows = 4 * n + 1;
  pr.bc = [=, &model](const VectorXd& Xa, const VectorXd& Xb,
                      const VectorXd& p) {
    VectorXd g(rows);
    g.head(n) = Xa.head(n) - Xa.segment(d2, n);
    g(n) = model.hamiltonian(Xa.head(d2)) - model.hamiltonian(Xa.tail(d2));
    g.segment(n + 1, n) = F1.transpose() * (Y1 - Xb.head(d2));
    g.segment(2 * n + 1, n) = F2.transpose() * (Y2 - Xb.tail(d2));
    VectorXd line = to_xI + (1 - p(0)) * (from_xI - to_xI) + p(1) * V;
    g.segment(3 * n + 1, n) = Xa.head(n) - line;
    return g;
  };
  pr.dbc = [=](const VectorXd& Xa, const VectorXd&, const VectorXd&) {
    MatrixXd Ga = MatrixXd::Zero(rows, d);
    MatrixXd Gb = MatrixXd::Zero(rows, d);
    MatrixXd Gp = MatrixXd::Zero(rows, 2);
    Ga.topLeftCorner(n, n).setIdentity();
    Ga.block(0, d2, n, n) = -MatrixXd::Identity(n, n);
    Ga.row(n).head(d2) = grad_h(Xa.head(d2)).transpose();
    Ga.row(n).tail(d2) = -grad_h(Xa.tail(d2)).transpose();
    Gb.block(n + 1, 0, n, d2) = -F1.transpose();
    Gb.block(2 * n + 1, d2, n, d2) = -F2.transpose();
    Ga.block(3 * n + 1, 0, n, n).setIdentity();
    Gp.col(0).segment(3 * n + 1, n) = from_xI - to_xI;
    Gp.col(1).segment(3 * n + 1, n) = -V;
    return std::make_tuple(Ga, Gb, Gp);
  };
  pr.integral_rows.emplace_back();

  // Stack both paths on a common grid as the initial guess.
  int intervals = std::max<int>(
      opts.initial_intervals,
      std::max(path1.mesh.t.size(), path2.mesh.t.size()) - 1);
  intervals = std::min(intervals, 400);
  BvpMesh start = BvpMesh::uniform(intervals, VectorXd::Zero(d),
                                   VectorXd::Zero(2));
  start.Y.topRows(d2) = resample_path(model, path1, start.t);
  start.Y.bottomRows(d2) = resample_path(model, path2, start.t);

  double lim1 = opts.end_distance_factor * (1 + Y1.norm());
  double lim2 = opts.end_distance_factor * (1 + Y2.norm());
  auto valid = [d2, Y1, Y2, lim1, lim2](const BvpMesh& mesh) {
    VectorXd endv = mesh.Y.col(mesh.Y.cols() - 1);
    return (endv.head(d2) - Y1).norm() <= lim1 &&
           (endv.tail(d2) - Y2).norm() <= lim2;
  };
  DriveResult dr =
      drive(pr, start, 0, opts, node_admissibility(model, 2), valid);

  IndifferenceRun run;
  run.T1 = T1;
  run.T2 = T2;
  run.target_reached = dr.reached;
  run.events = std::move(dr.events);
  for (auto& s : dr.steps) {
    IndifferenceStep step;
    step.kappa1 = s.mesh.p(0);
    step.kappa2 = s.mesh.p(1);
    step.xI = s.mesh.Y.col(0).head(n);
    step.objective = model.hamiltonian(s.mesh.Y.col(0).head(d2)) / rho;
    step.hamiltonian_gap =
        std::abs(model.hamiltonian(s.mesh.Y.col(0).head(d2)) -
                 model.hamiltonian(s.mesh.Y.col(0).tail(d2)));
    step.newton_iters = s.iters;
    step.mesh = std::move(s.mesh);
    run.steps.push_back(std::move(step));
  }
  return run;
}

}  // namespace lakeoc
