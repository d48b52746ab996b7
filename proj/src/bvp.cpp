#include "lakeoc/bvp.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>

namespace lakeoc {

namespace {

using SparseMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// Inverse of the condition matrix of the quintic Hermite interpolant on a
/// unit interval: value and (scaled) slope at s = 0, 1/2, 1.
const Eigen::Matrix<double, 6, 6>& hermite_inverse() {
  static const Eigen::Matrix<double, 6, 6> inv = [] {
    Eigen::Matrix<double, 6, 6> A;
    for (int k = 0; k < 6; ++k) {
      A(0, k) = k == 0 ? 1.0 : 0.0;
      A(1, k) = std::pow(0.5, k);
      A(2, k) = 1.0;
      A(3, k) = k == 1 ? 1.0 : 0.0;
      A(4, k) = k == 0 ? 0.0 : k * std::pow(0.5, k - 1);
      A(5, k) = k;
    }
    return A.inverse().eval();
  }();
  return inv;
}

VectorXd trapezoid_weights(const std::vector<double>& t) {
  int M = static_cast<int>(t.size());
  VectorXd w = VectorXd::Zero(M);
  for (int i = 0; i + 1 < M; ++i) {
    double h = t[i + 1] - t[i];
    w(i) += h / 2;
    w(i + 1) += h / 2;
  }
  return w;
}

struct Workspace {
  int M, d, np, nbc, nlin, n_tot;
  VectorXd tw;  // trapezoid weights
};

Workspace make_workspace(const BvpProblem& pr, const BvpMesh& mesh) {
  Workspace ws;
  ws.M = static_cast<int>(mesh.t.size());
  ws.d = pr.dim;
  ws.np = pr.num_params;
  ws.nlin = static_cast<int>(pr.integral_rows.size());
  ws.nbc = pr.num_bc();
  ws.n_tot = ws.M * ws.d + ws.np;
  if (ws.M < 2 || mesh.Y.rows() != ws.d || mesh.Y.cols() != ws.M ||
      mesh.p.size() != ws.np)
    throw DimensionError("mesh does not match the problem dimensions");
  if (ws.nbc < 0)
    throw SpecificationError("more constraint rows than unknowns");
  ws.tw = trapezoid_weights(mesh.t);
  return ws;
}

/// Residual vector and (optionally) sparse Jacobian of the full system.
VectorXd assemble(const BvpProblem& pr, const BvpMesh& mesh,
                  const Workspace& ws, SparseMat* jac) {
  const int M = ws.M, d = ws.d, np = ws.np;
  VectorXd R(ws.n_tot);
  std::vector<Triplet> trip;
  if (jac) trip.reserve(static_cast<std::size_t>(M) * d * (2 * d + np) + 64);

  auto col_of = [&](int node) { return node * d; };
  const int pcol = M * d;

  for (int i = 0; i + 1 < M; ++i) {
    double ta = mesh.t[i], tb = mesh.t[i + 1], h = tb - ta;
    double tm = ta + h / 2;
    VectorXd Ya = mesh.Y.col(i), Yb = mesh.Y.col(i + 1);
    VectorXd fa = pr.f(ta, Ya, mesh.p);
    VectorXd fb = pr.f(tb, Yb, mesh.p);
    VectorXd Xm = (Ya + Yb) / 2 - (h / 8) * (fb - fa);
    VectorXd fm = pr.f(tm, Xm, mesh.p);
    R.segment(i * d, d) = Yb - Ya - (h / 6) * (fa + 4 * fm + fb);

    if (jac) {
      MatrixXd Aa = pr.dfdX(ta, Ya, mesh.p);
      MatrixXd Ab = pr.dfdX(tb, Yb, mesh.p);
      MatrixXd Am = pr.dfdX(tm, Xm, mesh.p);
      MatrixXd I = MatrixXd::Identity(d, d);
      MatrixXd Ma =
          -I - (h / 6) * (Aa + 4 * Am * (I / 2 + (h / 8) * Aa));
      MatrixXd Mb =
          I - (h / 6) * (Ab + 4 * Am * (I / 2 - (h / 8) * Ab));
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) {
          trip.emplace_back(i * d + r, col_of(i) + c, Ma(r, c));
          trip.emplace_back(i * d + r, col_of(i + 1) + c, Mb(r, c));
        }
      if (np > 0) {
        MatrixXd fpa = pr.dfdp(ta, Ya, mesh.p);
        MatrixXd fpb = pr.dfdp(tb, Yb, mesh.p);
        MatrixXd fpm = pr.dfdp(tm, Xm, mesh.p);
        MatrixXd Xmp = -(h / 8) * (fpb - fpa);
        MatrixXd Rp = -(h / 6) * (fpa + 4 * (fpm + Am * Xmp) + fpb);
        for (int r = 0; r < d; ++r)
          for (int c = 0; c < np; ++c)
            trip.emplace_back(i * d + r, pcol + c, Rp(r, c));
      }
    }
  }

  int row0 = (M - 1) * d;
  VectorXd g = pr.bc(mesh.Y.col(0), mesh.Y.col(M - 1), mesh.p);
  if (g.size() != ws.nbc)
    throw DimensionError("boundary condition has wrong row count");
  R.segment(row0, ws.nbc) = g;
  if (jac) {
    auto [Ga, Gb, Gp] = pr.dbc(mesh.Y.col(0), mesh.Y.col(M - 1), mesh.p);
    for (int r = 0; r < ws.nbc; ++r) {
      for (int c = 0; c < d; ++c) {
        trip.emplace_back(row0 + r, col_of(0) + c, Ga(r, c));
        trip.emplace_back(row0 + r, col_of(M - 1) + c, Gb(r, c));
      }
      for (int c = 0; c < np; ++c)
        trip.emplace_back(row0 + r, pcol + c, Gp(r, c));
    }
  }

  for (int k = 0; k < ws.nlin; ++k) {
    const auto& lr = pr.integral_rows[k];
    int row = row0 + ws.nbc + k;
    double val = -lr.rhs;
    for (int i = 0; i < M; ++i) {
      VectorXd V = ws.tw(i) * lr.weight(mesh.t[i]);
      val += V.dot(mesh.Y.col(i));
      if (jac)
        for (int c = 0; c < d; ++c)
          trip.emplace_back(row, col_of(i) + c, V(c));
    }
    for (int c = 0; c < np; ++c) {
      val += lr.param_coeff(c) * mesh.p(c);
      if (jac) trip.emplace_back(row, pcol + c, lr.param_coeff(c));
    }
    R(row) = val;
  }

  if (jac) {
    jac->resize(ws.n_tot, ws.n_tot);
    jac->setFromTriplets(trip.begin(), trip.end());
  }
  return R;
}

void apply_delta(BvpMesh& mesh, const Workspace& ws, const VectorXd& dz,
                 double alpha) {
  for (int i = 0; i < ws.M; ++i)
    mesh.Y.col(i) += alpha * dz.segment(i * ws.d, ws.d);
  if (ws.np > 0) mesh.p += alpha * dz.tail(ws.np);
}

int newton(const BvpProblem& pr, BvpMesh& mesh, const Workspace& ws,
           const BvpOptions& opts) {
  double res = std::numeric_limits<double>::infinity();
  for (int it = 0; it < opts.max_newton; ++it) {
    SparseMat J;
    VectorXd R = assemble(pr, mesh, ws, &J);
    res = R.cwiseAbs().maxCoeff();
    if (res < opts.newton_tol) return it;
    Eigen::SparseLU<SparseMat> lu(J);
    if (lu.info() != Eigen::Success)
      throw NonConvergenceError("singular collocation Jacobian", res);
    VectorXd dz = lu.solve(-R);
    if (!dz.allFinite())
      throw NonConvergenceError("collocation step not finite", res);
    double alpha = 1.0;
    BvpMesh saved = mesh;
    for (int hlv = 0;; ++hlv) {
      mesh = saved;
      apply_delta(mesh, ws, dz, alpha);
      double rn;
      try {
        rn = assemble(pr, mesh, ws, nullptr).cwiseAbs().maxCoeff();
      } catch (const NumericalError&) {
        rn = std::numeric_limits<double>::infinity();
      }
      if (rn < res || rn < opts.newton_tol) break;
      if (hlv >= opts.max_halvings) break;  // accept the damped step anyway
      alpha /= 2;
    }
  }
  VectorXd R = assemble(pr, mesh, ws, nullptr);
  res = R.cwiseAbs().maxCoeff();
  if (res < opts.newton_tol) return opts.max_newton;
  throw NonConvergenceError("collocation Newton did not converge", res);
}

/// Interpolant coefficients (6 x d) for one interval.
MatrixXd interval_coefficients(const BvpProblem& pr, const BvpMesh& mesh,
                               int i) {
  double ta = mesh.t[i], tb = mesh.t[i + 1], h = tb - ta;
  VectorXd Ya = mesh.Y.col(i), Yb = mesh.Y.col(i + 1);
  VectorXd fa = pr.f(ta, Ya, mesh.p);
  VectorXd fb = pr.f(tb, Yb, mesh.p);
  VectorXd Xm = (Ya + Yb) / 2 - (h / 8) * (fb - fa);
  VectorXd fm = pr.f(ta + h / 2, Xm, mesh.p);
  MatrixXd cond(6, pr.dim);
  cond.row(0) = Ya.transpose();
  cond.row(1) = Xm.transpose();
  cond.row(2) = Yb.transpose();
  cond.row(3) = h * fa.transpose();
  cond.row(4) = h * fm.transpose();
  cond.row(5) = h * fb.transpose();
  return hermite_inverse() * cond;
}

/// Largest scaled defect of the quintic interpolant on interval i.
double interval_defect(const BvpProblem& pr, const BvpMesh& mesh, int i,
                       const BvpOptions& opts) {
  MatrixXd C = interval_coefficients(pr, mesh, i);
  double ta = mesh.t[i], h = mesh.t[i + 1] - mesh.t[i];
  double worst = 0;
  for (double s : {0.25, 0.75}) {
    VectorXd val = VectorXd::Zero(pr.dim), der = VectorXd::Zero(pr.dim);
    double sk = 1.0;
    for (int k = 0; k < 6; ++k) {
      val += sk * C.row(k).transpose();
      if (k < 5) der += (k + 1) * sk * C.row(k + 1).transpose();
      sk *= s;
    }
    VectorXd fv = pr.f(ta + s * h, val, mesh.p);
    VectorXd defect = der / h - fv;
    for (int j = 0; j < pr.dim; ++j) {
      double scale = opts.abs_tol + opts.rel_tol * std::abs(fv(j));
      worst = std::max(worst, std::abs(defect(j)) / scale);
    }
  }
  return worst;
}

}  // namespace

int BvpProblem::num_bc() const {
  return dim + num_params - static_cast<int>(integral_rows.size());
}

BvpMesh BvpMesh::uniform(int intervals, const VectorXd& value,
                         const VectorXd& params) {
  if (intervals < 1) throw SpecificationError("need at least one interval");
  BvpMesh mesh;
  mesh.t.resize(intervals + 1);
  for (int i = 0; i <= intervals; ++i)
    mesh.t[i] = static_cast<double>(i) / intervals;
  mesh.Y = value.replicate(1, intervals + 1);
  mesh.p = params;
  return mesh;
}

VectorXd eval_solution(const BvpProblem& problem, const BvpMesh& mesh,
                       double t) {
  int M = static_cast<int>(mesh.t.size());
  if (t <= mesh.t.front()) return mesh.Y.col(0);
  if (t >= mesh.t.back()) return mesh.Y.col(M - 1);
  int i = static_cast<int>(std::upper_bound(mesh.t.begin(), mesh.t.end(), t) -
                           mesh.t.begin()) - 1;
  i = std::clamp(i, 0, M - 2);
  MatrixXd C = interval_coefficients(problem, mesh, i);
  double s = (t - mesh.t[i]) / (mesh.t[i + 1] - mesh.t[i]);
  VectorXd val = VectorXd::Zero(problem.dim);
  double sk = 1.0;
  for (int k = 0; k < 6; ++k) {
    val += sk * C.row(k).transpose();
    sk *= s;
  }
  return val;
}

double mesh_integral(const BvpMesh& mesh,
                     const std::function<double(double, const VectorXd&)>& g) {
  VectorXd w = trapezoid_weights(mesh.t);
  double acc = 0;
  for (int i = 0; i < static_cast<int>(mesh.t.size()); ++i)
    acc += w(i) * g(mesh.t[i], mesh.Y.col(i));
  return acc;
}

BvpResult solve_bvp(const BvpProblem& problem, const BvpMesh& guess,
                    const BvpOptions& opts) {
  BvpResult result;
  result.mesh = guess;
  for (int pass = 0;; ++pass) {
    Workspace ws = make_workspace(problem, result.mesh);
    result.newton_iters = newton(problem, result.mesh, ws, opts);
    int intervals = ws.M - 1;
    std::vector<double> defects(intervals);
    result.defect = 0;
    for (int i = 0; i < intervals; ++i) {
      defects[i] = interval_defect(problem, result.mesh, i, opts);
      result.defect = std::max(result.defect, defects[i]);
    }
    if (!opts.adapt || result.defect <= 1.0) {
      result.converged = true;
      return result;
    }
    if (pass >= opts.max_refinements)
      throw NonConvergenceError("mesh refinement limit reached",
                                result.defect);

    // Split every offending interval; badly failing ones get two points.
    std::vector<double> nt;
    nt.push_back(result.mesh.t.front());
    for (int i = 0; i < intervals; ++i) {
      double a = result.mesh.t[i], b = result.mesh.t[i + 1];
      if (defects[i] > 64.0) {
        nt.push_back(a + (b - a) / 3);
        nt.push_back(a + 2 * (b - a) / 3);
      } else if (defects[i] > 1.0) {
        nt.push_back((a + b) / 2);
      }
      nt.push_back(b);
    }
    if (static_cast<int>(nt.size()) > opts.max_nodes)
      throw NonConvergenceError("mesh exceeded the node limit",
                                result.defect);
    BvpMesh refined;
    refined.t = nt;
    refined.p = result.mesh.p;
    refined.Y.resize(problem.dim, static_cast<int>(nt.size()));
    for (int i = 0; i < static_cast<int>(nt.size()); ++i)
      refined.Y.col(i) = eval_solution(problem, result.mesh, nt[i]);
    result.mesh = std::move(refined);
  }
}

std::pair<MatrixXd, VectorXd> bvp_tangent(const BvpProblem& problem,
                                          const BvpMesh& mesh) {
  Workspace ws = make_workspace(problem, mesh);
  SparseMat J;
  assemble(problem, mesh, ws, &J);
  Eigen::SparseLU<SparseMat> lu(J);
  if (lu.info() != Eigen::Success)
    throw NumericalError("singular system in solution-family tangent");
  VectorXd e = VectorXd::Zero(ws.n_tot);
  e(ws.n_tot - 1) = 1.0;
  // The released equation is the last integral row, which occupies the
  // final residual slot.
  VectorXd z = lu.solve(e);
  double nrm = z.norm();
  if (!std::isfinite(nrm) || nrm == 0)
    throw NumericalError("degenerate solution-family tangent");
  z /= nrm;
  MatrixXd Zn(ws.d, ws.M);
  for (int i = 0; i < ws.M; ++i) Zn.col(i) = z.segment(i * ws.d, ws.d);
  return {Zn, z.tail(ws.np)};
}

}  // namespace lakeoc
