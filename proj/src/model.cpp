#include "lakeoc/model.hpp"

#include <cmath>

namespace lakeoc {

namespace {

// Uptake term P^2/(1+P^2) and its first two derivatives.
double uptake(double P) { return P * P / (1.0 + P * P); }
double uptake_d(double P) {
  double q = 1.0 + P * P;
  return 2.0 * P / (q * q);
}
double uptake_dd(double P) {
  double q = 1.0 + P * P;
  return (2.0 - 6.0 * P * P) / (q * q * q);
}

}  // namespace

void ModelParams::validate(bool spatial) const {
  if (!(rho > 0)) throw SpecificationError("rho must be > 0");
  if (c < 0) throw SpecificationError("c must be >= 0");
  if (spatial) {
    if (N < 1) throw SpecificationError("N must be >= 1 for the 1D model");
    if (!(L > 0)) throw SpecificationError("L must be > 0 for the 1D model");
    if (D < 0) throw SpecificationError("D must be >= 0");
  }
}

CanonicalPoint::CanonicalPoint(VectorXd states, VectorXd costates)
    : x(std::move(states)), lambda(std::move(costates)) {
  if (x.size() != lambda.size())
    throw DimensionError("state and costate lengths differ");
}

CanonicalPoint CanonicalPoint::from_stacked(const VectorXd& X) {
  if (X.size() % 2 != 0) throw DimensionError("stacked vector of odd length");
  Eigen::Index n = X.size() / 2;
  return CanonicalPoint(X.head(n), X.tail(n));
}

VectorXd CanonicalPoint::stacked() const {
  VectorXd X(2 * x.size());
  X << x, lambda;
  return X;
}

DiffusionOperators DiffusionOperators::build(int N) {
  DiffusionOperators ops;
  int M = N + 1;
  ops.A_state = MatrixXd::Zero(M, M);
  for (int i = 1; i < N; ++i) {
    ops.A_state(i, i - 1) = 1.0;
    ops.A_state(i, i) = -2.0;
    ops.A_state(i, i + 1) = 1.0;
  }
  // Neumann ghost nodes: x_{-1} = x_1 and x_{N+1} = x_{N-1}.
  ops.A_state(0, 0) = -2.0;
  ops.A_state(0, 1) = 2.0;
  ops.A_state(N, N - 1) = 2.0;
  ops.A_state(N, N) = -2.0;
  ops.A_costate = ops.A_state.transpose();
  ops.w = VectorXd::Constant(M, 1.0 / N);
  ops.w(0) *= 0.5;
  ops.w(N) *= 0.5;
  return ops;
}

bool CanonicalModel::admissible(const VectorXd& X) const {
  int n = num_states();
  if (X.size() != 2 * n) throw DimensionError("point has wrong dimension");
  return (X.head(n).array() > 0).all() && (X.tail(n).array() < 0).all();
}

void CanonicalModel::require_admissible(const VectorXd& X) const {
  if (!admissible(X))
    throw AdmissibilityError("inadmissible point: requires P > 0, lambda < 0");
}

// ---------------------------------------------------------------- Lake0D

Lake0D::Lake0D(const ModelParams& p) : params_(p) { params_.validate(false); }

VectorXd Lake0D::control(const VectorXd& X) const {
  double lam = X(1);
  if (lam == 0.0) throw SingularControlError(0);
  VectorXd u(1);
  u(0) = -1.0 / lam;
  return u;
}

VectorXd Lake0D::rhs(const VectorXd& X) const {
  double P = X(0), lam = X(1);
  if (lam == 0.0) throw SingularControlError(0);
  VectorXd f(2);
  f(0) = -1.0 / lam - params_.b * P + uptake(P);
  f(1) = 2.0 * params_.c * P +
         lam * (params_.rho + params_.b - uptake_d(P));
  return f;
}

MatrixXd Lake0D::jacobian(const VectorXd& X) const {
  double P = X(0), lam = X(1);
  MatrixXd J(2, 2);
  J(0, 0) = -params_.b + uptake_d(P);
  J(0, 1) = 1.0 / (lam * lam);
  J(1, 0) = 2.0 * params_.c - lam * uptake_dd(P);
  J(1, 1) = params_.rho + params_.b - uptake_d(P);
  return J;
}

double Lake0D::payoff(const VectorXd& X) const {
  double P = X(0);
  double u = control(X)(0);
  if (u <= 0) throw AdmissibilityError("control not positive (lambda >= 0)");
  return std::log(u) - params_.c * P * P;
}

double Lake0D::hamiltonian(const VectorXd& X) const {
  return payoff(X) + X(1) * rhs(X)(0);
}

double Lake0D::spatial_norm(const VectorXd& y) const {
  if (y.size() != 1) throw DimensionError("0D norm expects a scalar");
  return std::abs(y(0));
}

std::unique_ptr<CanonicalModel> Lake0D::with_params(
    const ModelParams& p) const {
  return std::make_unique<Lake0D>(p);
}

// ---------------------------------------------------------------- Lake1D

Lake1D::Lake1D(const ModelParams& p)
    : params_(p), ops_(DiffusionOperators::build(p.N)) {
  params_.validate(true);
  q_ = VectorXd::Ones(params_.N + 1);
  q_(0) = 0.5;
  q_(params_.N) = 0.5;
}

VectorXd Lake1D::control(const VectorXd& X) const {
  int n = num_states();
  VectorXd u(n);
  for (int i = 0; i < n; ++i) {
    double lam = X(n + i);
    if (lam == 0.0) throw SingularControlError(i);
    u(i) = -q_(i) / lam;
  }
  return u;
}

VectorXd Lake1D::rhs(const VectorXd& X) const {
  int n = num_states();
  if (X.size() != 2 * n) throw DimensionError("point has wrong dimension");
  auto P = X.head(n);
  auto lam = X.tail(n);
  double Dt = params_.scaled_diffusion();
  VectorXd u = control(X);
  VectorXd f(2 * n);
  VectorXd diffx = Dt * (ops_.A_state * P);
  VectorXd diffl = Dt * (ops_.A_costate * lam);
  for (int i = 0; i < n; ++i) {
    double ci = 2.0 * params_.c * q_(i);
    f(i) = u(i) - params_.b * P(i) + uptake(P(i)) + diffx(i);
    f(n + i) = ci * P(i) +
               lam(i) * (params_.rho + params_.b - uptake_d(P(i))) - diffl(i);
  }
  return f;
}

MatrixXd Lake1D::jacobian(const VectorXd& X) const {
  int n = num_states();
  auto P = X.head(n);
  auto lam = X.tail(n);
  double Dt = params_.scaled_diffusion();
  MatrixXd J = MatrixXd::Zero(2 * n, 2 * n);
  J.topLeftCorner(n, n) = Dt * ops_.A_state;
  J.bottomRightCorner(n, n) = -Dt * ops_.A_costate;
  for (int i = 0; i < n; ++i) {
    double ci = 2.0 * params_.c * q_(i);
    J(i, i) += -params_.b + uptake_d(P(i));
    J(i, n + i) = q_(i) / (lam(i) * lam(i));
    J(n + i, i) = ci - lam(i) * uptake_dd(P(i));
    J(n + i, n + i) += params_.rho + params_.b - uptake_d(P(i));
  }
  return J;
}

double Lake1D::payoff(const VectorXd& X) const {
  int n = num_states();
  auto P = X.head(n);
  VectorXd u = control(X);
  double G = 0.0;
  for (int i = 0; i < n; ++i) {
    if (u(i) <= 0)
      throw AdmissibilityError("control not positive at node " +
                               std::to_string(i));
    G += q_(i) * (std::log(u(i)) - params_.c * P(i) * P(i));
  }
  return G;
}

double Lake1D::hamiltonian(const VectorXd& X) const {
  int n = num_states();
  return payoff(X) + X.tail(n).dot(rhs(X).head(n));
}

double Lake1D::spatial_norm(const VectorXd& y) const {
  if (y.size() != num_states())
    throw DimensionError("spatial norm expects a length N+1 vector");
  return ops_.w.dot(y.cwiseAbs());
}

std::unique_ptr<CanonicalModel> Lake1D::with_params(
    const ModelParams& p) const {
  return std::make_unique<Lake1D>(p);
}

std::unique_ptr<CanonicalModel> make_model(const std::string& kind,
                                           const ModelParams& p) {
  if (kind == "lake0d") return std::make_unique<Lake0D>(p);
  if (kind == "lake1d") return std::make_unique<Lake1D>(p);
  throw SpecificationError("unknown model kind: " + kind);
}

double get_param(const ModelParams& p, const std::string& name) {
  if (name == "rho") return p.rho;
  if (name == "b") return p.b;
  if (name == "c") return p.c;
  if (name == "D") return p.D;
  if (name == "L") return p.L;
  throw SpecificationError("unknown parameter: " + name);
}

ModelParams set_param(ModelParams p, const std::string& name, double value) {
  if (name == "rho")
    p.rho = value;
  else if (name == "b")
    p.b = value;
  else if (name == "c")
    p.c = value;
  else if (name == "D")
    p.D = value;
  else if (name == "L")
    p.L = value;
  else
    throw SpecificationError("unknown parameter: " + name);
  return p;
}

}  // namespace lakeoc
