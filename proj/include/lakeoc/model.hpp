#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>

#include "lakeoc/errors.hpp"

namespace lakeoc {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Economic and spatial parameters of the shallow lake models.
/// The spatial fields (D, L, N) are ignored by the 0D model.
struct ModelParams {
  double rho = 0.03;  // discount rate, > 0
  double b = 0.65;    // phosphorus loss rate
  double c = 0.5;     // damage cost weight, >= 0
  double D = 0.5;     // diffusion coefficient, >= 0
  double L = 0.0;     // half-domain length, > 0 when spatial
  int N = 0;          // grid intervals on [0,1]; 0 for the 0D model

  double grid_spacing() const { return 1.0 / N; }
  // Diffusion scaled to the unit interval: D * N^2 / (2L)^2.
  double scaled_diffusion() const {
    return D * double(N) * double(N) / (4.0 * L * L);
  }
  void validate(bool spatial) const;
};

/// Full state-costate vector X = (P; lambda) of a canonical system.
struct CanonicalPoint {
  VectorXd x;       // states, length n_tot
  VectorXd lambda;  // costates, length n_tot

  CanonicalPoint() = default;
  CanonicalPoint(VectorXd states, VectorXd costates);
  /// Split a stacked (x; lambda) vector.
  static CanonicalPoint from_stacked(const VectorXd& X);
  VectorXd stacked() const;
  int n() const { return static_cast<int>(x.size()); }
};

/// Finite-difference diffusion matrices for the 1D model with Neumann
/// (ghost-node) boundary handling, before scaling by the diffusion constant.
struct DiffusionOperators {
  MatrixXd A_state;    // (N+1)x(N+1), row sums zero
  MatrixXd A_costate;  // transpose of A_state
  VectorXd w;          // trapezoid quadrature weights, sum to 1

  static DiffusionOperators build(int N);
};

/// Common interface of the 0D shallow lake model and its 1D discretization.
/// All operations are pure; downstream modules are model-agnostic.
class CanonicalModel {
 public:
  virtual ~CanonicalModel() = default;

  virtual int num_states() const = 0;  // n_tot
  int dim() const { return 2 * num_states(); }
  virtual const ModelParams& params() const = 0;

  /// Hamiltonian-maximizing control at each node. Throws
  /// SingularControlError on a zero costate component.
  virtual VectorXd control(const VectorXd& X) const = 0;
  /// (xdot; lambdadot) of the current-value canonical system.
  virtual VectorXd rhs(const VectorXd& X) const = 0;
  /// Exact derivative of rhs.
  virtual MatrixXd jacobian(const VectorXd& X) const = 0;
  /// Maximized Hamiltonian G(x, u_ext) + lambda^T xdot.
  virtual double hamiltonian(const VectorXd& X) const = 0;
  /// Running payoff G(x, u_ext) alone (used by the quadrature oracle).
  virtual double payoff(const VectorXd& X) const = 0;
  /// Trapezoid-weighted mean of per-node absolute values; |y| for 0D.
  virtual double spatial_norm(const VectorXd& y) const = 0;

  /// Clone with different parameters (operators are rebuilt as needed).
  virtual std::unique_ptr<CanonicalModel> with_params(
      const ModelParams& p) const = 0;

  bool admissible(const VectorXd& X) const;
  void require_admissible(const VectorXd& X) const;

  /// J(x0) = H(X(0)) / rho for a solution converging to an equilibrium.
  double objective_value(const VectorXd& X) const {
    return hamiltonian(X) / params().rho;
  }

  VectorXd states_of(const VectorXd& X) const { return X.head(num_states()); }
  VectorXd costates_of(const VectorXd& X) const {
    return X.tail(num_states());
  }
};

/// 0D shallow lake model: one state (phosphorus stock P), one costate.
class Lake0D final : public CanonicalModel {
 public:
  explicit Lake0D(const ModelParams& p);

  int num_states() const override { return 1; }
  const ModelParams& params() const override { return params_; }
  VectorXd control(const VectorXd& X) const override;
  VectorXd rhs(const VectorXd& X) const override;
  MatrixXd jacobian(const VectorXd& X) const override;
  double hamiltonian(const VectorXd& X) const override;
  double payoff(const VectorXd& X) const override;
  double spatial_norm(const VectorXd& y) const override;
  std::unique_ptr<CanonicalModel> with_params(
      const ModelParams& p) const override;

 private:
  ModelParams params_;
};

/// 1D shallow lake model discretized on N+1 grid nodes with Neumann
/// boundary conditions. Boundary nodes carry half quadrature weight, which
/// shows up as the control formula -1/(2 lambda) and costate weight c there.
class Lake1D final : public CanonicalModel {
 public:
  explicit Lake1D(const ModelParams& p);

  int num_states() const override { return params_.N + 1; }
  const ModelParams& params() const override { return params_; }
  VectorXd control(const VectorXd& X) const override;
  VectorXd rhs(const VectorXd& X) const override;
  MatrixXd jacobian(const VectorXd& X) const override;
  double hamiltonian(const VectorXd& X) const override;
  double payoff(const VectorXd& X) const override;
  double spatial_norm(const VectorXd& y) const override;
  std::unique_ptr<CanonicalModel> with_params(
      const ModelParams& p) const override;

  const DiffusionOperators& operators() const { return ops_; }

 private:
  ModelParams params_;
  DiffusionOperators ops_;
  VectorXd q_;  // per-node payoff weights (1/2, 1, ..., 1, 1/2)
};

/// Factory by name ("lake0d" / "lake1d").
std::unique_ptr<CanonicalModel> make_model(const std::string& kind,
                                           const ModelParams& p);

/// Named access to the continuable scalar parameters (rho, b, c, D, L).
double get_param(const ModelParams& p, const std::string& name);
ModelParams set_param(ModelParams p, const std::string& name, double value);

}  // namespace lakeoc
