#pragma once

#include <Eigen/Core>

#include "whmc/dynamics.hpp"

namespace whmc::control {

using Matrix4 = Eigen::Matrix4d;
using Vector4 = Eigen::Vector4d;
using RowVector4 = Eigen::RowVector4d;

enum class ModelKind { kContinuous, kDiscrete };

struct LinearModel {
  Eigen::MatrixXd a;
  Eigen::MatrixXd b;
  double step = 0.0;  // 0 for continuous models
  ModelKind kind = ModelKind::kContinuous;
};

struct LqrWeights {
  Vector4 q_diagonal{0.01, 0.01, 10.0, 0.1};
  double r = 0.001;
};

struct LqrDesign {
  Matrix4 q;
  double r = 0.0;
  Matrix4 p;
  RowVector4 k;
};

/// Analytic Jacobian of the cart-pole at the upright equilibrium with the
/// weight detached. This is the model the machine controller believes in.
LinearModel linearize_continuous(const dynamics::PlantParams& params);

/// Exact zero-order-hold discretisation through the exponential of the
/// augmented matrix [[A, B], [0, 0]] * h.
LinearModel discretize_zoh(const LinearModel& model, double h);

/// Matrix exponential by scaling and squaring with a Taylor series summed to
/// a relative tolerance of 1e-12. Throws kNumerical if the series stalls.
Eigen::MatrixXd expm(const Eigen::MatrixXd& m);

struct DareOptions {
  int max_iterations = 100000;
  double residual_tolerance = 1e-10;
};

/// Discrete algebraic Riccati equation by fixed-point iteration from P0 = Q.
/// Throws kNoConvergence when the iteration budget runs out.
Eigen::MatrixXd solve_dare(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                           const Eigen::MatrixXd& q, const Eigen::MatrixXd& r,
                           const DareOptions& options = {});

double dare_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                     const Eigen::MatrixXd& q, const Eigen::MatrixXd& r,
                     const Eigen::MatrixXd& p);

/// K = (R + B'PB)^-1 B'PA. Throws kNumerical when the inner matrix is singular.
Eigen::MatrixXd lqr_gain(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                         const Eigen::MatrixXd& p, const Eigen::MatrixXd& r);

double spectral_radius(const Eigen::MatrixXd& m);

/// Full nominal design at the given control period.
LqrDesign design_lqr(const dynamics::PlantParams& params, const LqrWeights& weights,
                     double control_period);

/// u = -K x saturated to +-force_limit.
double machine_command(const RowVector4& gain, const Vector4& estimate,
                       double force_limit);

enum class LossPolicyKind { kZeroInput, kHoldLast };

class LossPolicy {
 public:
  explicit LossPolicy(LossPolicyKind kind = LossPolicyKind::kZeroInput)
      : kind_(kind) {}

  LossPolicyKind kind() const { return kind_; }
  double last_command() const { return last_command_; }

  void on_delivery(double command) { last_command_ = command; }
  double on_loss() const {
    return kind_ == LossPolicyKind::kHoldLast ? last_command_ : 0.0;
  }

 private:
  LossPolicyKind kind_;
  double last_command_ = 0.0;
};

}  // namespace whmc::control
