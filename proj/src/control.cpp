#include "whmc/control.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "whmc/error.hpp"

namespace whmc::control {

LinearModel linearize_continuous(const dynamics::PlantParams& params) {
  const double m = params.pole_mass;
  const double total_mass = params.cart_mass + m;
  const double l = params.half_length();
  const double denom = l * (4.0 / 3.0 - m / total_mass);

  // theta_ddot = (g*theta - F/Mt) / denom, x_ddot = (F - m*l*theta_ddot)/Mt
  const double dtheta_dd_dtheta = params.gravity / denom;
  const double dtheta_dd_dforce = -1.0 / (total_mass * denom);

  LinearModel model;
  model.a = Eigen::MatrixXd::Zero(4, 4);
  model.b = Eigen::MatrixXd::Zero(4, 1);
  model.a(0, 1) = 1.0;
  model.a(2, 3) = 1.0;
  model.a(3, 2) = dtheta_dd_dtheta;
  model.a(1, 2) = -m * l * dtheta_dd_dtheta / total_mass;
  model.b(3, 0) = dtheta_dd_dforce;
  model.b(1, 0) = (1.0 - m * l * dtheta_dd_dforce) / total_mass;
  model.kind = ModelKind::kContinuous;
  return model;
}

Eigen::MatrixXd expm(const Eigen::MatrixXd& m) {
  const Eigen::Index n = m.rows();
  const double norm = m.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  }
  const Eigen::MatrixXd scaled = m / std::ldexp(1.0, squarings);

  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
  bool converged = false;
  for (int k = 1; k <= 60; ++k) {
    term = term * scaled / static_cast<double>(k);
    result += term;
    if (term.norm() <= std::numeric_limits<double>::epsilon() * result.norm()) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw Error(ErrorKind::kNumerical, "expm: Taylor series did not converge");
  }
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

LinearModel discretize_zoh(const LinearModel& model, double h) {
  if (!(h > 0.0)) throw Error(ErrorKind::kNumerical, "discretize_zoh: h must be > 0");
  if (model.kind != ModelKind::kContinuous) {
    throw Error(ErrorKind::kNumerical, "discretize_zoh: model is already discrete");
  }
  const Eigen::Index n = model.a.rows();
  const Eigen::Index k = model.b.cols();
  Eigen::MatrixXd augmented = Eigen::MatrixXd::Zero(n + k, n + k);
  augmented.topLeftCorner(n, n) = model.a * h;
  augmented.topRightCorner(n, k) = model.b * h;
  const Eigen::MatrixXd e = expm(augmented);

  LinearModel out;
  out.a = e.topLeftCorner(n, n);
  out.b = e.topRightCorner(n, k);
  out.step = h;
  out.kind = ModelKind::kDiscrete;
  return out;
}

double dare_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                     const Eigen::MatrixXd& q, const Eigen::MatrixXd& r,
                     const Eigen::MatrixXd& p) {
  const Eigen::MatrixXd inner = r + b.transpose() * p * b;
  const Eigen::MatrixXd bpa = b.transpose() * p * a;
  const Eigen::MatrixXd res = a.transpose() * p * a - p -
                              bpa.transpose() * inner.ldlt().solve(bpa) + q;
  return res.norm();
}

Eigen::MatrixXd solve_dare(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                           const Eigen::MatrixXd& q, const Eigen::MatrixXd& r,
                           const DareOptions& options) {
  Eigen::MatrixXd p = q;
  for (int it = 0; it < options.max_iterations; ++it) {
    const Eigen::MatrixXd inner = r + b.transpose() * p * b;
    const Eigen::MatrixXd pb = p * b;
    Eigen::MatrixXd next =
        q + a.transpose() * (p - pb * inner.ldlt().solve(pb.transpose())) * a;
    next = 0.5 * (next + next.transpose());
    const double change = (next - p).norm();
    p = std::move(next);
    // Run past the tolerance until P stops moving or sits well below it; the
    // residual is checked every few sweeps since it costs about an iteration.
    if (it % 16 == 15) {
      const double residual = dare_residual(a, b, q, r, p);
      const bool stalled = change <= 8.0 * std::numeric_limits<double>::epsilon() * p.norm();
      if (residual < 1e-2 * options.residual_tolerance ||
          (residual < options.residual_tolerance && stalled)) {
        return p;
      }
    }
  }
  if (dare_residual(a, b, q, r, p) < options.residual_tolerance) return p;
  throw Error(ErrorKind::kNoConvergence,
              "solve_dare: iteration limit reached without convergence");
}

Eigen::MatrixXd lqr_gain(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                         const Eigen::MatrixXd& p, const Eigen::MatrixXd& r) {
  const Eigen::MatrixXd inner = r + b.transpose() * p * b;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(inner);
  if (!lu.isInvertible()) {
    throw Error(ErrorKind::kNumerical, "lqr_gain: R + B'PB is singular");
  }
  return lu.solve(b.transpose() * p * a);
}

double spectral_radius(const Eigen::MatrixXd& m) {
  return Eigen::EigenSolver<Eigen::MatrixXd>(m, false).eigenvalues().cwiseAbs().maxCoeff();
}

LqrDesign design_lqr(const dynamics::PlantParams& params, const LqrWeights& weights,
                     double control_period) {
  const LinearModel discrete =
      discretize_zoh(linearize_continuous(params), control_period);
  LqrDesign design;
  design.q = weights.q_diagonal.asDiagonal();
  design.r = weights.r;
  const Eigen::MatrixXd r = Eigen::MatrixXd::Constant(1, 1, weights.r);
  design.p = solve_dare(discrete.a, discrete.b, design.q, r);
  design.k = lqr_gain(discrete.a, discrete.b, design.p, r);
  return design;
}

double machine_command(const RowVector4& gain, const Vector4& estimate,
                       double force_limit) {
  const double u = -gain.dot(estimate);
  return std::clamp(u, -force_limit, force_limit);
}

}  // namespace whmc::control
