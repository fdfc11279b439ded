#include "whmc/dynamics.hpp"

#include <cmath>
#include <string>

#include "whmc/error.hpp"

namespace whmc::dynamics {
namespace {

void require_positive(double value, const char* field) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw Error(ErrorKind::kConfig,
                std::string("plant.") + field + " must be finite and > 0");
  }
}

}  // namespace

void PlantParams::validate() const {
  require_positive(cart_mass, "cart_mass");
  require_positive(pole_mass, "pole_mass");
  require_positive(pole_length, "pole_length");
  require_positive(weight_mass, "weight_mass");
  require_positive(gravity, "gravity");
  require_positive(force_limit, "force_limit");
}

void PlantState::set_vector(const Eigen::Vector4d& v) {
  x = v[0];
  x_dot = v[1];
  theta = v[2];
  theta_dot = v[3];
}

bool PlantState::finite() const {
  return std::isfinite(x) && std::isfinite(x_dot) && std::isfinite(theta) &&
         std::isfinite(theta_dot);
}

double effective_cart_mass(const PlantState& state, const PlantParams& params) {
  return params.cart_mass + (state.weight_present ? params.weight_mass : 0.0);
}

Eigen::Vector4d derivative(const PlantState& state, double force,
                           const PlantParams& params) {
  if (!state.finite() || !std::isfinite(force)) {
    throw Error(ErrorKind::kInvalidState, "derivative: non-finite state or force");
  }
  const double total_mass = effective_cart_mass(state, params) + params.pole_mass;
  const double l = params.half_length();
  const double m = params.pole_mass;
  const double sin_t = std::sin(state.theta);
  const double cos_t = std::cos(state.theta);
  const double rate_sq = state.theta_dot * state.theta_dot;

  const double temp = (-force - m * l * rate_sq * sin_t) / total_mass;
  const double theta_ddot =
      (params.gravity * sin_t + cos_t * temp) /
      (l * (4.0 / 3.0 - m * cos_t * cos_t / total_mass));
  const double x_ddot =
      (force + m * l * (rate_sq * sin_t - theta_ddot * cos_t)) / total_mass;
  return {state.x_dot, x_ddot, state.theta_dot, theta_ddot};
}

PlantState rk4_step(const PlantState& state, double force,
                    const PlantParams& params, double h) {
  if (!(h > 0.0)) {
    throw Error(ErrorKind::kIntegrationFailure, "rk4_step: step must be > 0");
  }
  if (!state.finite() || !std::isfinite(force)) {
    throw Error(ErrorKind::kInvalidState, "rk4_step: non-finite state or force");
  }
  const Eigen::Vector4d y0 = state.vector();
  auto at = [&](const Eigen::Vector4d& y) {
    PlantState s = state;
    s.set_vector(y);
    if (!s.finite()) throw Error(ErrorKind::kIntegrationFailure, "rk4_step: stage diverged");
    return derivative(s, force, params);
  };
  const Eigen::Vector4d k1 = at(y0);
  const Eigen::Vector4d k2 = at(y0 + 0.5 * h * k1);
  const Eigen::Vector4d k3 = at(y0 + 0.5 * h * k2);
  const Eigen::Vector4d k4 = at(y0 + h * k3);

  PlantState next = state;
  next.set_vector(y0 + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  if (!next.finite()) {
    throw Error(ErrorKind::kIntegrationFailure, "rk4_step: non-finite result");
  }
  return next;
}

double total_energy(const PlantState& state, const PlantParams& params) {
  const double cart_mass = effective_cart_mass(state, params);
  const double m = params.pole_mass;
  const double l = params.half_length();
  const double cos_t = std::cos(state.theta);
  const double sin_t = std::sin(state.theta);

  // Pole centre of mass sits at (x + l sin(theta), l cos(theta)).
  const double com_vx = state.x_dot + l * cos_t * state.theta_dot;
  const double com_vy = -l * sin_t * state.theta_dot;
  const double inertia = m * l * l / 3.0;  // uniform rod about its centre

  const double kinetic = 0.5 * cart_mass * state.x_dot * state.x_dot +
                         0.5 * m * (com_vx * com_vx + com_vy * com_vy) +
                         0.5 * inertia * state.theta_dot * state.theta_dot;
  return kinetic + m * params.gravity * l * cos_t;
}

PlantState apply_event(PlantState state, const DisturbanceEvent& event) {
  state.weight_present = event.kind == DisturbanceKind::kAttachWeight;
  return state;
}

}  // namespace whmc::dynamics
