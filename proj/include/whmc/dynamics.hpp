#pragma once

#include <Eigen/Core>

namespace whmc::dynamics {

// Uniform-rod cart-pole. theta = 0 is upright and a positive theta leans the
// pole toward +x; a positive force pushes the cart toward +x, i.e. under a
// pole leaning with positive theta.
struct PlantParams {
  double cart_mass = 10.0;
  double pole_mass = 4.0;
  double pole_length = 4.0;  // full length; dynamics use half of it
  double weight_mass = 5.0;
  double gravity = 9.81;
  double force_limit = 200.0;

  double half_length() const { return 0.5 * pole_length; }
  // Throws kConfig naming the first offending field.
  void validate() const;
  bool operator==(const PlantParams&) const = default;
};

struct PlantState {
  double x = 0.0;
  double x_dot = 0.0;
  double theta = 0.0;  // unwrapped
  double theta_dot = 0.0;
  bool weight_present = false;

  Eigen::Vector4d vector() const { return {x, x_dot, theta, theta_dot}; }
  void set_vector(const Eigen::Vector4d& v);
  bool finite() const;

  bool operator==(const PlantState&) const = default;
};

enum class DisturbanceKind { kAttachWeight, kRemoveWeight };

struct DisturbanceEvent {
  double time = 0.0;
  DisturbanceKind kind = DisturbanceKind::kAttachWeight;

  bool operator==(const DisturbanceEvent&) const = default;
};

double effective_cart_mass(const PlantState& state, const PlantParams& params);

/// (x_dot, x_ddot, theta_dot, theta_ddot). Throws kInvalidState on non-finite
/// input; the caller is responsible for saturating the force.
Eigen::Vector4d derivative(const PlantState& state, double force,
                           const PlantParams& params);

/// One classical RK4 step of length h with the force held constant.
/// Throws kIntegrationFailure if the result is not finite.
PlantState rk4_step(const PlantState& state, double force,
                    const PlantParams& params, double h);

/// Cart and pole kinetic energy plus m*g*l*cos(theta); the potential datum is
/// the pivot height.
double total_energy(const PlantState& state, const PlantParams& params);

PlantState apply_event(PlantState state, const DisturbanceEvent& event);

}  // namespace whmc::dynamics
