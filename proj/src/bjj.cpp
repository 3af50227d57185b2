#include "pbjj/bjj.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pbjj::bjj {

namespace {
constexpr double kPi = std::numbers::pi;

void check_initial(const State& init) {
  if (std::abs(init.z) > 1.0)
    throw std::domain_error("initial imbalance must satisfy |z| <= 1");
}
}  // namespace

std::array<double, 2> rhs(const State& state, const Params& params) {
  if (std::abs(state.z) > 1.0)
    throw std::domain_error("imbalance out of range: |z| > 1");
  const double s = std::sin(2.0 * state.phi);
  const double c = std::cos(2.0 * state.phi);
  return {(1.0 - state.z * state.z) * s,
          params.delta() + params.g * state.z - state.z * c};
}

double hamiltonian(double z, double phi, double g, double delta) {
  return delta * z + 0.5 * g * z * z +
         0.5 * (1.0 - z * z) * std::cos(2.0 * phi);
}

double hamiltonian(const State& state, const Params& params) {
  return hamiltonian(state.z, state.phi, params.g, params.delta());
}

double tunneling_current(const State& state, const Params& params) {
  return params.exchange * params.n_total * params.n_total *
         (1.0 - state.z * state.z) * std::sin(2.0 * state.phi);
}

ode::Options default_options() {
  ode::Options opts;
  opts.rel_tol = 1e-9;
  opts.abs_tol = 1e-12;
  return opts;
}

State Trajectory::at(double t) const {
  double buf[2];
  raw_.sample(t, buf);
  return {buf[0], buf[1]};
}

double Trajectory::effective_delta(double t) const {
  if (!damped_) return params_.delta();
  if (clock_ == Clock::damped_rescaled)
    return 2.0 * params_.delta0 / (2.0 - params_.gamma * t) + params_.delta_u;
  return params_.delta0 +
         params_.delta_u * std::exp(-0.5 * params_.gamma * t);
}

double Trajectory::energy_at(double t) const {
  const State s = at(t);
  return hamiltonian(s.z, s.phi, params_.g, effective_delta(t));
}

double Trajectory::current_at(double t) const {
  return tunneling_current(at(t), params_);
}

double Trajectory::z_prime_at(double t) const {
  if (clock_ == Clock::damped_rescaled) return at(t).z;
  return at(t).z * std::exp(0.5 * params_.gamma * t);
}

double Trajectory::tau_at(double t) const {
  if (clock_ == Clock::damped_rescaled) return t;
  return rescaled_time(t, params_.gamma);
}

Trajectory simulate(const Params& params, const State& init, double t_end,
                    const ode::Options& opts, double t_begin) {
  check_initial(init);
  auto field = [&params](double, std::span<const double> y,
                         std::span<double> dy) {
    const double z = y[0];
    const double s = std::sin(2.0 * y[1]);
    const double c = std::cos(2.0 * y[1]);
    dy[0] = (1.0 - z * z) * s;
    dy[1] = params.delta() + params.g * z - z * c;
  };
  Trajectory traj;
  traj.params_ = params;
  traj.clock_ = Clock::rescaled;
  traj.damped_ = false;
  const double y0[2] = {init.z, init.phi};
  traj.raw_ = ode::integrate(field, y0, t_begin, t_end, opts);
  return traj;
}

Trajectory simulate_damped(const Params& params, const State& init,
                           double t_end, const ode::Options& opts) {
  check_initial(init);
  if (params.gamma < 0.0) throw std::domain_error("gamma must be >= 0");
  const double gamma = params.gamma;
  auto field = [&params, gamma](double t, std::span<const double> y,
                                std::span<double> dy) {
    const double z = y[0];
    const double s = std::sin(2.0 * y[1]);
    const double c = std::cos(2.0 * y[1]);
    const double envelope = std::exp(-gamma * t);
    dy[0] = (envelope - z * z) * s - 0.5 * gamma * z;
    dy[1] = params.delta0 + params.delta_u * std::exp(-0.5 * gamma * t) +
            params.g * z - z * c;
  };
  Trajectory traj;
  traj.params_ = params;
  traj.clock_ = Clock::rescaled;
  traj.damped_ = true;
  const double y0[2] = {init.z, init.phi};
  traj.raw_ = ode::integrate(field, y0, 0.0, t_end, opts);
  return traj;
}

double rescaled_time(double t, double gamma) {
  if (gamma == 0.0) return t;
  if (gamma < 0.0) throw std::domain_error("gamma must be >= 0");
  return -(2.0 / gamma) * std::expm1(-0.5 * gamma * t);
}

double inverse_rescaled_time(double tau, double gamma) {
  if (gamma == 0.0) return tau;
  if (gamma < 0.0) throw std::domain_error("gamma must be >= 0");
  if (tau >= 2.0 / gamma)
    throw std::domain_error("tau is outside [0, 2/gamma)");
  return -(2.0 / gamma) * std::log1p(-0.5 * gamma * tau);
}

Trajectory simulate_rescaled(const Params& params, const State& init,
                             double tau_end, const ode::Options& opts) {
  check_initial(init);
  if (params.gamma < 0.0) throw std::domain_error("gamma must be >= 0");
  if (params.gamma > 0.0) {
    const double tau_max = (2.0 / params.gamma) * (1.0 - 1e-9);
    if (tau_end > tau_max)
      throw std::domain_error(
          "tau span reaches the singular point 2/gamma; largest usable end is " +
          std::to_string(tau_max));
  }
  const double gamma = params.gamma;
  auto field = [&params, gamma](double tau, std::span<const double> y,
                                std::span<double> dy) {
    const double z = y[0];
    const double s = std::sin(2.0 * y[1]);
    const double c = std::cos(2.0 * y[1]);
    dy[0] = (1.0 - z * z) * s;
    dy[1] = 2.0 * params.delta0 / (2.0 - gamma * tau) + params.delta_u +
            params.g * z - z * c;
  };
  Trajectory traj;
  traj.params_ = params;
  traj.clock_ = Clock::damped_rescaled;
  traj.damped_ = gamma > 0.0;
  const double y0[2] = {init.z, init.phi};
  traj.raw_ = ode::integrate(field, y0, 0.0, tau_end, opts);
  return traj;
}

std::pair<Params, State> symmetry_transform(const Params& params,
                                            const State& state) {
  Params p = params;
  p.delta0 = -params.delta0;
  p.delta_u = -params.delta_u;
  p.g = -params.g;
  State s{state.z, -state.phi + 0.5 * kPi};
  return {p, s};
}

}  // namespace pbjj::bjj
