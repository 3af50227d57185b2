#pragma once

// Classical two-mode Josephson dynamics in the population imbalance z and
// phase difference phi. Time is the rescaled clock throughout: one unit is
// 1/(2*J*N_T) of physical time. The exchange rate J (> 0) and phonon number
// N_T are carried only to restore dimensional quantities such as the
// tunneling current.

#include <array>
#include <utility>
#include <vector>

#include "pbjj/ode.hpp"

namespace pbjj::bjj {

struct Params {
  double delta0 = 0.0;   // asymmetry from the frequency difference
  double delta_u = 0.0;  // asymmetry from the Kerr difference
  double g = 0.0;        // self-interaction
  double gamma = 0.0;    // dimensionless phonon damping
  double exchange = 1.0; // J, angular frequency (dimensional carrier)
  double n_total = 1.0;  // N_T at t = 0 (dimensional carrier)

  double delta() const { return delta0 + delta_u; }
};

struct State {
  double z = 0.0;
  double phi = 0.0;
};

// Undamped flow: dz/dt = (1-z^2) sin 2phi, dphi/dt = delta + g z - z cos 2phi.
std::array<double, 2> rhs(const State& state, const Params& params);

// H_J = delta*z + (g/2) z^2 + (1/2)(1-z^2) cos 2phi.
double hamiltonian(const State& state, const Params& params);
double hamiltonian(double z, double phi, double g, double delta);

// I = J N_T^2 (1-z^2) sin 2phi, phonons per unit physical time.
double tunneling_current(const State& state, const Params& params);

enum class Clock {
  rescaled,         // t, undamped or damped equations
  damped_rescaled,  // tau clock of the damped system
};

ode::Options default_options();

class Trajectory {
 public:
  const Params& params() const { return params_; }
  Clock clock() const { return clock_; }
  const ode::Trajectory& raw() const { return raw_; }
  double t_begin() const { return raw_.t_begin(); }
  double t_end() const { return raw_.t_end(); }
  bool damped() const { return damped_; }

  State at(double t) const;
  double z_at(double t) const { return at(t).z; }
  double phi_at(double t) const { return at(t).phi; }

  // Energy with the instantaneous effective asymmetry (equals the conserved
  // H_J when gamma = 0).
  double energy_at(double t) const;
  double current_at(double t) const;

  // Damped runs only: z' = z e^{gamma t/2} and tau(t).
  double z_prime_at(double t) const;
  double tau_at(double t) const;

  // Effective asymmetry entering dphi/dt at time t (constant when gamma = 0).
  double effective_delta(double t) const;

 private:
  friend Trajectory simulate(const Params&, const State&, double,
                             const ode::Options&, double);
  friend Trajectory simulate_damped(const Params&, const State&, double,
                                    const ode::Options&);
  friend Trajectory simulate_rescaled(const Params&, const State&, double,
                                      const ode::Options&);
  Params params_;
  Clock clock_ = Clock::rescaled;
  bool damped_ = false;
  ode::Trajectory raw_;
};

Trajectory simulate(const Params& params, const State& init, double t_end,
                    const ode::Options& opts = default_options(),
                    double t_begin = 0.0);

// Damped flow in the rescaled clock t, with z normalised by N_T(0):
//   dz/dt   = (e^{-gamma t} - z^2) sin 2phi - (gamma/2) z
//   dphi/dt = delta0 + delta_u e^{-gamma t/2} + g z - z cos 2phi
Trajectory simulate_damped(const Params& params, const State& init,
                           double t_end,
                           const ode::Options& opts = default_options());

// tau = (2/gamma)(1 - e^{-gamma t/2}), tau in [0, 2/gamma); identity at gamma=0.
double rescaled_time(double t, double gamma);
double inverse_rescaled_time(double tau, double gamma);

// Damped flow transformed to (z' = z e^{gamma t/2}, tau):
//   dz'/dtau   = (1-z'^2) sin 2phi
//   dphi/dtau  = 2 delta0/(2 - gamma tau) + delta_u + g z' - z' cos 2phi
// The coefficient is singular at tau = 2/gamma; spans must stay below
// (2/gamma)(1 - 1e-9).
Trajectory simulate_rescaled(const Params& params, const State& init,
                             double tau_end,
                             const ode::Options& opts = default_options());

// The parameter/state map (delta -> -delta, g -> -g, phi -> -phi + pi/2)
// that leaves the undamped flow invariant.
std::pair<Params, State> symmetry_transform(const Params& params,
                                            const State& state);

}  // namespace pbjj::bjj
