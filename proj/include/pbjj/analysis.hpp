#pragma once

// Closed-form predictors (critical parameters, linear frequencies, the
// quartic potential, stationary points) and trajectory diagnostics (regime
// classification, frequency estimation, critical-asymmetry search).

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "pbjj/bjj.hpp"

namespace pbjj::analysis {

/// Raised when a diagnostic cannot reach a verdict (too little data,
/// no transition in the searched range, ...).
class AnalysisError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MstResult {
  double h0 = 0.0;
  bool self_trapped = false;
};

// Symmetric-junction self-trapping test: H0 > 1/2. Refuses delta != 0.
MstResult mst_condition(double z0, double phi0, double g, double delta = 0.0);

// g_c = {1 - (1 - z0^2) cos 2phi0} / z0^2; z0 = 0 has no finite answer.
double critical_g(double z0, double phi0);

struct CriticalZ {
  double value = 0.0;
  bool degenerate = false;  // phi0 at a multiple of pi collapses z_c to 0
};
// z_c = sqrt[(1 - cos 2phi0)/(g - cos 2phi0)] for g > 1.
CriticalZ critical_z(double phi0, double g);

struct LinearFrequencies {
  double omega0 = 0.0;                  // sqrt(2), rescaled
  std::optional<double> omega_linear;   // sqrt(2(1-g)), only for g < 1
  double omega_ac = 0.0;                // 2|delta|, rescaled
  // Physical angular frequencies are the rescaled values times 2*J*N_T.
  double physical_scale = 0.0;          // 2*J*N_T for the supplied carriers
};
LinearFrequencies linear_frequencies(double g, double delta,
                                     double exchange = 1.0,
                                     double n_total = 1.0);

// Quartic potential of the equivalent particle with energy H0:
//   W(z) = H0 + 4H0^2 - 1 - 8 H0 delta z + 2(1 + 2 delta^2 - 2 H0 g) z^2
//          + 4 delta g z^3 + (g^2 - 1) z^4
double potential(double z, double h0, double g, double delta);

struct PotentialCurve {
  double h0 = 0.0, g = 0.0, delta = 0.0;
  std::vector<std::pair<double, double>> samples;  // (z, W(z) - H0)
};
PotentialCurve potential_curve(double h0, double g, double delta,
                               std::size_t count = 401, double z_min = -1.0,
                               double z_max = 1.0);

enum class StationaryKind { minimum, maximum, saddle, degenerate };

struct StationaryPoint {
  double z = 0.0;
  double phi = 0.0;
  int family_index = 0;  // m in phi = m*pi or (m + 1/2)*pi
  StationaryKind kind = StationaryKind::minimum;
};
// Stationary points of the symmetric junction for m in {0, 1}; refuses
// delta != 0 (no closed form there).
std::vector<StationaryPoint> classify_stationary_points(double g,
                                                        double delta = 0.0);

enum class PhaseMode { zero_phase, half_pi_phase, running_phase };

struct RegimeReport {
  PhaseMode phase_mode = PhaseMode::zero_phase;
  bool self_trapped = false;
  double mean_z = 0.0;
  int sign_changes = 0;
  double winding = 0.0;  // total phase change over the window, in units of pi
  std::optional<double> dominant_freq;  // rescaled angular frequency
  bool conclusive = true;
  bool locked_from_start = false;  // never nearer zero than the initial z
  double min_z = 0.0, max_z = 0.0;
  double mean_phi = 0.0;
};

struct Window {
  double t0 = 0.0;
  double t1 = 0.0;
};

struct RegimeOptions {
  double mean_threshold = 0.05;      // |<z>| needed to call trapping
  double winding_threshold = 2.0;    // units of pi; beyond = running phase
  double start_slack = 0.005;        // tolerance for the initial-locking test
  double amplitude_floor = 1e-9;     // below this the window is stationary
  int min_crossings = 2;             // demeaned crossings needed for evidence
  std::size_t samples = 4097;
};

// Windowed classification. Self-trapping requires a sign-constant z with
// |mean| above threshold that is additionally either phase-running or locked
// on the far side of its initial value; plain off-centre oscillation with
// large excursions toward zero does not count.
RegimeReport classify_regime(const bjj::Trajectory& traj, Window window,
                             const RegimeOptions& opts = {});

// pi / (mean gap between zero crossings of the demeaned series). Needs at
// least four crossings.
double estimate_frequency(std::span<const double> times,
                          std::span<const double> values);

struct CriticalDelta {
  double value = 0.0;
  bool already_trapped = false;  // trapped at delta = 0
};

struct CriticalDeltaOptions {
  double delta_hi = 5.0;
  double width = 1e-3;
  double horizon = 200.0;
  Window window{20.0, 200.0};
  ode::Options integrator = bjj::default_options();
  RegimeOptions regime{};
};
// Bisection in the asymmetry, with the trapped/untrapped verdict of
// classify_regime(simulate(...)) as the predicate.
CriticalDelta critical_delta(double z0, double phi0, double g,
                             const CriticalDeltaOptions& opts = {});

struct TransitionTime {
  double tau_star = 0.0;
  bool always_trapped = false;  // effective asymmetry exceeds critical for all tau
};
// tau* = [2 - 2 delta0/(delta_crit - delta_u)]/gamma; <= 0 means trapped
// from the start.
TransitionTime damping_transition_time(double delta0, double delta_u,
                                       double delta_crit, double gamma);

struct ContourGrid {
  std::vector<double> z;      // size nz
  std::vector<double> phi;    // size nphi
  std::vector<double> value;  // phi-major: value[ip*nz + iz]
};
ContourGrid energy_contours(double g, double delta, std::size_t nz,
                            std::size_t nphi, double phi_min = 0.0,
                            double phi_max = std::numbers::pi,
                            double z_min = -1.0, double z_max = 1.0);

}  // namespace pbjj::analysis
