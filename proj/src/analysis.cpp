#include "pbjj/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pbjj::analysis {

namespace {
constexpr double kPi = std::numbers::pi;

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  out.back() = b;
  return out;
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}
}  // namespace

MstResult mst_condition(double z0, double phi0, double g, double delta) {
  if (delta != 0.0)
    throw std::invalid_argument(
        "the closed-form trapping test holds for the symmetric junction only "
        "(delta = 0); use critical_delta or a simulation");
  if (std::abs(z0) > 1.0) throw std::domain_error("|z0| must be <= 1");
  const double h0 = bjj::hamiltonian(z0, phi0, g, 0.0);
  return {h0, h0 > 0.5};
}

double critical_g(double z0, double phi0) {
  if (z0 == 0.0)
    throw std::domain_error("critical g is undefined at z0 = 0");
  const double c = std::cos(2.0 * phi0);
  return (1.0 - (1.0 - z0 * z0) * c) / (z0 * z0);
}

CriticalZ critical_z(double phi0, double g) {
  if (!(g > 1.0)) throw std::domain_error("critical z requires g > 1");
  const double c = std::cos(2.0 * phi0);
  if (g <= c)
    throw std::domain_error("critical z is not real for g <= cos(2 phi0)");
  const double num = 1.0 - c;
  CriticalZ out;
  out.value = std::sqrt(num / (g - c));
  out.degenerate = num == 0.0 || std::abs(out.value) < 1e-12;
  return out;
}

LinearFrequencies linear_frequencies(double g, double delta, double exchange,
                                     double n_total) {
  LinearFrequencies out;
  out.omega0 = std::sqrt(2.0);
  if (g < 1.0) out.omega_linear = std::sqrt(2.0 * (1.0 - g));
  out.omega_ac = 2.0 * std::abs(delta);
  out.physical_scale = 2.0 * exchange * n_total;
  return out;
}

double potential(double z, double h0, double g, double delta) {
  const double z2 = z * z;
  return h0 + 4.0 * h0 * h0 - 1.0 - 8.0 * h0 * delta * z +
         2.0 * (1.0 + 2.0 * delta * delta - 2.0 * h0 * g) * z2 +
         4.0 * delta * g * z2 * z + (g * g - 1.0) * z2 * z2;
}

PotentialCurve potential_curve(double h0, double g, double delta,
                               std::size_t count, double z_min, double z_max) {
  PotentialCurve curve;
  curve.h0 = h0;
  curve.g = g;
  curve.delta = delta;
  curve.samples.reserve(count);
  for (double z : linspace(z_min, z_max, count))
    curve.samples.emplace_back(z, potential(z, h0, g, delta) - h0);
  return curve;
}

std::vector<StationaryPoint> classify_stationary_points(double g,
                                                        double delta) {
  if (delta != 0.0)
    throw std::invalid_argument(
        "stationary-point classification is closed-form only for delta = 0");
  auto kind_from = [](double ev_z, double ev_phi) {
    if (ev_z == 0.0 || ev_phi == 0.0) return StationaryKind::degenerate;
    if (ev_z > 0.0 && ev_phi > 0.0) return StationaryKind::minimum;
    if (ev_z < 0.0 && ev_phi < 0.0) return StationaryKind::maximum;
    return StationaryKind::saddle;
  };
  std::vector<StationaryPoint> out;
  for (int m = 0; m < 2; ++m) {
    // phi = m*pi: Hessian eigenvalues (g - 1, -2).
    out.push_back({0.0, m * kPi, m, kind_from(g - 1.0, -2.0)});
    // phi = (m + 1/2)*pi: eigenvalues (g + 1, +2).
    out.push_back({0.0, (m + 0.5) * kPi, m, kind_from(g + 1.0, 2.0)});
  }
  return out;
}

namespace {

std::vector<double> crossing_times(std::span<const double> t,
                                   std::span<const double> v) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    if (v[i] == 0.0) {
      out.push_back(t[i]);
      continue;
    }
    if (v[i + 1] == 0.0 || (v[i] > 0.0) == (v[i + 1] > 0.0)) continue;
    const double frac = v[i] / (v[i] - v[i + 1]);
    out.push_back(t[i] + frac * (t[i + 1] - t[i]));
  }
  return out;
}

int count_sign_changes(std::span<const double> v) {
  int changes = 0;
  int prev = 0;
  for (double x : v) {
    const int s = x > 0.0 ? 1 : (x < 0.0 ? -1 : 0);
    if (s == 0) continue;
    if (prev != 0 && s != prev) ++changes;
    prev = s;
  }
  return changes;
}

}  // namespace

double estimate_frequency(std::span<const double> times,
                          std::span<const double> values) {
  if (times.size() != values.size() || times.size() < 4)
    throw std::invalid_argument("frequency estimation needs a sampled series");
  const double mean = mean_of(values);
  std::vector<double> centered(values.begin(), values.end());
  for (double& x : centered) x -= mean;
  const auto crossings = crossing_times(times, centered);
  if (crossings.size() < 4)
    throw AnalysisError("too few zero crossings to estimate a frequency");
  const double span = crossings.back() - crossings.front();
  const double mean_gap = span / static_cast<double>(crossings.size() - 1);
  return kPi / mean_gap;
}

RegimeReport classify_regime(const bjj::Trajectory& traj, Window window,
                             const RegimeOptions& opts) {
  if (!(window.t1 > window.t0))
    throw std::invalid_argument("analysis window must have t0 < t1");
  if (window.t0 < traj.t_begin() || window.t1 > traj.t_end())
    throw std::invalid_argument("analysis window outside the trajectory span");

  const auto grid = linspace(window.t0, window.t1, opts.samples);
  std::vector<double> z(grid.size()), phi(grid.size());
  {
    double buf[2];
    for (std::size_t i = 0; i < grid.size(); ++i) {
      traj.raw().sample(grid[i], buf);
      z[i] = buf[0];
      phi[i] = buf[1];
    }
  }

  RegimeReport rep;
  rep.mean_z = mean_of(z);
  rep.mean_phi = mean_of(phi);
  rep.sign_changes = count_sign_changes(z);
  rep.winding = (phi.back() - phi.front()) / kPi;
  const auto [zmin_it, zmax_it] = std::minmax_element(z.begin(), z.end());
  rep.min_z = *zmin_it;
  rep.max_z = *zmax_it;

  // Locking relative to the trajectory's own starting imbalance: the
  // trajectory never moves closer to zero than where it began.
  const double z_start = traj.at(traj.t_begin()).z;
  if (z_start > 0.0) {
    rep.locked_from_start = rep.min_z >= z_start - opts.start_slack;
  } else if (z_start < 0.0) {
    rep.locked_from_start = rep.max_z <= z_start + opts.start_slack;
  }

  const bool running = std::abs(rep.winding) > opts.winding_threshold;
  if (running) {
    rep.phase_mode = PhaseMode::running_phase;
  } else {
    const double folded = std::remainder(rep.mean_phi, kPi);
    rep.phase_mode = std::abs(folded) <= 0.25 * kPi ? PhaseMode::zero_phase
                                                    : PhaseMode::half_pi_phase;
  }

  const double amplitude = 0.5 * (rep.max_z - rep.min_z);
  std::vector<double> centered(z);
  for (double& x : centered) x -= rep.mean_z;
  const int demeaned_crossings =
      static_cast<int>(crossing_times(grid, centered).size());
  const bool oscillatory =
      amplitude > opts.amplitude_floor && demeaned_crossings >= opts.min_crossings;

  rep.self_trapped = rep.sign_changes == 0 &&
                     std::abs(rep.mean_z) > opts.mean_threshold &&
                     (running || (rep.locked_from_start && oscillatory));
  rep.conclusive = rep.sign_changes > 0 || running ||
                   (rep.locked_from_start && oscillatory) ||
                   (oscillatory && !rep.self_trapped);

  if (oscillatory && demeaned_crossings >= 4) {
    try {
      rep.dominant_freq = estimate_frequency(grid, z);
    } catch (const AnalysisError&) {
    }
  }
  return rep;
}

CriticalDelta critical_delta(double z0, double phi0, double g,
                             const CriticalDeltaOptions& opts) {
  auto trapped_at = [&](double delta) {
    bjj::Params p;
    p.delta0 = delta;
    p.g = g;
    auto traj = bjj::simulate(p, {z0, phi0}, opts.horizon, opts.integrator);
    return classify_regime(traj, opts.window, opts.regime).self_trapped;
  };
  if (trapped_at(0.0)) return {0.0, true};
  if (!trapped_at(opts.delta_hi))
    throw AnalysisError("no trapping transition found up to delta = " +
                        std::to_string(opts.delta_hi));
  double lo = 0.0, hi = opts.delta_hi;
  while (hi - lo > opts.width) {
    const double mid = 0.5 * (lo + hi);
    (trapped_at(mid) ? hi : lo) = mid;
  }
  return {0.5 * (lo + hi), false};
}

TransitionTime damping_transition_time(double delta0, double delta_u,
                                       double delta_crit, double gamma) {
  if (!(gamma > 0.0))
    throw std::domain_error("the damped transition time requires gamma > 0");
  if (delta_crit <= delta_u) return {0.0, true};
  return {(2.0 - 2.0 * delta0 / (delta_crit - delta_u)) / gamma, false};
}

ContourGrid energy_contours(double g, double delta, std::size_t nz,
                            std::size_t nphi, double phi_min, double phi_max,
                            double z_min, double z_max) {
  if (nz < 2 || nphi < 2)
    throw std::invalid_argument("contour grid needs at least 2x2 points");
  if (std::max(std::abs(z_min), std::abs(z_max)) > 1.0)
    throw std::invalid_argument("contour grid must stay within |z| <= 1");
  ContourGrid grid;
  grid.z = linspace(z_min, z_max, nz);
  grid.phi = linspace(phi_min, phi_max, nphi);
  grid.value.resize(nz * nphi);
  for (std::size_t ip = 0; ip < nphi; ++ip)
    for (std::size_t iz = 0; iz < nz; ++iz)
      grid.value[ip * nz + iz] =
          bjj::hamiltonian(grid.z[iz], grid.phi[ip], g, delta);
  return grid;
}

}  // namespace pbjj::analysis
