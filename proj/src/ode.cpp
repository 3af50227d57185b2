#include "pbjj/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace pbjj::ode {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0;
constexpr double c3 = 3.0 / 10.0;
constexpr double c4 = 4.0 / 5.0;
constexpr double c5 = 8.0 / 9.0;

constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                 a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                 a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
// Difference between the 5th- and 4th-order weights.
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Quartic interpolant weights.
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

std::string describe_state(double t, std::span<const double> y) {
  std::ostringstream os;
  os.precision(17);
  os << "t = " << t << ", state = [";
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (i) os << ", ";
    os << y[i];
  }
  os << "]";
  return os.str();
}

void eval_rhs(const Rhs& rhs, double t, std::span<const double> y,
              std::span<double> f) {
  rhs(t, y, f);
  for (double v : f) {
    if (!std::isfinite(v)) {
      throw IntegrationError("non-finite derivative at " + describe_state(t, y),
                             t);
    }
  }
}

double rms_scaled(std::span<const double> v, std::span<const double> scale) {
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double q = v[i] / scale[i];
    sum += q * q;
  }
  return std::sqrt(sum / static_cast<double>(v.size()));
}

double initial_step(const Rhs& rhs, double t0, std::span<const double> y0,
                    std::span<const double> f0, double span, double max_step,
                    double rel_tol, double abs_tol) {
  const std::size_t n = y0.size();
  std::vector<double> scale(n), y1(n), f1(n);
  for (std::size_t i = 0; i < n; ++i)
    scale[i] = abs_tol + rel_tol * std::abs(y0[i]);
  const double d0 = rms_scaled(y0, scale);
  const double d1n = rms_scaled(f0, scale);
  double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
  h0 = std::min({h0, span, max_step});
  for (std::size_t i = 0; i < n; ++i) y1[i] = y0[i] + h0 * f0[i];
  eval_rhs(rhs, t0 + h0, y1, f1);
  for (std::size_t i = 0; i < n; ++i) f1[i] = (f1[i] - f0[i]) / h0;
  const double d2 = rms_scaled(f1, scale);
  double h1;
  if (std::max(d1n, d2) <= 1e-15) {
    h1 = std::max(1e-6, h0 * 1e-3);
  } else {
    h1 = std::pow(0.01 / std::max(d1n, d2), 0.2);
  }
  return std::min({100.0 * h0, h1, span, max_step});
}

}  // namespace

std::span<const double> Trajectory::state(std::size_t index) const {
  if (index >= times_.size()) throw std::out_of_range("mesh index out of range");
  return {states_.data() + index * dim_, dim_};
}

std::vector<double> Trajectory::component(std::size_t comp) const {
  if (comp >= dim_) throw std::out_of_range("component index out of range");
  std::vector<double> out(times_.size());
  for (std::size_t i = 0; i < times_.size(); ++i)
    out[i] = states_[i * dim_ + comp];
  return out;
}

std::size_t Trajectory::segment_of(double t) const {
  // First mesh time strictly greater than t; segment starts one before.
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t k = static_cast<std::size_t>(it - times_.begin());
  if (k == 0) return 0;
  if (k >= times_.size()) return times_.size() - 2;
  return k - 1;
}

void Trajectory::sample(double t, std::span<double> out) const {
  if (out.size() != dim_) throw std::invalid_argument("output size mismatch");
  if (t < times_.front() || t > times_.back())
    throw std::out_of_range("sample time outside trajectory span");
  // Mesh points reproduce the stored state exactly.
  auto it = std::lower_bound(times_.begin(), times_.end(), t);
  if (it != times_.end() && *it == t) {
    const std::size_t k = static_cast<std::size_t>(it - times_.begin());
    std::copy_n(states_.data() + k * dim_, dim_, out.begin());
    return;
  }
  if (!has_dense_output())
    throw std::logic_error("trajectory was built without dense output");
  const std::size_t seg = segment_of(t);
  const double ta = times_[seg], tb = times_[seg + 1];
  const double theta = (t - ta) / (tb - ta);
  const double theta1 = 1.0 - theta;
  const double* c = dense_.data() + seg * 5 * dim_;
  for (std::size_t i = 0; i < dim_; ++i) {
    out[i] = c[i] +
             theta * (c[dim_ + i] +
                      theta1 * (c[2 * dim_ + i] +
                                theta * (c[3 * dim_ + i] +
                                         theta1 * c[4 * dim_ + i])));
  }
}

std::vector<double> Trajectory::sample(double t) const {
  std::vector<double> out(dim_);
  sample(t, out);
  return out;
}

Trajectory integrate(const Rhs& rhs, std::span<const double> y0, double t0,
                     double t1, const Options& opts) {
  if (!(t0 < t1)) throw std::invalid_argument("integration span must have t0 < t1");
  if (y0.empty()) throw std::invalid_argument("empty initial state");
  for (double v : y0)
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite initial state");
  if (!(opts.rel_tol > 0.0) || !(opts.abs_tol > 0.0))
    throw std::invalid_argument("tolerances must be positive");
  if (opts.max_step < 0.0) throw std::invalid_argument("max_step must be >= 0");

  const std::size_t n = y0.size();
  const double span = t1 - t0;
  const double hmax = opts.max_step > 0.0 ? opts.max_step
                                          : std::numeric_limits<double>::infinity();

  std::vector<double> y(y0.begin(), y0.end()), ynew(n), ystage(n), err(n);
  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
  std::vector<double> scale(n);

  Trajectory traj;
  traj.dim_ = n;
  traj.times_.push_back(t0);
  traj.states_.insert(traj.states_.end(), y.begin(), y.end());

  double t = t0;
  eval_rhs(rhs, t, y, k1);
  double h = initial_step(rhs, t, y, k1, span, hmax, opts.rel_tol, opts.abs_tol);
  h = std::max(h, 1e-14 * span);

  std::size_t steps = 0;
  bool just_rejected = false;
  const double eps = std::numeric_limits<double>::epsilon();

  while (t < t1) {
    if (++steps > opts.max_steps) {
      throw IntegrationError(
          "step budget exhausted at t = " + std::to_string(t), t);
    }
    h = std::min(h, hmax);
    if (t + h > t1) h = t1 - t;
    if (h <= 8.0 * eps * std::max(std::abs(t), 1.0)) {
      throw IntegrationError("step size underflow at t = " + std::to_string(t),
                             t);
    }

    for (std::size_t i = 0; i < n; ++i)
      ystage[i] = y[i] + h * a21 * k1[i];
    eval_rhs(rhs, t + c2 * h, ystage, k2);
    for (std::size_t i = 0; i < n; ++i)
      ystage[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    eval_rhs(rhs, t + c3 * h, ystage, k3);
    for (std::size_t i = 0; i < n; ++i)
      ystage[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    eval_rhs(rhs, t + c4 * h, ystage, k4);
    for (std::size_t i = 0; i < n; ++i)
      ystage[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] +
                              a54 * k4[i]);
    eval_rhs(rhs, t + c5 * h, ystage, k5);
    for (std::size_t i = 0; i < n; ++i)
      ystage[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                              a64 * k4[i] + a65 * k5[i]);
    eval_rhs(rhs, t + h, ystage, k6);
    for (std::size_t i = 0; i < n; ++i)
      ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                            b6 * k6[i]);
    eval_rhs(rhs, t + h, ynew, k7);

    for (std::size_t i = 0; i < n; ++i) {
      err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                    e6 * k6[i] + e7 * k7[i]);
      scale[i] = opts.abs_tol +
                 opts.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
    }
    const double enorm = rms_scaled(err, scale);

    if (enorm <= 1.0) {
      if (opts.dense_output) {
        const std::size_t base = traj.dense_.size();
        traj.dense_.resize(base + 5 * n);
        double* c = traj.dense_.data() + base;
        for (std::size_t i = 0; i < n; ++i) {
          const double ydiff = ynew[i] - y[i];
          const double bspl = h * k1[i] - ydiff;
          c[i] = y[i];
          c[n + i] = ydiff;
          c[2 * n + i] = bspl;
          c[3 * n + i] = ydiff - h * k7[i] - bspl;
          c[4 * n + i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] +
                              d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
        }
      }
      t += h;
      if (t >= t1) t = t1;
      y.swap(ynew);
      k1.swap(k7);  // first-same-as-last
      traj.times_.push_back(t);
      traj.states_.insert(traj.states_.end(), y.begin(), y.end());

      double fac = enorm == 0.0
                       ? 5.0
                       : std::clamp(0.9 * std::pow(enorm, -0.2), 0.2, 5.0);
      if (just_rejected) fac = std::min(fac, 1.0);
      just_rejected = false;
      h *= fac;
    } else {
      just_rejected = true;
      h *= std::clamp(0.9 * std::pow(enorm, -0.2), 0.1, 0.9);
    }
  }
  return traj;
}

namespace {

double refine_crossing(const Trajectory& traj, std::size_t comp, double ta,
                       double fa, double tb, double fb, double time_tol) {
  std::vector<double> buf(traj.dimension());
  for (int iter = 0; iter < 200; ++iter) {
    const double width_goal =
        time_tol * std::max({1.0, std::abs(ta), std::abs(tb)});
    if (tb - ta <= width_goal) break;
    const double tm = 0.5 * (ta + tb);
    if (tm <= ta || tm >= tb) break;
    traj.sample(tm, buf);
    const double fm = buf[comp];
    if (fm == 0.0) return tm;
    if ((fa > 0.0) == (fm > 0.0)) {
      ta = tm;
      fa = fm;
    } else {
      tb = tm;
      fb = fm;
    }
  }
  return 0.5 * (ta + tb);
}

bool direction_matches(Direction dir, double before, double after) {
  switch (dir) {
    case Direction::rising:
      return before < 0.0 || (before == 0.0 && after > 0.0);
    case Direction::falling:
      return before > 0.0 || (before == 0.0 && after < 0.0);
    case Direction::any:
      return true;
  }
  return true;
}

}  // namespace

std::vector<double> zero_crossings(const Trajectory& traj, std::size_t comp,
                                   Direction dir, double time_tol) {
  if (comp >= traj.dimension())
    throw std::out_of_range("component index out of range");
  if (!traj.has_dense_output())
    throw std::logic_error("zero-crossing detection needs dense output");

  const auto& times = traj.times();
  std::vector<double> values = traj.component(comp);
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    const double fa = values[i], fb = values[i + 1];
    if (fa == 0.0) {
      const double prev = i > 0 ? values[i - 1] : -fb;  // infer from exit side
      if (direction_matches(dir, prev == 0.0 ? -fb : prev, fb)) {
        if (out.empty() || times[i] - out.back() > time_tol) out.push_back(times[i]);
      }
      continue;
    }
    if (fb == 0.0 || (fa > 0.0) == (fb > 0.0)) continue;
    if (!direction_matches(dir, fa, fb)) continue;
    const double tc =
        refine_crossing(traj, comp, times[i], fa, times[i + 1], fb, time_tol);
    if (out.empty() || tc - out.back() > time_tol) out.push_back(tc);
  }
  // A zero stored exactly at the final mesh point.
  if (values.back() == 0.0 && values.size() >= 2 &&
      direction_matches(dir, values[values.size() - 2], 0.0)) {
    if (out.empty() || times.back() - out.back() > time_tol)
      out.push_back(times.back());
  }
  return out;
}

std::vector<std::vector<double>> resample(const Trajectory& traj,
                                          std::span<const double> grid) {
  std::vector<std::vector<double>> out;
  out.reserve(grid.size());
  for (double t : grid) {
    if (t < traj.t_begin() || t > traj.t_end())
      throw std::out_of_range("resample grid point outside trajectory span");
    out.push_back(traj.sample(t));
  }
  return out;
}

}  // namespace pbjj::ode
