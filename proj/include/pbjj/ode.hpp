#pragma once

// Adaptive Dormand-Prince 5(4) initial-value integrator for real state
// vectors, with a free quartic interpolant (dense output) and zero-crossing
// detection on the continuous extension. Complex systems are integrated as
// interleaved real/imaginary pairs by the caller.

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pbjj::ode {

// Vector field callback: writes dy/dt for the given (t, y).
using Rhs = std::function<void(double t, std::span<const double> y,
                               std::span<double> dydt)>;

struct Options {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double max_step = 0.0;  // 0 = no cap
  bool dense_output = true;
  std::size_t max_steps = 20'000'000;
};

/// Raised when a step cannot be completed; carries the time reached.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double time_reached)
      : std::runtime_error(what), time_(time_reached) {}
  double time_reached() const noexcept { return time_; }

 private:
  double time_;
};

class Trajectory {
 public:
  std::size_t dimension() const noexcept { return dim_; }
  const std::vector<double>& times() const noexcept { return times_; }
  double t_begin() const { return times_.front(); }
  double t_end() const { return times_.back(); }
  bool has_dense_output() const noexcept { return !dense_.empty(); }

  // State stored at mesh index.
  std::span<const double> state(std::size_t index) const;
  // One component across the whole mesh.
  std::vector<double> component(std::size_t comp) const;

  // Dense evaluation. Mesh points return the stored state bit-for-bit.
  void sample(double t, std::span<double> out) const;
  std::vector<double> sample(double t) const;

 private:
  friend Trajectory integrate(const Rhs&, std::span<const double>, double,
                              double, const Options&);
  std::size_t dim_ = 0;
  std::vector<double> times_;
  std::vector<double> states_;  // row-major, dim_ per mesh point
  std::vector<double> dense_;   // 5 coefficients per component per segment
  std::size_t segment_of(double t) const;
};

Trajectory integrate(const Rhs& rhs, std::span<const double> y0, double t0,
                     double t1, const Options& opts = {});

enum class Direction { rising, falling, any };

// Times where a component crosses zero, refined on the interpolant.
// `time_tol` is relative to max(1, |t|).
std::vector<double> zero_crossings(const Trajectory& traj, std::size_t comp,
                                   Direction dir = Direction::any,
                                   double time_tol = 1e-12);

// Interpolant evaluated on an arbitrary grid inside the span.
std::vector<std::vector<double>> resample(const Trajectory& traj,
                                          std::span<const double> grid);

}  // namespace pbjj::ode
