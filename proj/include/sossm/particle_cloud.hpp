#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sossm {

/// Raised when every particle weight underflows to zero at some step.
class DegeneracyError : public std::runtime_error {
 public:
  DegeneracyError(long t, const std::string& where)
      : std::runtime_error("all particle weights are zero at " + where + " t=" +
                           std::to_string(t)),
        t_(t) {}
  long time_index() const { return t_; }

 private:
  long t_;
};

/// The weighted particle system {(W^n, theta^n, X^n)}. Parameter and state
/// payloads live in flat row-major arrays (particle n occupies one stride).
/// For the Rao-Blackwellised filter the state slot holds Kalman sufficient
/// statistics instead of a raw state vector.
struct ParticleCloud {
  int n_particles = 0;
  int theta_dim = 0;
  int state_stride = 0;
  long t = 0;  // time of the most recent processed observation

  std::vector<double> theta;   // n_particles * theta_dim
  std::vector<double> state;   // n_particles * state_stride
  std::vector<double> logw;    // unnormalized log-weights
  std::vector<double> weights; // normalized
  std::vector<std::uint32_t> ancestry;  // ancestors used at the last step
  std::vector<long> resampled_at;

  double logw_lse = 0.0;  // log sum exp of logw, maintained by normalize()

  std::span<double> theta_row(int n) {
    return {theta.data() + static_cast<std::size_t>(n) * theta_dim,
            static_cast<std::size_t>(theta_dim)};
  }
  std::span<const double> theta_row(int n) const {
    return {theta.data() + static_cast<std::size_t>(n) * theta_dim,
            static_cast<std::size_t>(theta_dim)};
  }
  std::span<double> state_row(int n) {
    return {state.data() + static_cast<std::size_t>(n) * state_stride,
            static_cast<std::size_t>(state_stride)};
  }
  std::span<const double> state_row(int n) const {
    return {state.data() + static_cast<std::size_t>(n) * state_stride,
            static_cast<std::size_t>(state_stride)};
  }

  /// Recompute normalized weights from logw via max-shift; throws
  /// DegeneracyError when no weight is finite.
  void normalize(const std::string& where = "step");
};

}  // namespace sossm
