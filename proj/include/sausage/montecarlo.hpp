#pragma once

#include "sausage/geometry.hpp"
#include "sausage/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sausage {

/// Discretized path on a uniform time grid. Column i of `points` is the
/// position at times(i).
struct PathPolyline {
    int dim = 0;
    Eigen::VectorXd times;
    Eigen::MatrixXd points;
    bool pinned = false;

    int steps() const { return static_cast<int>(times.size()) - 1; }
    double horizon() const { return times(times.size() - 1); }
};

/// Brownian bridge from the origin back to the origin over [0, t]. Increments
/// have per-coordinate variance 2Δs. Power-of-two step counts use the
/// bisection construction, so doubling `steps` refines the same path.
PathPolyline sample_bridge(int m, double t, int steps, RngStream& rng);

/// Brownian motion from the origin over [0, t], per-coordinate increment
/// variance 2Δs. Same construction rule as sample_bridge.
PathPolyline sample_motion(int m, double t, int steps, RngStream& rng);

enum class BiasMode { polyline, bridge_corrected };

std::string to_string(BiasMode mode);
BiasMode parse_bias_mode(const std::string& name);

class UnsupportedBody : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Probability that the sausage path ⊕ K contains x, for K a ball centred at
/// the origin. `polyline` returns 0 or 1 from the piecewise-linear path.
/// `bridge_corrected` adds, per segment, the chance that the continuous
/// path between grid points dips within r of x, using the half-space
/// crossing probability exp(-d_a d_b / Δs) for endpoint gaps d_a, d_b.
double sausage_covers(const PathPolyline& path, const CompactBody& body, const Eigen::Ref<const Eigen::VectorXd>& x,
                      BiasMode mode);

struct MCEstimate {
    double mean = 0.0;
    double stderr = 0.0;
    int replicas = 0;
    std::uint64_t seed = 0;
    int steps = 0;
};

/// Resource limits hit; `partial()` holds the estimate over completed replicas.
class PartialResultError : public std::runtime_error {
  public:
    PartialResultError(const std::string& what, MCEstimate partial)
        : std::runtime_error(what), partial_(partial) {}
    const MCEstimate& partial() const noexcept { return partial_; }

  private:
    MCEstimate partial_;
};

struct McConfig {
    int steps = 512;
    int points_per_replica = 2048;
    int replicas = 256;
    std::uint64_t seed = 1;
    BiasMode mode = BiasMode::bridge_corrected;
    /// Jittered sampling: one point per cell of a regular grid over the box.
    bool stratified = false;
    int threads = 1;
    /// Relative enlargement of the sampling box, for box-sensitivity checks.
    double box_scale = 1.0;
    /// Wall-clock limit in seconds; zero disables it.
    double time_budget = 0.0;
};

/// Expected intersection volume of k pinned sausages (Brownian bridges).
MCEstimate estimate_Z(int k, int m, const CompactBody& body, double t, const McConfig& config);

/// Expected intersection volume of k unpinned sausages (free motions).
MCEstimate estimate_Q(int k, int m, const CompactBody& body, double t, const McConfig& config);

}  // namespace sausage
