#include "sausage/montecarlo.hpp"

#include "sausage/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <optional>
#include <thread>
#include <vector>

namespace sausage {

namespace {

constexpr std::uint32_t kPointStream = 0xFFFFFFFFu;

void check_path_args(int m, double t, int steps, int min_steps) {
    if (m < 1) throw DomainError("path sampling: dimension must be >= 1");
    if (!(t > 0.0)) throw DomainError("path sampling: t must be positive");
    if (steps < min_steps) throw DomainError("path sampling: too few steps");
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Lévy construction: endpoint first, then midpoints level by level. With a
// power-of-two grid the first normals drawn fix the coarse levels, so a path
// with 2n steps refines the n-step path drawn from the same stream.
void fill_bisection(PathPolyline& path, int steps, RngStream& rng) {
    const int m = path.dim;
    for (int h = steps; h > 1; h /= 2) {
        for (int i = 0; i < steps; i += h) {
            const int mid = i + h / 2;
            const double sd = std::sqrt(0.5 * (path.times(i + h) - path.times(i)));
            for (int d = 0; d < m; ++d) {
                path.points(d, mid) = 0.5 * (path.points(d, i) + path.points(d, i + h)) + sd * rng.normal();
            }
        }
    }
}

PathPolyline empty_path(int m, double t, int steps) {
    PathPolyline path;
    path.dim = m;
    path.times = Eigen::VectorXd::LinSpaced(steps + 1, 0.0, t);
    path.times(steps) = t;
    path.points = Eigen::MatrixXd::Zero(m, steps + 1);
    return path;
}

PathPolyline sample_free(int m, double t, int steps, RngStream& rng) {
    PathPolyline path = empty_path(m, t, steps);
    if (is_power_of_two(steps)) {
        const double sd = std::sqrt(2.0 * t);
        for (int d = 0; d < m; ++d) path.points(d, steps) = sd * rng.normal();
        fill_bisection(path, steps, rng);
        return path;
    }
    for (int i = 0; i < steps; ++i) {
        const double sd = std::sqrt(2.0 * (path.times(i + 1) - path.times(i)));
        for (int d = 0; d < m; ++d) path.points(d, i + 1) = path.points(d, i) + sd * rng.normal();
    }
    return path;
}

double ball_radius(const CompactBody& body, int m) {
    const auto* ball = std::get_if<Ball>(&body);
    if (!ball) throw UnsupportedBody("Monte Carlo sausages need a ball obstacle");
    if (ball->dim != m) throw UnsupportedBody("ball dimension does not match m");
    return ball->radius;
}

}  // namespace

PathPolyline sample_bridge(int m, double t, int steps, RngStream& rng) {
    check_path_args(m, t, steps, 2);
    PathPolyline path;
    if (is_power_of_two(steps)) {
        path = empty_path(m, t, steps);
        fill_bisection(path, steps, rng);
    } else {
        // B(s) = W(s) - (s/t) W(t)
        path = sample_free(m, t, steps, rng);
        const Eigen::VectorXd end = path.points.col(steps);
        for (int i = 1; i < steps; ++i) path.points.col(i) -= (path.times(i) / t) * end;
        path.points.col(steps).setZero();
    }
    path.pinned = true;
    return path;
}

PathPolyline sample_motion(int m, double t, int steps, RngStream& rng) {
    check_path_args(m, t, steps, 1);
    return sample_free(m, t, steps, rng);
}

std::string to_string(BiasMode mode) {
    return mode == BiasMode::polyline ? "polyline" : "bridge_corrected";
}

BiasMode parse_bias_mode(const std::string& name) {
    if (name == "polyline") return BiasMode::polyline;
    if (name == "bridge_corrected" || name == "bridge-corrected") return BiasMode::bridge_corrected;
    throw std::invalid_argument("unknown bias mode '" + name + "'");
}

namespace {

// Path data laid out for the coverage inner loop.
struct PreparedPath {
    const PathPolyline* path = nullptr;
    Eigen::VectorXd lo;  // bounding box of the vertices
    Eigen::VectorXd hi;
    double max_dt = 0.0;
};

PreparedPath prepare(const PathPolyline& path) {
    PreparedPath p;
    p.path = &path;
    p.lo = path.points.rowwise().minCoeff();
    p.hi = path.points.rowwise().maxCoeff();
    for (int i = 0; i < path.steps(); ++i) p.max_dt = std::max(p.max_dt, path.times(i + 1) - path.times(i));
    return p;
}

// Beyond this many √Δs from every vertex the crossing correction is below e^{-49}.
constexpr double kMarginSigmas = 7.0;

double covers_prepared(const PreparedPath& pp, double r, const Eigen::Ref<const Eigen::VectorXd>& x,
                       BiasMode mode) {
    const PathPolyline& path = *pp.path;
    const double margin = r + (mode == BiasMode::bridge_corrected ? kMarginSigmas * std::sqrt(pp.max_dt) : 0.0);
    double gap2 = 0.0;
    for (int d = 0; d < path.dim; ++d) {
        const double g = std::max({pp.lo(d) - x(d), x(d) - pp.hi(d), 0.0});
        gap2 += g * g;
    }
    if (gap2 > margin * margin) return 0.0;

    const double r2 = r * r;
    const int n = path.steps();
    const int m = path.dim;
    const double* pts = path.points.data();
    double miss = 1.0;
    double prev_gap = -1.0;
    for (int i = 0; i < n; ++i) {
        const double* a = pts + static_cast<std::ptrdiff_t>(i) * m;
        const double* b = a + m;
        double ab2 = 0.0, ax_ab = 0.0, ax2 = 0.0;
        for (int d = 0; d < m; ++d) {
            const double ab = b[d] - a[d];
            const double ax = x(d) - a[d];
            ab2 += ab * ab;
            ax_ab += ax * ab;
            ax2 += ax * ax;
        }
        double seg2;
        if (ax_ab <= 0.0 || ab2 == 0.0) {
            seg2 = ax2;
        } else if (ax_ab >= ab2) {
            double bx2 = 0.0;
            for (int d = 0; d < m; ++d) bx2 += (x(d) - b[d]) * (x(d) - b[d]);
            seg2 = bx2;
        } else {
            seg2 = std::max(0.0, ax2 - ax_ab * ax_ab / ab2);
        }
        if (seg2 <= r2) return 1.0;
        if (mode == BiasMode::bridge_corrected) {
            const double gap_a = prev_gap >= 0.0 ? prev_gap : std::sqrt(ax2) - r;
            double bx2 = 0.0;
            for (int d = 0; d < m; ++d) bx2 += (x(d) - b[d]) * (x(d) - b[d]);
            const double gap_b = std::sqrt(bx2) - r;
            prev_gap = gap_b;
            const double dt = path.times(i + 1) - path.times(i);
            const double exponent = gap_a * gap_b / dt;
            if (exponent < 50.0) miss *= 1.0 - std::exp(-exponent);
        }
    }
    return mode == BiasMode::bridge_corrected ? std::clamp(1.0 - miss, 0.0, 1.0) : 0.0;
}

}  // namespace

double sausage_covers(const PathPolyline& path, const CompactBody& body, const Eigen::Ref<const Eigen::VectorXd>& x,
                      BiasMode mode) {
    const double r = ball_radius(body, path.dim);
    if (x.size() != path.dim) throw std::invalid_argument("sausage_covers: point dimension mismatch");
    return covers_prepared(prepare(path), r, x, mode);
}

namespace {

enum class PathKind { bridge, motion };

double run_replica(PathKind kind, int k, int m, double r, double t, const McConfig& cfg, std::uint32_t replica) {
    std::vector<PathPolyline> paths;
    paths.reserve(k);
    for (int i = 0; i < k; ++i) {
        RngStream rng(cfg.seed, replica, static_cast<std::uint32_t>(i));
        paths.push_back(kind == PathKind::bridge ? sample_bridge(m, t, cfg.steps, rng)
                                                 : sample_motion(m, t, cfg.steps, rng));
    }
    std::vector<PreparedPath> prepared;
    prepared.reserve(k);
    for (const auto& p : paths) prepared.push_back(prepare(p));

    // Points must lie within r of every path, so the path with the smallest
    // excursion bounds the box.
    double reach_min = INFINITY;
    for (const auto& p : paths) reach_min = std::min(reach_min, p.points.colwise().norm().maxCoeff());
    // The crossing margin is kept in both modes so that polyline and
    // corrected runs with one seed sample the same points.
    const double half = cfg.box_scale * (r + reach_min + kMarginSigmas * std::sqrt(prepared[0].max_dt));
    const double box_volume = std::pow(2.0 * half, m);

    RngStream rng(cfg.seed, replica, kPointStream);
    Eigen::VectorXd x(m);
    auto coverage = [&]() {
        double prob = 1.0;
        for (const auto& pp : prepared) {
            prob *= covers_prepared(pp, r, x, cfg.mode);
            if (prob == 0.0) break;
        }
        return prob;
    };

    double sum = 0.0;
    long count = 0;
    if (cfg.stratified) {
        const int cells = std::max(1, static_cast<int>(std::floor(std::pow(cfg.points_per_replica, 1.0 / m) + 1e-9)));
        const double width = 2.0 * half / cells;
        std::vector<int> idx(m, 0);
        for (;;) {
            for (int d = 0; d < m; ++d) x(d) = -half + (idx[d] + rng.uniform()) * width;
            sum += coverage();
            ++count;
            int d = 0;
            while (d < m && ++idx[d] == cells) idx[d++] = 0;
            if (d == m) break;
        }
    } else {
        for (int i = 0; i < cfg.points_per_replica; ++i) {
            for (int d = 0; d < m; ++d) x(d) = half * (2.0 * rng.uniform() - 1.0);
            sum += coverage();
        }
        count = cfg.points_per_replica;
    }
    return box_volume * sum / static_cast<double>(count);
}

MCEstimate combine(const std::vector<std::optional<double>>& results, const McConfig& cfg) {
    MCEstimate est;
    est.seed = cfg.seed;
    est.steps = cfg.steps;
    double sum = 0.0;
    for (const auto& v : results) {
        if (v) {
            sum += *v;
            ++est.replicas;
        }
    }
    if (est.replicas == 0) return est;
    est.mean = sum / est.replicas;
    if (est.replicas >= 2) {
        double ss = 0.0;
        for (const auto& v : results) {
            if (v) ss += (*v - est.mean) * (*v - est.mean);
        }
        est.stderr = std::sqrt(ss / (est.replicas - 1) / est.replicas);
    }
    return est;
}

MCEstimate estimate(PathKind kind, int k, int m, const CompactBody& body, double t, const McConfig& cfg) {
    if (k < 1) throw DomainError("estimate: k must be >= 1");
    if (!(t > 0.0)) throw DomainError("estimate: t must be positive");
    if (cfg.replicas < 1) throw DomainError("estimate: replicas must be >= 1");
    if (cfg.points_per_replica < 1) throw DomainError("estimate: points_per_replica must be >= 1");
    if (cfg.steps < (kind == PathKind::bridge ? 2 : 1)) throw DomainError("estimate: too few steps");
    if (!(cfg.box_scale >= 1.0)) throw DomainError("estimate: box_scale must be >= 1");
    const double r = ball_radius(body, m);

    std::vector<std::optional<double>> results(cfg.replicas);
    std::atomic<int> next{0};
    std::atomic<bool> expired{false};
    const auto start = std::chrono::steady_clock::now();
    auto worker = [&]() {
        for (;;) {
            if (cfg.time_budget > 0.0) {
                const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
                if (elapsed.count() > cfg.time_budget) expired = true;
            }
            if (expired) return;
            const int i = next.fetch_add(1);
            if (i >= cfg.replicas) return;
            results[i] = run_replica(kind, k, m, r, t, cfg, static_cast<std::uint32_t>(i));
        }
    };
    const int threads = std::clamp(cfg.threads, 1, cfg.replicas);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    }

    MCEstimate est = combine(results, cfg);
    if (est.replicas < cfg.replicas) {
        throw PartialResultError("time budget exhausted after " + std::to_string(est.replicas) + " of " +
                                     std::to_string(cfg.replicas) + " replicas",
                                 est);
    }
    return est;
}

}  // namespace

MCEstimate estimate_Z(int k, int m, const CompactBody& body, double t, const McConfig& config) {
    return estimate(PathKind::bridge, k, m, body, t, config);
}

MCEstimate estimate_Q(int k, int m, const CompactBody& body, double t, const McConfig& config) {
    return estimate(PathKind::motion, k, m, body, t, config);
}

}  // namespace sausage
