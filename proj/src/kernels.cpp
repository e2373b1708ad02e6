#include "sausage/kernels.hpp"

#include "sausage/coefficients.hpp"

#include <cmath>
#include <numbers>

namespace sausage {

namespace {

void require_positive_time(double t, const char* who) {
    if (!(t > 0.0)) throw DomainError(std::string(who) + ": t must be positive");
}

}  // namespace

double p_free(int m, double d2, double t) {
    require_positive_time(t, "p_free");
    if (m < 1) throw DomainError("p_free: dimension must be >= 1");
    if (d2 < 0.0) throw DomainError("p_free: squared distance must be >= 0");
    return std::pow(4.0 * std::numbers::pi * t, -0.5 * m) * std::exp(-d2 / (4.0 * t));
}

double p_halfline_diag(double x, double t) {
    require_positive_time(t, "p_halfline_diag");
    if (x < 0.0) throw DomainError("p_halfline_diag: x must be >= 0");
    return -std::expm1(-x * x / t) / std::sqrt(4.0 * std::numbers::pi * t);
}

KernelEval p_planar_expansion_diag(double delta, double kappa, double t) {
    require_positive_time(t, "p_planar_expansion_diag");
    if (!(delta > 0.0)) throw DomainError("p_planar_expansion_diag: delta must be positive");
    const double z = delta / std::sqrt(t);
    const double brace = -std::expm1(-z * z) - kappa * delta * delta / std::sqrt(t) * erfc_scaled_tail(z);
    return {brace / (4.0 * std::numbers::pi * t), Regime::expansion};
}

double halfline_norm_scaled(int k, const std::function<double(double)>& f, double t, double tol) {
    require_positive_time(t, "halfline_norm");
    if (k < 1) throw DomainError("halfline_norm: k must be >= 1");
    auto integrand = [&](double x) { return std::pow(-std::expm1(-x * x / t), k) * f(x); };
    const double split = 8.0 * std::sqrt(t);
    const QuadratureResult layer = adaptive_integrate(integrand, 0.0, split, tol);
    const QuadratureResult bulk = adaptive_integrate(integrand, split, INFINITY, tol);
    return layer.value + bulk.value;
}

double halfline_norm(int k, const std::function<double(double)>& f, double t, double tol) {
    return std::pow(4.0 * std::numbers::pi * t, -0.5 * k) * halfline_norm_scaled(k, f, t, tol);
}

double halfline_series(int k, double f_integral, std::span<const double> derivatives_at_zero, double t) {
    require_positive_time(t, "halfline_series");
    double sum = f_integral;
    for (std::size_t i = 0; i < derivatives_at_zero.size(); ++i) {
        const int j = static_cast<int>(i) + 1;
        sum += std::pow(t, 0.5 * j) * derivatives_at_zero[i] * alpha_coeff(k, j);
    }
    return sum;
}

double u_exterior_ball(double r, double t) {
    require_positive_time(t, "u_exterior_ball");
    if (r < 1.0) throw DomainError("u_exterior_ball: r < 1 lies inside the obstacle (u = 1 there)");
    return 2.0 / std::sqrt(std::numbers::pi) / r * erfc_scaled_tail((r - 1.0) / (2.0 * std::sqrt(t)));
}

QuadratureResult q_k3_exact(int k, double t, double tol) {
    require_positive_time(t, "q_k3_exact");
    if (k < 1) throw DomainError("q_k3_exact: k must be >= 1");
    // r = 1 + 2√t z; erfc(10) ≈ 2e-45 bounds the discarded tail.
    constexpr double z_max = 10.0;
    const double st = std::sqrt(t);
    auto integrand = [&](double z) { return std::pow(1.0 + 2.0 * st * z, 2 - k) * std::pow(std::erfc(z), k); };
    QuadratureResult shell = adaptive_integrate(integrand, 0.0, z_max, tol);
    const double scale = 8.0 * std::numbers::pi * st;
    const double tail_bound =
        scale * std::pow(1.0 + 2.0 * st * z_max, std::max(0, 2 - k) + 1) * std::pow(std::erfc(z_max), k);
    return {4.0 * std::numbers::pi / 3.0 + scale * shell.value, scale * shell.error_estimate + tail_bound,
            shell.evaluations};
}

double boundary_layer_cutoff(double t, double eps) {
    return std::max(std::pow(t, eps), std::sqrt(45.0 * t));
}

double boundary_layer_profile(int k, double kappa, double t, double cutoff, double tol) {
    const double st = std::sqrt(t);
    auto integrand = [&](double x) {
        const double brace = std::exp(-x * x) + kappa * st * x * x * erfc_scaled_tail(x);
        return std::pow(brace, k) * (1.0 - st * kappa * x);
    };
    return st * adaptive_integrate(integrand, 0.0, cutoff / st, tol).value;
}

double z_k2_boundary_layer(const CompactBody& body, int k, double t, double eps, Orientation side, double tol) {
    require_positive_time(t, "z_k2_boundary_layer");
    if (k < 1) throw DomainError("z_k2_boundary_layer: k must be >= 1");
    if (!(eps > 0.4 && eps < 0.5)) throw DomainError("z_k2_boundary_layer: eps must lie in (2/5, 1/2)");
    if (dimension(body) != 2) throw GeometryError("z_k2_boundary_layer: needs a planar body");
    const double cutoff = boundary_layer_cutoff(t, eps);
    if (cutoff >= reach(body)) throw GeometryError("z_k2_boundary_layer: layer width exceeds the boundary reach");
    const double sign = orientation_sign(side);

    if (const auto* ball = std::get_if<Ball>(&body)) {
        const double kappa = sign / ball->radius;
        return volume(body) + 2.0 * std::numbers::pi * ball->radius *
                                  boundary_layer_profile(k, kappa, t, cutoff, tol);
    }
    const auto& domain = std::get<PlanarCurveDomain>(body);
    const PlanarCurve& curve = domain.curve();
    auto along = [&](double s) {
        return curve.speed(s) * boundary_layer_profile(k, sign * domain.inward_curvature(s), t, cutoff, tol);
    };
    return domain.area() + periodic_integrate(along, curve.period(), tol).value;
}

}  // namespace sausage
