#include "sausage/numerics.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace sausage {

double gamma_fn(double x) {
    if (!(x > 0.0)) throw DomainError("gamma_fn: argument must be positive");
    return std::tgamma(x);
}

double erfc_scaled_tail(double z) {
    if (z > 30.0) return 0.0;
    return 0.5 * std::sqrt(std::numbers::pi) * std::erfc(z);
}

GaussRule gauss_legendre(int n) {
    if (n < 1) throw DomainError("gauss_legendre: need at least one node");
    GaussRule rule{std::vector<double>(n), std::vector<double>(n)};
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            const double step = p0 / dp;
            z -= step;
            if (std::abs(step) < 1e-16) break;
        }
        // Recompute the derivative at the converged node.
        double p0 = 1.0;
        double p1 = 0.0;
        for (int j = 0; j < n; ++j) {
            const double p2 = p1;
            p1 = p0;
            p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
        }
        dp = n * (z * p0 - p1) / (z * z - 1.0);
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        rule.nodes[i] = -z;
        rule.nodes[n - 1 - i] = z;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

namespace detail {

const GaussRule& gl10() {
    static const GaussRule rule = gauss_legendre(10);
    return rule;
}

}  // namespace detail

namespace {

// (√π/2) erfc(√s) = √s ∫_1^∞ e^{-s η²} dη
double scaled_exp_tail(double s) {
    return 0.5 * std::sqrt(std::numbers::pi) * std::erfc(std::sqrt(s));
}

QuadratureResult i_k_reduced(int k, double p, double tol) {
    // |η|^{-2p} = Γ(p)^{-1} ∫_0^∞ s^{p-1} e^{-s|η|²} ds factorizes the k-fold
    // integral; substituting s = v^{1/α} with α = p - k/2 removes the
    // algebraic singularity at s = 0.
    const double alpha = p - 0.5 * k;
    auto integrand = [&](double v) {
        if (v <= 0.0) return std::pow(0.5 * std::sqrt(std::numbers::pi), k);
        const double s = std::pow(v, 1.0 / alpha);
        return std::pow(scaled_exp_tail(s), k);
    };
    // Split at v = 1 where the 1/α-power transition sits for small α.
    QuadratureResult head = adaptive_integrate(integrand, 0.0, 1.0, tol);
    QuadratureResult tail = adaptive_integrate(integrand, 1.0, INFINITY, tol);
    const double scale = 1.0 / (alpha * std::tgamma(p));
    return {scale * (head.value + tail.value),
            scale * (head.error_estimate + tail.error_estimate),
            head.evaluations + tail.evaluations};
}

// Integrand after η = 1/u: (Σ u_i^{-2})^{-p} Π u_i^{-2} on (0,1]^k.
template <class Coords>
double mapped_integrand(const Coords& u, int k, double p) {
    double sum = 0.0;
    double jac = 1.0;
    for (int i = 0; i < k; ++i) {
        const double inv2 = 1.0 / (u[i] * u[i]);
        sum += inv2;
        jac *= inv2;
    }
    return std::pow(sum, -p) * jac;
}

// Geometrically graded composite rule on (0,1]: panels [0,2^-L], ..., [1/2,1].
GaussRule graded_rule(int levels, int points) {
    const GaussRule ref = gauss_legendre(points);
    GaussRule out;
    auto add_panel = [&](double a, double b) {
        const double mid = 0.5 * (a + b);
        const double half = 0.5 * (b - a);
        for (int i = 0; i < points; ++i) {
            out.nodes.push_back(mid + half * ref.nodes[i]);
            out.weights.push_back(half * ref.weights[i]);
        }
    };
    add_panel(0.0, std::ldexp(1.0, -levels));
    for (int l = levels; l >= 1; --l) add_panel(std::ldexp(1.0, -l), std::ldexp(1.0, -l + 1));
    return out;
}

double tensor_sum(const GaussRule& rule, int k, double p) {
    const int n = static_cast<int>(rule.nodes.size());
    std::array<int, 8> idx{};
    std::array<double, 8> u{};
    double total = 0.0;
    for (;;) {
        double w = 1.0;
        for (int d = 0; d < k; ++d) {
            u[d] = rule.nodes[idx[d]];
            w *= rule.weights[idx[d]];
        }
        total += w * mapped_integrand(u, k, p);
        int d = 0;
        while (d < k && ++idx[d] == n) idx[d++] = 0;
        if (d == k) break;
    }
    return total;
}

QuadratureResult i_k_tensor(int k, double p, double tol) {
    if (k > 4) throw DomainError("i_k_integral: tensor rule supports k <= 4");
    // Budget keeps the finest tensor grid around 1e8 nodes at k = 4.
    const std::array<int, 5> max_levels{0, 60, 40, 28, 16};
    int levels = 8;
    int points = 4;
    GaussRule rule = graded_rule(levels, points);
    double previous = tensor_sum(rule, k, p);
    long evaluations = static_cast<long>(std::pow(rule.nodes.size(), k));
    double diff = INFINITY;
    while (levels + 6 <= max_levels[k]) {
        levels += 6;
        points += 2;
        rule = graded_rule(levels, points);
        const double current = tensor_sum(rule, k, p);
        evaluations += static_cast<long>(std::pow(rule.nodes.size(), k));
        diff = std::abs(current - previous);
        previous = current;
        if (diff < tol * (1.0 + std::abs(current))) break;
    }
    return {previous, diff, evaluations};
}

QuadratureResult i_k_quasi_random(int k, double p) {
    // Kronecker (R_k) sequence; φ_k is the positive root of x^{k+1} = x + 1.
    double phi = 2.0;
    for (int i = 0; i < 64; ++i) phi = std::pow(1.0 + phi, 1.0 / (k + 1));
    std::vector<double> alpha(k);
    for (int d = 0; d < k; ++d) alpha[d] = std::fmod(std::pow(1.0 / phi, d + 1), 1.0);

    constexpr long samples = 1L << 20;
    std::vector<double> w(k);
    std::vector<double> u(k);
    double halves[2] = {0.0, 0.0};
    for (long i = 0; i < samples; ++i) {
        // u = w² flattens the corner singularity of the mapped integrand.
        double jac = 1.0;
        for (int d = 0; d < k; ++d) {
            w[d] = std::fmod(0.5 + alpha[d] * static_cast<double>(i + 1), 1.0);
            if (w[d] <= 0.0) w[d] = 0.5 / samples;
            u[d] = w[d] * w[d];
            jac *= 2.0 * w[d];
        }
        halves[i < samples / 2 ? 0 : 1] += jac * mapped_integrand(u, k, p);
    }
    const double a = halves[0] / (samples / 2);
    const double b = halves[1] / (samples / 2);
    return {0.5 * (a + b), 0.5 * std::abs(a - b), samples};
}

}  // namespace

QuadratureResult i_k_integral(int k, double p, IkMethod method, double tol) {
    if (k < 1) throw DomainError("i_k_integral: k must be >= 1");
    if (!(p > 0.5 * k)) throw DomainError("i_k_integral: divergent for p <= k/2");
    switch (method) {
        case IkMethod::automatic:
            if (k == 1) return {1.0 / (2.0 * p - 1.0), 0.0, 0};
            return i_k_reduced(k, p, tol);
        case IkMethod::tensor:
            return i_k_tensor(k, p, tol);
        case IkMethod::quasi_random:
            return i_k_quasi_random(k, p);
    }
    throw DomainError("i_k_integral: unknown method");
}

}  // namespace sausage
