#pragma once

#include <algorithm>
#include <boost/math/constants/constants.hpp>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace sausage {

/// Thrown when an argument lies outside the mathematical domain of a function.
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

struct QuadratureResult {
    double value = 0.0;
    /// Difference between successive refinement levels; not a heuristic.
    double error_estimate = 0.0;
    long evaluations = 0;
};

/// Raised when refinement is exhausted; carries the best value reached.
class QuadratureError : public std::runtime_error {
  public:
    QuadratureError(const std::string& what, QuadratureResult best)
        : std::runtime_error(what), best_(best) {}
    const QuadratureResult& best() const noexcept { return best_; }

  private:
    QuadratureResult best_;
};

/// Γ(x) for x > 0.
double gamma_fn(double x);

/// ∫_z^∞ e^{-η²} dη = (√π/2) erfc(z). Exactly zero for z > 30.
double erfc_scaled_tail(double z);

/// Reference Gauss–Legendre rule on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss–Legendre nodes and weights via Newton on P_n.
GaussRule gauss_legendre(int n);

namespace detail {

const GaussRule& gl10();

template <class F>
double gl_panel(const F& f, double a, double b) {
    const GaussRule& rule = gl10();
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    }
    return half * sum;
}

struct Panel {
    double a, b;
    double left_half, right_half;  // fine-level values of the two halves
    double error;
    double value() const { return left_half + right_half; }
    bool operator<(const Panel& other) const { return error < other.error; }
};

template <class F>
Panel make_panel(const F& f, double a, double b, double coarse) {
    const double mid = 0.5 * (a + b);
    const double left = gl_panel(f, a, mid);
    const double right = gl_panel(f, mid, b);
    return Panel{a, b, left, right, std::abs(left + right - coarse)};
}

/// Globally adaptive bisection on a finite interval.
template <class F>
QuadratureResult adaptive_finite(const F& f, double a, double b, double tol,
                                 int max_panels) {
    constexpr long per_rule = 10;
    std::priority_queue<Panel> heap;
    heap.push(make_panel(f, a, b, gl_panel(f, a, b)));
    long evaluations = 3 * per_rule;
    double total = heap.top().value();
    double error = heap.top().error;

    while (error > tol * (1.0 + std::abs(total))) {
        if (static_cast<int>(heap.size()) >= max_panels) {
            throw QuadratureError("adaptive_integrate: panel budget exhausted",
                                  QuadratureResult{total, error, evaluations});
        }
        const Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const Panel left = make_panel(f, worst.a, mid, worst.left_half);
        const Panel right = make_panel(f, mid, worst.b, worst.right_half);
        evaluations += 4 * per_rule;
        total += left.value() + right.value() - worst.value();
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // Final sum from scratch so the running update cannot leave drift behind.
    total = 0.0;
    error = 0.0;
    for (; !heap.empty(); heap.pop()) {
        total += heap.top().value();
        error += heap.top().error;
    }
    return QuadratureResult{total, error, evaluations};
}

}  // namespace detail

/// Adaptive Gauss–Legendre quadrature of f over [a, b]; either endpoint may be
/// ±infinity. Converges when error_estimate ≤ tol·(1 + |value|).
template <class F>
QuadratureResult adaptive_integrate(const F& f, double a, double b, double tol,
                                    int max_panels = 4000) {
    if (!(tol > 0.0)) throw DomainError("adaptive_integrate: tol must be positive");
    if (a == b) return {};
    if (a > b) {
        QuadratureResult r = adaptive_integrate(f, b, a, tol, max_panels);
        r.value = -r.value;
        return r;
    }
    const bool lo_inf = std::isinf(a);
    const bool hi_inf = std::isinf(b);
    if (lo_inf && hi_inf) {
        QuadratureResult left = adaptive_integrate(f, a, 0.0, tol, max_panels);
        QuadratureResult right = adaptive_integrate(f, 0.0, b, tol, max_panels);
        return {left.value + right.value, left.error_estimate + right.error_estimate,
                left.evaluations + right.evaluations};
    }
    if (hi_inf) {
        // x = a + (1 - u)/u, u ∈ (0, 1]
        auto g = [&](double u) {
            const double x = a + (1.0 - u) / u;
            return f(x) / (u * u);
        };
        return detail::adaptive_finite(g, 0.0, 1.0, tol, max_panels);
    }
    if (lo_inf) {
        auto g = [&](double u) {
            const double x = b - (1.0 - u) / u;
            return f(x) / (u * u);
        };
        return detail::adaptive_finite(g, 0.0, 1.0, tol, max_panels);
    }
    return detail::adaptive_finite(f, a, b, tol, max_panels);
}

/// Integral of a smooth periodic function over one period using composite
/// Gauss–Legendre panels, doubling the panel count until successive sums
/// differ by less than tol·(1 + |value|).
template <class F>
QuadratureResult periodic_integrate(const F& f, double period, double tol = 1e-10,
                                    int initial_panels = 8, int max_panels = 1 << 14) {
    auto composite = [&](int panels) {
        const double h = period / panels;
        double sum = 0.0;
        for (int i = 0; i < panels; ++i) sum += detail::gl_panel(f, i * h, (i + 1) * h);
        return sum;
    };
    int panels = initial_panels;
    double previous = composite(panels);
    long evaluations = 10L * panels;
    for (;;) {
        panels *= 2;
        const double current = composite(panels);
        evaluations += 10L * panels;
        const double diff = std::abs(current - previous);
        if (diff < tol * (1.0 + std::abs(current))) return {current, diff, evaluations};
        if (panels >= max_panels) {
            throw QuadratureError("periodic_integrate: no convergence",
                                  QuadratureResult{current, diff, evaluations});
        }
        previous = current;
    }
}

/// ∫_1^∞ (η² + a)^{-2} dη in closed form. Templated so the coefficient
/// algebra can evaluate it in extended precision.
template <class Scalar>
Scalar j_integral(const Scalar& a) {
    using std::atan;
    using std::sqrt;
    if (!(a > 0)) throw DomainError("j_integral: a must be positive");
    const Scalar pi = boost::math::constants::pi<Scalar>();
    const Scalar a32 = a * sqrt(a);
    return pi / (4 * a32) - Scalar(1) / (2 * a * (1 + a)) - atan(1 / sqrt(a)) / (2 * a32);
}

enum class IkMethod { automatic, tensor, quasi_random };

/// ∫_{[1,∞)^k} (η_1² + … + η_k²)^{-p} dη, finite for p > k/2.
QuadratureResult i_k_integral(int k, double p, IkMethod method = IkMethod::automatic,
                              double tol = 1e-12);

}  // namespace sausage
