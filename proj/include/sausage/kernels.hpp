#pragma once

#include "sausage/geometry.hpp"
#include "sausage/numerics.hpp"

#include <functional>
#include <span>

namespace sausage {

enum class Regime { exact, expansion };

struct KernelEval {
    double value = 0.0;
    Regime regime = Regime::exact;
};

/// Free heat kernel (4πt)^{-m/2} e^{-|x-y|²/(4t)} given d2 = |x-y|².
double p_free(int m, double d2, double t);

/// Dirichlet heat kernel of the half-line on the diagonal.
double p_halfline_diag(double x, double t);

/// Boundary-layer expansion of the planar Dirichlet kernel on the diagonal at
/// distance delta from a boundary of curvature kappa (O(1) remainder omitted).
KernelEval p_planar_expansion_diag(double delta, double kappa, double t);

/// ∫_0^∞ p_{R+}(x,x;t)^k f(x) dx by adaptive quadrature.
double halfline_norm(int k, const std::function<double(double)>& f, double t, double tol = 1e-12);

/// (4πt)^{k/2} ∫_0^∞ p_{R+}(x,x;t)^k f(x) dx, computed without forming the
/// large prefactor.
double halfline_norm_scaled(int k, const std::function<double(double)>& f, double t, double tol = 1e-12);

/// Truncated half-line series ∫f + Σ_{j=1}^{J} t^{j/2} f^{(j-1)}(0) α_{k,j}
/// with J = derivatives_at_zero.size(); the (4πt)^{-k/2} factor is left out.
double halfline_series(int k, double f_integral, std::span<const double> derivatives_at_zero, double t);

/// Exterior Dirichlet problem for the unit ball in R³ with u = 1 on the sphere:
/// u(r, t) = erfc((r-1)/(2√t)) / r.
double u_exterior_ball(double r, double t);

/// Q_{k,3}(t) = ‖u(·,t)‖_k^k for the unit ball in R³, with the ball itself
/// counted at u = 1.
QuadratureResult q_k3_exact(int k, double t, double tol = 1e-13);

/// Radial cutoff used by z_k2_boundary_layer: max(t^ε, √(45 t)).
double boundary_layer_cutoff(double t, double eps);

/// √t ∫_0^{cutoff/√t} {e^{-x²} + κ√t x² T(x)}^k (1 - √t κ x) dx, where
/// T(x) = ∫_x^∞ e^{-η²} dη: the layer integral across one boundary point.
double boundary_layer_profile(int k, double kappa, double t, double cutoff, double tol = 1e-14);

/// |D| + ∫_{∂D} ds ∫_0^{cutoff} dr {e^{-r²/t} + κ r² t^{-1/2} T(r/√t)}^k (1 - rκ).
/// `side` selects where the layer lives: inward integrates inside D with the
/// curvature measured into D; outward integrates on the complement with the
/// curvature measured into the complement.
double z_k2_boundary_layer(const CompactBody& body, int k, double t, double eps = 0.45,
                           Orientation side = Orientation::inward, double tol = 1e-13);

}  // namespace sausage
