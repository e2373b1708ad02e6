#pragma once

#include <Eigen/Dense>

#include <functional>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace sausage {

/// Which unit normal the curvature L_aa is measured against. `inward` points
/// into the body (or planar domain) itself; `outward` points into its
/// complement. Flipping the orientation negates every curvature integral.
enum class Orientation { inward, outward };

inline double orientation_sign(Orientation o) { return o == Orientation::inward ? 1.0 : -1.0; }

class GeometryError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Closed ball of dimension `dim` and radius `radius`, centred at the origin.
struct Ball {
    int dim = 2;
    double radius = 1.0;
};

/// A smooth closed planar curve given by a periodic parametrization.
///
/// `curvature` is the signed curvature with respect to the left normal of the
/// direction of travel, (x'y'' - y'x'')/|v|³, so a counter-clockwise convex
/// curve has positive curvature everywhere.
class PlanarCurve {
  public:
    using Point = Eigen::Vector2d;
    using PointFn = std::function<Point(double)>;
    using ScalarFn = std::function<double(double)>;

    PlanarCurve(PointFn position, PointFn velocity, ScalarFn curvature, double period);

    static PlanarCurve circle(double radius);
    static PlanarCurve ellipse(double a, double b);

    /// Trigonometric interpolant through samples on a uniform parameter grid
    /// s_j = s_0 + j h, j = 0..n-1, closed with period n h.
    static PlanarCurve from_samples(std::span<const double> s, std::span<const double> x,
                                    std::span<const double> y, std::span<const double> kappa);

    Point position(double s) const { return position_(s); }
    Point velocity(double s) const { return velocity_(s); }
    double speed(double s) const { return velocity_(s).norm(); }
    double curvature(double s) const { return curvature_(s); }
    double period() const { return period_; }

  private:
    PointFn position_;
    PointFn velocity_;
    ScalarFn curvature_;
    double period_;
};

/// Bounded planar domain enclosed by a simple closed curve. Construction
/// validates the curve and caches the functionals every coefficient formula
/// needs.
class PlanarCurveDomain {
  public:
    explicit PlanarCurveDomain(PlanarCurve curve, double curvature_tol = 1e-8);

    const PlanarCurve& curve() const { return *curve_; }
    double area() const { return area_; }
    double length() const { return length_; }
    /// +1 if the parametrization runs counter-clockwise.
    double traversal_sign() const { return traversal_sign_; }
    /// Curvature at parameter s measured against the normal pointing into the domain.
    double inward_curvature(double s) const { return traversal_sign_ * curve_->curvature(s); }
    double inward_total_curvature() const { return inward_total_curvature_; }
    /// Largest interior tube radius with unique nearest-boundary projection (numerical).
    double reach() const { return reach_; }

  private:
    std::shared_ptr<const PlanarCurve> curve_;
    double area_ = 0.0;
    double length_ = 0.0;
    double traversal_sign_ = 1.0;
    double inward_total_curvature_ = 0.0;
    double reach_ = 0.0;
};

using CompactBody = std::variant<Ball, PlanarCurveDomain>;

/// Integrated geometric inputs of the weighted heat-kernel coefficients.
struct GeomFunctionals {
    double vol_f = 0.0;     // ∫_M f dx
    double vol_ftau = 0.0;  // ∫_M f τ dx
    double bdy_f = 0.0;     // ∫_{∂M} f dy
    double bdy_f1 = 0.0;    // ∫_{∂M} f^{(1)} dy
    double bdy_fL = 0.0;    // ∫_{∂M} f L_aa dy
};

Ball make_ball(int dim, double radius);

int dimension(const CompactBody& body);
double unit_ball_volume(int dim);
double volume(const CompactBody& body);
double surface_measure(const CompactBody& body);
double total_curvature(const CompactBody& body, Orientation orientation);
double reach(const CompactBody& body);
GeomFunctionals functionals_constant_f(const CompactBody& body, double f0, Orientation orientation);

/// Parse "ball:<m>:<r>", "disk", "disk:<r>", "ellipse:<a>:<b>" or "curve:<path>".
CompactBody parse_body(const std::string& spec);

/// Planar curve text format: a header line `n=<points>` followed by n rows
/// `s x y kappa` on a uniform parameter grid. Lines starting with '#' are
/// ignored. The curve is closed with period n·(s_1 - s_0).
PlanarCurve read_curve(std::istream& in);
PlanarCurve read_curve_file(const std::string& path);
void write_curve(std::ostream& out, const PlanarCurve& curve, int points);

}  // namespace sausage
