#include "sausage/geometry.hpp"

#include "sausage/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

namespace sausage {

namespace {

// Real trigonometric interpolant on a uniform periodic grid.
class TrigInterpolant {
  public:
    TrigInterpolant(std::span<const double> values, double origin, double period)
        : origin_(origin), period_(period), n_(static_cast<int>(values.size())) {
        const int modes = (n_ - 1) / 2;
        cos_.assign(modes + 1, 0.0);
        sin_.assign(modes + 1, 0.0);
        for (int m = 0; m <= modes; ++m) {
            double c = 0.0;
            double s = 0.0;
            for (int j = 0; j < n_; ++j) {
                const double arg = 2.0 * std::numbers::pi * m * j / n_;
                c += values[j] * std::cos(arg);
                s += values[j] * std::sin(arg);
            }
            cos_[m] = (m == 0 ? 1.0 : 2.0) * c / n_;
            sin_[m] = 2.0 * s / n_;
        }
        if (n_ % 2 == 0) {
            double c = 0.0;
            for (int j = 0; j < n_; ++j) c += (j % 2 == 0 ? 1.0 : -1.0) * values[j];
            nyquist_ = c / n_;
        }
    }

    double value(double s) const { return evaluate(s, 0); }
    double derivative(double s) const { return evaluate(s, 1); }

  private:
    double evaluate(double s, int order) const {
        const double omega = 2.0 * std::numbers::pi / period_;
        const double phase = omega * (s - origin_);
        double sum = order == 0 ? cos_[0] : 0.0;
        for (std::size_t m = 1; m < cos_.size(); ++m) {
            const double c = std::cos(m * phase);
            const double sn = std::sin(m * phase);
            if (order == 0) {
                sum += cos_[m] * c + sin_[m] * sn;
            } else {
                sum += m * omega * (sin_[m] * c - cos_[m] * sn);
            }
        }
        if (n_ % 2 == 0) {
            const double nq = 0.5 * n_;
            sum += order == 0 ? nyquist_ * std::cos(nq * phase)
                              : -nq * omega * nyquist_ * std::sin(nq * phase);
        }
        return sum;
    }

    double origin_;
    double period_;
    int n_;
    std::vector<double> cos_;
    std::vector<double> sin_;
    double nyquist_ = 0.0;
};

double compute_reach(const PlanarCurve& curve, double length) {
    constexpr int samples = 512;
    const double h = curve.period() / samples;
    std::vector<PlanarCurve::Point> points(samples);
    std::vector<double> arc(samples + 1, 0.0);
    double kappa_max = 0.0;
    for (int i = 0; i < samples; ++i) {
        points[i] = curve.position(i * h);
        kappa_max = std::max(kappa_max, std::abs(curve.curvature(i * h)));
    }
    for (int i = 0; i < samples; ++i) {
        arc[i + 1] = arc[i] + 0.5 * h * (curve.speed(i * h) + curve.speed((i + 1) * h));
    }
    double reach = kappa_max > 0.0 ? 1.0 / kappa_max : std::numeric_limits<double>::infinity();
    // Bottleneck: pairs far apart along the curve but close in the plane.
    const double separation = kappa_max > 0.0 ? std::min(std::numbers::pi / kappa_max, 0.5 * length)
                                              : 0.5 * length;
    for (int i = 0; i < samples; ++i) {
        for (int j = i + 1; j < samples; ++j) {
            const double along = arc[j] - arc[i];
            if (std::min(along, length - along) + 1e-12 * length < separation) continue;
            reach = std::min(reach, 0.5 * (points[i] - points[j]).norm());
        }
    }
    return reach;
}

}  // namespace

PlanarCurve::PlanarCurve(PointFn position, PointFn velocity, ScalarFn curvature, double period)
    : position_(std::move(position)),
      velocity_(std::move(velocity)),
      curvature_(std::move(curvature)),
      period_(period) {
    if (!(period > 0.0)) throw GeometryError("PlanarCurve: period must be positive");
}

PlanarCurve PlanarCurve::circle(double radius) {
    if (!(radius > 0.0)) throw GeometryError("circle: radius must be positive");
    return PlanarCurve(
        [radius](double s) { return Point(radius * std::cos(s), radius * std::sin(s)); },
        [radius](double s) { return Point(-radius * std::sin(s), radius * std::cos(s)); },
        [radius](double) { return 1.0 / radius; }, 2.0 * std::numbers::pi);
}

PlanarCurve PlanarCurve::ellipse(double a, double b) {
    if (!(a > 0.0 && b > 0.0)) throw GeometryError("ellipse: semi-axes must be positive");
    return PlanarCurve(
        [a, b](double s) { return Point(a * std::cos(s), b * std::sin(s)); },
        [a, b](double s) { return Point(-a * std::sin(s), b * std::cos(s)); },
        [a, b](double s) {
            const double q = a * a * std::sin(s) * std::sin(s) + b * b * std::cos(s) * std::cos(s);
            return a * b / (q * std::sqrt(q));
        },
        2.0 * std::numbers::pi);
}

PlanarCurve PlanarCurve::from_samples(std::span<const double> s, std::span<const double> x,
                                      std::span<const double> y, std::span<const double> kappa) {
    const std::size_t n = s.size();
    if (n < 3 || x.size() != n || y.size() != n || kappa.size() != n) {
        throw GeometryError("from_samples: need at least 3 rows with matching columns");
    }
    const double h = s[1] - s[0];
    if (!(h > 0.0)) throw GeometryError("from_samples: parameter must increase");
    for (std::size_t j = 0; j < n; ++j) {
        if (std::abs(s[j] - s[0] - j * h) > 1e-9 * (1.0 + std::abs(h) * n)) {
            throw GeometryError("from_samples: parameter grid is not uniform");
        }
    }
    const double period = h * static_cast<double>(n);
    auto xs = std::make_shared<TrigInterpolant>(x, s[0], period);
    auto ys = std::make_shared<TrigInterpolant>(y, s[0], period);
    auto ks = std::make_shared<TrigInterpolant>(kappa, s[0], period);
    return PlanarCurve([xs, ys](double t) { return Point(xs->value(t), ys->value(t)); },
                       [xs, ys](double t) { return Point(xs->derivative(t), ys->derivative(t)); },
                       [ks](double t) { return ks->value(t); }, period);
}

PlanarCurveDomain::PlanarCurveDomain(PlanarCurve curve, double curvature_tol)
    : curve_(std::make_shared<const PlanarCurve>(std::move(curve))) {
    const PlanarCurve& c = *curve_;
    const double period = c.period();
    const double signed_area =
        0.5 * periodic_integrate(
                  [&c](double s) {
                      const auto p = c.position(s);
                      const auto v = c.velocity(s);
                      return p.x() * v.y() - p.y() * v.x();
                  },
                  period)
                  .value;
    if (signed_area == 0.0) throw GeometryError("PlanarCurveDomain: curve encloses no area");
    traversal_sign_ = signed_area > 0.0 ? 1.0 : -1.0;
    area_ = std::abs(signed_area);
    length_ = periodic_integrate([&c](double s) { return c.speed(s); }, period).value;
    const double signed_turning =
        periodic_integrate([&c](double s) { return c.curvature(s) * c.speed(s); }, period).value;
    inward_total_curvature_ = traversal_sign_ * signed_turning;
    if (std::abs(inward_total_curvature_ - 2.0 * std::numbers::pi) > curvature_tol) {
        std::ostringstream msg;
        msg << std::setprecision(12) << "PlanarCurveDomain: total curvature " << inward_total_curvature_
            << " differs from 2π; curve is not simple and closed or curvature is inconsistent";
        throw GeometryError(msg.str());
    }
    reach_ = compute_reach(c, length_);
}

Ball make_ball(int dim, double radius) {
    if (dim < 1) throw GeometryError("Ball: dimension must be >= 1");
    if (!(radius > 0.0)) throw GeometryError("Ball: radius must be positive");
    return Ball{dim, radius};
}

double unit_ball_volume(int dim) {
    return std::pow(std::numbers::pi, 0.5 * dim) / std::tgamma(0.5 * dim + 1.0);
}

int dimension(const CompactBody& body) {
    if (const auto* ball = std::get_if<Ball>(&body)) return ball->dim;
    return 2;
}

double volume(const CompactBody& body) {
    if (const auto* ball = std::get_if<Ball>(&body)) {
        return unit_ball_volume(ball->dim) * std::pow(ball->radius, ball->dim);
    }
    return std::get<PlanarCurveDomain>(body).area();
}

double surface_measure(const CompactBody& body) {
    if (const auto* ball = std::get_if<Ball>(&body)) {
        return ball->dim * unit_ball_volume(ball->dim) * std::pow(ball->radius, ball->dim - 1);
    }
    return std::get<PlanarCurveDomain>(body).length();
}

double total_curvature(const CompactBody& body, Orientation orientation) {
    double inward = 0.0;
    if (const auto* ball = std::get_if<Ball>(&body)) {
        inward = (ball->dim - 1) / ball->radius * surface_measure(body);
    } else {
        inward = std::get<PlanarCurveDomain>(body).inward_total_curvature();
    }
    return orientation_sign(orientation) * inward;
}

double reach(const CompactBody& body) {
    if (const auto* ball = std::get_if<Ball>(&body)) return ball->radius;
    return std::get<PlanarCurveDomain>(body).reach();
}

GeomFunctionals functionals_constant_f(const CompactBody& body, double f0, Orientation orientation) {
    return GeomFunctionals{f0 * volume(body), 0.0, f0 * surface_measure(body), 0.0,
                           f0 * total_curvature(body, orientation)};
}

CompactBody parse_body(const std::string& spec) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    if (parts.empty()) throw GeometryError("empty body spec");
    const std::string& kind = parts[0];
    auto number = [&](std::size_t i) {
        if (i >= parts.size()) throw GeometryError("body spec '" + spec + "' is missing a field");
        std::size_t used = 0;
        const double v = std::stod(parts[i], &used);
        if (used != parts[i].size()) throw GeometryError("bad number in body spec '" + spec + "'");
        return v;
    };
    if (kind == "ball") {
        const double m = number(1);
        if (m != std::floor(m)) throw GeometryError("ball dimension must be an integer");
        return make_ball(static_cast<int>(m), parts.size() > 2 ? number(2) : 1.0);
    }
    if (kind == "disk") return make_ball(2, parts.size() > 1 ? number(1) : 1.0);
    if (kind == "circle") return PlanarCurveDomain(PlanarCurve::circle(parts.size() > 1 ? number(1) : 1.0));
    if (kind == "ellipse") return PlanarCurveDomain(PlanarCurve::ellipse(number(1), number(2)));
    if (kind == "curve") {
        const auto pos = spec.find(':');
        return PlanarCurveDomain(read_curve_file(spec.substr(pos + 1)));
    }
    throw GeometryError("unknown body kind '" + kind + "'");
}

PlanarCurve read_curve(std::istream& in) {
    std::string line;
    long expected = -1;
    std::vector<double> s, x, y, kappa;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        if (expected < 0) {
            if (line.compare(first, 2, "n=") != 0) throw GeometryError("curve file: expected 'n=<points>' header");
            expected = std::stol(line.substr(first + 2));
            if (expected < 3) throw GeometryError("curve file: need at least 3 points");
            continue;
        }
        std::istringstream row(line);
        double a, b, c, d;
        if (!(row >> a >> b >> c >> d)) throw GeometryError("curve file: malformed row '" + line + "'");
        s.push_back(a);
        x.push_back(b);
        y.push_back(c);
        kappa.push_back(d);
    }
    if (expected < 0) throw GeometryError("curve file: missing header");
    if (static_cast<long>(s.size()) != expected) {
        throw GeometryError("curve file: header announces " + std::to_string(expected) + " rows, found " +
                            std::to_string(s.size()));
    }
    return PlanarCurve::from_samples(s, x, y, kappa);
}

PlanarCurve read_curve_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw GeometryError("cannot open curve file '" + path + "'");
    return read_curve(in);
}

void write_curve(std::ostream& out, const PlanarCurve& curve, int points) {
    if (points < 3) throw GeometryError("write_curve: need at least 3 points");
    out << "n=" << points << '\n' << std::setprecision(17);
    const double h = curve.period() / points;
    for (int j = 0; j < points; ++j) {
        const double s = j * h;
        const auto p = curve.position(s);
        out << s << ' ' << p.x() << ' ' << p.y() << ' ' << curve.curvature(s) << '\n';
    }
}

}  // namespace sausage
