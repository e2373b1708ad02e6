#include "oracles.hpp"
#include "sausage/coefficients.hpp"
#include "sausage/kernels.hpp"
#include "sausage/series_fit.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace sausage;
using std::numbers::pi;

TEST_CASE("p_free") {
    CHECK(p_free(1, 0.0, 1.0 / (4 * pi)) == doctest::Approx(1.0).epsilon(1e-14));
    for (int m = 1; m <= 4; ++m) CHECK(p_free(m, 0.0, 0.3) == doctest::Approx(std::pow(4 * pi * 0.3, -0.5 * m)));
    CHECK(p_free(2, 4.0, 1.0) == doctest::Approx(std::exp(-1.0) / (4 * pi)).epsilon(1e-14));
    CHECK_THROWS_AS(p_free(2, 1.0, 0.0), DomainError);
    CHECK_THROWS_AS(p_free(2, 1.0, -1.0), DomainError);
}

TEST_CASE("p_halfline_diag") {
    CHECK(p_halfline_diag(0.0, 0.5) == 0.0);
    CHECK(p_halfline_diag(50.0, 0.5) == doctest::Approx(1.0 / std::sqrt(4 * pi * 0.5)).epsilon(1e-15));
    CHECK(p_halfline_diag(1.0, 1.0) == doctest::Approx((1 - std::exp(-1.0)) / std::sqrt(4 * pi)).epsilon(1e-14));
    CHECK_THROWS_AS(p_halfline_diag(1.0, 0.0), DomainError);

    SUBCASE("domain monotonicity against the free kernel") {
        for (double t : {1e-4, 1e-2, 1.0, 10.0}) {
            for (double x = 0.0; x < 5.0; x += 0.1) {
                const double p = p_halfline_diag(x, t);
                CHECK(p >= 0.0);
                CHECK(p <= p_free(1, 0.0, t));
            }
        }
    }
}

TEST_CASE("p_planar_expansion_diag") {
    const double t = 0.01;
    CHECK(p_planar_expansion_diag(10.0, 1.0, t).value == doctest::Approx(1.0 / (4 * pi * t)).epsilon(1e-14));
    CHECK(p_planar_expansion_diag(10.0, 1.0, t).regime == Regime::expansion);
    for (double delta : {0.01, 0.05, 0.2}) {
        const double flat = p_planar_expansion_diag(delta, 0.0, t).value;
        CHECK(flat == doctest::Approx((1 - std::exp(-delta * delta / t)) / (4 * pi * t)).epsilon(1e-14));
        CHECK(flat == doctest::Approx(p_halfline_diag(delta, t) / std::sqrt(4 * pi * t)).epsilon(1e-14));
    }
    const double brace = 1 - std::exp(-1.0) - oracle::erfc_tail_at_1;
    CHECK(p_planar_expansion_diag(1.0, 1.0, 1.0).value == doctest::Approx(brace / (4 * pi)).epsilon(1e-12));
    CHECK_THROWS_AS(p_planar_expansion_diag(0.1, 1.0, 0.0), DomainError);
}

TEST_CASE("halfline_norm") {
    CHECK(halfline_norm(2, [](double) { return 0.0; }, 0.01) == 0.0);

    SUBCASE("leading order") {
        // Smooth bump with unit mass supported away from the boundary.
        auto bump = [](double x) { return std::exp(-(x - 8) * (x - 8)) / std::sqrt(pi); };
        for (double t : {1e-2, 1e-4}) {
            const double scaled = halfline_norm(1, bump, t) * std::sqrt(4 * pi * t);
            CHECK(scaled == doctest::Approx(1.0).epsilon(1e-10));
        }
    }
    SUBCASE("three-term series with a t^{3/2} remainder") {
        auto f = [](double x) { return std::exp(-x); };
        const double derivatives[] = {1.0, -1.0};
        std::vector<Sample> remainders;
        for (double t : {4e-3, 1e-3, 2.5e-4}) {
            const double exact = halfline_norm_scaled(2, f, t, 1e-14);
            remainders.push_back({t, exact - halfline_series(2, 1.0, derivatives, t), 0.0});
        }
        SeriesCoeffs zero;
        zero.add(0, 0.0);
        const OrderCheck oc = order_check(remainders, zero, 1.5);
        CHECK(oc.slope == doctest::Approx(1.5).epsilon(0.05));
        CHECK_FALSE(oc.saturated);
        const double tiny = halfline_norm(2, f, 1e-3);
        CHECK(tiny * 4 * pi * 1e-3 == doctest::Approx(halfline_series(2, 1.0, derivatives, 1e-3)).epsilon(1e-4));
    }
}

TEST_CASE("u_exterior_ball") {
    for (double t : {1e-4, 0.1, 10.0}) CHECK(u_exterior_ball(1.0, t) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(u_exterior_ball(2.0, 1e-6) == 0.0);
    CHECK(u_exterior_ball(2.0, 0.25) == doctest::Approx(0.5 * std::erfc(1.0)).epsilon(1e-14));
    CHECK(u_exterior_ball(2.0, 0.25) == doctest::Approx(0.078649603525).epsilon(1e-10));
    CHECK_THROWS_AS(u_exterior_ball(0.5, 0.1), DomainError);

    SUBCASE("decreasing in r, increasing in t") {
        for (double t : {0.01, 0.1, 1.0}) {
            double previous = 2.0;
            for (double r = 1.0; r < 4.0; r += 0.25) {
                const double u = u_exterior_ball(r, t);
                CHECK(u < previous);
                CHECK(u <= u_exterior_ball(r, 2 * t));
                previous = u;
            }
        }
    }
}

TEST_CASE("q_k3_exact") {
    SUBCASE("k = 1 has a closed form") {
        for (double t : {1e-6, 1e-4, 0.01, 0.3, 2.0}) {
            CAPTURE(t);
            CHECK(q_k3_exact(1, t).value == doctest::Approx(oracle::spitzer_q1(t)).epsilon(1e-12));
        }
        CHECK(q_k3_exact(1, 0.01).value == doctest::Approx(oracle::q1_at_0_01).epsilon(1e-12));
    }
    CHECK(q_k3_exact(2, 0.02).value == doctest::Approx(oracle::q2_at_0_02).epsilon(1e-12));

    SUBCASE("small-t limit is the ball volume") {
        const double a = q_k3_exact(1, 1e-6).value - 4 * pi / 3;
        const double b = q_k3_exact(1, 1e-7).value - 4 * pi / 3;
        CHECK(a > 0.0);
        CHECK(a < 2e-2);
        CHECK(b < a);
    }
    SUBCASE("Q_2(t) = 2Q_1(t) - Q_1(2t)") {
        for (double t : {0.005, 0.01, 0.02, 0.04}) {
            CHECK(std::abs(q_k3_exact(2, t).value - (2 * q_k3_exact(1, t).value - q_k3_exact(1, 2 * t).value)) < 1e-8);
        }
    }
    SUBCASE("increasing in t, decreasing in k") {
        for (double t : {1e-4, 1e-3, 1e-2, 1e-1}) {
            double previous = INFINITY;
            for (int k = 1; k <= 5; ++k) {
                const double q = q_k3_exact(k, t).value;
                CHECK(q < previous);
                CHECK(q < q_k3_exact(k, 2 * t).value);
                CHECK(q <= q_k3_exact(1, t).value);
                previous = q;
            }
        }
    }
    CHECK(q_k3_exact(3, 0.01).error_estimate < 1e-10);
    CHECK_THROWS_AS(q_k3_exact(0, 0.01), DomainError);
    CHECK_THROWS_AS(q_k3_exact(1, 0.0), DomainError);
}

TEST_CASE("z_k2_boundary_layer") {
    const CompactBody disk = Ball{2, 1.0};
    SUBCASE("unit disk, k = 1, against the closed-form cubic") {
        for (double t : {2.5e-5, 1e-4, 4e-4, 1e-3}) {
            CAPTURE(t);
            CHECK(z_k2_boundary_layer(disk, 1, t) == doctest::Approx(oracle::z_disk_k1(t)).epsilon(1e-13));
            CHECK(z_k2_boundary_layer(disk, 1, t, 0.45, Orientation::outward) ==
                  doctest::Approx(oracle::z_disk_k1(t, -1.0)).epsilon(1e-13));
        }
    }
    SUBCASE("remainder after three terms is O(t^{3/2})") {
        std::vector<Sample> s;
        for (double t : {4e-4, 1e-4, 2.5e-5}) s.push_back({t, z_k2_boundary_layer(disk, 1, t), 0.0});
        SeriesCoeffs model;
        for (int j = 0; j <= 2; ++j) model.add(j, c_coeff(1, j, disk, Orientation::inward));
        const OrderCheck oc = order_check(s, model, 1.5);
        CHECK(oc.slope == doctest::Approx(1.5).epsilon(0.02));
        CHECK(oc.consistent);
    }
    SUBCASE("small-t limit") {
        CHECK(z_k2_boundary_layer(disk, 2, 1e-12) == doctest::Approx(pi).epsilon(1e-5));
    }
    SUBCASE("curve domains agree with the ball representation") {
        const CompactBody circle = PlanarCurveDomain(PlanarCurve::circle(1.0));
        for (int k = 1; k <= 3; ++k) {
            CHECK(z_k2_boundary_layer(circle, k, 1e-4) == doctest::Approx(z_k2_boundary_layer(disk, k, 1e-4)).epsilon(1e-12));
        }
    }
    SUBCASE("ellipse t-coefficient follows the inward curvature integral") {
        const CompactBody ellipse = PlanarCurveDomain(PlanarCurve::ellipse(1.5, 1.0));
        const auto ts = geometric_grid(2.5e-5, 4e-4, 12);
        const auto s = sample_function([&](double t) { return z_k2_boundary_layer(ellipse, 2, t); }, ts);
        const FitResult fit = fit_halfpowers(s, 4);
        CHECK(fit.coefficient(0) == doctest::Approx(volume(ellipse)).epsilon(1e-9));
        CHECK(fit.coefficient(1) == doctest::Approx(c_coeff(2, 1, ellipse, Orientation::inward)).epsilon(1e-5));
        CHECK(fit.coefficient(2) == doctest::Approx(c_coeff(2, 2, ellipse, Orientation::inward)).epsilon(1e-3));
    }
    CHECK_THROWS_AS(z_k2_boundary_layer(disk, 1, 0.5), GeometryError);
    CHECK_THROWS_AS(z_k2_boundary_layer(Ball{3, 1.0}, 1, 1e-4), GeometryError);
    CHECK_THROWS_AS(z_k2_boundary_layer(disk, 1, 1e-4, 0.3), DomainError);
    CHECK_THROWS_AS(z_k2_boundary_layer(disk, 0, 1e-4), DomainError);
}
