#pragma once

#include "sausage/coefficients.hpp"

#include <Eigen/Dense>

#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sausage {

/// One observation v(t) with standard deviation sigma (0 for exact data).
struct Sample {
    double t = 0.0;
    double v = 0.0;
    double sigma = 0.0;
};

struct FitResult {
    std::vector<std::pair<int, double>> coefficients;
    Eigen::MatrixXd covariance;
    double residual_norm = 0.0;
    std::pair<double, double> t_range{0.0, 0.0};

    double coefficient(int j) const;
    double standard_error(int j) const;
    SeriesCoeffs as_series(int k = 1) const;
};

/// The design matrix lost rank; `columns()` lists the dependent t^{j/2} orders.
class RankDeficientFit : public std::runtime_error {
  public:
    RankDeficientFit(const std::string& what, std::vector<int> columns)
        : std::runtime_error(what), columns_(std::move(columns)) {}
    const std::vector<int>& columns() const noexcept { return columns_; }

  private:
    std::vector<int> columns_;
};

/// Least squares on {t^{j/2}}, j in `orders`, solved by column-pivoted QR
/// after scaling column j by t_mid^{-j/2} (t_mid the geometric centre of the
/// t range). Weighted by 1/σ when every σ > 0, unweighted when all are 0.
FitResult fit_halfpowers(std::span<const Sample> samples, std::span<const int> orders);
FitResult fit_halfpowers(std::span<const Sample> samples, int j_max);

struct OrderCheck {
    /// Least-squares slope of log|v - model(t)| against log t.
    double slope = 0.0;
    /// Some residuals sat at the rounding floor and were left out.
    bool saturated = false;
    /// slope ≥ expected_order - 0.1
    bool consistent = false;
    std::vector<double> residuals;
};

/// Empirical remainder exponent of `model` against samples on a geometric grid.
OrderCheck order_check(std::span<const Sample> samples, const SeriesCoeffs& model, double expected_order);

/// n points in geometric progression from lo to hi inclusive.
std::vector<double> geometric_grid(double lo, double hi, int n);

/// Sample a deterministic function on a t grid (σ = 0).
template <class F>
std::vector<Sample> sample_function(const F& f, std::span<const double> ts) {
    std::vector<Sample> out;
    out.reserve(ts.size());
    for (double t : ts) out.push_back({t, f(t), 0.0});
    return out;
}

}  // namespace sausage
