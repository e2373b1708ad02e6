#include "sausage/series_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace sausage {

double FitResult::coefficient(int j) const {
    for (const auto& [order, value] : coefficients) {
        if (order == j) return value;
    }
    throw std::out_of_range("FitResult: order j=" + std::to_string(j) + " not in the basis");
}

double FitResult::standard_error(int j) const {
    for (std::size_t i = 0; i < coefficients.size(); ++i) {
        if (coefficients[i].first == j) return std::sqrt(std::max(0.0, covariance(i, i)));
    }
    throw std::out_of_range("FitResult: order j=" + std::to_string(j) + " not in the basis");
}

SeriesCoeffs FitResult::as_series(int k) const {
    SeriesCoeffs s;
    s.family = Family::fitted;
    s.k = k;
    s.meta = Provenance::fit;
    for (const auto& [j, v] : coefficients) s.add(j, v);
    return s;
}

FitResult fit_halfpowers(std::span<const Sample> samples, std::span<const int> orders) {
    const int n = static_cast<int>(samples.size());
    const int p = static_cast<int>(orders.size());
    if (p == 0) throw std::invalid_argument("fit_halfpowers: empty basis");
    std::set<double> distinct;
    for (const auto& s : samples) {
        if (!(s.t > 0.0)) throw std::invalid_argument("fit_halfpowers: t must be positive");
        if (s.sigma < 0.0) throw std::invalid_argument("fit_halfpowers: sigma must be >= 0");
        distinct.insert(s.t);
    }
    if (static_cast<int>(distinct.size()) < p + 1) {
        throw std::invalid_argument("fit_halfpowers: need at least " + std::to_string(p + 1) +
                                    " distinct t values for " + std::to_string(p) + " basis functions");
    }
    const bool weighted = std::all_of(samples.begin(), samples.end(), [](const Sample& s) { return s.sigma > 0.0; });
    const bool unweighted = std::all_of(samples.begin(), samples.end(), [](const Sample& s) { return s.sigma == 0.0; });
    if (!weighted && !unweighted) throw std::invalid_argument("fit_halfpowers: sigma must be all zero or all positive");

    const double t_min = *distinct.begin();
    const double t_max = *distinct.rbegin();
    const double t_mid = std::sqrt(t_min * t_max);

    Eigen::MatrixXd a(n, p);
    Eigen::VectorXd b(n);
    Eigen::VectorXd scale(p);
    for (int c = 0; c < p; ++c) scale(c) = std::pow(t_mid, -0.5 * orders[c]);
    for (int i = 0; i < n; ++i) {
        const double w = weighted ? 1.0 / samples[i].sigma : 1.0;
        for (int c = 0; c < p; ++c) a(i, c) = w * std::pow(samples[i].t / t_mid, 0.5 * orders[c]);
        b(i) = w * samples[i].v;
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    qr.setThreshold(1e-12);
    if (qr.rank() < p) {
        std::vector<int> dependent;
        for (int c = static_cast<int>(qr.rank()); c < p; ++c) dependent.push_back(orders[qr.colsPermutation().indices()(c)]);
        std::sort(dependent.begin(), dependent.end());
        std::string names;
        for (int j : dependent) names += (names.empty() ? "" : ", ") + std::string("t^") + std::to_string(j) + "/2";
        throw RankDeficientFit("fit_halfpowers: rank-deficient basis, dependent columns: " + names, dependent);
    }
    const Eigen::VectorXd x = qr.solve(b);
    const Eigen::VectorXd resid = a * x - b;

    // (AᵀA)^{-1} = P R^{-1} R^{-T} Pᵀ from the triangular factor.
    const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd r_inv = r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
    Eigen::MatrixXd cov_perm = r_inv * r_inv.transpose();
    Eigen::MatrixXd cov = qr.colsPermutation() * cov_perm * qr.colsPermutation().transpose();
    if (!weighted) {
        const double dof = std::max(1, n - p);
        cov *= resid.squaredNorm() / dof;
    }
    cov = scale.asDiagonal() * cov * scale.asDiagonal();

    FitResult out;
    for (int c = 0; c < p; ++c) out.coefficients.emplace_back(orders[c], x(c) * scale(c));
    out.covariance = 0.5 * (cov + cov.transpose());
    out.residual_norm = resid.norm();
    out.t_range = {t_min, t_max};
    return out;
}

FitResult fit_halfpowers(std::span<const Sample> samples, int j_max) {
    if (j_max < 0) throw std::invalid_argument("fit_halfpowers: j_max must be >= 0");
    std::vector<int> orders(j_max + 1);
    for (int j = 0; j <= j_max; ++j) orders[j] = j;
    return fit_halfpowers(samples, orders);
}

OrderCheck order_check(std::span<const Sample> samples, const SeriesCoeffs& model, double expected_order) {
    if (samples.size() < 3) throw std::invalid_argument("order_check: need at least 3 samples");
    std::vector<Sample> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end(), [](const Sample& l, const Sample& r) { return l.t < r.t; });
    const double ratio = sorted[1].t / sorted[0].t;
    if (!(ratio > 1.0)) throw std::invalid_argument("order_check: t values must be distinct");
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (std::abs(sorted[i].t / sorted[i - 1].t / ratio - 1.0) > 1e-6) {
            throw std::invalid_argument("order_check: t values must form a geometric progression");
        }
    }

    OrderCheck out;
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& s : sorted) {
        const double r = s.v - model.evaluate(s.t);
        out.residuals.push_back(r);
        // Residuals within a few hundred ulps of the value carry no signal.
        const double floor = 256.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(s.v), 1.0);
        if (std::abs(r) <= floor) {
            out.saturated = true;
            continue;
        }
        xs.push_back(std::log(s.t));
        ys.push_back(std::log(std::abs(r)));
    }
    if (xs.size() < 2) {
        out.slope = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    out.slope = sxy / sxx;
    out.consistent = out.slope >= expected_order - 0.1;
    return out;
}

std::vector<double> geometric_grid(double lo, double hi, int n) {
    if (!(lo > 0.0 && hi > lo)) throw std::invalid_argument("geometric_grid: need 0 < lo < hi");
    if (n < 2) throw std::invalid_argument("geometric_grid: need at least 2 points");
    std::vector<double> out(n);
    const double step = std::log(hi / lo) / (n - 1);
    for (int i = 0; i < n; ++i) out[i] = lo * std::exp(step * i);
    out.front() = lo;
    out.back() = hi;
    return out;
}

}  // namespace sausage
