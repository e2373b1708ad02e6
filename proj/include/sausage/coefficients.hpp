#pragma once

#include "sausage/geometry.hpp"
#include "sausage/numerics.hpp"

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/eigen.hpp>

#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sausage {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;
using Extended = boost::multiprecision::cpp_bin_float_50;

/// Requested expansion order is not available in closed form.
class UnsupportedOrder : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

enum class Family { alpha, c, a, b, fitted };
enum class Provenance { formula, quadrature, fit, mc };

std::string to_string(Family family);
std::string to_string(Provenance meta);

struct SeriesEntry {
    int j = 0;
    double value = 0.0;
};

/// Coefficients of t^{j/2} for one (family, k, m). Entries stay sorted by j.
struct SeriesCoeffs {
    Family family = Family::fitted;
    int k = 1;
    std::optional<int> m;
    std::vector<SeriesEntry> entries;
    Provenance meta = Provenance::formula;

    /// Insert a coefficient; throws std::invalid_argument on a duplicate j.
    void add(int j, double value);
    std::optional<double> at(int j) const;
    /// Σ_j value_j t^{j/2}
    double evaluate(double t) const;
};

/// Neumaier-compensated accumulator.
class CompensatedSum {
  public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            carry_ += (sum_ - t) + x;
        } else {
            carry_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + carry_; }

  private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

BigInt binomial(int n, int k);

/// Largest k for which alternating binomial sums are accumulated in double.
inline constexpr int kCompensatedSumLimit = 12;

/// Σ_{ℓ=1}^k (-1)^ℓ C(k,ℓ) ℓ^{-s} evaluated directly in Scalar arithmetic.
template <class Scalar>
Scalar alternating_binomial_sum_as(int k, const Scalar& s) {
    using std::pow;
    Scalar total = 0;
    for (int l = 1; l <= k; ++l) {
        const Scalar term = Scalar(binomial(k, l)) * pow(Scalar(l), -s);
        total += (l % 2 == 0) ? term : Scalar(-term);
    }
    return total;
}

/// Σ_{ℓ=1}^k (-1)^ℓ C(k,ℓ) ℓ^{-s}. Compensated double accumulation for
/// small k, 50-digit arithmetic (exact rationals for integer s) above.
double alternating_binomial_sum(int k, double s);

/// Exact Σ_{ℓ=1}^k (-1)^ℓ C(k,ℓ) ℓ^{-s} for integer s ≥ 0.
Rational alternating_binomial_sum_exact(int k, int s);

double harmonic_number(int k);
Rational harmonic_number_exact(int k);

/// Half-line coefficient (1/2) Σ (-1)^ℓ C(k,ℓ) Γ(j/2) Γ(j)^{-1} ℓ^{-j/2}.
double alpha_coeff(int k, int j);
/// Exact value of alpha_coeff for even j (the Γ ratio and ℓ powers are rational).
Rational alpha_coeff_exact(int k, int j);
/// True iff |α_{k,2} + H_k/2| ≤ 1e-10 for every k ≤ k_max.
bool harmonic_identity_check(int k_max);

/// Coefficient of ∫L_aa in the pinned-sausage c_{k,2}.
double c_curvature_weight(int k);
/// Pinned-sausage coefficients c_{k,j}, j ≤ 2, with ∫L_aa taken at `orientation`.
double c_coeff(int k, int j, const CompactBody& body, Orientation orientation);

/// Coefficient of ∫ f L_aa in a_{k,2}, evaluated in Scalar arithmetic.
template <class Scalar>
Scalar a_curvature_weight_as(int k) {
    Scalar sum = 0;
    for (int l = 1; l <= k; ++l) {
        const Scalar bracket = Scalar(k - l) * j_integral(Scalar(l)) + Scalar(1) / l;
        const Scalar term = Scalar(binomial(k, l)) * bracket;
        sum += (l % 2 == 1) ? term : Scalar(-term);
    }
    return Scalar(-k) / 6 + sum / 2;
}

double a_curvature_weight(int k);
/// Weighted diagonal heat-kernel coefficients a_{k,j}, j ≤ 2.
double a_coeff(int k, int j, const GeomFunctionals& g);

enum class BNormalization { as_printed, per_proof };

/// Unpinned-sausage coefficients b_{k,j}, j ≤ 2. The curvature integral is
/// taken with the normal pointing into the body.
double b_coeff(int k, int j, const CompactBody& body, BNormalization normalization);

/// Matrix T with T(k-1, ℓ-1) = (-1)^ℓ C(k,ℓ); T·T = identity.
template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> binomial_transform_matrix(int k_max) {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> t(k_max, k_max);
    for (int k = 1; k <= k_max; ++k) {
        for (int l = 1; l <= k_max; ++l) {
            if (l > k) {
                t(k - 1, l - 1) = Scalar(0);
            } else {
                const Scalar c(binomial(k, l));
                t(k - 1, l - 1) = (l % 2 == 0) ? c : Scalar(-c);
            }
        }
    }
    return t;
}

/// y_k = Σ_{ℓ=1}^k (-1)^ℓ C(k,ℓ) x_ℓ. The map is an involution.
template <class Scalar>
std::vector<Scalar> binomial_transform(std::span<const Scalar> x) {
    std::vector<Scalar> y(x.size());
    for (std::size_t k = 1; k <= x.size(); ++k) {
        Scalar acc = 0;
        for (std::size_t l = 1; l <= k; ++l) {
            const Scalar term = Scalar(binomial(static_cast<int>(k), static_cast<int>(l))) * x[l - 1];
            acc += (l % 2 == 0) ? term : Scalar(-term);
        }
        y[k - 1] = acc;
    }
    return y;
}

/// Maps a table of family-a series (one entry per k = 1..k_max) to family c
/// or back. Every j present in the k = 1 entry is transformed; each k must
/// supply the same orders.
std::vector<SeriesCoeffs> transform_1d(std::span<const SeriesCoeffs> table, int k_max);

/// Integrated interior invariants for a closed manifold, scalar case.
template <class Scalar>
struct InteriorData {
    Scalar tauF = 0;   // ∫ Tr(F τ)
    Scalar EF = 0;     // ∫ Tr(F E)
    Scalar tau2F = 0;  // ∫ Tr(F τ²)
    Scalar tauEF = 0;  // ∫ Tr(F τ E)
    Scalar E2F = 0;    // ∫ Tr(F E²)
    Scalar vol_F = 0;  // ∫ Tr(F)
    Scalar a14 = 0;    // a_{1,4}(F, D), supplied externally
};

template <class Scalar>
struct InteriorValue {
    Scalar value = 0;
    /// Set for odd orders, which vanish on manifolds without boundary.
    bool odd_order = false;
};

template <class Scalar>
InteriorValue<Scalar> interior_a(int k, int j, const InteriorData<Scalar>& d) {
    if (k < 1) throw std::invalid_argument("interior_a: k must be >= 1");
    if (j < 0) throw std::invalid_argument("interior_a: j must be >= 0");
    if (j % 2 == 1) return {Scalar(0), true};
    switch (j) {
        case 0:
            return {d.vol_F, false};
        case 2:
            return {Scalar(k) * (d.tauF + 6 * d.EF) / 6, false};
        case 4:
            return {Scalar(k) * d.a14 +
                        Scalar(k) * Scalar(k - 1) / 72 * (d.tau2F + 12 * d.tauEF + 36 * d.E2F),
                    false};
        default:
            throw UnsupportedOrder("interior_a: only j <= 4 is available");
    }
}

/// Coefficients of (Σ_ν e_{2ν} t^ν)^k up to order max_order (in units of
/// t^{1/2}), by repeated Cauchy products. Orders are even integers.
template <class Scalar>
std::vector<std::pair<int, Scalar>> series_power_diag(const std::vector<std::pair<int, Scalar>>& e,
                                                      int k, int max_order) {
    if (k < 1) throw std::invalid_argument("series_power_diag: k must be >= 1");
    const int terms = max_order / 2 + 1;
    std::vector<Scalar> base(terms, Scalar(0));
    bool has_zero = false;
    for (const auto& [order, value] : e) {
        if (order < 0 || order % 2 != 0) throw std::invalid_argument("series_power_diag: orders must be even");
        if (order == 0) has_zero = true;
        if (order / 2 < terms) base[order / 2] = value;
    }
    if (!has_zero) throw std::invalid_argument("series_power_diag: missing order-0 term");

    std::vector<Scalar> result = base;
    for (int power = 2; power <= k; ++power) {
        std::vector<Scalar> next(terms, Scalar(0));
        for (int a = 0; a < terms; ++a) {
            for (int b = 0; a + b < terms; ++b) next[a + b] += result[a] * base[b];
        }
        result = std::move(next);
    }
    std::vector<std::pair<int, Scalar>> out;
    out.reserve(terms);
    for (int i = 0; i < terms; ++i) out.emplace_back(2 * i, result[i]);
    return out;
}

/// CSV with columns family,k,m,j,value,meta.
void write_coeff_csv(std::ostream& out, std::span<const SeriesCoeffs> rows);

}  // namespace sausage
