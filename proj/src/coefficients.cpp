#include "sausage/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>

namespace sausage {

std::string to_string(Family family) {
    switch (family) {
        case Family::alpha: return "alpha";
        case Family::c: return "c";
        case Family::a: return "a";
        case Family::b: return "b";
        case Family::fitted: return "fitted";
    }
    return "unknown";
}

std::string to_string(Provenance meta) {
    switch (meta) {
        case Provenance::formula: return "formula";
        case Provenance::quadrature: return "quadrature";
        case Provenance::fit: return "fit";
        case Provenance::mc: return "mc";
    }
    return "unknown";
}

void SeriesCoeffs::add(int j, double value) {
    auto it = std::lower_bound(entries.begin(), entries.end(), j,
                               [](const SeriesEntry& e, int order) { return e.j < order; });
    if (it != entries.end() && it->j == j) {
        throw std::invalid_argument("SeriesCoeffs: duplicate order j=" + std::to_string(j));
    }
    entries.insert(it, SeriesEntry{j, value});
}

std::optional<double> SeriesCoeffs::at(int j) const {
    for (const auto& e : entries) {
        if (e.j == j) return e.value;
    }
    return std::nullopt;
}

double SeriesCoeffs::evaluate(double t) const {
    double sum = 0.0;
    for (const auto& e : entries) sum += e.value * std::pow(t, 0.5 * e.j);
    return sum;
}

BigInt binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    BigInt result = 1;
    for (int i = 1; i <= k; ++i) {
        result *= n - k + i;
        result /= i;
    }
    return result;
}

double alternating_binomial_sum(int k, double s) {
    if (k < 1) throw std::invalid_argument("alternating_binomial_sum: k must be >= 1");
    if (k <= kCompensatedSumLimit) {
        CompensatedSum sum;
        for (int l = 1; l <= k; ++l) {
            const double term = static_cast<double>(binomial(k, l)) * std::pow(static_cast<double>(l), -s);
            sum.add(l % 2 == 0 ? term : -term);
        }
        return sum.value();
    }
    if (s == std::floor(s) && s >= 0.0 && s < 64.0) {
        return static_cast<double>(alternating_binomial_sum_exact(k, static_cast<int>(s)));
    }
    return static_cast<double>(alternating_binomial_sum_as<Extended>(k, Extended(s)));
}

Rational alternating_binomial_sum_exact(int k, int s) {
    if (k < 1) throw std::invalid_argument("alternating_binomial_sum_exact: k must be >= 1");
    if (s < 0) throw std::invalid_argument("alternating_binomial_sum_exact: s must be >= 0");
    Rational total = 0;
    for (int l = 1; l <= k; ++l) {
        BigInt power = 1;
        for (int i = 0; i < s; ++i) power *= l;
        const Rational term(binomial(k, l), power);
        if (l % 2 == 0) {
            total += term;
        } else {
            total -= term;
        }
    }
    return total;
}

double harmonic_number(int k) {
    CompensatedSum sum;
    for (int l = 1; l <= k; ++l) sum.add(1.0 / l);
    return sum.value();
}

Rational harmonic_number_exact(int k) {
    Rational sum = 0;
    for (int l = 1; l <= k; ++l) sum += Rational(1, l);
    return sum;
}

double alpha_coeff(int k, int j) {
    if (k < 1 || j < 1) throw std::invalid_argument("alpha_coeff: need k >= 1 and j >= 1");
    const double gamma_ratio = std::tgamma(0.5 * j) / std::tgamma(static_cast<double>(j));
    return 0.5 * gamma_ratio * alternating_binomial_sum(k, 0.5 * j);
}

Rational alpha_coeff_exact(int k, int j) {
    if (k < 1 || j < 2 || j % 2 != 0) {
        throw std::invalid_argument("alpha_coeff_exact: needs k >= 1 and even j >= 2");
    }
    // Γ(n)/Γ(2n) = (n-1)!/(2n-1)!
    const int n = j / 2;
    BigInt num = 1;
    BigInt den = 1;
    for (int i = 2; i < n; ++i) num *= i;
    for (int i = 2; i < 2 * n; ++i) den *= i;
    return Rational(num, den) * alternating_binomial_sum_exact(k, n) / 2;
}

bool harmonic_identity_check(int k_max) {
    if (k_max < 1) throw std::invalid_argument("harmonic_identity_check: k_max must be >= 1");
    for (int k = 1; k <= k_max; ++k) {
        if (alpha_coeff_exact(k, 2) != -harmonic_number_exact(k) / 2) return false;
        if (std::abs(alpha_coeff(k, 2) + 0.5 * harmonic_number(k)) > 1e-10) return false;
    }
    return true;
}

double c_curvature_weight(int k) {
    if (k < 1) throw std::invalid_argument("c_curvature_weight: k must be >= 1");
    if (k == 1) return -1.0 / 3.0;
    return -1.0 / (2.0 * k) + 0.5 * k * j_integral(static_cast<double>(k - 1));
}

double c_coeff(int k, int j, const CompactBody& body, Orientation orientation) {
    if (k < 1) throw std::invalid_argument("c_coeff: k must be >= 1");
    if (dimension(body) < 2) throw GeometryError("c_coeff: ambient dimension must be >= 2");
    switch (j) {
        case 0:
            return volume(body);
        case 1:
            return 0.5 * std::sqrt(std::numbers::pi / k) * surface_measure(body);
        case 2:
            return c_curvature_weight(k) * total_curvature(body, orientation);
        default:
            throw UnsupportedOrder("c_coeff: only j <= 2 is known in closed form");
    }
}

double a_curvature_weight(int k) {
    if (k < 1) throw std::invalid_argument("a_curvature_weight: k must be >= 1");
    if (k <= kCompensatedSumLimit) {
        CompensatedSum sum;
        for (int l = 1; l <= k; ++l) {
            const double bracket = (k - l) * j_integral(static_cast<double>(l)) + 1.0 / l;
            const double term = static_cast<double>(binomial(k, l)) * bracket;
            sum.add(l % 2 == 1 ? term : -term);
        }
        return -k / 6.0 + 0.5 * sum.value();
    }
    return static_cast<double>(a_curvature_weight_as<Extended>(k));
}

double a_coeff(int k, int j, const GeomFunctionals& g) {
    if (k < 1) throw std::invalid_argument("a_coeff: k must be >= 1");
    switch (j) {
        case 0:
            return g.vol_f;
        case 1:
            return 0.5 * std::sqrt(std::numbers::pi) * alternating_binomial_sum(k, 0.5) * g.bdy_f;
        case 2:
            return k / 6.0 * g.vol_ftau - 0.5 * harmonic_number(k) * g.bdy_f1 +
                   a_curvature_weight(k) * g.bdy_fL;
        default:
            throw UnsupportedOrder("a_coeff: only j <= 2 is known in closed form");
    }
}

double b_coeff(int k, int j, const CompactBody& body, BNormalization normalization) {
    if (k < 1) throw std::invalid_argument("b_coeff: k must be >= 1");
    if (dimension(body) < 2) throw GeometryError("b_coeff: ambient dimension must be >= 2");
    if (j == 0) return volume(body);
    if (j > 2 || j < 0) throw UnsupportedOrder("b_coeff: only j <= 2 is known in closed form");

    const double pi = std::numbers::pi;
    // The printed constants carry an extra 4π = |∂(unit ball in R³)| relative
    // to the constants produced by the ball computation.
    const double prefactor = normalization == BNormalization::per_proof
                                 ? std::pow(2.0, k) * std::pow(pi, -0.5 * k)
                                 : std::pow(2.0, 2 + k) * std::pow(pi, 0.5 * (2 - k));
    if (j == 1) {
        const double p = 0.5 * (k + 1);
        return prefactor * std::tgamma(p) * i_k_integral(k, p).value * surface_measure(body);
    }
    if (k == 2) return 0.0;
    const double p = 0.5 * (k + 2);
    return -prefactor * (k - 2) * std::tgamma(p) * i_k_integral(k, p).value *
           total_curvature(body, Orientation::inward);
}

std::vector<SeriesCoeffs> transform_1d(std::span<const SeriesCoeffs> table, int k_max) {
    if (k_max < 1) throw std::invalid_argument("transform_1d: k_max must be >= 1");
    std::vector<const SeriesCoeffs*> by_k(k_max + 1, nullptr);
    std::optional<Family> family;
    for (const auto& s : table) {
        if (s.k >= 1 && s.k <= k_max) by_k[s.k] = &s;
        if (family && *family != s.family) throw std::invalid_argument("transform_1d: mixed families");
        family = s.family;
    }
    for (int k = 1; k <= k_max; ++k) {
        if (!by_k[k]) throw std::invalid_argument("transform_1d: missing input for k=" + std::to_string(k));
    }
    if (*family != Family::a && *family != Family::c) {
        throw std::invalid_argument("transform_1d: input must be family a or c");
    }
    const Family target = *family == Family::a ? Family::c : Family::a;

    std::vector<SeriesCoeffs> out(k_max);
    for (int k = 1; k <= k_max; ++k) {
        out[k - 1].family = target;
        out[k - 1].k = k;
        out[k - 1].m = by_k[k]->m;
        out[k - 1].meta = Provenance::formula;
    }
    for (const auto& entry : by_k[1]->entries) {
        std::vector<Extended> x(k_max);
        for (int k = 1; k <= k_max; ++k) {
            const auto v = by_k[k]->at(entry.j);
            if (!v) {
                throw std::invalid_argument("transform_1d: k=" + std::to_string(k) + " lacks order j=" +
                                            std::to_string(entry.j));
            }
            x[k - 1] = *v;
        }
        const auto y = binomial_transform<Extended>(x);
        for (int k = 1; k <= k_max; ++k) out[k - 1].add(entry.j, static_cast<double>(y[k - 1]));
    }
    return out;
}

void write_coeff_csv(std::ostream& out, std::span<const SeriesCoeffs> rows) {
    out << "family,k,m,j,value,meta\n" << std::setprecision(17);
    for (const auto& s : rows) {
        for (const auto& e : s.entries) {
            out << to_string(s.family) << ',' << s.k << ',';
            if (s.m) out << *s.m;
            out << ',' << e.j << ',' << e.value << ',' << to_string(s.meta) << '\n';
        }
    }
}

}  // namespace sausage
