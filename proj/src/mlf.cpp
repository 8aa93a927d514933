#include "subdiff/mlf.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "subdiff/errors.hpp"
#include "subdiff/quadrature.hpp"

namespace subdiff {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// 1/Gamma(y), zero at the poles of Gamma.
double reciprocal_gamma(double y) {
    if (y <= 0 && y == std::floor(y)) return 0.0;
    return 1.0 / std::tgamma(y);
}

void check_arguments(double alpha, double beta, double z) {
    if (!(alpha > 0 && alpha <= 1)) {
        throw DomainError("mittag_leffler: alpha must lie in (0, 1], got " + std::to_string(alpha));
    }
    if (!(beta > 0) || !std::isfinite(beta)) {
        throw DomainError("mittag_leffler: beta must be positive, got " + std::to_string(beta));
    }
    if (!(z <= 0) || !std::isfinite(z)) {
        throw DomainError("mittag_leffler: z must be finite and nonpositive, got " +
                          std::to_string(z));
    }
}

struct Attempt {
    double value = 0;
    bool ok = false;
};

// Kahan-compensated Taylor series. The rounding error is bounded by the
// largest term times a small multiple of eps; the attempt is rejected when
// that bound exceeds the tolerance.
Attempt taylor_series(double alpha, double beta, double z, const MLAccuracy& acc) {
    double sum = 0, carry = 0, power = 1, largest = 0;
    for (int k = 0; k < acc.max_terms; ++k) {
        const double term = power * reciprocal_gamma(k * alpha + beta);
        largest = std::max(largest, std::abs(term));
        const double y = term - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
        // Terms decay monotonically once k*alpha + beta is past the Gamma minimum.
        if (k * alpha + beta > 2 && std::abs(term) <= 0.1 * kEps * std::abs(sum)) {
            const double rounding = 4 * kEps * largest;
            return {sum, rounding <= acc.target_tol * std::abs(sum)};
        }
        power *= z;
    }
    return {sum, false};
}

// -sum_{k>=1} z^{-k} / Gamma(beta - k alpha), truncated before the terms grow.
Attempt asymptotic_expansion(double alpha, double beta, double z, const MLAccuracy& acc) {
    double sum = 0;
    double previous = std::numeric_limits<double>::infinity();
    double inv_z_power = 1;
    for (int k = 1; k <= acc.max_terms; ++k) {
        inv_z_power /= z;
        const double term = -inv_z_power * reciprocal_gamma(beta - k * alpha);
        if (term == 0) continue;
        const double magnitude = std::abs(term);
        if (magnitude > previous) break;
        if (sum != 0 && magnitude <= 0.01 * acc.target_tol * std::abs(sum)) {
            return {sum + term, true};
        }
        sum += term;
        previous = magnitude;
    }
    return {sum, false};
}

// Real-axis integral representation for 0 < alpha < 1, beta <= 1, z < 0:
// E(z) = int_0^inf chi^{(1-beta)/alpha} exp(-chi^{1/alpha})
//        (chi sin(pi(1-beta)) - z sin(pi(1-beta+alpha)))
//        / (alpha pi (chi^2 - 2 chi z cos(alpha pi) + z^2)) dchi.
double integral_fractional(double alpha, double beta, double z, const MLAccuracy& acc) {
    const double s1 = std::sin(kPi * (1 - beta));
    const double s2 = std::sin(kPi * (1 - beta + alpha));
    const double c = std::cos(alpha * kPi);
    const double exponent = (1 - beta) / alpha;
    auto kernel = [&](double chi) {
        if (chi == 0) return exponent == 0 ? (-z * s2) / (alpha * kPi * z * z) : 0.0;
        const double num = chi * s1 - z * s2;
        const double den = chi * chi - 2 * chi * z * c + z * z;
        return std::pow(chi, exponent) * std::exp(-std::pow(chi, 1 / alpha)) * num /
               (alpha * kPi * den);
    };
    const double chi_max = std::pow(80.0, alpha);
    std::vector<double> breaks{0.0};
    const double peak = -z * -c;  // minimizer of the denominator when cos(alpha pi) < 0
    if (c < 0 && peak < chi_max) {
        if (peak > 0.05 * chi_max) breaks.push_back(0.5 * peak);
        breaks.push_back(peak);
    }
    if (chi_max > 1 && breaks.back() < 1) breaks.push_back(1.0);
    breaks.push_back(chi_max);
    auto r = integrate_adaptive<double>(kernel, breaks, 1e-300, 0.05 * acc.target_tol);
    return r.value;
}

// alpha = 1, beta != 1 via E_{1,b}(-x) = (1/Gamma(b)) int_0^1 exp(-x (1 - u^{1/(b-1)})) du
// for b > 1, and E_{1,b}(z) = 1/Gamma(b) + z E_{1,b+1}(z) otherwise.
double integral_unit_alpha(double beta, double z, const MLAccuracy& acc) {
    if (beta < 1) {
        return reciprocal_gamma(beta) + z * integral_unit_alpha(beta + 1, z, acc);
    }
    const double p = 1 / (beta - 1);
    auto integrand = [&](double u) { return std::exp(z * (1 - std::pow(u, p))); };
    auto r = integrate_adaptive<double>(integrand, 0.0, 1.0, 1e-300, 0.05 * acc.target_tol);
    return reciprocal_gamma(beta) * r.value;
}

double integral_branch(double alpha, double beta, double z, const MLAccuracy& acc) {
    if (alpha == 1) return integral_unit_alpha(beta, z, acc);
    // E_{a,b}(z) = (E_{a,b-a}(z) - 1/Gamma(b-a)) / z keeps the kernel free of
    // the chi^{(1-b)/a} singularity.
    if (beta > 1) {
        return (integral_branch(alpha, beta - alpha, z, acc) - reciprocal_gamma(beta - alpha)) / z;
    }
    return integral_fractional(alpha, beta, z, acc);
}

}  // namespace

void MLAccuracy::validate() const {
    if (!(target_tol > 0)) throw DomainError("MLAccuracy: target_tol must be positive");
    if (!(series_radius < asymptotic_threshold)) {
        throw DomainError("MLAccuracy: series_radius must be below asymptotic_threshold");
    }
    if (max_terms < 1) throw DomainError("MLAccuracy: max_terms must be at least 1");
}

double mittag_leffler(double alpha, double beta, double z, const MLAccuracy& acc,
                      MLBranch& branch) {
    check_arguments(alpha, beta, z);
    acc.validate();
    if (z == 0) {
        branch = MLBranch::Zero;
        return reciprocal_gamma(beta);
    }
    if (alpha == 1 && beta == 1) {
        branch = MLBranch::Exponential;
        return std::exp(z);
    }
    const double x = -z;
    if (x <= acc.series_radius) {
        if (auto s = taylor_series(alpha, beta, z, acc); s.ok) {
            branch = MLBranch::Series;
            return s.value;
        }
    }
    if (x >= acc.asymptotic_threshold && alpha < 1) {
        if (auto s = asymptotic_expansion(alpha, beta, z, acc); s.ok) {
            branch = MLBranch::Asymptotic;
            return s.value;
        }
    }
    branch = MLBranch::Integral;
    try {
        return integral_branch(alpha, beta, z, acc);
    } catch (const QuadratureError& e) {
        throw AccuracyError("mittag_leffler: no branch reached the target tolerance (" +
                            std::string(e.what()) + ")");
    }
}

double mittag_leffler(double alpha, double beta, double z, const MLAccuracy& acc) {
    MLBranch branch{};
    return mittag_leffler(alpha, beta, z, acc, branch);
}

double c_alpha_upper_bound(double alpha) {
    if (!(alpha > 0 && alpha < 1)) {
        throw DomainError("c_alpha_upper_bound: alpha must lie in (0, 1), got " +
                          std::to_string(alpha));
    }
    return alpha * alpha * kPi / (std::sin(alpha * kPi) + alpha * kPi);
}

CAlphaResult c_alpha(double alpha, const MLAccuracy& acc) {
    if (!(alpha > 0 && alpha <= 1)) {
        throw DomainError("c_alpha: alpha must lie in (0, 1], got " + std::to_string(alpha));
    }
    auto f = [&](double t) { return t * mittag_leffler(alpha, alpha, -t, acc); };
    const auto best = golden_section_maximize<double>(f, 0.5, 1.5, 1e-8, 1e6);
    CAlphaResult out;
    out.alpha = alpha;
    out.c_alpha = best.value;
    out.t_star = best.argmax;
    out.upper_bound = alpha == 1 ? 1.0 : c_alpha_upper_bound(alpha);
    return out;
}

double christoffel_darboux_residual(double alpha, double t, const MLAccuracy& acc) {
    if (!(alpha > 0 && alpha < 1)) {
        throw DomainError("christoffel_darboux_residual: alpha must lie in (0, 1)");
    }
    if (!(t > 0) || !std::isfinite(t)) {
        throw DomainError("christoffel_darboux_residual: t must be positive");
    }
    const double ta = std::pow(t, alpha);
    const double lhs = ta * mittag_leffler(alpha, alpha, -ta, acc);

    // Both halves are graded towards their endpoint with exponent 1/alpha.
    // On the right half this absorbs the (t-s)^{alpha-1} factor exactly.
    const double half = t / 2;
    const double half_a = std::pow(half, alpha);
    auto left = [&](double v) {
        if (v == 0) return 0.0;
        const double s = half * std::pow(v, 1 / alpha);
        const double jac = half / alpha * std::pow(v, 1 / alpha - 1);
        const double r = t - s;
        return jac * std::pow(r, alpha - 1) * mittag_leffler(alpha, alpha, -std::pow(r, alpha), acc) *
               mittag_leffler(alpha, 1, -half_a * v, acc);
    };
    auto right = [&](double u) {
        const double sigma = half * std::pow(u, 1 / alpha);
        return half_a / alpha * mittag_leffler(alpha, alpha, -half_a * u, acc) *
               mittag_leffler(alpha, 1, -std::pow(t - sigma, alpha), acc);
    };
    const double tol = 1e-13;
    const double rhs = alpha * (integrate_adaptive<double>(left, 0.0, 1.0, 1e-300, tol).value +
                                integrate_adaptive<double>(right, 0.0, 1.0, 1e-300, tol).value);
    return std::abs(lhs - rhs);
}

}  // namespace subdiff
