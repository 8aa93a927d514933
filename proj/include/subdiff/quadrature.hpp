#pragma once

// Adaptive Gauss-Kronrod integration and a bracketing golden-section maximizer.
// Both are templated on the scalar type and the callable so they can be reused
// with any floating-point type that supports the usual arithmetic.

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

#include "subdiff/errors.hpp"

namespace subdiff {

template <typename Scalar>
struct QuadratureResult {
    Scalar value{};
    Scalar error{};
    int intervals = 0;
};

namespace detail {

// Abscissae and weights of the 15-point Kronrod extension of 7-point Gauss.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename Scalar, typename F>
QuadratureResult<Scalar> kronrod15(F&& f, Scalar a, Scalar b) {
    const Scalar center = (a + b) / 2;
    const Scalar half = (b - a) / 2;
    const Scalar fc = f(center);
    Scalar kronrod = fc * Scalar(kKronrodWeights[7]);
    Scalar gauss = fc * Scalar(kGaussWeights[3]);
    for (int j = 0; j < 7; ++j) {
        const Scalar dx = half * Scalar(kKronrodNodes[j]);
        const Scalar sum = f(center - dx) + f(center + dx);
        kronrod += Scalar(kKronrodWeights[j]) * sum;
        if (j % 2 == 1) gauss += Scalar(kGaussWeights[j / 2]) * sum;
    }
    using std::abs;
    return {kronrod * half, abs((kronrod - gauss) * half), 1};
}

}  // namespace detail

/// Globally adaptive G7/K15 quadrature of f over [a, b]. Intervals with the
/// largest error estimate are bisected until the total estimate drops below
/// max(abs_tol, rel_tol * |value|). Throws QuadratureError when max_intervals
/// is exhausted.
template <typename Scalar, typename F>
QuadratureResult<Scalar> integrate_adaptive(F&& f, Scalar a, Scalar b, Scalar abs_tol,
                                            Scalar rel_tol, int max_intervals = 2000) {
    struct Piece {
        Scalar a, b, value, error;
        bool operator<(const Piece& other) const { return error < other.error; }
    };
    std::priority_queue<Piece> pieces;
    Scalar value{0};
    Scalar error{0};
    auto push = [&](Scalar lo, Scalar hi) {
        auto r = detail::kronrod15<Scalar>(f, lo, hi);
        pieces.push({lo, hi, r.value, r.error});
        value += r.value;
        error += r.error;
    };
    push(a, b);
    using std::abs;
    while (error > std::max(abs_tol, rel_tol * abs(value))) {
        if (static_cast<int>(pieces.size()) >= max_intervals) {
            throw QuadratureError("adaptive quadrature did not converge within " +
                                  std::to_string(max_intervals) + " intervals");
        }
        Piece worst = pieces.top();
        pieces.pop();
        value -= worst.value;
        error -= worst.error;
        const Scalar mid = (worst.a + worst.b) / 2;
        push(worst.a, mid);
        push(mid, worst.b);
    }
    // Re-sum to shed the drift accumulated by the running updates.
    Scalar total{0};
    Scalar total_error{0};
    const int count = static_cast<int>(pieces.size());
    while (!pieces.empty()) {
        total += pieces.top().value;
        total_error += pieces.top().error;
        pieces.pop();
    }
    return {total, total_error, count};
}

/// Integrates over consecutive breakpoints, summing the pieces.
template <typename Scalar, typename F>
QuadratureResult<Scalar> integrate_adaptive(F&& f, const std::vector<Scalar>& breaks,
                                            Scalar abs_tol, Scalar rel_tol,
                                            int max_intervals = 2000) {
    QuadratureResult<Scalar> out;
    const auto pieces = static_cast<Scalar>(breaks.size() - 1);
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (!(breaks[i + 1] > breaks[i])) continue;
        auto r = integrate_adaptive<Scalar>(f, breaks[i], breaks[i + 1], abs_tol / pieces,
                                            rel_tol, max_intervals);
        out.value += r.value;
        out.error += r.error;
        out.intervals += r.intervals;
    }
    return out;
}

template <typename Scalar>
struct MaximizeResult {
    Scalar argmax{};
    Scalar value{};
    Scalar lo{};
    Scalar hi{};
    int evaluations = 0;
};

/// Maximizes a unimodal f. Starting from [lo, hi], the bracket is widened
/// geometrically (lo halved, hi doubled) while the maximum sits on an endpoint;
/// then golden-section search shrinks it to width <= x_tol.
template <typename Scalar, typename F>
MaximizeResult<Scalar> golden_section_maximize(F&& f, Scalar lo, Scalar hi, Scalar x_tol,
                                               Scalar hi_limit) {
    MaximizeResult<Scalar> out;
    auto eval = [&](Scalar x) {
        ++out.evaluations;
        return f(x);
    };
    Scalar mid = (lo + hi) / 2;
    Scalar f_lo = eval(lo), f_mid = eval(mid), f_hi = eval(hi);
    while (f_lo > f_mid || f_hi > f_mid) {
        if (f_hi > f_mid) {
            lo = mid;
            f_lo = f_mid;
            mid = hi;
            f_mid = f_hi;
            hi *= 2;
            if (hi > hi_limit) throw BracketError("bracket expansion exceeded upper limit");
            f_hi = eval(hi);
        } else {
            hi = mid;
            f_hi = f_mid;
            mid = lo;
            f_mid = f_lo;
            lo /= 2;
            if (!(lo > Scalar(0))) throw BracketError("bracket collapsed onto zero");
            f_lo = eval(lo);
        }
    }

    const Scalar inv_phi = (std::sqrt(Scalar(5)) - 1) / 2;
    Scalar a = lo, b = hi;
    Scalar x1 = b - inv_phi * (b - a);
    Scalar x2 = a + inv_phi * (b - a);
    Scalar f1 = eval(x1), f2 = eval(x2);
    while (b - a > x_tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = eval(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = eval(x1);
        }
    }
    out.lo = a;
    out.hi = b;
    if (f1 >= f2) {
        out.argmax = x1;
        out.value = f1;
    } else {
        out.argmax = x2;
        out.value = f2;
    }
    return out;
}

}  // namespace subdiff
