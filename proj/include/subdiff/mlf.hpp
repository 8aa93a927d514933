#pragma once

// Two-parameter Mittag-Leffler function E_{a,b}(z) on the nonpositive real axis
// and the constant c_a = sup_{t>=0} t E_{a,a}(-t).

namespace subdiff {

/// Evaluation policy for mittag_leffler().
///
/// |z| <= series_radius uses the Taylor series; |z| >= asymptotic_threshold
/// uses the algebraic asymptotic expansion when its smallest term certifies
/// target_tol; everything else goes through an integral representation.
struct MLAccuracy {
    double target_tol = 1e-10;
    double series_radius = 1.0;
    double asymptotic_threshold = 15.0;
    int max_terms = 500;

    void validate() const;
};

/// Which evaluation route mittag_leffler() takes for given arguments.
enum class MLBranch { Zero, Exponential, Series, Asymptotic, Integral };

double mittag_leffler(double alpha, double beta, double z, const MLAccuracy& acc = {});

/// Same as mittag_leffler(), additionally reporting the branch that produced
/// the value.
double mittag_leffler(double alpha, double beta, double z, const MLAccuracy& acc,
                      MLBranch& branch);

struct CAlphaResult {
    double alpha = 0;
    double c_alpha = 0;
    double t_star = 0;
    /// a^2 pi / (sin(a pi) + a pi); the limit value 1 at a = 1.
    double upper_bound = 0;
};

/// Maximizes t E_{a,a}(-t) over t >= 0.
CAlphaResult c_alpha(double alpha, const MLAccuracy& acc = {});

/// a^2 pi / (sin(a pi) + a pi) for a in (0, 1).
double c_alpha_upper_bound(double alpha);

/// |w(t) - a int_0^t (t-s)^{a-1} E_{a,a}(-(t-s)^a) E_{a,1}(-s^a) ds| with
/// w(t) = t^a E_{a,a}(-t^a). Zero up to quadrature and evaluation error.
double christoffel_darboux_residual(double alpha, double t, const MLAccuracy& acc = {});

}  // namespace subdiff
