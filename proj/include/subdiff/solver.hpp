#pragma once

// Backward-Euler convolution quadrature for
//   d_t^a u = Laplace(u) + q u  in (0,1)^d x (0, T],  u = 0 on the boundary,
// and the eigenfunction-expansion reference solution for q = 0 in 1D.

#include <memory>
#include <optional>
#include <vector>

#include "subdiff/mesh.hpp"
#include "subdiff/mlf.hpp"

namespace subdiff {

/// Coefficients of (1 - zeta)^alpha, omega_0..omega_N, and the step size.
struct CQWeights {
    double alpha = 1;
    int N = 0;
    double tau = 0;
    Eigen::VectorXd omega;
};

CQWeights cq_weights(double alpha, int N, double T);

struct ForwardOptions {
    bool store_trajectory = false;
    bool caputo_terminal = false;
    bool laplacian_terminal = false;
};

struct ForwardResult {
    NodalField terminal;
    /// N + 1 fields; entry 0 is the initial datum with its boundary values zeroed.
    std::vector<NodalField> trajectory;
    /// Discrete Caputo derivative at T: tau^{-a} sum_j omega_j (U^{N-j} - U^0).
    std::optional<NodalField> caputo_terminal;
    /// Weak-form Laplacian at T: M v = -S U^N.
    std::optional<NodalField> laplacian_terminal;
};

/// Time-stepping parameters shared by every forward solve of a run.
struct ForwardSetup {
    std::shared_ptr<const FemSpace> space;
    double alpha = 0.5;
    double T = 1;
    int N = 100;
    NodalField u0;

    void validate() const;
};

/// Solves, for n = 1..N,
///   (tau^{-a} M + S - M_q) U^n = M (tau^{-a} U^0 - tau^{-a} sum_{j=1..n} omega_j (U^{n-j} - U^0)).
/// The step matrix is factorized once. Throws SingularSystemError when it is singular.
ForwardResult forward_solve(const FemSpace& space, const NodalField& q, const NodalField& u0,
                            double alpha, double T, int N, const ForwardOptions& options = {});

inline ForwardResult forward_solve(const ForwardSetup& setup, const NodalField& q,
                                   const ForwardOptions& options = {}) {
    return forward_solve(*setup.space, q, setup.u0, setup.alpha, setup.T, setup.N, options);
}

/// Scalar backward-Euler CQ solution of d_t^a y = -lambda y, y(0) = 1, at t = T.
double cq_scalar_decay(double alpha, double lambda, double T, int N);

/// u(T) = sum_{j=1..n_modes} E_{a,1}(-(j pi)^2 T^a) (u0, phi_j) phi_j with
/// phi_j = sqrt(2) sin(j pi x), inner products by the consistent mass matrix.
/// When cq_steps is given, the Mittag-Leffler factor of each mode is replaced by
/// cq_scalar_decay(a, (j pi)^2, T, cq_steps), which yields a reference that
/// carries the same time discretization as forward_solve but no spatial error.
NodalField spectral_solve(const FemSpace& space, const NodalField& u0, double alpha, double T,
                          int n_modes, std::optional<int> cq_steps = std::nullopt,
                          const MLAccuracy& acc = {});

}  // namespace subdiff
