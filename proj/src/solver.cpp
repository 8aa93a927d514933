#include "subdiff/solver.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "subdiff/errors.hpp"

namespace subdiff {

CQWeights cq_weights(double alpha, int N, double T) {
    if (!(alpha > 0 && alpha <= 1)) throw DomainError("cq_weights: alpha must lie in (0, 1]");
    if (N < 1) throw DomainError("cq_weights: N must be at least 1");
    if (!(T > 0) || !std::isfinite(T)) throw DomainError("cq_weights: T must be positive");
    CQWeights w;
    w.alpha = alpha;
    w.N = N;
    w.tau = T / N;
    w.omega.resize(N + 1);
    w.omega[0] = 1;
    for (int j = 1; j <= N; ++j) w.omega[j] = w.omega[j - 1] * ((j - 1 - alpha) / j);
    return w;
}

void ForwardSetup::validate() const {
    if (!space) throw DomainError("ForwardSetup: missing finite element space");
    if (u0.size() != space->mesh().num_nodes()) {
        throw DomainError("ForwardSetup: initial datum does not match the mesh");
    }
    cq_weights(alpha, N, T);
}

ForwardResult forward_solve(const FemSpace& space, const NodalField& q, const NodalField& u0,
                            double alpha, double T, int N, const ForwardOptions& options) {
    const Mesh& mesh = space.mesh();
    if (q.size() != mesh.num_nodes() || u0.size() != mesh.num_nodes()) {
        throw DomainError("forward_solve: field sizes do not match the mesh");
    }
    const CQWeights w = cq_weights(alpha, N, T);
    const double scale = std::pow(w.tau, -alpha);

    const SparseMatrix& mass = space.mass().interior;
    const SparseOperator weighted = assemble_weighted_mass(mesh, q);
    const SparseMatrix step = scale * w.omega[0] * mass + space.stiffness().interior - weighted.interior;

    Eigen::SimplicialLDLT<SparseMatrix> factor(step);
    bool singular = factor.info() != Eigen::Success;
    if (!singular) {
        const Eigen::VectorXd d = factor.vectorD().cwiseAbs();
        singular = !(d.minCoeff() > 1e-13 * d.maxCoeff());
    }
    if (singular) {
        throw SingularSystemError(
            "forward_solve: step matrix tau^{-a} M + S - M_q is singular for this potential");
    }

    const int dof = mesh.num_interior();
    const Eigen::VectorXd u_init = mesh.to_interior(u0);
    // Column n holds U^n - U^0.
    Eigen::MatrixXd shifted = Eigen::MatrixXd::Zero(dof, N + 1);
    // reversed[N - j] = omega_j, so that the weights for U^0..U^{n-1} in step n
    // form the contiguous block reversed[N - n .. N - 1].
    const Eigen::VectorXd reversed = w.omega.reverse();

    Eigen::VectorXd history(dof);
    for (int n = 1; n <= N; ++n) {
        history.noalias() = shifted.leftCols(n) * reversed.segment(N - n, n);
        const Eigen::VectorXd rhs = scale * (mass * (w.omega[0] * u_init - history));
        shifted.col(n) = factor.solve(rhs) - u_init;
    }

    ForwardResult result;
    const Eigen::VectorXd u_final = shifted.col(N) + u_init;
    result.terminal = mesh.from_interior(u_final);
    if (options.store_trajectory) {
        result.trajectory.reserve(N + 1);
        for (int n = 0; n <= N; ++n) result.trajectory.push_back(mesh.from_interior(shifted.col(n) + u_init));
    }
    if (options.caputo_terminal) {
        const Eigen::VectorXd caputo = scale * (shifted.leftCols(N + 1) * reversed);
        result.caputo_terminal = mesh.from_interior(caputo);
    }
    if (options.laplacian_terminal) {
        const Eigen::VectorXd lap = space.mass_solve(-(space.stiffness().interior * u_final));
        result.laplacian_terminal = mesh.from_interior(lap);
    }
    return result;
}

double cq_scalar_decay(double alpha, double lambda, double T, int N) {
    const CQWeights w = cq_weights(alpha, N, T);
    const double scale = std::pow(w.tau, -alpha);
    std::vector<double> shifted(N + 1, 0.0);
    for (int n = 1; n <= N; ++n) {
        double history = 0;
        for (int j = 1; j <= n; ++j) history += w.omega[j] * shifted[n - j];
        // (scale + lambda) y_n = scale (y_0 - history), with y_0 = 1.
        shifted[n] = scale * (1 - history) / (scale + lambda) - 1;
    }
    return shifted[N] + 1;
}

NodalField spectral_solve(const FemSpace& space, const NodalField& u0, double alpha, double T,
                          int n_modes, std::optional<int> cq_steps, const MLAccuracy& acc) {
    const Mesh& mesh = space.mesh();
    if (mesh.dimension != 1) throw DomainError("spectral_solve: only 1D meshes are supported");
    if (n_modes < 1) throw DomainError("spectral_solve: n_modes must be at least 1");
    if (u0.size() != mesh.num_nodes()) throw DomainError("spectral_solve: field size mismatch");
    if (!(T >= 0)) throw DomainError("spectral_solve: T must be nonnegative");

    const double pi = std::numbers::pi;
    const Eigen::VectorXd weighted = space.mass().full * u0;
    NodalField out = NodalField::Zero(mesh.num_nodes());
    const Eigen::ArrayXd x = mesh.coords.row(0).transpose().array();
    for (int j = 1; j <= n_modes; ++j) {
        const NodalField phi = std::sqrt(2.0) * (j * pi * x).sin().matrix();
        const double coefficient = phi.dot(weighted);
        const double lambda = (j * pi) * (j * pi);
        double decay;
        if (T == 0) {
            decay = 1;
        } else if (cq_steps) {
            decay = cq_scalar_decay(alpha, lambda, T, *cq_steps);
        } else {
            decay = mittag_leffler(alpha, 1.0, -lambda * std::pow(T, alpha), acc);
        }
        out += decay * coefficient * phi;
    }
    return mesh.zero_boundary(out);
}

}  // namespace subdiff
