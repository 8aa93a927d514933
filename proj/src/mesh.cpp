#include "subdiff/mesh.hpp"

#include <cmath>
#include <string>

#include "subdiff/errors.hpp"

namespace subdiff {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

SparseMatrix interior_block(const Mesh& mesh, const SparseMatrix& full) {
    Triplets entries;
    entries.reserve(full.nonZeros());
    for (int col = 0; col < full.outerSize(); ++col) {
        const int jc = mesh.interior_index[col];
        if (jc < 0) continue;
        for (SparseMatrix::InnerIterator it(full, col); it; ++it) {
            const int ir = mesh.interior_index[it.row()];
            if (ir >= 0) entries.emplace_back(ir, jc, it.value());
        }
    }
    SparseMatrix out(mesh.num_interior(), mesh.num_interior());
    out.setFromTriplets(entries.begin(), entries.end());
    return out;
}

SparseOperator finish(const Mesh& mesh, OperatorKind kind, const Triplets& entries) {
    SparseOperator op;
    op.kind = kind;
    op.full.resize(mesh.num_nodes(), mesh.num_nodes());
    op.full.setFromTriplets(entries.begin(), entries.end());
    op.interior = interior_block(mesh, op.full);
    return op;
}

// Gradients of the barycentric coordinates of a triangle (rows) and its area.
Eigen::Matrix<double, 3, 2> barycentric_gradients(const Mesh& mesh, int e, double& area) {
    Eigen::Matrix3d a;
    for (int k = 0; k < 3; ++k) {
        const int node = mesh.elements(k, e);
        a(k, 0) = 1;
        a(k, 1) = mesh.coords(0, node);
        a(k, 2) = mesh.coords(1, node);
    }
    area = 0.5 * std::abs(a.determinant());
    const Eigen::Matrix3d inv = a.inverse();
    return inv.bottomRows<2>().transpose();
}

}  // namespace

double Mesh::element_measure(int e) const {
    if (dimension == 1) {
        return std::abs(coords(0, elements(1, e)) - coords(0, elements(0, e)));
    }
    const Eigen::Vector2d p0 = coords.col(elements(0, e));
    const Eigen::Vector2d p1 = coords.col(elements(1, e));
    const Eigen::Vector2d p2 = coords.col(elements(2, e));
    const Eigen::Vector2d d1 = p1 - p0, d2 = p2 - p0;
    return 0.5 * std::abs(d1.x() * d2.y() - d1.y() * d2.x());
}

Eigen::VectorXd Mesh::to_interior(const NodalField& f) const {
    Eigen::VectorXd out(num_interior());
    for (int i = 0; i < num_interior(); ++i) out[i] = f[interior[i]];
    return out;
}

NodalField Mesh::from_interior(const Eigen::VectorXd& v) const {
    NodalField out = NodalField::Zero(num_nodes());
    for (int i = 0; i < num_interior(); ++i) out[interior[i]] = v[i];
    return out;
}

NodalField Mesh::zero_boundary(NodalField f) const {
    for (int i = 0; i < num_nodes(); ++i) {
        if (is_boundary(i)) f[i] = 0;
    }
    return f;
}

Mesh build_mesh(int dimension, int M) {
    if (dimension != 1 && dimension != 2) {
        throw DomainError("build_mesh: dimension must be 1 or 2, got " + std::to_string(dimension));
    }
    if (M < 2) throw DomainError("build_mesh: need at least 2 subdivisions, got " + std::to_string(M));

    Mesh mesh;
    mesh.dimension = dimension;
    mesh.M = M;
    mesh.h = 1.0 / M;
    const int per_side = M + 1;
    if (dimension == 1) {
        mesh.coords.resize(1, per_side);
        for (int i = 0; i <= M; ++i) mesh.coords(0, i) = static_cast<double>(i) / M;
        mesh.elements.resize(2, M);
        for (int e = 0; e < M; ++e) {
            mesh.elements(0, e) = e;
            mesh.elements(1, e) = e + 1;
        }
    } else {
        mesh.coords.resize(2, per_side * per_side);
        for (int j = 0; j <= M; ++j) {
            for (int i = 0; i <= M; ++i) {
                mesh.coords(0, j * per_side + i) = static_cast<double>(i) / M;
                mesh.coords(1, j * per_side + i) = static_cast<double>(j) / M;
            }
        }
        // Each cell is split along the diagonal from its upper-left to its
        // lower-right vertex.
        mesh.elements.resize(3, 2 * M * M);
        int e = 0;
        for (int j = 0; j < M; ++j) {
            for (int i = 0; i < M; ++i) {
                const int ll = j * per_side + i;
                const int lr = ll + 1;
                const int ul = ll + per_side;
                const int ur = ul + 1;
                mesh.elements.col(e++) << ll, lr, ul;
                mesh.elements.col(e++) << lr, ur, ul;
            }
        }
    }

    mesh.interior_index.assign(mesh.num_nodes(), -1);
    for (int n = 0; n < mesh.num_nodes(); ++n) {
        bool boundary = false;
        for (int d = 0; d < dimension; ++d) {
            const double x = mesh.coords(d, n);
            boundary = boundary || x == 0.0 || x == 1.0;
        }
        if (!boundary) {
            mesh.interior_index[n] = mesh.num_interior();
            mesh.interior.push_back(n);
        }
    }
    return mesh;
}

SparseOperator assemble(const Mesh& mesh, OperatorKind kind) {
    if (kind == OperatorKind::WeightedMass) {
        return assemble_weighted_mass(mesh, NodalField::Ones(mesh.num_nodes()));
    }
    Triplets entries;
    const int nv = mesh.dimension + 1;
    entries.reserve(static_cast<std::size_t>(mesh.num_elements()) * nv * nv);
    for (int e = 0; e < mesh.num_elements(); ++e) {
        Eigen::MatrixXd local(nv, nv);
        if (mesh.dimension == 1) {
            const double len = mesh.element_measure(e);
            if (kind == OperatorKind::Stiffness) {
                local << 1, -1, -1, 1;
                local /= len;
            } else {
                local << 2, 1, 1, 2;
                local *= len / 6;
            }
        } else {
            double area = 0;
            const auto grads = barycentric_gradients(mesh, e, area);
            if (kind == OperatorKind::Stiffness) {
                local = area * grads * grads.transpose();
            } else {
                local.setConstant(area / 12);
                local.diagonal().setConstant(area / 6);
            }
        }
        for (int a = 0; a < nv; ++a) {
            for (int b = 0; b < nv; ++b) {
                entries.emplace_back(mesh.elements(a, e), mesh.elements(b, e), local(a, b));
            }
        }
    }
    return finish(mesh, kind, entries);
}

SparseOperator assemble_weighted_mass(const Mesh& mesh, const NodalField& q) {
    if (q.size() != mesh.num_nodes()) {
        throw DomainError("assemble_weighted_mass: field size does not match the mesh");
    }
    // Exact integrals of products of three barycentric coordinates:
    // int l_i l_j l_k = |K| d! a! b! c! / (d + a + b + c)!.
    const int d = mesh.dimension;
    const int nv = d + 1;
    const double all_same = d == 1 ? 1.0 / 4 : 1.0 / 10;
    const double pair = d == 1 ? 1.0 / 12 : 1.0 / 30;
    const double distinct = d == 1 ? 0.0 : 1.0 / 60;

    Triplets entries;
    entries.reserve(static_cast<std::size_t>(mesh.num_elements()) * nv * nv);
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const double measure = mesh.element_measure(e);
        for (int a = 0; a < nv; ++a) {
            for (int b = 0; b < nv; ++b) {
                double value = 0;
                for (int c = 0; c < nv; ++c) {
                    const double qc = q[mesh.elements(c, e)];
                    double weight;
                    if (a == b && b == c) {
                        weight = all_same;
                    } else if (a == b || b == c || a == c) {
                        weight = pair;
                    } else {
                        weight = distinct;
                    }
                    value += weight * qc;
                }
                entries.emplace_back(mesh.elements(a, e), mesh.elements(b, e), measure * value);
            }
        }
    }
    auto op = finish(mesh, OperatorKind::WeightedMass, entries);
    return op;
}

FemSpace::FemSpace(Mesh mesh)
    : mesh_(std::move(mesh)),
      stiffness_(assemble(mesh_, OperatorKind::Stiffness)),
      mass_(assemble(mesh_, OperatorKind::Mass)) {
    stiffness_factor_.compute(stiffness_.interior);
    mass_factor_.compute(mass_.interior);
    if (stiffness_factor_.info() != Eigen::Success || mass_factor_.info() != Eigen::Success) {
        throw SolverError("FemSpace: Cholesky factorization of stiffness or mass matrix failed");
    }
}

NodalField FemSpace::poisson_solve(const NodalField& rhs) const {
    if (rhs.size() != mesh_.num_nodes()) {
        throw DomainError("poisson_solve: field size does not match the mesh");
    }
    const Eigen::VectorXd load = mesh_.to_interior(mass_.full * rhs);
    const Eigen::VectorXd w = stiffness_factor_.solve(load);
    if (stiffness_factor_.info() != Eigen::Success) throw SolverError("poisson_solve failed");
    return mesh_.from_interior(w);
}

Eigen::VectorXd FemSpace::mass_solve(const Eigen::VectorXd& b) const {
    return mass_factor_.solve(b);
}

NodalField FemSpace::project_dirichlet(const NodalField& f) const {
    if (f.size() != mesh_.num_nodes()) throw DomainError("project_dirichlet: field size mismatch");
    return mesh_.from_interior(mass_solve(mesh_.to_interior(mass_.full * f)));
}

double FemSpace::l2_norm(const NodalField& f) const { return subdiff::l2_norm(mass_, f); }

std::shared_ptr<const FemSpace> make_space(int dimension, int M) {
    return std::make_shared<const FemSpace>(build_mesh(dimension, M));
}

NodalField poisson_solve(const SparseOperator& stiffness, const SparseOperator& mass,
                         const Mesh& mesh, const NodalField& rhs) {
    if (stiffness.kind != OperatorKind::Stiffness) {
        throw DomainError("poisson_solve: operator is not a stiffness matrix");
    }
    if (rhs.size() != mesh.num_nodes()) {
        throw DomainError("poisson_solve: field size does not match the mesh");
    }
    Eigen::SimplicialLLT<SparseMatrix> factor(stiffness.interior);
    if (factor.info() != Eigen::Success) throw SolverError("poisson_solve: factorization failed");
    const Eigen::VectorXd w = factor.solve(mesh.to_interior(mass.full * rhs));
    return mesh.from_interior(w);
}

double l2_norm(const SparseOperator& mass, const NodalField& f) {
    if (f.size() != mass.full.rows()) throw DomainError("l2_norm: field size does not match");
    return std::sqrt(std::max(0.0, f.dot(mass.full * f)));
}

double sup_norm(const NodalField& f) { return f.size() == 0 ? 0.0 : f.cwiseAbs().maxCoeff(); }

NodalField restrict_to(const NodalField& fine, const Mesh& fine_mesh, const Mesh& coarse_mesh) {
    if (fine_mesh.dimension != coarse_mesh.dimension || coarse_mesh.M == 0 ||
        fine_mesh.M % coarse_mesh.M != 0) {
        throw DomainError("restrict: fine mesh M=" + std::to_string(fine_mesh.M) +
                          " is not a multiple of coarse mesh M=" + std::to_string(coarse_mesh.M));
    }
    if (fine.size() != fine_mesh.num_nodes()) {
        throw DomainError("restrict: field size does not match the fine mesh");
    }
    const int ratio = fine_mesh.M / coarse_mesh.M;
    const int fine_side = fine_mesh.M + 1;
    const int coarse_side = coarse_mesh.M + 1;
    NodalField out(coarse_mesh.num_nodes());
    if (coarse_mesh.dimension == 1) {
        for (int i = 0; i < coarse_side; ++i) out[i] = fine[i * ratio];
    } else {
        for (int j = 0; j < coarse_side; ++j) {
            for (int i = 0; i < coarse_side; ++i) {
                out[j * coarse_side + i] = fine[(j * ratio) * fine_side + i * ratio];
            }
        }
    }
    return out;
}

}  // namespace subdiff
