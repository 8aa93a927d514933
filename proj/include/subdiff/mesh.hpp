#pragma once

// Uniform P1 finite elements on [0,1]^d (d = 1, 2) with zero Dirichlet data.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace subdiff {

/// Nodal coefficient vector of a P1 function, one entry per mesh node.
using NodalField = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

struct Mesh {
    int dimension = 1;
    int M = 0;  ///< subdivisions per side
    double h = 0;
    /// dimension x num_nodes, lexicographic (x fastest).
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic> coords;
    /// (dimension + 1) x num_elements node indices.
    Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic> elements;
    std::vector<int> interior;        ///< node indices of interior nodes, ascending
    std::vector<int> interior_index;  ///< node -> position in `interior`, or -1 on the boundary

    int num_nodes() const { return static_cast<int>(coords.cols()); }
    int num_elements() const { return static_cast<int>(elements.cols()); }
    int num_interior() const { return static_cast<int>(interior.size()); }
    bool is_boundary(int node) const { return interior_index[node] < 0; }
    /// Lebesgue measure of element e.
    double element_measure(int e) const;

    /// Interior entries of a nodal field.
    Eigen::VectorXd to_interior(const NodalField& f) const;
    /// Nodal field with the given interior values and zero boundary values.
    NodalField from_interior(const Eigen::VectorXd& v) const;
    /// Copy of f with boundary entries set to zero.
    NodalField zero_boundary(NodalField f) const;
};

Mesh build_mesh(int dimension, int M);

enum class OperatorKind { Stiffness, Mass, WeightedMass };

/// Assembled P1 operator. `full` acts on all nodes; `interior` is the block
/// left after eliminating the Dirichlet nodes.
struct SparseOperator {
    OperatorKind kind = OperatorKind::Mass;
    bool symmetric = true;
    SparseMatrix full;
    SparseMatrix interior;
};

/// Stiffness (-Laplacian) or consistent mass matrix.
SparseOperator assemble(const Mesh& mesh, OperatorKind kind);
/// Mass matrix weighted by the piecewise-linear interpolant of q.
SparseOperator assemble_weighted_mass(const Mesh& mesh, const NodalField& q);

/// Mesh plus its stiffness and mass operators and their factorizations.
/// Immutable after construction; share through std::shared_ptr<const FemSpace>.
class FemSpace {
public:
    explicit FemSpace(Mesh mesh);

    const Mesh& mesh() const { return mesh_; }
    const SparseOperator& stiffness() const { return stiffness_; }
    const SparseOperator& mass() const { return mass_; }

    /// Weak-form A^{-1}: solves S w = M rhs on interior nodes; w vanishes on the boundary.
    NodalField poisson_solve(const NodalField& rhs) const;
    /// Solves M_II v = b for an interior right-hand side.
    Eigen::VectorXd mass_solve(const Eigen::VectorXd& b) const;

    /// L2 projection of the P1 function f onto the functions vanishing on the
    /// boundary: (P f, v) = (f, v) for every interior basis function v.
    NodalField project_dirichlet(const NodalField& f) const;

    /// sqrt(f^T M f) with the full (boundary-inclusive) mass matrix.
    double l2_norm(const NodalField& f) const;

private:
    Mesh mesh_;
    SparseOperator stiffness_;
    SparseOperator mass_;
    Eigen::SimplicialLLT<SparseMatrix> stiffness_factor_;
    Eigen::SimplicialLLT<SparseMatrix> mass_factor_;
};

std::shared_ptr<const FemSpace> make_space(int dimension, int M);

/// Solves S w = M rhs for the given stiffness operator (factorizes on each call).
NodalField poisson_solve(const SparseOperator& stiffness, const SparseOperator& mass,
                         const Mesh& mesh, const NodalField& rhs);

double l2_norm(const SparseOperator& mass, const NodalField& f);
double sup_norm(const NodalField& f);

/// Samples a fine-mesh field at the nodes shared with a coarser mesh.
NodalField restrict_to(const NodalField& fine, const Mesh& fine_mesh, const Mesh& coarse_mesh);

/// Nodal interpolant of a callable f(x) (1D) or f(x, y) (2D).
template <typename F>
NodalField interpolate(const Mesh& mesh, F&& f) {
    NodalField out(mesh.num_nodes());
    for (int i = 0; i < mesh.num_nodes(); ++i) {
        if (mesh.dimension == 1) {
            out[i] = f(mesh.coords(0, i), 0.0);
        } else {
            out[i] = f(mesh.coords(0, i), mesh.coords(1, i));
        }
    }
    return out;
}

}  // namespace subdiff
