#pragma once

#include <Eigen/Dense>
#include <deque>

namespace subdiff {

/// Last m_k + 1 iterates q^i with their images F(q^i) and residuals
/// r_i = F(q^i) - q^i, oldest first. Capacity m + 1; evicts oldest-first.
class AndersonHistory {
public:
    explicit AndersonHistory(int memory);

    void push(const Eigen::VectorXd& iterate, const Eigen::VectorXd& image);
    void clear() { entries_.clear(); }

    int memory() const { return memory_; }
    int size() const { return static_cast<int>(entries_.size()); }
    const Eigen::VectorXd& iterate(int i) const { return entries_[i].iterate; }
    const Eigen::VectorXd& image(int i) const { return entries_[i].image; }
    const Eigen::VectorXd& residual(int i) const { return entries_[i].residual; }

private:
    struct Entry {
        Eigen::VectorXd iterate, image, residual;
    };
    int memory_;
    std::deque<Entry> entries_;
};

struct AndersonStep {
    Eigen::VectorXd next;  ///< sum_i beta_i F(q^i)
    Eigen::VectorXd beta;  ///< oldest first; sums to one
    int rank = 0;          ///< singular values kept in the least-squares solve
    bool degenerate = false;  ///< fell back to the plain image F(q^k)
};

/// Minimizes ||R beta|| subject to sum(beta) = 1 over the stored residuals.
/// The constraint is eliminated through beta_0 = 1 - sum_{i>=1} beta_i, giving an
/// unconstrained problem in residual differences r_i - r_0, solved by SVD with
/// singular values below svd_cutoff * sigma_max discarded.
AndersonStep anderson_step(const AndersonHistory& history, double svd_cutoff);

}  // namespace subdiff
