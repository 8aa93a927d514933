#include "subdiff/anderson.hpp"

#include "subdiff/errors.hpp"

namespace subdiff {

AndersonHistory::AndersonHistory(int memory) : memory_(memory) {
    if (memory < 0) throw DomainError("AndersonHistory: memory must be nonnegative");
}

void AndersonHistory::push(const Eigen::VectorXd& iterate, const Eigen::VectorXd& image) {
    if (!entries_.empty() && entries_.front().iterate.size() != iterate.size()) {
        throw DomainError("AndersonHistory: vector size changed");
    }
    entries_.push_back({iterate, image, image - iterate});
    while (static_cast<int>(entries_.size()) > memory_ + 1) entries_.pop_front();
}

AndersonStep anderson_step(const AndersonHistory& history, double svd_cutoff) {
    const int count = history.size();
    if (count == 0) throw DomainError("anderson_step: empty history");
    AndersonStep step;
    const int latest = count - 1;
    if (count == 1) {
        step.next = history.image(0);
        step.beta = Eigen::VectorXd::Ones(1);
        return step;
    }

    const Eigen::VectorXd& base = history.residual(0);
    Eigen::MatrixXd differences(base.size(), count - 1);
    for (int i = 1; i < count; ++i) differences.col(i - 1) = history.residual(i) - base;

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(differences, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sigma = svd.singularValues();
    const double sigma_max = sigma.size() ? sigma[0] : 0.0;
    if (!(sigma_max > 0)) {
        // All residual differences vanish; nothing to extrapolate from.
        step.next = history.image(latest);
        step.beta = Eigen::VectorXd::Zero(count);
        step.beta[latest] = 1;
        step.degenerate = history.residual(latest).squaredNorm() > 0;
        return step;
    }

    // gamma = argmin || base + D gamma ||  (pseudo-inverse with relative cutoff)
    const Eigen::VectorXd projected = svd.matrixU().transpose() * base;
    Eigen::VectorXd scaled = Eigen::VectorXd::Zero(sigma.size());
    for (int i = 0; i < sigma.size(); ++i) {
        if (sigma[i] > svd_cutoff * sigma_max) {
            scaled[i] = -projected[i] / sigma[i];
            ++step.rank;
        }
    }
    const Eigen::VectorXd gamma = svd.matrixV() * scaled;

    step.beta.resize(count);
    step.beta.tail(count - 1) = gamma;
    step.beta[0] = 1 - gamma.sum();

    step.next = step.beta[0] * history.image(0);
    for (int i = 1; i < count; ++i) step.next += step.beta[i] * history.image(i);
    return step;
}

}  // namespace subdiff
