#include <doctest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <random>

#include "subdiff/anderson.hpp"

using namespace subdiff;
using Eigen::VectorXd;

namespace {

using mp = boost::multiprecision::cpp_bin_float_50;
using MatrixMp = Eigen::Matrix<mp, Eigen::Dynamic, Eigen::Dynamic>;
using VectorMp = Eigen::Matrix<mp, Eigen::Dynamic, 1>;

// argmin ||R beta|| subject to sum(beta) = 1 through the KKT system
// [R^T R, 1; 1^T, 0] [beta; mu] = [0; 1], solved in 50-digit arithmetic.
VectorXd constrained_ls(const std::vector<VectorXd>& residuals) {
    const int k = static_cast<int>(residuals.size());
    const int n = static_cast<int>(residuals[0].size());
    MatrixMp R(n, k);
    for (int j = 0; j < k; ++j) {
        for (int i = 0; i < n; ++i) R(i, j) = residuals[j][i];
    }
    MatrixMp K = MatrixMp::Zero(k + 1, k + 1);
    K.topLeftCorner(k, k) = R.transpose() * R;
    K.block(0, k, k, 1).setOnes();
    K.block(k, 0, 1, k).setOnes();
    VectorMp rhs = VectorMp::Zero(k + 1);
    rhs[k] = 1;
    const VectorMp sol = K.fullPivLu().solve(rhs);
    VectorXd beta(k);
    for (int j = 0; j < k; ++j) beta[j] = static_cast<double>(sol[j]);
    return beta;
}

}  // namespace

TEST_CASE("history keeps the last m + 1 entries, oldest first") {
    AndersonHistory h(2);
    for (int i = 0; i < 5; ++i) {
        h.push(VectorXd::Constant(2, i), VectorXd::Constant(2, 10 + i));
        CHECK(h.size() == std::min(i + 1, 3));
    }
    CHECK(h.iterate(0)[0] == 2);
    CHECK(h.iterate(2)[0] == 4);
    CHECK(h.residual(1)[0] == 10);
    CHECK(h.image(2)[0] == 14);
    AndersonHistory zero(0);
    zero.push(VectorXd::Zero(2), VectorXd::Ones(2));
    zero.push(VectorXd::Ones(2), VectorXd::Ones(2));
    CHECK(zero.size() == 1);
}

TEST_CASE("single entry returns the plain image") {
    AndersonHistory h(3);
    h.push(VectorXd::Constant(3, 1), VectorXd::Constant(3, 2.5));
    const AndersonStep s = anderson_step(h, 1e-12);
    CHECK(s.beta.size() == 1);
    CHECK(s.beta[0] == 1);
    CHECK(s.next == h.image(0));
    CHECK_FALSE(s.degenerate);
}

TEST_CASE("identical residual columns reduce to the memoryless answer") {
    AndersonHistory h(2);
    const VectorXd q = VectorXd::LinSpaced(4, 0, 1);
    const VectorXd f = q + VectorXd::Constant(4, 0.1);
    h.push(q, f);
    h.push(q, f);
    const AndersonStep s = anderson_step(h, 1e-12);
    CHECK((s.next - f).norm() == 0);
    CHECK(std::abs(s.beta.sum() - 1) <= 1e-12);
    CHECK(s.rank == 0);
    CHECK(s.degenerate);
}

TEST_CASE("rank-deficient history drops the null direction") {
    // Three entries whose residual differences are parallel.
    AndersonHistory h(2);
    const VectorXd d = (VectorXd(3) << 1, -2, 0.5).finished();
    for (int i = 0; i < 3; ++i) {
        const VectorXd q = VectorXd::Constant(3, i);
        h.push(q, q + (1 + i) * d);
    }
    const AndersonStep s = anderson_step(h, 1e-12);
    CHECK(s.rank == 1);
    CHECK(std::abs(s.beta.sum() - 1) <= 1e-12);
    VectorXd combined = VectorXd::Zero(3);
    for (int i = 0; i < 3; ++i) combined += s.beta[i] * h.residual(i);
    CHECK(combined.norm() < 1e-12);
}

TEST_CASE("affine map iterates match the constrained least-squares oracle") {
    const Eigen::Matrix3d B = (Eigen::Matrix3d() << 0.5, 0.1, -0.05, 0.1, 0.3, 0.08, -0.05, 0.08, -0.4).finished();
    const Eigen::Vector3d c(1, -2, 0.5);
    auto F = [&](const VectorXd& q) -> VectorXd { return B * q + c; };
    for (int m : {1, 2}) {
        AndersonHistory h(m);
        std::vector<VectorXd> qs, rs, images;
        VectorXd q = VectorXd::Zero(3);
        for (int k = 0; k < 3; ++k) {
            const VectorXd image = F(q);
            h.push(q, image);
            qs.push_back(q);
            images.push_back(image);
            rs.push_back(image - q);
            const AndersonStep s = anderson_step(h, 1e-12);

            const int mk = std::min(m, k);
            std::vector<VectorXd> window(rs.end() - mk - 1, rs.end());
            const VectorXd beta = constrained_ls(window);
            VectorXd want = VectorXd::Zero(3);
            for (int i = 0; i <= mk; ++i) want += beta[i] * images[images.size() - mk - 1 + i];
            CAPTURE(m);
            CAPTURE(k);
            CHECK((s.beta - beta).norm() < 1e-10);
            CHECK((s.next - want).norm() < 1e-10);
            CHECK(std::abs(s.beta.sum() - 1) <= 1e-12);
            q = s.next;
        }
    }
}

TEST_CASE("weights always sum to one") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n(0, 1);
    for (int trial = 0; trial < 200; ++trial) {
        AndersonHistory h(3);
        for (int i = 0; i < 4; ++i) {
            VectorXd q(6), f(6);
            for (int j = 0; j < 6; ++j) q[j] = n(rng), f[j] = n(rng) * std::pow(10.0, -trial % 9);
            h.push(q, f);
            const AndersonStep s = anderson_step(h, 1e-12);
            CHECK(std::abs(s.beta.sum() - 1) <= 1e-12);
        }
    }
}
