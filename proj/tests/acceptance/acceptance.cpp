// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "subdiff/anderson.hpp"
#include "subdiff/experiments.hpp"
#include "subdiff/inverse.hpp"
#include "subdiff/mlf.hpp"
#include "subdiff/solver.hpp"

using namespace subdiff;

namespace {

constexpr double kPi = std::numbers::pi;

struct Verdict {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << "[failed: " << what << "] ";
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

bool within_factor(double value, double reference, double factor) {
    return value >= reference / factor && value <= reference * factor;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

// Scalar backward-Euler CQ for d_t^a y = -lambda y, y(0) = 1, with weights
// from the series of (1 - z)^a.
double scalar_cq(double alpha, double lambda, double T, int N) {
    const std::vector<double> w = oracle::Dense1D::weights(alpha, N);
    const double s = std::pow(T / N, -alpha);
    std::vector<double> y{1.0};
    for (int n = 1; n <= N; ++n) {
        double hist = 0;
        for (int j = 1; j <= n; ++j) hist += w[j] * (y[n - j] - 1);
        y.push_back(s * (1 - hist) / (s + lambda));
    }
    return y.back();
}

NodalField sine(const Mesh& mesh) {
    return interpolate(mesh, [](double x, double) { return std::sin(kPi * x); });
}

// ------------------------------------------------------------------------ 1

Verdict mittag_leffler_sweep() {
    Verdict v;
    oracle::MLOracle oracle;
    std::vector<double> zs;
    for (int i = 0; i < 200; ++i) zs.push_back(-50.0 * i / 199);
    double worst = 0, library_time = 0;
    for (double alpha : {0.25, 0.5, 0.75, 1.0}) {
        for (double beta : {alpha, 1.0}) {
            std::vector<double> got(zs.size());
            const auto start = std::chrono::steady_clock::now();
            for (std::size_t i = 0; i < zs.size(); ++i) got[i] = mittag_leffler(alpha, beta, zs[i]);
            library_time += seconds_since(start);
            for (std::size_t i = 0; i < zs.size(); ++i) {
                const double want = oracle(alpha, beta, zs[i]);
                worst = std::max(worst, std::abs(got[i] - want) / std::abs(want));
            }
        }
    }
    v.detail << "max rel err " << worst << ", sweep " << library_time << " s ";
    v.require(worst <= 1e-8, "relative error <= 1e-8");
    v.require(library_time < 5, "sweep < 5 s");
    return v;
}

// ------------------------------------------------------------------------ 2

Verdict c_alpha_suite() {
    Verdict v;
    const CAlphaResult one = c_alpha(1);
    v.detail << "c_1 " << one.c_alpha << ", t* " << one.t_star << "; ";
    v.require(std::abs(one.c_alpha - std::exp(-1.0)) <= 1e-6, "c_1 = 1/e");
    v.require(std::abs(one.t_star - 1) <= 1e-4, "t*(1) = 1");
    double previous = 0, ratio_lo = 1e9, ratio_hi = 0;
    for (int i = 1; i <= 19; ++i) {
        const double a = 0.05 * i;
        const CAlphaResult r = c_alpha(a);
        const std::string at = " at alpha " + std::to_string(a);
        v.require(r.c_alpha <= r.upper_bound, "bound holds" + at);
        v.require(r.c_alpha / a > previous, "c/alpha increasing" + at);
        v.require(r.t_star > 0.8 && r.t_star < 1.0, "t* in (0.8, 1)" + at);
        previous = r.c_alpha / a;
        if (a >= 0.3 - 1e-12 && a <= 0.7 + 1e-12) {
            const double ratio = r.upper_bound / r.c_alpha;
            ratio_lo = std::min(ratio_lo, ratio);
            ratio_hi = std::max(ratio_hi, ratio);
        }
    }
    v.detail << "bound/c on [0.3, 0.7] in [" << ratio_lo << ", " << ratio_hi << "] ";
    v.require(ratio_lo >= 2 && ratio_hi <= 4, "ratio in [2, 4]");
    return v;
}

// ------------------------------------------------------------------------ 3

Verdict forward_orders() {
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    oracle::MLOracle oracle;
    const auto fine = make_space(1, 1000);
    const NodalField u0_fine = sine(fine->mesh());
    const NodalField zero_fine = NodalField::Zero(fine->mesh().num_nodes());
    for (double a : {0.25, 0.5, 0.75}) {
        // Time: fine mesh, exact solution E_a(-pi^2) sin(pi x).
        const NodalField exact = oracle(a, 1, -kPi * kPi) * u0_fine;
        std::vector<double> errors;
        for (int N : {25, 50, 100, 200}) {
            errors.push_back(fine->l2_norm(forward_solve(*fine, zero_fine, u0_fine, a, 1, N).terminal - exact));
        }
        v.detail << "alpha " << a << ": time orders";
        for (std::size_t i = 1; i < errors.size(); ++i) {
            const double order = std::log2(errors[i - 1] / errors[i]);
            v.detail << ' ' << order;
            v.require(order >= 0.8 && order <= 1.2, "temporal order in [0.8, 1.2]");
        }
        // Space: many time steps, reference carrying the same time
        // discretization and no spatial error.
        const int N = 1000;
        const double decay = scalar_cq(a, kPi * kPi, 1, N);
        errors.clear();
        for (int M : {25, 50, 100, 200}) {
            const auto space = make_space(1, M);
            const NodalField u0 = sine(space->mesh());
            const NodalField zero = NodalField::Zero(space->mesh().num_nodes());
            errors.push_back(space->l2_norm(forward_solve(*space, zero, u0, a, 1, N).terminal - decay * u0));
        }
        v.detail << ", space orders";
        for (std::size_t i = 1; i < errors.size(); ++i) {
            const double order = std::log2(errors[i - 1] / errors[i]);
            v.detail << ' ' << order;
            v.require(order >= 1.7 && order <= 2.3, "spatial order in [1.7, 2.3]");
        }
        v.detail << "; ";
    }
    const double elapsed = seconds_since(start);
    v.detail << elapsed << " s ";
    v.require(elapsed < 60, "runtime < 60 s");
    return v;
}

// ------------------------------------------------------------------------ 4

Verdict noiseless_tables() {
    Verdict v;
    const std::vector<std::pair<ExampleId, std::vector<double>>> rows{
        {ExampleId::Ex1d1, {3.69e-3, 5.14e-3, 1.19e-2}},
        {ExampleId::Ex1d2, {3.21e-3, 6.52e-3, 1.06e-2}},
    };
    for (const auto& [id, reference] : rows) {
        ExperimentSpec spec = ExperimentSpec::defaults(id);
        spec.epsilons = {0};
        const auto cells = run_table(spec, 0);
        v.detail << to_string(id) << ":";
        for (std::size_t i = 0; i < cells.size(); ++i) {
            v.detail << ' ' << cells[i].e_q << " (" << cells[i].stop_index << ") vs " << reference[i] << ';';
            v.require(within_factor(cells[i].e_q, reference[i], 3),
                      to_string(id) + " alpha " + std::to_string(cells[i].alpha) + " within factor 3");
            v.require(cells[i].stop_reason == StopReason::MaxIter && cells[i].stop_index == 1000,
                      "1000 iterations");
        }
        v.detail << ' ';
    }
    return v;
}

// ------------------------------------------------------------------------ 5

Verdict noisy_table_cells() {
    Verdict v;
    ExperimentSpec spec = ExperimentSpec::defaults(ExampleId::Ex1d1);
    spec.alphas = {0.5};
    const std::uint64_t first = spec.base_seed;

    auto medians = [&](double epsilon, bool accelerate) {
        spec.epsilons = {epsilon};
        spec.accelerate = accelerate;
        std::vector<double> errors, stops;
        for (std::uint64_t s = first; s < first + 5; ++s) {
            spec.base_seed = s;
            const CellResult c = run_table(spec, 1).front();
            errors.push_back(c.e_q);
            stops.push_back(c.stop_index);
        }
        return std::make_pair(median(errors), median(stops));
    };

    const auto [e1, k1] = medians(1e-2, true);
    v.detail << "eps 1e-2 accelerated: median " << e1 << " (" << k1 << ") vs 2.02e-1 (4); ";
    v.require(within_factor(e1, 2.02e-1, 3), "eps 1e-2 e_q within factor 3");
    v.require(k1 >= 2 && k1 <= 9, "eps 1e-2 stop in [2, 9]");

    const auto [e2, k2] = medians(1e-3, false);
    v.detail << "eps 1e-3 plain: median " << e2 << " (" << k2 << ") vs 4.96e-2 (496) ";
    v.require(within_factor(e2, 4.96e-2, 3), "eps 1e-3 e_q within factor 3");
    v.require(k2 >= 150 && k2 <= 1000, "eps 1e-3 stop in [150, 1000]");
    return v;
}

// ------------------------------------------------------------------------ 6

Verdict acceleration_effect() {
    Verdict v;
    ExperimentSpec spec = ExperimentSpec::defaults(ExampleId::Ex1d1);
    spec.epsilons = {1e-3};
    const auto fast = run_table(spec, 0);
    spec.accelerate = false;
    const auto slow = run_table(spec, 0);
    for (std::size_t i = 0; i < fast.size(); ++i) {
        v.detail << "alpha " << fast[i].alpha << ": " << fast[i].stop_index << " vs " << slow[i].stop_index << "; ";
        v.require(fast[i].stop_reason == StopReason::Discrepancy && slow[i].stop_reason == StopReason::Discrepancy,
                  "both runs stop by the discrepancy principle");
        v.require(5 * fast[i].stop_index <= slow[i].stop_index,
                  "accelerated <= plain / 5 at alpha " + std::to_string(fast[i].alpha));
    }
    return v;
}

// ------------------------------------------------------------------------ 7

Verdict semi_convergence() {
    Verdict v;
    ExperimentSpec spec = ExperimentSpec::defaults(ExampleId::Ex1d1);
    spec.alphas = {0.5};
    spec.epsilons = {1e-2};
    spec.accelerate = false;
    const CellResult c = run_table(spec, 1).front();
    v.require(c.stop_reason == StopReason::Discrepancy, "discrepancy stop");
    const auto& records = c.run.records;
    int increases = 0;
    for (std::size_t i = 2; i < records.size(); ++i) {
        if (records[i].r_q > records[i - 1].r_q) ++increases;
    }
    double best = 1e300;
    for (const auto& r : records) best = std::min(best, *r.e_q);
    const double stopped = *records.back().e_q;
    v.detail << "stop " << c.stop_index << ", r_q increases after k=2: " << increases
             << ", e_q stopped/min " << stopped / best << ' ';
    v.require(increases == 0, "r_q non-increasing from iteration 2");
    v.require(stopped <= 1.5 * best, "stopped e_q within factor 1.5 of the minimum");
    return v;
}

// ------------------------------------------------------------------------ 8

Verdict two_dimensional_run() {
    Verdict v;
    ExperimentSpec spec = ExperimentSpec::defaults(ExampleId::Ex2d);
    spec.alphas = {0.5};
    spec.epsilons = {1e-2};
    const auto start = std::chrono::steady_clock::now();
    const CellResult c = run_table(spec, 1).front();
    const double elapsed = seconds_since(start);
    v.detail << "M_inv " << spec.M_inv << ", N_inv " << spec.N_inv << ", T " << spec.T << ": e_q " << c.e_q
             << " (" << c.stop_index << "), " << elapsed << " s ";
    v.require(c.stop_reason == StopReason::Discrepancy, "discrepancy stop");
    v.require(c.e_q <= 5e-2, "e_q <= 5e-2");
    v.require(c.stop_index <= 4, "stop <= 4");
    v.require(elapsed < 300, "runtime < 5 min");
    return v;
}

// ------------------------------------------------------------------------ 9

Verdict property_suites() {
    Verdict v;

    std::mt19937_64 rng(17);
    std::normal_distribution<double> gauss(0, 1);
    double worst_sum = 0;
    for (int trial = 0; trial < 500; ++trial) {
        AndersonHistory h(1 + trial % 4);
        for (int i = 0; i < 6; ++i) {
            Eigen::VectorXd q(8), f(8);
            for (int j = 0; j < 8; ++j) q[j] = gauss(rng), f[j] = gauss(rng) * std::pow(10.0, -(trial % 11));
            h.push(q, f);
            worst_sum = std::max(worst_sum, std::abs(anderson_step(h, 1e-12).beta.sum() - 1));
        }
    }
    v.detail << "max |sum beta - 1| " << worst_sum << "; ";
    v.require(worst_sum <= 1e-12, "Anderson weights sum to one");

    {
        ExperimentSpec spec = ExperimentSpec::defaults(ExampleId::Ex1d1);
        spec.M_data = 200;
        spec.N_data = 200;
        spec.M_inv = 50;
        spec.N_inv = 100;
        spec.m = 0;
        spec.max_iter = 40;
        DataGenerator generator(spec);
        const SyntheticData data = generator.generate(0.5, 1e-3, spec.base_seed);
        const InversionConfig cfg = make_inversion_config(spec, generator.inversion_space(), 0.5, data);
        const NodalField zero = NodalField::Zero(data.g.size());
        const auto plain = run_inversion(cfg, zero, false, data.q_true);
        const auto accel = run_inversion(cfg, zero, true, data.q_true);
        bool identical = plain.records.size() == accel.records.size() && plain.q_final == accel.q_final;
        for (std::size_t i = 0; identical && i < plain.records.size(); ++i) {
            identical = plain.records[i].r_q == accel.records[i].r_q && *plain.records[i].e_q == *accel.records[i].e_q;
        }
        v.detail << "m = 0 traces " << (identical ? "identical" : "differ") << "; ";
        v.require(identical, "m = 0 equals plain iteration bitwise");
    }

    {
        const CQWeights w = cq_weights(1, 8, 2);
        bool ok = w.omega[0] == 1 && w.omega[1] == -1;
        for (int j = 2; j <= 8; ++j) ok = ok && w.omega[j] == 0;
        v.require(ok, "CQ weights at alpha = 1 are (1, -1, 0, ...)");
    }

    {
        const auto space = make_space(1, 200);
        const Mesh& mesh = space->mesh();
        ForwardOptions options;
        options.store_trajectory = true;
        double lowest = 0;
        for (double a : {0.25, 0.5, 0.75, 1.0}) {
            for (double mu : {0.1, 1.0, 10.0}) {
                const NodalField u0 = interpolate(mesh, [mu](double x, double) { return mu * x * (1 - x); });
                const NodalField q = interpolate(mesh, [](double x, double) { return std::exp(x) * std::sin(2 * kPi * x); });
                const auto r = forward_solve(*space, q, u0, a, 1, 200, options);
                for (const auto& u : r.trajectory) lowest = std::min(lowest, u.minCoeff() / mu);
            }
        }
        v.detail << "min scaled u " << lowest << "; ";
        v.require(lowest >= -1e-10, "nonnegative initial data stay nonnegative");
    }

    double worst_cd = 0;
    for (double a : {0.5, 0.75}) {
        for (double t : {0.1, 1.0}) worst_cd = std::max(worst_cd, christoffel_darboux_residual(a, t));
    }
    v.detail << "max Christoffel-Darboux residual " << worst_cd << ' ';
    v.require(worst_cd <= 1e-6, "Christoffel-Darboux residual <= 1e-6");
    return v;
}

}  // namespace

int main() {
    const std::vector<std::function<Verdict()>> criteria{
        mittag_leffler_sweep, c_alpha_suite,       forward_orders,      noiseless_tables,  noisy_table_cells,
        acceleration_effect,  semi_convergence,    two_dimensional_run, property_suites,
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        try {
            v = criteria[i]();
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail << "exception: " << e.what();
        }
        if (!v.pass) ++failures;
        std::printf("criterion %zu: %s  %s\n", i + 1, v.pass ? "PASS" : "FAIL", v.detail.str().c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
