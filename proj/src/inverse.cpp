#include "subdiff/inverse.hpp"

#include <algorithm>
#include <cmath>

#include "subdiff/anderson.hpp"
#include "subdiff/errors.hpp"

namespace subdiff {

void InversionConfig::validate() const {
    if (!(lambda > 0)) throw DomainError("InversionConfig: lambda must be positive");
    if (m < 0) throw DomainError("InversionConfig: m must be nonnegative");
    if (max_iter < 1) throw DomainError("InversionConfig: max_iter must be at least 1");
    if (!(tau > 1)) throw DomainError("InversionConfig: tau must exceed 1");
    if (!(delta >= 0)) throw DomainError("InversionConfig: delta must be nonnegative");
    if (!(svd_cutoff >= 0 && svd_cutoff < 1)) {
        throw DomainError("InversionConfig: svd_cutoff must lie in [0, 1)");
    }
    forward.validate();
    if (g.size() != forward.space->mesh().num_nodes()) {
        throw DomainError("InversionConfig: data g does not match the inversion mesh");
    }
}

double InversionConfig::effective_svd_cutoff() const {
    if (forward.alpha == 1 && forward.T >= 1) return std::max(svd_cutoff, 1e-8);
    return svd_cutoff;
}

std::string to_string(StopReason reason) {
    switch (reason) {
        case StopReason::Discrepancy: return "discrepancy";
        case StopReason::MaxIter: return "max_iter";
        case StopReason::SolverFailure: return "solver_failure";
    }
    return "unknown";
}

MapEvaluation evaluate_fixed_point_map(const NodalField& q, const InversionConfig& cfg) {
    const FemSpace& space = *cfg.forward.space;
    if (q.size() != space.mesh().num_nodes()) {
        throw DomainError("fixed_point_map: q does not match the inversion mesh");
    }
    MapEvaluation out;
    out.terminal = forward_solve(cfg.forward, q).terminal;
    const NodalField misfit = out.terminal - cfg.g;
    out.r_q = space.l2_norm(misfit);
    // With du/dt^a = Lap u + q u, raising q raises u(T), so the misfit is
    // subtracted to move downhill.
    out.image = q - cfg.lambda * space.poisson_solve(misfit);
    return out;
}

NodalField fixed_point_map(const NodalField& q, const InversionConfig& cfg) {
    return evaluate_fixed_point_map(q, cfg).image;
}

namespace {

MapEvaluation evaluate_isakov(const NodalField& q, const InversionConfig& cfg, double g_min) {
    const FemSpace& space = *cfg.forward.space;
    const Mesh& mesh = space.mesh();
    if (q.size() != mesh.num_nodes()) throw DomainError("isakov_step: q does not match the mesh");

    std::vector<int> small;
    for (int node : mesh.interior) {
        if (!(std::abs(cfg.g[node]) >= g_min)) small.push_back(node);
    }
    if (!small.empty()) {
        std::string list;
        for (std::size_t i = 0; i < small.size() && i < 10; ++i) {
            list += (i ? ", " : "") + std::to_string(small[i]);
        }
        if (small.size() > 10) list += ", ...";
        throw SmallDivisorError("isakov_step: |g| < g_min at " + std::to_string(small.size()) +
                                    " interior node(s): " + list,
                                std::move(small));
    }

    ForwardOptions options;
    options.caputo_terminal = true;
    options.laplacian_terminal = true;
    auto solved = forward_solve(cfg.forward, q, options);

    MapEvaluation out;
    out.terminal = std::move(solved.terminal);
    out.r_q = space.l2_norm(out.terminal - cfg.g);
    out.image = q;
    for (int node : mesh.interior) {
        out.image[node] = ((*solved.caputo_terminal)[node] - (*solved.laplacian_terminal)[node]) /
                          cfg.g[node];
    }
    return out;
}

}  // namespace

NodalField isakov_step(const NodalField& q, const InversionConfig& cfg, double g_min) {
    if (!(g_min > 0)) throw DomainError("isakov_step: g_min must be positive");
    return evaluate_isakov(q, cfg, g_min).image;
}

InversionResult run_inversion(const InversionConfig& cfg, const NodalField& initial_guess,
                              bool accelerate, const std::optional<NodalField>& oracle_q) {
    RunOptions options;
    options.accelerate = accelerate;
    return run_inversion(cfg, initial_guess, options, oracle_q);
}

InversionResult run_inversion(const InversionConfig& cfg, const NodalField& initial_guess,
                              const RunOptions& options, const std::optional<NodalField>& oracle_q) {
    cfg.validate();
    const FemSpace& space = *cfg.forward.space;
    if (initial_guess.size() != space.mesh().num_nodes()) {
        throw DomainError("run_inversion: initial guess does not match the inversion mesh");
    }
    if (oracle_q && oracle_q->size() != space.mesh().num_nodes()) {
        throw DomainError("run_inversion: reference potential does not match the inversion mesh");
    }
    auto evaluate = [&](const NodalField& q) {
        if (options.kind == IterationKind::Isakov) return evaluate_isakov(q, cfg, options.g_min);
        return evaluate_fixed_point_map(q, cfg);
    };

    InversionResult result;
    result.q_final = initial_guess;
    MapEvaluation current;
    try {
        current = evaluate(initial_guess);
    } catch (const NumericalError& e) {
        result.stop_reason = StopReason::SolverFailure;
        result.failure_message = e.what();
        return result;
    }

    const double cutoff = cfg.effective_svd_cutoff();
    const double threshold = cfg.tau * cfg.delta;
    AndersonHistory history(options.accelerate ? cfg.m : 0);
    NodalField q = initial_guess;
    result.records.reserve(cfg.max_iter);

    for (int k = 0; k < cfg.max_iter; ++k) {
        history.push(q, current.image);
        const AndersonStep step = anderson_step(history, cutoff);
        NodalField next = step.next;
        try {
            current = evaluate(next);
        } catch (const NumericalError& e) {
            result.stop_reason = StopReason::SolverFailure;
            result.failure_message = e.what();
            result.stop_index = k;
            result.q_final = q;
            return result;
        }
        q = std::move(next);

        IterationRecord record;
        record.k = k + 1;
        record.r_q = current.r_q;
        record.degenerate_anderson = step.degenerate;
        if (oracle_q) record.e_q = space.l2_norm(q - *oracle_q);
        result.records.push_back(record);

        if (cfg.delta > 0 && current.r_q <= threshold) {
            result.stop_reason = StopReason::Discrepancy;
            result.stop_index = k + 1;
            result.q_final = q;
            return result;
        }
    }
    result.stop_reason = StopReason::MaxIter;
    result.stop_index = cfg.max_iter;
    result.q_final = q;
    return result;
}

}  // namespace subdiff
