#pragma once

// Recovery of the potential q from terminal data g = u(q)(T) by the
// preconditioned fixed-point map F(q) = q - lambda A^{-1}(u(q)(T) - g),
// A = -Laplace with zero Dirichlet data,
// optionally with Anderson acceleration, stopped by the discrepancy principle.

#include <optional>
#include <string>
#include <vector>

#include "subdiff/solver.hpp"

namespace subdiff {

struct InversionConfig {
    double lambda = 1000;
    int m = 2;  ///< Anderson memory; 0 means plain fixed-point iteration
    int max_iter = 1000;
    double tau = 1.01;    ///< discrepancy factor
    double delta = 0;     ///< noise level ||g - u(q_true)(T)||_{L2}
    double svd_cutoff = 1e-12;
    NodalField g;
    ForwardSetup forward;

    void validate() const;
    /// svd_cutoff, raised to at least 1e-8 for alpha = 1 and T >= 1.
    double effective_svd_cutoff() const;
};

enum class StopReason { Discrepancy, MaxIter, SolverFailure };
std::string to_string(StopReason reason);

struct IterationRecord {
    int k = 0;
    double r_q = 0;
    std::optional<double> e_q;
    bool degenerate_anderson = false;
};

struct InversionResult {
    NodalField q_final;
    std::vector<IterationRecord> records;
    int stop_index = 0;
    StopReason stop_reason = StopReason::MaxIter;
    std::string failure_message;
};

/// One forward solve at q, with both the data residual and the image F(q).
struct MapEvaluation {
    NodalField terminal;  ///< u(q)(T)
    NodalField image;     ///< F(q)
    double r_q = 0;       ///< ||u(q)(T) - g||_{L2}
};

MapEvaluation evaluate_fixed_point_map(const NodalField& q, const InversionConfig& cfg);

/// q - lambda A^{-1}(u(q)(T) - g). The increment vanishes on the boundary.
NodalField fixed_point_map(const NodalField& q, const InversionConfig& cfg);

enum class IterationKind { FixedPoint, Isakov };

struct RunOptions {
    bool accelerate = true;
    IterationKind kind = IterationKind::FixedPoint;
    double g_min = 1e-8;  ///< Isakov divisor guard
};

/// Iterates from initial_guess. After each new iterate q^k (k >= 1) records
/// r_q = ||u(q^k)(T) - g|| and stops at the first k with r_q <= tau * delta.
/// With delta = 0 the run always ends at max_iter.
InversionResult run_inversion(const InversionConfig& cfg, const NodalField& initial_guess,
                              bool accelerate, const std::optional<NodalField>& oracle_q = {});
InversionResult run_inversion(const InversionConfig& cfg, const NodalField& initial_guess,
                              const RunOptions& options,
                              const std::optional<NodalField>& oracle_q = {});

/// (d_t^a u(q)(T) - Laplace u(q)(T)) / g at interior nodes; boundary values of q
/// are kept. Throws SmallDivisorError listing nodes where |g| < g_min.
NodalField isakov_step(const NodalField& q, const InversionConfig& cfg, double g_min);

}  // namespace subdiff
