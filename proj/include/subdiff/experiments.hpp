#pragma once

// Reproduction harness: benchmark problems, synthetic noisy terminal data
// generated on a finer grid, table runs and figure data.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "subdiff/inverse.hpp"

namespace subdiff {

enum class ExampleId { Ex1d1, Ex1d2, Ex2d };

std::string to_string(ExampleId id);
/// Accepts "ex1d1", "ex1d2", "ex2d".
ExampleId parse_example(const std::string& name);
int example_dimension(ExampleId id);

struct ExampleFields {
    NodalField u0;      ///< nodal interpolant; boundary values not yet zeroed
    NodalField q_true;
};

/// ex1d1: u0 = sin(pi x) + x(1-x)/100,  q = e^x sin(2 pi x)
/// ex1d2: u0 = 1 + 1.5 sin(2 pi x),     q = min(x, 1-x)
/// ex2d:  u0 = sin^2(pi y),             q = sin(pi x) y (1-y)
ExampleFields example_data(ExampleId id, const Mesh& mesh);

struct ExperimentSpec {
    ExampleId example = ExampleId::Ex1d1;
    std::vector<double> alphas{0.25, 0.5, 0.75};
    std::vector<double> epsilons{0, 1e-3, 5e-3, 1e-2, 5e-2};
    double T = 1;
    int M_data = 1000;
    int N_data = 1000;
    int M_inv = 200;
    int N_inv = 500;
    double lambda = 1000;
    int m = 2;
    double tau = 1.01;
    std::uint64_t base_seed = 20200101;
    bool accelerate = true;
    int max_iter = 1000;

    void validate() const;
    /// Grid sizes used for each example: full 1D scale, 2D reduced desk scale
    /// (M_data=100, N_data=500, M_inv=50, N_inv=200, lambda=100, max_iter=200).
    static ExperimentSpec defaults(ExampleId id);
};

/// Per-cell noise stream seed derived from (base_seed, example, alpha, epsilon).
std::uint64_t cell_seed(std::uint64_t base_seed, ExampleId example, double alpha, double epsilon);

struct SyntheticData {
    NodalField g;            ///< noisy terminal data on the inversion mesh
    NodalField u_exact;      ///< fine-grid terminal field restricted to the inversion mesh
    NodalField q_true;       ///< exact potential interpolated on the inversion mesh
    NodalField u0;           ///< initial datum on the inversion mesh (projected, zero on the boundary)
    double delta = 0;        ///< ||g - u_exact||_{L2}
    std::uint64_t seed = 0;  ///< derived noise seed
};

/// Generates terminal data for one (alpha, epsilon) cell. Initial data enter
/// both grids through FemSpace::project_dirichlet. The exact terminal
/// field is computed once per alpha on the data grid and cached.
class DataGenerator {
public:
    explicit DataGenerator(ExperimentSpec spec);

    const ExperimentSpec& spec() const { return spec_; }
    std::shared_ptr<const FemSpace> inversion_space() const { return inversion_space_; }

    /// Fine-grid solve restricted to the inversion mesh (cached per alpha).
    const NodalField& exact_terminal(double alpha);
    /// g = u_exact + epsilon sup|u_exact| xi on interior nodes, xi ~ N(0, 1).
    SyntheticData generate(double alpha, double epsilon, std::uint64_t base_seed);

private:
    ExperimentSpec spec_;
    std::shared_ptr<const FemSpace> data_space_;
    std::shared_ptr<const FemSpace> inversion_space_;
    ExampleFields data_fields_;
    ExampleFields inversion_fields_;
    std::vector<std::pair<double, NodalField>> cache_;
};

SyntheticData generate_data(const ExperimentSpec& spec, double alpha, double epsilon,
                            std::uint64_t base_seed);

/// Inversion configuration of one cell on the inversion grid.
InversionConfig make_inversion_config(const ExperimentSpec& spec,
                                      std::shared_ptr<const FemSpace> space, double alpha,
                                      const SyntheticData& data);

struct CellResult {
    double alpha = 0;
    double epsilon = 0;
    std::uint64_t seed = 0;
    double e_q = 0;
    double r_q = 0;
    int stop_index = 0;
    StopReason stop_reason = StopReason::MaxIter;
    double wall_time = 0;
    InversionResult run;  ///< full iteration trace
};

/// Runs every (alpha, epsilon) cell, alpha-major. Cells are independent and
/// are distributed over `threads` workers (0 = hardware concurrency).
std::vector<CellResult> run_table(const ExperimentSpec& spec, int threads = 1);

/// One cell of a table, reusing a generator for the fine-grid solves.
CellResult run_cell(DataGenerator& generator, double alpha, double epsilon, std::uint64_t base_seed);

/// Header: example,alpha,epsilon,seed,e_q,r_q,stop_index,stop_reason,wall_time_s
void write_table_csv(std::ostream& os, ExampleId example, const std::vector<CellResult>& cells);
/// Header: k,r_q,e_q,stop  (stop = 1 on the stopping iterate)
void write_trace_csv(std::ostream& os, const InversionResult& run);

/// Rows (t, alpha, value) with value = t E_{a,a}(-t) / a on t = 0, dt, ..., t_max.
void write_fig1a_csv(std::ostream& os, const std::vector<double>& alphas, double t_max = 10,
                     double dt = 0.05);
/// Rows (alpha, c_over_alpha, upper_bound) with upper_bound = a pi / (a pi + sin a pi).
void write_fig1b_csv(std::ostream& os, const std::vector<double>& alphas);

}  // namespace subdiff
