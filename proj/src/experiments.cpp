#include "subdiff/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <thread>

#include "subdiff/csv.hpp"
#include "subdiff/errors.hpp"

namespace subdiff {

namespace {

constexpr double kPi = std::numbers::pi;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::string to_string(ExampleId id) {
    switch (id) {
        case ExampleId::Ex1d1: return "ex1d1";
        case ExampleId::Ex1d2: return "ex1d2";
        case ExampleId::Ex2d: return "ex2d";
    }
    return "unknown";
}

ExampleId parse_example(const std::string& name) {
    if (name == "ex1d1") return ExampleId::Ex1d1;
    if (name == "ex1d2") return ExampleId::Ex1d2;
    if (name == "ex2d") return ExampleId::Ex2d;
    throw DomainError("unknown example '" + name + "' (expected ex1d1, ex1d2 or ex2d)");
}

int example_dimension(ExampleId id) { return id == ExampleId::Ex2d ? 2 : 1; }

ExampleFields example_data(ExampleId id, const Mesh& mesh) {
    if (mesh.dimension != example_dimension(id)) {
        throw DomainError("example_data: " + to_string(id) + " needs a " +
                          std::to_string(example_dimension(id)) + "D mesh");
    }
    ExampleFields out;
    switch (id) {
        case ExampleId::Ex1d1:
            out.u0 = interpolate(mesh, [](double x, double) {
                return std::sin(kPi * x) + x * (1 - x) / 100;
            });
            out.q_true = interpolate(mesh, [](double x, double) {
                return std::exp(x) * std::sin(2 * kPi * x);
            });
            break;
        case ExampleId::Ex1d2:
            out.u0 = interpolate(mesh, [](double x, double) { return 1 + 1.5 * std::sin(2 * kPi * x); });
            out.q_true = interpolate(mesh, [](double x, double) { return std::min(x, 1 - x); });
            break;
        case ExampleId::Ex2d:
            out.u0 = interpolate(mesh, [](double, double y) {
                const double s = std::sin(kPi * y);
                return s * s;
            });
            out.q_true = interpolate(mesh, [](double x, double y) {
                return std::sin(kPi * x) * y * (1 - y);
            });
            break;
    }
    return out;
}

void ExperimentSpec::validate() const {
    if (alphas.empty()) throw DomainError("ExperimentSpec: alphas is empty");
    for (double a : alphas) {
        if (!(a > 0 && a <= 1)) throw DomainError("ExperimentSpec: alpha outside (0, 1]");
    }
    for (double e : epsilons) {
        if (!(e >= 0)) throw DomainError("ExperimentSpec: epsilons must be nonnegative");
    }
    if (!(T > 0)) throw DomainError("ExperimentSpec: T must be positive");
    if (M_data < 2 || N_data < 2 || M_inv < 2 || N_inv < 2) {
        throw DomainError("ExperimentSpec: grid sizes must be at least 2");
    }
    if (M_data % M_inv != 0) throw DomainError("ExperimentSpec: M_data must be a multiple of M_inv");
    if (!(lambda > 0)) throw DomainError("ExperimentSpec: lambda must be positive");
    if (m < 0) throw DomainError("ExperimentSpec: m must be nonnegative");
    if (!(tau > 1)) throw DomainError("ExperimentSpec: tau must exceed 1");
    if (max_iter < 1) throw DomainError("ExperimentSpec: max_iter must be at least 1");
}

ExperimentSpec ExperimentSpec::defaults(ExampleId id) {
    ExperimentSpec spec;
    spec.example = id;
    if (id == ExampleId::Ex2d) {
        spec.epsilons = {0, 1e-3, 5e-3, 1e-2, 3e-2};
        spec.T = 0.1;
        spec.M_data = 100;
        spec.N_data = 500;
        spec.M_inv = 50;
        spec.N_inv = 200;
        spec.lambda = 100;
        spec.max_iter = 200;
    }
    return spec;
}

std::uint64_t cell_seed(std::uint64_t base_seed, ExampleId example, double alpha, double epsilon) {
    std::uint64_t h = splitmix64(base_seed);
    h = splitmix64(h ^ static_cast<std::uint64_t>(example));
    h = splitmix64(h ^ std::bit_cast<std::uint64_t>(alpha));
    h = splitmix64(h ^ std::bit_cast<std::uint64_t>(epsilon));
    return h;
}

DataGenerator::DataGenerator(ExperimentSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    const int dim = example_dimension(spec_.example);
    data_space_ = make_space(dim, spec_.M_data);
    inversion_space_ = make_space(dim, spec_.M_inv);
    data_fields_ = example_data(spec_.example, data_space_->mesh());
    inversion_fields_ = example_data(spec_.example, inversion_space_->mesh());
    data_fields_.u0 = data_space_->project_dirichlet(data_fields_.u0);
    inversion_fields_.u0 = inversion_space_->project_dirichlet(inversion_fields_.u0);
}

const NodalField& DataGenerator::exact_terminal(double alpha) {
    for (const auto& [a, field] : cache_) {
        if (a == alpha) return field;
    }
    const auto fine = forward_solve(*data_space_, data_fields_.q_true, data_fields_.u0, alpha,
                                    spec_.T, spec_.N_data);
    cache_.emplace_back(alpha, restrict_to(fine.terminal, data_space_->mesh(),
                                           inversion_space_->mesh()));
    return cache_.back().second;
}

SyntheticData DataGenerator::generate(double alpha, double epsilon, std::uint64_t base_seed) {
    if (!(epsilon >= 0)) throw DomainError("generate_data: epsilon must be nonnegative");
    const Mesh& mesh = inversion_space_->mesh();
    SyntheticData out;
    out.u_exact = exact_terminal(alpha);
    out.q_true = inversion_fields_.q_true;
    out.u0 = inversion_fields_.u0;
    out.seed = cell_seed(base_seed, spec_.example, alpha, epsilon);
    out.g = out.u_exact;
    const double amplitude = epsilon * sup_norm(out.u_exact);
    std::mt19937_64 engine(out.seed);
    std::normal_distribution<double> gaussian(0.0, 1.0);
    for (int node : mesh.interior) out.g[node] += amplitude * gaussian(engine);
    out.delta = inversion_space_->l2_norm(out.g - out.u_exact);
    return out;
}

SyntheticData generate_data(const ExperimentSpec& spec, double alpha, double epsilon,
                            std::uint64_t base_seed) {
    DataGenerator generator(spec);
    return generator.generate(alpha, epsilon, base_seed);
}

InversionConfig make_inversion_config(const ExperimentSpec& spec,
                                      std::shared_ptr<const FemSpace> space, double alpha,
                                      const SyntheticData& data) {
    InversionConfig cfg;
    cfg.lambda = spec.lambda;
    cfg.m = spec.m;
    cfg.max_iter = spec.max_iter;
    cfg.tau = spec.tau;
    cfg.delta = data.delta;
    cfg.g = data.g;
    cfg.forward.space = std::move(space);
    cfg.forward.alpha = alpha;
    cfg.forward.T = spec.T;
    cfg.forward.N = spec.N_inv;
    cfg.forward.u0 = data.u0;
    return cfg;
}

CellResult run_cell(DataGenerator& generator, double alpha, double epsilon, std::uint64_t base_seed) {
    const ExperimentSpec& spec = generator.spec();
    CellResult cell;
    cell.alpha = alpha;
    cell.epsilon = epsilon;
    const auto start = std::chrono::steady_clock::now();
    try {
        const SyntheticData data = generator.generate(alpha, epsilon, base_seed);
        cell.seed = data.seed;
        const auto space = generator.inversion_space();
        const InversionConfig cfg = make_inversion_config(spec, space, alpha, data);
        const NodalField zero = NodalField::Zero(space->mesh().num_nodes());
        cell.run = run_inversion(cfg, zero, spec.accelerate, data.q_true);
        cell.stop_index = cell.run.stop_index;
        cell.stop_reason = cell.run.stop_reason;
        cell.e_q = space->l2_norm(cell.run.q_final - data.q_true);
        cell.r_q = cell.run.records.empty() ? std::nan("") : cell.run.records.back().r_q;
    } catch (const NumericalError& e) {
        cell.stop_reason = StopReason::SolverFailure;
        cell.run.failure_message = e.what();
        cell.e_q = cell.r_q = std::nan("");
    }
    cell.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return cell;
}

std::vector<CellResult> run_table(const ExperimentSpec& spec, int threads) {
    DataGenerator generator(spec);
    // Fine-grid solves first, so that the workers only read the cache.
    for (double alpha : spec.alphas) {
        try {
            generator.exact_terminal(alpha);
        } catch (const NumericalError&) {
            // reported per cell below
        }
    }

    std::vector<std::pair<double, double>> cells;
    for (double alpha : spec.alphas) {
        for (double epsilon : spec.epsilons) cells.emplace_back(alpha, epsilon);
    }
    std::vector<CellResult> results(cells.size());
    if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    threads = std::min<int>(threads, static_cast<int>(cells.size()));

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            DataGenerator local = generator;  // private copy of the cache
            results[i] = run_cell(local, cells[i].first, cells[i].second, spec.base_seed);
        }
    };
    if (threads <= 1) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            results[i] = run_cell(generator, cells[i].first, cells[i].second, spec.base_seed);
        }
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    return results;
}

void write_table_csv(std::ostream& os, ExampleId example, const std::vector<CellResult>& cells) {
    os << "example,alpha,epsilon,seed,e_q,r_q,stop_index,stop_reason,wall_time_s\n";
    for (const auto& c : cells) {
        os << to_string(example) << ',' << format_double(c.alpha) << ',' << format_double(c.epsilon)
           << ',' << c.seed << ',' << format_double(c.e_q) << ',' << format_double(c.r_q) << ','
           << c.stop_index << ',' << to_string(c.stop_reason) << ',' << format_double(c.wall_time)
           << '\n';
    }
}

void write_trace_csv(std::ostream& os, const InversionResult& run) {
    os << "k,r_q,e_q,stop\n";
    for (const auto& r : run.records) {
        os << r.k << ',' << format_double(r.r_q) << ','
           << (r.e_q ? format_double(*r.e_q) : std::string()) << ','
           << (r.k == run.stop_index ? 1 : 0) << '\n';
    }
}

void write_fig1a_csv(std::ostream& os, const std::vector<double>& alphas, double t_max, double dt) {
    if (!(dt > 0) || !(t_max >= 0)) throw DomainError("fig1a: need dt > 0 and t_max >= 0");
    os << "t,alpha,value\n";
    const int steps = static_cast<int>(std::llround(t_max / dt));
    for (double alpha : alphas) {
        for (int i = 0; i <= steps; ++i) {
            const double t = i * dt;
            const double value = t * mittag_leffler(alpha, alpha, -t) / alpha;
            os << format_double(t) << ',' << format_double(alpha) << ',' << format_double(value) << '\n';
        }
    }
}

void write_fig1b_csv(std::ostream& os, const std::vector<double>& alphas) {
    os << "alpha,c_over_alpha,upper_bound\n";
    for (double alpha : alphas) {
        const CAlphaResult c = c_alpha(alpha);
        os << format_double(alpha) << ',' << format_double(c.c_alpha / alpha) << ','
           << format_double(c.upper_bound / alpha) << '\n';
    }
}

}  // namespace subdiff
