#include "subdiff/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "subdiff/csv.hpp"
#include "subdiff/errors.hpp"
#include "subdiff/experiments.hpp"

namespace subdiff {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct GlobalOptions {
    std::string out_dir;
    bool verbose = false;
    int threads = 1;
    std::optional<std::uint64_t> seed;
};

class Logger {
public:
    Logger(std::ostream& err, bool enabled) : err_(err), enabled_(enabled) {}
    template <typename... Args>
    void operator()(const Args&... args) const {
        if (!enabled_) return;
        err_ << "[subdiff] ";
        (err_ << ... << args);
        err_ << '\n';
    }

private:
    std::ostream& err_;
    bool enabled_;
};

json load_json(const std::string& path) {
    if (path.empty()) throw DomainError("no configuration file given");
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open configuration file: " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw DomainError("malformed JSON in " + path + ": " + e.what());
    }
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw DomainError(where + ": top level must be a JSON object");
    for (const auto& item : j.items()) {
        if (!allowed.count(item.key())) {
            throw DomainError(where + ": unknown key '" + item.key() + "'");
        }
    }
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw DomainError("configuration key '" + key + "' has the wrong type");
    }
}

template <typename T>
T require(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) throw DomainError(where + ": missing required key '" + key + "'");
    return get_or<T>(j, key, T{});
}

fs::path prepare_out_dir(const GlobalOptions& g) {
    fs::path dir = g.out_dir;
    if (dir.empty()) {
        const char* env = std::getenv(kOutputDirEnv);
        dir = env && *env ? env : "subdiff_out";
    }
    fs::create_directories(dir);
    return dir;
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw DomainError("cannot write " + path.string());
    return out;
}

// ---------------------------------------------------------------- ml, calpha

int run_ml(double alpha, double beta, double z, std::ostream& out) {
    const double value = mittag_leffler(alpha, beta, z);
    out << "alpha,beta,z,value\n"
        << format_double(alpha) << ',' << format_double(beta) << ',' << format_double(z) << ','
        << format_double(value) << '\n';
    return 0;
}

int run_calpha(double alpha, std::ostream& out) {
    const CAlphaResult r = c_alpha(alpha);
    out << "alpha,c_alpha,t_star,upper_bound\n"
        << format_double(r.alpha) << ',' << format_double(r.c_alpha) << ','
        << format_double(r.t_star) << ',' << format_double(r.upper_bound) << '\n';
    return 0;
}

// ------------------------------------------------------------------ forward

int run_forward(const std::string& config_path, const GlobalOptions& g, std::ostream& out,
                const Logger& log) {
    const json cfg = load_json(config_path);
    check_keys(cfg, {"example", "dimension", "alpha", "T", "M", "N", "q", "u0"}, config_path);
    const double alpha = require<double>(cfg, "alpha", config_path);
    const double T = require<double>(cfg, "T", config_path);
    const int M = require<int>(cfg, "M", config_path);
    const int N = require<int>(cfg, "N", config_path);

    std::optional<ExampleId> example;
    if (cfg.contains("example")) example = parse_example(get_or<std::string>(cfg, "example", ""));
    const int dim = example ? example_dimension(*example) : get_or<int>(cfg, "dimension", 1);
    if (example && cfg.contains("dimension") && cfg["dimension"] != dim) {
        throw DomainError(config_path + ": dimension does not match the example");
    }
    if (dim != 1 && dim != 2) throw DomainError(config_path + ": dimension must be 1 or 2");

    const auto space = make_space(dim, M);
    const Mesh& mesh = space->mesh();
    NodalField q = NodalField::Zero(mesh.num_nodes());
    NodalField u0;
    if (example) {
        const ExampleFields fields = example_data(*example, mesh);
        q = fields.q_true;
        u0 = fields.u0;
    }
    if (cfg.contains("q")) q = read_field_csv(get_or<std::string>(cfg, "q", ""), mesh);
    if (cfg.contains("u0")) u0 = read_field_csv(get_or<std::string>(cfg, "u0", ""), mesh);
    if (u0.size() == 0) throw DomainError(config_path + ": give either 'example' or 'u0'");
    u0 = space->project_dirichlet(u0);

    log("forward: d=", dim, " M=", M, " N=", N, " alpha=", alpha, " T=", T);
    const auto t0 = std::chrono::steady_clock::now();
    const ForwardResult result = forward_solve(*space, q, u0, alpha, T, N);
    log("forward: done in ",
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), " s");

    const fs::path path = prepare_out_dir(g) / "terminal.csv";
    auto file = open_output(path);
    write_field_csv(file, mesh, {result.terminal}, {"value"});
    out << path.string() << '\n';
    return 0;
}

// ------------------------------------------------------------------- invert

struct InvertProblem {
    InversionConfig cfg;
    std::optional<NodalField> q_true;
    std::optional<ExampleId> example;
};

InvertProblem build_invert_problem(const json& j, const std::string& where,
                                   const GlobalOptions& g) {
    check_keys(j,
               {"example", "dimension", "alpha", "T", "epsilon", "M_data", "N_data", "M_inv",
                "N_inv", "lambda", "m", "tau", "max_iter", "delta", "svd_cutoff", "base_seed",
                "g", "u0", "q_true"},
               where);
    InvertProblem p;
    const double alpha = require<double>(j, "alpha", where);

    if (j.contains("example")) {
        if (j.contains("g") || j.contains("u0") || j.contains("delta")) {
            throw DomainError(where + ": 'example' cannot be combined with 'g', 'u0' or 'delta'");
        }
        p.example = parse_example(get_or<std::string>(j, "example", ""));
        ExperimentSpec spec = ExperimentSpec::defaults(*p.example);
        spec.alphas = {alpha};
        spec.T = get_or(j, "T", spec.T);
        spec.M_data = get_or(j, "M_data", spec.M_data);
        spec.N_data = get_or(j, "N_data", spec.N_data);
        spec.M_inv = get_or(j, "M_inv", spec.M_inv);
        spec.N_inv = get_or(j, "N_inv", spec.N_inv);
        spec.lambda = get_or(j, "lambda", spec.lambda);
        spec.m = get_or(j, "m", spec.m);
        spec.tau = get_or(j, "tau", spec.tau);
        spec.max_iter = get_or(j, "max_iter", spec.max_iter);
        spec.base_seed = g.seed ? *g.seed : get_or(j, "base_seed", spec.base_seed);
        const double epsilon = get_or(j, "epsilon", 0.0);
        spec.epsilons = {epsilon};

        DataGenerator generator(spec);
        const SyntheticData data = generator.generate(alpha, epsilon, spec.base_seed);
        p.cfg = make_inversion_config(spec, generator.inversion_space(), alpha, data);
        p.q_true = data.q_true;
    } else {
        const int dim = get_or(j, "dimension", 1);
        if (dim != 1 && dim != 2) throw DomainError(where + ": dimension must be 1 or 2");
        const auto space = make_space(dim, require<int>(j, "M_inv", where));
        const Mesh& mesh = space->mesh();
        p.cfg.g = read_field_csv(require<std::string>(j, "g", where), mesh);
        p.cfg.forward.space = space;
        p.cfg.forward.u0 = space->project_dirichlet(read_field_csv(require<std::string>(j, "u0", where), mesh));
        p.cfg.forward.alpha = alpha;
        p.cfg.forward.T = require<double>(j, "T", where);
        p.cfg.forward.N = require<int>(j, "N_inv", where);
        p.cfg.delta = get_or(j, "delta", 0.0);
        p.cfg.lambda = get_or(j, "lambda", p.cfg.lambda);
        p.cfg.m = get_or(j, "m", p.cfg.m);
        p.cfg.tau = get_or(j, "tau", p.cfg.tau);
        p.cfg.max_iter = get_or(j, "max_iter", p.cfg.max_iter);
        if (j.contains("q_true")) p.q_true = read_field_csv(get_or<std::string>(j, "q_true", ""), mesh);
        for (const char* key : {"epsilon", "M_data", "N_data", "base_seed"}) {
            if (j.contains(key)) {
                throw DomainError(where + ": key '" + std::string(key) + "' needs 'example'");
            }
        }
    }
    p.cfg.svd_cutoff = get_or(j, "svd_cutoff", p.cfg.svd_cutoff);
    p.cfg.validate();
    return p;
}

json summary_json(const InversionResult& run, const InversionConfig& cfg,
                  const std::optional<NodalField>& q_true) {
    json s;
    s["stop_reason"] = to_string(run.stop_reason);
    s["stop_index"] = run.stop_index;
    s["iterations"] = run.records.size();
    s["delta"] = cfg.delta;
    if (!run.records.empty()) s["r_q"] = run.records.back().r_q;
    if (q_true) s["e_q"] = cfg.forward.space->l2_norm(run.q_final - *q_true);
    if (!run.failure_message.empty()) s["failure"] = run.failure_message;
    return s;
}

int run_invert(const std::string& config_path, bool no_accel, bool isakov, double g_min,
               const GlobalOptions& g, std::ostream& out, const Logger& log) {
    const json j = load_json(config_path);
    const InvertProblem problem = build_invert_problem(j, config_path, g);
    const Mesh& mesh = problem.cfg.forward.space->mesh();

    RunOptions options;
    options.accelerate = !no_accel;
    options.kind = isakov ? IterationKind::Isakov : IterationKind::FixedPoint;
    options.g_min = g_min;
    log("invert: ", isakov ? "isakov" : "fixed point", options.accelerate ? " + anderson" : "",
        ", delta=", problem.cfg.delta);

    const NodalField zero = NodalField::Zero(mesh.num_nodes());
    const InversionResult run = run_inversion(problem.cfg, zero, options, problem.q_true);
    log("invert: ", to_string(run.stop_reason), " at k=", run.stop_index);

    const fs::path dir = prepare_out_dir(g);
    {
        auto file = open_output(dir / "trace.csv");
        write_trace_csv(file, run);
    }
    {
        auto file = open_output(dir / "q_final.csv");
        if (problem.q_true) {
            write_field_csv(file, mesh, {run.q_final, *problem.q_true}, {"q_final", "q_true"});
        } else {
            write_field_csv(file, mesh, {run.q_final}, {"q_final"});
        }
    }
    json summary = summary_json(run, problem.cfg, problem.q_true);
    {
        auto file = open_output(dir / "result.json");
        file << summary.dump(2) << '\n';
    }
    out << summary.dump(2) << '\n';
    return run.stop_reason == StopReason::SolverFailure ? 2 : 0;
}

// --------------------------------------------------------------- experiment

ExperimentSpec parse_spec(const json& j, const std::string& where) {
    check_keys(j,
               {"example", "alphas", "epsilons", "T", "M_data", "N_data", "M_inv", "N_inv",
                "lambda", "m", "tau", "base_seed", "accelerate", "max_iter"},
               where);
    const ExampleId id = parse_example(require<std::string>(j, "example", where));
    ExperimentSpec spec = ExperimentSpec::defaults(id);
    spec.alphas = get_or(j, "alphas", spec.alphas);
    spec.epsilons = get_or(j, "epsilons", spec.epsilons);
    spec.T = get_or(j, "T", spec.T);
    spec.M_data = get_or(j, "M_data", spec.M_data);
    spec.N_data = get_or(j, "N_data", spec.N_data);
    spec.M_inv = get_or(j, "M_inv", spec.M_inv);
    spec.N_inv = get_or(j, "N_inv", spec.N_inv);
    spec.lambda = get_or(j, "lambda", spec.lambda);
    spec.m = get_or(j, "m", spec.m);
    spec.tau = get_or(j, "tau", spec.tau);
    spec.base_seed = get_or(j, "base_seed", spec.base_seed);
    spec.accelerate = get_or(j, "accelerate", spec.accelerate);
    spec.max_iter = get_or(j, "max_iter", spec.max_iter);
    spec.validate();
    return spec;
}

int run_experiment(const std::string& spec_path, const GlobalOptions& g, std::ostream& out,
                   const Logger& log) {
    ExperimentSpec spec = parse_spec(load_json(spec_path), spec_path);
    if (g.seed) spec.base_seed = *g.seed;
    log("experiment: ", to_string(spec.example), ", ", spec.alphas.size() * spec.epsilons.size(),
        " cells, ", g.threads, " thread(s)");

    const auto cells = run_table(spec, g.threads);
    const fs::path dir = prepare_out_dir(g);
    const fs::path traces = dir / "traces";
    fs::create_directories(traces);
    {
        auto file = open_output(dir / "table.csv");
        write_table_csv(file, spec.example, cells);
    }
    for (const auto& c : cells) {
        log("cell alpha=", c.alpha, " eps=", c.epsilon, ": e_q=", c.e_q, " stop=", c.stop_index,
            " (", to_string(c.stop_reason), ")");
        const std::string name = "trace_alpha" + format_double(c.alpha) + "_eps" +
                                 format_double(c.epsilon) + ".csv";
        auto file = open_output(traces / name);
        write_trace_csv(file, c.run);
    }
    write_table_csv(out, spec.example, cells);
    return 0;
}

// ------------------------------------------------------------------ figures

int run_figures(const std::string& kind, std::vector<double> alphas, const std::string& config,
                const GlobalOptions& g, std::ostream& out, const Logger& log) {
    const fs::path dir = prepare_out_dir(g);
    const bool all = kind == "all";
    if (!all && kind != "fig1a" && kind != "fig1b" && kind != "convergence_trace") {
        throw DomainError("unknown figure kind '" + kind +
                          "' (expected fig1a, fig1b, convergence_trace or all)");
    }
    if (all || kind == "fig1a") {
        const auto a = alphas.empty() ? std::vector<double>{0.25, 0.5, 0.75, 1.0} : alphas;
        auto file = open_output(dir / "fig1a.csv");
        write_fig1a_csv(file, a);
        out << (dir / "fig1a.csv").string() << '\n';
    }
    if (all || kind == "fig1b") {
        std::vector<double> a = alphas;
        if (a.empty()) {
            for (int i = 1; i <= 20; ++i) a.push_back(0.05 * i);
        }
        log("figures: c_alpha on ", a.size(), " orders");
        auto file = open_output(dir / "fig1b.csv");
        write_fig1b_csv(file, a);
        out << (dir / "fig1b.csv").string() << '\n';
    }
    if (kind == "convergence_trace") {
        const json j = load_json(config);
        const InvertProblem problem = build_invert_problem(j, config, g);
        const NodalField zero = NodalField::Zero(problem.cfg.forward.space->mesh().num_nodes());
        RunOptions options;
        options.accelerate = false;
        const InversionResult run = run_inversion(problem.cfg, zero, options, problem.q_true);
        auto file = open_output(dir / "convergence_trace.csv");
        write_trace_csv(file, run);
        out << (dir / "convergence_trace.csv").string() << '\n';
        if (run.stop_reason == StopReason::SolverFailure) return 2;
    }
    return 0;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Subdiffusion forward and inverse potential solver"};
    app.require_subcommand(1);
    app.fallthrough();
    GlobalOptions g;
    app.add_option("--out", g.out_dir, "Output directory (default $" + std::string(kOutputDirEnv) +
                                           " or ./subdiff_out)");
    app.add_flag("-v,--verbose", g.verbose, "Log progress to stderr");
    app.add_option("--threads", g.threads, "Worker threads for experiment cells (0 = all cores)")
        ->check(CLI::NonNegativeNumber);
    std::uint64_t seed = 0;
    auto* seed_opt = app.add_option("--seed", seed, "Override the base noise seed");

    double alpha = 0.5, beta = 1, z = 0;
    auto* ml = app.add_subcommand("ml", "Evaluate E_{alpha,beta}(z) for z <= 0");
    ml->add_option("--alpha", alpha)->required();
    ml->add_option("--beta", beta)->required();
    ml->add_option("--z", z)->required();

    double c_alpha_order = 0.5;
    auto* calpha = app.add_subcommand("calpha", "Compute c_alpha = sup_t t E_{a,a}(-t)");
    calpha->add_option("--alpha", c_alpha_order)->required();

    std::string kind = "all";
    std::vector<double> figure_alphas;
    std::string figure_config;
    auto* figures = app.add_subcommand("figures", "Write figure data as CSV");
    figures->add_option("--kind", kind, "fig1a, fig1b, convergence_trace or all");
    figures->add_option("--alphas", figure_alphas, "Fractional orders")->delimiter(',');
    figures->add_option("--config", figure_config, "Inversion config for convergence_trace");

    std::string forward_config;
    auto* forward = app.add_subcommand("forward", "Solve the forward problem");
    forward->add_option("--config", forward_config, "JSON configuration")->required();

    std::string invert_config;
    bool no_accel = false, isakov = false;
    double g_min = 1e-8;
    auto* invert = app.add_subcommand("invert", "Recover q from terminal data");
    invert->add_option("--config", invert_config, "JSON configuration")->required();
    invert->add_flag("--no-accel", no_accel, "Plain fixed-point iteration");
    invert->add_flag("--isakov", isakov, "Use the Isakov iteration");
    invert->add_option("--g-min", g_min, "Divisor guard for --isakov");

    std::string spec_path;
    auto* experiment = app.add_subcommand("experiment", "Run a table of inversion cells");
    experiment->add_option("--spec", spec_path, "JSON experiment spec")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n' << app.help();
        return 1;
    }
    if (*seed_opt) g.seed = seed;
    const Logger log(err, g.verbose);

    try {
        if (*ml) return run_ml(alpha, beta, z, out);
        if (*calpha) return run_calpha(c_alpha_order, out);
        if (*figures) return run_figures(kind, figure_alphas, figure_config, g, out, log);
        if (*forward) return run_forward(forward_config, g, out, log);
        if (*invert) return run_invert(invert_config, no_accel, isakov, g_min, g, out, log);
        if (*experiment) return run_experiment(spec_path, g, out, log);
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return 2;
    }
    return 1;
}

int dispatch(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return dispatch(args, std::cout, std::cerr);
}

}  // namespace subdiff
