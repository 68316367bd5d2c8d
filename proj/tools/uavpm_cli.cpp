// Command-line front end: scenario generation, single solves, the beamwidth
// sweep, and the full baseline benchmark. Exit codes: 0 ok, 2 infeasible
// scenario, 3 bad input.

#include <cstdint>
#include <exception>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <uavpm/bench.hpp>
#include <uavpm/coordinator.hpp>
#include <uavpm/io.hpp>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 2;
constexpr int kExitBadInput = 3;

struct CommonOpts {
    std::uint64_t seed = 0;
    int k = 20;
    double radius_m = 300.0;
    std::vector<double> rates_bps;
    int trials = 20;
    int starts = 50;
    double alpha = 2.0;
    std::string out;
    std::string format = "csv";
    double rel_tol = 1e-6;
    int max_iters = 100;
    std::string in_path;
    int theta_steps = 100;
};

void add_common_flags(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--seed", o.seed, "RNG seed; all randomness derives from it");
    cmd->add_option("--k", o.k, "number of ground terminals");
    cmd->add_option("--radius-m", o.radius_m, "GT placement disk radius, meters");
    cmd->add_option("--rate-bps", o.rates_bps, "rate demand(s), bps; repeatable");
    cmd->add_option("--trials", o.trials, "scenario draws per rate point");
    cmd->add_option("--starts", o.starts, "restarts for the Exhaustive method");
    cmd->add_option("--alpha", o.alpha, "pathloss exponent (>= 2)");
    cmd->add_option("--out", o.out, "output file path");
    cmd->add_option("--format", o.format, "output format: csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--rel-tol", o.rel_tol, "convergence threshold on the objective");
    cmd->add_option("--max-iters", o.max_iters, "iteration cap");
}

uavpm::bench::ExperimentSpec to_spec(const CommonOpts& o) {
    uavpm::bench::ExperimentSpec spec;
    spec.k = o.k;
    spec.radius_m = o.radius_m;
    if (!o.rates_bps.empty()) spec.rate_grid = o.rates_bps;
    spec.theta_steps = o.theta_steps;
    spec.trials = o.trials;
    spec.starts = o.starts;
    spec.alpha = o.alpha;
    spec.seed = o.seed;
    return spec;
}

uavpm::coordinator::SolverConfig<double> to_config(const CommonOpts& o) {
    uavpm::coordinator::SolverConfig<double> cfg;
    cfg.rel_tol = o.rel_tol;
    cfg.max_iters = o.max_iters;
    cfg.starts = o.starts;
    cfg.seed = o.seed;
    return cfg;
}

uavpm::Scenario<double> load_or_generate(const CommonOpts& o) {
    if (!o.in_path.empty()) return uavpm::io::scenario_from_json(uavpm::io::load_json(o.in_path));
    auto scn = uavpm::bench::gen_scenario(to_spec(o), o.seed);
    scn.validate();
    return scn;
}

void write_or_print(const std::string& text, const std::string& out) {
    if (out.empty()) {
        std::cout << text;
    } else {
        uavpm::io::save_text(out, text);
    }
}

int cmd_gen(const CommonOpts& o) {
    auto scn = load_or_generate(o);
    write_or_print(uavpm::io::scenario_to_json(scn).dump(2) + "\n", o.out);
    return kExitOk;
}

int cmd_solve(const CommonOpts& o) {
    const auto scn = load_or_generate(o);
    const auto cfg = to_config(o);
    const auto sol = o.starts > 1 ? uavpm::coordinator::solve_multistart(scn, cfg)
                                  : uavpm::coordinator::solve(scn, cfg);
    write_or_print(uavpm::io::solution_to_json(sol).dump(2) + "\n", o.out);
    return sol.status == uavpm::SolveStatus::infeasible ? kExitInfeasible : kExitOk;
}

int cmd_sweep(const CommonOpts& o) {
    auto scn = load_or_generate(o);
    std::vector<double> rates = o.rates_bps;
    if (rates.empty()) rates = {scn.gts[0].min_rate};

    const double lo = scn.theta_lo();
    const double hi = scn.theta_max;
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(o.theta_steps) + 1);
    for (int i = 0; i <= o.theta_steps; ++i)
        grid.push_back(lo + (hi - lo) * static_cast<double>(i) / o.theta_steps);

    std::vector<uavpm::bench::SweepRow> rows;
    for (double rate : rates) {
        for (auto& gt : scn.gts) gt.min_rate = rate;
        auto r = uavpm::bench::sweep_theta(scn, grid);
        rows.insert(rows.end(), r.begin(), r.end());
    }
    if (o.format == "json") {
        write_or_print(uavpm::bench::sweep_to_json(rows).dump(2) + "\n", o.out);
    } else {
        write_or_print(uavpm::bench::sweep_to_csv(rows), o.out);
    }
    return kExitOk;
}

int cmd_bench(const CommonOpts& o) {
    const auto spec = to_spec(o);
    const auto rows = uavpm::bench::run_bench(spec, to_config(o));
    std::cerr << "bench: K=" << spec.k << " radius=" << spec.radius_m << " trials=" << spec.trials
              << " starts=" << spec.starts << " seed=" << spec.seed << " rates=[";
    for (std::size_t i = 0; i < spec.rate_grid.size(); ++i)
        std::cerr << (i ? "," : "") << spec.rate_grid[i];
    std::cerr << "]\n";
    if (o.format == "csv") {
        write_or_print(uavpm::bench::rows_to_csv(rows), o.out);
    } else {
        write_or_print(uavpm::bench::rows_to_json(rows).dump(2) + "\n", o.out);
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"UAV uplink sum-power minimizer: joint altitude, beamwidth, "
                 "location and bandwidth optimization"};
    app.require_subcommand(1);

    CommonOpts gen_o, solve_o, sweep_o, bench_o;

    auto* gen = app.add_subcommand("gen", "generate a scenario JSON");
    add_common_flags(gen, gen_o);

    auto* solve = app.add_subcommand("solve", "solve one scenario to a solution JSON");
    add_common_flags(solve, solve_o);
    solve->add_option("--in", solve_o.in_path, "scenario JSON (default: generate)");
    solve_o.starts = 1;

    auto* sweep = app.add_subcommand("sweep-theta", "sum power vs beamwidth at the disk center");
    add_common_flags(sweep, sweep_o);
    sweep->add_option("--in", sweep_o.in_path, "scenario JSON (default: generate)");
    sweep->add_option("--theta-steps", sweep_o.theta_steps, "number of beamwidth grid cells");

    auto* bench = app.add_subcommand("bench", "baseline comparison over a rate grid");
    add_common_flags(bench, bench_o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return kExitBadInput;
    }

    try {
        if (gen->parsed()) return cmd_gen(gen_o);
        if (solve->parsed()) return cmd_solve(solve_o);
        if (sweep->parsed()) return cmd_sweep(sweep_o);
        if (bench->parsed()) return cmd_bench(bench_o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    }
    return kExitBadInput;
}
