// SPDX-License-Identifier: Apache-2.0
//
// hbfsim: command line front end for the wideband hybrid beamforming
// toolkit. Subcommands:
//   bsr    beam squint ratio (closed form, optionally the exact sum)
//   eag    expected array gain for phase-shifter or switch arrays
//   run    seeded Monte-Carlo trials for one operating point
//   sweep  Monte-Carlo trials over an SNR or bandwidth grid
//
// Exit codes: 0 success, 2 configuration error, 3 infeasible instance.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <hbfsim/hbfsim.hpp>

namespace {

// Parses "start:stop:step" into an inclusive grid; a bare number yields a
// single-point grid.
std::vector<double> parse_grid(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ':')) parts.push_back(tok);
    auto to_double = [&](const std::string& s) {
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &pos);
        } catch (const std::exception&) {
            throw hbfsim::config_error("bad grid number '" + s + "'");
        }
        if (pos != s.size())
            throw hbfsim::config_error("bad grid number '" + s + "'");
        return v;
    };
    if (parts.size() == 1) return {to_double(parts[0])};
    if (parts.size() != 3)
        throw hbfsim::config_error("grid must be <start:stop:step> or a single value");
    const double start = to_double(parts[0]);
    const double stop = to_double(parts[1]);
    const double step = to_double(parts[2]);
    if (step == 0.0) throw hbfsim::config_error("grid step must be nonzero");
    std::vector<double> grid;
    const double slack = 1e-9 * std::max(1.0, std::abs(step));
    if (step > 0.0) {
        for (double v = start; v <= stop + slack; v += step) grid.push_back(v);
    } else {
        for (double v = start; v >= stop - slack; v += step) grid.push_back(v);
    }
    if (grid.empty()) throw hbfsim::config_error("grid is empty");
    return grid;
}

hbfsim::SwitchVector load_switch_vector(const std::string& source, int n) {
    if (source == "all-ones") return hbfsim::SwitchVector::all_ones(n);
    std::ifstream in(source);
    if (!in) throw hbfsim::config_error("cannot open switch vector file " + source);
    std::vector<int> bits;
    int v = 0;
    while (in >> v) {
        if (v != 0 && v != 1)
            throw hbfsim::config_error("switch vector entries must be 0 or 1");
        bits.push_back(v);
    }
    if (static_cast<int>(bits.size()) != n)
        throw hbfsim::config_error("switch vector length does not match --n");
    hbfsim::SwitchVector w;
    w.entries = Eigen::VectorXi(n);
    for (int i = 0; i < n; ++i) w.entries(i) = bits[i];
    w.check();
    return w;
}

struct CommonRunArgs {
    std::string config_path;
    std::string solver_name;
    int trials = 100;
    std::uint64_t seed = 0;
    std::string out_path;
    int threads = 1;
    std::string timing = "none";
    int max_iter = 300;
    int patience = 10;
    int tabu_len = 0;
    int pga_max_iter = 500;
    double pga_step_c = 3.0;
    double refine_eps = 0.1;
    std::string objective = "f0";
};

void add_common_run_flags(CLI::App* cmd, CommonRunArgs& a) {
    cmd->add_option("--config", a.config_path, "JSON system configuration")->required();
    cmd->add_option("--solver", a.solver_name,
                    "ts | pga-ts | pga-tbrs | es | random | dbf | ps-hbf-{1,2,4}")
        ->required();
    cmd->add_option("--trials", a.trials, "Monte-Carlo trials per operating point")
        ->required();
    cmd->add_option("--seed", a.seed, "master seed")->required();
    cmd->add_option("--out", a.out_path, "output CSV path")->required();
    cmd->add_option("--threads", a.threads, "worker threads (default 1)");
    cmd->add_option("--timing", a.timing,
                    "runtime_ms column source: none (default, reproducible) | wall")
        ->check(CLI::IsMember({"none", "wall"}));
    cmd->add_option("--max-iter", a.max_iter, "tabu search iteration cap");
    cmd->add_option("--patience", a.patience, "tabu search unimproved-iteration stop");
    cmd->add_option("--tabu-len", a.tabu_len, "tabu list length (0 = default rule)");
    cmd->add_option("--pga-max-iter", a.pga_max_iter, "projected gradient ascent cap");
    cmd->add_option("--pga-step-c", a.pga_step_c, "PGA step constant c");
    cmd->add_option("--refine-eps", a.refine_eps, "rounding threshold for PGA refinement");
    cmd->add_option("--objective", a.objective, "analog objective: f0 | f1")
        ->check(CLI::IsMember({"f0", "f1"}));
}

hbfsim::ExperimentSpec build_spec(const CommonRunArgs& a) {
    hbfsim::ExperimentSpec spec;
    spec.config = hbfsim::load_config(a.config_path);
    spec.choice = hbfsim::parse_solver(a.solver_name);
    if (a.trials < 1) throw hbfsim::config_error("--trials must be >= 1");
    spec.trials = a.trials;
    spec.master_seed = a.seed;
    spec.threads = a.threads;
    spec.wall_timing = (a.timing == "wall");
    spec.solver_params.max_iter = a.max_iter;
    spec.solver_params.patience = a.patience;
    spec.solver_params.tabu_len = a.tabu_len;
    spec.solver_params.pga_max_iter = a.pga_max_iter;
    spec.solver_params.pga_step_c = a.pga_step_c;
    spec.solver_params.refine_eps = a.refine_eps;
    spec.solver_params.objective_kind =
        a.objective == "f1" ? hbfsim::ObjectiveKind::f1 : hbfsim::ObjectiveKind::f0;
    return spec;
}

int execute(const hbfsim::ExperimentSpec& spec, const std::string& out_path) {
    const hbfsim::ExperimentResult result = hbfsim::monte_carlo(spec);
    hbfsim::write_results_csv(out_path, result.trials);
    hbfsim::print_summary(std::cout, result);
    std::size_t failed = 0;
    for (const auto& r : result.trials)
        if (!r.ok) ++failed;
    std::cout << "wrote " << result.trials.size() << " rows to " << out_path;
    if (failed > 0) std::cout << " (" << failed << " failed trials)";
    std::cout << "\n";
    if (failed == result.trials.size()) {
        std::cerr << "error: every trial failed; see the termination column\n";
        return 3;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"wideband hybrid beamforming simulator"};
    app.require_subcommand(1);

    // bsr
    auto* bsr_cmd = app.add_subcommand("bsr", "beam squint ratio");
    int bsr_n = 0, bsr_k = 0;
    double bsr_fc = 0.0, bsr_bw = 0.0, bsr_delta = 0.5;
    bool bsr_exact_flag = false;
    bsr_cmd->add_option("--n", bsr_n, "antennas")->required();
    bsr_cmd->add_option("--fc", bsr_fc, "carrier frequency [Hz]")->required();
    bsr_cmd->add_option("--bw", bsr_bw, "bandwidth [Hz]")->required();
    bsr_cmd->add_option("--delta", bsr_delta, "normalized element spacing")->required();
    bsr_cmd->add_option("--k", bsr_k, "subcarriers (for --exact)");
    bsr_cmd->add_flag("--exact", bsr_exact_flag, "also evaluate the exact subcarrier sum");

    // eag
    auto* eag_cmd = app.add_subcommand("eag", "expected array gain");
    std::string eag_array, eag_w = "all-ones";
    int eag_n = 0, eag_k = 0;
    double eag_fc = 0.0, eag_bw = 0.0, eag_delta = 0.5;
    eag_cmd->add_option("--array", eag_array, "ps | sw")
        ->required()
        ->check(CLI::IsMember({"ps", "sw"}));
    eag_cmd->add_option("--w", eag_w, "switch vector: all-ones | <file>");
    eag_cmd->add_option("--n", eag_n, "antennas")->required();
    eag_cmd->add_option("--fc", eag_fc, "carrier frequency [Hz]")->required();
    eag_cmd->add_option("--bw", eag_bw, "bandwidth [Hz]")->required();
    eag_cmd->add_option("--delta", eag_delta, "normalized element spacing")->required();
    eag_cmd->add_option("--k", eag_k, "subcarriers")->required();

    // run
    auto* run_cmd = app.add_subcommand("run", "Monte-Carlo trials at one operating point");
    CommonRunArgs run_args;
    add_common_run_flags(run_cmd, run_args);
    double run_snr_db = std::numeric_limits<double>::quiet_NaN();
    run_cmd->add_option("--snr-db", run_snr_db,
                        "per-subcarrier SNR; omitted: use power_budget from the config");

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "Monte-Carlo sweep over snr or bandwidth");
    CommonRunArgs sweep_args;
    add_common_run_flags(sweep_cmd, sweep_args);
    std::string sweep_param, sweep_grid;
    sweep_cmd->add_option("--param", sweep_param, "snr | bandwidth")
        ->required()
        ->check(CLI::IsMember({"snr", "bandwidth"}));
    sweep_cmd->add_option("--grid", sweep_grid, "<start:stop:step>, inclusive")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (bsr_cmd->parsed()) {
            if (bsr_n < 1) throw hbfsim::config_error("--n must be >= 1");
            if (bsr_fc <= 0.0 || bsr_bw <= 0.0)
                throw hbfsim::config_error("--fc and --bw must be positive");
            const double b = bsr_bw / bsr_fc;
            std::cout << "bsr_closed = " << hbfsim::detail::fmt_g(
                             hbfsim::bsr_closed(bsr_n, b, bsr_delta))
                      << "\n";
            if (bsr_exact_flag) {
                if (bsr_k < 1)
                    throw hbfsim::config_error("--exact requires --k >= 1");
                hbfsim::SquintParams p{bsr_n, b, bsr_delta, bsr_k};
                std::cout << "bsr_exact = " << hbfsim::detail::fmt_g(hbfsim::bsr_exact(p))
                          << "\n";
            }
            return 0;
        }
        if (eag_cmd->parsed()) {
            if (eag_n < 1 || eag_k < 1)
                throw hbfsim::config_error("--n and --k must be >= 1");
            if (eag_fc <= 0.0 || eag_bw <= 0.0)
                throw hbfsim::config_error("--fc and --bw must be positive");
            const double b = eag_bw / eag_fc;
            hbfsim::SquintParams p{eag_n, b, eag_delta, eag_k};
            if (eag_array == "ps") {
                std::cout << "eag_ps_exact = "
                          << hbfsim::detail::fmt_g(hbfsim::eag_ps_exact(p)) << "\n";
                std::cout << "eag_ps_approx = "
                          << hbfsim::detail::fmt_g(
                                 hbfsim::eag_ps_approx(eag_n, b, eag_delta))
                          << "\n";
            } else {
                const hbfsim::SwitchVector w = load_switch_vector(eag_w, eag_n);
                std::cout << "eag_sw_exact = "
                          << hbfsim::detail::fmt_g(hbfsim::eag_sw_exact(w, p)) << "\n";
                std::cout << "eag_sw_approx = "
                          << hbfsim::detail::fmt_g(hbfsim::eag_sw_approx(w)) << "\n";
            }
            return 0;
        }
        if (run_cmd->parsed()) {
            hbfsim::ExperimentSpec spec = build_spec(run_args);
            if (!std::isnan(run_snr_db)) spec.snr_db_grid = {run_snr_db};
            return execute(spec, run_args.out_path);
        }
        if (sweep_cmd->parsed()) {
            hbfsim::ExperimentSpec spec = build_spec(sweep_args);
            const std::vector<double> grid = parse_grid(sweep_grid);
            if (sweep_param == "snr")
                spec.snr_db_grid = grid;
            else
                spec.bandwidth_hz_grid = grid;
            return execute(spec, sweep_args.out_path);
        }
    } catch (const hbfsim::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const hbfsim::infeasible_error& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
