// SPDX-License-Identifier: Apache-2.0
#pragma once

// Seeded Monte-Carlo experiment runner: independent trials over sweep
// cells, executed by a worker pool with per-trial derived seeds and
// order-restoring collection, emitted as deterministic CSV.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "hbfsim/channel.hpp"
#include "hbfsim/config.hpp"
#include "hbfsim/errors.hpp"
#include "hbfsim/pipeline.hpp"
#include "hbfsim/power.hpp"
#include "hbfsim/rng.hpp"
#include "hbfsim/squint.hpp"

namespace hbfsim {

enum class SchemeKind { swhbf, dbf, pshbf };

struct SolverChoice {
    std::string tag;    // label written to the solver CSV column
    SchemeKind scheme = SchemeKind::swhbf;
    SolverKind solver = SolverKind::ts; // for the swhbf scheme
    int ps_bits = 4;                    // for the pshbf scheme
};

// Accepted names: ts, pga-ts, pga-tbrs, es, random, dbf, ps-hbf-{1,2,4}.
// The phase-shifter rows are tagged ps-hbf-simple-<bits>: the scheme is the
// quantized eigenbeam baseline, not a full wideband phase-shifter design.
inline SolverChoice parse_solver(const std::string& name) {
    if (name == "ts") return {"ts", SchemeKind::swhbf, SolverKind::ts, 0};
    if (name == "pga-ts") return {"pga-ts", SchemeKind::swhbf, SolverKind::pga_ts, 0};
    if (name == "pga-tbrs") return {"pga-tbrs", SchemeKind::swhbf, SolverKind::pga_tbrs, 0};
    if (name == "es") return {"es", SchemeKind::swhbf, SolverKind::es, 0};
    if (name == "random") return {"random", SchemeKind::swhbf, SolverKind::random_search, 0};
    if (name == "dbf") return {"dbf", SchemeKind::dbf, SolverKind::ts, 0};
    for (int bits : {1, 2, 4}) {
        const std::string suffix = std::to_string(bits);
        if (name == "ps-hbf-" + suffix || name == "ps-hbf-simple-" + suffix)
            return {"ps-hbf-simple-" + suffix, SchemeKind::pshbf, SolverKind::ts, bits};
    }
    throw config_error("unknown solver '" + name + "'");
}

struct ExperimentSpec {
    SystemConfig config;
    SolverChoice choice;
    std::vector<double> snr_db_grid;       // empty: derive SNR from power_budget
    std::vector<double> bandwidth_hz_grid; // empty: config.bandwidth_hz
    int trials = 1;
    std::uint64_t master_seed = 0;
    SolverParams solver_params;
    PowerModel power_model;
    int threads = 1;
    bool wall_timing = false; // default off so output is byte-reproducible
};

struct TrialResult {
    int trial = 0;
    std::uint64_t seed = 0;
    std::string solver;
    double snr_db = 0.0;
    double bandwidth_hz = 0.0;
    double bsr = 0.0;
    double avg_se = 0.0;
    double power_w = 0.0;
    double ee = 0.0;
    double runtime_ms = 0.0;
    int iterations = 0;
    std::string termination;
    bool ok = true;
};

struct AggregateRow {
    double snr_db = 0.0;
    double bandwidth_hz = 0.0;
    int n_ok = 0;
    double mean_se = 0.0;
    double std_se = 0.0;
    double mean_ee = 0.0;
    double std_ee = 0.0;
    double mean_power_w = 0.0;
    double ee_gbits_per_joule = 0.0; // mean_se * B / power / 1e9
};

struct ExperimentResult {
    std::vector<TrialResult> trials;     // ordered (sweep cell, trial index)
    std::vector<AggregateRow> aggregates; // one row per sweep cell
};

namespace detail {

struct SweepCell {
    double snr_db = std::numeric_limits<double>::quiet_NaN();
    double bandwidth_hz = 0.0;
};

inline TrialResult run_trial(const ExperimentSpec& spec, const SweepCell& cell, int trial_idx) {
    TrialResult row;
    row.trial = trial_idx;
    row.seed = derive_trial_seed(spec.master_seed, static_cast<std::uint64_t>(trial_idx));
    row.solver = spec.choice.tag;
    row.bandwidth_hz = cell.bandwidth_hz;

    SystemConfig cfg = spec.config;
    cfg.bandwidth_hz = cell.bandwidth_hz;
    if (!std::isnan(cell.snr_db)) {
        // SNR = P_b / (K * sigma_n^2) defines the per-subcarrier budget.
        cfg.power_budget = std::pow(10.0, cell.snr_db / 10.0) * cfg.n_subcarriers * cfg.noise_var;
        row.snr_db = cell.snr_db;
    } else {
        row.snr_db = 10.0 * std::log10(cfg.power_budget / (cfg.n_subcarriers * cfg.noise_var));
    }
    row.bsr = bsr_closed(cfg.n_tx, cfg.frac_bw(), cfg.spacing);

    const auto t0 = std::chrono::steady_clock::now();
    try {
        validate(cfg);
        const ChannelRealization h = generate_channel(cfg, row.seed);
        Architecture arch = Architecture::sw_hbf;
        switch (spec.choice.scheme) {
        case SchemeKind::swhbf: {
            SolverParams params = spec.solver_params;
            params.seed = row.seed;
            PipelineDiag diag;
            const HbfSolution sol = run_swhbf(cfg, h, spec.choice.solver, params, &diag);
            row.avg_se = average_se(sol.se_per_subcarrier);
            row.iterations = diag.iterations();
            row.termination = diag.termination();
            arch = Architecture::sw_hbf;
            break;
        }
        case SchemeKind::dbf:
            row.avg_se = dbf_baseline(cfg, h);
            row.termination = "closed-form";
            arch = Architecture::dbf;
            break;
        case SchemeKind::pshbf:
            row.avg_se = pshbf_baseline(cfg, h, spec.choice.ps_bits);
            row.termination = "closed-form";
            arch = Architecture::ps_hbf;
            break;
        }
        row.power_w = power_total(arch, cfg, spec.power_model, spec.choice.ps_bits);
        row.ee = energy_efficiency(row.avg_se, row.power_w);
    } catch (const std::exception& e) {
        row.ok = false;
        row.avg_se = std::numeric_limits<double>::quiet_NaN();
        row.power_w = std::numeric_limits<double>::quiet_NaN();
        row.ee = std::numeric_limits<double>::quiet_NaN();
        std::string what = e.what();
        for (auto& c : what)
            if (c == ',' || c == '\n') c = ';';
        row.termination = "failed:" + what;
    }
    if (spec.wall_timing) {
        const auto t1 = std::chrono::steady_clock::now();
        row.runtime_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    }
    return row;
}

} // namespace detail

// Runs trials over all sweep cells. Trial i always uses the same derived
// seed regardless of the cell, so sweep curves share channel realizations
// (common random numbers). Scheduling does not affect the output order.
inline ExperimentResult monte_carlo(const ExperimentSpec& spec) {
    if (spec.trials < 1) throw config_error("monte_carlo: trials must be >= 1");

    std::vector<detail::SweepCell> cells;
    const std::vector<double> bws = spec.bandwidth_hz_grid.empty()
        ? std::vector<double>{spec.config.bandwidth_hz}
        : spec.bandwidth_hz_grid;
    const std::vector<double> snrs = spec.snr_db_grid.empty()
        ? std::vector<double>{std::numeric_limits<double>::quiet_NaN()}
        : spec.snr_db_grid;
    for (double bw : bws)
        for (double snr : snrs)
            cells.push_back({snr, bw});
    if (cells.empty()) throw config_error("monte_carlo: empty sweep grid");

    // Reject statically invalid operating points up front; only runtime
    // failures inside a trial are recorded and continued.
    for (const auto& cell : cells) {
        SystemConfig probe = spec.config;
        probe.bandwidth_hz = cell.bandwidth_hz;
        if (!std::isnan(cell.snr_db))
            probe.power_budget =
                std::pow(10.0, cell.snr_db / 10.0) * probe.n_subcarriers * probe.noise_var;
        validate(probe);
    }

    const std::size_t total = cells.size() * static_cast<std::size_t>(spec.trials);
    ExperimentResult result;
    result.trials.resize(total);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t job = next.fetch_add(1); job < total; job = next.fetch_add(1)) {
            const std::size_t cell_idx = job / spec.trials;
            const int trial_idx = static_cast<int>(job % spec.trials);
            result.trials[job] = detail::run_trial(spec, cells[cell_idx], trial_idx);
        }
    };
    const int threads = std::max(1, spec.threads);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    for (std::size_t c = 0; c < cells.size(); ++c) {
        AggregateRow agg;
        agg.bandwidth_hz = cells[c].bandwidth_hz;
        double se_sum = 0.0, ee_sum = 0.0, pw_sum = 0.0;
        std::vector<double> ses, ees;
        for (int t = 0; t < spec.trials; ++t) {
            const TrialResult& row = result.trials[c * spec.trials + t];
            agg.snr_db = row.snr_db;
            if (!row.ok) continue;
            ++agg.n_ok;
            se_sum += row.avg_se;
            ee_sum += row.ee;
            pw_sum += row.power_w;
            ses.push_back(row.avg_se);
            ees.push_back(row.ee);
        }
        if (agg.n_ok > 0) {
            agg.mean_se = se_sum / agg.n_ok;
            agg.mean_ee = ee_sum / agg.n_ok;
            agg.mean_power_w = pw_sum / agg.n_ok;
            auto sdev = [&](const std::vector<double>& xs, double mean) {
                if (xs.size() < 2) return 0.0;
                double acc = 0.0;
                for (double x : xs) acc += (x - mean) * (x - mean);
                return std::sqrt(acc / (xs.size() - 1.0));
            };
            agg.std_se = sdev(ses, agg.mean_se);
            agg.std_ee = sdev(ees, agg.mean_ee);
            agg.ee_gbits_per_joule =
                agg.mean_se * agg.bandwidth_hz / agg.mean_power_w / 1e9;
        }
        result.aggregates.push_back(agg);
    }
    return result;
}

inline constexpr const char* kCsvHeader =
    "trial,seed,solver,snr_db,bandwidth_hz,bsr,avg_se_bps_hz,power_w,ee,"
    "runtime_ms,iterations,termination";

namespace detail {

inline std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

} // namespace detail

inline void write_results_csv(std::ostream& out, const std::vector<TrialResult>& rows) {
    out << kCsvHeader << '\n';
    for (const auto& r : rows) {
        out << r.trial << ',' << r.seed << ',' << r.solver << ','
            << detail::fmt_g(r.snr_db) << ',' << detail::fmt_g(r.bandwidth_hz) << ','
            << detail::fmt_g(r.bsr) << ',' << detail::fmt_g(r.avg_se) << ','
            << detail::fmt_g(r.power_w) << ',' << detail::fmt_g(r.ee) << ','
            << detail::fmt_g(r.runtime_ms) << ',' << r.iterations << ','
            << r.termination << '\n';
    }
}

inline void write_results_csv(const std::string& path, const std::vector<TrialResult>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot open output file " + path);
    write_results_csv(out, rows);
}

inline void write_trace_csv(std::ostream& out, const SearchTrace& trace) {
    out << "iter,candidate,best\n";
    for (const auto& row : trace.rows)
        out << row.iter << ',' << detail::fmt_g(row.candidate) << ','
            << detail::fmt_g(row.best) << '\n';
}

// Per-cell summary for stdout; includes the bandwidth-scaled EE in Gbit/J
// alongside the ratio convention used in the CSV.
inline void print_summary(std::ostream& out, const ExperimentResult& result) {
    out << "cell,snr_db,bandwidth_hz,n_ok,mean_se_bps_hz,std_se,mean_ee,std_ee,"
           "ee_gbits_per_joule\n";
    for (std::size_t i = 0; i < result.aggregates.size(); ++i) {
        const auto& a = result.aggregates[i];
        out << i << ',' << detail::fmt_g(a.snr_db) << ',' << detail::fmt_g(a.bandwidth_hz)
            << ',' << a.n_ok << ',' << detail::fmt_g(a.mean_se) << ','
            << detail::fmt_g(a.std_se) << ',' << detail::fmt_g(a.mean_ee) << ','
            << detail::fmt_g(a.std_ee) << ',' << detail::fmt_g(a.ee_gbits_per_joule) << '\n';
    }
}

} // namespace hbfsim
