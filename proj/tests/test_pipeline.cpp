// SPDX-License-Identifier: Apache-2.0
//
// End-to-end pipeline properties: zero-channel behavior, determinism,
// dominance orderings between the architectures, and the relaxation
// chain connecting the realized rate to the analog objective.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <hbfsim/channel.hpp>
#include <hbfsim/pipeline.hpp>
#include <hbfsim/power.hpp>

using namespace hbfsim;

namespace {

SystemConfig pipe_cfg(int k = 8) {
    SystemConfig cfg;
    cfg.n_tx = 8;
    cfg.n_rx = 4;
    cfg.n_rf = 2;
    cfg.n_streams = 2;
    cfg.n_subcarriers = k;
    cfg.carrier_hz = 140e9;
    cfg.bandwidth_hz = 10e9;
    cfg.n_paths = 4;
    cfg.noise_var = 1.0;
    cfg.power_budget = 10.0 * k; // 10 dB per-subcarrier SNR
    return cfg;
}

ChannelRealization zero_channel(const SystemConfig& cfg) {
    ChannelRealization h;
    for (int k = 0; k < cfg.n_subcarriers; ++k)
        h.matrices.push_back(CMat::Zero(cfg.n_rx, cfg.n_tx));
    return h;
}

} // namespace

TEST_CASE("a zero channel carries zero rate through the whole pipeline") {
    const SystemConfig cfg = pipe_cfg(4);
    const ChannelRealization h = zero_channel(cfg);
    SolverParams params;
    params.seed = 3;
    const HbfSolution sol = run_swhbf(cfg, h, SolverKind::ts, params);
    REQUIRE(average_se(sol.se_per_subcarrier) == 0.0);
    REQUIRE(dbf_baseline(cfg, h) == 0.0);
    REQUIRE(pshbf_baseline(cfg, h, 2) == 0.0);
}

TEST_CASE("the pipeline is deterministic in the master seed") {
    const SystemConfig cfg = pipe_cfg();
    const ChannelRealization h = generate_channel(cfg, 555);
    SolverParams params;
    params.seed = 444;
    const HbfSolution a = run_swhbf(cfg, h, SolverKind::ts, params);
    const HbfSolution b = run_swhbf(cfg, h, SolverKind::ts, params);
    REQUIRE(a.f_rf.entries == b.f_rf.entries);
    REQUIRE(a.w_rf.entries == b.w_rf.entries);
    REQUIRE(a.se_per_subcarrier == b.se_per_subcarrier);
}

TEST_CASE("precoder and combiner stages draw from separated seed streams") {
    // Same antenna counts on both sides: identical stage seeds would make
    // identical random starts likely; the derived streams keep them apart.
    REQUIRE(derive_stream(444, 1) != derive_stream(444, 2));
}

TEST_CASE("every solver yields feasible analog stages and positive rate") {
    const SystemConfig cfg = pipe_cfg(4);
    const ChannelRealization h = generate_channel(cfg, 808);
    SolverParams params;
    params.seed = 1;
    for (SolverKind kind : {SolverKind::ts, SolverKind::pga_ts, SolverKind::pga_tbrs,
                            SolverKind::random_search}) {
        const HbfSolution sol = run_swhbf(cfg, h, kind, params);
        REQUIRE(sol.f_rf.feasible());
        REQUIRE(sol.w_rf.feasible());
        REQUIRE(sol.f_rf.antennas() == cfg.n_tx);
        REQUIRE(sol.w_rf.antennas() == cfg.n_rx);
        REQUIRE(average_se(sol.se_per_subcarrier) > 0.0);
    }
}

TEST_CASE("diagnostics aggregate both stages") {
    const SystemConfig cfg = pipe_cfg(4);
    const ChannelRealization h = generate_channel(cfg, 11);
    SolverParams params;
    params.seed = 2;
    PipelineDiag diag;
    run_swhbf(cfg, h, SolverKind::ts, params, &diag);
    REQUIRE(diag.iterations() ==
            static_cast<int>(diag.precoder.rows.size() + diag.combiner.rows.size()));
    REQUIRE(diag.termination().rfind("p:", 0) == 0);
    REQUIRE(diag.termination().find(";c:") != std::string::npos);
}

TEST_CASE("the full-digital baseline dominates the hybrid schemes") {
    const SystemConfig cfg = pipe_cfg();
    SolverParams params;
    for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
        const ChannelRealization h = generate_channel(cfg, seed);
        params.seed = seed;
        const double dbf = dbf_baseline(cfg, h);
        const HbfSolution sw = run_swhbf(cfg, h, SolverKind::ts, params);
        REQUIRE(average_se(sw.se_per_subcarrier) <= dbf + 1e-9);
        REQUIRE(pshbf_baseline(cfg, h, 4) <= dbf + 1e-9);
    }
}

TEST_CASE("the realized rate never exceeds the analog objective it optimizes") {
    // With N_S = N_RF the analog objective equals the rate of the ideal
    // unconstrained receiver, so the restricted combiner can only lose.
    const SystemConfig cfg = pipe_cfg();
    SolverParams params;
    for (std::uint64_t seed : {21, 22, 23}) {
        const ChannelRealization h = generate_channel(cfg, seed);
        params.seed = seed;
        const HbfSolution sol = run_swhbf(cfg, h, SolverKind::ts, params);
        const EffectiveChannelSet eff = make_effective_tx(h, {});
        const double f0 = analog_objective_f0(sol.f_rf, eff,
                                              cfg.power_budget / cfg.n_streams,
                                              cfg.noise_var, ObjectiveForm::pinv);
        REQUIRE(average_se(sol.se_per_subcarrier) <= f0 + 1e-6);
    }
}

TEST_CASE("scalar full-digital baseline matches the closed form") {
    SystemConfig cfg = pipe_cfg(1);
    cfg.n_tx = 1;
    cfg.n_rx = 1;
    cfg.n_rf = 1;
    cfg.n_streams = 1;
    cfg.power_budget = 4.0;
    cfg.noise_var = 0.5;
    ChannelRealization h;
    h.matrices.push_back(CMat::Constant(1, 1, cplx(0.3, 0.4))); // |h| = 0.5
    const double expect = std::log2(1.0 + 4.0 * 0.25 / 0.5);
    REQUIRE(dbf_baseline(cfg, h) == Catch::Approx(expect).epsilon(1e-12));
}

TEST_CASE("phase-shifter baseline degrades as quantization coarsens") {
    const SystemConfig cfg = pipe_cfg();
    double se_inf = 0.0, se_4 = 0.0, se_1 = 0.0;
    const int trials = 30;
    for (int t = 0; t < trials; ++t) {
        const ChannelRealization h = generate_channel(cfg, 9000 + t);
        se_inf += pshbf_baseline(cfg, h, 0);
        se_4 += pshbf_baseline(cfg, h, 4);
        se_1 += pshbf_baseline(cfg, h, 1);
    }
    REQUIRE(se_inf >= se_4 - 1e-9);
    REQUIRE(se_4 > se_1);
}

TEST_CASE("phase-shifter baseline rejects unsupported resolutions") {
    const SystemConfig cfg = pipe_cfg(2);
    const ChannelRealization h = generate_channel(cfg, 1);
    REQUIRE_THROWS_AS(pshbf_baseline(cfg, h, 3), config_error);
    REQUIRE_THROWS_AS(pshbf_baseline(cfg, h, -1), config_error);
}

TEST_CASE("pipelines validate their configuration") {
    SystemConfig cfg = pipe_cfg(2);
    cfg.power_budget = 0.0;
    const ChannelRealization h = zero_channel(cfg);
    SolverParams params;
    REQUIRE_THROWS_AS(run_swhbf(cfg, h, SolverKind::ts, params), config_error);
    REQUIRE_THROWS_AS(dbf_baseline(cfg, h), config_error);
}

TEST_CASE("architecture power ordering holds at scale") {
    SystemConfig cfg = pipe_cfg(2);
    cfg.n_tx = 64;
    cfg.n_rx = 64;
    cfg.n_rf = 4;
    cfg.n_streams = 4;
    PowerModel m;
    const double p_sw = power_total(Architecture::sw_hbf, cfg, m);
    const double p_ps = power_total(Architecture::ps_hbf, cfg, m, 4);
    const double p_dbf = power_total(Architecture::dbf, cfg, m);
    REQUIRE(p_sw < p_ps);
    REQUIRE(p_ps < p_dbf);
}
