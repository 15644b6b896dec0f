// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <string>

#include <json.hpp>

#include "hbfsim/errors.hpp"

namespace hbfsim {

// Static system description shared by all modules. Frequencies in Hz,
// powers in watts, spacing in wavelengths.
struct SystemConfig {
    int n_tx = 0;            // N_T transmit antennas
    int n_rx = 0;            // N_R receive antennas
    int n_rf = 0;            // N_RF RF chains per side
    int n_streams = 0;       // N_S data streams
    int n_subcarriers = 0;   // K
    double carrier_hz = 0.0; // f_c
    double bandwidth_hz = 0.0;
    double spacing = 0.5;    // antenna spacing Delta, in wavelengths
    int n_paths = 0;         // L_p scattering paths
    double power_budget = 0.0; // P_b per subcarrier
    double noise_var = 1.0;    // sigma_n^2
    double rolloff = 1.0;      // raised-cosine beta
    int cp_len = 0;            // D taps; 0 means default K/4
    double sample_period = 0.0; // T_s; 0 means default 1/B
    bool channel_norm = false;  // sqrt(N_T*N_R/L_p) tap scaling

    double frac_bw() const { return bandwidth_hz / carrier_hz; }
    int taps() const { return cp_len > 0 ? cp_len : std::max(1, n_subcarriers / 4); }
    double ts() const { return sample_period > 0.0 ? sample_period : 1.0 / bandwidth_hz; }
};

inline void validate(const SystemConfig& c) {
    auto fail = [](const std::string& msg) { throw config_error("config: " + msg); };
    if (c.n_tx < 1 || c.n_rx < 1) fail("antenna counts must be >= 1");
    if (c.n_rf < 1) fail("n_rf must be >= 1");
    if (c.n_streams < 1) fail("n_streams must be >= 1");
    if (c.n_streams > c.n_rf) fail("n_streams must not exceed n_rf");
    if (c.n_rf > std::min(c.n_tx, c.n_rx)) fail("n_rf must not exceed min(n_tx, n_rx)");
    if (c.n_subcarriers < 1) fail("n_subcarriers must be >= 1");
    if (c.carrier_hz <= 0.0) fail("carrier_hz must be positive");
    if (c.bandwidth_hz <= 0.0) fail("bandwidth_hz must be positive");
    if (c.frac_bw() >= 2.0) fail("bandwidth_hz / carrier_hz must be < 2");
    if (c.spacing <= 0.0) fail("spacing must be positive");
    if (c.n_paths < 1) fail("n_paths must be >= 1");
    if (c.power_budget <= 0.0) fail("power_budget must be positive");
    if (c.noise_var <= 0.0) fail("noise_var must be positive");
    if (c.rolloff <= 0.0 || c.rolloff > 1.0) fail("rolloff must be in (0, 1]");
    if (c.taps() < 1) fail("cp_len must be >= 1");
    if (c.ts() <= 0.0) fail("sample_period must be positive");
}

// Field names in the JSON document mirror the struct members one-to-one.
inline SystemConfig config_from_json(const nlohmann::json& j) {
    SystemConfig c;
    try {
        c.n_tx = j.at("n_tx").get<int>();
        c.n_rx = j.at("n_rx").get<int>();
        c.n_rf = j.at("n_rf").get<int>();
        c.n_streams = j.at("n_streams").get<int>();
        c.n_subcarriers = j.at("n_subcarriers").get<int>();
        c.carrier_hz = j.at("carrier_hz").get<double>();
        c.bandwidth_hz = j.at("bandwidth_hz").get<double>();
        c.n_paths = j.at("n_paths").get<int>();
        c.spacing = j.value("spacing", 0.5);
        c.power_budget = j.value("power_budget", 0.0);
        c.noise_var = j.value("noise_var", 1.0);
        c.rolloff = j.value("rolloff", 1.0);
        c.cp_len = j.value("cp_len", 0);
        c.sample_period = j.value("sample_period", 0.0);
        c.channel_norm = j.value("channel_norm", false);
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("config: ") + e.what());
    }
    return c;
}

inline SystemConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("config: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("config: ") + e.what());
    }
    return config_from_json(j);
}

} // namespace hbfsim
