// SPDX-License-Identifier: Apache-2.0
#pragma once

// Transceiver power models for the three architectures and the SE/power
// energy-efficiency ratio. Device values are milliwatts; totals are watts.

#include <map>
#include <stdexcept>
#include <string>

#include "hbfsim/config.hpp"
#include "hbfsim/errors.hpp"

namespace hbfsim {

struct PowerModel {
    double p_lna = 39.0;   // low-noise amplifier
    double p_sp = 19.5;    // splitter
    double p_c = 19.5;     // combiner
    double p_sw = 5.0;     // switch
    double p_m = 19.0;     // mixer
    double p_lo = 5.0;     // local oscillator
    double p_lpf = 14.0;   // low-pass filter
    double p_bbamp = 5.0;  // baseband amplifier
    double p_adc = 240.0;  // analog-to-digital converter
    std::map<int, double> p_ps_by_bits = {{1, 10.0}, {2, 20.0}, {4, 40.0}};

    // One RF chain: mixer + LO + LPF + baseband amplifier (43 mW at defaults).
    double p_rf() const { return p_m + p_lo + p_lpf + p_bbamp; }
};

enum class Architecture { dbf, ps_hbf, sw_hbf };

// Total transceiver power in watts. Antennas on both sides carry an LNA;
// the digital architecture gives every antenna its own RF chain and ADC
// pair, while the hybrid ones route N_RF chains through a splitter plus a
// per-chain analog network (phase shifters or switches).
inline double power_total(Architecture arch, const SystemConfig& cfg, const PowerModel& m,
                          int ps_bits = 4) {
    const double ants = static_cast<double>(cfg.n_tx + cfg.n_rx);
    const double chains = 2.0 * cfg.n_rf;
    double mw = 0.0;
    switch (arch) {
    case Architecture::dbf:
        mw = ants * (m.p_lna + m.p_rf() + 2.0 * m.p_adc);
        break;
    case Architecture::ps_hbf: {
        const auto it = m.p_ps_by_bits.find(ps_bits);
        if (it == m.p_ps_by_bits.end())
            throw config_error("power_total: no phase-shifter power for " +
                               std::to_string(ps_bits) + " bits");
        mw = ants * (m.p_lna + m.p_sp + cfg.n_rf * it->second) +
             chains * (m.p_rf() + m.p_c + 2.0 * m.p_adc);
        break;
    }
    case Architecture::sw_hbf:
        mw = ants * (m.p_lna + m.p_sp + cfg.n_rf * m.p_sw) +
             chains * (m.p_rf() + m.p_c + 2.0 * m.p_adc);
        break;
    }
    return mw / 1000.0;
}

// EE = average SE / total power.
inline double energy_efficiency(double avg_se, double power_w) {
    if (power_w <= 0.0)
        throw std::invalid_argument("energy_efficiency: power must be positive");
    return avg_se / power_w;
}

} // namespace hbfsim
