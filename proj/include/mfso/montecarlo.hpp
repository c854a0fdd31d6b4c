// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mfso/tmos_acm.hpp"

#include <cstdint>
#include <vector>

namespace mfso {

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
    long long n = 0;
    bool defined = true; // false when no trial qualified
};

enum class Sampler { hoyt, geometric };

struct McConfig {
    long long n_samples = 1000000;
    std::uint64_t seed = 1;
    int workers = 1;
    Sampler sampler = Sampler::hoyt;

    void validate() const;
};

// Trials are processed in fixed blocks; block b draws from make_substream(seed, b)
// and block results are merged in index order, so output does not depend on workers.
inline constexpr long long kMcBlockSize = 4096;

std::vector<double> simulate_irradiance(const ChannelModel& m, const McConfig& mc);
std::vector<double> simulate_snr(const ChannelModel& m, const McConfig& mc);

// n_samples counts TMOS trials; each trial draws H independent beams.
McEstimate mc_outage(const ChannelModel& m, const TmosConfig& c, const McConfig& mc);
McEstimate mc_ansb(const ChannelModel& m, const TmosConfig& c, const McConfig& mc);
McEstimate mc_ase(const ChannelModel& m, const TmosConfig& c, const AcmCodeTable& t, const McConfig& mc);
McEstimate mc_system_ase(const ChannelModel& m, const TmosConfig& c, const AcmCodeTable& t, const McConfig& mc);
McEstimate mc_ber(const ChannelModel& m, const TmosConfig& c, const AcmCodeTable& t, const McConfig& mc);

// All TMOS statistics from one pass over the same trials.
struct TmosMcSummary {
    McEstimate outage, ansb, ase, system_ase, ber;
};
TmosMcSummary mc_tmos(const ChannelModel& m, const TmosConfig& c, const AcmCodeTable& t, const McConfig& mc);

} // namespace mfso
