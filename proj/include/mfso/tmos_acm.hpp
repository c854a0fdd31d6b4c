// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mfso/composite.hpp"

#include <vector>

namespace mfso {

struct AcmCode {
    int u = 0;
    double M = 0.0;
    double a = 0.0;
    double b = 0.0;
    double gammaT_db = 0.0;
};

struct AcmCodeTable {
    std::vector<AcmCode> rows;
    double target_ber = 1e-3;

    // Trellis-coded M-QAM fits, u = 1..8.
    static AcmCodeTable standard();

    int n_max() const { return static_cast<int>(rows.size()); }
    const AcmCode& row(int u) const;
    double rate(int u) const { return u + 0.5; }
    double threshold(int u) const; // linear
    void validate() const;
};

struct TmosConfig {
    double gamma_T_db = 14.0;
    int H = 5;
    double gamma_TH_OUT_db = 14.0;

    void validate() const;
};

// Truncated density of the selected beam.
double tmos_pdf(const ChannelModel& m, const TmosConfig& c, double gamma);

PathValue outage_probability(const ChannelModel& m, const TmosConfig& c);
PathValue ansb(const ChannelModel& m, const TmosConfig& c);

// F_u for u = 1..N (index u-1): probability that the selected beam uses code u.
struct RegionProbabilities {
    std::vector<double> F;
    EvalPath path = EvalPath::quadrature;
};
RegionProbabilities region_probabilities(const ChannelModel& m, const TmosConfig& c, const AcmCodeTable& t);

PathValue ase(const ChannelModel& m, const TmosConfig& c, const AcmCodeTable& t);
PathValue system_ase(const ChannelModel& m, const TmosConfig& c, const AcmCodeTable& t);

double code_ber(const AcmCodeTable& t, int u, double gamma);

enum class BerMethod { automatic, closed, quadrature };

struct BerResult {
    double value = 0.0;
    EvalPath path = EvalPath::quadrature;
    std::vector<double> per_region; // normalized BER_u terms, index u-1
};

BerResult avg_ber(const ChannelModel& m, const TmosConfig& c, const AcmCodeTable& t,
                  BerMethod method = BerMethod::automatic);

// Negligible pointing error limit (fog-only density).
BerResult avg_ber_fog_only(const ChannelModel& m, const TmosConfig& c, const AcmCodeTable& t,
                           BerMethod method = BerMethod::automatic);

} // namespace mfso
