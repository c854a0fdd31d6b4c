// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mfso/rng.hpp"

#include <string>

namespace mfso {

// Gamma-distributed fog attenuation: I_a = exp(-T), T ~ Gamma(k, rate z), z = 4.343/(beta l).
struct FogParams {
    double k = 0.0;
    double beta = 0.0;
    double l = 0.0; // km

    FogParams() = default;
    FogParams(double k, double beta, double l_km);

    double z() const { return 4.343 / (beta * l); }
    void validate() const;
};

enum class FogPreset { dense, thick, moderate, light };

FogPreset parse_fog_preset(const std::string& name);
const char* to_string(FogPreset p);

FogParams fog_preset(FogPreset p, double l_km);
FogParams fog_preset(const std::string& name, double l_km);

double fog_pdf(const FogParams& p, double ia);
double fog_mean(const FogParams& p);

// P(I_a <= ia) = Q(k, z ln(1/ia)).
double fog_cdf(const FogParams& p, double ia);

double fog_sample(const FogParams& p, Rng& rng);

// Optical depth T = -ln I_a of one draw; same stream consumption as fog_sample.
double fog_sample_depth(const FogParams& p, Rng& rng);

} // namespace mfso
