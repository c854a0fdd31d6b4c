// SPDX-License-Identifier: Apache-2.0
#include "mfso/fog.hpp"

#include "mfso/errors.hpp"
#include "mfso/specfun.hpp"

#include <cmath>

namespace mfso {

FogParams::FogParams(double k_, double beta_, double l_km) : k(k_), beta(beta_), l(l_km) { validate(); }

void FogParams::validate() const
{
    if (!(k > 0.0) || !(beta > 0.0) || !(l > 0.0) || !std::isfinite(k) || !std::isfinite(beta) || !std::isfinite(l))
        throw DomainError("FogParams: k, beta and l must be positive and finite");
}

FogPreset parse_fog_preset(const std::string& name)
{
    if (name == "dense")
        return FogPreset::dense;
    if (name == "thick")
        return FogPreset::thick;
    if (name == "moderate")
        return FogPreset::moderate;
    if (name == "light")
        return FogPreset::light;
    throw DomainError("unknown fog preset '" + name + "'");
}

const char* to_string(FogPreset p)
{
    switch (p) {
    case FogPreset::dense: return "dense";
    case FogPreset::thick: return "thick";
    case FogPreset::moderate: return "moderate";
    case FogPreset::light: return "light";
    }
    return "?";
}

FogParams fog_preset(FogPreset p, double l_km)
{
    switch (p) {
    case FogPreset::dense: return {36.05, 11.91, l_km};
    case FogPreset::thick: return {6.00, 23.00, l_km};
    case FogPreset::moderate: return {5.49, 12.06, l_km};
    case FogPreset::light: return {2.32, 13.12, l_km};
    }
    throw DomainError("unknown fog preset");
}

FogParams fog_preset(const std::string& name, double l_km) { return fog_preset(parse_fog_preset(name), l_km); }

double fog_pdf(const FogParams& p, double ia)
{
    if (!(ia > 0.0) || !(ia <= 1.0))
        throw DomainError("fog_pdf: ia must lie in (0, 1]");
    const double z = p.z();
    const double t = -std::log(ia);
    if (t == 0.0)
        return p.k > 1.0 ? 0.0 : (p.k == 1.0 ? z : INFINITY);
    double lv = p.k * std::log(z) - specfun::log_gamma(p.k) + (p.k - 1.0) * std::log(t) + (z - 1.0) * std::log(ia);
    return std::exp(lv);
}

double fog_mean(const FogParams& p)
{
    const double z = p.z();
    return std::exp(-p.k * std::log1p(1.0 / z));
}

double fog_cdf(const FogParams& p, double ia)
{
    if (!(ia > 0.0))
        return 0.0;
    if (ia >= 1.0)
        return 1.0;
    return specfun::gamma_q(p.k, p.z() * -std::log(ia));
}

double fog_sample_depth(const FogParams& p, Rng& rng)
{
    std::gamma_distribution<double> gd(p.k, 1.0 / p.z());
    return gd(rng);
}

double fog_sample(const FogParams& p, Rng& rng) { return std::exp(-fog_sample_depth(p, rng)); }

} // namespace mfso
