// SPDX-License-Identifier: Apache-2.0
#include "mfso/pointing.hpp"

#include "mfso/errors.hpp"
#include "mfso/specfun.hpp"

#include <cmath>

namespace mfso {

namespace {

constexpr double kSingular = 1e-12;

} // namespace

void PointingGeometry::validate() const
{
    if (!(L > 0.0) || !(r0 > 0.0) || !(wL > 0.0) || !std::isfinite(L) || !std::isfinite(r0) || !std::isfinite(wL))
        throw DomainError("PointingGeometry: L, r0 and wL must be positive");
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw DomainError("PointingGeometry: sigma must be positive");
    if (!(beta_d > 0.0) || !(beta_d < M_PI))
        throw DomainError("PointingGeometry: beta_d must lie in (0, pi)");
    if (!std::isfinite(alpha_d))
        throw DomainError("PointingGeometry: alpha_d must be finite");
}

DerivedPointing derive_pointing(const PointingGeometry& g)
{
    g.validate();
    DerivedPointing d;
    const double sb = std::sin(g.beta_d), cb = std::cos(g.beta_d);
    const double sa = std::sin(g.alpha_d), ca = std::cos(g.alpha_d);
    if (std::fabs(sb) < kSingular)
        throw SingularGeometryError("derive_pointing: mean polar angle at a pole");
    if (std::fabs(ca) < kSingular)
        throw SingularGeometryError("derive_pointing: mean azimuth at pi/2");

    d.mu_r = {g.L * sb * ca, g.L * sb * sa, g.L * cb};
    d.mu_theta = g.alpha_d;
    d.mu_phi = g.beta_d;
    const double mx = d.mu_r[0];

    d.sx = g.sigma * g.r0 * 0.8;
    d.sy = g.sigma * g.r0 * 0.27;
    d.sz = g.sigma * g.r0 * 0.53;
    d.sth = g.sigma * g.r0 / g.L * 0.44;
    d.sph = g.sigma * g.r0 / g.L * 0.9;

    const double tt = std::tan(d.mu_theta), ct = std::cos(d.mu_theta);
    const double sp = std::sin(d.mu_phi), cotp = std::cos(d.mu_phi) / sp;
    d.c1 = -tt;
    d.c2 = -mx / (ct * ct);
    d.c3 = -mx / (sp * sp * ct);
    d.c4 = -mx * cotp * tt / ct;
    d.c5 = -cotp / ct;

    const double vx = d.sx * d.sx, vy = d.sy * d.sy, vz = d.sz * d.sz;
    const double vth = d.sth * d.sth, vph = d.sph * d.sph;
    d.Sigma_IG.xx = vy + d.c1 * d.c1 * vx + d.c2 * d.c2 * vth;
    d.Sigma_IG.xy = d.c1 * d.c5 * vx + d.c2 * d.c4 * vth;
    d.Sigma_IG.yy = vz + d.c3 * d.c3 * vph + d.c4 * d.c4 * vth + d.c5 * d.c5 * vx;

    const double tr = d.Sigma_IG.xx + d.Sigma_IG.yy;
    const double det = d.Sigma_IG.xx * d.Sigma_IG.yy - d.Sigma_IG.xy * d.Sigma_IG.xy;
    const double half = 0.5 * (d.Sigma_IG.xx - d.Sigma_IG.yy);
    d.lambda1 = 0.5 * tr + std::hypot(half, d.Sigma_IG.xy);
    d.lambda2 = d.lambda1 > 0.0 ? std::max(0.0, det / d.lambda1) : 0.0;
    d.Omega = d.lambda1 + d.lambda2;
    d.q = std::sqrt(d.lambda2 / d.lambda1);
    if (!(d.q > 0.0))
        throw SingularGeometryError("derive_pointing: degenerate displacement covariance");

    d.wL = g.wL;
    d.v1 = g.r0 / g.wL * std::sqrt(M_PI / 2.0);
    const double geo = std::fabs(sp * ct);
    d.v2 = d.v1 * geo;
    const double spi = std::sqrt(M_PI);
    d.t1 = spi * specfun::erf(d.v1) / (2.0 * d.v1 * std::exp(-d.v1 * d.v1));
    d.t2 = spi * specfun::erf(d.v2) / (2.0 * d.v2 * std::exp(-d.v2 * d.v2) * geo * geo);
    d.t = 0.5 * (d.t1 + d.t2);
    d.A0 = specfun::erf(d.v1) * specfun::erf(d.v2);
    d.xi = (1.0 + d.q * d.q) * d.t * g.wL * g.wL / (4.0 * d.q * d.Omega);
    return d;
}

double ip_pdf(const DerivedPointing& d, double ip)
{
    if (!(ip > 0.0) || !(ip <= d.A0))
        throw DomainError("ip_pdf: ip must lie in (0, A0]");
    const double w = std::log(d.A0 / ip);
    const double e = d.eps();
    double lv = std::log(d.xi / d.A0) - (d.a_h() - 1.0) * w + e * w + std::log(specfun::bessel_i0_scaled(e * w));
    return std::exp(lv);
}

double ip_mean(const DerivedPointing& d)
{
    return d.A0 * d.xi / std::sqrt((1.0 + d.q * d.xi) * (1.0 + d.xi / d.q));
}

double hoyt_sample(const DerivedPointing& d, Rng& rng)
{
    std::normal_distribution<double> n(0.0, 1.0);
    double u1 = std::sqrt(d.lambda1) * n(rng);
    double u2 = std::sqrt(d.lambda2) * n(rng);
    return std::hypot(u1, u2);
}

double geometric_sample(const PointingGeometry& g, Rng& rng)
{
    const double sb = std::sin(g.beta_d), ca = std::cos(g.alpha_d);
    if (std::fabs(sb) < kSingular || std::fabs(ca) < kSingular)
        throw SingularGeometryError("geometric_sample: singular mean angles");
    const double mx = g.L * sb * ca, my = g.L * sb * std::sin(g.alpha_d), mz = g.L * std::cos(g.beta_d);
    const double s = g.sigma * g.r0;
    std::normal_distribution<double> n(0.0, 1.0);
    for (int attempt = 0; attempt < 100; ++attempt) {
        double x = mx + 0.8 * s * n(rng);
        double y = my + 0.27 * s * n(rng);
        double z = mz + 0.53 * s * n(rng);
        double th = g.alpha_d + 0.44 * s / g.L * n(rng);
        double ph = g.beta_d + 0.9 * s / g.L * n(rng);
        double cth = std::cos(th), sph = std::sin(ph);
        if (std::fabs(cth) < kSingular || std::fabs(sph) < kSingular)
            continue;
        // Mean footprint centre is the origin for mean angles equal to the boresight angles.
        double by = y - x * std::tan(th);
        double bz = z - x * (std::cos(ph) / sph) / cth;
        return std::hypot(by, bz);
    }
    throw NonConvergenceError("geometric_sample: repeated singular draws");
}

double ip_map(const DerivedPointing& d, double s)
{
    if (!(s >= 0.0))
        throw DomainError("ip_map: s must be >= 0");
    return d.A0 * std::exp(-2.0 * s * s / (d.t * d.wL * d.wL));
}

} // namespace mfso
