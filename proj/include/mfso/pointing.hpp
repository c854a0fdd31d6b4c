// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mfso/rng.hpp"

#include <array>

namespace mfso {

struct PointingGeometry {
    double L = 500.0;               // link distance, m
    double alpha_d = 0.39269908169872414; // boresight azimuth, rad (pi/8)
    double beta_d = 1.9634954084936207;   // boresight polar angle, rad (5 pi/8)
    double sigma = 1.0;             // displacement scale
    double r0 = 0.1;                // receiver lens radius, m
    double wL = 0.3;                // beamwidth at L, m

    void validate() const;
};

struct Sym2 {
    double xx = 0.0, xy = 0.0, yy = 0.0;
};

struct DerivedPointing {
    std::array<double, 3> mu_r{};   // (mu_x, mu_y, mu_z), m
    double mu_theta = 0.0, mu_phi = 0.0;
    double sx = 0.0, sy = 0.0, sz = 0.0, sth = 0.0, sph = 0.0;
    double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0, c5 = 0.0;
    Sym2 Sigma_IG;
    double lambda1 = 0.0, lambda2 = 0.0; // lambda1 >= lambda2
    double q = 1.0;
    double Omega = 0.0;
    double v1 = 0.0, v2 = 0.0, t1 = 0.0, t2 = 0.0, t = 0.0;
    double A0 = 0.0;
    double xi = 0.0;
    double wL = 0.0;

    // Exponents of the I_p density: (1+q^2) xi/(2q) and (1-q^2) xi/(2q).
    double a_h() const { return (1.0 + q * q) * xi / (2.0 * q); }
    double eps() const { return (1.0 - q * q) * xi / (2.0 * q); }
};

DerivedPointing derive_pointing(const PointingGeometry& g);

double ip_pdf(const DerivedPointing& d, double ip);
double ip_mean(const DerivedPointing& d);

// Radial displacement s = |(u1, u2)|, u_i ~ N(0, lambda_i).
double hoyt_sample(const DerivedPointing& d, Rng& rng);

// Exact footprint offset from five Gaussian draws (x, y, z, theta, phi).
double geometric_sample(const PointingGeometry& g, Rng& rng);

// Collected fraction A0 exp(-2 s^2 / (t wL^2)).
double ip_map(const DerivedPointing& d, double s);

} // namespace mfso
