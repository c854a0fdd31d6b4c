// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mfso/fog.hpp"
#include "mfso/pointing.hpp"
#include "mfso/specfun.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace mfso {

enum class Detection { hd = 1, imdd = 2 };

inline int exponent(Detection d) { return static_cast<int>(d); }
const char* to_string(Detection d);

double db_to_linear(double db);
double linear_to_db(double x);

// Fog + pointing + detection + average SNR. Internally everything is expressed in
// the log-irradiance variable Y = ln(A0 / I) = T + W, where T is the fog optical
// depth and W = 2 s^2 / (t wL^2) the pointing loss; gamma = gamma_max exp(-r Y).
class ChannelModel {
public:
    ChannelModel(const FogParams& fog, const PointingGeometry& geometry, Detection det, double mu_linear,
                 const SeriesControl& series = {});
    ChannelModel(const FogParams& fog, const DerivedPointing& pointing, Detection det, double mu_linear,
                 const SeriesControl& series = {});

    const FogParams& fog() const { return fog_; }
    const DerivedPointing& pointing() const { return pointing_; }
    const std::optional<PointingGeometry>& geometry() const { return geometry_; }
    Detection detection() const { return det_; }
    int r() const { return exponent(det_); }
    double mu() const { return mu_; }
    const SeriesControl& series() const { return series_; }

    ChannelModel with_mu(double mu_linear) const;
    ChannelModel with_detection(Detection det) const;
    ChannelModel with_series(const SeriesControl& s) const;

    double k() const { return fog_.k; }
    double z() const { return z_; }
    double xi() const { return pointing_.xi; }
    double q() const { return pointing_.q; }
    double A0() const { return pointing_.A0; }
    double a_h() const { return a_h_; }
    double eps() const { return eps_; }
    // varpi = 2z - (1+q^2) xi / q
    double varpi() const { return 2.0 * z_ - 2.0 * a_h_; }

    double fog_mean() const { return fog_mean_; }
    double ip_mean() const { return ip_mean_; }
    double mean_irradiance() const { return fog_mean_ * ip_mean_; }
    // E[I] / A0
    double rho() const { return mean_irradiance() / pointing_.A0; }

    double gamma_max() const;
    double log_gamma_max() const { return log_gamma_max_; }

    // Y <-> gamma and Y <-> I maps.
    double y_of_gamma(double gamma) const;
    double gamma_of_y(double y) const;
    double y_of_irradiance(double I) const;

    // Moments of Y (used to place quadrature breakpoints).
    double y_mean() const;
    double y_stddev() const;

private:
    void init();

    FogParams fog_;
    DerivedPointing pointing_;
    std::optional<PointingGeometry> geometry_;
    Detection det_;
    double mu_;
    SeriesControl series_;

    double z_ = 0.0, a_h_ = 0.0, eps_ = 0.0;
    double fog_mean_ = 0.0, ip_mean_ = 0.0;
    double log_gamma_max_ = 0.0;
};

enum class EvalPath { closed, quadrature };
const char* to_string(EvalPath p);

struct PathValue {
    double value = 0.0;
    EvalPath path = EvalPath::quadrature;
};

// How the density of Y is evaluated.
//   series:      the binomial / Bessel double series (throws NonConvergenceError on budget exhaustion)
//   convolution: numerical convolution of the fog and pointing densities
//   automatic:   series unless the Bessel sum peaks beyond a fixed index, then convolution
enum class DensityMethod { automatic, series, convolution };

// Density of Y at y > 0.
double y_density(const ChannelModel& m, double y, DensityMethod method = DensityMethod::automatic);
double log_y_density(const ChannelModel& m, double y, DensityMethod method = DensityMethod::automatic);

double composite_irradiance_pdf(const ChannelModel& m, double I, DensityMethod method = DensityMethod::automatic);
double snr_pdf(const ChannelModel& m, double gamma, DensityMethod method = DensityMethod::automatic);

enum class CdfMethod { automatic, closed, quadrature };

// F(x) = P(gamma <= x). automatic picks the closed form for integer k and falls back
// to quadrature (tagged) when the closed form is not applicable or not well conditioned.
PathValue snr_cdf(const ChannelModel& m, double x, CdfMethod method = CdfMethod::automatic);

// 1 - F(x), computed directly so that small upper tails keep full relative accuracy.
PathValue snr_survival(const ChannelModel& m, double x, CdfMethod method = CdfMethod::automatic);

// J(c, Y) = int_0^Y e^(-c y) g(y) dy, the building block of every moment.
// Closed form requires integer k; it throws DomainError / NonConvergenceError otherwise.
double y_head_moment_closed(const ChannelModel& m, double c, double Y, double* condition = nullptr);
double y_head_moment_quadrature(const ChannelModel& m, double c, double Y);

// int_lo^hi weight(y) g(y) dy by panelled adaptive quadrature; extra_points adds
// breakpoints where the weight changes quickly.
double y_weighted_integral(const ChannelModel& m, const std::function<double(double)>& weight, double lo, double hi,
                           const std::vector<double>& extra_points = {});

// Negligible pointing error limit.
double fog_only_gamma_max(const ChannelModel& m);
double snr_pdf_fog_only(const ChannelModel& m, double gamma);
double snr_survival_fog_only(const ChannelModel& m, double x);

// Mean of 10 log10(gamma) over gamma >= threshold.
double effective_avg_snr_db(const ChannelModel& m, double threshold_db = 7.1);

} // namespace mfso
