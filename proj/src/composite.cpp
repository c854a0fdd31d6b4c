// SPDX-License-Identifier: Apache-2.0
#include "mfso/composite.hpp"

#include "mfso/errors.hpp"
#include "mfso/quadrature.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/hypergeometric_1F1.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace mfso {

namespace {

constexpr double kLn10 = 2.302585092994046;
// Bessel sums peaking past this index go to the convolution evaluator.
constexpr double kSeriesPeakLimit = 150.0;
// Closed forms whose term magnitudes exceed the result by more than this are rejected.
constexpr double kMaxCondition = 1e8;
constexpr double kQuadTol = 1e-11;

bool is_integer(double x) { return x == std::floor(x); }

struct LogSum {
    double m = -std::numeric_limits<double>::infinity();
    double s = 0.0;
    void add(double lt)
    {
        if (lt == -std::numeric_limits<double>::infinity())
            return;
        if (lt > m) {
            s = s * std::exp(m - lt) + 1.0;
            m = lt;
        } else {
            s += std::exp(lt - m);
        }
    }
    double log() const { return s > 0.0 ? m + std::log(s) : -std::numeric_limits<double>::infinity(); }
};

double log_fog_depth_density(double k, double z, double t)
{
    if (!(t > 0.0))
        return -std::numeric_limits<double>::infinity();
    return k * std::log(z) - std::lgamma(k) + (k - 1.0) * std::log(t) - z * t;
}

// log H_m, H_m = int_0^1 u^(2m) (1-u)^(k-1) e^(-X u) du, through Kummer's integral.
double log_hm_kummer(int mm, double k, double X)
{
    const double a = 2.0 * mm + 1.0;
    const double b = a + k;
    double lb = std::lgamma(a) + std::lgamma(k) - std::lgamma(b);
    try {
        if (X > 0.0)
            return lb - X + boost::math::log_hypergeometric_1F1(k, b, X);
        return lb + boost::math::log_hypergeometric_1F1(a, b, -X);
    } catch (const std::exception& e) {
        throw NonConvergenceError(std::string("composite density: 1F1 evaluation failed: ") + e.what());
    }
}

// Binomial form of H_m (integer k only). Returns NaN when poorly conditioned.
double log_hm_binomial(int mm, int k, double X)
{
    long double s = 0.0L, sa = 0.0L;
    for (int n = 0; n <= k - 1; ++n) {
        double c = specfun::gen_binomial(k - 1.0, n);
        double t = c * specfun::scaled_lower_gamma(2.0 * mm + n + 1.0, X);
        if (n % 2 == 1)
            t = -t;
        s += t;
        sa += std::fabs(t);
    }
    if (!(s > 0.0L) || sa / s > 1e6L)
        return std::numeric_limits<double>::quiet_NaN();
    return std::log(static_cast<double>(s));
}

double log_density_series(const ChannelModel& m, double y)
{
    const double k = m.k(), z = m.z(), xi = m.xi(), eps = m.eps();
    const double B = 0.5 * y;
    const double X = -m.varpi() * B;
    const double lpre = std::log(2.0) + k * std::log(z) + std::log(xi) - std::lgamma(k) - z * y + (k - 1.0) * std::log(y) +
                        std::log(B);
    const bool int_k = is_integer(k) && k < 64.0;
    const SeriesControl& ctl = m.series();
    const double leb = eps > 0.0 ? std::log(eps * B) : -std::numeric_limits<double>::infinity();
    const double ltol = std::log(ctl.abs_tol);

    LogSum sum;
    double prev = -std::numeric_limits<double>::infinity();
    for (int mm = 0; mm < ctl.max_terms; ++mm) {
        double lh = std::numeric_limits<double>::quiet_NaN();
        if (int_k)
            lh = log_hm_binomial(mm, static_cast<int>(k), X);
        if (std::isnan(lh))
            lh = log_hm_kummer(mm, k, X);
        double lt = (mm == 0 ? 0.0 : 2.0 * mm * leb) - 2.0 * std::lgamma(mm + 1.0) + lh;
        sum.add(lt);
        if (eps == 0.0)
            return lpre + sum.log();
        if (mm > 0 && lt < prev && lt - sum.log() < ltol)
            return lpre + sum.log();
        prev = lt;
    }
    throw NonConvergenceError("composite density: Bessel series exceeded max_terms");
}

double density_convolution(const ChannelModel& m, double y)
{
    const double k = m.k(), z = m.z(), xi = m.xi(), eps = m.eps();
    const double decay = m.a_h() - eps; // q xi
    auto fw = [&](double w) {
        double lv = std::log(xi) - decay * w + std::log(specfun::bessel_i0_scaled(eps * w));
        return lv;
    };
    auto integrand = [&](double w) {
        if (w < 0.0 || w > y)
            return 0.0;
        double lt = log_fog_depth_density(k, z, y - w);
        double v = std::exp(fw(w) + lt);
        return std::isfinite(v) ? v : 0.0;
    };
    const double w1 = std::min(y, 10.0 / decay);
    const double w2 = std::min(y, 80.0 / decay);
    double v = quad::integrate_singular(integrand, 0.0, w1, 1e-12);
    if (w2 > w1)
        v += quad::integrate_singular(integrand, w1, w2, 1e-12);
    return v;
}

bool use_series(const ChannelModel& m, double y, DensityMethod method)
{
    if (method == DensityMethod::series)
        return true;
    if (method == DensityMethod::convolution)
        return false;
    return m.eps() * 0.5 * y <= kSeriesPeakLimit;
}

std::vector<double> y_breakpoints(const ChannelModel& m, double lo, double hi)
{
    const double mu = m.y_mean(), sd = m.y_stddev();
    const double ew = (1.0 + m.q() * m.q()) / (2.0 * m.q() * m.xi());
    std::vector<double> p{lo, hi, ew, 10.0 * ew};
    for (double f : {-4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0})
        p.push_back(mu + f * sd);
    std::vector<double> out;
    for (double v : p)
        if (v >= lo && v <= hi)
            out.push_back(v);
    std::sort(out.begin(), out.end());
    return out;
}

double y_upper(const ChannelModel& m) { return m.y_mean() + 60.0 * m.y_stddev(); }

double head_quadrature(const ChannelModel& m, double c, double lo, double hi)
{
    auto f = [&](double y) {
        if (y <= 0.0)
            return 0.0;
        double lv = log_y_density(m, y) - c * y;
        return std::exp(lv);
    };
    return quad::integrate_panels(f, y_breakpoints(m, lo, hi), kQuadTol);
}

struct ClosedMoment {
    double head = 0.0;  // int_0^Y
    double whole = 0.0; // int_0^inf
    double cond = 1.0;
};

ClosedMoment closed_moment(const ChannelModel& m, double c, double Y, bool want_whole)
{
    const double kd = m.k();
    if (!is_integer(kd) || kd > 200.0)
        throw DomainError("closed form requires integer k");
    const int k = static_cast<int>(kd);
    const double z = m.z(), xi = m.xi(), eps = m.eps();
    const double beta = -0.5 * m.varpi();
    const double cz = z + c;
    if (!(beta + cz > 0.0))
        throw DomainError("closed form: beta + z + c must be positive");
    const double hx = beta / (beta + cz);
    const double lC0 = std::log(2.0) + k * std::log(z) + std::log(xi) - std::lgamma(static_cast<double>(k));
    const SeriesControl& ctl = m.series();

    long double head = 0.0L, whole = 0.0L, abs_head = 0.0L, abs_whole = 0.0L;
    for (int mm = 0; mm < ctl.max_terms; ++mm) {
        double lpm = lC0 - std::log(2.0) - 2.0 * std::lgamma(mm + 1.0);
        if (mm > 0)
            lpm += 2.0 * mm * std::log(0.5 * eps);
        long double bh = 0.0L, bw = 0.0L, bah = 0.0L, baw = 0.0L;
        for (int n = 0; n <= k - 1; ++n) {
            const double a = 2.0 * mm + n + 1.0;
            const int p = k - 1 - n;
            const double coef = specfun::gen_binomial(k - 1.0, n) * ((n % 2) ? -1.0 : 1.0);
            if (Y > 0.0) {
                double sa = 0.0;
                double h = specfun::scaled_gamma_exp_moment(a, beta, cz, p, Y, lpm, &sa);
                bh += static_cast<long double>(coef) * h;
                bah += std::fabs(coef) * sa;
            }
            if (want_whole) {
                const double ap = a + p + 1.0; // k + 2m + 1
                double lw = lpm + std::lgamma(ap) - std::log(a) - ap * std::log(beta + cz);
                double w = std::exp(lw) * specfun::hyp2f1(1.0, ap, a + 1.0, hx);
                bw += static_cast<long double>(coef) * w;
                baw += std::fabs(coef * w);
            }
        }
        head += bh;
        whole += bw;
        abs_head += bah;
        abs_whole += baw;
        if (eps == 0.0)
            break;
        long double scale = std::max(std::fabs(head), std::fabs(whole));
        if (mm > 2 && std::max(bah, baw) <= ctl.abs_tol * 1e-3L * scale)
            break;
        if (mm == ctl.max_terms - 1)
            throw NonConvergenceError("closed form: m-series exceeded max_terms");
    }
    ClosedMoment r;
    r.head = static_cast<double>(head);
    r.whole = static_cast<double>(whole);
    double ch = head != 0.0L ? static_cast<double>(abs_head / std::fabs(head)) : (abs_head == 0.0L ? 1.0 : INFINITY);
    double cw = whole != 0.0L ? static_cast<double>(abs_whole / std::fabs(whole)) : 1.0;
    r.cond = std::max(ch, want_whole ? cw : 1.0);
    return r;
}

} // namespace

const char* to_string(Detection d) { return d == Detection::hd ? "hd" : "imdd"; }

const char* to_string(EvalPath p) { return p == EvalPath::closed ? "closed" : "quadrature"; }

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double x) { return 10.0 * std::log10(x); }

ChannelModel::ChannelModel(const FogParams& fog, const PointingGeometry& geometry, Detection det, double mu_linear,
                           const SeriesControl& series)
    : fog_(fog), pointing_(derive_pointing(geometry)), geometry_(geometry), det_(det), mu_(mu_linear), series_(series)
{
    init();
}

ChannelModel::ChannelModel(const FogParams& fog, const DerivedPointing& pointing, Detection det, double mu_linear,
                           const SeriesControl& series)
    : fog_(fog), pointing_(pointing), det_(det), mu_(mu_linear), series_(series)
{
    init();
}

void ChannelModel::init()
{
    fog_.validate();
    series_.validate();
    if (!(mu_ > 0.0) || !std::isfinite(mu_))
        throw DomainError("ChannelModel: mu must be positive");
    if (!(pointing_.xi > 0.0) || !(pointing_.q > 0.0) || !(pointing_.q <= 1.0) || !(pointing_.A0 > 0.0) ||
        !(pointing_.A0 <= 1.0))
        throw DomainError("ChannelModel: invalid pointing parameters");
    z_ = fog_.z();
    a_h_ = pointing_.a_h();
    eps_ = pointing_.eps();
    fog_mean_ = mfso::fog_mean(fog_);
    ip_mean_ = mfso::ip_mean(pointing_);
    // ln rho without underflow for dense fog
    const double q = pointing_.q, xi = pointing_.xi;
    const double ln_rho = -fog_.k * std::log1p(1.0 / z_) + std::log(xi) - 0.5 * (std::log1p(q * xi) + std::log1p(xi / q));
    log_gamma_max_ = std::log(mu_) - r() * ln_rho;
}

ChannelModel ChannelModel::with_mu(double mu_linear) const
{
    ChannelModel c(*this);
    c.mu_ = mu_linear;
    c.init();
    return c;
}

ChannelModel ChannelModel::with_detection(Detection det) const
{
    ChannelModel c(*this);
    c.det_ = det;
    c.init();
    return c;
}

ChannelModel ChannelModel::with_series(const SeriesControl& s) const
{
    ChannelModel c(*this);
    c.series_ = s;
    c.init();
    return c;
}

double ChannelModel::gamma_max() const
{
    double v = std::exp(log_gamma_max_);
    if (!std::isfinite(v))
        throw OverflowError("gamma_max exceeds double range");
    return v;
}

double ChannelModel::y_of_gamma(double gamma) const { return (log_gamma_max_ - std::log(gamma)) / r(); }

double ChannelModel::gamma_of_y(double y) const { return std::exp(log_gamma_max_ - r() * y); }

double ChannelModel::y_of_irradiance(double I) const
{
    // ln(A0) - ln(I) without cancellation near I = A0
    return std::log1p((pointing_.A0 - I) / I);
}

double ChannelModel::y_mean() const
{
    const double q = pointing_.q, xi = pointing_.xi;
    return fog_.k / z_ + (1.0 + q * q) / (2.0 * q * xi);
}

double ChannelModel::y_stddev() const
{
    const double q = pointing_.q, xi = pointing_.xi;
    const double var_w = (1.0 + q * q * q * q) / (2.0 * q * q * xi * xi);
    return std::sqrt(fog_.k / (z_ * z_) + var_w);
}

double log_y_density(const ChannelModel& m, double y, DensityMethod method)
{
    if (!(y >= 0.0) || !std::isfinite(y))
        throw DomainError("y density: y must be finite and >= 0");
    if (y == 0.0)
        return -std::numeric_limits<double>::infinity();
    if (use_series(m, y, method))
        return log_density_series(m, y);
    return std::log(density_convolution(m, y));
}

double y_density(const ChannelModel& m, double y, DensityMethod method)
{
    return std::exp(log_y_density(m, y, method));
}

double composite_irradiance_pdf(const ChannelModel& m, double I, DensityMethod method)
{
    if (!(I > 0.0) || !(I <= m.A0()))
        throw DomainError("composite_irradiance_pdf: I must lie in (0, A0]");
    const double y = m.y_of_irradiance(I);
    return std::exp(log_y_density(m, y, method) - std::log(I));
}

double snr_pdf(const ChannelModel& m, double gamma, DensityMethod method)
{
    if (!(gamma > 0.0) || !(std::log(gamma) <= m.log_gamma_max() + 1e-14))
        throw DomainError("snr_pdf: gamma outside (0, gamma_max]");
    const double y = std::max(0.0, m.y_of_gamma(gamma));
    return std::exp(log_y_density(m, y, method) - std::log(m.r() * gamma));
}

double y_head_moment_closed(const ChannelModel& m, double c, double Y, double* condition)
{
    ClosedMoment cm = closed_moment(m, c, Y, false);
    if (condition)
        *condition = cm.cond;
    return cm.head;
}

double y_head_moment_quadrature(const ChannelModel& m, double c, double Y)
{
    if (!(Y > 0.0))
        return 0.0;
    if (c == 0.0) {
        const double up = y_upper(m);
        if (Y >= up)
            return 1.0;
        if (Y > m.y_mean())
            return 1.0 - head_quadrature(m, 0.0, Y, up);
    }
    return head_quadrature(m, c, 0.0, Y);
}

double y_weighted_integral(const ChannelModel& m, const std::function<double(double)>& weight, double lo, double hi,
                           const std::vector<double>& extra_points)
{
    if (!(hi > lo))
        return 0.0;
    auto f = [&](double y) {
        if (y <= 0.0)
            return 0.0;
        double w = weight(y);
        if (w == 0.0)
            return 0.0;
        return w * y_density(m, y);
    };
    std::vector<double> pts = y_breakpoints(m, lo, hi);
    for (double v : extra_points)
        if (v > lo && v < hi)
            pts.push_back(v);
    return quad::integrate_panels(f, pts, kQuadTol);
}

namespace {

// Shared body of snr_cdf / snr_survival. Returns F(x) when want_cdf, else 1 - F(x).
PathValue cdf_impl(const ChannelModel& m, double x, CdfMethod method, bool want_cdf)
{
    if (!(x > 0.0) || !std::isfinite(x))
        throw DomainError("snr_cdf: x must be positive");
    const double Y = m.y_of_gamma(x);
    if (Y <= 0.0)
        return {want_cdf ? 1.0 : 0.0, is_integer(m.k()) ? EvalPath::closed : EvalPath::quadrature};

    bool try_closed = method == CdfMethod::closed || (method == CdfMethod::automatic && is_integer(m.k()));
    if (try_closed) {
        try {
            ClosedMoment cm = closed_moment(m, 0.0, Y, want_cdf);
            if (cm.cond <= kMaxCondition || method == CdfMethod::closed) {
                double v = want_cdf ? cm.whole - cm.head : cm.head;
                return {std::clamp(v, 0.0, 1.0), EvalPath::closed};
            }
        } catch (const DomainError&) {
            if (method == CdfMethod::closed)
                throw;
        } catch (const NonConvergenceError&) {
            if (method == CdfMethod::closed)
                throw;
        } catch (const OverflowError&) {
            if (method == CdfMethod::closed)
                throw;
        }
    }
    const double up = y_upper(m);
    double v;
    if (Y >= up) {
        v = want_cdf ? 0.0 : 1.0;
    } else if (Y > m.y_mean()) {
        double tail = head_quadrature(m, 0.0, Y, up); // F
        v = want_cdf ? tail : 1.0 - tail;
    } else {
        double head = head_quadrature(m, 0.0, 0.0, Y); // 1 - F
        v = want_cdf ? 1.0 - head : head;
    }
    return {std::clamp(v, 0.0, 1.0), EvalPath::quadrature};
}

} // namespace

PathValue snr_cdf(const ChannelModel& m, double x, CdfMethod method) { return cdf_impl(m, x, method, true); }

PathValue snr_survival(const ChannelModel& m, double x, CdfMethod method) { return cdf_impl(m, x, method, false); }

double fog_only_gamma_max(const ChannelModel& m)
{
    return std::exp(std::log(m.mu()) + m.r() * m.k() * std::log1p(1.0 / m.z()));
}

double snr_pdf_fog_only(const ChannelModel& m, double gamma)
{
    const double lgm = std::log(m.mu()) + m.r() * m.k() * std::log1p(1.0 / m.z());
    if (!(gamma > 0.0) || !(std::log(gamma) <= lgm + 1e-14))
        throw DomainError("snr_pdf_fog_only: gamma outside (0, gamma_max]");
    const double t = std::max(0.0, (lgm - std::log(gamma)) / m.r());
    return std::exp(log_fog_depth_density(m.k(), m.z(), t) - std::log(m.r() * gamma));
}

double snr_survival_fog_only(const ChannelModel& m, double x)
{
    if (!(x > 0.0))
        throw DomainError("snr_survival_fog_only: x must be positive");
    const double lgm = std::log(m.mu()) + m.r() * m.k() * std::log1p(1.0 / m.z());
    const double t = (lgm - std::log(x)) / m.r();
    if (t <= 0.0)
        return 0.0;
    return specfun::gamma_p(m.k(), m.z() * t);
}

double effective_avg_snr_db(const ChannelModel& m, double threshold_db)
{
    const double Y = m.y_of_gamma(db_to_linear(threshold_db));
    if (!(Y > 0.0))
        throw DegenerateTruncationError("effective_avg_snr_db: threshold above gamma_max");
    auto fy = [&](double y) { return y <= 0.0 ? 0.0 : y * y_density(m, y); };
    const double p = y_head_moment_quadrature(m, 0.0, Y);
    if (!(p > 1e-300))
        throw DegenerateTruncationError("effective_avg_snr_db: no mass above threshold");
    const double m1 = quad::integrate_panels(fy, y_breakpoints(m, 0.0, Y), kQuadTol);
    return linear_to_db(m.mu()) - 10.0 * m.r() / kLn10 * (std::log(m.rho()) + m1 / p);
}

} // namespace mfso
