// SPDX-License-Identifier: Apache-2.0
#include "mfso/tmos_acm.hpp"

#include "mfso/errors.hpp"
#include "mfso/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

namespace mfso {

namespace {

constexpr double kMinSelect = 1e-12;
constexpr double kLseriesRelTol = 1e-10;
constexpr int kLseriesCap = 60;
constexpr int kGrowthLimit = 20;
// Largest tolerated cancellation factor in the alternating l-series.
constexpr double kLseriesMaxCondition = 1e6;

bool is_integer_k(const ChannelModel& m) { return m.k() == std::floor(m.k()); }

EvalPath merge(EvalPath a, EvalPath b) { return (a == EvalPath::closed && b == EvalPath::closed) ? a : EvalPath::quadrature; }

// Integration interval [lo, hi] of region u (1-based), clipped to [gamma_T, gamma_max].
struct Region {
    int u = 0;
    double lo = 0.0, hi = 0.0;
    bool top = false;
};

std::vector<Region> active_regions(const AcmCodeTable& t, double gT, double gmax)
{
    std::vector<Region> out;
    const int N = t.n_max();
    for (int u = 1; u <= N; ++u) {
        double lo = std::max(t.threshold(u), gT);
        double hi = (u < N) ? std::min(t.threshold(u + 1), gmax) : gmax;
        if (lo < hi)
            out.push_back({u, lo, hi, hi >= gmax});
    }
    return out;
}

// Shared machinery for the general and the fog-only BER: everything is parameterised
// by the variable v (Y or T), with gamma = gmax e^{-r v}.
struct BerBackend {
    double log_gmax = 0.0;
    int r = 1;
    // P(v <= V)
    std::function<double(double)> head_mass;
    // int_0^V e^{-c v} density(v) dv (closed form); sets *cond
    std::function<double(double, double, double*)> head_moment_closed;
    // int_lo^hi w(v) density(v) dv
    std::function<double(const std::function<double(double)>&, double, double, const std::vector<double>&)> weighted;
    EvalPath mass_path = EvalPath::quadrature;
};

double v_of(const BerBackend& be, double gamma) { return std::max(0.0, (be.log_gmax - std::log(gamma)) / be.r); }

// Unnormalized int_lo^hi a e^{-b gamma/M} f(gamma) dgamma by quadrature.
double region_ber_quadrature(const BerBackend& be, const AcmCode& code, double lo, double hi)
{
    const double v_hi = v_of(be, hi), v_lo = v_of(be, lo);
    const double lbm = std::log(code.b / code.M);
    auto w = [&](double v) { return code.a * std::exp(-std::exp(lbm + be.log_gmax - be.r * v)); };
    std::vector<double> extra;
    for (double s : {0.1, 1.0, 3.0, 10.0, 30.0, 100.0})
        extra.push_back((lbm + be.log_gmax - std::log(s)) / be.r);
    return be.weighted(w, v_hi, v_lo, extra);
}

// Same quantity through the Maclaurin l-series of the exponential with closed-form moments.
// F is the probability mass of the region. Returns false (and leaves *out alone) when the
// series is unreliable.
//
// Term l is bounded by a (b hi/M)^l / l! F, so the series loses about e^{2 b hi/M} to
// cancellation; the answer itself is bracketed by a e^{-b hi/M} F and a e^{-b lo/M} F.
bool region_ber_closed(const BerBackend& be, const AcmCode& code, double lo, double hi, double F, double* out,
                       bool strict)
{
    auto reject = [&](const char* why) {
        if (strict)
            throw NonConvergenceError(std::string("avg_ber: l-series ") + why);
        return false;
    };
    if (!(F > 0.0)) {
        *out = 0.0;
        return true;
    }
    const double xhi = code.b * hi / code.M;
    if (2.0 * xhi > std::log(kLseriesMaxCondition))
        return reject("ill-conditioned for this region");

    const double v_hi = v_of(be, hi), v_lo = v_of(be, lo);
    const double lx = std::log(code.b / code.M) + be.log_gmax; // ln(b gmax / M)
    const double eps = std::numeric_limits<double>::epsilon();
    long double sum = 0.0L;
    double err = 0.0, prev_abs = -1.0;
    int growth = 0;
    bool converged = false;
    for (int l = 0; l < kLseriesCap; ++l) {
        double c1 = 0.0, c2 = 0.0;
        const double j1 = be.head_moment_closed(be.r * l, v_lo, &c1);
        const double j2 = be.head_moment_closed(be.r * l, v_hi, &c2);
        const double mag = code.a * std::exp(l * lx - std::lgamma(l + 1.0));
        const double term = mag * (j1 - j2) * ((l % 2) ? -1.0 : 1.0);
        if (!std::isfinite(term)) {
            if (strict)
                throw OverflowError("avg_ber: l-series term overflow");
            return false;
        }
        sum += term;
        err += eps * mag * (std::fabs(j1) * std::max(1.0, c1) + std::fabs(j2) * std::max(1.0, c2));
        const double pa = std::fabs(static_cast<double>(sum));
        if (prev_abs >= 0.0 && pa > prev_abs) {
            if (++growth >= kGrowthLimit)
                return reject("partial sums diverging");
        } else {
            growth = 0;
        }
        prev_abs = pa;
        // remainder bound from the next term
        const double next = code.a * F * std::exp((l + 1) * std::log(xhi) - std::lgamma(l + 2.0));
        if (l + 1 > xhi && next <= kLseriesRelTol * pa) {
            converged = true;
            break;
        }
    }
    if (!converged)
        return reject("hit the 60-term cap");
    const double s = static_cast<double>(sum);
    if (!(err <= 1e-6 * std::fabs(s)))
        return reject("lost accuracy to cancellation");
    const double lower = code.a * std::exp(-xhi) * F, upper = code.a * std::exp(-code.b * lo / code.M) * F;
    if (!(s >= lower * (1.0 - 1e-6)) || !(s <= upper * (1.0 + 1e-6)))
        return reject("result outside its bracket");
    *out = s;
    return true;
}

BerResult avg_ber_impl(const BerBackend& be, const TmosConfig& c, const AcmCodeTable& t, BerMethod method)
{
    const double gmax = std::exp(be.log_gmax);
    const double gT = db_to_linear(c.gamma_T_db);
    auto survival = [&](double x) { return x >= gmax ? 0.0 : be.head_mass(v_of(be, x)); };
    const double sel = survival(gT);
    if (!(sel >= kMinSelect))
        throw DegenerateTruncationError("avg_ber: selection probability below 1e-12");

    BerResult res;
    res.per_region.assign(t.n_max(), 0.0);
    EvalPath path = be.mass_path;
    long double num = 0.0L, den = 0.0L;
    for (const Region& rg : active_regions(t, gT, gmax)) {
        const AcmCode& code = t.row(rg.u);
        const double F = survival(rg.lo) - (rg.top ? 0.0 : survival(rg.hi));
        double b = 0.0;
        bool done = false;
        if (method != BerMethod::quadrature) {
            try {
                done = region_ber_closed(be, code, rg.lo, rg.hi, F, &b, method == BerMethod::closed);
            } catch (const DomainError&) {
                if (method == BerMethod::closed)
                    throw;
            } catch (const NonConvergenceError&) {
                if (method == BerMethod::closed)
                    throw;
            } catch (const OverflowError&) {
                if (method == BerMethod::closed)
                    throw;
            }
        }
        if (!done) {
            b = region_ber_quadrature(be, code, rg.lo, rg.hi);
            path = EvalPath::quadrature;
        } else {
            path = merge(path, EvalPath::closed);
        }
        res.per_region[rg.u - 1] = b / sel;
        num += t.rate(rg.u) * b;
        den += t.rate(rg.u) * F;
    }
    if (!(den > 0.0L))
        throw DegenerateTruncationError("avg_ber: no probability mass in any code region");
    res.value = static_cast<double>(num / den);
    res.path = path;
    return res;
}

} // namespace

AcmCodeTable AcmCodeTable::standard()
{
    AcmCodeTable t;
    t.rows = {
        {1, 4.0, 896.0704, 10.7367, 7.1},   {2, 8.0, 404.4353, 6.8043, 11.8},  {3, 16.0, 996.5492, 8.7345, 14.0},
        {4, 32.0, 443.1272, 8.2282, 17.0},  {5, 64.0, 296.6007, 7.9270, 20.1}, {6, 128.0, 327.4874, 8.2036, 23.0},
        {7, 256.0, 404.2837, 7.8824, 26.2}, {8, 512.0, 310.5283, 8.2425, 29.0},
    };
    t.target_ber = 1e-3;
    return t;
}

const AcmCode& AcmCodeTable::row(int u) const
{
    if (u < 1 || u > n_max())
        throw DomainError("AcmCodeTable: code index " + std::to_string(u) + " out of range");
    return rows[u - 1];
}

double AcmCodeTable::threshold(int u) const { return db_to_linear(row(u).gammaT_db); }

void AcmCodeTable::validate() const
{
    if (rows.empty())
        throw DomainError("AcmCodeTable: empty table");
    for (int i = 0; i < n_max(); ++i) {
        const AcmCode& r = rows[i];
        if (r.u != i + 1)
            throw DomainError("AcmCodeTable: rows must be numbered 1..N");
        if (r.M != std::ldexp(1.0, r.u + 1))
            throw DomainError("AcmCodeTable: M_u must equal 2^(u+1)");
        if (!(r.a > 0.0) || !(r.b > 0.0))
            throw DomainError("AcmCodeTable: a_u and b_u must be positive");
        if (i > 0 && !(r.gammaT_db > rows[i - 1].gammaT_db))
            throw DomainError("AcmCodeTable: thresholds must increase with u");
    }
    if (!(target_ber > 0.0) || !(target_ber < 1.0))
        throw DomainError("AcmCodeTable: target BER must lie in (0, 1)");
}

void TmosConfig::validate() const
{
    if (H < 1)
        throw DomainError("TmosConfig: H must be >= 1");
    if (!std::isfinite(gamma_T_db) || !std::isfinite(gamma_TH_OUT_db))
        throw DomainError("TmosConfig: thresholds must be finite");
    if (gamma_TH_OUT_db < gamma_T_db)
        throw DomainError("TmosConfig: gamma_TH_OUT must be >= gamma_T");
}

double tmos_pdf(const ChannelModel& m, const TmosConfig& c, double gamma)
{
    const double gT = db_to_linear(c.gamma_T_db);
    const double sel = snr_survival(m, gT).value;
    if (!(sel >= kMinSelect))
        throw DegenerateTruncationError("tmos_pdf: selection probability below 1e-12");
    if (gamma < gT || std::log(gamma) > m.log_gamma_max())
        return 0.0;
    return snr_pdf(m, gamma) / sel;
}

PathValue outage_probability(const ChannelModel& m, const TmosConfig& c)
{
    c.validate();
    const double gT = db_to_linear(c.gamma_T_db);
    const double gO = db_to_linear(c.gamma_TH_OUT_db);
    PathValue sT = snr_survival(m, gT);
    if (!(sT.value >= kMinSelect))
        throw DegenerateTruncationError("outage_probability: selection probability below 1e-12");
    if (c.gamma_TH_OUT_db == c.gamma_T_db)
        return {0.0, sT.path};
    PathValue sO = snr_survival(m, gO);
    double v = (sT.value - sO.value) / sT.value;
    return {std::clamp(v, 0.0, 1.0), merge(sT.path, sO.path)};
}

PathValue ansb(const ChannelModel& m, const TmosConfig& c)
{
    c.validate();
    PathValue s = snr_survival(m, db_to_linear(c.gamma_T_db));
    return {c.H * s.value, s.path};
}

RegionProbabilities region_probabilities(const ChannelModel& m, const TmosConfig& c, const AcmCodeTable& t)
{
    t.validate();
    const double gT = db_to_linear(c.gamma_T_db);
    const double gmax = m.gamma_max();
    RegionProbabilities out;
    out.F.assign(t.n_max(), 0.0);
    PathValue sT = snr_survival(m, gT);
    out.path = sT.path;
    if (!(sT.value >= kMinSelect))
        throw DegenerateTruncationError("region_probabilities: selection probability below 1e-12");
    auto regions = active_regions(t, gT, gmax);
    std::vector<double> upper(regions.size(), 0.0);
    std::vector<double> lower(regions.size(), 0.0);
    for (std::size_t i = 0; i < regions.size(); ++i) {
        PathValue lo = regions[i].lo == gT ? sT : snr_survival(m, regions[i].lo);
        lower[i] = lo.value;
        out.path = merge(out.path, lo.path);
    }
    for (std::size_t i = 0; i < regions.size(); ++i) {
        if (regions[i].top)
            upper[i] = 0.0;
        else if (i + 1 < regions.size() && regions[i + 1].lo == regions[i].hi)
            upper[i] = lower[i + 1];
        else
            upper[i] = snr_survival(m, regions[i].hi).value;
        out.F[regions[i].u - 1] = std::max(0.0, (lower[i] - upper[i]) / sT.value);
    }
    return out;
}

PathValue ase(const ChannelModel& m, const TmosConfig& c, const AcmCodeTable& t)
{
    RegionProbabilities rp = region_probabilities(m, c, t);
    double s = 0.0;
    for (int u = 1; u <= t.n_max(); ++u)
        s += t.rate(u) * rp.F[u - 1];
    return {s, rp.path};
}

PathValue system_ase(const ChannelModel& m, const TmosConfig& c, const AcmCodeTable& t)
{
    const double gT = db_to_linear(c.gamma_T_db);
    if (std::log(gT) >= m.log_gamma_max())
        return {0.0, is_integer_k(m) ? EvalPath::closed : EvalPath::quadrature};
    PathValue n = ansb(m, c);
    if (n.value < c.H * kMinSelect)
        return {0.0, n.path};
    PathValue a = ase(m, c, t);
    return {n.value * a.value, merge(n.path, a.path)};
}

double code_ber(const AcmCodeTable& t, int u, double gamma)
{
    const AcmCode& r = t.row(u);
    if (!(gamma > 0.0))
        throw DomainError("code_ber: gamma must be positive");
    return r.a * std::exp(-r.b * gamma / r.M);
}

BerResult avg_ber(const ChannelModel& m, const TmosConfig& c, const AcmCodeTable& t, BerMethod method)
{
    c.validate();
    t.validate();
    BerBackend be;
    be.log_gmax = m.log_gamma_max();
    be.r = m.r();
    CdfMethod cm = method == BerMethod::quadrature ? CdfMethod::quadrature
                   : method == BerMethod::closed   ? CdfMethod::closed
                                                   : CdfMethod::automatic;
    EvalPath mass_path = EvalPath::closed;
    be.head_mass = [&m, cm, &mass_path](double V) {
        if (V <= 0.0)
            return 0.0;
        PathValue s = snr_survival(m, m.gamma_of_y(V), cm);
        mass_path = merge(mass_path, s.path);
        return s.value;
    };
    be.head_moment_closed = [&m](double c_, double V, double* cond) {
        if (V <= 0.0) {
            *cond = 1.0;
            return 0.0;
        }
        return y_head_moment_closed(m, c_, V, cond);
    };
    be.weighted = [&m](const std::function<double(double)>& w, double lo, double hi, const std::vector<double>& extra) {
        return y_weighted_integral(m, w, lo, hi, extra);
    };
    be.mass_path = EvalPath::closed;
    BerResult r = avg_ber_impl(be, c, t, method);
    r.path = merge(r.path, mass_path);
    return r;
}

BerResult avg_ber_fog_only(const ChannelModel& m, const TmosConfig& c, const AcmCodeTable& t, BerMethod method)
{
    c.validate();
    t.validate();
    const double k = m.k(), z = m.z();
    BerBackend be;
    be.log_gmax = std::log(fog_only_gamma_max(m));
    be.r = m.r();
    const bool quad_only = method == BerMethod::quadrature;
    auto log_ft = [k, z](double v) { return k * std::log(z) - std::lgamma(k) + (k - 1.0) * std::log(v) - z * v; };
    auto weighted = [log_ft, k, z](const std::function<double(double)>& w, double lo, double hi,
                                   const std::vector<double>& extra) {
        if (!(hi > lo))
            return 0.0;
        auto f = [&](double v) { return v <= 0.0 ? 0.0 : w(v) * std::exp(log_ft(v)); };
        std::vector<double> pts{lo, hi};
        const double mean = k / z, sd = std::sqrt(k) / z;
        for (double s : {-4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0, 16.0})
            pts.push_back(mean + s * sd);
        pts.insert(pts.end(), extra.begin(), extra.end());
        std::vector<double> in;
        for (double p : pts)
            if (p >= lo && p <= hi)
                in.push_back(p);
        return quad::integrate_panels(f, in, 1e-11);
    };
    be.weighted = weighted;
    if (quad_only) {
        be.head_mass = [weighted](double V) {
            if (V <= 0.0)
                return 0.0;
            return weighted([](double) { return 1.0; }, 0.0, V, {});
        };
        be.mass_path = EvalPath::quadrature;
    } else {
        be.head_mass = [k, z](double V) { return V <= 0.0 ? 0.0 : specfun::gamma_p(k, z * V); };
        be.mass_path = EvalPath::closed;
    }
    // int_0^V e^{-c v} f_T(v) dv = z^k (z+c)^-k P(k, (z+c) V)
    be.head_moment_closed = [k, z](double c_, double V, double* cond) {
        *cond = 1.0;
        if (V <= 0.0)
            return 0.0;
        return std::exp(k * (std::log(z) - std::log(z + c_))) * specfun::gamma_p(k, (z + c_) * V);
    };
    return avg_ber_impl(be, c, t, method);
}

} // namespace mfso
