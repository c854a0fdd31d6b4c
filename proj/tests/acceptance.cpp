// SPDX-License-Identifier: Apache-2.0
// Acceptance checks. Each criterion prints one PASS/FAIL line; details follow indented.
#include "mfso/errors.hpp"
#include "mfso/montecarlo.hpp"
#include "mfso/specfun.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

using namespace mfso;

namespace {

// tolerances
constexpr double kXiRel = 1e-3;
constexpr double kSnrDb = 0.05;
constexpr double kPdfL1 = 0.02;
constexpr double kPdfSeconds = 60.0;
constexpr double kCdfAbs = 1e-6;
constexpr double kMcSigmas = 3.0;
constexpr double kMomentRel = 1e-8;
constexpr double kMomentSeconds = 10.0;
constexpr double kRegionSum = 1e-6;
constexpr double kAseFrac = 0.05;
constexpr double kBerCap = 1.1e-3;
constexpr double kFdRel = 1e-3;
constexpr double kNormAbs = 1e-6;
constexpr double kTruncFactor = 10.0;

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail)
{
    std::printf("%s  %d  %s: %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
    std::fflush(stdout);
    failures += !ok;
}

template <class... A>
std::string fmt(const char* f, A... a)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, a...);
    return buf;
}

void note(const std::string& s) { std::printf("      %s\n", s.c_str()); }

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

PointingGeometry geom(double sigma)
{
    PointingGeometry g;
    g.sigma = sigma;
    return g;
}

// weak: light fog with xi = 420.77 (sigma = 0.1); severe: dense fog with xi = 0.6732
ChannelModel weak(Detection d, double mu_db)
{
    return ChannelModel(fog_preset(FogPreset::light, 0.5), geom(0.1), d, db_to_linear(mu_db));
}

ChannelModel severe(Detection d, double mu_db)
{
    return ChannelModel(fog_preset(FogPreset::dense, 0.5), geom(2.5), d, db_to_linear(mu_db));
}

const char* det_name(Detection d) { return d == Detection::hd ? "HD" : "IM/DD"; }

void criterion1()
{
    const double a = derive_pointing(geom(0.5)).xi;
    const double b = derive_pointing(geom(2.5)).xi;
    const double ea = std::abs(a / 420.7725 - 1.0), eb = std::abs(b / 0.6732 - 1.0);
    report(1, "pointing geometry", ea <= kXiRel && eb <= kXiRel,
           fmt("xi(sigma=0.5)=%.4f vs 420.7725 rel %.2e; xi(sigma=2.5)=%.4f vs 0.6732 rel %.2e; tol %.0e", a, ea, b, eb,
               kXiRel));
    note(fmt("xi(sigma=0.1)=%.4f", derive_pointing(geom(0.1)).xi));
}

void criterion2()
{
    struct Anchor {
        bool weak_case;
        Detection d;
        double expect;
    };
    const Anchor anchors[] = {{true, Detection::hd, 39.4631},
                              {true, Detection::imdd, 38.0607},
                              {false, Detection::hd, 27.7026},
                              {false, Detection::imdd, 32.4938}};
    double worst = 0.0;
    std::string detail;
    for (const auto& a : anchors) {
        const auto m = a.weak_case ? weak(a.d, 45.0) : severe(a.d, 45.0);
        const double v = effective_avg_snr_db(m);
        worst = std::max(worst, std::abs(v - a.expect));
        note(fmt("%s %s: %.4f dB vs %.4f dB (diff %.4f)", a.weak_case ? "weak" : "severe", det_name(a.d), v, a.expect,
                 v - a.expect));
    }
    report(2, "effective average snr at 45 dB", worst <= kSnrDb, fmt("worst |diff| %.4f dB; tol %.2f dB", worst, kSnrDb));
}

void criterion3()
{
    const auto t0 = std::chrono::steady_clock::now();
    const ChannelModel m(fog_preset(FogPreset::moderate, 0.5), geom(1.0), Detection::hd, db_to_linear(20.0));
    McConfig mc;
    mc.n_samples = 1000000;
    mc.seed = 7;
    mc.workers = 1;
    const auto I = simulate_irradiance(m, mc);
    const int bins = 200;
    const double A0 = m.pointing().A0, w = A0 / bins;
    std::vector<double> hist(bins, 0.0);
    for (double x : I)
        hist[std::min(bins - 1, static_cast<int>(x / w))] += 1.0;
    // bin masses through the cdf; gamma is proportional to I for HD
    auto cdf_at = [&](double irr) { return irr <= 0.0 ? 0.0 : snr_cdf(m, m.gamma_max() * irr / A0).value; };
    double l1 = 0.0, prev = 0.0;
    for (int b = 0; b < bins; ++b) {
        const double next = b + 1 == bins ? 1.0 : cdf_at((b + 1) * w);
        l1 += std::abs((next - prev) - hist[b] / static_cast<double>(I.size()));
        prev = next;
    }
    const double secs = seconds_since(t0);
    report(3, "irradiance pdf vs monte carlo", l1 < kPdfL1 && secs <= kPdfSeconds,
           fmt("L1 %.5f (tol %.2f) over %d bins, 1e6 samples, %.1f s (limit %.0f s)", l1, kPdfL1, bins, secs,
               kPdfSeconds));
}

void criterion4()
{
    double worst = 0.0;
    int closed = 0;
    for (Detection d : {Detection::hd, Detection::imdd}) {
        const ChannelModel m(FogParams(6.0, 23.0, 0.5), geom(1.0), d, db_to_linear(20.0));
        const double hi = std::log(m.gamma_max()), lo = hi - 12.0;
        for (int i = 0; i < 20; ++i) {
            const double x = std::exp(lo + (hi - lo) * (i + 0.5) / 20.0);
            const auto c = snr_cdf(m, x, CdfMethod::closed);
            closed += c.path == EvalPath::closed;
            worst = std::max(worst, std::abs(c.value - snr_cdf(m, x, CdfMethod::quadrature).value));
        }
    }
    note(fmt("k=6 closed vs quadrature: 40 points, %d closed, worst |diff| %.2e (tol %.0e)", closed, worst, kCdfAbs));
    bool ok = worst <= kCdfAbs && closed == 40;

    const double thr = db_to_linear(7.1);
    double worst_z = 0.0;
    std::uint64_t seed = 40;
    for (auto p : {FogPreset::light, FogPreset::moderate, FogPreset::dense}) {
        for (Detection d : {Detection::hd, Detection::imdd}) {
            for (double mu : {10.0, 20.0, 30.0}) {
                const ChannelModel m(fog_preset(p, 0.5), geom(1.0), d, db_to_linear(mu));
                const auto q = snr_cdf(m, thr, CdfMethod::quadrature);
                McConfig mc;
                mc.n_samples = 200000;
                mc.seed = ++seed;
                const auto g = simulate_snr(m, mc);
                const double n = static_cast<double>(g.size());
                const double ph = std::count_if(g.begin(), g.end(), [&](double v) { return v < thr; }) / n;
                const double se = std::max(std::sqrt(ph * (1.0 - ph) / n), 1.0 / n);
                const double z = std::abs(ph - q.value) / se;
                worst_z = std::max(worst_z, z);
                if (z > kMcSigmas)
                    note(fmt("%s %s mu=%g: quadrature %.6f mc %.6f (%.2f se)", to_string(p), det_name(d), mu,
                             q.value, ph, z));
                ok = ok && z <= kMcSigmas && q.path == EvalPath::quadrature;
            }
        }
    }
    note(fmt("non-integer presets, outage below 7.1 dB: worst %.2f standard errors (tol %.0f)", worst_z, kMcSigmas));
    report(4, "outage oracle equivalence", ok,
           fmt("closed/quadrature %.2e, quadrature/mc %.2f se", worst, worst_z));
}

void criterion5()
{
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> ua(0.5, 5.0), ub(0.1, 3.0), uc(0.1, 3.0), ux(0.0, 5.0);
    std::uniform_int_distribution<int> uk(0, 6);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double a = ua(rng), b = ub(rng), c = uc(rng);
        const int k = uk(rng);
        double lo = ux(rng), hi = ux(rng);
        if (lo > hi)
            std::swap(lo, hi);
        hi = std::max(hi, lo + 1e-3);
        auto f = [&](double x) { return boost::math::tgamma_lower(a, b * x) * std::exp(-c * x) * std::pow(x, k); };
        const double ref = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 12, 1e-13);
        const double v = specfun::gamma_exp_moment(a, b, c, k, lo, hi);
        worst = std::max(worst, std::abs(v - ref) / std::abs(ref));
    }
    const double secs = seconds_since(t0);
    report(5, "incomplete gamma moment identity", worst < kMomentRel && secs <= kMomentSeconds,
           fmt("200 draws, worst rel %.2e (tol %.0e), %.2f s (limit %.0f s)", worst, kMomentRel, secs, kMomentSeconds));
}

void criterion6()
{
    const auto t = AcmCodeTable::standard();
    const TmosConfig c{7.1, 5, 11.8};
    double worst_sum = 0.0, worst_ber = 0.0;
    for (bool w : {true, false}) {
        for (Detection d : {Detection::hd, Detection::imdd}) {
            for (double mu = 15.0; mu <= 45.0; mu += 5.0) {
                const auto m = w ? weak(d, mu) : severe(d, mu);
                const auto rp = region_probabilities(m, c, t);
                worst_sum = std::max(worst_sum, std::abs(std::accumulate(rp.F.begin(), rp.F.end(), 0.0) - 1.0));
                worst_ber = std::max(worst_ber, avg_ber(m, c, t).value);
            }
        }
    }
    const double sys = system_ase(weak(Detection::hd, 45.0), c, t).value;
    const double gap = std::abs(sys / 42.5 - 1.0);
    note(fmt("sum F_u: worst |sum - 1| %.2e (tol %.0e)", worst_sum, kRegionSum));
    note(fmt("system ASE weak HD 45 dB: %.4f vs 42.5, gap %.2f%% (tol %.0f%%)", sys, 100.0 * gap, 100.0 * kAseFrac));
    note(fmt("avg BER: worst %.3e (cap %.1e)", worst_ber, kBerCap));
    report(6, "acm consistency", worst_sum <= kRegionSum && gap <= kAseFrac && worst_ber <= kBerCap,
           fmt("sum F_u %.1e, system ASE %.3f, max BER %.3e", worst_sum, sys, worst_ber));
}

void criterion7()
{
    bool ok = true;
    auto check = [&](bool cond, const std::string& what) {
        if (!cond)
            note("property failed: " + what);
        ok = ok && cond;
    };
    const auto t = AcmCodeTable::standard();
    const TmosConfig c{7.1, 5, 11.8};

    // special functions: parity and recurrence
    for (double x : {0.1, 0.7, 2.0})
        check(specfun::erf(-x) == -specfun::erf(x), "erf parity");
    for (double a : {0.5, 2.3, 7.0})
        for (double x : {0.3, 2.0, 9.0}) {
            const double lhs = specfun::lower_inc_gamma(a + 1.0, x);
            const double rhs = a * specfun::lower_inc_gamma(a, x) - std::pow(x, a) * std::exp(-x);
            check(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)), "lower gamma recurrence");
            check(std::abs(specfun::gamma_p(a, x) + specfun::gamma_q(a, x) - 1.0) <= 1e-14, "P + Q = 1");
        }

    std::vector<ChannelModel> models;
    for (Detection d : {Detection::hd, Detection::imdd}) {
        models.push_back(weak(d, 30.0));
        models.push_back(severe(d, 30.0));
    }
    for (const auto& m : models) {
        // normalization of the log-irradiance density
        const double mass = y_weighted_integral(m, [](double) { return 1.0; }, 0.0,
                                                m.y_mean() + 60.0 * m.y_stddev(), {});
        check(std::abs(mass - 1.0) <= kNormAbs, "density normalization");
        // cdf monotone on a 100-point log grid, derivative matches the pdf
        const double hi = std::log(m.gamma_max());
        const double lo = hi - m.r() * (m.y_mean() + 6.0 * m.y_stddev());
        double prev = -1.0;
        for (int i = 0; i < 100; ++i) {
            const double F = snr_cdf(m, std::exp(lo + (hi - lo) * i / 99.0)).value;
            check(F >= prev - 1e-12, "cdf monotone");
            prev = F;
        }
        for (double f : {0.5, 1.0, 1.5}) {
            const double x = m.gamma_of_y(f * m.y_mean()), h = x * 1e-4;
            const double d = (snr_cdf(m, x + h).value - snr_cdf(m, x - h).value) / (2.0 * h);
            check(std::abs(d / snr_pdf(m, x) - 1.0) < kFdRel, "cdf derivative");
        }
    }

    // monotonicity in mu
    for (bool w : {true, false})
        for (Detection d : {Detection::hd, Detection::imdd}) {
            double po = 2.0, as = -1.0, nb = -1.0;
            for (double mu = 15.0; mu <= 45.0; mu += 5.0) {
                const auto m = w ? weak(d, mu) : severe(d, mu);
                const double p = outage_probability(m, c).value, a = ase(m, c, t).value, n = ansb(m, c).value;
                check(p <= po + 1e-9, "outage nonincreasing in mu");
                check(a >= as - 1e-9, "ase nondecreasing in mu");
                check(n >= nb - 1e-9, "ansb nondecreasing in mu");
                po = p;
                as = a;
                nb = n;
            }
        }

    // determinism across worker counts
    McConfig a;
    a.n_samples = 40000;
    a.seed = 5;
    McConfig b = a;
    b.workers = 4;
    const auto ra = mc_tmos(weak(Detection::hd, 25.0), c, t, a);
    const auto rb = mc_tmos(weak(Detection::hd, 25.0), c, t, b);
    check(ra.outage.value == rb.outage.value && ra.ber.value == rb.ber.value && ra.ase.value == rb.ase.value,
          "monte carlo independent of workers");

    // truncation stability
    double worst = 0.0, tol = 0.0;
    for (const auto& m : models) {
        SeriesControl s2 = m.series();
        s2.max_terms *= 2;
        const auto m2 = m.with_series(s2);
        tol = kTruncFactor * m.series().abs_tol;
        const double diffs[] = {
            std::abs(outage_probability(m, c).value - outage_probability(m2, c).value),
            std::abs(ansb(m, c).value - ansb(m2, c).value),
            std::abs(ase(m, c, t).value - ase(m2, c, t).value),
            std::abs(avg_ber(m, c, t).value - avg_ber(m2, c, t).value),
            std::abs(snr_cdf(m, m.gamma_max() / 10.0).value - snr_cdf(m2, m.gamma_max() / 10.0).value),
        };
        for (double v : diffs)
            worst = std::max(worst, v);
    }
    note(fmt("doubling max_terms: worst change %.2e (tol %.0e)", worst, tol));
    check(worst <= tol, "truncation stability");
    report(7, "property suite", ok, ok ? "all invariants hold" : "see failed properties above");
}

} // namespace

int main()
{
    const std::vector<std::function<void()>> criteria = {criterion1, criterion2, criterion3, criterion4,
                                                         criterion5, criterion6, criterion7};
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        try {
            criteria[i]();
        } catch (const std::exception& e) {
            report(static_cast<int>(i + 1), "exception", false, e.what());
        }
    }
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
