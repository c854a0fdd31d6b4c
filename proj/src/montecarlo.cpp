// SPDX-License-Identifier: Apache-2.0
#include "mfso/montecarlo.hpp"

#include "mfso/errors.hpp"
#include "mfso/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace mfso {

namespace {

long long block_count(long long n) { return (n + kMcBlockSize - 1) / kMcBlockSize; }

// Runs body(block, rng, first, count) for every block, spread over the workers.
template <class Body>
void for_each_block(const McConfig& mc, long long n, Body&& body)
{
    const long long nb = block_count(n);
    std::atomic<long long> next{0};
    auto worker = [&]() {
        for (long long b = next++; b < nb; b = next++) {
            Rng rng = make_substream(mc.seed, static_cast<std::uint64_t>(b));
            long long first = b * kMcBlockSize;
            body(b, rng, first, std::min(kMcBlockSize, n - first));
        }
    };
    const int nw = static_cast<int>(std::min<long long>(mc.workers, nb));
    if (nw <= 1) {
        worker();
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nw);
    for (int i = 0; i < nw; ++i)
        pool.emplace_back(worker);
    for (auto& t : pool)
        t.join();
}

// Y = T + W for one beam.
class BeamSampler {
public:
    BeamSampler(const ChannelModel& m, Sampler s) : m_(m), s_(s)
    {
        const auto& d = m.pointing();
        w_scale_ = 2.0 / (d.t * d.wL * d.wL);
        if (s == Sampler::geometric && !m.geometry())
            throw DomainError("geometric sampler needs the pointing geometry");
    }

    double draw_y(Rng& rng) const
    {
        double t = fog_sample_depth(m_.fog(), rng);
        double s = s_ == Sampler::hoyt ? hoyt_sample(m_.pointing(), rng) : geometric_sample(*m_.geometry(), rng);
        return t + w_scale_ * s * s;
    }

private:
    const ChannelModel& m_;
    Sampler s_;
    double w_scale_ = 0.0;
};

struct TmosAcc {
    long long n = 0, nq = 0, nout = 0;
    double cnt = 0, cnt2 = 0;
    double R = 0, R2 = 0, RB = 0, RB2 = 0, RRB = 0;
    double sys = 0, sys2 = 0;

    void merge(const TmosAcc& o)
    {
        n += o.n;
        nq += o.nq;
        nout += o.nout;
        cnt += o.cnt;
        cnt2 += o.cnt2;
        R += o.R;
        R2 += o.R2;
        RB += o.RB;
        RB2 += o.RB2;
        RRB += o.RRB;
        sys += o.sys;
        sys2 += o.sys2;
    }
};

McEstimate mean_estimate(double s, double s2, long long n)
{
    McEstimate e;
    e.n = n;
    if (n == 0) {
        e.defined = false;
        e.value = NAN;
        e.std_error = NAN;
        return e;
    }
    e.value = s / n;
    double var = n > 1 ? std::max(0.0, (s2 - s * s / n) / (n - 1)) : 0.0;
    e.std_error = std::sqrt(var / n);
    return e;
}

} // namespace

void McConfig::validate() const
{
    if (n_samples < 1000)
        throw DomainError("McConfig: n_samples must be >= 1000");
    if (workers < 1)
        throw DomainError("McConfig: workers must be >= 1");
}

std::vector<double> simulate_irradiance(const ChannelModel& m, const McConfig& mc)
{
    mc.validate();
    BeamSampler bs(m, mc.sampler);
    std::vector<double> out(static_cast<std::size_t>(mc.n_samples));
    const double A0 = m.A0();
    for_each_block(mc, mc.n_samples, [&](long long, Rng& rng, long long first, long long count) {
        for (long long i = 0; i < count; ++i)
            out[first + i] = A0 * std::exp(-bs.draw_y(rng));
    });
    return out;
}

std::vector<double> simulate_snr(const ChannelModel& m, const McConfig& mc)
{
    mc.validate();
    BeamSampler bs(m, mc.sampler);
    std::vector<double> out(static_cast<std::size_t>(mc.n_samples));
    const double lg = m.log_gamma_max();
    const int r = m.r();
    for_each_block(mc, mc.n_samples, [&](long long, Rng& rng, long long first, long long count) {
        for (long long i = 0; i < count; ++i)
            out[first + i] = std::exp(lg - r * bs.draw_y(rng));
    });
    return out;
}

TmosMcSummary mc_tmos(const ChannelModel& m, const TmosConfig& c, const AcmCodeTable& t, const McConfig& mc)
{
    mc.validate();
    c.validate();
    t.validate();
    BeamSampler bs(m, mc.sampler);
    const double lg = m.log_gamma_max();
    const int r = m.r();
    const double lT = std::log(db_to_linear(c.gamma_T_db));
    const double lO = std::log(db_to_linear(c.gamma_TH_OUT_db));
    std::vector<double> lthr;
    for (int u = 1; u <= t.n_max(); ++u)
        lthr.push_back(std::log(t.threshold(u)));
    auto region = [&](double lgam) {
        return static_cast<int>(std::upper_bound(lthr.begin(), lthr.end(), lgam) - lthr.begin());
    };

    const long long nb = block_count(mc.n_samples);
    std::vector<TmosAcc> acc(static_cast<std::size_t>(nb));
    for_each_block(mc, mc.n_samples, [&](long long b, Rng& rng, long long, long long count) {
        TmosAcc a;
        std::vector<double> q;
        q.reserve(c.H);
        for (long long i = 0; i < count; ++i) {
            q.clear();
            double sys = 0.0;
            for (int h = 0; h < c.H; ++h) {
                double lgam = lg - r * bs.draw_y(rng);
                if (lgam >= lT) {
                    q.push_back(lgam);
                    int u = region(lgam);
                    sys += u > 0 ? t.rate(u) : 0.0;
                }
            }
            a.n += 1;
            double cnt = static_cast<double>(q.size());
            a.cnt += cnt;
            a.cnt2 += cnt * cnt;
            a.sys += sys;
            a.sys2 += sys * sys;
            if (q.empty())
                continue;
            std::uniform_int_distribution<int> pick(0, static_cast<int>(q.size()) - 1);
            double sel = q[pick(rng)];
            a.nq += 1;
            if (sel < lO)
                a.nout += 1;
            int u = region(sel);
            double R = u > 0 ? t.rate(u) : 0.0;
            double RB = u > 0 ? R * code_ber(t, u, std::exp(sel)) : 0.0;
            a.R += R;
            a.R2 += R * R;
            a.RB += RB;
            a.RB2 += RB * RB;
            a.RRB += R * RB;
        }
        acc[b] = a;
    });
    TmosAcc tot;
    for (const auto& a : acc)
        tot.merge(a);

    TmosMcSummary s;
    s.ansb = mean_estimate(tot.cnt, tot.cnt2, tot.n);
    s.system_ase = mean_estimate(tot.sys, tot.sys2, tot.n);
    s.ase = mean_estimate(tot.R, tot.R2, tot.nq);
    s.outage.n = tot.nq;
    if (tot.nq == 0) {
        s.outage.defined = false;
        s.outage.value = s.outage.std_error = NAN;
        s.ber = s.outage;
        return s;
    }
    double p = static_cast<double>(tot.nout) / tot.nq;
    s.outage.value = p;
    s.outage.std_error = std::sqrt(p * (1.0 - p) / tot.nq);

    s.ber.n = tot.nq;
    if (!(tot.R > 0.0)) {
        s.ber.defined = false;
        s.ber.value = s.ber.std_error = NAN;
        return s;
    }
    const double n = static_cast<double>(tot.nq);
    const double mx = tot.RB / n, my = tot.R / n;
    const double ratio = tot.RB / tot.R;
    const double vx = std::max(0.0, tot.RB2 / n - mx * mx);
    const double vy = std::max(0.0, tot.R2 / n - my * my);
    const double cxy = tot.RRB / n - mx * my;
    const double var = std::max(0.0, vx - 2.0 * ratio * cxy + ratio * ratio * vy) / (my * my);
    s.ber.value = ratio;
    s.ber.std_error = std::sqrt(var / n);
    return s;
}

McEstimate mc_outage(const ChannelModel& m, const TmosConfig& c, const McConfig& mc)
{
    return mc_tmos(m, c, AcmCodeTable::standard(), mc).outage;
}

McEstimate mc_ansb(const ChannelModel& m, const TmosConfig& c, const McConfig& mc)
{
    return mc_tmos(m, c, AcmCodeTable::standard(), mc).ansb;
}

McEstimate mc_ase(const ChannelModel& m, const TmosConfig& c, const AcmCodeTable& t, const McConfig& mc)
{
    return mc_tmos(m, c, t, mc).ase;
}

McEstimate mc_system_ase(const ChannelModel& m, const TmosConfig& c, const AcmCodeTable& t, const McConfig& mc)
{
    return mc_tmos(m, c, t, mc).system_ase;
}

McEstimate mc_ber(const ChannelModel& m, const TmosConfig& c, const AcmCodeTable& t, const McConfig& mc)
{
    return mc_tmos(m, c, t, mc).ber;
}

} // namespace mfso
