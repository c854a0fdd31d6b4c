// SPDX-License-Identifier: Apache-2.0
// mfso: scenario-driven tables for multi-beam FSO links under fog and pointing errors.
#include "mfso/errors.hpp"
#include "mfso/scenario.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <variant>

using namespace mfso;

namespace {

using Cell = std::variant<double, long long, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

std::string fmt(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string to_csv(const Table& t)
{
    std::string out;
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        out += (i ? "," : "") + t.columns[i];
    out += '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i)
                out += ',';
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, double>)
                        out += fmt(v);
                    else if constexpr (std::is_same_v<T, long long>)
                        out += std::to_string(v);
                    else
                        out += v;
                },
                row[i]);
        }
        out += '\n';
    }
    return out;
}

std::string to_json(const Table& t)
{
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        nlohmann::ordered_json o;
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, double>) {
                        if (std::isfinite(v))
                            o[t.columns[i]] = v;
                        else
                            o[t.columns[i]] = nullptr;
                    } else {
                        o[t.columns[i]] = v;
                    }
                },
                row[i]);
        }
        arr.push_back(std::move(o));
    }
    return arr.dump(2) + "\n";
}

// Probability mass of I in (lo, hi], via the SNR CDF (the density is singular at I = 0).
double irradiance_mass(const ChannelModel& m, double lo, double hi)
{
    auto F = [&](double I) {
        if (I <= 0.0)
            return 0.0;
        if (I >= m.A0())
            return 1.0;
        return snr_cdf(m, m.gamma_of_y(m.y_of_irradiance(I))).value;
    };
    return F(hi) - F(lo);
}

constexpr int kPdfBins = 200;

Table cmd_pdf(const ScenarioConfig& cfg)
{
    const ChannelModel m = cfg.model(cfg.mu_db_start);
    const double A0 = m.A0();
    const double w = A0 / kPdfBins;
    std::vector<double> hist(kPdfBins, 0.0);
    const auto samples = simulate_irradiance(m, cfg.mc);
    for (double I : samples) {
        int b = static_cast<int>(std::ceil(I / w)) - 1;
        if (b >= 0 && b < kPdfBins)
            hist[b] += 1.0;
    }
    Table t{{"I", "analytic_pdf", "mc_density", "abs_diff"}, {}};
    const double norm = 1.0 / (static_cast<double>(samples.size()) * w);
    for (int i = 0; i < kPdfBins; ++i) {
        const double lo = i * w, hi = (i + 1) * w;
        // bin-averaged analytic density, the quantity the histogram estimates
        const double a = irradiance_mass(m, lo, hi) / w;
        const double mcd = hist[i] * norm;
        t.rows.push_back({A0 * (i + 0.5) / kPdfBins, a, mcd, std::abs(a - mcd)});
    }
    return t;
}

enum class Metric { outage, ansb, ase, system_ase, ber };

Table cmd_sweep(const ScenarioConfig& cfg, Metric metric)
{
    Table t{{"mu_db", "analytic", "mc", "mc_se", "path_tag"}, {}};
    for (double mu_db : cfg.mu_grid_db()) {
        const ChannelModel m = cfg.model(mu_db);
        PathValue a;
        switch (metric) {
        case Metric::outage: a = outage_probability(m, cfg.tmos); break;
        case Metric::ansb: a = ansb(m, cfg.tmos); break;
        case Metric::ase: a = ase(m, cfg.tmos, cfg.table); break;
        case Metric::system_ase: a = system_ase(m, cfg.tmos, cfg.table); break;
        case Metric::ber: {
            auto b = avg_ber(m, cfg.tmos, cfg.table);
            a = {b.value, b.path};
            break;
        }
        }
        const auto s = mc_tmos(m, cfg.tmos, cfg.table, cfg.mc);
        const McEstimate& e = metric == Metric::outage ? s.outage
                              : metric == Metric::ansb ? s.ansb
                              : metric == Metric::ase  ? s.ase
                              : metric == Metric::ber  ? s.ber
                                                       : s.system_ase;
        t.rows.push_back({mu_db, a.value, e.value, e.std_error, std::string(to_string(a.path))});
    }
    return t;
}

struct Check {
    std::string name;
    double tolerance;
    double measured;
    bool pass;
};

// Tolerances for the validate report.
constexpr double kNormTol = 1e-6;
constexpr double kMcSigmas = 4.0;
constexpr double kMcFloor = 1e-4;
constexpr double kBerCap = 1.1e-3;
constexpr double kMonoSlack = 1e-9;

std::vector<Check> run_checks(const ScenarioConfig& cfg)
{
    std::vector<Check> out;
    auto add = [&](std::string name, double tol, double measured, bool pass) {
        out.push_back({std::move(name), tol, measured, pass});
    };
    const auto grid = cfg.mu_grid_db();
    double prev_outage = 2.0;
    double worst_rise = 0.0;
    double worst_norm = 0.0, worst_ber = 0.0;
    double worst_trunc = 0.0;
    for (double mu_db : grid) {
        const ChannelModel m = cfg.model(mu_db);
        const std::string tag = "mu=" + fmt(mu_db) + "dB";

        auto rp = region_probabilities(m, cfg.tmos, cfg.table);
        double sum = 0.0;
        for (double f : rp.F)
            sum += f;
        worst_norm = std::max(worst_norm, std::abs(sum - 1.0));

        auto po = outage_probability(m, cfg.tmos);
        worst_rise = std::max(worst_rise, po.value - prev_outage);
        prev_outage = po.value;

        auto ber = avg_ber(m, cfg.tmos, cfg.table);
        worst_ber = std::max(worst_ber, ber.value);

        const auto s = mc_tmos(m, cfg.tmos, cfg.table, cfg.mc);
        auto mc_check = [&](const std::string& what, double analytic, const McEstimate& e) {
            if (!e.defined)
                return;
            const double tol = kMcSigmas * e.std_error + kMcFloor * std::max(1.0, std::abs(analytic));
            const double d = std::abs(analytic - e.value);
            add(what + " analytic vs mc " + tag, tol, d, d <= tol);
        };
        mc_check("outage", po.value, s.outage);
        mc_check("ansb", ansb(m, cfg.tmos).value, s.ansb);
        mc_check("ase", ase(m, cfg.tmos, cfg.table).value, s.ase);

        SeriesControl dbl = cfg.series;
        dbl.max_terms *= 2;
        const double po2 = outage_probability(m.with_series(dbl), cfg.tmos).value;
        worst_trunc = std::max(worst_trunc, std::abs(po2 - po.value));
    }
    add("region probabilities sum to one", kNormTol, worst_norm, worst_norm <= kNormTol);
    add("outage nonincreasing in mu", kMonoSlack, std::max(0.0, worst_rise), worst_rise <= kMonoSlack);
    add("average ber below cap", kBerCap, worst_ber, worst_ber <= kBerCap);
    const double ttol = 10.0 * cfg.series.abs_tol;
    add("doubling max_terms leaves outage unchanged", ttol, worst_trunc, worst_trunc <= ttol);

    // Worker count must not change Monte Carlo output.
    McConfig a = cfg.mc, b = cfg.mc;
    a.n_samples = b.n_samples = std::min<long long>(cfg.mc.n_samples, 20000);
    a.workers = 1;
    b.workers = 3;
    const ChannelModel m = cfg.model(grid.front());
    const auto va = simulate_snr(m, a), vb = simulate_snr(m, b);
    const bool same = va == vb;
    add("monte carlo independent of worker count", 0.0, same ? 0.0 : 1.0, same);
    return out;
}

Table checks_table(const std::vector<Check>& checks)
{
    Table t{{"name", "tolerance", "measured", "verdict"}, {}};
    for (const auto& c : checks)
        t.rows.push_back({c.name, c.tolerance, c.measured, std::string(c.pass ? "PASS" : "FAIL")});
    return t;
}

void emit(const Table& t, const std::string& format, const std::string& path)
{
    const std::string text = format == "json" ? to_json(t) : to_csv(t);
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw ConfigError("cannot write output file '" + path + "'");
    f << text;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Multi-beam FSO link performance under fog and pointing errors"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<long long> seed;
    std::optional<int> workers;
    std::optional<long long> samples;
    std::string out_path;
    std::string format = "csv";
    bool per_beam = false;

    app.add_option("--config", config_path, "scenario file")->required()->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "Monte Carlo seed")->check(CLI::NonNegativeNumber);
    app.add_option("--workers", workers, "Monte Carlo worker threads")->check(CLI::PositiveNumber);
    app.add_option("--samples", samples, "Monte Carlo sample count");
    app.add_option("--out", out_path, "output file (default: stdout or [output] path)");
    app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    auto* pdf = app.add_subcommand("pdf", "composite irradiance pdf against a Monte Carlo histogram");
    auto* outage = app.add_subcommand("outage", "outage probability sweep over mu");
    auto* ansb_cmd = app.add_subcommand("ansb", "average number of selected beams");
    auto* ase_cmd = app.add_subcommand("ase", "average spectral efficiency (system by default)");
    ase_cmd->add_flag("--per-beam", per_beam, "report the per-beam ASE instead");
    auto* ber = app.add_subcommand("ber", "average bit error rate sweep");
    auto* validate = app.add_subcommand("validate", "run invariant and oracle checks");
    for (auto* s : {pdf, outage, ansb_cmd, ase_cmd, ber, validate})
        s->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        ScenarioConfig cfg = load_scenario(config_path);
        if (seed)
            cfg.mc.seed = static_cast<std::uint64_t>(*seed);
        if (workers)
            cfg.mc.workers = *workers;
        if (samples)
            cfg.mc.n_samples = *samples;
        try {
            cfg.validate();
        } catch (const DomainError& e) {
            throw ConfigError(e.what());
        }
        if (out_path.empty())
            out_path = cfg.output_path;

        if (*pdf) {
            emit(cmd_pdf(cfg), format, out_path);
        } else if (*outage) {
            emit(cmd_sweep(cfg, Metric::outage), format, out_path);
        } else if (*ansb_cmd) {
            emit(cmd_sweep(cfg, Metric::ansb), format, out_path);
        } else if (*ase_cmd) {
            emit(cmd_sweep(cfg, per_beam ? Metric::ase : Metric::system_ase), format, out_path);
        } else if (*ber) {
            emit(cmd_sweep(cfg, Metric::ber), format, out_path);
        } else if (*validate) {
            const auto checks = run_checks(cfg);
            emit(checks_table(checks), format, out_path);
            for (const auto& c : checks)
                if (!c.pass)
                    return 3;
        }
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const NonConvergenceError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return 2;
    } catch (const OverflowError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return 2;
    } catch (const DegenerateTruncationError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
