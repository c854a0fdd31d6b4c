// SPDX-License-Identifier: Apache-2.0
#include "mfso/scenario.hpp"

#include "mfso/errors.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace mfso {

namespace {

std::string trim(const std::string& s)
{
    const char* ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    if (b == std::string::npos)
        return {};
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

struct Entry {
    std::string value;
    int line = 0;
};

using Section = std::map<std::string, Entry>;

double to_double(const Entry& e, const std::string& key)
{
    double v = 0.0;
    const char* b = e.value.data();
    const char* end = b + e.value.size();
    auto [p, ec] = std::from_chars(b, end, v);
    if (ec != std::errc() || p != end || !std::isfinite(v))
        throw ConfigError("'" + key + "' expects a number, got '" + e.value + "'", e.line);
    return v;
}

long long to_int(const Entry& e, const std::string& key)
{
    long long v = 0;
    const char* b = e.value.data();
    const char* end = b + e.value.size();
    auto [p, ec] = std::from_chars(b, end, v);
    if (ec != std::errc() || p != end)
        throw ConfigError("'" + key + "' expects an integer, got '" + e.value + "'", e.line);
    return v;
}

const std::map<std::string, std::set<std::string>>& schema()
{
    static const std::map<std::string, std::set<std::string>> s{
        {"fog", {"preset", "k", "beta", "l_km"}},
        {"pointing", {"L_m", "wL_m", "r0_m", "alpha_d_rad", "beta_d_rad", "sigma"}},
        {"channel", {"detection", "mu_db_start", "mu_db_stop", "mu_db_step"}},
        {"tmos", {"gamma_T_db", "gamma_TH_OUT_db", "H"}},
        {"acm", {"target_ber", "table_file"}},
        {"mc", {"n_samples", "seed", "workers", "sampler"}},
        {"series", {"abs_tol", "max_terms"}},
        {"output", {"path"}},
    };
    return s;
}

AcmCodeTable load_table(const std::string& path, int cfg_line)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read ACM table '" + path + "'", cfg_line);
    AcmCodeTable t;
    t.rows.clear();
    std::string line;
    int ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        auto h = line.find('#');
        if (h != std::string::npos)
            line.erase(h);
        line = trim(line);
        if (line.empty() || line.rfind("u,", 0) == 0)
            continue;
        std::stringstream ss(line);
        std::string f;
        std::vector<double> v;
        while (std::getline(ss, f, ',')) {
            Entry e{trim(f), ln};
            v.push_back(to_double(e, path + " field"));
        }
        if (v.size() != 5)
            throw ConfigError(path + ": expected 5 fields u,M,a,b,gammaT_db", ln);
        t.rows.push_back({static_cast<int>(v[0]), v[1], v[2], v[3], v[4]});
    }
    return t;
}

} // namespace

std::vector<double> ScenarioConfig::mu_grid_db() const
{
    std::vector<double> g;
    if (mu_db_step <= 0.0) {
        g.push_back(mu_db_start);
        return g;
    }
    const int n = static_cast<int>(std::floor((mu_db_stop - mu_db_start) / mu_db_step + 1e-9));
    for (int i = 0; i <= n; ++i)
        g.push_back(mu_db_start + i * mu_db_step);
    return g;
}

ChannelModel ScenarioConfig::model(double mu_db) const
{
    return ChannelModel(fog, geometry, detection, db_to_linear(mu_db), series);
}

void ScenarioConfig::validate() const
{
    fog.validate();
    geometry.validate();
    tmos.validate();
    table.validate();
    mc.validate();
    series.validate();
    if (mu_db_stop < mu_db_start)
        throw DomainError("mu_db_stop must be >= mu_db_start");
}

ScenarioConfig parse_scenario(const std::string& text, const std::string& origin, const std::string& base_dir)
{
    std::map<std::string, Section> sections;
    std::istringstream in(text);
    std::string raw;
    std::string current;
    int ln = 0;
    while (std::getline(in, raw)) {
        ++ln;
        std::string line = raw;
        auto h = line.find_first_of("#;");
        if (h != std::string::npos)
            line.erase(h);
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(origin + ": malformed section header '" + line + "'", ln);
            current = trim(line.substr(1, line.size() - 2));
            if (!schema().count(current))
                throw ConfigError(origin + ": unknown section [" + current + "]", ln);
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ": expected 'key = value'", ln);
        if (current.empty())
            throw ConfigError(origin + ": key outside of any section", ln);
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (!schema().at(current).count(key))
            throw ConfigError(origin + ": unknown key '" + key + "' in [" + current + "]", ln);
        if (val.empty())
            throw ConfigError(origin + ": empty value for '" + key + "'", ln);
        auto& sec = sections[current];
        if (sec.count(key))
            throw ConfigError(origin + ": duplicate key '" + key + "'", ln);
        sec[key] = {val, ln};
    }

    ScenarioConfig cfg;
    auto get = [&](const std::string& s, const std::string& k) -> const Entry* {
        auto it = sections.find(s);
        if (it == sections.end())
            return nullptr;
        auto jt = it->second.find(k);
        return jt == it->second.end() ? nullptr : &jt->second;
    };
    auto num = [&](const std::string& s, const std::string& k, double& dst) {
        if (auto e = get(s, k))
            dst = to_double(*e, k);
    };
    auto wrap = [&](int line, auto&& fn) {
        try {
            fn();
        } catch (const DomainError& e) {
            throw ConfigError(origin + ": " + e.what(), line);
        }
    };

    double l_km = 0.5;
    num("fog", "l_km", l_km);
    const Entry* preset = get("fog", "preset");
    const Entry* k = get("fog", "k");
    const Entry* beta = get("fog", "beta");
    if (preset && (k || beta))
        throw ConfigError(origin + ": give either fog preset or k/beta, not both", preset->line);
    if (k || beta) {
        if (!k || !beta)
            throw ConfigError(origin + ": fog k and beta must be given together", (k ? k : beta)->line);
        wrap(k->line, [&] { cfg.fog = FogParams(to_double(*k, "k"), to_double(*beta, "beta"), l_km); });
        cfg.fog_label = "custom";
    } else {
        std::string name = preset ? preset->value : "light";
        wrap(preset ? preset->line : 0, [&] { cfg.fog = fog_preset(name, l_km); });
        cfg.fog_label = name;
    }

    num("pointing", "L_m", cfg.geometry.L);
    num("pointing", "wL_m", cfg.geometry.wL);
    num("pointing", "r0_m", cfg.geometry.r0);
    num("pointing", "alpha_d_rad", cfg.geometry.alpha_d);
    num("pointing", "beta_d_rad", cfg.geometry.beta_d);
    num("pointing", "sigma", cfg.geometry.sigma);
    wrap(0, [&] { cfg.geometry.validate(); });

    if (auto e = get("channel", "detection")) {
        if (e->value == "hd")
            cfg.detection = Detection::hd;
        else if (e->value == "imdd")
            cfg.detection = Detection::imdd;
        else
            throw ConfigError(origin + ": detection must be 'hd' or 'imdd'", e->line);
    }
    num("channel", "mu_db_start", cfg.mu_db_start);
    cfg.mu_db_stop = cfg.mu_db_start;
    cfg.mu_db_step = 0.0;
    num("channel", "mu_db_stop", cfg.mu_db_stop);
    num("channel", "mu_db_step", cfg.mu_db_step);
    if (cfg.mu_db_stop < cfg.mu_db_start)
        throw ConfigError(origin + ": mu_db_stop < mu_db_start", get("channel", "mu_db_stop")->line);
    if (cfg.mu_db_stop > cfg.mu_db_start && !(cfg.mu_db_step > 0.0)) {
        const Entry* e = get("channel", "mu_db_step");
        throw ConfigError(origin + ": mu_db_step must be positive for a sweep", e ? e->line : 0);
    }

    num("tmos", "gamma_T_db", cfg.tmos.gamma_T_db);
    cfg.tmos.gamma_TH_OUT_db = cfg.tmos.gamma_T_db;
    num("tmos", "gamma_TH_OUT_db", cfg.tmos.gamma_TH_OUT_db);
    if (auto e = get("tmos", "H"))
        cfg.tmos.H = static_cast<int>(to_int(*e, "H"));
    wrap(get("tmos", "gamma_TH_OUT_db") ? get("tmos", "gamma_TH_OUT_db")->line : 0, [&] { cfg.tmos.validate(); });

    if (auto e = get("acm", "table_file")) {
        std::filesystem::path p(e->value);
        if (p.is_relative())
            p = std::filesystem::path(base_dir) / p;
        cfg.table = load_table(p.string(), e->line);
    }
    num("acm", "target_ber", cfg.table.target_ber);
    wrap(get("acm", "table_file") ? get("acm", "table_file")->line : 0, [&] { cfg.table.validate(); });

    if (auto e = get("mc", "n_samples"))
        cfg.mc.n_samples = to_int(*e, "n_samples");
    if (auto e = get("mc", "seed")) {
        long long s = to_int(*e, "seed");
        if (s < 0)
            throw ConfigError(origin + ": seed must be >= 0", e->line);
        cfg.mc.seed = static_cast<std::uint64_t>(s);
    }
    if (auto e = get("mc", "workers"))
        cfg.mc.workers = static_cast<int>(to_int(*e, "workers"));
    if (auto e = get("mc", "sampler")) {
        if (e->value == "hoyt")
            cfg.mc.sampler = Sampler::hoyt;
        else if (e->value == "geometric")
            cfg.mc.sampler = Sampler::geometric;
        else
            throw ConfigError(origin + ": sampler must be 'hoyt' or 'geometric'", e->line);
    }
    wrap(get("mc", "n_samples") ? get("mc", "n_samples")->line : 0, [&] { cfg.mc.validate(); });

    num("series", "abs_tol", cfg.series.abs_tol);
    if (auto e = get("series", "max_terms"))
        cfg.series.max_terms = static_cast<int>(to_int(*e, "max_terms"));
    wrap(0, [&] { cfg.series.validate(); });

    if (auto e = get("output", "path"))
        cfg.output_path = e->value;

    // Derived-geometry problems (poles etc.) surface here rather than mid-run.
    wrap(0, [&] { (void)derive_pointing(cfg.geometry); });
    return cfg;
}

ScenarioConfig load_scenario(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    std::filesystem::path p(path);
    return parse_scenario(ss.str(), path, p.has_parent_path() ? p.parent_path().string() : ".");
}

} // namespace mfso
