// SPDX-License-Identifier: Apache-2.0
#include "mfso/errors.hpp"
#include "mfso/scenario.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

using namespace mfso;

namespace {

// Line number carried by the ConfigError thrown for `text`, or -1 if nothing was thrown.
int error_line(const std::string& text)
{
    try {
        parse_scenario(text);
    } catch (const ConfigError& e) {
        return e.line();
    }
    return -1;
}

} // namespace

TEST_CASE("defaults from an empty scenario")
{
    const auto s = parse_scenario("");
    CHECK(s.fog.k == 2.32);
    CHECK(s.fog.beta == 13.12);
    CHECK(s.fog.l == 0.5);
    CHECK(s.detection == Detection::hd);
    CHECK(s.tmos.H == 5);
    CHECK(s.table.n_max() == 8);
    CHECK(s.mc.sampler == Sampler::hoyt);
    CHECK(s.output_path.empty());
    // stop defaults to start
    REQUIRE(s.mu_grid_db().size() == 1);
    CHECK(s.mu_grid_db()[0] == 15.0);
}

TEST_CASE("full scenario")
{
    const auto s = parse_scenario(R"(
# comment
[fog]
preset = dense   ; trailing comment
l_km = 1.0
[pointing]
sigma = 2.5
L_m = 400
[channel]
detection = imdd
mu_db_start = 10
mu_db_stop = 30
mu_db_step = 10
[tmos]
gamma_T_db = 14
H = 3
[mc]
n_samples = 5000
seed = 77
workers = 4
sampler = geometric
[series]
abs_tol = 1e-10
max_terms = 900
[output]
path = out.csv
)");
    CHECK(s.fog.k == 36.05);
    CHECK(s.fog.l == 1.0);
    CHECK(s.geometry.sigma == 2.5);
    CHECK(s.geometry.L == 400.0);
    CHECK(s.detection == Detection::imdd);
    CHECK(s.tmos.gamma_T_db == 14.0);
    CHECK(s.tmos.gamma_TH_OUT_db == 14.0);
    CHECK(s.tmos.H == 3);
    CHECK(s.mc.n_samples == 5000);
    CHECK(s.mc.seed == 77);
    CHECK(s.mc.workers == 4);
    CHECK(s.mc.sampler == Sampler::geometric);
    CHECK(s.series.abs_tol == 1e-10);
    CHECK(s.series.max_terms == 900);
    CHECK(s.output_path == "out.csv");
    const auto g = s.mu_grid_db();
    REQUIRE(g.size() == 3);
    CHECK(g[2] == 30.0);
    const auto m = s.model(20.0);
    CHECK(m.mu() == doctest::Approx(100.0).epsilon(1e-14));
    CHECK(m.r() == 2);
}

TEST_CASE("explicit fog parameters and single-point grid")
{
    const auto s = parse_scenario("[fog]\nk = 6\nbeta = 23\n[channel]\nmu_db_start = 12\n");
    CHECK(s.fog.k == 6.0);
    CHECK(s.fog.beta == 23.0);
    const auto g = s.mu_grid_db();
    REQUIRE(g.size() == 1);
    CHECK(g[0] == 12.0);
}

TEST_CASE("errors carry the offending line")
{
    CHECK(error_line("[fog]\nl_km = 0.5\n[weather]\n") == 3);
    CHECK(error_line("[fog]\nvisibility = 3\n") == 2);
    CHECK(error_line("[fog]\nl_km = 0.5\nl_km = 0.6\n") == 3);
    CHECK(error_line("[pointing]\nsigma = abc\n") == 2);
    CHECK(error_line("[pointing]\nsigma = 0.1x\n") == 2);
    CHECK(error_line("[pointing]\nsigma =\n") == 2);
    CHECK(error_line("[fog\n") == 1);
    CHECK(error_line("[tmos]\nH = 2.5\n") == 2);
    CHECK(error_line("[channel]\ndetection = coherent\n") == 2);
    CHECK(error_line("[mc]\nsampler = fancy\n") == 2);
    CHECK(error_line("sigma = 1\n") == 1);
    CHECK(error_line("[fog]\nl_km = 0.5\n") == -1);
    // preset and explicit parameters together
    CHECK(error_line("[fog]\npreset = light\nk = 2\n") > 0);
    CHECK_THROWS_AS(parse_scenario("[fog]\npreset = haze\n"), ConfigError);
    CHECK_THROWS_AS(parse_scenario("[fog]\nk = 2\n"), ConfigError);
    // semantic errors
    CHECK_THROWS_AS(parse_scenario("[tmos]\ngamma_T_db = 14\ngamma_TH_OUT_db = 10\n"), ConfigError);
    CHECK_THROWS_AS(parse_scenario("[mc]\nn_samples = 10\n"), ConfigError);
    CHECK_THROWS_AS(parse_scenario("[channel]\nmu_db_start = 10\nmu_db_stop = 20\nmu_db_step = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_scenario("[pointing]\nalpha_d_rad = 1.5707963267948966\n"), ConfigError);
}

TEST_CASE("code table from a CSV file")
{
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "mfso_scenario_test";
    fs::create_directories(dir);
    {
        std::ofstream f(dir / "codes.csv");
        f << "# two codes\nu,M,a,b,gammaT_db\n1,4,100,10,8\n2,8,200,7,12\n";
    }
    {
        std::ofstream f(dir / "s.ini");
        f << "[acm]\ntable_file = codes.csv\ntarget_ber = 1e-4\n";
    }
    const auto s = load_scenario((dir / "s.ini").string());
    REQUIRE(s.table.n_max() == 2);
    CHECK(s.table.row(2).a == 200.0);
    CHECK(s.table.row(2).gammaT_db == 12.0);
    CHECK(s.table.target_ber == 1e-4);

    {
        std::ofstream f(dir / "bad.csv");
        f << "u,M,a,b,gammaT_db\n1,4,100,10\n";
    }
    {
        std::ofstream f(dir / "b.ini");
        f << "[acm]\ntable_file = bad.csv\n";
    }
    CHECK_THROWS_AS(load_scenario((dir / "b.ini").string()), ConfigError);
    {
        std::ofstream f(dir / "m.ini");
        f << "[acm]\ntable_file = missing.csv\n";
    }
    CHECK_THROWS_AS(load_scenario((dir / "m.ini").string()), ConfigError);
    CHECK_THROWS_AS(load_scenario((dir / "nope.ini").string()), ConfigError);
    fs::remove_all(dir);
}

TEST_CASE("shipped configs load")
{
    for (const char* name : {"weak.ini", "severe.ini", "moderate_pdf.ini", "thick_k6.ini"}) {
        const auto s = load_scenario(std::string(MFSO_SOURCE_DIR) + "/configs/" + name);
        CHECK_NOTHROW(s.validate());
        CHECK(!s.mu_grid_db().empty());
    }
}
