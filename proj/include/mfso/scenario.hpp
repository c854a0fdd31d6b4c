// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mfso/montecarlo.hpp"

#include <string>
#include <vector>

namespace mfso {

// Scenario file: INI-style sections with unit-suffixed keys.
//
//   [fog]      preset | k, beta ; l_km
//   [pointing] L_m, wL_m, r0_m, alpha_d_rad, beta_d_rad, sigma
//   [channel]  detection (hd|imdd), mu_db_start, mu_db_stop, mu_db_step
//   [tmos]     gamma_T_db, gamma_TH_OUT_db, H
//   [acm]      target_ber, table_file (CSV rows u,M,a,b,gammaT_db)
//   [mc]       n_samples, seed, workers, sampler (hoyt|geometric)
//   [series]   abs_tol, max_terms
//   [output]   path
struct ScenarioConfig {
    std::string fog_label = "light";
    FogParams fog{2.32, 13.12, 0.5};
    PointingGeometry geometry;
    Detection detection = Detection::hd;
    double mu_db_start = 15.0, mu_db_stop = 45.0, mu_db_step = 5.0;
    TmosConfig tmos;
    AcmCodeTable table = AcmCodeTable::standard();
    McConfig mc{100000, 1, 1, Sampler::hoyt};
    SeriesControl series;
    std::string output_path;

    std::vector<double> mu_grid_db() const;
    ChannelModel model(double mu_db) const;
    void validate() const;
};

// `origin` names the source in diagnostics; relative table_file paths resolve against base_dir.
ScenarioConfig parse_scenario(const std::string& text, const std::string& origin = "<config>",
                              const std::string& base_dir = ".");
ScenarioConfig load_scenario(const std::string& path);

} // namespace mfso
