// Experiment configuration: a line-oriented "key = value" format with
// [section] headers, validated with defaults filled in, plus the preset
// constructors for source and initial-conductance fields.
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "netform/coupling.hpp"

namespace netform {

enum class RunMode { run, picard, sweep };

struct ExperimentConfig {
    RunMode mode = RunMode::run;
    std::uint64_t seed = 1;

    // [grid]
    int dim = 1;
    std::array<int, 2> n = {65, 65};
    std::array<double, 2> extent = {1.0, 1.0};

    // [params]
    double D = 1.0;
    double E = 1.0;
    double gamma = 1.0;
    std::string source = "constant(0)";
    std::string m0 = "constant(0)";
    double scale = 1.0;

    // [stepping]
    double dt = 1e-3;
    double t_end = 1.0;
    int store_every = 1;
    double cg_tol = 1e-10;
    double eps_reg = 1e-12;
    double blowup_threshold = 1e6;
    ReactionMode reaction = ReactionMode::semi_implicit;

    // [picard]
    int k_max = 8;
    double picard_tol = 1e-8;

    // [sweep]
    std::vector<double> sweep_scales = {1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125};
    double t_target = 1.0;
    bool bisect = false;
    int workers = 0;

    // [diagnostics]
    std::vector<std::array<double, 3>> probes; // (y1, y2, tau); y2 unused in 1D
    std::vector<double> radii = {0.25, 0.125, 0.0625};
    double beta = 0.5;
    double excess_threshold = -1.0; // negative = auto
    double growth_ratio = 2.0;
    std::vector<double> checkpoints; // default: {t_end}
    double degiorgi_k = -1.0;        // negative = auto (sup |m|^2)
    std::vector<double> lp_exponents = {1.0, 2.0, 4.0};
    std::vector<double> holder_exponents = {0.1, 0.2, 0.3, 0.4, 0.5,
                                            0.6, 0.7, 0.8, 0.9, 1.0};
};

// Throws ParseError (syntax, duplicate keys) and ValidationError (unknown or
// out-of-contract keys; messages name the offending key).
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

Grid make_grid(const ExperimentConfig& cfg);

// Builds S and m0 from their presets and applies the data scale. m0 presets
// are forced to zero on boundary nodes. Presets:
//   constant(a)  or  constant(a1 a2)            (vector form for m0)
//   gaussian(cx [cy], width, a)                 source bump
//   bump_vector(cx [cy], width, a1 [a2])        vector bump for m0
//   file(path)                                  snapshot file: p slot for the
//                                               source, m slot for m0
PhysParams make_params(const ExperimentConfig& cfg, const Grid& grid);

RunConfig make_run_config(const ExperimentConfig& cfg);

} // namespace netform
