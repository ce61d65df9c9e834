#pragma once

#include <array>
#include <string>
#include <vector>

#include "tilepress/cells.hpp"
#include "tilepress/geometry.hpp"
#include "tilepress/potential.hpp"
#include "tilepress/subsystem.hpp"

namespace tilepress {

/// Run configuration. JSON schema (strict: unknown keys are rejected):
///   map:       { m }
///   subsystem: "full" | "carpet" | [["w", i, j], ...]
///   potential: { coefficients (6 reals), kappa }
///   grid:      { G, curve_G, tol, max_iter }
///   levels:    { n_max, capacity, zn_refine }
///   ldp:       { t_min, t_max, t_count, alphas?, alpha_fractions?, e0,
///                n_range [lo, hi], pair_refine }
///   output:    { directory, formats }
struct RunConfig {
    std::int64_t m = 3;
    std::string subsystem_preset = "carpet";      // empty when labels are explicit
    std::vector<OneTileLabel> subsystem_labels;

    std::array<double, Potential::basis_size> coefficients{};
    double kappa = 1.0;
    bool break_gluing = false;  // CLI negative-control override, not parsed from JSON

    int grid_G = 257;
    int curve_G = 129;
    double tol = 1e-8;
    int max_iter = 10'000;

    int n_max = 6;
    std::int64_t capacity = 20'000'000;
    int zn_refine = 2;

    double t_min = -10.0;
    double t_max = 10.0;
    int t_count = 21;
    std::vector<double> alphas;           // explicit deviation thresholds
    std::vector<double> alpha_fractions;  // fractions of the half-range; default +-0.6
    std::string e0 = "bottom";
    int n_lo = 3;
    int n_hi = 6;
    /// 0: distortion-lemma selection brackets; >= 1: tighter subtile-interval
    /// certificates at that refinement depth.
    int pair_refine = 0;

    std::string out_dir = "out";
    std::vector<std::string> formats{"csv", "json"};

    MapSpec make_spec() const { return MapSpec(m); }
    Subsystem make_subsystem() const;
    Potential make_potential() const;
    EdgeLabel e0_label() const;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Strict parse; throws config_error with a JSON-pointer style location.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);
/// Ordered-key serialization; parse(serialize(c)) == c.
std::string serialize_config(const RunConfig& cfg);

} // namespace tilepress
