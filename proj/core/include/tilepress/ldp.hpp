#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tilepress/cells.hpp"
#include "tilepress/geometry.hpp"
#include "tilepress/potential.hpp"
#include "tilepress/subsystem.hpp"
#include "tilepress/thermo.hpp"

namespace tilepress {

/// Strict-convexity gate failed: the potential looks co-homologous to a
/// constant (flat pressure curve), so the deviation theory does not apply.
class gate_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class CurveMethod { eigen, zn_bracket };

/// Sampled pressure function p(t) = P(f, t phi) with derivative arrays.
/// Between nodes p is the C1 Hermite cubic through (p_i, dp_i). The eigen
/// route fills dp from the exact identity p'(t) = int phi d mu_{t phi}
/// (kept within 0.05 of the central differences, which the zn route uses).
struct PressureCurve {
    std::vector<double> t;
    std::vector<double> p;
    std::vector<double> dp;
    std::vector<double> ddp;  // second differences of the sampled p
    CurveMethod source = CurveMethod::eigen;

    double eval_p(double at) const;
    double eval_dp(double at) const;       // piecewise-linear in the dp nodes
    double eval_p_prime(double at) const;  // derivative of the Hermite cubic
    double max_interior_ddp() const;
};

struct CurveOptions {
    CurveMethod method = CurveMethod::eigen;
    int grid = 129;         // eigen grid per t
    double tol = 1e-8;
    int max_iter = 10'000;
    int dp_level = 5;       // tile level for the derivative integrals
    int zn_n_max = 6;       // zn_bracket method
    int zn_refine = 1;
    int threads = 1;
};

/// Throws gate_error when max interior ddp <= 1e-6 (constant-like potential).
PressureCurve pressure_curve(const MapSpec& spec, const Potential& pot,
                             const std::vector<double>& t_grid, const CurveOptions& opt);

struct EnergyRange {
    double gamma_phi;       // p'(1), from the interpolated curve
    double alpha_min_hat;   // dp at the left grid end
    double alpha_max_hat;   // dp at the right grid end
};

/// Throws gate_error when gamma is not strictly inside the hat interval.
EnergyRange energy_range(const PressureCurve& curve);

struct RateRow {
    double alpha;
    double xi;                 // (p')^-1(alpha), by bisection on dp
    double rate;               // I(alpha) = p(1) - alpha + xi alpha - p(xi)
    double legendre_residual;  // |I - (p(1) - alpha + sup_t(t alpha - p(t)))|
};

struct RateTable {
    double gamma_phi = 0.0;
    double alpha_min_hat = 0.0;
    double alpha_max_hat = 0.0;
    std::vector<RateRow> rows;
    double rate_at(double alpha) const;  // exact row lookup
    double xi_at(double alpha) const;
};

/// Throws std::out_of_range (citing the hats) for alphas outside the open
/// hat interval.
RateTable rate_function(const PressureCurve& curve, const std::vector<double>& alphas);

/// Per-tile certified Birkhoff data for the full map at one level, indexed by
/// box: idx = (face * side + ax) * side + by. With refine = 0 the sup/inf
/// certificates are the distortion-lemma bracket (center value plus/minus the
/// geometric-series oscillation bound |phi|_kappa sum_r (diam m^-r)^kappa);
/// with refine >= 1 they come from refinement subtiles plus interval
/// arithmetic, which is strictly tighter.
struct TileScan {
    int level = 0;
    int refine = 0;
    std::int64_t side = 0;  // m^level
    std::vector<float> s_hi;     // certified sup of S_n phi over the tile
    std::vector<float> s_lo;     // certified inf
    std::vector<double> s_center;
    std::size_t index(Face f, std::int64_t ax, std::int64_t by) const {
        return (static_cast<std::size_t>(face_index(f)) * side + ax) * side + by;
    }
};

TileScan scan_full_map(const MapSpec& spec, const Potential& pot, int n, int refine, int threads,
                       std::int64_t cap = 3'000'000'000LL);

struct PairSet {
    EdgeLabel e0 = EdgeLabel::bottom;
    int level = 0;
    double alpha = 0.0;
    bool upper_tail = true;  // alpha > gamma: selection by max; else by min
    std::int64_t certain_count = 0;   // certified-in pairs
    std::int64_t possible_count = 0;  // certified-in plus bracket-ambiguous
    /// Materialized only when possible_count <= the materialize cap.
    std::vector<std::pair<TileAddress, TileAddress>> pairs;
    bool strongly_primitive = false;
    std::optional<int> n_f;
    int classify_cap = 0;
};

/// Pairs whose certified Birkhoff bracket reaches alpha. Ambiguous pairs are
/// counted in the possible (upper) set, preserving the <= direction of the
/// deviation inequalities.
PairSet pairs_alpha(const MapSpec& spec, const Potential& pot, EdgeLabel e0, int n, double alpha,
                    double gamma, int refine = 2, int threads = 1,
                    std::int64_t materialize_cap = 100'000);

struct DeviationRow {
    int level = 0;
    std::int64_t pairs_possible = 0;
    std::int64_t pairs_certain = 0;
    double mass_tiles = 0.0;   // mu_hat of the tile-level deviation set D_n(alpha)
    double mass_pairs = 0.0;   // mu_hat of P^n(alpha) (upper set)
    double bound = 0.0;        // C_alpha e^{-I(alpha) n}
    double slope = 0.0;        // -(1/n) log mass_pairs
    bool bound_holds = false;
    bool strongly_primitive = false;
};

struct DeviationReport {
    double alpha = 0.0;
    double gamma = 0.0;
    double rate_value = 0.0;
    double xi = 0.0;
    double c_alpha = 0.0;
    double c_mu = 0.0;        // measured Gibbs constant of mu_phi (uncentered)
    double c1_diam_kappa = 0.0;
    std::vector<DeviationRow> rows;
    int first_valid_n = -1;   // first computed level where the bound holds
    bool holds_from_first = false;
};

/// Large-deviation report for the full map: for each n in [n_lo, n_hi],
/// masses of the tile- and pair-level deviation sets under the level-n
/// equilibrium weights, against the bound C_alpha e^{-I(alpha) n} with
/// C_alpha = 2 C_mu exp(C1 diam^kappa (|2 I'(alpha)| + 1)) and I' = xi - 1.
DeviationReport deviation_report(const MapSpec& spec, const Potential& pot, EdgeLabel e0,
                                 double alpha, int n_lo, int n_hi, const RateTable& rate,
                                 const EigenPair& eig, double c_mu_literal,
                                 const DistortionConstants& dc, int refine = 2, int threads = 1);

} // namespace tilepress
