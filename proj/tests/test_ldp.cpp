#include <doctest.h>

#include <cmath>
#include <set>

#include "tilepress/errors.hpp"
#include "tilepress/ldp.hpp"
#include "tilepress/sum.hpp"

using namespace tilepress;

namespace {

Potential g2(double c = 1.0) {
    std::array<double, Potential::basis_size> cf{};
    cf[4] = c;
    return Potential(cf, 1.0);
}

std::vector<double> grid(double lo, double hi, int count) {
    std::vector<double> t;
    for (int k = 0; k < count; ++k) t.push_back(lo + (hi - lo) * k / (count - 1));
    return t;
}

CurveOptions fast_opts() {
    CurveOptions o;
    o.grid = 33;
    o.tol = 1e-7;
    o.max_iter = 3000;
    return o;
}

} // namespace

TEST_CASE("pressure_curve: p(0) = log deg, face-swap symmetry") {
    const MapSpec spec(3);
    const PressureCurve curve = pressure_curve(spec, g2(), grid(-6, 6, 13), fast_opts());
    // t = 0 sits at index 6
    CHECK(curve.p[6] == doctest::Approx(std::log(9.0)).epsilon(1e-9));
    // g2 is odd under the face swap, so p(t) = p(-t)
    for (int k = 0; k < 13; ++k)
        CHECK(curve.p[static_cast<std::size_t>(k)] ==
              doctest::Approx(curve.p[static_cast<std::size_t>(12 - k)]).epsilon(1e-6));
}

TEST_CASE("pressure_curve: convexity gate rejects constant-like potentials") {
    const MapSpec spec(3);
    const Potential zero({}, 1.0);
    CHECK_THROWS_AS(pressure_curve(spec, zero, grid(-4, 4, 9), fast_opts()), gate_error);

    std::array<double, Potential::basis_size> c{};
    c[0] = 0.7; // constant
    CHECK_THROWS_AS(pressure_curve(spec, Potential(c, 1.0), grid(-4, 4, 9), fast_opts()),
                    gate_error);
}

TEST_CASE("energy_range: gamma inside the hats; hats widen with T") {
    const MapSpec spec(3);
    const PressureCurve narrow = pressure_curve(spec, g2(), grid(-5, 5, 11), fast_opts());
    const EnergyRange e1 = energy_range(narrow);
    CHECK(e1.alpha_min_hat < e1.gamma_phi);
    CHECK(e1.gamma_phi < e1.alpha_max_hat);

    const PressureCurve wide = pressure_curve(spec, g2(), grid(-10, 10, 21), fast_opts());
    const EnergyRange e2 = energy_range(wide);
    CHECK(e2.alpha_min_hat <= e1.alpha_min_hat + 1e-9);
    CHECK(e2.alpha_max_hat >= e1.alpha_max_hat - 1e-9);
}

TEST_CASE("rate_function: identities at gamma, monotone xi, Legendre agreement") {
    const MapSpec spec(3);
    const PressureCurve curve = pressure_curve(spec, g2(), grid(-10, 10, 21), fast_opts());
    const EnergyRange er = energy_range(curve);

    const RateTable at_gamma = rate_function(curve, {er.gamma_phi});
    CHECK(std::abs(at_gamma.rows[0].rate) <= 1e-6);
    CHECK(std::abs(at_gamma.rows[0].xi - 1.0) <= 1e-6);

    std::vector<double> alphas;
    for (int k = 1; k <= 9; ++k)
        alphas.push_back(er.alpha_min_hat +
                         (er.alpha_max_hat - er.alpha_min_hat) * k / 10.0);
    const RateTable table = rate_function(curve, alphas);
    for (std::size_t k = 0; k < table.rows.size(); ++k) {
        CHECK(table.rows[k].rate >= -1e-9);
        CHECK(table.rows[k].legendre_residual <= 1e-4);
        if (k > 0) CHECK(table.rows[k].xi > table.rows[k - 1].xi);
    }
    // discrete strict convexity of I on the evenly spaced rows
    for (std::size_t k = 1; k + 1 < table.rows.size(); ++k) {
        const double second =
            table.rows[k + 1].rate - 2.0 * table.rows[k].rate + table.rows[k - 1].rate;
        CHECK(second > 0.0);
    }
    CHECK_THROWS_AS(rate_function(curve, {er.alpha_max_hat + 0.5}), std::out_of_range);
}

TEST_CASE("scan_full_map agrees with partition sums and tile measures") {
    const MapSpec spec(3);
    const Potential pot = g2(0.5);
    const int n = 3;
    const TileScan scan = scan_full_map(spec, pot, n, 1, 2);
    const PartitionSum z = partition_sum(spec, Subsystem::full(spec), pot, n, 1);
    std::vector<double> centers(scan.s_center.size());
    for (std::size_t k = 0; k < scan.s_center.size(); ++k)
        centers[k] = std::exp(scan.s_center[k]);
    CHECK(pairwise_sum(centers) == doctest::Approx(z.center_sum).epsilon(1e-12));
    for (std::size_t k = 0; k < scan.s_center.size(); ++k) {
        CHECK(scan.s_lo[k] <= scan.s_center[k] + 1e-6);
        CHECK(scan.s_hi[k] >= scan.s_center[k] - 1e-6);
    }
}

TEST_CASE("pairs_alpha: brute-force selection oracle and monotonicity") {
    const MapSpec spec(3);
    const Potential pot = g2();
    const double gamma = 0.25;
    const int n = 2;
    const double alpha = 0.30;

    const PairSet ps = pairs_alpha(spec, pot, EdgeLabel::bottom, n, alpha, gamma, 2, 1);
    CHECK(ps.upper_tail);
    for (const auto& [b, w] : ps.pairs) {
        CHECK(b.color() == Face::black); // f^n(pair) covers both faces
        CHECK(w.color() == Face::white);
    }

    // oracle: enumerate the 81 pairs, sample Birkhoff values densely over
    // both tiles; certain selections must be a subset of the oracle's finds
    // and the oracle's finds a subset of the possible selections
    std::int64_t oracle_found = 0;
    bool subset_ok = true;
    std::set<std::pair<std::int64_t, std::int64_t>> possible_set, certain_set;
    {
        const PairSet all = pairs_alpha(spec, pot, EdgeLabel::bottom, n, -10.0, gamma, 2, 1);
        // alpha = -10 with upper-tail flag off selects nothing; rebuild the
        // member sets from the materialized pairs of ps instead
        (void)all;
    }
    for (const auto& [b, w] : ps.pairs) {
        const TileRegion rb = tile_region(spec, b);
        possible_set.insert({face_index(rb.face) * 100000 + rb.ax, rb.by});
    }
    for_each_tile(spec, Subsystem::full(spec), n, [&](const TileWalker& walker) {
        const TileRegion r = walker.region();
        if (r.color() != Face::black) return;
        const PairPartnerResult partner =
            pair_partner(spec, EdgeLabel::bottom, TileAddress{walker.letters()});
        double best = -1e300;
        for (const TileRegion& reg : {r, partner.white_region}) {
            for (int i = 0; i < 6; ++i)
                for (int j = 0; j < 6; ++j) {
                    PillowPoint x = canonicalize_point(
                        reg.face, reg.x0() + (i + 0.5) / 6.0 * reg.side(),
                        reg.y0() + (j + 0.5) / 6.0 * reg.side());
                    if (x.face != reg.face) x = PillowPoint{reg.face, x.x, x.y};
                    double s = 0.0;
                    PillowPoint z = x;
                    for (int k = 0; k < n; ++k) {
                        s += pot.eval(z);
                        z = apply_map(spec, z);
                    }
                    best = std::max(best, s / n);
                }
        }
        if (best >= alpha) {
            ++oracle_found;
            // a sampled witness implies certified-possible membership
            if (!possible_set.count({face_index(r.face) * 100000 + r.ax, r.by}))
                subset_ok = false;
        }
    });
    CHECK(subset_ok);
    CHECK(ps.certain_count <= oracle_found);   // certain <= true <= possible
    CHECK(oracle_found <= ps.possible_count);
    CHECK(ps.possible_count > 0);
    CHECK(ps.possible_count < 81);

    // monotone in alpha
    const PairSet low = pairs_alpha(spec, pot, EdgeLabel::bottom, 4, 0.4, gamma, 1, 1);
    const PairSet high = pairs_alpha(spec, pot, EdgeLabel::bottom, 4, 0.7, gamma, 1, 1);
    CHECK(high.possible_count <= low.possible_count);
    CHECK(high.certain_count <= high.possible_count);
}

TEST_CASE("deviation_report: partition mass, bound, slopes") {
    const MapSpec spec(3);
    const Potential pot = g2();
    CurveOptions copts = fast_opts();
    copts.grid = 65;
    const PressureCurve curve = pressure_curve(spec, pot, grid(-10, 10, 21), copts);
    const EnergyRange er = energy_range(curve);
    const double alpha = er.gamma_phi + 0.6 * (er.alpha_max_hat - er.gamma_phi);
    const RateTable table = rate_function(curve, {alpha});

    const Subsystem full = Subsystem::full(spec);
    const EigenPair eig = eigen_pair(spec, full, pot, 65, 1e-7, 3000);
    const TileMeasurePair tm = tile_measures(spec, full, pot, 4, eig);
    const GibbsReport gr = gibbs_constants(spec, full, pot, tm.mu, eig.log_lambda);
    const DistortionConstants dc = distortion_constants(spec, pot, 2, 1.0);

    const DeviationReport rep = deviation_report(spec, pot, EdgeLabel::bottom, alpha, 3, 5,
                                                 table, eig, gr.c_literal, dc, 2, 2);
    REQUIRE(rep.rows.size() == 3);
    CHECK(rep.first_valid_n == 3);
    CHECK(rep.holds_from_first);
    for (const auto& row : rep.rows) {
        CHECK(row.mass_pairs >= row.mass_tiles - 1e-12); // tiles sit inside pairs
        CHECK(row.mass_pairs <= 1.0 + 1e-9);
        CHECK(row.bound_holds);
        CHECK(row.slope > 0.0);
        CHECK(row.pairs_certain <= row.pairs_possible);
    }
    // masses of a fixed deviation threshold decay with the level
    for (std::size_t k = 1; k < rep.rows.size(); ++k)
        CHECK(rep.rows[k].mass_pairs < rep.rows[k - 1].mass_pairs);

    // pair partition of the measure: summing mu over every pair gives 1
    {
        const int n = 3;
        const TileMeasurePair tmn = tile_measures(spec, full, pot, n, eig);
        std::int64_t side = 27;
        std::vector<double> w(static_cast<std::size_t>(2 * side * side), 0.0);
        std::size_t k = 0;
        for_each_tile(spec, full, n, [&](const TileWalker& walker) {
            const TileRegion r = walker.region();
            w[(static_cast<std::size_t>(face_index(r.face)) * side + r.ax) * side + r.by] =
                tmn.mu.weights[k++];
        });
        std::vector<double> pair_masses;
        for_each_tile(spec, full, n, [&](const TileWalker& walker) {
            const TileRegion r = walker.region();
            if (r.color() != Face::black) return;
            const PairPartnerResult res =
                pair_partner(spec, EdgeLabel::bottom, TileAddress{walker.letters()});
            const auto& p = res.white_region;
            pair_masses.push_back(
                w[(static_cast<std::size_t>(face_index(r.face)) * side + r.ax) * side + r.by] +
                w[(static_cast<std::size_t>(face_index(p.face)) * side + p.ax) * side + p.by]);
        });
        CHECK(pair_masses.size() == 729);
        CHECK(pairwise_sum(pair_masses) == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("deviation selection is monotone in alpha") {
    const MapSpec spec(3);
    const Potential pot = g2();
    const EigenPair eig = eigen_pair(spec, Subsystem::full(spec), pot, 65, 1e-7, 3000);
    const TileScan scan = scan_full_map(spec, pot, 4, 1, 2);
    // reuse pairs_alpha for three thresholds
    double gamma = 0.25;
    std::int64_t prev = -1;
    for (double alpha : {0.35, 0.55, 0.75}) {
        const PairSet ps = pairs_alpha(spec, pot, EdgeLabel::left, 4, alpha, gamma, 1, 1);
        if (prev >= 0) CHECK(ps.possible_count <= prev);
        prev = ps.possible_count;
    }
    (void)eig;
    (void)scan;
}
