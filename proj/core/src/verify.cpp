#include "tilepress/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tilepress/csv.hpp"
#include "tilepress/errors.hpp"
#include "tilepress/ldp.hpp"
#include "tilepress/sum.hpp"
#include "tilepress/thermo.hpp"

namespace tilepress {

namespace {

PillowPoint random_point(SplitMix64& rng) {
    const Face f = rng.next_below(2) == 0 ? Face::white : Face::black;
    return canonicalize_point(f, rng.next_double(), rng.next_double());
}

std::string num(double v) { return fmt17(v); }

} // namespace

std::vector<CheckResult> run_verification(const RunConfig& cfg, int threads) {
    std::vector<CheckResult> out;
    const MapSpec spec = cfg.make_spec();
    const Subsystem sub = cfg.make_subsystem();
    const Potential pot = cfg.make_potential();
    auto add = [&out](std::string name, bool pass, std::string detail) {
        out.push_back(CheckResult{std::move(name), pass, std::move(detail)});
    };

    // --- pillow: gluing continuity of the potential on the equator ---
    {
        SplitMix64 rng(101);
        double worst = 0.0;
        for (int k = 0; k < 2000; ++k) {
            double x = rng.next_double(), y = rng.next_double();
            switch (rng.next_below(4)) {
                case 0: x = 0.0; break;
                case 1: x = 1.0; break;
                case 2: y = 0.0; break;
                default: y = 1.0; break;
            }
            const double vw = pot.eval(PillowPoint{Face::white, x, y});
            const double vb = pot.eval(PillowPoint{Face::black, x, y});
            worst = std::max(worst, std::abs(vw - vb));
        }
        add("pillow.gluing_agreement", worst <= 1e-12, "max boundary mismatch " + num(worst));
    }

    // --- pillow: Holder bound on sampled pairs ---
    {
        SplitMix64 rng(102);
        double worst = 0.0;
        for (int k = 0; k < 2000; ++k) {
            const PillowPoint p = random_point(rng), q = random_point(rng);
            const double d = path_distance(p, q);
            if (d == 0.0) continue;
            const double lhs = std::abs(pot.eval(p) - pot.eval(q));
            worst = std::max(worst, lhs / (pot.holder_seminorm() * std::pow(d, pot.kappa()) + 1e-300));
        }
        add("pillow.holder_seminorm", worst <= 1.0 + 1e-9,
            "max |phi(p)-phi(q)| / (seminorm d^kappa) = " + num(worst));
    }

    // --- pillow: expansion cocycle (exact similarity on tiles) ---
    {
        const double c0 = measure_c0(spec, 4000);
        add("pillow.expansion_cocycle", c0 <= std::sqrt(2.0) && c0 <= 1.0 + 1e-9,
            "measured C0 = " + num(c0) + " (must be <= sqrt 2)");
    }

    // --- pillow: boundary invariance, exact ---
    {
        SplitMix64 rng(103);
        bool ok = true;
        for (int k = 0; k < 2000 && ok; ++k) {
            double x = rng.next_double(), y = rng.next_double();
            if (rng.next_below(2) == 0) x = rng.next_below(2) == 0 ? 0.0 : 1.0;
            else y = rng.next_below(2) == 0 ? 0.0 : 1.0;
            const PillowPoint p = canonicalize_point(Face::white, x, y);
            ok = apply_map(spec, p).on_equator();
        }
        add("pillow.boundary_invariance", ok, "f maps the equator into itself exactly");
    }

    // --- pillow: continuity across subdivision lines ---
    {
        SplitMix64 rng(104);
        double worst = 0.0;
        for (int k = 0; k < 1000; ++k) {
            // a point on an interior vertical grid line, computed via both cells
            const std::int64_t i = 1 + static_cast<std::int64_t>(rng.next_below(
                                           static_cast<std::uint64_t>(spec.m - 1)));
            const double x = static_cast<double>(i) / static_cast<double>(spec.m);
            const double y = rng.next_double();
            const Face f = rng.next_below(2) == 0 ? Face::white : Face::black;
            const std::int64_t j =
                std::min<std::int64_t>(static_cast<std::int64_t>(y * spec.m), spec.m - 1);
            auto via_cell = [&](std::int64_t ci) {
                const double u = x * spec.m - static_cast<double>(ci);
                const double v = y * spec.m - static_cast<double>(j);
                const Face tgt = ((ci + j) % 2 == 0) ? f : opposite(f);
                return canonicalize_point(tgt, (ci % 2 == 0) ? u : 1.0 - u,
                                          (j % 2 == 0) ? v : 1.0 - v);
            };
            const PillowPoint a = via_cell(i - 1), b = via_cell(i);
            worst = std::max(worst, path_distance(a, b));
        }
        add("pillow.grid_continuity", worst <= 1e-12,
            "max mismatch across shared cell edges " + num(worst));
    }

    // --- pillow: iterate composition oracle ---
    {
        SplitMix64 rng(105);
        const MapSpec it2 = iterate_spec(spec, 2);
        double worst = 0.0;
        for (int k = 0; k < 1000; ++k) {
            const PillowPoint p = random_point(rng);
            const PillowPoint a = apply_map(it2, p);
            const PillowPoint b = apply_map(spec, apply_map(spec, p));
            worst = std::max(worst, path_distance(a, b));
        }
        add("pillow.iterate_agreement", worst <= 1e-10, "max |f_{m^2} - f_m^2| = " + num(worst));
    }

    // --- cells: word counts match tile-matrix powers ---
    {
        const Mat2 a = tile_matrix(spec, sub);
        bool ok = true;
        std::string detail;
        for (int n = 1; n <= std::min(4, cfg.n_max); ++n) {
            if (count_tiles(spec, sub, n) > cfg.capacity) break;
            const Mat2 counted = tile_matrix_at_level(spec, sub, n);
            if (!(counted == a.power(n))) {
                ok = false;
                detail = "mismatch at level " + std::to_string(n);
                break;
            }
        }
        add("cells.matrix_power_counts", ok, ok ? "A(Dom^n) = A^n exactly" : detail);
    }

    // --- cells: nesting of prefix boxes ---
    {
        bool ok = true;
        const int n = std::min(4, cfg.n_max);
        for_each_tile(spec, sub, n, [&](const TileWalker& w) {
            if (!ok) return;
            const TileRegion leaf = w.region();
            TileWalker pre(spec);
            for (int k = 0; k < n - 1; ++k) pre.push(w.letters()[static_cast<std::size_t>(k)]);
            const TileRegion parent = pre.region();
            const bool inside = leaf.face == parent.face && leaf.x0() >= parent.x0() - 1e-15 &&
                                leaf.x1() <= parent.x1() + 1e-15 &&
                                leaf.y0() >= parent.y0() - 1e-15 && leaf.y1() <= parent.y1() + 1e-15;
            ok = ok && inside;
        });
        add("cells.nesting", ok, "box(t1..tn) inside box(t1..t_{n-1})");
    }

    // --- cells/ldp: pair partition of the sphere ---
    {
        bool ok = true;
        std::string detail = "";
        for (int n = 1; n <= 2 && ok; ++n) {
            std::int64_t side = 1;
            for (int k = 0; k < n; ++k) side *= spec.m;
            std::vector<char> used(static_cast<std::size_t>(2 * side * side), 0);
            std::int64_t pairs = 0;
            for_each_tile(spec, Subsystem::full(spec), n, [&](const TileWalker& w) {
                const TileRegion r = w.region();
                if (r.color() != Face::black) return;
                const PairPartnerResult pr =
                    pair_partner(spec, cfg.e0_label(), TileAddress{w.letters()});
                ++pairs;
                const auto mark = [&](Face f, std::int64_t ax, std::int64_t by) {
                    const std::size_t idx =
                        (static_cast<std::size_t>(face_index(f)) * side + ax) * side + by;
                    used[idx] += 1;
                };
                mark(r.face, r.ax, r.by);
                mark(pr.white_region.face, pr.white_region.ax, pr.white_region.by);
            });
            std::int64_t expected = 1;
            for (int k = 0; k < n; ++k) expected *= spec.degree();
            if (pairs != expected) { ok = false; detail = "pair count off at level " + std::to_string(n); }
            for (char c : used)
                if (c != 1) { ok = false; detail = "tiles not partitioned into pairs"; }
        }
        add("cells.pair_partition", ok,
            ok ? "card P^n = deg^n, every tile in exactly one pair" : detail);
    }

    // --- subsystem: exact monotone area ---
    {
        bool ok = true;
        double prev = 2.0;
        for (int n = 1; n <= std::min(4, cfg.n_max); ++n) {
            if (count_tiles(spec, sub, n) > cfg.capacity) break;
            const LimitSetSample ls = limit_set_sample(spec, sub, n, cfg.capacity);
            const double area = static_cast<double>(ls.area_num) / static_cast<double>(ls.area_den);
            if (area > prev + 1e-15) ok = false;
            prev = area;
        }
        add("subsystem.area_monotone", ok, "area(union Dom^n) nonincreasing, last " + num(prev));
    }

    // --- thermo: certified submultiplicativity ---
    {
        bool ok_safe = true, ok_strong = true;
        std::vector<PartitionSum> z;
        const int top = std::min(5, cfg.n_max);
        for (int n = 1; n <= top; ++n)
            z.push_back(partition_sum(spec, sub, pot, n, std::min(cfg.zn_refine, 2), threads));
        for (int k = 1; k < top; ++k)
            for (int l = 1; k + l <= top; ++l) {
                const auto& zkl = z[static_cast<std::size_t>(k + l - 1)];
                const auto& zk = z[static_cast<std::size_t>(k - 1)];
                const auto& zl = z[static_cast<std::size_t>(l - 1)];
                if (zkl.lower_sum > zk.upper_sum * zl.upper_sum * (1 + 1e-12)) ok_safe = false;
                if (zkl.upper_sum > zk.upper_sum * zl.upper_sum * (1 + 1e-12)) ok_strong = false;
            }
        add("thermo.submultiplicative_certified", ok_safe,
            std::string("lower(Z_{k+l}) <= upper(Z_k) upper(Z_l); strong direction ") +
                (ok_strong ? "also holds" : "not conclusive"));
    }

    // --- thermo: eigen pair, distortion-law samples, Gibbs, invariance ---
    const ClassifyResult cls = classify(spec, sub, 6);
    if (cls.strongly_irreducible) {
        const int G = std::min(cfg.grid_G, 257);
        const EigenPair eig = eigen_pair(spec, sub, pot, G, cfg.tol, cfg.max_iter, threads);
        const double c0 = std::max(1.0, measure_c0(spec, 2000));
        const DistortionConstants dc =
            distortion_constants(spec, pot, cls.n_f_irreducible.value_or(1), c0);

        add("thermo.eigen_residual", eig.residual <= std::max(cfg.tol, 1e-6) * 10,
            "residual " + num(eig.residual) + " after " + std::to_string(eig.cesaro_steps) +
                " iterations");
        {
            const double umin = eig.u_tilde.min_value(), umax = eig.u_tilde.max_value();
            const bool ok = umin >= 1.0 / dc.cbar - 1e-12 && umax <= dc.cbar + 1e-12;
            add("thermo.eigenfunction_bounds", ok,
                "u in [" + num(umin) + ", " + num(umax) + "], Cbar = " + num(dc.cbar));
        }
        {
            // same-color operator ratio bound and cross-color uniform bound
            SplitMix64 rng(106);
            bool ok_same = true, ok_cross = true;
            const int nlev = 3;
            for (int s = 0; s < 200; ++s) {
                const Face c = rng.next_below(2) == 0 ? Face::white : Face::black;
                // both points on the face the color-c branches are defined on
                const PillowPoint x = canonicalize_point(c, rng.next_double(), rng.next_double());
                const PillowPoint y = canonicalize_point(c, rng.next_double(), rng.next_double());
                const double ix = branch_sum(spec, sub, pot, c, x, nlev);
                const double iy = branch_sum(spec, sub, pot, c, y, nlev);
                if (ix <= 0 || iy <= 0) continue;
                const double bound =
                    std::exp(dc.c1 * std::pow(path_distance(x, y), pot.kappa()));
                if (ix / iy > bound * (1 + 1e-9) || iy / ix > bound * (1 + 1e-9)) ok_same = false;
                const PillowPoint xw =
                    canonicalize_point(Face::white, rng.next_double(), rng.next_double());
                const PillowPoint yb =
                    canonicalize_point(Face::black, rng.next_double(), rng.next_double());
                const double iw = branch_sum(spec, sub, pot, Face::white, xw, nlev);
                const double ib = branch_sum(spec, sub, pot, Face::black, yb, nlev);
                if (iw > 0 && ib > 0 && (iw / ib > dc.cbar || ib / iw > dc.cbar)) ok_cross = false;
            }
            add("thermo.operator_ratio_same_color", ok_same,
                "ratios <= exp(C1 d^kappa), C1 = " + num(dc.c1));
            add("thermo.operator_ratio_cross_color", ok_cross,
                "cross-color ratios <= Cbar = " + num(dc.cbar));
        }
        {
            const int n = std::max(2, std::min(4, cfg.n_max));
            const TileMeasurePair tm = tile_measures(spec, sub, pot, n, eig, cfg.capacity);
            const double sum_m = pairwise_sum(tm.m.weights);
            const double sum_mu = pairwise_sum(tm.mu.weights);
            add("thermo.measure_totals",
                std::abs(sum_m - 1.0) <= 1e-9 && std::abs(sum_mu - 1.0) <= 1e-9,
                "m total " + num(sum_m) + ", mu total " + num(sum_mu));

            // Jacobian relation between consecutive levels
            const TileMeasurePair tm1 = tile_measures(spec, sub, pot, n - 1, eig, cfg.capacity);
            // index level-(n-1) weights by region for lookup
            std::int64_t side1 = 1;
            for (int k = 0; k < n - 1; ++k) side1 *= spec.m;
            std::vector<double> wprev(static_cast<std::size_t>(2 * side1 * side1), 0.0);
            {
                std::size_t idx = 0;
                for_each_tile(spec, sub, n - 1, [&](const TileWalker& w) {
                    const TileRegion r = w.region();
                    wprev[(static_cast<std::size_t>(face_index(r.face)) * side1 + r.ax) * side1 +
                          r.by] = tm1.m.weights[idx++];
                });
            }
            bool ok = true;
            double worst = 0.0;
            const double tolerance = std::exp(2.0 * dc.c1_diam_kappa());
            std::size_t idx = 0;
            for_each_tile(spec, sub, n, [&](const TileWalker& w) {
                const double wn = tm.m.weights[idx++];
                // F(X) drops the first letter
                TileWalker img(spec);
                for (std::size_t k = 1; k < w.letters().size(); ++k) img.push(w.letters()[k]);
                const TileRegion r = img.region();
                const double wimg =
                    wprev[(static_cast<std::size_t>(face_index(r.face)) * side1 + r.ax) * side1 +
                          r.by];
                if (wimg <= 0 || wn <= 0) { ok = false; return; }
                const PillowPoint c = w.region().center();
                const double expected = eig.lambda * std::exp(-pot.eval(c));
                const double ratio = (wimg / wn) / expected;
                worst = std::max(worst, std::max(ratio, 1.0 / ratio));
                if (worst > tolerance) ok = false;
            });
            add("thermo.jacobian_relation", ok,
                "max deviation factor " + num(worst) + " <= exp(2 C1 diam^kappa) = " +
                    num(tolerance));

            // f-invariance of mu
            double worst_inv = 0.0;
            for (std::size_t b = 0; b < Potential::basis_size; ++b) {
                std::array<double, Potential::basis_size> cb{};
                cb[b] = 1.0;
                const Potential g(cb, 1.0);
                std::vector<double> gs, gfs;
                gs.reserve(tm.mu.weights.size());
                gfs.reserve(tm.mu.weights.size());
                std::size_t k = 0;
                for_each_tile(spec, sub, n, [&](const TileWalker& w) {
                    const PillowPoint c = w.region().center();
                    const double wt = tm.mu.weights[k++];
                    gs.push_back(wt * g.eval(c));
                    gfs.push_back(wt * g.eval(apply_map(spec, c)));
                });
                worst_inv = std::max(worst_inv,
                                     std::abs(pairwise_sum(gfs) - pairwise_sum(gs)));
            }
            add("thermo.mu_invariance", worst_inv <= 0.02,
                "max |int g.f dmu - int g dmu| = " + num(worst_inv) + " at level " +
                    std::to_string(n));

            const PressureEstimate pe =
                pressure_estimate(spec, sub, pot, std::min(cfg.n_max, 6), cfg.zn_refine, threads);
            const bool inside = eig.log_lambda >= pe.lower - 1e-12 &&
                                eig.log_lambda <= pe.fekete_upper + 1e-12;
            add("thermo.pressure_bracket", inside,
                "log lambda " + num(eig.log_lambda) + " in [" + num(pe.lower) + ", " +
                    num(pe.fekete_upper) + "], width " + num(pe.width()));

            const GibbsReport gr = gibbs_constants(spec, sub, pot, tm.mu, eig.log_lambda);
            const double theoretical =
                std::exp(dc.c1_diam_kappa()) * dc.cbar *
                std::sqrt(std::max(eig.dual.face_mass(Face::white),
                                   eig.dual.face_mass(Face::black)) /
                          std::min(eig.dual.face_mass(Face::white),
                                   eig.dual.face_mass(Face::black)));
            add("thermo.gibbs_constant", gr.c_observed <= theoretical,
                "C_observed " + num(gr.c_observed) + " <= assembled bound " + num(theoretical));
        }
    } else {
        add("thermo.eigen_residual", false,
            "subsystem not certified strongly irreducible at cap " +
                std::to_string(cls.search_cap));
    }

    // --- ldp: rate-function identities (strict-convexity gate) ---
    {
        std::vector<double> tg;
        const int tc = std::max(5, std::min(cfg.t_count, 11));
        for (int k = 0; k < tc; ++k)
            tg.push_back(cfg.t_min + (cfg.t_max - cfg.t_min) * k / (tc - 1));
        CurveOptions copt;
        copt.grid = std::min(cfg.curve_G, 65);
        copt.tol = std::max(cfg.tol, 1e-7);
        copt.max_iter = cfg.max_iter;
        copt.threads = threads;
        try {
            const PressureCurve curve = pressure_curve(spec, pot, tg, copt);
            const EnergyRange er = energy_range(curve);
            const RateTable table = rate_function(curve, {er.gamma_phi});
            const bool ok = std::abs(table.rows[0].rate) <= 1e-6 &&
                            std::abs(table.rows[0].xi - 1.0) <= 1e-6;
            add("ldp.rate_identities", ok,
                "I(gamma) = " + num(table.rows[0].rate) + ", xi(gamma) = " +
                    num(table.rows[0].xi));
        } catch (const gate_error& e) {
            add("ldp.convexity_gate", false, e.what());
        }
    }

    return out;
}

} // namespace tilepress
