#include "tilepress/ldp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tilepress/errors.hpp"
#include "tilepress/sum.hpp"

namespace tilepress {

namespace {

int locate(const std::vector<double>& grid, double at) {
    if (grid.size() < 2) throw std::invalid_argument("curve: need at least two grid points");
    if (at < grid.front() || at > grid.back())
        throw std::out_of_range("curve: evaluation point outside the t grid");
    auto it = std::upper_bound(grid.begin(), grid.end(), at);
    int i = static_cast<int>(it - grid.begin()) - 1;
    return std::clamp(i, 0, static_cast<int>(grid.size()) - 2);
}

} // namespace

double PressureCurve::eval_p(double at) const {
    const int i = locate(t, at);
    const double h = t[i + 1] - t[i];
    const double s = (at - t[i]) / h;
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
    return h00 * p[i] + h10 * h * dp[i] + h01 * p[i + 1] + h11 * h * dp[i + 1];
}

double PressureCurve::eval_dp(double at) const {
    const int i = locate(t, at);
    const double s = (at - t[i]) / (t[i + 1] - t[i]);
    return (1.0 - s) * dp[i] + s * dp[i + 1];
}

double PressureCurve::eval_p_prime(double at) const {
    const int i = locate(t, at);
    const double h = t[i + 1] - t[i];
    const double s = (at - t[i]) / h;
    const double dh00 = 6 * s * s - 6 * s, dh10 = 3 * s * s - 4 * s + 1;
    const double dh01 = -6 * s * s + 6 * s, dh11 = 3 * s * s - 2 * s;
    return (dh00 * p[i] + dh01 * p[i + 1]) / h + dh10 * dp[i] + dh11 * dp[i + 1];
}

double PressureCurve::max_interior_ddp() const {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k + 1 < ddp.size(); ++k) m = std::max(m, ddp[k]);
    return m;
}

PressureCurve pressure_curve(const MapSpec& spec, const Potential& pot,
                             const std::vector<double>& t_grid, const CurveOptions& opt) {
    if (t_grid.size() < 3) throw std::invalid_argument("pressure_curve: need at least 3 t values");
    if (!std::is_sorted(t_grid.begin(), t_grid.end()))
        throw std::invalid_argument("pressure_curve: t grid must be sorted");
    PressureCurve curve;
    curve.t = t_grid;
    curve.source = opt.method;
    const Subsystem full = Subsystem::full(spec);
    for (double tv : t_grid) {
        const Potential pt = pot.scaled(tv);
        if (opt.method == CurveMethod::eigen) {
            const EigenPair e = eigen_pair(spec, full, pt, opt.grid, opt.tol, opt.max_iter,
                                           opt.threads);
            curve.p.push_back(e.log_lambda);
            // p'(t) = int phi d mu_{t phi}: integrate against the level-L
            // equilibrium weights. Node slopes from this identity keep the
            // interpolant convex, which central differences cannot guarantee.
            const TileMeasurePair tm = tile_measures(spec, full, pt, opt.dp_level, e);
            std::vector<double> vals;
            vals.reserve(tm.mu.weights.size());
            std::size_t k = 0;
            for_each_tile(spec, full, opt.dp_level, [&](const TileWalker& w) {
                vals.push_back(tm.mu.weights[k++] * pot.eval(w.region().center()));
            });
            curve.dp.push_back(pairwise_sum(vals));
        } else {
            const PressureEstimate est =
                pressure_estimate(spec, full, pt, opt.zn_n_max, opt.zn_refine, opt.threads);
            curve.p.push_back(0.5 * (est.fekete_upper + est.lower));
        }
    }
    const std::size_t n = t_grid.size();
    curve.ddp.assign(n, 0.0);
    if (curve.dp.empty()) {
        // zn_bracket route carries no measures; fall back to central differences
        curve.dp.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            if (k == 0)
                curve.dp[k] = (curve.p[1] - curve.p[0]) / (curve.t[1] - curve.t[0]);
            else if (k + 1 == n)
                curve.dp[k] = (curve.p[k] - curve.p[k - 1]) / (curve.t[k] - curve.t[k - 1]);
            else
                curve.dp[k] =
                    (curve.p[k + 1] - curve.p[k - 1]) / (curve.t[k + 1] - curve.t[k - 1]);
        }
    }
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const double hl = curve.t[k] - curve.t[k - 1], hr = curve.t[k + 1] - curve.t[k];
        curve.ddp[k] =
            2.0 * ((curve.p[k + 1] - curve.p[k]) / hr - (curve.p[k] - curve.p[k - 1]) / hl) /
            (hl + hr);
        // the slope data must stay consistent with the sampled p
        const double central = (curve.p[k + 1] - curve.p[k - 1]) / (hl + hr);
        if (std::abs(curve.dp[k] - central) > 0.05)
            throw gate_error("pressure curve: measured derivative deviates from the sampled "
                             "curve; increase the grid or the measure level");
    }
    if (curve.max_interior_ddp() <= 1e-6)
        throw gate_error(
            "pressure curve is flat (max ddp <= 1e-6): potential co-homologous to a constant "
            "suspected; the deviation theory requires strict convexity");
    return curve;
}

EnergyRange energy_range(const PressureCurve& curve) {
    EnergyRange er;
    // same interpolant the rate-function bisection inverts, so xi(gamma) = 1
    er.gamma_phi = curve.eval_p_prime(1.0);
    er.alpha_min_hat = curve.dp.front();
    er.alpha_max_hat = curve.dp.back();
    if (!(er.alpha_min_hat < er.gamma_phi && er.gamma_phi < er.alpha_max_hat))
        throw gate_error("energy_range: gamma is not strictly inside the hat interval");
    return er;
}

double RateTable::rate_at(double alpha) const {
    for (const auto& r : rows)
        if (r.alpha == alpha) return r.rate;
    throw std::out_of_range("RateTable: alpha not tabulated");
}

double RateTable::xi_at(double alpha) const {
    for (const auto& r : rows)
        if (r.alpha == alpha) return r.xi;
    throw std::out_of_range("RateTable: alpha not tabulated");
}

RateTable rate_function(const PressureCurve& curve, const std::vector<double>& alphas) {
    const EnergyRange er = energy_range(curve);
    RateTable table;
    table.gamma_phi = er.gamma_phi;
    table.alpha_min_hat = er.alpha_min_hat;
    table.alpha_max_hat = er.alpha_max_hat;
    const double p1 = curve.eval_p(1.0);

    // dense refinement of the Hermite interpolant for the Legendre route
    const int dense_per_interval = 512;

    for (double alpha : alphas) {
        if (!(alpha > er.alpha_min_hat && alpha < er.alpha_max_hat))
            throw std::out_of_range(
                "rate_function: alpha outside the estimated energy range (" +
                std::to_string(er.alpha_min_hat) + ", " + std::to_string(er.alpha_max_hat) + ")");
        // monotone bisection on the interpolated derivative of the p spline,
        // so both routes below work with the same function
        double lo = curve.t.front(), hi = curve.t.back();
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double v = curve.eval_p_prime(mid);
            if (std::abs(v - alpha) <= 1e-10 || hi - lo < 1e-14) { lo = hi = mid; break; }
            if (v < alpha) lo = mid; else hi = mid;
        }
        const double xi = 0.5 * (lo + hi);
        const double rate = p1 - alpha + xi * alpha - curve.eval_p(xi);

        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 1 < curve.t.size(); ++i) {
            for (int k = 0; k <= dense_per_interval; ++k) {
                const double tt =
                    curve.t[i] + (curve.t[i + 1] - curve.t[i]) * k / dense_per_interval;
                best = std::max(best, tt * alpha - curve.eval_p(tt));
            }
        }
        const double legendre = p1 - alpha + best;
        table.rows.push_back(RateRow{alpha, xi, rate, std::abs(rate - legendre)});
    }
    return table;
}

// ---------------------------------------------------------------------------
// Full-map tile scans and pair structures
// ---------------------------------------------------------------------------

// the leaf evaluation lives in thermo.cpp; shared through a tiny internal
// interface so the tables and certificates are identical in both scans
namespace detail {
struct ScanTables;
const ScanTables* make_scan_tables(std::int64_t m, int levels);
void free_scan_tables(const ScanTables*);
void scan_leaf(const ScanTables& tb, const Potential& pot, Face face0, const std::int32_t* dx,
               const std::int32_t* dy, int N, int n, double& center, double& lo, double& hi);
void scan_leaf_interval(const ScanTables& tb, const Potential& pot, Face face0,
                        const std::int32_t* dx, const std::int32_t* dy, int N, int n, double& lo,
                        double& hi);
} // namespace detail

namespace {

struct ScanDfs {
    const MapSpec* spec;
    const Potential* pot;
    const detail::ScanTables* tb;
    TileScan* out;
    int n, N;
    Face position;
    std::vector<std::int32_t> dx, dy;
    std::vector<Face> colors;
    bool flip_x = false, flip_y = false;
    std::int64_t anc_ax = 0, anc_by = 0;
    double anc_hi = 0.0, anc_lo = 0.0;
    bool anc_open = false;
    std::vector<std::int64_t> ax_stack, by_stack, denom_stack;

    void run(const OneTileLabel& first) {
        position = first.home;
        dx.assign(static_cast<std::size_t>(N), 0);
        dy.assign(static_cast<std::size_t>(N), 0);
        colors.assign(static_cast<std::size_t>(N), Face::white);
        ax_stack.assign(static_cast<std::size_t>(N) + 1, 0);
        by_stack.assign(static_cast<std::size_t>(N) + 1, 0);
        denom_stack.assign(static_cast<std::size_t>(N) + 1, 1);
        push_letter(0, first);
        descend(1);
        pop_letter(0, first);
    }

    void push_letter(int depth, const OneTileLabel& t) {
        const std::int32_t ci = flip_x ? static_cast<std::int32_t>(spec->m) - 1 - t.i : t.i;
        const std::int32_t cj = flip_y ? static_cast<std::int32_t>(spec->m) - 1 - t.j : t.j;
        dx[depth] = ci;
        dy[depth] = cj;
        ax_stack[depth + 1] = ax_stack[depth] * spec->m + ci;
        by_stack[depth + 1] = by_stack[depth] * spec->m + cj;
        denom_stack[depth + 1] = denom_stack[depth] * spec->m;
        flip_x = flip_x != (t.i % 2 != 0);
        flip_y = flip_y != (t.j % 2 != 0);
        colors[depth] = label_color(t);
    }

    void pop_letter(int, const OneTileLabel& t) {
        flip_x = flip_x != (t.i % 2 != 0);
        flip_y = flip_y != (t.j % 2 != 0);
    }

    double lemma_osc = 0.0; // used when N == n: lemma bracket around the center

    void descend(int depth) {
        const std::int64_t m = spec->m;
        if (depth == n) {
            double c, l, h;
            detail::scan_leaf(*tb, *pot, position, dx.data(), dy.data(), n, n, c, l, h);
            const std::size_t idx = out->index(position, ax_stack[n], by_stack[n]);
            if (N == n) {
                out->s_center[idx] = c;
                out->s_lo[idx] = static_cast<float>(c - lemma_osc);
                out->s_hi[idx] = static_cast<float>(c + lemma_osc);
                return;
            }
            anc_open = false;
            for (std::int32_t i = 0; i < m; ++i)
                for (std::int32_t j = 0; j < m; ++j) {
                    const OneTileLabel t{colors[depth - 1], i, j};
                    push_letter(depth, t);
                    descend(depth + 1);
                    pop_letter(depth, t);
                }
            out->s_center[idx] = c;
            out->s_lo[idx] = static_cast<float>(anc_lo);
            out->s_hi[idx] = static_cast<float>(anc_hi);
            return;
        }
        if (depth == N) {
            double l, h;
            detail::scan_leaf_interval(*tb, *pot, position, dx.data(), dy.data(), N, n, l, h);
            if (!anc_open) {
                anc_lo = l;
                anc_hi = h;
                anc_open = true;
            } else {
                anc_lo = std::min(anc_lo, l);
                anc_hi = std::max(anc_hi, h);
            }
            return;
        }
        for (std::int32_t i = 0; i < m; ++i)
            for (std::int32_t j = 0; j < m; ++j) {
                const OneTileLabel t{colors[depth - 1], i, j};
                push_letter(depth, t);
                descend(depth + 1);
                pop_letter(depth, t);
            }
    }
};

} // namespace

TileScan scan_full_map(const MapSpec& spec, const Potential& pot, int n, int refine, int threads,
                       std::int64_t cap) {
    if (n < 1 || refine < 0 || n + refine > 32)
        throw std::invalid_argument("scan_full_map: bad level/refine");
    std::int64_t side = 1;
    for (int k = 0; k < n; ++k) side *= spec.m;
    const std::int64_t tiles = 2 * side * side;
    std::int64_t leaves = tiles;
    for (int k = 0; k < refine; ++k) leaves *= spec.degree();
    if (leaves > cap) throw capacity_error("scan_full_map: scan too large", leaves, cap);

    TileScan out;
    out.level = n;
    out.refine = refine;
    out.side = side;
    out.s_hi.assign(static_cast<std::size_t>(tiles), 0.0f);
    out.s_lo.assign(static_cast<std::size_t>(tiles), 0.0f);
    out.s_center.assign(static_cast<std::size_t>(tiles), 0.0);

    // the refine = 0 bracket pads the center value by the distortion-lemma
    // oscillation bound: osc(S_n phi over an n-tile) <= |phi|_k sum_r (diam m^-r)^k
    double osc = 0.0;
    {
        const double kappa = pot.kappa();
        for (int r = 1; r <= n; ++r)
            osc += pot.holder_seminorm() *
                   std::pow(pillow_diameter() / std::pow(spec.expansion(), r), kappa);
    }

    const detail::ScanTables* tables = detail::make_scan_tables(spec.m, n + refine);
    const Subsystem full = Subsystem::full(spec);
    const auto& firsts = full.labels();
    parallel_partitions(static_cast<int>(firsts.size()), threads, [&](int p) {
        ScanDfs dfs;
        dfs.spec = &spec;
        dfs.pot = &pot;
        dfs.tb = tables;
        dfs.out = &out;
        dfs.n = n;
        dfs.N = n + refine;
        dfs.lemma_osc = osc;
        dfs.run(firsts[static_cast<std::size_t>(p)]);
    });
    detail::free_scan_tables(tables);
    return out;
}

namespace {

/// XOR of the letter parities along one axis for the tile with box integer
/// `box` at level n: equals the accumulated reflection of the pulled-back
/// 0-edge on that axis. Order-free because the side flips commute.
bool axis_side_flip(std::int64_t m, std::int64_t box, int n) {
    std::int32_t digit[34];
    for (int k = n - 1; k >= 0; --k) {
        digit[k] = static_cast<std::int32_t>(box % m);
        box /= m;
    }
    bool flip = false;
    for (int k = 0; k < n; ++k) {
        const std::int32_t letter = flip ? static_cast<std::int32_t>(m) - 1 - digit[k] : digit[k];
        if (letter & 1) flip = !flip;
    }
    return flip;
}

EdgeLabel pulled_back_side_of_box(const MapSpec& spec, std::int64_t ax, std::int64_t by, int n,
                                  EdgeLabel e0) {
    if (e0 == EdgeLabel::bottom || e0 == EdgeLabel::top) {
        const bool f = axis_side_flip(spec.m, by, n);
        if (!f) return e0;
        return e0 == EdgeLabel::bottom ? EdgeLabel::top : EdgeLabel::bottom;
    }
    const bool f = axis_side_flip(spec.m, ax, n);
    if (!f) return e0;
    return e0 == EdgeLabel::left ? EdgeLabel::right : EdgeLabel::left;
}

struct PairScanTotals {
    double total_mu = 0.0;                 // sum of unnormalized mu weights over all tiles
    double mass_tiles = 0.0;               // unnormalized mass of the tile upper set
    double mass_pairs = 0.0;               // unnormalized mass of the pair upper set
    std::int64_t certain = 0, possible = 0;
    // level-1 interior witnesses of the selected big-map labels, [color][position]
    std::array<std::array<bool, 2>, 2> witness{{{false, false}, {false, false}}};
    std::array<std::array<std::int64_t, 2>, 2> label_count{{{0, 0}, {0, 0}}};
};

/// Walks every black tile of the scan level, finds the pair partner across
/// the pulled-back 0-edge, applies the certified selection, and aggregates
/// masses. `emit` (optional) receives the selected pair boxes.
PairScanTotals pair_scan(const MapSpec& spec, const TileScan& scan, const EigenPair& eig,
                         EdgeLabel e0, double alpha, bool upper_tail,
                         const std::function<void(Face, std::int64_t, std::int64_t, Face,
                                                  std::int64_t, std::int64_t, bool)>& emit) {
    PairScanTotals tot;
    const std::int64_t side = scan.side;
    const int n = scan.level;
    const double mw = eig.dual.face_mass(Face::white);
    const double mb = eig.dual.face_mass(Face::black);
    const double loglam = eig.log_lambda;

    auto mu_weight = [&](Face f, std::int64_t ax, std::int64_t by) {
        const std::size_t idx = scan.index(f, ax, by);
        const Face color = ((ax + by) % 2 == 0) ? f : opposite(f);
        const double mcol = color == Face::white ? mw : mb;
        const double cx = (static_cast<double>(ax) + 0.5) / static_cast<double>(side);
        const double cy = (static_cast<double>(by) + 0.5) / static_cast<double>(side);
        return std::exp(scan.s_center[idx] - n * loglam) * mcol * eig.u_tilde.eval(f, cx, cy);
    };

    for (int f = 0; f < 2; ++f) {
        const Face face = static_cast<Face>(f);
        for (std::int64_t ax = 0; ax < side; ++ax)
            for (std::int64_t by = 0; by < side; ++by) {
                const std::size_t idx = scan.index(face, ax, by);
                const double w = mu_weight(face, ax, by);
                tot.total_mu += w;
                // tile-level deviation set D_n(alpha): certified bracket
                // crossing the threshold, counted on the safe side
                const bool tile_in = upper_tail
                                         ? (scan.s_hi[idx] / n >= alpha)
                                         : (scan.s_lo[idx] / n <= alpha);
                if (tile_in) tot.mass_tiles += w;

                const Face color = ((ax + by) % 2 == 0) ? face : opposite(face);
                if (color != Face::black) continue;
                // one pair per black tile
                const EdgeLabel sideedge = pulled_back_side_of_box(spec, ax, by, n, e0);
                const TileRegion reg{face, ax, by, side, n};
                Face pf;
                std::int64_t pax, pby;
                partner_box(spec, reg, sideedge, pf, pax, pby);
                const std::size_t pidx = scan.index(pf, pax, pby);

                const double hi = std::max(scan.s_hi[idx], scan.s_hi[pidx]);
                const double lo = std::min(scan.s_lo[idx], scan.s_lo[pidx]);
                const double cmax = std::max(scan.s_center[idx], scan.s_center[pidx]);
                const double cmin = std::min(scan.s_center[idx], scan.s_center[pidx]);
                bool possible, certain;
                if (upper_tail) {
                    possible = hi / n >= alpha;
                    certain = cmax / n >= alpha;
                } else {
                    possible = lo / n <= alpha;
                    certain = cmin / n <= alpha;
                }
                if (certain) ++tot.certain;
                if (!possible) continue;
                ++tot.possible;
                tot.mass_pairs += w + mu_weight(pf, pax, pby);
                // selected labels of the iterate subsystem f^n|P^n(alpha)
                for (int which = 0; which < 2; ++which) {
                    const Face tf = which == 0 ? face : pf;
                    const std::int64_t ta = which == 0 ? ax : pax;
                    const std::int64_t tb = which == 0 ? by : pby;
                    const Face tc = ((ta + tb) % 2 == 0) ? tf : opposite(tf);
                    tot.label_count[face_index(tc)][face_index(tf)] += 1;
                    const bool interior = ta > 0 && tb > 0 && ta + 1 < side && tb + 1 < side;
                    if (interior) tot.witness[face_index(tc)][face_index(tf)] = true;
                }
                if (emit) emit(face, ax, by, pf, pax, pby, certain);
            }
    }
    return tot;
}

} // namespace

PairSet pairs_alpha(const MapSpec& spec, const Potential& pot, EdgeLabel e0, int n, double alpha,
                    double gamma, int refine, int threads, std::int64_t materialize_cap) {
    PairSet ps;
    ps.e0 = e0;
    ps.level = n;
    ps.alpha = alpha;
    ps.upper_tail = alpha >= gamma;

    const TileScan scan = scan_full_map(spec, pot, n, refine, threads);
    // weights are not needed to decide membership, but pair_scan expects the
    // eigen data; pairs_alpha runs a light eigen solve at modest resolution
    const EigenPair eig = eigen_pair(spec, Subsystem::full(spec), pot, 65, 1e-7, 10'000, threads);

    std::vector<std::pair<TileAddress, TileAddress>> pairs;
    std::vector<OneTileLabel> big_labels;
    PairScanTotals tot = pair_scan(
        spec, scan, eig, e0, alpha, ps.upper_tail,
        [&](Face bf, std::int64_t bax, std::int64_t bby, Face wf, std::int64_t wax,
            std::int64_t wby, bool) {
            if (static_cast<std::int64_t>(pairs.size()) >= materialize_cap) return;
            pairs.emplace_back(address_of_box(spec, bf, bax, bby, n),
                               address_of_box(spec, wf, wax, wby, n));
            big_labels.push_back(
                OneTileLabel{bf, static_cast<std::int32_t>(bax), static_cast<std::int32_t>(bby)});
            big_labels.push_back(
                OneTileLabel{wf, static_cast<std::int32_t>(wax), static_cast<std::int32_t>(wby)});
        });
    ps.certain_count = tot.certain;
    ps.possible_count = tot.possible;
    if (tot.possible <= materialize_cap) ps.pairs = std::move(pairs);

    // strong primitivity of f^n|P^n(alpha): the selected tiles are the
    // 1-tiles of the iterate pillow map with factor m^n
    if (tot.possible <= materialize_cap && tot.possible > 0 && !big_labels.empty() &&
        tot.possible <= 100'000) {
        const MapSpec big = iterate_spec(spec, n);
        const Subsystem bsub(big, std::move(big_labels));
        const ClassifyResult cls = classify(big, bsub, 2);
        ps.strongly_primitive = cls.strongly_primitive;
        ps.n_f = cls.n_f_primitive;
        ps.classify_cap = cls.search_cap;
    } else {
        const bool colors_present = (tot.label_count[0][0] + tot.label_count[0][1]) > 0 &&
                                    (tot.label_count[1][0] + tot.label_count[1][1]) > 0;
        const bool full_witness = tot.witness[0][0] && tot.witness[0][1] && tot.witness[1][0] &&
                                  tot.witness[1][1];
        ps.classify_cap = 1;
        if (full_witness && colors_present) {
            ps.strongly_primitive = true;
            ps.n_f = 1;
        }
    }
    return ps;
}

DeviationReport deviation_report(const MapSpec& spec, const Potential& pot, EdgeLabel e0,
                                 double alpha, int n_lo, int n_hi, const RateTable& rate,
                                 const EigenPair& eig, double c_mu_literal,
                                 const DistortionConstants& dc, int refine, int threads) {
    if (n_lo < 1 || n_hi < n_lo) throw std::invalid_argument("deviation_report: bad n range");
    DeviationReport rep;
    rep.alpha = alpha;
    rep.gamma = rate.gamma_phi;
    rep.rate_value = rate.rate_at(alpha);
    rep.xi = rate.xi_at(alpha);
    rep.c_mu = c_mu_literal;
    rep.c1_diam_kappa = dc.c1_diam_kappa();
    const double iprime = rep.xi - 1.0; // I'(alpha) = xi(alpha) - 1
    rep.c_alpha = 2.0 * c_mu_literal *
                  std::exp(rep.c1_diam_kappa * (std::abs(2.0 * iprime) + 1.0));

    const bool upper_tail = alpha >= rate.gamma_phi;
    for (int n = n_lo; n <= n_hi; ++n) {
        const TileScan scan = scan_full_map(spec, pot, n, refine, threads);
        const PairScanTotals tot = pair_scan(spec, scan, eig, e0, alpha, upper_tail, nullptr);
        DeviationRow row;
        row.level = n;
        row.pairs_possible = tot.possible;
        row.pairs_certain = tot.certain;
        row.mass_tiles = tot.mass_tiles / tot.total_mu;
        row.mass_pairs = tot.mass_pairs / tot.total_mu;
        row.bound = rep.c_alpha * std::exp(-rep.rate_value * n);
        row.slope = row.mass_pairs > 0.0
                        ? -std::log(row.mass_pairs) / n
                        : std::numeric_limits<double>::infinity();
        row.bound_holds = row.mass_pairs <= row.bound;
        const bool colors_present = (tot.label_count[0][0] + tot.label_count[0][1]) > 0 &&
                                    (tot.label_count[1][0] + tot.label_count[1][1]) > 0;
        row.strongly_primitive = colors_present && tot.witness[0][0] && tot.witness[0][1] &&
                                 tot.witness[1][0] && tot.witness[1][1];
        rep.rows.push_back(row);
    }
    rep.first_valid_n = -1;
    for (const auto& row : rep.rows) {
        if (row.bound_holds) { rep.first_valid_n = row.level; break; }
    }
    if (rep.first_valid_n > 0) {
        rep.holds_from_first = true;
        for (const auto& row : rep.rows)
            if (row.level >= rep.first_valid_n && !row.bound_holds) rep.holds_from_first = false;
    }
    return rep;
}

} // namespace tilepress
