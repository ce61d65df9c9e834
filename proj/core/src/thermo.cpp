#include "tilepress/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "tilepress/errors.hpp"
#include "tilepress/sum.hpp"

namespace tilepress {

namespace {
constexpr double kPi = std::numbers::pi;
}

double spectral_radius(const Mat2d& a) {
    const double tr = a.v[0][0] + a.v[1][1];
    const double dd = a.v[0][0] - a.v[1][1];
    const double off = 4.0 * a.v[0][1] * a.v[1][0];
    return 0.5 * (tr + std::sqrt(dd * dd + off));
}

Mat2d operator*(const Mat2d& a, const Mat2d& b) {
    Mat2d c;
    for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q)
            c.v[p][q] = a.v[p][0] * b.v[0][q] + a.v[p][1] * b.v[1][q];
    return c;
}

SplitFunction SplitFunction::constant(int G, double value) {
    SplitFunction f;
    f.G = G;
    f.values[0].assign(static_cast<std::size_t>(G) * G, value);
    f.values[1].assign(static_cast<std::size_t>(G) * G, value);
    return f;
}

double SplitFunction::eval(Face f, double x, double y) const {
    const double fx = std::clamp(x, 0.0, 1.0) * (G - 1);
    const double fy = std::clamp(y, 0.0, 1.0) * (G - 1);
    int i0 = std::min(static_cast<int>(fx), G - 2);
    int j0 = std::min(static_cast<int>(fy), G - 2);
    const double tx = fx - i0, ty = fy - j0;
    const double* v = values[face_index(f)].data();
    const std::size_t base = static_cast<std::size_t>(i0) * G + j0;
    return v[base] * (1 - tx) * (1 - ty) + v[base + G] * tx * (1 - ty) +
           v[base + 1] * (1 - tx) * ty + v[base + G + 1] * tx * ty;
}

double SplitFunction::min_value() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& face : values)
        for (double v : face) m = std::min(m, v);
    return m;
}

double SplitFunction::max_value() const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& face : values)
        for (double v : face) m = std::max(m, v);
    return m;
}

double SplitFunction::mean_value() const {
    return 0.5 * (pairwise_sum(values[0]) + pairwise_sum(values[1])) /
           (static_cast<double>(G) * G);
}

SplitOperator::SplitOperator(const MapSpec& spec, const Subsystem& sub, const Potential& pot,
                             int G, int threads)
    : spec_(spec), sub_(sub), pot_(pot), G_(G), threads_(threads) {
    if (G < 2) throw std::invalid_argument("SplitOperator: grid resolution must be >= 2");
}

SplitFunction SplitOperator::apply(const SplitFunction& u) const {
    if (u.G != G_) throw std::invalid_argument("SplitOperator::apply: grid mismatch");
    SplitFunction out = SplitFunction::constant(G_, 0.0);
    const double step = 1.0 / (G_ - 1);
    // node rows are an embarrassingly parallel partition; every value is
    // independent of the split, so outputs are identical for any thread count
    parallel_partitions(G_, threads_, [&](int ix) {
        const double x = ix * step;
        for (int iy = 0; iy < G_; ++iy) {
            const double y = iy * step;
            for (int c = 0; c < 2; ++c) {
                const Face color = static_cast<Face>(c);
                double acc = 0.0;
                for (const auto& t : sub_.labels()) {
                    if (label_color(t) != color) continue;
                    const double bx =
                        (t.i + (t.i % 2 == 0 ? x : 1.0 - x)) / static_cast<double>(spec_.m);
                    const double by =
                        (t.j + (t.j % 2 == 0 ? y : 1.0 - y)) / static_cast<double>(spec_.m);
                    const double w = std::exp(pot_.eval(PillowPoint{t.home, bx, by}));
                    acc += u.eval(t.home, bx, by) * w;
                }
                out.at(color, ix, iy) = acc;
            }
        }
    });
    // glue: shared boundary nodes carry the average of the two faces
    for (int k = 0; k < G_; ++k) {
        const auto fix = [&](int ix, int iy) {
            const double avg = 0.5 * (out.at(Face::white, ix, iy) + out.at(Face::black, ix, iy));
            out.at(Face::white, ix, iy) = avg;
            out.at(Face::black, ix, iy) = avg;
        };
        fix(0, k);
        fix(G_ - 1, k);
        fix(k, 0);
        fix(k, G_ - 1);
    }
    return out;
}

SplitFunction split_apply(const MapSpec& spec, const Subsystem& sub, const Potential& pot,
                          const SplitFunction& u, int threads) {
    return SplitOperator(spec, sub, pot, u.G, threads).apply(u);
}

double DualGridMass::face_mass(Face f) const { return pairwise_sum(cell_mass[face_index(f)]); }

DualGridMass dual_masses(const MapSpec& spec, const Subsystem& sub, const Potential& pot, int G,
                         double tol, int max_iter, int threads) {
    (void)threads;
    const int C = G - 1; // cells per side
    const std::size_t ncells = static_cast<std::size_t>(C) * C;
    DualGridMass dm;
    dm.G = G;
    dm.cell_mass[0].assign(ncells, 0.5 / static_cast<double>(ncells));
    dm.cell_mass[1].assign(ncells, 0.5 / static_cast<double>(ncells));
    std::array<std::vector<double>, 2> next;
    for (int it = 1; it <= max_iter; ++it) {
        next[0].assign(ncells, 0.0);
        next[1].assign(ncells, 0.0);
        // push each source cell's mass through every branch defined on its face
        for (const auto& t : sub.labels()) {
            const Face src = label_color(t);
            const std::vector<double>& w = dm.cell_mass[face_index(src)];
            std::vector<double>& dst = next[face_index(t.home)];
            for (int cx = 0; cx < C; ++cx) {
                const double x = (cx + 0.5) / C;
                const double bx = (t.i + (t.i % 2 == 0 ? x : 1.0 - x)) / static_cast<double>(spec.m);
                const int tx = std::min(static_cast<int>(bx * C), C - 1);
                for (int cy = 0; cy < C; ++cy) {
                    const double mass = w[static_cast<std::size_t>(cx) * C + cy];
                    if (mass == 0.0) continue;
                    const double y = (cy + 0.5) / C;
                    const double by =
                        (t.j + (t.j % 2 == 0 ? y : 1.0 - y)) / static_cast<double>(spec.m);
                    const int ty = std::min(static_cast<int>(by * C), C - 1);
                    const double ph = pot.eval(PillowPoint{t.home, bx, by});
                    dst[static_cast<std::size_t>(tx) * C + ty] += mass * std::exp(ph);
                }
            }
        }
        const double total = pairwise_sum(next[0]) + pairwise_sum(next[1]);
        double tv = 0.0;
        for (int f = 0; f < 2; ++f)
            for (std::size_t k = 0; k < ncells; ++k) {
                next[f][k] /= total;
                tv += std::abs(next[f][k] - dm.cell_mass[f][k]);
            }
        dm.cell_mass = next;
        dm.iterations = it;
        dm.tv_change = 0.5 * tv;
        if (dm.tv_change <= tol) break;
    }
    return dm;
}

EigenPair eigen_pair(const MapSpec& spec, const Subsystem& sub, const Potential& pot, int G,
                     double tol, int max_iter, int threads) {
    const ClassifyResult cls = classify(spec, sub, 6);
    if (!cls.strongly_irreducible)
        throw std::invalid_argument(
            "eigen_pair: subsystem is not certified strongly irreducible (searched levels up to " +
            std::to_string(cls.search_cap) + "); the eigenfunction theory does not apply");

    const SplitOperator op(spec, sub, pot, G, threads);
    SplitFunction u = SplitFunction::constant(G, 1.0);
    std::vector<double> history;
    SplitFunction cesaro = SplitFunction::constant(G, 0.0);
    int cesaro_count = 0;
    int window = 8;

    EigenPair result;
    bool converged = false;
    for (int it = 1; it <= max_iter; ++it) {
        SplitFunction v = op.apply(u);
        const double lam = v.mean_value(); // mean(u) stays 1
        double res = 0.0;
        const std::size_t nn = static_cast<std::size_t>(G) * G;
        for (int f = 0; f < 2; ++f)
            for (std::size_t k = 0; k < nn; ++k)
                res = std::max(res, std::abs(v.values[f][k] / lam - u.values[f][k]));
        history.push_back(res);
        if (res <= tol) {
            result.lambda = lam;
            result.u_tilde = u;
            result.residual = res;
            result.cesaro_steps = it;
            converged = true;
            break;
        }
        for (int f = 0; f < 2; ++f)
            for (std::size_t k = 0; k < nn; ++k) v.values[f][k] /= lam;
        // windowed Cesaro average as a fallback candidate when the plain
        // iteration oscillates
        for (int f = 0; f < 2; ++f)
            for (std::size_t k = 0; k < nn; ++k) cesaro.values[f][k] += v.values[f][k];
        ++cesaro_count;
        if (cesaro_count == window) {
            SplitFunction cand = cesaro;
            for (int f = 0; f < 2; ++f)
                for (std::size_t k = 0; k < nn; ++k) cand.values[f][k] /= cesaro_count;
            SplitFunction cv = op.apply(cand);
            const double clam = cv.mean_value() / cand.mean_value();
            double cres = 0.0;
            for (int f = 0; f < 2; ++f)
                for (std::size_t k = 0; k < nn; ++k)
                    cres = std::max(cres, std::abs(cv.values[f][k] / clam - cand.values[f][k]));
            history.push_back(cres);
            if (cres <= tol) {
                result.lambda = clam;
                result.u_tilde = cand;
                result.residual = cres;
                result.cesaro_steps = it;
                converged = true;
                break;
            }
            cesaro = SplitFunction::constant(G, 0.0);
            cesaro_count = 0;
            window *= 2;
        }
        u = v;
    }
    if (!converged)
        throw convergence_error("eigen_pair: residual tolerance not reached within max_iter",
                                history);

    result.log_lambda = std::log(result.lambda);
    result.dual = dual_masses(spec, sub, pot, G, tol, max_iter, threads);

    // normalize so that int u dm = 1 against the grid dual masses
    const int C = G - 1;
    double integral = 0.0;
    for (int f = 0; f < 2; ++f)
        for (int cx = 0; cx < C; ++cx)
            for (int cy = 0; cy < C; ++cy)
                integral += result.dual.cell_mass[f][static_cast<std::size_t>(cx) * C + cy] *
                            result.u_tilde.eval(static_cast<Face>(f), (cx + 0.5) / C,
                                                (cy + 0.5) / C);
    if (!(integral > 0.0))
        throw convergence_error("eigen_pair: degenerate eigenfunction normalizer", history);
    const std::size_t nn = static_cast<std::size_t>(G) * G;
    for (int f = 0; f < 2; ++f)
        for (std::size_t k = 0; k < nn; ++k) result.u_tilde.values[f][k] /= integral;
    // re-certify the residual for the stored, rescaled function
    {
        SplitFunction v = op.apply(result.u_tilde);
        double res = 0.0;
        for (int f = 0; f < 2; ++f)
            for (std::size_t k = 0; k < nn; ++k)
                res = std::max(res,
                               std::abs(v.values[f][k] / result.lambda - result.u_tilde.values[f][k]));
        result.residual = res;
    }
    return result;
}

double measure_c0(const MapSpec& spec, int samples, std::uint64_t seed) {
    SplitMix64 rng(seed);
    const Subsystem full = Subsystem::full(spec);
    double worst = 1.0;
    for (int s = 0; s < samples; ++s) {
        const int n = 1 + static_cast<int>(rng.next_below(6));
        // random admissible word and two points pulled back through it
        PillowPoint p = canonicalize_point(Face::white, rng.next_double(), rng.next_double());
        PillowPoint q = canonicalize_point(Face::white, rng.next_double(), rng.next_double());
        // start on a random color, consistent for both points
        if (rng.next_below(2) == 1) {
            p = PillowPoint{Face::black, p.x, p.y};
            q = PillowPoint{Face::black, q.x, q.y};
            if (p.on_equator()) p.face = Face::white;
            if (q.on_equator()) q.face = Face::white;
        }
        const PillowPoint p0 = p, q0 = q;
        for (int k = 0; k < n; ++k) {
            Face need = p.on_equator() && q.on_equator()
                            ? Face::white
                            : (p.on_equator() ? q.face : p.face);
            const auto& choices = full.labels();
            // pick a random label of color `need`
            OneTileLabel t{};
            for (;;) {
                t = choices[rng.next_below(choices.size())];
                if (label_color(t) == need) break;
            }
            p = inverse_branch(spec, t, p);
            q = inverse_branch(spec, t, q);
        }
        const double dn = path_distance(p0, q0);
        const double d0 = path_distance(p, q);
        if (d0 <= 0.0 || dn <= 0.0) continue;
        const double ratio = dn / (std::pow(spec.expansion(), n) * d0);
        worst = std::max(worst, std::max(ratio, 1.0 / ratio));
    }
    return worst;
}

double DistortionConstants::c1_diam_kappa() const { return c1 * std::pow(diam, kappa); }

DistortionConstants distortion_constants(const MapSpec& spec, const Potential& pot, int n_f,
                                         double c0) {
    DistortionConstants dc;
    dc.c0 = c0;
    dc.diam = pillow_diameter();
    dc.n_f = n_f;
    dc.kappa = pot.kappa();
    dc.c1 = c0 * pot.holder_seminorm() / (1.0 - std::pow(spec.expansion(), -dc.kappa));
    dc.cbar = std::pow(static_cast<double>(spec.degree()), n_f) *
              std::exp(2.0 * n_f * pot.sup_norm() + dc.c1_diam_kappa());
    return dc;
}

// ---------------------------------------------------------------------------
// Certified partition sums: digit-orbit evaluation over precomputed tables.
// ---------------------------------------------------------------------------

namespace {

/// One cache line of range data per (level, cell): certified lo/hi of the
/// three 1-d basis factors over [a/m^r, (a+1)/m^r].
struct alignas(64) RangeEntry {
    double sin_lo, sin_hi;
    double cos_lo, cos_hi;
    double poly_lo, poly_hi;
    double pad0 = 0.0, pad1 = 0.0;
};

/// Center values at x_a = (2a+1)/(2 m^r). Only touched once per n-tile, not
/// per refinement leaf.
struct CenterEntry {
    double sin_c, cos_c, poly_c;
};

struct BirkhoffTables {
    std::int64_t m = 0;
    int max_level = 0;
    std::vector<std::int64_t> pow; // m^r, r = 0..max_level
    std::vector<std::vector<RangeEntry>> ranges;
    std::vector<std::vector<CenterEntry>> centers;

    void build(std::int64_t m_in, int levels) {
        m = m_in;
        max_level = levels;
        pow.assign(static_cast<std::size_t>(levels) + 1, 1);
        for (int r = 1; r <= levels; ++r)
            pow[static_cast<std::size_t>(r)] = pow[static_cast<std::size_t>(r) - 1] * m;
        ranges.assign(static_cast<std::size_t>(levels) + 1, {});
        centers.assign(static_cast<std::size_t>(levels) + 1, {});
        for (int r = 1; r <= levels; ++r) {
            const std::int64_t count = pow[static_cast<std::size_t>(r)];
            ranges[static_cast<std::size_t>(r)].resize(static_cast<std::size_t>(count));
            centers[static_cast<std::size_t>(r)].resize(static_cast<std::size_t>(count));
            const double inv = 1.0 / static_cast<double>(count);
            for (std::int64_t a = 0; a < count; ++a) {
                const double x = (2.0 * a + 1.0) * 0.5 * inv;
                auto& ce = centers[static_cast<std::size_t>(r)][static_cast<std::size_t>(a)];
                ce.sin_c = std::sin(kPi * x);
                ce.cos_c = std::cos(2.0 * kPi * x);
                ce.poly_c = x * (1.0 - x);
                const Interval s = range_sin_pi(a * inv, (a + 1) * inv);
                const Interval c = range_cos_2pi(a * inv, (a + 1) * inv);
                const Interval p = range_poly(a * inv, (a + 1) * inv);
                auto& re = ranges[static_cast<std::size_t>(r)][static_cast<std::size_t>(a)];
                re.sin_lo = s.lo; re.sin_hi = s.hi;
                re.cos_lo = c.lo; re.cos_hi = c.hi;
                re.poly_lo = p.lo; re.poly_hi = p.hi;
            }
        }
    }
};

struct LeafSums {
    double center;
    double lo;
    double hi;
};

/// Digit-orbit preamble shared by the leaf evaluations: transformed leading
/// digits, face parities, and the box integers of the forward images
/// (a_k = i_k m^(N-k-1) + a_{k+1}).
struct Orbit {
    std::int64_t ak[34], bk[34];
    int faces[34];
};

inline void make_orbit(const BirkhoffTables& tb, Face face0, const std::int32_t* dx,
                       const std::int32_t* dy, int N, Orbit& o) {
    const auto m = static_cast<std::int32_t>(tb.m);
    std::int32_t ix[34], jy[34];
    bool fx = false, fy = false;
    int face = face_index(face0);
    for (int k = 0; k < N; ++k) {
        const std::int32_t a = fx ? m - 1 - dx[k] : dx[k];
        const std::int32_t b = fy ? m - 1 - dy[k] : dy[k];
        ix[k] = a;
        jy[k] = b;
        fx ^= (a & 1);
        fy ^= (b & 1);
        o.faces[k] = face;
        if ((a + b) & 1) face ^= 1;
    }
    o.ak[N] = 0;
    o.bk[N] = 0;
    for (int k = N - 1; k >= 0; --k) {
        o.ak[k] = ix[k] * tb.pow[static_cast<std::size_t>(N - k - 1)] + o.ak[k + 1];
        o.bk[k] = jy[k] * tb.pow[static_cast<std::size_t>(N - k - 1)] + o.bk[k + 1];
    }
}

/// Certified interval of S_n phi over the leaf box (sum of per-orbit-box
/// ranges). The hot path of the refinement scans.
inline void leaf_interval(const BirkhoffTables& tb, const Potential& pot, Face face0,
                          const std::int32_t* dx, const std::int32_t* dy, int N, int n,
                          double& lo_out, double& hi_out) {
    Orbit o;
    make_orbit(tb, face0, dx, dy, N, o);
    const auto& cf = pot.coefficients();
    const double defect = pot.gluing_defect();
    double lo = 0.0, hi = 0.0;
    for (int k = 0; k < n; ++k) {
        const auto r = static_cast<std::size_t>(N - k);
        const RangeEntry& ex = tb.ranges[r][static_cast<std::size_t>(o.ak[k])];
        const RangeEntry& ey = tb.ranges[r][static_cast<std::size_t>(o.bk[k])];
        const double s = o.faces[k] == 0 ? 1.0 : -1.0;
        Interval acc{cf[0], cf[0]};
        auto add = [&acc](Interval v) { acc.lo += v.lo; acc.hi += v.hi; };
        add(interval_scale(interval_mul({ex.cos_lo, ex.cos_hi}, {ey.cos_lo, ey.cos_hi}), cf[1]));
        add(interval_scale({ex.cos_lo, ex.cos_hi}, cf[2]));
        add(interval_scale({ey.cos_lo, ey.cos_hi}, cf[3]));
        add(interval_scale(interval_mul({ex.sin_lo, ex.sin_hi}, {ey.sin_lo, ey.sin_hi}),
                           s * cf[4]));
        add(interval_scale(interval_mul({ex.poly_lo, ex.poly_hi}, {ey.poly_lo, ey.poly_hi}),
                           s * cf[5]));
        if (defect != 0.0) add({s * defect, s * defect});
        lo += acc.lo;
        hi += acc.hi;
    }
    lo_out = lo;
    hi_out = hi;
}

/// Full leaf data (center + interval); used once per n-tile.
LeafSums leaf_birkhoff(const BirkhoffTables& tb, const Potential& pot, Face face0,
                       const std::int32_t* dx, const std::int32_t* dy, int N, int n) {
    Orbit o;
    make_orbit(tb, face0, dx, dy, N, o);
    const auto& cf = pot.coefficients();
    const double defect = pot.gluing_defect();
    LeafSums out{0.0, 0.0, 0.0};
    for (int k = 0; k < n; ++k) {
        const auto r = static_cast<std::size_t>(N - k);
        const std::int64_t a = o.ak[k], b = o.bk[k];
        const double s = o.faces[k] == 0 ? 1.0 : -1.0;
        const CenterEntry& cx = tb.centers[r][static_cast<std::size_t>(a)];
        const CenterEntry& cy = tb.centers[r][static_cast<std::size_t>(b)];
        out.center += cf[0] + cf[1] * cx.cos_c * cy.cos_c + cf[2] * cx.cos_c + cf[3] * cy.cos_c +
                      s * (cf[4] * cx.sin_c * cy.sin_c + cf[5] * cx.poly_c * cy.poly_c + defect);
        const RangeEntry& ex = tb.ranges[r][static_cast<std::size_t>(a)];
        const RangeEntry& ey = tb.ranges[r][static_cast<std::size_t>(b)];
        Interval acc{cf[0], cf[0]};
        auto add = [&acc](Interval v) { acc.lo += v.lo; acc.hi += v.hi; };
        add(interval_scale(interval_mul({ex.cos_lo, ex.cos_hi}, {ey.cos_lo, ey.cos_hi}), cf[1]));
        add(interval_scale({ex.cos_lo, ex.cos_hi}, cf[2]));
        add(interval_scale({ey.cos_lo, ey.cos_hi}, cf[3]));
        add(interval_scale(interval_mul({ex.sin_lo, ex.sin_hi}, {ey.sin_lo, ey.sin_hi}),
                           s * cf[4]));
        add(interval_scale(interval_mul({ex.poly_lo, ex.poly_hi}, {ey.poly_lo, ey.poly_hi}),
                           s * cf[5]));
        if (defect != 0.0) add({s * defect, s * defect});
        out.lo += acc.lo;
        out.hi += acc.hi;
    }
    return out;
}

/// DFS over admissible words of length n + refine with a fixed first letter.
/// Groups leaves by their depth-n ancestor and accumulates the certified
/// blocked sums.
struct ZScan {
    const MapSpec* spec;
    const Subsystem* sub;
    const Potential* pot;
    const BirkhoffTables* tb;
    int n, N;
    Face position;                    // home of the first letter
    std::vector<std::int32_t> dx, dy; // digit stacks (walker cell indices)
    std::vector<Face> colors;        // color of each chosen letter
    bool flip_x = false, flip_y = false;
    Mat2d zc, zl, zu;
    double anc_hi = 0.0, anc_lo = 0.0;
    bool anc_open = false;

    void run(const OneTileLabel& first) {
        position = first.home;
        dx.assign(static_cast<std::size_t>(N), 0);
        dy.assign(static_cast<std::size_t>(N), 0);
        colors.assign(static_cast<std::size_t>(N), Face::white);
        push_letter(0, first);
        descend(1);
        pop_letter(0, first);
    }

    void push_letter(int depth, const OneTileLabel& t) {
        dx[depth] = flip_x ? static_cast<std::int32_t>(spec->m) - 1 - t.i : t.i;
        dy[depth] = flip_y ? static_cast<std::int32_t>(spec->m) - 1 - t.j : t.j;
        flip_x = flip_x != (t.i % 2 != 0);
        flip_y = flip_y != (t.j % 2 != 0);
        colors[depth] = label_color(t);
    }

    void pop_letter(int depth, const OneTileLabel& t) {
        (void)depth;
        flip_x = flip_x != (t.i % 2 != 0);
        flip_y = flip_y != (t.j % 2 != 0);
    }

    void descend(int depth) {
        if (depth == n) {
            // one n-tile: the center value uses the tile's own digits; the
            // certified range comes from its depth-N refinement subtree
            const LeafSums anc = leaf_birkhoff(*tb, *pot, position, dx.data(), dy.data(), n, n);
            const int p = face_index(position), c = face_index(colors[n - 1]);
            if (N == n) {
                zc.v[p][c] += std::exp(anc.center);
                zl.v[p][c] += std::exp(anc.lo);
                zu.v[p][c] += std::exp(anc.hi);
                return;
            }
            anc_open = false;
            for (const auto& t : sub->labels_at(colors[depth - 1])) {
                push_letter(depth, t);
                descend(depth + 1);
                pop_letter(depth, t);
            }
            zc.v[p][c] += std::exp(anc.center);
            zl.v[p][c] += std::exp(anc_lo);
            zu.v[p][c] += std::exp(anc_hi);
            return;
        }
        if (depth == N) {
            double lo, hi;
            leaf_interval(*tb, *pot, position, dx.data(), dy.data(), N, n, lo, hi);
            if (!anc_open) {
                anc_hi = hi;
                anc_lo = lo;
                anc_open = true;
            } else {
                anc_hi = std::max(anc_hi, hi);
                anc_lo = std::min(anc_lo, lo);
            }
            return;
        }
        for (const auto& t : sub->labels_at(colors[depth - 1])) {
            push_letter(depth, t);
            descend(depth + 1);
            pop_letter(depth, t);
        }
    }
};

} // namespace

// internal interface for the ldp full-map scans (shares the tables and the
// leaf evaluation with the partition sums)
namespace detail {
struct ScanTables {
    BirkhoffTables tb;
};
const ScanTables* make_scan_tables(std::int64_t m, int levels) {
    auto* p = new ScanTables;
    p->tb.build(m, levels);
    return p;
}
void free_scan_tables(const ScanTables* p) { delete p; }
void scan_leaf(const ScanTables& st, const Potential& pot, Face face0, const std::int32_t* dx,
               const std::int32_t* dy, int N, int n, double& center, double& lo, double& hi) {
    const LeafSums ls = leaf_birkhoff(st.tb, pot, face0, dx, dy, N, n);
    center = ls.center;
    lo = ls.lo;
    hi = ls.hi;
}
void scan_leaf_interval(const ScanTables& st, const Potential& pot, Face face0,
                        const std::int32_t* dx, const std::int32_t* dy, int N, int n, double& lo,
                        double& hi) {
    leaf_interval(st.tb, pot, face0, dx, dy, N, n, lo, hi);
}
} // namespace detail

PartitionSum partition_sum(const MapSpec& spec, const Subsystem& sub, const Potential& pot, int n,
                           int refine, int threads, std::int64_t cap) {
    if (n < 1) throw std::invalid_argument("partition_sum: level must be >= 1");
    if (refine < 0) throw std::invalid_argument("partition_sum: refine must be >= 0");
    const int N = n + refine;
    if (N > 32) throw std::invalid_argument("partition_sum: level + refine must be <= 32");
    const std::int64_t leaves = count_tiles(spec, sub, N);
    if (leaves > cap)
        throw capacity_error("partition_sum: refinement scan too large", leaves, cap);

    BirkhoffTables tables;
    tables.build(spec.m, N);

    const auto& firsts = sub.labels();
    std::vector<ZScan> scans(firsts.size());
    parallel_partitions(static_cast<int>(firsts.size()), threads, [&](int p) {
        ZScan& z = scans[p];
        z.spec = &spec;
        z.sub = &sub;
        z.pot = &pot;
        z.tb = &tables;
        z.n = n;
        z.N = N;
        z.run(firsts[static_cast<std::size_t>(p)]);
    });

    PartitionSum out;
    out.level = n;
    out.refine = refine;
    for (const auto& z : scans)
        for (int p = 0; p < 2; ++p)
            for (int c = 0; c < 2; ++c) {
                out.center_mat.v[p][c] += z.zc.v[p][c];
                out.lower_mat.v[p][c] += z.zl.v[p][c];
                out.upper_mat.v[p][c] += z.zu.v[p][c];
            }
    out.center_sum = out.center_mat.entry_sum();
    out.lower_sum = out.lower_mat.entry_sum();
    out.upper_sum = out.upper_mat.entry_sum();
    return out;
}

PressureEstimate pressure_estimate(const MapSpec& spec, const Subsystem& sub,
                                   const Potential& pot, int n_max, int refine, int threads,
                                   std::int64_t cap) {
    if (n_max < 1) throw std::invalid_argument("pressure_estimate: n_max must be >= 1");
    PressureEstimate est;
    est.fekete_upper = std::numeric_limits<double>::infinity();
    est.lower = -std::numeric_limits<double>::infinity();
    for (int n = 1; n <= n_max; ++n) {
        const PartitionSum z = partition_sum(spec, sub, pot, n, refine, threads, cap);
        est.seq_center.push_back(std::log(z.center_sum) / n);
        const double up = std::log(spectral_radius(z.upper_mat)) / n;
        const double lo = std::log(spectral_radius(z.lower_mat)) / n;
        est.seq_upper.push_back(up);
        est.seq_lower.push_back(lo);
        est.fekete_upper = std::min(est.fekete_upper, up);
        est.lower = std::max(est.lower, lo);
        if (n == n_max) est.extrapolated = std::log(spectral_radius(z.center_mat)) / n;
    }
    return est;
}

TileMeasurePair tile_measures(const MapSpec& spec, const Subsystem& sub, const Potential& pot,
                              int n, const EigenPair& eig, std::int64_t cap) {
    const std::int64_t count = count_tiles(spec, sub, n);
    if (count > cap) throw capacity_error("tile_measures: too many tiles", count, cap);
    const double mw = eig.dual.face_mass(Face::white);
    const double mb = eig.dual.face_mass(Face::black);

    TileMeasurePair out;
    out.m.level = out.mu.level = n;
    out.m.kind = MeasureKind::eigenmeasure;
    out.mu.kind = MeasureKind::equilibrium;
    out.m.weights.reserve(static_cast<std::size_t>(count));
    out.mu.weights.reserve(static_cast<std::size_t>(count));

    const double log_lambda = eig.log_lambda;
    for_each_tile(spec, sub, n, [&](const TileWalker& w) {
        const TileRegion r = w.region();
        PillowPoint p = r.center();
        double s = 0.0;
        for (int k = 0; k < n; ++k) {
            s += pot.eval(p);
            p = apply_map(spec, p);
        }
        const double mcol = r.color() == Face::white ? mw : mb;
        const double wm = std::exp(s - n * log_lambda) * mcol;
        out.m.weights.push_back(wm);
        out.mu.weights.push_back(wm * eig.u_tilde.eval(r.face, r.center().x, r.center().y));
    });
    const double tm = pairwise_sum(out.m.weights);
    const double tmu = pairwise_sum(out.mu.weights);
    if (!(tm > 0.0) || !(tmu > 0.0))
        throw std::runtime_error("tile_measures: degenerate normalizer");
    for (double& v : out.m.weights) v /= tm;
    for (double& v : out.mu.weights) v /= tmu;
    out.m.total = 1.0;
    out.mu.total = 1.0;
    return out;
}

GibbsReport gibbs_constants(const MapSpec& spec, const Subsystem& sub, const Potential& pot,
                            const TileMeasure& measure, double pressure) {
    GibbsReport rep;
    rep.max_ratio = -std::numeric_limits<double>::infinity();
    rep.min_ratio = std::numeric_limits<double>::infinity();
    const int n = measure.level;
    std::size_t idx = 0;
    std::string worst;
    for_each_tile(spec, sub, n, [&](const TileWalker& w) {
        const double wt = measure.weights.at(idx++);
        if (!(wt > 0.0))
            throw std::runtime_error("gibbs_constants: zero-weight tile inside Dom^n at " +
                                     TileAddress{w.letters()}.to_string());
        const TileRegion r = w.region();
        const double eps = 0.25 * r.side();
        const std::array<std::pair<double, double>, 5> probes = {{
            {r.x0() + eps, r.y0() + eps},
            {r.x1() - eps, r.y0() + eps},
            {r.x0() + eps, r.y1() - eps},
            {r.x1() - eps, r.y1() - eps},
            {0.5 * (r.x0() + r.x1()), 0.5 * (r.y0() + r.y1())},
        }};
        for (const auto& [px, py] : probes) {
            // probes are strictly interior to the box, so the face sticks
            const PillowPoint p{r.face, px, py};
            double s = 0.0;
            PillowPoint q = p;
            for (int k = 0; k < n; ++k) {
                s += pot.eval(q);
                q = apply_map(spec, q);
            }
            const double ratio = wt / std::exp(s - n * pressure);
            if (ratio > rep.max_ratio) {
                rep.max_ratio = ratio;
                worst = TileAddress{w.letters()}.to_string();
            }
            rep.min_ratio = std::min(rep.min_ratio, ratio);
        }
    });
    rep.c_observed = std::sqrt(rep.max_ratio / rep.min_ratio);
    rep.c_literal = std::max(rep.max_ratio, 1.0 / rep.min_ratio);
    rep.worst_tile = worst;
    return rep;
}

namespace {

double branch_sum_rec(const MapSpec& spec, const Subsystem& sub, const Potential& pot, Face color,
                      const PillowPoint& x, int k) {
    if (k == 0) return 1.0;
    double acc = 0.0;
    for (const auto& t : sub.labels()) {
        if (label_color(t) != color) continue;
        const PillowPoint z = inverse_branch(spec, t, x);
        // evaluate on the branch's home face even when z lands on the equator
        const PillowPoint zf{t.home, z.x, z.y};
        acc += std::exp(pot.eval(zf)) * branch_sum_rec(spec, sub, pot, t.home, zf, k - 1);
    }
    return acc;
}

} // namespace

double branch_sum(const MapSpec& spec, const Subsystem& sub, const Potential& pot, Face color,
                  const PillowPoint& x, int n) {
    return branch_sum_rec(spec, sub, pot, color, x, n);
}

} // namespace tilepress
