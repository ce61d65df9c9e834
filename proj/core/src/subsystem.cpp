#include "tilepress/subsystem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tilepress/errors.hpp"

namespace tilepress {

Subsystem::Subsystem(const MapSpec& spec, std::vector<OneTileLabel> labels)
    : labels_(std::move(labels)) {
    if (labels_.empty()) throw std::invalid_argument("Subsystem: label set must be nonempty");
    std::sort(labels_.begin(), labels_.end());
    labels_.erase(std::unique(labels_.begin(), labels_.end()), labels_.end());
    for (const auto& t : labels_) {
        if (t.i < 0 || t.j < 0 || t.i >= spec.m || t.j >= spec.m)
            throw std::invalid_argument("Subsystem: label indices out of range for m");
    }
    for (const auto& t : labels_) by_position_[face_index(t.home)].push_back(t);
}

Subsystem Subsystem::full(const MapSpec& spec) {
    std::vector<OneTileLabel> ls;
    for (Face f : {Face::white, Face::black})
        for (std::int32_t i = 0; i < spec.m; ++i)
            for (std::int32_t j = 0; j < spec.m; ++j) ls.push_back(OneTileLabel{f, i, j});
    return Subsystem(spec, std::move(ls));
}

Subsystem Subsystem::carpet(const MapSpec& spec) {
    if (spec.m != 3)
        throw std::invalid_argument("Subsystem::carpet: the carpet preset is defined for m = 3");
    std::vector<OneTileLabel> ls;
    for (Face f : {Face::white, Face::black})
        for (std::int32_t i = 0; i < 3; ++i)
            for (std::int32_t j = 0; j < 3; ++j)
                if (!(i == 1 && j == 1)) ls.push_back(OneTileLabel{f, i, j});
    return Subsystem(spec, std::move(ls));
}

Mat2 tile_matrix(const MapSpec& spec, const Subsystem& sub) {
    (void)spec;
    Mat2 a;
    for (const auto& t : sub.labels()) a.at(label_position(t), label_color(t)) += 1;
    return a;
}

Mat2 tile_matrix_at_level(const MapSpec& spec, const Subsystem& sub, int n) {
    Mat2 a;
    for_each_tile(spec, sub, n, [&](const TileWalker& w) {
        const TileRegion r = w.region();
        a.at(r.face, r.color()) += 1;
    });
    return a;
}

double entropy(const Mat2& a) {
    const double rho = spectral_radius(a);
    if (rho <= 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(rho);
}

namespace {

/// W[color][position] = 1 iff some n-tile of that color sits inside the open
/// 0-tile `position`.
struct WitnessMatrix {
    std::array<std::array<bool, 2>, 2> w{{{false, false}, {false, false}}};
    bool full() const { return w[0][0] && w[0][1] && w[1][0] && w[1][1]; }
};

WitnessMatrix interior_witnesses(const MapSpec& spec, const Subsystem& sub, int n) {
    WitnessMatrix wm;
    for_each_tile(spec, sub, n, [&](const TileWalker& walker) {
        const TileRegion r = walker.region();
        if (!r.touches_equator())
            wm.w[face_index(r.color())][face_index(r.face)] = true;
    });
    return wm;
}

bool matrix_irreducible(const Mat2& a) {
    // 2x2: strong connectivity of the transition digraph; paths of length <= 2
    const Mat2 a2 = a * a;
    for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q)
            if (a.v[p][q] + a2.v[p][q] <= 0) return false;
    return true;
}

bool matrix_primitive(const Mat2& a) {
    // Wielandt exponent for 2x2 is 2
    return a.positive() || (a * a).positive();
}

} // namespace

ClassifyResult classify(const MapSpec& spec, const Subsystem& sub, int n_cap) {
    if (n_cap < 1) throw std::invalid_argument("classify: n_cap must be >= 1");
    ClassifyResult res;
    res.search_cap = n_cap;
    const Mat2 a = tile_matrix(spec, sub);
    res.irreducible = matrix_irreducible(a);
    res.primitive = matrix_primitive(a);

    // strong properties: search bounded levels for interior-tile witnesses
    std::array<std::array<int, 2>, 2> first_witness{{{0, 0}, {0, 0}}};
    const bool colors_present = a.col_sum(Face::white) > 0 && a.col_sum(Face::black) > 0;
    int all_full_level = 0;
    // cap the level so the enumeration stays at most ~20M words
    int effective_cap = n_cap;
    {
        std::int64_t words = 1;
        for (int lev = 1; lev <= n_cap; ++lev) {
            words = count_tiles(spec, sub, lev);
            if (words > 20'000'000) { effective_cap = lev - 1; break; }
        }
    }
    for (int lev = 1; lev <= effective_cap; ++lev) {
        const WitnessMatrix wm = interior_witnesses(spec, sub, lev);
        for (int c = 0; c < 2; ++c)
            for (int p = 0; p < 2; ++p)
                if (wm.w[c][p] && first_witness[c][p] == 0) first_witness[c][p] = lev;
        if (wm.full() && all_full_level == 0) all_full_level = lev;
        if (all_full_level != 0) break;
    }
    const bool all_seen = first_witness[0][0] && first_witness[0][1] && first_witness[1][0] &&
                          first_witness[1][1];
    if (all_seen) {
        res.strongly_irreducible = true;
        res.n_f_irreducible = std::max(std::max(first_witness[0][0], first_witness[0][1]),
                                       std::max(first_witness[1][0], first_witness[1][1]));
    }
    if (all_full_level != 0 && colors_present) {
        // a (n+1)-tile of color c inside an interior n-tile X exists whenever
        // A[color(X)][c] > 0, so a full witness level stays full forever
        res.strongly_primitive = true;
        res.n_f_primitive = all_full_level;
    }
    res.search_exhausted = !(res.strongly_irreducible && res.strongly_primitive);
    res.search_cap = effective_cap;
    return res;
}

LimitSetSample limit_set_sample(const MapSpec& spec, const Subsystem& sub, int n,
                                std::int64_t cap) {
    const std::int64_t count = count_tiles(spec, sub, n);
    if (count > cap)
        throw capacity_error("limit_set_sample: too many boxes at level " + std::to_string(n),
                             count, cap);
    LimitSetSample out;
    out.level = n;
    out.boxes.reserve(static_cast<std::size_t>(count));
    for_each_tile(spec, sub, n, [&](const TileWalker& w) { out.boxes.push_back(w.region()); });
    std::int64_t den = 1;
    for (int k = 0; k < n; ++k) {
        if (den > std::numeric_limits<std::int64_t>::max() / (spec.m * spec.m))
            throw capacity_error("limit_set_sample: area denominator overflow", -1, -1);
        den *= spec.m * spec.m;
    }
    out.area_num = count;
    out.area_den = den;
    return out;
}

} // namespace tilepress
