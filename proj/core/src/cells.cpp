#include "tilepress/cells.hpp"

#include <cmath>
#include <stdexcept>

#include "tilepress/errors.hpp"
#include "tilepress/subsystem.hpp"

namespace tilepress {

Mat2 operator*(const Mat2& a, const Mat2& b) {
    Mat2 c;
    for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q)
            c.v[p][q] = a.v[p][0] * b.v[0][q] + a.v[p][1] * b.v[1][q];
    return c;
}

Mat2 Mat2::power(int n) const {
    Mat2 r;
    r.v = {{{1, 0}, {0, 1}}};
    for (int k = 0; k < n; ++k) r = r * (*this);
    return r;
}

double spectral_radius(const Mat2& a) {
    const double tr = static_cast<double>(a.v[0][0] + a.v[1][1]);
    const double dd = static_cast<double>(a.v[0][0] - a.v[1][1]);
    const double off = 4.0 * static_cast<double>(a.v[0][1]) * static_cast<double>(a.v[1][0]);
    return 0.5 * (tr + std::sqrt(dd * dd + off));
}

bool TileAddress::admissible() const {
    if (word.empty()) return false;
    for (std::size_t k = 0; k + 1 < word.size(); ++k)
        if (label_position(word[k + 1]) != label_color(word[k])) return false;
    return true;
}

std::string TileAddress::to_string() const {
    std::string s;
    for (std::size_t k = 0; k < word.size(); ++k) {
        if (k) s += '|';
        s += face_char(word[k].home);
        s += ':';
        s += std::to_string(word[k].i);
        s += ':';
        s += std::to_string(word[k].j);
    }
    return s;
}

PillowPoint TileRegion::center() const {
    const double d = static_cast<double>(denom);
    return canonicalize_point(face, (static_cast<double>(ax) + 0.5) / d,
                              (static_cast<double>(by) + 0.5) / d);
}

double TileRegion::diameter() const { return std::sqrt(2.0) / static_cast<double>(denom); }

bool TileRegion::contains(const RationalPoint& p) const {
    // interior points must live on this face; equator points belong to the
    // closed tiles of both faces that meet them
    if (!p.on_equator() && p.face != face) return false;
    const auto inside = [&](std::int64_t n, std::int64_t d, std::int64_t lo) {
        // lo/denom <= n/d <= (lo+1)/denom
        const __int128 nd = static_cast<__int128>(n) * denom;
        return static_cast<__int128>(lo) * d <= nd && nd <= static_cast<__int128>(lo + 1) * d;
    };
    return inside(p.xn, p.xd, ax) && inside(p.yn, p.yd, by);
}

TileWalker::TileWalker(const MapSpec& spec) : spec_(spec) {}

void TileWalker::push(const OneTileLabel& t) {
    Frame f;
    if (frames_.empty()) {
        f = Frame{t.i, t.j, spec_.m, t.i % 2 != 0, t.j % 2 != 0, t.home};
    } else {
        const Frame& o = frames_.back();
        f.denom = o.denom * spec_.m;
        f.face = o.face;
        // image of cell column i under the accumulated axis map
        const std::int64_t ci = o.flip_x ? spec_.m - 1 - t.i : t.i;
        const std::int64_t cj = o.flip_y ? spec_.m - 1 - t.j : t.j;
        f.ax = o.ax * spec_.m + ci;
        f.by = o.by * spec_.m + cj;
        f.flip_x = o.flip_x != (t.i % 2 != 0);
        f.flip_y = o.flip_y != (t.j % 2 != 0);
    }
    letters_.push_back(t);
    frames_.push_back(f);
}

void TileWalker::pop() {
    letters_.pop_back();
    frames_.pop_back();
}

TileRegion TileWalker::region() const {
    const Frame& f = frames_.back();
    return TileRegion{f.face, f.ax, f.by, f.denom, depth()};
}

TileRegion tile_region(const MapSpec& spec, const TileAddress& addr) {
    if (!addr.admissible()) throw std::invalid_argument("tile_region: inadmissible address");
    TileWalker w(spec);
    for (const auto& t : addr.word) w.push(t);
    return w.region();
}

TileAddress address_of_box(const MapSpec& spec, Face face, std::int64_t ax, std::int64_t by,
                           int level) {
    TileAddress addr;
    std::int64_t denom = 1;
    for (int k = 1; k < level; ++k) denom *= spec.m;  // m^(level-1)
    Face cur = face;
    std::int64_t a = ax, b = by;
    for (int k = 0; k < level; ++k) {
        const auto i = static_cast<std::int32_t>(a / denom);
        const auto j = static_cast<std::int32_t>(b / denom);
        addr.word.push_back(OneTileLabel{cur, i, j});
        // map the box forward through f|cell(i,j)
        a -= static_cast<std::int64_t>(i) * denom;
        b -= static_cast<std::int64_t>(j) * denom;
        if (i % 2 != 0) a = denom - 1 - a;
        if (j % 2 != 0) b = denom - 1 - b;
        cur = ((i + j) % 2 == 0) ? cur : opposite(cur);
        if (k + 1 < level) denom /= spec.m;
    }
    return addr;
}

namespace {

void dfs_tiles(const MapSpec& spec, const Subsystem& sub, int n, TileWalker& w,
               const std::function<void(const TileWalker&)>& visit) {
    if (w.depth() == n) {
        visit(w);
        return;
    }
    const std::vector<OneTileLabel>& next =
        (w.depth() == 0) ? sub.labels() : sub.labels_at(w.next_position());
    for (const auto& t : next) {
        w.push(t);
        dfs_tiles(spec, sub, n, w, visit);
        w.pop();
    }
}

} // namespace

void for_each_tile(const MapSpec& spec, const Subsystem& sub, int n,
                   const std::function<void(const TileWalker&)>& visit) {
    if (n < 1) throw std::invalid_argument("for_each_tile: level must be >= 1");
    TileWalker w(spec);
    dfs_tiles(spec, sub, n, w, visit);
}

std::int64_t count_tiles(const MapSpec& spec, const Subsystem& sub, int n) {
    return tile_matrix(spec, sub).power(n).entry_sum();
}

std::vector<TileAddress> enumerate_tiles(const MapSpec& spec, const Subsystem& sub, int n,
                                         std::int64_t cap) {
    const std::int64_t count = count_tiles(spec, sub, n);
    if (count > cap)
        throw capacity_error("enumerate_tiles: level " + std::to_string(n) + " holds " +
                                 std::to_string(count) + " addresses",
                             count, cap);
    std::vector<TileAddress> out;
    out.reserve(static_cast<std::size_t>(count));
    for_each_tile(spec, sub, n,
                  [&](const TileWalker& w) { out.push_back(TileAddress{w.letters()}); });
    return out;
}

namespace {

/// Words of length n starting at position `pos` whose regions contain p,
/// counted by color. Recursive descent: the first letter must be a cell
/// containing p; the rest is a word from f(p).
void count_tiles_at(const MapSpec& spec, const Subsystem& sub, const RationalPoint& p, int n,
                    Mat2& acc) {
    // cells (as 1-tile regions) containing p, grouped by position
    for (const auto& t : sub.labels()) {
        const TileRegion cell{t.home, t.i, t.j, spec.m, 1};
        if (!cell.contains(p)) continue;
        if (n == 1) {
            acc.at(label_position(t), label_color(t)) += 1;
        } else {
            const RationalPoint fp = apply_map_exact(spec, p);
            Mat2 deeper;
            count_tiles_at(spec, sub, fp, n - 1, deeper);
            // continuations must start at position color(t); their color is
            // the word's color
            for (int c = 0; c < 2; ++c)
                acc.v[face_index(label_position(t))][c] +=
                    deeper.v[face_index(label_color(t))][c];
        }
    }
}

} // namespace

Mat2 local_degree_matrix(const MapSpec& spec, const Subsystem& sub, const RationalPoint& p,
                         int n) {
    if (n < 1) throw std::invalid_argument("local_degree_matrix: level must be >= 1");
    Mat2 acc;
    count_tiles_at(spec, sub, canonicalize_exact(p), n, acc);
    return acc;
}

const char* edge_name(EdgeLabel e) {
    switch (e) {
        case EdgeLabel::bottom: return "bottom";
        case EdgeLabel::right: return "right";
        case EdgeLabel::top: return "top";
        case EdgeLabel::left: return "left";
    }
    return "?";
}

EdgeLabel pulled_back_side(EdgeLabel e0, const std::vector<OneTileLabel>& word) {
    // Track the 0-edge outward through the branch letters t_n, ..., t_1.
    // A branch with even index keeps the side, odd index mirrors it.
    int side = static_cast<int>(e0);
    for (auto it = word.rbegin(); it != word.rend(); ++it) {
        const bool ox = it->i % 2 != 0, oy = it->j % 2 != 0;
        if ((side == 0 || side == 2) && oy) side = 2 - side;          // bottom <-> top
        else if ((side == 1 || side == 3) && ox) side = 4 - side;     // right <-> left
    }
    return static_cast<EdgeLabel>(side);
}

void partner_box(const MapSpec& spec, const TileRegion& region, EdgeLabel side, Face& face_out,
                 std::int64_t& ax_out, std::int64_t& by_out) {
    (void)spec;
    std::int64_t a = region.ax, b = region.by;
    switch (side) {
        case EdgeLabel::bottom: b -= 1; break;
        case EdgeLabel::top: b += 1; break;
        case EdgeLabel::left: a -= 1; break;
        case EdgeLabel::right: a += 1; break;
    }
    if (a < 0 || b < 0 || a >= region.denom || b >= region.denom) {
        // the shared edge lies on the equator: the neighbor is the mirror box
        // on the other face (the gluing is the identity on coordinates)
        face_out = opposite(region.face);
        ax_out = region.ax;
        by_out = region.by;
    } else {
        face_out = region.face;
        ax_out = a;
        by_out = b;
    }
}

PairPartnerResult pair_partner(const MapSpec& spec, EdgeLabel e0, const TileAddress& black_addr) {
    if (!black_addr.admissible() || black_addr.color() != Face::black)
        throw std::invalid_argument("pair_partner: address must name a black tile");
    const TileRegion reg = tile_region(spec, black_addr);
    const EdgeLabel side = pulled_back_side(e0, black_addr.word);

    EdgeSegment edge;
    edge.face = reg.face;
    switch (side) {
        case EdgeLabel::bottom: edge = {reg.face, reg.x0(), reg.y0(), reg.x1(), reg.y0()}; break;
        case EdgeLabel::top: edge = {reg.face, reg.x0(), reg.y1(), reg.x1(), reg.y1()}; break;
        case EdgeLabel::left: edge = {reg.face, reg.x0(), reg.y0(), reg.x0(), reg.y1()}; break;
        case EdgeLabel::right: edge = {reg.face, reg.x1(), reg.y0(), reg.x1(), reg.y1()}; break;
    }

    Face pf;
    std::int64_t pax, pby;
    partner_box(spec, reg, side, pf, pax, pby);
    const TileRegion partner{pf, pax, pby, reg.denom, reg.level};
    if (partner.color() != Face::white)
        throw std::logic_error("pair_partner: neighbor across the pulled-back edge is not white");
    PairPartnerResult out;
    out.white_region = partner;
    out.white_addr = address_of_box(spec, pf, pax, pby, reg.level);
    out.shared_edge = edge;
    return out;
}

} // namespace tilepress
