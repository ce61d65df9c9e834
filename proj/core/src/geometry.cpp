#include "tilepress/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "tilepress/errors.hpp"

namespace tilepress {

MapSpec::MapSpec(std::int64_t subdivision) : m(subdivision) {
    if (m < 2) throw std::invalid_argument("MapSpec: subdivision factor m must be >= 2");
}

MapSpec iterate_spec(const MapSpec& spec, int k) {
    if (k < 1) throw std::invalid_argument("iterate_spec: k must be >= 1");
    // m^k must stay representable along with its square (the degree).
    constexpr std::int64_t kRootMax = 3037000499LL; // floor(sqrt(2^63 - 1))
    std::int64_t mk = 1;
    for (int i = 0; i < k; ++i) {
        if (mk > kRootMax / spec.m)
            throw capacity_error("iterate_spec: m^k overflows", -1, kRootMax);
        mk *= spec.m;
    }
    return MapSpec(mk);
}

PillowPoint canonicalize_point(Face face, double x, double y) {
    constexpr double slack = 1e-9;
    if (x < -slack || x > 1.0 + slack || y < -slack || y > 1.0 + slack)
        throw std::domain_error("canonicalize_point: coordinates outside the unit square");
    x = std::clamp(x, 0.0, 1.0);
    y = std::clamp(y, 0.0, 1.0);
    PillowPoint p{face, x, y};
    if (p.on_equator()) p.face = Face::white;
    return p;
}

namespace {
inline double reflect(std::int64_t k, double t) { return (k % 2 == 0) ? t : 1.0 - t; }
} // namespace

PillowPoint apply_map(const MapSpec& spec, const PillowPoint& p) {
    const double mx = p.x * static_cast<double>(spec.m);
    const double my = p.y * static_cast<double>(spec.m);
    const std::int64_t i = std::min<std::int64_t>(static_cast<std::int64_t>(mx), spec.m - 1);
    const std::int64_t j = std::min<std::int64_t>(static_cast<std::int64_t>(my), spec.m - 1);
    const double u = mx - static_cast<double>(i);
    const double v = my - static_cast<double>(j);
    const Face target = ((i + j) % 2 == 0) ? p.face : opposite(p.face);
    return canonicalize_point(target, reflect(i, u), reflect(j, v));
}

PillowPoint inverse_branch(const MapSpec& spec, const OneTileLabel& t, const PillowPoint& p) {
    if (!p.on_equator() && p.face != label_color(t))
        throw std::invalid_argument("inverse_branch: point is not on the face the branch is defined on");
    const double bx = (static_cast<double>(t.i) + reflect(t.i, p.x)) / static_cast<double>(spec.m);
    const double by = (static_cast<double>(t.j) + reflect(t.j, p.y)) / static_cast<double>(spec.m);
    return canonicalize_point(t.home, bx, by);
}

namespace {
inline double sq(double t) { return t * t; }
} // namespace

double path_distance(const PillowPoint& p, const PillowPoint& q) {
    // Reflections of q across the four boundary edges; a straight segment from
    // p to a reflected copy crosses the corresponding edge inside the square.
    // All intermediates are symmetric in (p, q) so the metric is exactly so.
    const double sx = p.x + q.x, sy = p.y + q.y;
    const double dx2 = sq(p.x - q.x), dy2 = sq(p.y - q.y);
    const double cross2 = std::min(std::min(sq(sx) + dy2,          // left   x=0
                                            sq(2.0 - sx) + dy2),   // right  x=1
                                   std::min(dx2 + sq(sy),          // bottom y=0
                                            dx2 + sq(2.0 - sy)));  // top    y=1
    if (p.face == q.face || p.on_equator() || q.on_equator())
        return std::sqrt(std::min(dx2 + dy2, cross2));
    return std::sqrt(cross2);
}

double pillow_diameter() { return std::sqrt(2.0); }

PillowPoint RationalPoint::to_point() const {
    return canonicalize_point(face,
                              static_cast<double>(xn) / static_cast<double>(xd),
                              static_cast<double>(yn) / static_cast<double>(yd));
}

RationalPoint canonicalize_exact(RationalPoint p) {
    if (p.xn < 0 || p.xn > p.xd || p.yn < 0 || p.yn > p.yd)
        throw std::domain_error("canonicalize_exact: coordinates outside the unit square");
    if (p.on_equator()) p.face = Face::white;
    return p;
}

RationalPoint apply_map_exact(const MapSpec& spec, const RationalPoint& p) {
    constexpr std::int64_t kMax = (1LL << 62);
    if (p.xd > kMax / spec.m || p.yd > kMax / spec.m)
        throw capacity_error("apply_map_exact: denominator overflow", -1, kMax);
    // m*x = (m*xn)/xd; cell index i = floor(m*x), clamped so x = 1 stays in cell m-1.
    auto fold = [&](std::int64_t n, std::int64_t d, std::int64_t& cell, std::int64_t& outn) {
        const std::int64_t mn = n * spec.m;
        cell = std::min(mn / d, spec.m - 1);
        std::int64_t local = mn - cell * d; // local coordinate numerator over d
        if (cell % 2 != 0) local = d - local;
        outn = local;
    };
    std::int64_t i, j, xn2, yn2;
    fold(p.xn, p.xd, i, xn2);
    fold(p.yn, p.yd, j, yn2);
    const Face target = ((i + j) % 2 == 0) ? p.face : opposite(p.face);
    RationalPoint out{target, xn2, p.xd, yn2, p.yd};
    // keep denominators small when possible
    auto shrink = [](std::int64_t& n, std::int64_t& d) {
        const std::int64_t g = std::gcd(n == 0 ? d : n, d);
        if (g > 1) { n /= g; d /= g; }
    };
    shrink(out.xn, out.xd);
    shrink(out.yn, out.yd);
    return canonicalize_exact(out);
}

std::string to_string(const PillowPoint& p) {
    char buf[80];
    std::snprintf(buf, sizeof buf, "(%c, %.17g, %.17g)", face_char(p.face), p.x, p.y);
    return buf;
}

} // namespace tilepress
