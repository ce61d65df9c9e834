#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace tilepress {

/// Color / face of the pillow. White is the front square, black the back;
/// the two are glued along their common boundary (the equator curve).
/// White sorts first everywhere (matrix layouts, enumeration order).
enum class Face : int { white = 0, black = 1 };

inline Face opposite(Face f) { return f == Face::white ? Face::black : Face::white; }
inline char face_char(Face f) { return f == Face::white ? 'w' : 'b'; }
inline int face_index(Face f) { return static_cast<int>(f); }

/// The checkerboard pillow map family. Each face of the unit-square pillow is
/// subdivided into m x m cells; the map folds every cell affinely back onto a
/// full face. Degree m^2, expansion factor m.
struct MapSpec {
    std::int64_t m;

    explicit MapSpec(std::int64_t subdivision);
    std::int64_t degree() const { return m * m; }
    double expansion() const { return static_cast<double>(m); }
};

/// f^k of the pillow map with factor m is the pillow map with factor m^k.
/// Throws capacity_error if m^k (or its square, the degree) overflows.
MapSpec iterate_spec(const MapSpec& spec, int k);

/// A point of the pillow. Canonical form: coordinates in [0,1]^2 and, for
/// points on the boundary square (the equator), face == white.
struct PillowPoint {
    Face face;
    double x;
    double y;

    bool on_equator() const { return x == 0.0 || x == 1.0 || y == 0.0 || y == 1.0; }
};

/// Clamps coordinates within 1e-9 of [0,1]^2 and applies the gluing
/// convention (boundary points are stored white). Idempotent.
/// Throws std::domain_error for coordinates outside [-1e-9, 1+1e-9].
PillowPoint canonicalize_point(Face face, double x, double y);

/// One step of the pillow map. Total; maps the equator into itself exactly,
/// and each m x m cell onto a full face by an affine similarity with factor m.
PillowPoint apply_map(const MapSpec& spec, const PillowPoint& p);

/// A 1-tile: cell (i, j) of face `home`. Its position is `home`; its color is
/// `home` when i + j is even and the opposite face otherwise (the face the
/// map sends the cell onto).
struct OneTileLabel {
    Face home;
    std::int32_t i;
    std::int32_t j;

    friend auto operator<=>(const OneTileLabel&, const OneTileLabel&) = default;
};

inline Face label_color(const OneTileLabel& t) {
    return ((t.i + t.j) % 2 == 0) ? t.home : opposite(t.home);
}
inline Face label_position(const OneTileLabel& t) { return t.home; }

/// Inverse branch of f onto cell t, defined on the closed face of color(t).
/// Boundary points are accepted with either stored face; otherwise the face
/// of p must equal color(t) (std::invalid_argument if not).
PillowPoint inverse_branch(const MapSpec& spec, const OneTileLabel& t, const PillowPoint& p);

/// Geodesic distance on the pillow: same-face pairs take the straight
/// segment; cross-face pairs minimize over one boundary crossing (reflect the
/// second face across each of the four boundary edges). Multi-crossing paths
/// are never shorter on a unit square.
double path_distance(const PillowPoint& p, const PillowPoint& q);

/// diam_d(S^2) for the pillow metric (= sqrt(2), attained at corner pairs).
double pillow_diameter();

/// Exact point with coordinates num/den, for incidence tests at grid points.
/// Kept unreduced; den > 0.
struct RationalPoint {
    Face face;
    std::int64_t xn, xd;
    std::int64_t yn, yd;

    bool on_equator() const { return xn == 0 || xn == xd || yn == 0 || yn == yd; }
    PillowPoint to_point() const;
};

/// Exact forward map on rational points (coordinates stay rational; the
/// denominators are multiplied by at most m). Throws capacity_error when the
/// scaled numerators would overflow.
RationalPoint apply_map_exact(const MapSpec& spec, const RationalPoint& p);

RationalPoint canonicalize_exact(RationalPoint p);

std::string to_string(const PillowPoint& p);

} // namespace tilepress
