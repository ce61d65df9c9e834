#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tilepress/geometry.hpp"

namespace tilepress {

class Subsystem;

/// 2x2 integer count matrix indexed [position][color], position/color order
/// (white, black). Used for both tile matrices and local degree matrices;
/// with this layout both satisfy their product identities
/// A(Dom^n) = A^n and Deg^{n+m}(x) = Deg^n(x) Deg^m(f^n x).
struct Mat2 {
    std::array<std::array<std::int64_t, 2>, 2> v{{{0, 0}, {0, 0}}};

    std::int64_t& at(Face position, Face color) { return v[face_index(position)][face_index(color)]; }
    std::int64_t at(Face position, Face color) const { return v[face_index(position)][face_index(color)]; }
    std::int64_t entry_sum() const { return v[0][0] + v[0][1] + v[1][0] + v[1][1]; }
    std::int64_t row_sum(Face position) const {
        return v[face_index(position)][0] + v[face_index(position)][1];
    }
    std::int64_t col_sum(Face color) const {
        return v[0][face_index(color)] + v[1][face_index(color)];
    }
    bool positive() const { return v[0][0] > 0 && v[0][1] > 0 && v[1][0] > 0 && v[1][1] > 0; }

    friend Mat2 operator*(const Mat2& a, const Mat2& b);
    friend bool operator==(const Mat2&, const Mat2&) = default;
    Mat2 power(int n) const;
};

/// Largest eigenvalue of a nonnegative 2x2 matrix, in closed form.
double spectral_radius(const Mat2& a);

/// An admissible word (t_1, ..., t_n) of 1-tile labels identifying an n-tile:
/// the branch composition (f|t1)^-1 ... (f|tn)^-1 applied to the 0-tile of
/// color(t_n). Admissibility: position(t_{k+1}) = color(t_k).
struct TileAddress {
    std::vector<OneTileLabel> word;

    int level() const { return static_cast<int>(word.size()); }
    Face color() const { return label_color(word.back()); }
    Face position() const { return label_position(word.front()); }
    bool admissible() const;
    std::string to_string() const; // "w:0:0|b:1:2"
    friend bool operator==(const TileAddress&, const TileAddress&) = default;
};

/// Geometric realization of an n-tile: the closed box
/// [ax, ax+1] x [by, by+1] / denom on `face`, denom = m^level.
struct TileRegion {
    Face face;
    std::int64_t ax, by;
    std::int64_t denom;
    int level;

    double x0() const { return static_cast<double>(ax) / static_cast<double>(denom); }
    double x1() const { return static_cast<double>(ax + 1) / static_cast<double>(denom); }
    double y0() const { return static_cast<double>(by) / static_cast<double>(denom); }
    double y1() const { return static_cast<double>(by + 1) / static_cast<double>(denom); }
    PillowPoint center() const;
    double side() const { return 1.0 / static_cast<double>(denom); }
    double diameter() const;
    bool touches_equator() const {
        return ax == 0 || by == 0 || ax + 1 == denom || by + 1 == denom;
    }
    /// Color of the tile this box realizes: face xor parity(ax + by).
    Face color() const {
        return ((ax + by) % 2 == 0) ? face : opposite(face);
    }
    bool contains(const RationalPoint& p) const;
    friend bool operator==(const TileRegion&, const TileRegion&) = default;
};

TileRegion tile_region(const MapSpec& spec, const TileAddress& addr);

/// Inverse of tile_region for the full map: the unique address whose region
/// is the given box.
TileAddress address_of_box(const MapSpec& spec, Face face, std::int64_t ax, std::int64_t by,
                           int level);

/// Incremental DFS state for enumerating admissible words together with their
/// regions. Appending a letter updates the box in O(1): the affine branch
/// composition is axis-aligned with per-axis reflection bits.
class TileWalker {
public:
    explicit TileWalker(const MapSpec& spec);
    void push(const OneTileLabel& t);
    void pop();
    int depth() const { return static_cast<int>(letters_.size()); }
    const std::vector<OneTileLabel>& letters() const { return letters_; }
    TileRegion region() const;
    /// Color constraint for the next letter's position; only meaningful at
    /// depth >= 1.
    Face next_position() const { return label_color(letters_.back()); }

private:
    struct Frame {
        std::int64_t ax, by, denom;
        bool flip_x, flip_y;
        Face face;
    };
    MapSpec spec_;
    std::vector<OneTileLabel> letters_;
    std::vector<Frame> frames_;
};

/// Visits every admissible word of length n over the subsystem's labels in
/// lexicographic order (letters ordered by (home, i, j), white < black).
/// The callback receives the shared walker positioned at the leaf.
void for_each_tile(const MapSpec& spec, const Subsystem& sub, int n,
                   const std::function<void(const TileWalker&)>& visit);

/// Number of admissible words of length n (= entry sum of A(sub)^n).
std::int64_t count_tiles(const MapSpec& spec, const Subsystem& sub, int n);

/// Materialized enumeration; throws capacity_error if the count exceeds cap.
std::vector<TileAddress> enumerate_tiles(const MapSpec& spec, const Subsystem& sub, int n,
                                         std::int64_t cap = 20'000'000);

/// Counts the n-tiles of `sub` containing p, split by (color, position).
/// Exact: closed-box membership in rational arithmetic.
Mat2 local_degree_matrix(const MapSpec& spec, const Subsystem& sub, const RationalPoint& p, int n);

/// The four 0-edges of the equator; post f (the corners) cuts the boundary
/// square into exactly these.
enum class EdgeLabel : int { bottom = 0, right = 1, top = 2, left = 3 };

const char* edge_name(EdgeLabel e);

/// A straight segment on a face (the geometric realization of an n-edge).
struct EdgeSegment {
    Face face;
    double x0, y0, x1, y1;
};

struct PairPartnerResult {
    TileAddress white_addr;
    TileRegion white_region;
    EdgeSegment shared_edge;
};

/// For a black n-tile of the full map: the n-edge (f^n|X)^-1(e0) and the
/// unique white n-tile on its far side (possibly across the equator).
PairPartnerResult pair_partner(const MapSpec& spec, EdgeLabel e0, const TileAddress& black_addr);

/// Which side of the tile's box the pulled-back 0-edge lies on. Exposed for
/// streaming pair scans that avoid materializing addresses.
EdgeLabel pulled_back_side(EdgeLabel e0, const std::vector<OneTileLabel>& word);

/// Box of the partner tile across `side`, reflecting through the equator when
/// the side lies on it. Returns the partner's face and box origin.
void partner_box(const MapSpec& spec, const TileRegion& region, EdgeLabel side, Face& face_out,
                 std::int64_t& ax_out, std::int64_t& by_out);

} // namespace tilepress
