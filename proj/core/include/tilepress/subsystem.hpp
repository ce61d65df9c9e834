#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tilepress/cells.hpp"
#include "tilepress/geometry.hpp"

namespace tilepress {

/// A subsystem F = f restricted to a union of chosen 1-tiles.
class Subsystem {
public:
    Subsystem(const MapSpec& spec, std::vector<OneTileLabel> labels);

    static Subsystem full(const MapSpec& spec);
    /// The flagship example: remove the middle cell (1,1) from both faces
    /// (m = 3); the invariant set is a double Sierpinski carpet.
    static Subsystem carpet(const MapSpec& spec);

    const std::vector<OneTileLabel>& labels() const { return labels_; }
    /// Labels with a given position (home face), in enumeration order.
    const std::vector<OneTileLabel>& labels_at(Face position) const {
        return by_position_[face_index(position)];
    }
    std::size_t size() const { return labels_.size(); }
    bool is_full(const MapSpec& spec) const {
        return static_cast<std::int64_t>(labels_.size()) == 2 * spec.degree();
    }

private:
    std::vector<OneTileLabel> labels_;
    std::array<std::vector<OneTileLabel>, 2> by_position_;
};

/// 2x2 tile matrix A with A.at(position, color) = #labels of that color
/// contained in the 0-tile `position`.
Mat2 tile_matrix(const MapSpec& spec, const Subsystem& sub);

/// Tile matrix of the level-n tile set Dom^n (by enumeration, for the
/// A(Dom^n) = A^n cross-checks).
Mat2 tile_matrix_at_level(const MapSpec& spec, const Subsystem& sub, int n);

/// h_top(F) = log(spectral radius of A); -inf when the matrix is nilpotent.
double entropy(const Mat2& a);

struct ClassifyResult {
    bool irreducible = false;
    bool primitive = false;
    bool strongly_irreducible = false;
    bool strongly_primitive = false;
    /// Smallest witnessing data when the strong properties are certified:
    /// max over color pairs of the least interior-witness level (irreducible
    /// reading), and the first level at which all four (color, position)
    /// witnesses coexist (primitive reading).
    std::optional<int> n_f_irreducible;
    std::optional<int> n_f_primitive;
    int search_cap = 0;
    /// True when the strong flags are certified; false strong flags with
    /// exhausted = true mean "unknown at cap", not a disproof.
    bool search_exhausted = false;
};

/// Weak flags from the tile matrix (exact for 2x2); strong flags by searching
/// levels n <= n_cap for tiles contained in the open 0-tiles. Once all four
/// witnesses coexist at one level and both colors occur in A, fullness
/// persists at every deeper level, so strongly_primitive is certified.
ClassifyResult classify(const MapSpec& spec, const Subsystem& sub, int n_cap = 6);

/// Level-n outer approximation of the tile maximal invariant set: the boxes
/// of Dom^n. Area in exact rational form: count * m^(-2n).
struct LimitSetSample {
    int level;
    std::vector<TileRegion> boxes;
    std::int64_t area_num;   // area = area_num / area_den
    std::int64_t area_den;
};

LimitSetSample limit_set_sample(const MapSpec& spec, const Subsystem& sub, int n,
                                std::int64_t cap = 20'000'000);

} // namespace tilepress
