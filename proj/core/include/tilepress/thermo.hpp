#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tilepress/cells.hpp"
#include "tilepress/geometry.hpp"
#include "tilepress/potential.hpp"
#include "tilepress/subsystem.hpp"

namespace tilepress {

/// Real 2x2 matrix, same [position][color] layout as Mat2. Carries the
/// (position, color)-blocked partition sums.
struct Mat2d {
    std::array<std::array<double, 2>, 2> v{{{0.0, 0.0}, {0.0, 0.0}}};
    double entry_sum() const { return v[0][0] + v[0][1] + v[1][0] + v[1][1]; }
};

double spectral_radius(const Mat2d& a);
Mat2d operator*(const Mat2d& a, const Mat2d& b);

/// Element of C(X0_b) x C(X0_w) sampled on per-face G x G node grids over
/// [0,1]^2 (nodes at k/(G-1)). Evaluation between nodes is bilinear.
struct SplitFunction {
    int G = 0;
    std::array<std::vector<double>, 2> values; // [face][ix * G + iy]

    static SplitFunction constant(int G, double value);
    double& at(Face f, int ix, int iy) { return values[face_index(f)][static_cast<std::size_t>(ix) * G + iy]; }
    double at(Face f, int ix, int iy) const { return values[face_index(f)][static_cast<std::size_t>(ix) * G + iy]; }
    double eval(Face f, double x, double y) const;
    double min_value() const;
    double max_value() const;
    double mean_value() const;
};

/// One step of the split Ruelle operator: on face c the value at y sums
/// u(branch_t(y)) exp(phi(branch_t(y))) over the subsystem's 1-tiles t of
/// color c, with u read from face position(t). Outputs average the two face
/// computations at shared boundary nodes, which agree exactly for
/// equator-adjacency-closed subsystems (full map, carpet).
class SplitOperator {
public:
    SplitOperator(const MapSpec& spec, const Subsystem& sub, const Potential& pot, int G,
                  int threads = 1);
    SplitFunction apply(const SplitFunction& u) const;
    int grid() const { return G_; }

private:
    MapSpec spec_;
    const Subsystem& sub_;
    Potential pot_;
    int G_;
    int threads_;
};

SplitFunction split_apply(const MapSpec& spec, const Subsystem& sub, const Potential& pot,
                          const SplitFunction& u, int threads = 1);

/// Stationary masses of the adjoint action on per-face grid cells ((G-1)^2
/// cells per face). Supplies the eigenmeasure's face masses m(X0_c) and the
/// normalization of the eigenfunction.
struct DualGridMass {
    int G = 0;
    std::array<std::vector<double>, 2> cell_mass; // [face][(G-1)^2], total 1
    int iterations = 0;
    double tv_change = 0.0;
    double face_mass(Face f) const;
};

DualGridMass dual_masses(const MapSpec& spec, const Subsystem& sub, const Potential& pot, int G,
                         double tol, int max_iter, int threads = 1);

struct EigenPair {
    double lambda = 0.0;
    double log_lambda = 0.0;
    SplitFunction u_tilde;   // normalized so that int u dm (grid dual masses) = 1
    double residual = 0.0;   // sup norm of L(u)/lambda - u
    int cesaro_steps = 0;
    DualGridMass dual;       // stationary adjoint masses at grid scale
};

/// Power iteration with per-step normalization plus windowed Cesaro
/// averaging; refuses subsystems that are not certified strongly irreducible.
/// Throws convergence_error with the residual history when max_iter is hit.
EigenPair eigen_pair(const MapSpec& spec, const Subsystem& sub, const Potential& pot, int G,
                     double tol, int max_iter, int threads = 1);

/// Distortion constants of the bounded-distortion lemmas.
struct DistortionConstants {
    double c0 = 1.0;    // metric distortion of iterated branches (empirical, <= sqrt 2)
    double c1 = 0.0;    // c0 |phi|_kappa / (1 - Lambda^-kappa)
    double cbar = 1.0;  // deg(f)^nF exp(2 nF ||phi||_inf + c1 diam^kappa)
    double diam = 0.0;  // diam_d(S^2)
    double kappa = 1.0;
    int n_f = 1;
    double c1_diam_kappa() const;
};

/// Empirical C0 over random tile pairs: max of d(f^n x, f^n y)/(Lambda^n d(x,y))
/// and its reciprocal (exact similarity on tiles makes this 1 up to rounding).
double measure_c0(const MapSpec& spec, int samples, std::uint64_t seed = 0x5eedu);

/// Assembles C1 and Cbar from the lemma formulas; n_f is the subsystem's
/// irreducibility constant (classify().n_f_irreducible).
DistortionConstants distortion_constants(const MapSpec& spec, const Potential& pot, int n_f,
                                         double c0);

/// Certified level-n partition sums. sup/inf of S_n phi over each tile are
/// bracketed by the extreme depth-`refine` subtile center values padded by
/// interval-arithmetic ranges of phi along the leaf orbit boxes. The 2x2
/// blocks are super/submultiplicative, so
///   (1/n) log rho(lower_mat) <= P(F, phi) <= (1/n) log rho(upper_mat).
struct PartitionSum {
    int level = 0;
    int refine = 0;
    double center_sum = 0.0;
    double lower_sum = 0.0;
    double upper_sum = 0.0;
    Mat2d center_mat, lower_mat, upper_mat;
};

PartitionSum partition_sum(const MapSpec& spec, const Subsystem& sub, const Potential& pot, int n,
                           int refine = 0, int threads = 1, std::int64_t cap = 3'000'000'000LL);

struct PressureEstimate {
    std::vector<double> seq_center;  // (1/n) log Z_n (center sums), n = 1..n_max
    std::vector<double> seq_upper;   // (1/n) log rho(upper_mat)
    std::vector<double> seq_lower;   // (1/n) log rho(lower_mat)
    double fekete_upper = 0.0;       // min over n of seq_upper
    double lower = 0.0;              // max over n of seq_lower
    double extrapolated = 0.0;       // (1/n_max) log rho(center_mat at n_max)
    double width() const { return fekete_upper - lower; }
};

PressureEstimate pressure_estimate(const MapSpec& spec, const Subsystem& sub, const Potential& pot,
                                   int n_max, int refine = 0, int threads = 1,
                                   std::int64_t cap = 3'000'000'000LL);

enum class MeasureKind { eigenmeasure, equilibrium };

/// Weights on the level-n tiles of the subsystem, stored in enumeration
/// order (the deterministic lexicographic stream).
struct TileMeasure {
    int level = 0;
    MeasureKind kind = MeasureKind::eigenmeasure;
    std::vector<double> weights;
    double total = 0.0;
};

struct TileMeasurePair {
    TileMeasure m;   // eigenmeasure weights
    TileMeasure mu;  // equilibrium weights u(x_X) m(X), renormalized
};

/// m-weight(X) = lambda^-n exp(S_n phi(x_X)) m(X0_color(X)) normalized to
/// total 1 (the per-step Jacobian pushdown telescopes to exactly this form);
/// mu-weight(X) = u_tilde(x_X) m-weight(X) renormalized.
TileMeasurePair tile_measures(const MapSpec& spec, const Subsystem& sub, const Potential& pot,
                              int n, const EigenPair& eig, std::int64_t cap = 20'000'000);

struct GibbsReport {
    double c_observed = 1.0;   // sqrt(max ratio / min ratio): centered Gibbs constant
    double c_literal = 1.0;    // max(max ratio, 1/min ratio): uncentered constant
    double max_ratio = 1.0;
    double min_ratio = 1.0;
    std::string worst_tile;    // address of the tile attaining the spread
};

/// ratio(X, x) = mu(X)/exp(S_n phi(x) - n P) over all tiles and sampled
/// x in X (box corners and center). Flags zero-weight tiles.
GibbsReport gibbs_constants(const MapSpec& spec, const Subsystem& sub, const Potential& pot,
                            const TileMeasure& measure, double pressure);

/// Branch sum I_c^n(x) = sum over color-c n-tiles of exp(S_n phi(branch(x))):
/// the one-point value of the iterated partial operators, used by the
/// distortion-law checks.
double branch_sum(const MapSpec& spec, const Subsystem& sub, const Potential& pot, Face color,
                  const PillowPoint& x, int n);

} // namespace tilepress
