#pragma once

#include <array>
#include <cstddef>

#include "tilepress/geometry.hpp"

namespace tilepress {

/// Interval [lo, hi]; closed-form ranges of the basis factors over boxes.
struct Interval {
    double lo, hi;
    double width() const { return hi - lo; }
};

Interval interval_mul(Interval a, Interval b);
Interval interval_scale(Interval a, double c);

/// Range of sin(pi t) over [a, b] in [0,1]; of cos(2 pi t); of t(1-t).
Interval range_sin_pi(double a, double b);
Interval range_cos_2pi(double a, double b);
Interval range_poly(double a, double b);

/// Holder potential over the fixed gluing-compatible basis
///   b0 = 1
///   b1 = cos(2 pi x) cos(2 pi y)
///   b2 = cos(2 pi x)
///   b3 = cos(2 pi y)
///   b4 = s(face) sin(pi x) sin(pi y)       s(white)=+1, s(black)=-1
///   b5 = s(face) x(1-x) y(1-y)
/// b4 and b5 vanish on the equator, so every combination is continuous under
/// the gluing. All elements are Lipschitz; kappa < 1 is supported through the
/// d^kappa >= d / diam^(1-kappa) bound on a bounded space.
class Potential {
public:
    static constexpr std::size_t basis_size = 6;

    Potential() = default;
    Potential(std::array<double, basis_size> coefficients, double kappa);

    double eval(const PillowPoint& p) const;

    /// Certified range over the axis-aligned box [x0,x1] x [y0,y1] of `face`.
    Interval range_over_box(Face face, double x0, double x1, double y0, double y1) const;

    const std::array<double, basis_size>& coefficients() const { return coeffs_; }
    double kappa() const { return kappa_; }
    /// Rigorous upper bound for the kappa-Holder seminorm w.r.t. the pillow metric.
    double holder_seminorm() const { return seminorm_; }
    /// Rigorous upper bound for the sup norm.
    double sup_norm() const { return sup_norm_; }
    bool is_zero() const;

    Potential scaled(double t) const;

    /// Per-element Lipschitz bounds used for the seminorm.
    static const std::array<double, basis_size>& basis_lipschitz();

    /// Test hook: adds a face-signed constant, which is NOT continuous under
    /// the gluing. Lets the verification suite exercise its negative control.
    void inject_gluing_defect(double amplitude) { defect_ = amplitude; }
    double gluing_defect() const { return defect_; }

private:
    std::array<double, basis_size> coeffs_{};
    double kappa_ = 1.0;
    double seminorm_ = 0.0;
    double sup_norm_ = 0.0;
    double defect_ = 0.0;
};

} // namespace tilepress
