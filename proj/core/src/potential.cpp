#include "tilepress/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tilepress {

namespace {
constexpr double kPi = std::numbers::pi;
}

Interval interval_mul(Interval a, Interval b) {
    const double p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
    return {std::min(std::min(p1, p2), std::min(p3, p4)),
            std::max(std::max(p1, p2), std::max(p3, p4))};
}

Interval interval_scale(Interval a, double c) {
    return c >= 0 ? Interval{c * a.lo, c * a.hi} : Interval{c * a.hi, c * a.lo};
}

Interval range_sin_pi(double a, double b) {
    // sin(pi t) on [0,1]: increasing to t=1/2, then decreasing.
    const double fa = std::sin(kPi * a), fb = std::sin(kPi * b);
    double hi = std::max(fa, fb), lo = std::min(fa, fb);
    if (a <= 0.5 && 0.5 <= b) hi = 1.0;
    return {lo, hi};
}

Interval range_cos_2pi(double a, double b) {
    const double fa = std::cos(2.0 * kPi * a), fb = std::cos(2.0 * kPi * b);
    double hi = std::max(fa, fb), lo = std::min(fa, fb);
    if (a <= 0.5 && 0.5 <= b) lo = -1.0;
    // endpoints t=0,1 are the maxima of cos(2 pi t); interior boxes never
    // straddle them, outer boxes include them as endpoints already.
    return {lo, hi};
}

Interval range_poly(double a, double b) {
    const double fa = a * (1.0 - a), fb = b * (1.0 - b);
    double hi = std::max(fa, fb), lo = std::min(fa, fb);
    if (a <= 0.5 && 0.5 <= b) hi = 0.25;
    return {lo, hi};
}

const std::array<double, Potential::basis_size>& Potential::basis_lipschitz() {
    // sup |grad| bounds w.r.t. the Euclidean metric on a face; the pillow path
    // metric decomposes into same-face segments, so these bound the path-metric
    // Lipschitz constants too. All are <= 2 pi sqrt(2).
    static const std::array<double, basis_size> lip = {
        0.0, 2.0 * kPi, 2.0 * kPi, 2.0 * kPi, kPi, std::sqrt(2.0) / 4.0};
    return lip;
}

Potential::Potential(std::array<double, basis_size> coefficients, double kappa)
    : coeffs_(coefficients), kappa_(kappa) {
    if (!(kappa > 0.0 && kappa <= 1.0))
        throw std::invalid_argument("Potential: holder exponent must be in (0, 1]");
    double lip = 0.0;
    for (std::size_t k = 0; k < basis_size; ++k) lip += std::abs(coeffs_[k]) * basis_lipschitz()[k];
    // |phi(p)-phi(q)| <= lip d(p,q) <= lip diam^(1-kappa) d(p,q)^kappa on a
    // space of diameter sqrt(2) > 1.
    seminorm_ = (kappa_ == 1.0) ? lip : lip * std::pow(pillow_diameter(), 1.0 - kappa_);
    static const std::array<double, basis_size> sup = {1.0, 1.0, 1.0, 1.0, 1.0, 1.0 / 16.0};
    sup_norm_ = 0.0;
    for (std::size_t k = 0; k < basis_size; ++k) sup_norm_ += std::abs(coeffs_[k]) * sup[k];
}

bool Potential::is_zero() const {
    for (double c : coeffs_)
        if (c != 0.0) return false;
    return defect_ == 0.0;
}

double Potential::eval(const PillowPoint& p) const {
    const double s = (p.face == Face::white) ? 1.0 : -1.0;
    const double c2x = std::cos(2.0 * kPi * p.x), c2y = std::cos(2.0 * kPi * p.y);
    const double sx = std::sin(kPi * p.x), sy = std::sin(kPi * p.y);
    const double px = p.x * (1.0 - p.x), py = p.y * (1.0 - p.y);
    return coeffs_[0] + coeffs_[1] * c2x * c2y + coeffs_[2] * c2x + coeffs_[3] * c2y +
           s * (coeffs_[4] * sx * sy + coeffs_[5] * px * py + defect_);
}

Interval Potential::range_over_box(Face face, double x0, double x1, double y0, double y1) const {
    const double s = (face == Face::white) ? 1.0 : -1.0;
    const Interval c2x = range_cos_2pi(x0, x1), c2y = range_cos_2pi(y0, y1);
    const Interval sx = range_sin_pi(x0, x1), sy = range_sin_pi(y0, y1);
    const Interval px = range_poly(x0, x1), py = range_poly(y0, y1);
    Interval acc{coeffs_[0], coeffs_[0]};
    auto add = [&acc](Interval v) { acc.lo += v.lo; acc.hi += v.hi; };
    add(interval_scale(interval_mul(c2x, c2y), coeffs_[1]));
    add(interval_scale(c2x, coeffs_[2]));
    add(interval_scale(c2y, coeffs_[3]));
    add(interval_scale(interval_mul(sx, sy), s * coeffs_[4]));
    add(interval_scale(interval_mul(px, py), s * coeffs_[5]));
    if (defect_ != 0.0) add({s * defect_, s * defect_});
    return acc;
}

Potential Potential::scaled(double t) const {
    std::array<double, basis_size> c = coeffs_;
    for (double& v : c) v *= t;
    Potential out(c, kappa_);
    out.defect_ = defect_ * t;
    return out;
}

} // namespace tilepress
