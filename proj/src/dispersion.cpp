#include "fpu/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fpu {

double reduce_periodic(double x) {
    double r = std::fmod(x, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r = 0.0;
    return r;
}

Angle Angle::from_value(double v) {
    Angle a;
    a.v = v;
    a.vc = kTwoPi - v;
    a.s = std::sin(0.5 * std::min(a.v, a.vc));
    a.c = (a.v <= a.vc) ? std::cos(0.5 * a.v) : -std::cos(0.5 * a.vc);
    return a;
}

Angle Angle::from_complement(double vc) {
    Angle a;
    a.vc = vc;
    a.v = kTwoPi - vc;
    a.s = std::sin(0.5 * std::min(a.v, a.vc));
    a.c = (a.v <= a.vc) ? std::cos(0.5 * a.v) : -std::cos(0.5 * a.vc);
    return a;
}

Angle Angle::reflected() const {
    Angle a;
    a.v = vc;
    a.vc = v;
    a.s = s;
    a.c = -c;
    return a;
}

Angle Angle::shifted(double d) const {
    return (v <= vc) ? from_value(v + d) : from_complement(vc - d);
}

double angle_diff(const Angle& b, const Angle& a) {
    return (a.v <= a.vc) ? b.v - a.v : a.vc - b.vc;
}

namespace {

// 2pi - a - b from the accurate representations.
double complement_sum(const Angle& a, const Angle& b) {
    return (a.v <= b.v) ? b.vc - a.v : a.vc - b.v;
}

// cos(|a - b| / 4) with |a - b| <= 2pi.
double cos_quarter_gap(const Angle& a, const Angle& b) {
    double d = std::abs(angle_diff(b, a));
    if (d <= kPi) return std::cos(0.25 * d);
    double rest = (b.v > a.v) ? a.v + b.vc : b.v + a.vc;
    return std::sin(0.25 * rest);
}

}  // namespace

double cos_half_sum(const Angle& a, const Angle& b) {
    double direct = a.c + b.c;
    if (std::abs(direct) >= 0.25) return direct;
    return 2.0 * std::sin(0.25 * complement_sum(a, b)) * cos_quarter_gap(a, b);
}

double omega(double x) { return std::abs(std::sin(0.5 * x)); }

double omega_prime(double x) {
    double r = reduce_periodic(x);
    if (r == 0.0) return 0.0;
    return 0.5 * std::cos(0.5 * r);
}

double big_omega(double x, double y, double z) {
    return omega(x) + omega(y) - omega(z) - omega(x + y - z);
}

double big_omega_minus(double x, double y, double z) {
    return 2.0 * (std::cos(0.25 * (x + z)) * std::sin(0.25 * (x - z)) +
                  std::cos(0.25 * (x - z)) * std::sin(0.25 * (2.0 * y + x - z)));
}

double big_omega_minus_dy(double x, double y, double z) {
    return std::cos(0.25 * (x - z)) * std::cos(0.25 * (2.0 * y + x - z));
}

double h_solve(const Angle& x, const Angle& z) {
    double d = angle_diff(z, x);
    double ad = std::abs(d);
    double rest = (z.v >= x.v) ? x.v + z.vc : z.v + x.vc;  // 2pi - |d|
    double arg;
    if (ad <= kPi) {
        arg = std::tan(0.25 * ad) * std::sin(0.25 * complement_sum(x, z));
    } else {
        arg = std::sin(0.25 * ad) * std::sin(0.25 * complement_sum(x, z)) / std::sin(0.25 * rest);
    }
    if (std::abs(arg) > 1.0) {
        if (std::abs(arg) - 1.0 > 1e-9) throw std::logic_error("h_solve: arcsin argument out of range");
        arg = std::copysign(1.0, arg);
    }
    return 0.5 * d + 2.0 * std::asin(arg);
}

double h_solve(double x, double z) {
    double xr = reduce_periodic(x);
    double zr = reduce_periodic(z);
    double shift = x - xr;
    return h_solve(Angle::from_value(xr), Angle::from_value(zr)) - shift;
}

double parity_reflect(double x) { return x == 0.0 ? 0.0 : kTwoPi - x; }

double invariant_residual(const ComplexFn& psi, double x, double z) {
    double h = h_solve(x, z);
    auto p = [&](double u) { return psi(reduce_periodic(u)); };
    return std::abs(p(x) + p(h) - p(z) - p(x - z + h));
}

}  // namespace fpu
