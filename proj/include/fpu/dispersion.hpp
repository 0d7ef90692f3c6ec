#pragma once

#include <complex>
#include <functional>
#include <numbers>

namespace fpu {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Reduce x into [0, 2pi).
double reduce_periodic(double x);

// A point of I = [0, 2pi) carried together with its complement 2pi - v.
// Both are kept at full relative precision, so points close to 2pi are
// represented as accurately as points close to 0. s = sin(v/2) >= 0 and
// c = cos(v/2) are cached.
struct Angle {
    double v = 0.0;
    double vc = kTwoPi;
    double s = 0.0;
    double c = 1.0;

    static Angle from_value(double v);
    static Angle from_complement(double vc);
    // Reflection v -> 2pi - v (swaps v and vc).
    Angle reflected() const;
    // Shift by d, choosing the accurate side for the arithmetic.
    Angle shifted(double d) const;
    // Distance to the nearer end of I.
    double edge_distance() const { return v < vc ? v : vc; }
};

// b - a, evaluated through whichever representation avoids cancellation.
double angle_diff(const Angle& b, const Angle& a);

// cos(a/2) + cos(b/2) without cancellation near a + b = 2pi.
double cos_half_sum(const Angle& a, const Angle& b);

double omega(double x);
double omega_prime(double x);
double big_omega(double x, double y, double z);

// Omega_- = 2(cos((x+z)/4) sin((x-z)/4) + cos((x-z)/4) sin((2y+x-z)/4)).
double big_omega_minus(double x, double y, double z);
// d/dy of big_omega_minus.
double big_omega_minus_dy(double x, double y, double z);

// Nontrivial solution y of Omega(x, y, z) = 0. Closed form on I x I,
// extended by h(x, z) = h(x mod 2pi, z mod 2pi) - i(x).
double h_solve(double x, double z);
double h_solve(const Angle& x, const Angle& z);

double parity_reflect(double x);

using ComplexFn = std::function<std::complex<double>(double)>;

// |psi(x) + psi(h) - psi(z) - psi(x - z + h)|, h = h_solve(x, z),
// psi extended periodically.
double invariant_residual(const ComplexFn& psi, double x, double z);

}  // namespace fpu
