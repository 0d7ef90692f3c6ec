#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "fpu/dispersion.hpp"

namespace fpu {

// Raised by point evaluations on the singular set of K1 or K2; callers
// must integrate across those curves instead.
class SingularEvaluation : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

double f_plus(double x, double y);
double f_minus(double x, double y);
double f_plus(const Angle& x, const Angle& y);
double f_minus(const Angle& x, const Angle& y);
// First and second y-derivatives of F_-.
double f_minus_dy(const Angle& x, const Angle& y);
double f_minus_dyy(const Angle& x, const Angle& y);

// Checked evaluations. k1 throws within 1e-14 of {F_- = 0}, k2 at the
// corner zeros of F_+.
double k1(double x, double y);
double k2(double x, double y);
// Unchecked evaluations for quadrature code that stays off the singular set.
double k1_raw(const Angle& x, const Angle& y);
double k2_raw(const Angle& x, const Angle& y);

// (sin(x/2) sin(y/2))^{-1/2}, an upper bound for K2.
double k2_upper_bound(double x, double y);

struct RootPair {
    double x = 0.0;
    double y1 = 0.0;
    double y2 = 0.0;
    Angle r1;  // y1 with its complement
    Angle r2;
};

// 0 < y1 < 2pi - x < y2 < 2pi with F_-(x, .) <= 0 exactly on [y1, y2].
RootPair find_f_minus_roots(double x);
RootPair find_f_minus_roots(const Angle& x);

// V(x) = int_I K2(x, y) dy and W = omega^2 V, to relative tolerance tol.
double potential_v(double x, double tol = 1e-12);
double potential_v(const Angle& x, double tol = 1e-12);
double potential_w(double x, double tol = 1e-12);
double potential_w(const Angle& x, double tol = 1e-12);

// w0 = 4 int_0^inf (2s + s^4)^{-1/2} ds.
double w0_constant(double tol = 1e-13);

struct W0Route {
    double value = 0.0;
    double error = 0.0;  // quadrature error plus tail bracket half-width
};
// Route with s = u^2 on [0, 1] and s = 1/t on [1, inf); no truncation.
W0Route w0_by_substitution(double tol = 1e-13);
// Route integrating s directly on [0, S] with the analytic tail bracket
// (1/S - 1/S^4, 1/S) for [S, inf).
W0Route w0_by_truncation(double tol = 1e-13, double cutoff = 1e6);

// B(x, y) = V(x)^{-1/2} (2 K2 - K1) V(y)^{-1/2}.
double b_kernel(double x, double y);
double b_kernel(double x, double y, double vx, double vy);
// A~(x, y) = omega(x) (2 K2 - K1) omega(y).
double a_tilde_kernel(double x, double y);

using KernelFn = std::function<double(double, double)>;
using RealFn = std::function<double(double)>;

// max_i |phi(x_i)|^{2 - alpha} sum_j w_j |K(x_i, x_j)| |phi(x_j)|^alpha.
double schur_norm_bound(const KernelFn& kernel, const RealFn& phi, double alpha,
                        const std::vector<double>& nodes, const std::vector<double>& weights);

}  // namespace fpu
