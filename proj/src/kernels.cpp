#include "fpu/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "fpu/quadrature.hpp"

namespace fpu {

double f_plus(const Angle& x, const Angle& y) {
    double a = cos_half_sum(x, y);
    return a * a + 4.0 * x.s * y.s;
}

double f_minus(const Angle& x, const Angle& y) {
    double a = cos_half_sum(x, y);
    return a * a - 4.0 * x.s * y.s;
}

double f_minus_dy(const Angle& x, const Angle& y) {
    return -y.s * cos_half_sum(x, y) - 2.0 * x.s * y.c;
}

double f_minus_dyy(const Angle& x, const Angle& y) {
    return -0.5 * y.c * cos_half_sum(x, y) + 0.5 * y.s * y.s + x.s * y.s;
}

double f_plus(double x, double y) { return f_plus(Angle::from_value(x), Angle::from_value(y)); }
double f_minus(double x, double y) { return f_minus(Angle::from_value(x), Angle::from_value(y)); }

double k1_raw(const Angle& x, const Angle& y) {
    double f = f_minus(x, y);
    return f > 0.0 ? 4.0 / std::sqrt(f) : 0.0;
}

double k2_raw(const Angle& x, const Angle& y) { return 2.0 / std::sqrt(f_plus(x, y)); }

double k1(double x, double y) {
    double f = f_minus(x, y);
    if (std::abs(f) < 1e-14) throw SingularEvaluation("k1: evaluation on the F_- = 0 curve");
    return f > 0.0 ? 4.0 / std::sqrt(f) : 0.0;
}

double k2(double x, double y) {
    double f = f_plus(x, y);
    if (!(f > 0.0)) throw SingularEvaluation("k2: evaluation at a corner zero of F_+");
    return 2.0 / std::sqrt(f);
}

double k2_upper_bound(double x, double y) {
    return 1.0 / std::sqrt(std::sin(0.5 * x) * std::sin(0.5 * y));
}

namespace {

// Root of g on the complement coordinate u in (lo, hi), g(lo) > 0 > g(hi)
// or the reverse; bisection then one guarded Newton step.
Angle bracket_root(const Angle& x, double lo, double hi) {
    auto g = [&](double u) { return f_minus(x, Angle::from_complement(u)); };
    double glo = g(lo), ghi = g(hi);
    if (!(glo * ghi < 0.0)) throw std::logic_error("find_f_minus_roots: sign pattern violated");
    for (int it = 0; it < 100; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        double gm = g(mid);
        if (gm == 0.0) {
            lo = hi = mid;
            break;
        }
        if ((gm > 0.0) == (glo > 0.0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    double u = 0.5 * (lo + hi);
    Angle y = Angle::from_complement(u);
    double slope = -f_minus_dy(x, y);  // d/du = -d/dy
    if (slope != 0.0) {
        double un = u - g(u) / slope;
        if (un >= std::min(lo, hi) && un <= std::max(lo, hi)) u = un;
    }
    return Angle::from_complement(u);
}

}  // namespace

RootPair find_f_minus_roots(const Angle& x) {
    if (!(x.v > 0.0 && x.vc > 0.0)) throw std::invalid_argument("find_f_minus_roots: x must lie in (0, 2pi)");
    RootPair rp;
    rp.x = x.v;
    if (x.v <= kPi) {
        // y2 in (2pi - x, 2pi): complement in (0, x). y1 in (0, 2pi - x): complement in (x, 2pi).
        rp.r2 = bracket_root(x, 0.0, x.v);
        rp.r1 = bracket_root(x, x.v, kTwoPi);
    } else {
        RootPair m = find_f_minus_roots(x.reflected());
        rp.r1 = m.r2.reflected();
        rp.r2 = m.r1.reflected();
    }
    rp.y1 = rp.r1.v;
    rp.y2 = rp.r2.v;
    return rp;
}

RootPair find_f_minus_roots(double x) { return find_f_minus_roots(Angle::from_value(x)); }

double potential_v(const Angle& x, double tol) {
    if (!(x.v > 0.0 && x.vc > 0.0)) throw std::invalid_argument("potential_v: x must lie in (0, 2pi)");
    double e = x.edge_distance();
    double lo = std::max(1e-300, std::min(1e-20, 1e-3 * e * e * e / 64.0));
    std::vector<double> bps{0.0};
    for (double b : geometric_breakpoints(lo, kPi, 4.0)) bps.push_back(b);
    AdaptiveOptions opt;
    opt.abs_tol = 0.0;
    opt.rel_tol = tol;
    opt.max_intervals = 20000;
    QuadResult lower = integrate([&](double y) { return k2_raw(x, Angle::from_value(y)); }, bps, opt);
    QuadResult upper = integrate([&](double u) { return k2_raw(x, Angle::from_complement(u)); }, bps, opt);
    double v = lower.value + upper.value;
    double err = lower.error + upper.error;
    if (!(err <= 2.0 * tol * v)) throw QuadratureError("potential_v: quadrature did not converge", err);
    return v;
}

double potential_v(double x, double tol) { return potential_v(Angle::from_value(x), tol); }

double potential_w(const Angle& x, double tol) { return x.s * x.s * potential_v(x, tol); }
double potential_w(double x, double tol) { return potential_w(Angle::from_value(x), tol); }

W0Route w0_by_substitution(double tol) {
    AdaptiveOptions opt;
    opt.abs_tol = 0.0;
    opt.rel_tol = tol;
    QuadResult a = integrate([](double u) { return 2.0 / std::sqrt(2.0 + std::pow(u, 6)); }, 0.0, 1.0, opt);
    QuadResult b = integrate([](double t) { return 1.0 / std::sqrt(1.0 + 2.0 * t * t * t); }, 0.0, 1.0, opt);
    return {4.0 * (a.value + b.value), 4.0 * (a.error + b.error)};
}

W0Route w0_by_truncation(double tol, double cutoff) {
    AdaptiveOptions opt;
    opt.abs_tol = 0.0;
    opt.rel_tol = tol;
    auto f = [](double s) { return 1.0 / std::sqrt(2.0 * s + s * s * s * s); };
    std::vector<double> head{0.0};
    for (double b : geometric_breakpoints(1e-30, 1.0, 4.0)) head.push_back(b);
    QuadResult a = integrate(f, head, opt);
    QuadResult b = integrate(f, geometric_breakpoints(1.0, cutoff, 4.0), opt);
    double s4 = cutoff * cutoff * cutoff * cutoff;
    double tail_hi = 1.0 / cutoff;
    double tail_lo = 1.0 / cutoff - 1.0 / s4;
    double tail = 0.5 * (tail_lo + tail_hi);
    return {4.0 * (a.value + b.value + tail), 4.0 * (a.error + b.error + 0.5 * (tail_hi - tail_lo))};
}

double w0_constant(double tol) { return w0_by_substitution(tol).value; }

double b_kernel(double x, double y, double vx, double vy) {
    return (2.0 * k2(x, y) - k1(x, y)) / std::sqrt(vx * vy);
}

double b_kernel(double x, double y) { return b_kernel(x, y, potential_v(x), potential_v(y)); }

double a_tilde_kernel(double x, double y) { return omega(x) * (2.0 * k2(x, y) - k1(x, y)) * omega(y); }

double schur_norm_bound(const KernelFn& kernel, const RealFn& phi, double alpha,
                        const std::vector<double>& nodes, const std::vector<double>& weights) {
    if (nodes.empty() || nodes.size() != weights.size())
        throw std::invalid_argument("schur_norm_bound: grid must be nonempty with matching weights");
    std::vector<double> phia(nodes.size());
    for (std::size_t j = 0; j < nodes.size(); ++j) phia[j] = std::pow(std::abs(phi(nodes[j])), alpha);
    double best = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < nodes.size(); ++j)
            row += weights[j] * std::abs(kernel(nodes[i], nodes[j])) * phia[j];
        best = std::max(best, std::pow(std::abs(phi(nodes[i])), 2.0 - alpha) * row);
    }
    return best;
}

}  // namespace fpu
