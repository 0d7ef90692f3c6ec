#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fpu/discretize.hpp"
#include "fpu/quadrature.hpp"

namespace fpu {

namespace {

// Sorted unique breakpoints c + sign * scale * 4^k inside (lo, hi).
void add_geometric(std::vector<double>& bps, double c, double scale, double lo, double hi) {
    for (double h = scale; h < hi - lo; h *= 4.0) {
        if (c + h < hi) bps.push_back(c + h);
        if (c - h > lo) bps.push_back(c - h);
    }
}

std::vector<double> finish(std::vector<double> bps, double lo, double hi) {
    bps.push_back(lo);
    bps.push_back(hi);
    std::sort(bps.begin(), bps.end());
    std::vector<double> out;
    for (double b : bps)
        if (b >= lo && b <= hi && (out.empty() || b > out.back())) out.push_back(b);
    return out;
}

// Representative of c + 2pi k inside [lo, hi], if any.
bool periodic_image(double c, double lo, double hi, double& out) {
    double k = std::floor((c - lo) / kTwoPi);
    out = c - k * kTwoPi;
    return out >= lo && out <= hi;
}

// Breakpoints in tau for a half of I parametrized from its edge.
std::vector<double> edge_grading(double lo_scale) {
    return geometric_breakpoints(lo_scale, kPi, 4.0);
}

double require(const VecQuadResult& r, int k, const char* what) {
    if (!r.converged) throw QuadratureError(what, r.error);
    return r.value[static_cast<std::size_t>(k)];
}

// int_{I x I} fn(x, z) dx dz with the halves of each variable parametrized
// from their edge, a break at z = x and grading toward both edges.
// scale bounds the size of the integrand numerator and sets absolute floors.
double xz_integral(const std::function<double(const Angle&, const Angle&)>& fn, double tol, double scale,
                   const char* what) {
    AdaptiveOptions inner_opt{1e-4 * tol * scale, 0.1 * tol, 4000};
    AdaptiveOptions outer_opt{1e-3 * tol * scale, tol, 4000};
    auto inner = [&](const Angle& x) {
        double total = 0.0;
        for (int half = 0; half < 2; ++half) {
            auto at = [half](double t) { return half == 0 ? Angle::from_value(t) : Angle::from_complement(t); };
            std::vector<double> bps = edge_grading(std::max(1e-16, 1e-3 * std::pow(x.edge_distance(), 3.0)));
            double own = half == 0 ? x.v : x.vc;
            if (own > 0.0 && own < kPi) bps.push_back(own);
            bps = finish(bps, 0.0, kPi);
            QuadResult r = integrate([&](double t) { return fn(x, at(t)); }, bps, inner_opt);
            if (!r.converged) throw QuadratureError(what, r.error);
            total += r.value;
        }
        return total;
    };
    double total = 0.0;
    for (int half = 0; half < 2; ++half) {
        auto at = [half](double t) { return half == 0 ? Angle::from_value(t) : Angle::from_complement(t); };
        total += integrate_or_throw([&](double t) { return inner(at(t)); }, finish(edge_grading(1e-14), 0.0, kPi),
                                    outer_opt, what);
    }
    return total;
}

double sup_on_grid(const std::function<double(double)>& f) {
    double m = 0.0;
    for (int k = 0; k < 257; ++k) m = std::max(m, std::abs(f(kTwoPi * (k + 0.5) / 257.0)));
    return m;
}

double combination(const RealFn& f, double x, double y, double z) {
    return f(x) + f(y) - f(z) - f(reduce_periodic(x + y - z));
}

double g_scale(const Fn2& g) {
    double m = 0.0;
    for (int i = 0; i < 33; ++i)
        for (int j = 0; j < 33; ++j) m = std::max(m, std::abs(g(kTwoPi * (i + 0.5) / 33.0, kTwoPi * (j + 0.5) / 33.0)));
    return m;
}

}  // namespace

std::vector<double> regularized_quadratic_forms(const RealFn& f, const std::vector<double>& eps, double tol) {
    if (eps.empty()) throw std::invalid_argument("regularized_quadratic_form: no epsilon given");
    for (double e : eps) {
        if (!(e > 0.0) || e > 0.1) throw std::invalid_argument("regularized_quadratic_form: epsilon outside (0, 0.1]");
        if (e < 1e-5 && tol < 1e-4)
            throw std::invalid_argument("regularized_quadratic_form: epsilon < 1e-5 needs tol >= 1e-4 (cubic cost)");
    }
    const int m = static_cast<int>(eps.size());
    const double emin = *std::min_element(eps.begin(), eps.end());

    const double scale = std::pow(4.0 * sup_on_grid(f), 2);
    AdaptiveOptions inner_opt{1e-5 * tol * scale, 0.05 * tol, 4000};
    AdaptiveOptions middle_opt{1e-4 * tol * scale, 0.2 * tol, 4000};
    AdaptiveOptions outer_opt{1e-3 * tol * scale, tol, 4000};

    // y over one period centred on the nontrivial resonance h(x, z).
    auto inner = [&](double x, double z, double* out) {
        double h = h_solve(x, z);
        double lo = h - kPi, hi = h + kPi;
        std::vector<double> bps{h};
        add_geometric(bps, h, emin, lo, hi);
        double zi;
        if (periodic_image(z, lo, hi, zi)) {
            bps.push_back(zi);
            add_geometric(bps, zi, emin, lo, hi);
        }
        // Kinks of omega at y = 0 and x + y - z = 0.
        for (double k : {0.0, z - x})
            if (periodic_image(k, lo, hi, zi)) bps.push_back(zi);
        const double wx = omega(x), wz = omega(z), fx = f(x), fz = f(z);
        VectorFn g = [&](double y, double* o) {
            double w = reduce_periodic(x + y - z);
            double om = wx + omega(y) - wz - omega(w);
            double c = fx + f(y) - fz - f(w);
            for (int k = 0; k < m; ++k) o[k] = eps[k] / (kPi * (eps[k] * eps[k] + om * om)) * c * c;
        };
        VecQuadResult r = integrate_vector(g, m, finish(bps, lo, hi), inner_opt);
        for (int k = 0; k < m; ++k) out[k] = require(r, k, "regularized_quadratic_form: inner");
    };
    // z over one period centred on x, where the whole y line is resonant.
    auto middle = [&](double x, double* out) {
        double lo = x - kPi, hi = x + kPi;
        std::vector<double> bps{x};
        add_geometric(bps, x, emin, lo, hi);
        double c;
        if (periodic_image(0.0, lo, hi, c)) {
            bps.push_back(c);
            add_geometric(bps, c, 1e-6, lo, hi);
        }
        VectorFn g = [&](double z, double* o) { inner(x, reduce_periodic(z), o); };
        VecQuadResult r = integrate_vector(g, m, finish(bps, lo, hi), middle_opt);
        for (int k = 0; k < m; ++k) out[k] = require(r, k, "regularized_quadratic_form: middle");
    };
    std::vector<double> bps{kPi};
    add_geometric(bps, 0.0, 1e-6, 0.0, kTwoPi);
    add_geometric(bps, kTwoPi, 1e-6, 0.0, kTwoPi);
    VecQuadResult r = integrate_vector(middle, m, finish(bps, 0.0, kTwoPi), outer_opt);
    std::vector<double> out(m);
    for (int k = 0; k < m; ++k) out[k] = 0.25 * require(r, k, "regularized_quadratic_form: outer");
    return out;
}

double regularized_quadratic_form(const RealFn& f, double epsilon, double tol) {
    return regularized_quadratic_forms(f, {epsilon}, tol)[0];
}

double extrapolate_to_zero(const std::vector<double>& eps, const std::vector<double>& values) {
    const std::size_t m = eps.size();
    if (values.size() != m || m == 0) throw std::invalid_argument("extrapolate_to_zero: need matching, non-empty inputs");
    if (m > 9) throw std::invalid_argument("extrapolate_to_zero: at most 9 points");
    for (std::size_t i = 0; i < m; ++i) {
        if (!(eps[i] > 0.0 && eps[i] < 1.0)) throw std::invalid_argument("extrapolate_to_zero: epsilon outside (0, 1)");
        for (std::size_t j = 0; j < i; ++j)
            if (eps[i] == eps[j]) throw std::invalid_argument("extrapolate_to_zero: repeated epsilon");
    }
    // Interpolate by the first m terms of 1, e, e ln e, e^2, e^2 ln e, e^2 ln^2 e, e^3, ...
    // and return the constant coefficient.
    auto term = [](std::size_t k, double e) {
        static const int power[9] = {0, 1, 1, 2, 2, 2, 3, 3, 3};
        static const int logs[9] = {0, 0, 1, 0, 1, 2, 0, 1, 2};
        return std::pow(e, power[k]) * std::pow(std::log(e), logs[k]);
    };
    Eigen::MatrixXd a(m, m);
    Eigen::VectorXd v(m);
    for (std::size_t i = 0; i < m; ++i) {
        v(i) = values[i];
        for (std::size_t k = 0; k < m; ++k) a(i, k) = term(k, eps[i]);
    }
    Eigen::VectorXd colscale = a.cwiseAbs().colwise().maxCoeff().transpose();
    for (std::size_t k = 0; k < m; ++k) a.col(k) /= colscale(k);
    Eigen::VectorXd c = a.colPivHouseholderQr().solve(v);
    return c(0) / colscale(0);
}

double resolved_quadratic_form(const RealFn& f, double tol) {
    return xz_integral(
        [&](const Angle& x, const Angle& z) {
            double fp = f_plus(x, z);
            if (!(fp > 0.0)) return 0.0;
            double h = h_solve(x, z);
            double c = combination(f, x.v, h, z.v);
            return c * c / (2.0 * std::sqrt(fp));
        },
        tol, std::pow(4.0 * sup_on_grid(f), 2), "resolved_quadratic_form: quadrature did not converge");
}

double matrix_quadratic_form(const LProduct& lp, const RealFn& f) {
    const QuadratureGrid& g = *lp.grid;
    Eigen::VectorXd fv(g.size), wv(g.size);
    for (int i = 0; i < g.size; ++i) {
        fv(i) = f(g.nodes[i]);
        wv(i) = g.weights[i];
    }
    Eigen::VectorXd lf = lp.v.cwiseProduct(fv) + lp.a * fv;
    return (wv.cwiseProduct(fv)).dot(lf);
}

double change_of_variables_lhs(const Fn2& g, double tol) {
    return xz_integral(
        [&](const Angle& x, const Angle& z) {
            double fp = f_plus(x, z);
            if (!(fp > 0.0)) return 0.0;
            return g(x.v, reduce_periodic(h_solve(x, z))) / std::sqrt(fp);
        },
        tol, g_scale(g), "change_of_variables_lhs: quadrature did not converge");
}

double change_of_variables_rhs(const Fn2& g, double tol) {
    const double scale = g_scale(g);
    AdaptiveOptions inner_opt{1e-4 * tol * scale, 0.1 * tol, 4000};
    AdaptiveOptions outer_opt{1e-3 * tol * scale, tol, 4000};
    // y = r + dir tau^2 from a root r of F_-; 2 dy / sqrt(F_-) = 4 dtau / sqrt(Q).
    auto piece = [&](const Angle& x, const Angle& r, int dir, double len) {
        const double fp = f_minus_dy(x, r), fpp = f_minus_dyy(x, r);
        const double eta = 1e-8 * std::max(r.edge_distance(), 1e-300);
        auto fn = [&](double tau) {
            double s = tau * tau;
            Angle y = r.shifted(dir * s);
            double taylor = dir * fp + 0.5 * fpp * s;
            double q = s < eta ? taylor : f_minus(x, y) / s;
            if (!(q > 0.0)) q = taylor;
            if (!(q > 0.0)) return 0.0;
            return 4.0 * g(x.v, y.v) / std::sqrt(q);
        };
        std::vector<double> bps = finish({}, 0.0, std::sqrt(len));
        QuadResult res = integrate(fn, bps, inner_opt);
        if (!res.converged) throw QuadratureError("change_of_variables_rhs: inner", res.error);
        return res.value;
    };
    auto inner = [&](const Angle& x) {
        RootPair rp = find_f_minus_roots(x);
        const Angle ends[4] = {Angle::from_value(0.0), rp.r1, rp.r2, Angle::from_complement(0.0)};
        double total = 0.0;
        for (int k = 0; k < 3; ++k) {
            const Angle& a = ends[k];
            const Angle& b = ends[k + 1];
            double len = angle_diff(b, a);
            if (!(len > 0.0) || !(f_minus(x, a.shifted(0.5 * len)) > 0.0)) continue;
            bool a_root = k > 0, b_root = k < 2;
            if (a_root && b_root) {
                total += piece(x, a, 1, 0.5 * len) + piece(x, b, -1, 0.5 * len);
            } else if (a_root) {
                total += piece(x, a, 1, len);
            } else {
                total += piece(x, b, -1, len);
            }
        }
        return total;
    };
    double total = 0.0;
    for (int half = 0; half < 2; ++half) {
        auto at = [half](double t) { return half == 0 ? Angle::from_value(t) : Angle::from_complement(t); };
        total += integrate_or_throw([&](double t) { return inner(at(t)); }, finish(edge_grading(1e-14), 0.0, kPi),
                                    outer_opt, "change_of_variables_rhs: outer");
    }
    return total;
}

}  // namespace fpu
