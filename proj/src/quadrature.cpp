#include "fpu/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace fpu {

GaussRule gauss_legendre(int m) {
    if (m < 1) throw std::invalid_argument("gauss_legendre: m must be positive");
    GaussRule r;
    r.nodes.assign(m, 0.0);
    r.weights.assign(m, 0.0);
    for (int i = 0; i < (m + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (m + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= m; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (m == 1) { p1 = x; p0 = 1.0; }
            dp = m * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= m; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (m == 1) { p1 = x; p0 = 1.0; }
            dp = m * (x * p1 - p0) / (x * x - 1.0);
        }
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.nodes[i] = -x;
        r.nodes[m - 1 - i] = x;
        r.weights[i] = w;
        r.weights[m - 1 - i] = w;
    }
    if (m % 2 == 1) r.nodes[m / 2] = 0.0;
    return r;
}

namespace {

// Kronrod abscissae (descending, last is the centre) and weights; odd
// indices are the 10-point Gauss abscissae.
constexpr double xgk[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
constexpr double wgk[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208980213201, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr double wg[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Interval {
    double a, b, err;
    std::vector<double> val;
    bool operator<(const Interval& o) const { return err < o.err; }
};

double norm_inf(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

void gk21(const VectorFn& f, int dim, double a, double b, std::vector<double>& kron, double& err,
          std::vector<double>& buf) {
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    std::vector<double> gauss(dim, 0.0);
    kron.assign(dim, 0.0);
    buf.resize(dim);
    f(c, buf.data());
    for (int d = 0; d < dim; ++d) kron[d] = wgk[10] * buf[d];
    for (int j = 0; j < 10; ++j) {
        double dx = h * xgk[j];
        for (int side = 0; side < 2; ++side) {
            f(side == 0 ? c - dx : c + dx, buf.data());
            for (int d = 0; d < dim; ++d) {
                kron[d] += wgk[j] * buf[d];
                if (j % 2 == 1) gauss[d] += wg[j / 2] * buf[d];
            }
        }
    }
    err = 0.0;
    for (int d = 0; d < dim; ++d) {
        kron[d] *= h;
        err = std::max(err, std::abs(kron[d] - gauss[d] * h));
    }
}

}  // namespace

VecQuadResult integrate_vector(const VectorFn& f, int dim, const std::vector<double>& breakpoints,
                               const AdaptiveOptions& opt) {
    VecQuadResult res;
    res.value.assign(dim, 0.0);
    std::priority_queue<Interval> heap;
    std::vector<double> buf;
    double total_err = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        double a = breakpoints[i], b = breakpoints[i + 1];
        if (!(b > a)) continue;
        Interval iv{a, b, 0.0, {}};
        gk21(f, dim, a, b, iv.val, iv.err, buf);
        res.evaluations += 21;
        for (int d = 0; d < dim; ++d) res.value[d] += iv.val[d];
        total_err += iv.err;
        heap.push(std::move(iv));
    }
    int count = static_cast<int>(heap.size());
    std::vector<Interval> frozen;
    auto target = [&]() { return std::max(opt.abs_tol, opt.rel_tol * norm_inf(res.value)); };
    while (!heap.empty() && total_err > target() && count < opt.max_intervals) {
        Interval worst = heap.top();
        heap.pop();
        double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            frozen.push_back(std::move(worst));
            continue;
        }
        Interval left{worst.a, mid, 0.0, {}}, right{mid, worst.b, 0.0, {}};
        gk21(f, dim, left.a, left.b, left.val, left.err, buf);
        gk21(f, dim, right.a, right.b, right.val, right.err, buf);
        res.evaluations += 42;
        for (int d = 0; d < dim; ++d) res.value[d] += left.val[d] + right.val[d] - worst.val[d];
        total_err += left.err + right.err - worst.err;
        heap.push(std::move(left));
        heap.push(std::move(right));
        ++count;
    }
    // Re-sum to shed accumulated rounding from the incremental updates.
    std::fill(res.value.begin(), res.value.end(), 0.0);
    total_err = 0.0;
    auto absorb = [&](const Interval& iv) {
        for (int d = 0; d < dim; ++d) res.value[d] += iv.val[d];
        total_err += iv.err;
    };
    for (const auto& iv : frozen) absorb(iv);
    while (!heap.empty()) {
        absorb(heap.top());
        heap.pop();
    }
    res.error = total_err;
    res.converged = total_err <= target();
    return res;
}

QuadResult integrate(const ScalarFn& f, const std::vector<double>& breakpoints,
                     const AdaptiveOptions& opt) {
    VectorFn vf = [&f](double t, double* out) { out[0] = f(t); };
    VecQuadResult v = integrate_vector(vf, 1, breakpoints, opt);
    QuadResult r;
    r.value = v.value[0];
    r.error = v.error;
    r.evaluations = v.evaluations;
    r.converged = v.converged;
    return r;
}

QuadResult integrate(const ScalarFn& f, double a, double b, const AdaptiveOptions& opt) {
    return integrate(f, std::vector<double>{a, b}, opt);
}

double integrate_or_throw(const ScalarFn& f, const std::vector<double>& breakpoints,
                          const AdaptiveOptions& opt, const char* what) {
    QuadResult r = integrate(f, breakpoints, opt);
    if (!r.converged) {
        throw QuadratureError(std::string(what) + ": quadrature did not converge, achieved error " +
                                  std::to_string(r.error),
                              r.error);
    }
    return r.value;
}

std::vector<double> geometric_breakpoints(double lo, double hi, double ratio) {
    std::vector<double> out;
    for (double x = lo; x < hi; x *= ratio) out.push_back(x);
    out.push_back(hi);
    return out;
}

}  // namespace fpu
