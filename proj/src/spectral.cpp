#include "fpu/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fpu/kernels.hpp"
#include "fpu/parallel.hpp"
#include "fpu/quadrature.hpp"

namespace fpu {

std::string to_string(SeriesKind kind) {
    switch (kind) {
        case SeriesKind::resolvent_scan: return "resolvent_scan";
        case SeriesKind::correlation_decay: return "correlation_decay";
        case SeriesKind::relaxation_time: return "relaxation_time";
        case SeriesKind::md_estimate: return "md_estimate";
    }
    return "unknown";
}

void CorrelationSeries::validate() const {
    const std::size_t n = abscissa.size();
    if (values.size() != n || errors.size() != n) throw std::logic_error("CorrelationSeries: length mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(abscissa[i] >= 0.0)) throw std::logic_error("CorrelationSeries: negative abscissa");
        if (i > 0 && !(abscissa[i] > abscissa[i - 1])) throw std::logic_error("CorrelationSeries: abscissa not ascending");
        if (!(errors[i] >= 0.0)) throw std::logic_error("CorrelationSeries: negative error");
        if (kind != SeriesKind::md_estimate) {
            if (!std::isfinite(values[i])) throw std::logic_error("CorrelationSeries: non-finite value");
            if (errors[i] != 0.0) throw std::logic_error("CorrelationSeries: deterministic series with errors");
        }
        if (kind == SeriesKind::correlation_decay && i > 0 && values[i] > values[i - 1])
            throw std::logic_error("CorrelationSeries: correlation decay is increasing");
    }
}

SpectralMeasure omega_prime_measure(const SpectralDecomposition& sd) {
    Eigen::VectorXd g = sd.source->sample([](double x) { return omega_prime(x); });
    Eigen::VectorXd proj = sd.eigenvectors.transpose() * g;
    return {sd.eigenvalues, proj.cwiseAbs2()};
}

double resolvent_r(const SpectralMeasure& m, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("resolvent_r: lambda must be positive");
    return (m.weight.array() / (lambda + m.mu.array())).sum();
}

double resolvent_r(const SpectralDecomposition& sd, double lambda) {
    return resolvent_r(omega_prime_measure(sd), lambda);
}

double correlation_c(const SpectralMeasure& m, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("correlation_c: t must be non-negative");
    return (m.weight.array() * (-t * m.mu.array()).exp()).sum();
}

double correlation_c(const SpectralDecomposition& sd, double t) {
    return correlation_c(omega_prime_measure(sd), t);
}

double resolvent_by_solve(const SymmetricOperator& op, double lambda) {
    Eigen::MatrixXd m = op.full();
    m.diagonal().array() += lambda;
    Eigen::VectorXd g = op.sample([](double x) { return omega_prime(x); });
    Eigen::VectorXd u = m.ldlt().solve(g);
    return g.dot(u);
}

CorrelationSeries relaxation_time_scan(const std::vector<double>& times, double tol) {
    for (double t : times)
        if (!(t >= 0.0)) throw std::invalid_argument("relaxation_time_c: t must be non-negative");
    const int m = static_cast<int>(times.size());
    // Parity: twice the integral over (0, pi]; the decay localizes at the edge.
    std::vector<double> bps{0.0};
    for (double b : geometric_breakpoints(1e-12, kPi, 4.0)) bps.push_back(b);
    VectorFn f = [&](double x, double* out) {
        double op = omega_prime(x);
        double w = potential_w(x, 1e-12);
        for (int k = 0; k < m; ++k) out[k] = 2.0 * op * op * std::exp(-times[k] * w);
    };
    AdaptiveOptions opt{1e-300, tol, 4000};
    VecQuadResult r = integrate_vector(f, m, bps, opt);
    if (!r.converged) throw QuadratureError("relaxation_time_c: quadrature did not converge", r.error);
    CorrelationSeries s;
    s.kind = SeriesKind::relaxation_time;
    s.abscissa = times;
    s.values = r.value;
    s.errors.assign(times.size(), 0.0);
    return s;
}

double relaxation_time_c(double t, double tol) { return relaxation_time_scan({t}, tol).values[0]; }

double c0_constant(double w0, double tol) {
    if (!(w0 > 0.0)) throw std::invalid_argument("c0_constant: w0 must be positive");
    // s = v^3 on [0, 1] and s = v^-3 on [1, inf).
    AdaptiveOptions opt{0.0, tol, 4000};
    double head = integrate_or_throw([&](double v) { return 3.0 * v * v / (1.0 + w0 * std::pow(v, 5)); }, {0.0, 1.0},
                                     opt, "c0_constant");
    double tail = integrate_or_throw([&](double v) { return 3.0 * v / (std::pow(v, 5) + w0); }, {0.0, 1.0}, opt,
                                     "c0_constant");
    return head + tail;
}

double c0_closed_form(double w0) {
    return std::pow(w0, -0.6) * (3.0 * kPi / 5.0) / std::sin(3.0 * kPi / 5.0);
}

double gamma_lanczos(double x) {
    static const double g = 7.0;
    static const double coef[9] = {0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                                   771.32342877765313,   -176.61502916214059,   12.507343278686905,
                                   -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    if (x < 0.5) return kPi / (std::sin(kPi * x) * gamma_lanczos(1.0 - x));
    x -= 1.0;
    double a = coef[0];
    double t = x + g + 0.5;
    for (int i = 1; i < 9; ++i) a += coef[i] / (x + i);
    return std::sqrt(2.0 * kPi) * std::pow(t, x + 0.5) * std::exp(-t) * a;
}

ExpansionTerms resolvent_expansion_terms(const SpectralDecomposition& sd, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("resolvent_expansion_terms: lambda must be positive");
    const SymmetricOperator& op = *sd.source;
    Eigen::VectorXd g = op.sample([](double x) { return omega_prime(x); });
    Eigen::VectorXd u = g.array() / (lambda + op.diag_w.array());
    Eigen::VectorXd phi = op.integral_part * u;
    Eigen::VectorXd proj = sd.eigenvectors.transpose() * phi;
    ExpansionTerms t;
    t.term1 = g.dot(u);
    t.term2 = u.dot(phi);
    t.term3 = (proj.array().square() / (lambda + sd.eigenvalues.array())).sum();
    return t;
}

ExponentFit fit_power_law(const CorrelationSeries& series, double lo, double hi) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < series.abscissa.size(); ++i) {
        double x = series.abscissa[i];
        if (x < lo || x > hi) continue;
        if (!(series.values[i] > 0.0) || !(x > 0.0))
            throw std::domain_error("fit_power_law: non-positive value in window");
        lx.push_back(std::log(x));
        ly.push_back(std::log(series.values[i]));
    }
    const int n = static_cast<int>(lx.size());
    if (n < 5) throw std::domain_error("fit_power_law: fewer than 5 points in window");
    double mx = 0.0, my = 0.0;
    for (int i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    ExponentFit fit;
    fit.exponent = sxy / sxx;
    double intercept = my - fit.exponent * mx;
    fit.amplitude = std::exp(intercept);
    fit.lo = lo;
    fit.hi = hi;
    fit.points = n;
    for (int i = 0; i < n; ++i)
        fit.residual = std::max(fit.residual, std::abs(ly[i] - (intercept + fit.exponent * lx[i])));
    return fit;
}

double kinetic_prediction(const SpectralDecomposition& sd, double t, double temperature) {
    if (!(temperature > 0.0)) throw std::invalid_argument("kinetic_prediction: temperature must be positive");
    double rate = 144.0 * temperature * temperature / kPi;
    return temperature * temperature / kTwoPi * correlation_c(sd, rate * std::abs(t));
}

ZeroModeReport zero_mode_check(const SpectralDecomposition& sd) {
    const SymmetricOperator& op = *sd.source;
    if (op.sector != Sector::symmetric) throw std::invalid_argument("zero_mode_check: needs the symmetric block");
    const QuadratureGrid& g = *op.grid;
    const int h = op.dim();
    if (h < 3) throw std::invalid_argument("zero_mode_check: block too small");
    // Both analytic modes are parity even, so the block coordinate is sqrt(2 w) u(x).
    Eigen::MatrixXd span(h, 2);
    std::vector<double> v(h);
    parallel_for(static_cast<std::size_t>(h), [&](std::size_t k) { v[k] = potential_v(g.points[k], 1e-12); });
    for (int k = 0; k < h; ++k) {
        double base = std::sqrt(2.0 * g.weights[k] * v[k]);
        span(k, 0) = base;
        span(k, 1) = base * g.points[k].s;
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(span);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(h, 2);
    Eigen::MatrixXd e = sd.eigenvectors.leftCols(2);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(q.transpose() * e);
    ZeroModeReport r;
    r.lambda0 = sd.eigenvalues(0);
    r.lambda1 = sd.eigenvalues(1);
    r.lambda2 = sd.eigenvalues(2);
    for (int k = 0; k < 2; ++k) {
        double c = std::clamp(svd.singularValues()(k), -1.0, 1.0);
        r.angles_deg[k] = std::acos(c) * 180.0 / kPi;
    }
    for (int k = 0; k < h; ++k)
        if (sd.eigenvalues(k) < 0.02) ++r.below_threshold;
    return r;
}

double min_w(const SpectralDecomposition& sd) { return sd.source->diag_w.minCoeff(); }

void require_resolvent_window(const SpectralDecomposition& sd, double lambda_lo) {
    if (!(min_w(sd) <= 0.1 * lambda_lo))
        throw std::domain_error("resolvent window: grid does not resolve lambda below min W * 10; refine the grid");
}

void require_correlation_window(const SpectralDecomposition& sd, double t_hi) {
    if (!(min_w(sd) <= 0.1 / t_hi))
        throw std::domain_error("correlation window: grid does not resolve t above 1 / (10 min W); refine the grid");
}

std::vector<double> log_spaced(double lo, double hi, int points) {
    if (!(lo > 0.0 && hi > lo) || points < 2) throw std::invalid_argument("log_spaced: need 0 < lo < hi and points >= 2");
    std::vector<double> out(points);
    double a = std::log(lo), b = std::log(hi);
    for (int i = 0; i < points; ++i) out[i] = std::exp(a + (b - a) * i / (points - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

CorrelationSeries resolvent_scan(const SpectralDecomposition& sd, const std::vector<double>& lambdas) {
    SpectralMeasure m = omega_prime_measure(sd);
    CorrelationSeries s;
    s.kind = SeriesKind::resolvent_scan;
    s.abscissa = lambdas;
    s.values.resize(lambdas.size());
    s.errors.assign(lambdas.size(), 0.0);
    parallel_for(lambdas.size(), [&](std::size_t i) { s.values[i] = resolvent_r(m, lambdas[i]); });
    return s;
}

CorrelationSeries correlation_scan(const SpectralDecomposition& sd, const std::vector<double>& times) {
    SpectralMeasure m = omega_prime_measure(sd);
    CorrelationSeries s;
    s.kind = SeriesKind::correlation_decay;
    s.abscissa = times;
    s.values.resize(times.size());
    s.errors.assign(times.size(), 0.0);
    parallel_for(times.size(), [&](std::size_t i) { s.values[i] = correlation_c(m, times[i]); });
    return s;
}

}  // namespace fpu
