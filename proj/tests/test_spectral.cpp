#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>

#include "fpu/quadrature.hpp"
#include "fpu/rng.hpp"
#include "fpu/spectral.hpp"

using namespace fpu;
using std::numbers::pi;

namespace {

constexpr double kW0 = 8.90330139617844302626712651531;
constexpr double kC0 = 0.533782279847026446633155861125;
constexpr double kGamma25 = 2.21815954375768822305905402191;
constexpr double kC0OverGamma = 0.240641968856202721238193371306;

struct Blocks {
    LProduct lp;
    SymmetricOperator odd;
    SpectralDecomposition sd;
};

const Blocks& odd_block(int n, double p = 3.0) {
    static std::map<std::pair<int, double>, Blocks> cache;
    auto it = cache.find({n, p});
    if (it == cache.end()) {
        Blocks b;
        b.lp = assemble_l_product(std::make_shared<const QuadratureGrid>(build_grid(n, p)));
        b.odd = parity_split(l_tilde_operator(b.lp)).second;
        b.sd = eigendecompose(b.odd);
        it = cache.emplace(std::pair{n, p}, std::move(b)).first;
    }
    return it->second;
}

}  // namespace

TEST_CASE("series kinds and invariants") {
    CHECK(to_string(SeriesKind::md_estimate) == "md_estimate");
    CorrelationSeries s;
    s.kind = SeriesKind::correlation_decay;
    s.abscissa = {0.0, 1.0, 2.0};
    s.values = {1.0, 0.5, 0.7};
    s.errors = {0.0, 0.0, 0.0};
    CHECK_THROWS_AS(s.validate(), std::logic_error);
    s.values = {1.0, 0.7, 0.5};
    CHECK_NOTHROW(s.validate());
    s.errors[1] = 0.1;
    CHECK_THROWS_AS(s.validate(), std::logic_error);
    s.kind = SeriesKind::md_estimate;
    CHECK_NOTHROW(s.validate());
    s.abscissa = {0.0, 2.0, 1.0};
    CHECK_THROWS_AS(s.validate(), std::logic_error);
}

TEST_CASE("constants: c0 closed form, scaling, Gamma") {
    CHECK(c0_closed_form(kW0) == doctest::Approx(kC0).epsilon(1e-14));
    CHECK(std::abs(c0_constant(kW0) - c0_closed_form(kW0)) < 1e-8);
    CHECK(c0_constant(std::pow(2.0, 5.0 / 3.0) * kW0) == doctest::Approx(c0_constant(kW0) / 2).epsilon(1e-10));
    CHECK(gamma_lanczos(0.4) == doctest::Approx(kGamma25).epsilon(1e-13));
    CHECK(gamma_lanczos(0.4) * gamma_lanczos(0.6) == doctest::Approx(pi / std::sin(0.4 * pi)).epsilon(1e-12));
    CHECK(gamma_lanczos(5.0) == doctest::Approx(24.0).epsilon(1e-13));
    CHECK(gamma_lanczos(0.5) == doctest::Approx(std::sqrt(pi)).epsilon(1e-13));
    CHECK(kC0 / gamma_lanczos(0.4) == doctest::Approx(kC0OverGamma).epsilon(1e-13));
}

TEST_CASE("power-law fit") {
    CorrelationSeries s;
    for (double x : log_spaced(1e-3, 1e3, 13)) {
        s.abscissa.push_back(x);
        s.values.push_back(3.5 * std::pow(x, -0.37));
        s.errors.push_back(0.0);
    }
    ExponentFit f = fit_power_law(s, 1e-3, 1e3);
    CHECK(std::abs(f.exponent + 0.37) < 1e-12);
    CHECK(f.amplitude == doctest::Approx(3.5).epsilon(1e-12));
    CHECK(f.residual < 1e-12);
    CHECK(f.points == 13);
    CHECK_THROWS_AS(fit_power_law(s, 0.9, 1.1), std::domain_error);
    s.values[5] = -1.0;
    CHECK_THROWS_AS(fit_power_law(s, 1e-3, 1e3), std::domain_error);
    auto l = log_spaced(1e-6, 1e-4, 21);
    CHECK(l.size() == 21);
    CHECK(l.front() == 1e-6);
    CHECK(l.back() == 1e-4);
}

TEST_CASE("resolvent: large-lambda limit, monotonicity, direct solve") {
    const Blocks& b = odd_block(512);
    CHECK(1e6 * resolvent_r(b.sd, 1e6) == doctest::Approx(pi / 4).epsilon(1e-3));
    CHECK(resolvent_r(b.sd, 1e-3) > resolvent_r(b.sd, 1e-2));
    CHECK(resolvent_r(b.sd, 1e-2) > resolvent_r(b.sd, 1e-1));
    Philox4x32 rng(21, 0);
    for (int k = 0; k < 10; ++k) {
        double lambda = std::pow(10.0, -5.0 + 5.0 * rng.uniform());
        CHECK(resolvent_by_solve(b.odd, lambda) == doctest::Approx(resolvent_r(b.sd, lambda)).epsilon(1e-10));
    }
}

TEST_CASE("correlation: Parseval at 0, monotone decay, initial slope") {
    const Blocks& b = odd_block(512);
    Eigen::VectorXd g = b.odd.sample([](double x) { return omega_prime(x); });
    CHECK(correlation_c(b.sd, 0.0) == doctest::Approx(g.squaredNorm()).epsilon(1e-13));
    CHECK(correlation_c(b.sd, 0.0) == doctest::Approx(pi / 4).epsilon(1e-4));
    CHECK(correlation_c(b.sd, 10.0) < correlation_c(b.sd, 1.0));
    CHECK(correlation_c(b.sd, 1.0) < correlation_c(b.sd, 0.1));
    const double h = 1e-4;
    double slope = (-3 * correlation_c(b.sd, 0.0) + 4 * correlation_c(b.sd, h) - correlation_c(b.sd, 2 * h)) / (2 * h);
    double form = g.dot(b.odd.full() * g);
    CHECK(slope == doctest::Approx(-form).epsilon(1e-5));
    CorrelationSeries cs = correlation_scan(b.sd, log_spaced(1e-2, 1e3, 30));
    CHECK_NOTHROW(cs.validate());
}

TEST_CASE("Laplace transform of C reproduces R") {
    const Blocks& b = odd_block(512);
    const double lambda = 1e-2;
    SpectralMeasure m = omega_prime_measure(b.sd);
    std::vector<double> bps{0.0};
    for (double t : geometric_breakpoints(1e-2, 1e5, 2.0)) bps.push_back(t);
    double laplace = integrate_or_throw([&](double t) { return std::exp(-lambda * t) * correlation_c(m, t); }, bps,
                                        {1e-12, 1e-9, 5000}, "laplace");
    CHECK(laplace == doctest::Approx(resolvent_r(m, lambda)).epsilon(0.01));
}

TEST_CASE("expansion terms sum to R") {
    const Blocks& b = odd_block(512);
    for (double lambda : {1e-3, 1e-1}) {
        ExpansionTerms e = resolvent_expansion_terms(b.sd, lambda);
        CHECK(e.term1 + e.term2 + e.term3 == doctest::Approx(resolvent_r(b.sd, lambda)).epsilon(1e-8));
        CHECK(e.term3 >= 0.0);
        CHECK(e.term1 > 0.0);
    }
}

TEST_CASE("relaxation-time approximation") {
    CHECK(relaxation_time_c(0.0) == doctest::Approx(pi / 4).epsilon(1e-9));
    CorrelationSeries rt = relaxation_time_scan(log_spaced(1e2, 1e5, 13));
    ExponentFit f = fit_power_law(rt, 1e2, 1e5);
    CHECK(std::abs(f.exponent + 0.6) < 0.03);
    CHECK(rt.values[0] == doctest::Approx(relaxation_time_c(1e2)).epsilon(1e-8));
}

TEST_CASE("matrix correlation tracks the relaxation-time curve") {
    const Blocks& b = odd_block(1024);
    CHECK_NOTHROW(require_correlation_window(b.sd, 1e4));
    for (double t : {1e2, 1e3, 1e4}) {
        double ratio = correlation_c(b.sd, t) / relaxation_time_c(t);
        CHECK(ratio > 0.5);
        CHECK(ratio < 2.0);
    }
}

TEST_CASE("kinetic prediction") {
    const Blocks& b = odd_block(512);
    for (double temp : {0.5, 1.0}) CHECK(kinetic_prediction(b.sd, 0.0, temp) == doctest::Approx(temp * temp / 8).epsilon(1e-4));
    for (double t : {0.01, 0.3, 2.0})
        CHECK(kinetic_prediction(b.sd, t, 1.0) == doctest::Approx(4 * kinetic_prediction(b.sd, 4 * t, 0.5)).epsilon(1e-12));
    CHECK(kinetic_prediction(b.sd, -0.3, 1.0) == kinetic_prediction(b.sd, 0.3, 1.0));
    CHECK_THROWS_AS(kinetic_prediction(b.sd, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("scan windows are refused when the grid cannot resolve them") {
    const Blocks& coarse = odd_block(64, 1.0);
    CHECK_THROWS_AS(require_resolvent_window(coarse.sd, 1e-6), std::domain_error);
    CHECK_THROWS_AS(require_correlation_window(coarse.sd, 1e4), std::domain_error);
    CHECK(min_w(coarse.sd) == coarse.odd.diag_w.minCoeff());
}

TEST_CASE("zero modes of 1 - B") {
    const Blocks& b = odd_block(512);
    auto [s, a] = parity_split(one_minus_b_operator(b.lp));
    ZeroModeReport z = zero_mode_check(eigendecompose(s));
    CHECK(z.below_threshold == 2);
    CHECK(std::abs(z.lambda0) < 0.02);
    CHECK(std::abs(z.lambda1) < 0.02);
    CHECK(z.lambda2 > 0.1);
    CHECK(z.angles_deg[0] < 5.0);
    CHECK(z.angles_deg[1] < 5.0);
    CHECK_THROWS_AS(zero_mode_check(eigendecompose(a)), std::invalid_argument);
}
