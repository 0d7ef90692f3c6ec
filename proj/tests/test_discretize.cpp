#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>

#include "fpu/discretize.hpp"
#include "fpu/kernels.hpp"
#include "fpu/rng.hpp"

using namespace fpu;
using std::numbers::pi;

namespace {

// Converged values of <f, L f> (resolved form, refined grids agree to 1e-10).
constexpr double kFormCos = 2.0680789278;
constexpr double kFormSin = 58.494867714;
constexpr double kFormCos2 = 37.365058000;

const LProduct& product(int n) {
    static std::map<int, LProduct> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, assemble_l_product(std::make_shared<const QuadratureGrid>(build_grid(n)))).first;
    return it->second;
}

double sector_norm(const Eigen::MatrixXd& m) { return m.norm(); }

}  // namespace

TEST_CASE("build_grid examples") {
    QuadratureGrid g = build_grid(8, 1.0);
    REQUIRE(g.size == 8);
    double s = 0.0;
    for (int i = 0; i < 8; ++i) {
        s += g.weights[i];
        CHECK(g.nodes[i] > 0.0);
        CHECK(g.nodes[i] < 2 * pi);
        CHECK(g.nodes[g.mirror(i)] == doctest::Approx(2 * pi - g.nodes[i]).epsilon(1e-15));
        CHECK(g.weights[g.mirror(i)] == g.weights[i]);
        if (i) CHECK(g.nodes[i] > g.nodes[i - 1]);
    }
    CHECK(s == doctest::Approx(2 * pi).epsilon(1e-12));

    QuadratureGrid h = build_grid(512, 3.0);
    CHECK(h.nodes.front() < 1e-4 * pi);
    double hs = 0.0;
    for (double w : h.weights) hs += w;
    CHECK(hs == doctest::Approx(2 * pi).epsilon(1e-12));
    for (const Angle& a : h.points) CHECK(potential_w(a, 1e-8) > 0.0);

    CHECK_THROWS_AS(build_grid(9), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(6), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(64, 0.5), std::invalid_argument);
}

TEST_CASE("grid quadrature integrates smooth and graded functions") {
    QuadratureGrid g = build_grid(256, 3.0);
    double a = 0.0, b = 0.0;
    for (int i = 0; i < g.size; ++i) {
        a += g.weights[i] * std::cos(g.nodes[i]) * std::cos(g.nodes[i]);
        b += g.weights[i] * std::pow(omega(g.nodes[i]), 5.0 / 3.0);
    }
    CHECK(a == doctest::Approx(pi).epsilon(1e-12));
    // int_0^{2pi} sin(x/2)^{5/3} dx = 2 sqrt(pi) Gamma(4/3) / Gamma(11/6).
    CHECK(b == doctest::Approx(2 * std::sqrt(pi) * std::tgamma(4.0 / 3.0) / std::tgamma(11.0 / 6.0)).epsilon(1e-10));
}

TEST_CASE("L~ assembly: symmetry, positivity, collisional invariants") {
    const LProduct& lp = product(256);
    SymmetricOperator op = l_tilde_operator(lp);
    Eigen::MatrixXd m = op.full();
    const double norm = m.norm();
    CHECK(symmetry_error(op) < 1e-12 * norm);
    CHECK(parity_commutator(op) < 1e-10 * norm);

    SpectralDecomposition sd = eigendecompose(op);
    CHECK(sd.eigenvalues(0) >= -1e-8 * norm);
    CHECK(reconstruction_error(sd) < 1e-10 * norm);
    CHECK(orthonormality_error(sd) < 1e-12);

    Philox4x32 rng(9, 0);
    for (int t = 0; t < 100; ++t) {
        Eigen::VectorXd f(m.rows());
        for (int i = 0; i < f.size(); ++i) f(i) = rng.uniform() - 0.5;
        CHECK(f.dot(m * f) >= -1e-8 * norm * f.squaredNorm());
    }

    // In g = sqrt(w) f coordinates, the invariants psi in {1, omega} of L
    // appear in L~ = omega L omega as psi / omega.
    const QuadratureGrid& g = *lp.grid;
    Eigen::VectorXd z1(g.size), z2(g.size);
    for (int i = 0; i < g.size; ++i) {
        z1(i) = std::sqrt(g.weights[i]) / g.points[i].s;
        z2(i) = std::sqrt(g.weights[i]);
    }
    CHECK(std::abs(z1.dot(m * z1)) < 1e-6 * norm * z1.squaredNorm());
    CHECK(std::abs(z2.dot(m * z2)) < 1e-6 * norm * z2.squaredNorm());
}

TEST_CASE("parity split and eigendecomposition") {
    SymmetricOperator op = l_tilde_operator(product(256));
    auto [s, a] = parity_split(op);
    CHECK(s.dim() == 128);
    CHECK(a.dim() == 128);
    CHECK(s.sector == Sector::symmetric);
    CHECK(a.sector == Sector::antisymmetric);

    // Blocks reproduce the full quadratic form on parity-adapted vectors.
    Eigen::MatrixXd m = op.full();
    Philox4x32 rng(10, 0);
    Eigen::VectorXd u(128), v(256);
    for (int k = 0; k < 128; ++k) u(k) = rng.uniform() - 0.5;
    for (int k = 0; k < 128; ++k) {
        v(k) = u(k) / std::sqrt(2.0);
        v(255 - k) = -u(k) / std::sqrt(2.0);
    }
    CHECK(std::abs(v.dot(m * v) - u.dot(a.full() * u)) < 1e-12 * sector_norm(m) * u.squaredNorm());

    // omega' is odd: no symmetric component.
    Eigen::VectorXd gs = s.sample([](double x) { return omega_prime(x); });
    Eigen::VectorXd ga = a.sample([](double x) { return omega_prime(x); });
    CHECK(gs.norm() < 1e-14);
    CHECK(ga.squaredNorm() == doctest::Approx(pi / 4).epsilon(1e-10));

    SpectralDecomposition sa = eigendecompose(a);
    double min_w = a.diag_w.minCoeff();
    CHECK(sa.eigenvalues(0) > 0.0);
    CHECK(sa.eigenvalues(0) < 10.0 * min_w);

    SymmetricOperator id = a;
    id.integral_part.setZero();
    id.diag_w.setOnes();
    SpectralDecomposition si = eigendecompose(id);
    CHECK((si.eigenvalues.array() - 1.0).abs().maxCoeff() < 1e-14);

    SymmetricOperator bad = op;
    QuadratureGrid skewed = build_grid(256, 3.0);
    skewed.nodes[0] *= 1.5;
    bad.grid = std::make_shared<const QuadratureGrid>(skewed);
    CHECK_THROWS_AS(parity_split(bad), std::invalid_argument);
}

TEST_CASE("1 - B: B <= 1, two near-zero symmetric modes, gap in the odd block") {
    double prev_second = 1e300;
    for (int n : {128, 256}) {
        auto [s, a] = parity_split(one_minus_b_operator(product(n)));
        SpectralDecomposition ss = eigendecompose(s), sa = eigendecompose(a);
        CHECK(ss.eigenvalues(0) >= -1e-8);
        CHECK(sa.eigenvalues(0) >= -1e-8);
        CHECK(ss.eigenvalues(1) < prev_second);
        prev_second = ss.eigenvalues(1);
        CHECK(ss.eigenvalues(2) > 0.1);
        CHECK(sa.eigenvalues(0) > 0.4);
        CHECK(sa.eigenvalues(0) < 0.5);
    }
    CHECK(prev_second < 0.02);
}

TEST_CASE("omega' form is Cauchy under refinement") {
    auto form = [](int n) {
        auto [s, a] = parity_split(l_tilde_operator(product(n)));
        Eigen::VectorXd g = a.sample([](double x) { return omega_prime(x); });
        return g.dot(a.full() * g);
    };
    double f256 = form(256), f512 = form(512);
    CHECK(std::abs(f512 / f256 - 1.0) < 0.01);
}

TEST_CASE("matrix quadratic form matches the resolved 2D form") {
    const LProduct& lp = product(512);
    struct Case {
        RealFn f;
        double golden;
    };
    const Case cases[] = {{[](double x) { return std::cos(x); }, kFormCos},
                          {[](double x) { return std::sin(x); }, kFormSin},
                          {[](double x) { return std::cos(2 * x); }, kFormCos2}};
    for (const Case& c : cases) {
        double res = resolved_quadratic_form(c.f);
        CHECK(res == doctest::Approx(c.golden).epsilon(1e-9));
        CHECK(matrix_quadratic_form(lp, c.f) == doctest::Approx(res).epsilon(1e-5));
    }
    CHECK(std::abs(matrix_quadratic_form(lp, [](double) { return 1.0; })) < 1e-8);
    CHECK(std::abs(matrix_quadratic_form(lp, [](double x) { return omega(x); })) < 1e-8);
}

TEST_CASE("resolved form vanishes on collisional invariants") {
    CHECK(std::abs(resolved_quadratic_form([](double x) { return omega(x); })) < 1e-9);
    Philox4x32 rng(12, 0);
    for (int t = 0; t < 3; ++t) {
        double c1 = rng.uniform() - 0.5, c2 = rng.uniform() - 0.5;
        CHECK(std::abs(resolved_quadratic_form([&](double x) { return c1 + c2 * omega(x); })) < 1e-9);
    }
}

TEST_CASE("regularized form: invariants, guards, extrapolation") {
    CHECK(regularized_quadratic_form([](double) { return 1.0; }, 1e-2) == 0.0);
    // For omega the collision residual is Omega itself, so the smeared form vanishes linearly in eps.
    auto w = [](double x) { return omega(x); };
    double w1 = regularized_quadratic_form(w, 1e-2, 1e-6), w2 = regularized_quadratic_form(w, 5e-3, 1e-6);
    CHECK(w1 > 0.0);
    CHECK(w2 / w1 == doctest::Approx(0.5).epsilon(0.1));
    CHECK_THROWS_AS(regularized_quadratic_form([](double x) { return std::cos(x); }, 1e-6, 1e-7), std::invalid_argument);
    CHECK_THROWS_AS(regularized_quadratic_form([](double x) { return std::cos(x); }, 0.5), std::invalid_argument);

    // Extrapolation is exact on its own basis.
    std::vector<double> eps = {1e-2, 5e-3, 2.5e-3, 1.25e-3};
    std::vector<double> vals;
    for (double e : eps) vals.push_back(3.0 + 2.0 * e - 5.0 * e * std::log(e) + 7.0 * e * e);
    CHECK(extrapolate_to_zero(eps, vals) == doctest::Approx(3.0).epsilon(1e-9));
    CHECK_THROWS_AS(extrapolate_to_zero({1e-2, 1e-2}, {1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("regularized form extrapolates to the resolved form for cos") {
    std::vector<double> eps = {1e-2, 5e-3, 2.5e-3, 1.25e-3};
    auto f = [](double x) { return std::cos(x); };
    std::vector<double> v = regularized_quadratic_forms(f, eps, 1e-6);
    CHECK(v[0] == doctest::Approx(regularized_quadratic_form(f, eps[0], 1e-6)).epsilon(1e-5));
    CHECK(extrapolate_to_zero(eps, v) == doctest::Approx(kFormCos).epsilon(0.01));
}

TEST_CASE("operator file round trip") {
    auto lp = assemble_l_product(std::make_shared<const QuadratureGrid>(build_grid(32)));
    SymmetricOperator op = l_tilde_operator(lp);
    auto path = (std::filesystem::temp_directory_path() / "fpukin_roundtrip.bin").string();
    save_operator(path, op);
    StoredOperator s = load_operator(path);
    CHECK(s.version == 1);
    CHECK(s.n == 32);
    CHECK(s.grading_exponent == 3.0);
    CHECK((s.matrix - op.full()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(s.nodes == lp.grid->nodes);
    CHECK(s.weights == lp.grid->weights);
    CHECK(std::filesystem::file_size(path) == 4 + 4 + 4 + 8 + 8 * (32 * 32 + 64));

    auto [sym, anti] = parity_split(op);
    CHECK_THROWS_AS(save_operator(path, sym), std::invalid_argument);
    {
        std::ofstream os(path, std::ios::binary);
        os << "NOPE";
    }
    CHECK_THROWS_AS(load_operator(path), std::runtime_error);
    {
        std::ofstream os(path, std::ios::binary);
        os.write("FPUL\x01\x00\x00\x00", 8);
    }
    CHECK_THROWS_AS(load_operator(path), std::runtime_error);
    std::filesystem::remove(path);
}
