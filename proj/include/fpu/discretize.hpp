#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "fpu/dispersion.hpp"
#include "fpu/kernels.hpp"

namespace fpu {

// A Gauss-Legendre panel in the graded coordinate t. Lower panels map
// t -> y = pi t^p, upper (mirrored) panels map t -> 2pi - y.
struct Panel {
    int first = 0;     // index of the panel's first grid node
    int count = 0;
    double t_lo = 0.0;
    double t_hi = 0.0;
    bool upper = false;
    std::vector<double> t;     // node coordinates, ascending in t
    std::vector<int> index;    // grid index of each t node
    std::vector<double> bary;  // barycentric weights of the t nodes
};

struct QuadratureGrid {
    std::vector<double> nodes;    // ascending, in (0, 2pi)
    std::vector<double> weights;
    std::vector<Angle> points;    // nodes with exact complements
    double grading_exponent = 1.0;
    int size = 0;
    std::vector<Panel> panels;

    int mirror(int i) const { return size - 1 - i; }
    Angle panel_point(const Panel& pn, double t) const;
    double panel_coordinate(const Panel& pn, const Angle& y) const;
    Angle panel_lo(const Panel& pn) const;  // smaller y end
    Angle panel_hi(const Panel& pn) const;
};

// n/2 nodes on (0, pi] from composite Gauss-Legendre panels (at most 16
// nodes each) in t, mapped by t -> pi t^p, mirrored onto (pi, 2pi).
QuadratureGrid build_grid(int n, double grading_exponent = 3.0);

// Discrete L = V + K1 - 2 K2 on the panel interpolants:
// <f, L f> ~ sum_i w_i f_i (V_i f_i + sum_j a_ij f_j), with w_i a_ij symmetric.
// Kernel entries are node-rule samples w_i w_j K where the kernel is smooth on
// the panel pair, and Galerkin integrals of l_i(x) K(x,y) l_j(y) elsewhere.
struct LProduct {
    std::shared_ptr<const QuadratureGrid> grid;
    Eigen::VectorXd v;
    Eigen::MatrixXd a;
    int adaptive_cells = 0;  // panel pairs assembled as Galerkin blocks
};

LProduct assemble_l_product(std::shared_ptr<const QuadratureGrid> grid, double tol = 1e-10);

enum class Sector { full, symmetric, antisymmetric };

// M = diag(diag_w) - integral_part on f_i = sqrt(w_i) f(x_i).
struct SymmetricOperator {
    Eigen::VectorXd diag_w;
    Eigen::MatrixXd integral_part;
    std::shared_ptr<const QuadratureGrid> grid;
    Sector sector = Sector::full;

    int dim() const { return static_cast<int>(diag_w.size()); }
    Eigen::MatrixXd full() const;
    // Grid index of block row k.
    int node_index(int k) const { return k; }
    // Weighted vector sqrt(w_i) g(x_i) in this operator's coordinates.
    Eigen::VectorXd sample(const std::function<double(double)>& g) const;
};

SymmetricOperator l_tilde_operator(const LProduct& lp);
SymmetricOperator one_minus_b_operator(const LProduct& lp);
SymmetricOperator assemble_l_tilde(std::shared_ptr<const QuadratureGrid> grid, double tol = 1e-10);
SymmetricOperator assemble_one_minus_b(std::shared_ptr<const QuadratureGrid> grid, double tol = 1e-10);

double symmetry_error(const SymmetricOperator& op);
// ||P M - M P||_F / ||M||_F.
double parity_commutator(const SymmetricOperator& op);

// Blocks on (e_i + e_Pi)/sqrt2 and (e_i - e_Pi)/sqrt2, i < n/2.
std::pair<SymmetricOperator, SymmetricOperator> parity_split(const SymmetricOperator& op);

struct SpectralDecomposition {
    Eigen::VectorXd eigenvalues;   // ascending
    Eigen::MatrixXd eigenvectors;  // orthonormal columns
    std::shared_ptr<const SymmetricOperator> source;
};

SpectralDecomposition eigendecompose(const SymmetricOperator& op);
double reconstruction_error(const SpectralDecomposition& sd);
double orthonormality_error(const SpectralDecomposition& sd);

using RealFn = std::function<double(double)>;

// (1/4) int_{I^3} delta_eps(Omega) |f(x)+f(y)-f(z)-f(x+y-z)|^2.
double regularized_quadratic_form(const RealFn& f, double epsilon, double tol = 1e-7);
// Same for several epsilons in one pass (shared subdivision).
std::vector<double> regularized_quadratic_forms(const RealFn& f, const std::vector<double>& eps, double tol = 1e-7);
// Extrapolation to epsilon -> 0. The regularized form expands as
// Q + e(a1 + b1 ln e) + e^2(a2 + b2 ln e + c2 ln^2 e) + ..., so values are
// interpolated by that many leading terms (one per point, at most 9).
double extrapolate_to_zero(const std::vector<double>& eps, const std::vector<double>& values);
// int_{I^2} |f(x)+f(h)-f(z)-f(x-z+h)|^2 / (2 sqrt F_+(x, z)).
double resolved_quadratic_form(const RealFn& f, double tol = 1e-9);
// sum_i w_i f_i (V_i f_i + sum_j a_ij f_j).
double matrix_quadratic_form(const LProduct& lp, const RealFn& f);

using Fn2 = std::function<double(double, double)>;
// int F_+(x,z)^{-1/2} G(x, h(x,z)) dx dz.
double change_of_variables_lhs(const Fn2& g, double tol = 1e-9);
// int 2 1(F_- > 0) F_-(x,y)^{-1/2} G(x, y) dx dy.
double change_of_variables_rhs(const Fn2& g, double tol = 1e-9);

// Binary operator file: "FPUL", u32 version, u32 n, f64 p, row-major
// f64 matrix, nodes, weights; little-endian.
struct StoredOperator {
    std::uint32_t version = 1;
    std::uint32_t n = 0;
    double grading_exponent = 0.0;
    Eigen::MatrixXd matrix;
    std::vector<double> nodes;
    std::vector<double> weights;
};

void save_operator(const std::string& path, const SymmetricOperator& op);
StoredOperator load_operator(const std::string& path);

}  // namespace fpu
