#include <cmath>
#include <stdexcept>

#include "fpu/discretize.hpp"

namespace fpu {

Eigen::MatrixXd SymmetricOperator::full() const {
    Eigen::MatrixXd m = -integral_part;
    m.diagonal() += diag_w;
    return m;
}

Eigen::VectorXd SymmetricOperator::sample(const std::function<double(double)>& g) const {
    const QuadratureGrid& gr = *grid;
    const int n = gr.size;
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = std::sqrt(gr.weights[i]) * g(gr.nodes[i]);
    if (sector == Sector::full) return v;
    const int h = n / 2;
    const double sign = sector == Sector::symmetric ? 1.0 : -1.0;
    Eigen::VectorXd b(h);
    for (int k = 0; k < h; ++k) b(k) = (v(k) + sign * v(n - 1 - k)) / std::sqrt(2.0);
    return b;
}

namespace {

// Symmetric part of D_l a D_r with (D_l)_i (D_r)_i = 1 on the product
// integration matrix, negated: the kernel part enters M with a minus sign.
SymmetricOperator conjugated(const LProduct& lp, const Eigen::VectorXd& scale, const Eigen::VectorXd& diag) {
    const QuadratureGrid& g = *lp.grid;
    const int n = g.size;
    Eigen::VectorXd sw(n);
    for (int i = 0; i < n; ++i) sw(i) = std::sqrt(g.weights[i]);
    SymmetricOperator op;
    op.grid = lp.grid;
    op.diag_w = diag;
    op.integral_part.resize(n, n);
    for (int j = 0; j < n; ++j) {
        for (int i = j; i < n; ++i) {
            double aij = sw(i) / sw(j) * lp.a(i, j);
            double aji = sw(j) / sw(i) * lp.a(j, i);
            double val = -0.5 * scale(i) * scale(j) * (aij + aji);
            op.integral_part(i, j) = val;
            op.integral_part(j, i) = val;
        }
    }
    return op;
}

}  // namespace

SymmetricOperator l_tilde_operator(const LProduct& lp) {
    const QuadratureGrid& g = *lp.grid;
    const int n = g.size;
    Eigen::VectorXd om(n), w(n);
    for (int i = 0; i < n; ++i) {
        om(i) = g.points[i].s;
        w(i) = om(i) * om(i) * lp.v(i);
    }
    return conjugated(lp, om, w);
}

SymmetricOperator one_minus_b_operator(const LProduct& lp) {
    const int n = lp.grid->size;
    Eigen::VectorXd sc(n);
    for (int i = 0; i < n; ++i) sc(i) = 1.0 / std::sqrt(lp.v(i));
    return conjugated(lp, sc, Eigen::VectorXd::Ones(n));
}

SymmetricOperator assemble_l_tilde(std::shared_ptr<const QuadratureGrid> grid, double tol) {
    return l_tilde_operator(assemble_l_product(std::move(grid), tol));
}

SymmetricOperator assemble_one_minus_b(std::shared_ptr<const QuadratureGrid> grid, double tol) {
    return one_minus_b_operator(assemble_l_product(std::move(grid), tol));
}

double symmetry_error(const SymmetricOperator& op) {
    const Eigen::MatrixXd& a = op.integral_part;
    double scale = a.cwiseAbs().maxCoeff();
    return scale > 0.0 ? (a - a.transpose()).cwiseAbs().maxCoeff() / scale : 0.0;
}

namespace {

void require_parity_grid(const QuadratureGrid& g) {
    const int n = g.size;
    for (int i = 0; i < n; ++i) {
        int m = n - 1 - i;
        if (std::abs(g.nodes[i] + g.nodes[m] - kTwoPi) > 1e-12 || g.weights[i] != g.weights[m])
            throw std::invalid_argument("parity_split: grid is not parity symmetric");
    }
}

}  // namespace

double parity_commutator(const SymmetricOperator& op) {
    if (op.sector != Sector::full) throw std::invalid_argument("parity_commutator: needs a full operator");
    require_parity_grid(*op.grid);
    Eigen::MatrixXd m = op.full();
    Eigen::MatrixXd pm = m.colwise().reverse();  // (P M)_ij = M_{P i, j}
    Eigen::MatrixXd mp = m.rowwise().reverse();  // (M P)_ij = M_{i, P j}
    return (pm - mp).norm() / m.norm();
}

std::pair<SymmetricOperator, SymmetricOperator> parity_split(const SymmetricOperator& op) {
    if (op.sector != Sector::full) throw std::invalid_argument("parity_split: needs a full operator");
    require_parity_grid(*op.grid);
    const int n = op.dim(), h = n / 2;
    Eigen::MatrixXd m = op.full();
    SymmetricOperator sym, anti;
    for (SymmetricOperator* b : {&sym, &anti}) {
        b->grid = op.grid;
        b->diag_w = op.diag_w.head(h);
        b->integral_part.resize(h, h);
    }
    sym.sector = Sector::symmetric;
    anti.sector = Sector::antisymmetric;
    for (int l = 0; l < h; ++l) {
        for (int k = 0; k < h; ++k) {
            int pk = n - 1 - k, pl = n - 1 - l;
            double direct = 0.5 * (m(k, l) + m(pk, pl));
            double cross = 0.5 * (m(k, pl) + m(pk, l));
            sym.integral_part(k, l) = -(direct + cross);
            anti.integral_part(k, l) = -(direct - cross);
        }
    }
    sym.integral_part.diagonal() += sym.diag_w;
    anti.integral_part.diagonal() += anti.diag_w;
    return {std::move(sym), std::move(anti)};
}

SpectralDecomposition eigendecompose(const SymmetricOperator& op) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.full());
    if (es.info() != Eigen::Success) throw std::runtime_error("eigendecompose: solver did not converge");
    SpectralDecomposition sd;
    sd.eigenvalues = es.eigenvalues();
    sd.eigenvectors = es.eigenvectors();
    sd.source = std::make_shared<const SymmetricOperator>(op);
    return sd;
}

double reconstruction_error(const SpectralDecomposition& sd) {
    Eigen::MatrixXd m = sd.source->full();
    Eigen::MatrixXd r = sd.eigenvectors * sd.eigenvalues.asDiagonal() * sd.eigenvectors.transpose();
    return (m - r).norm() / m.norm();
}

double orthonormality_error(const SpectralDecomposition& sd) {
    const Eigen::MatrixXd& q = sd.eigenvectors;
    Eigen::MatrixXd e = q.transpose() * q - Eigen::MatrixXd::Identity(q.cols(), q.cols());
    return e.cwiseAbs().maxCoeff();
}

}  // namespace fpu
