#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>

#include "fpu/discretize.hpp"
#include "fpu/parallel.hpp"
#include "fpu/quadrature.hpp"

namespace fpu {

namespace {

// Integration piece: y = base + dir * s, s = tau (linear) or tau^2 (root
// substitution, base is then a root of F_-).
struct Piece {
    Angle base;
    int dir = 1;
    bool quadratic = false;
    bool k1_active = false;
    double tau0 = 0.0, tau1 = 0.0;
    double fp = 0.0, fpp = 0.0, eta = 0.0;  // root data for the quadratic case
    std::vector<double> hints;
};

void lagrange(const Panel& pn, double t, double* out) {
    const int m = pn.count;
    for (int j = 0; j < m; ++j) {
        if (t == pn.t[j]) {
            for (int l = 0; l < m; ++l) out[l] = (l == j) ? 1.0 : 0.0;
            return;
        }
    }
    double sum = 0.0;
    for (int j = 0; j < m; ++j) {
        out[j] = pn.bary[j] / (t - pn.t[j]);
        sum += out[j];
    }
    for (int j = 0; j < m; ++j) out[j] /= sum;
}

double plain_kernel(const Angle& x, const Angle& y) { return k1_raw(x, y) - 2.0 * k2_raw(x, y); }

bool strictly_inside(const Angle& r, const Angle& a, const Angle& b) {
    return angle_diff(r, a) > 0.0 && angle_diff(b, r) > 0.0;
}

bool in_corner_zone(const QuadratureGrid& g, const Angle& x, const Panel& pn) {
    if (x.v < 1.0 && pn.upper) return g.panel_lo(pn).vc < 1.0;
    if (x.vc < 1.0 && !pn.upper) return g.panel_hi(pn).v < 1.0;
    return false;
}

// Compares the panel rule with the two-half-panel rule for the full kernel.
bool panel_rule_suspect(const QuadratureGrid& g, const Angle& x, const Panel& pn) {
    double s1 = 0.0, scale = 0.0;
    for (int j = 0; j < pn.count; ++j) {
        int i = pn.index[j];
        double k = plain_kernel(x, g.points[i]);
        s1 += g.weights[i] * k;
        scale += g.weights[i] * std::abs(k);
    }
    GaussRule gr = gauss_legendre(pn.count);
    double p = g.grading_exponent, s2 = 0.0;
    double tm = 0.5 * (pn.t_lo + pn.t_hi);
    for (int half = 0; half < 2; ++half) {
        double a = half == 0 ? pn.t_lo : tm, b = half == 0 ? tm : pn.t_hi;
        double hw = 0.5 * (b - a), mid = 0.5 * (a + b);
        for (int j = 0; j < pn.count; ++j) {
            double t = mid + hw * gr.nodes[j];
            double w = gr.weights[j] * hw * p * kPi * std::pow(t, p - 1.0);
            s2 += w * plain_kernel(x, g.panel_point(pn, t));
        }
    }
    return std::abs(s1 - s2) > 1e-12 * scale;
}

std::vector<Piece> make_pieces(const Angle& x, const RootPair& roots, const Angle& lo, const Angle& hi) {
    std::vector<Angle> cuts{lo};
    const Angle rs[2] = {roots.r1, roots.r2};
    for (const Angle& r : rs)
        if (strictly_inside(r, lo, hi)) cuts.push_back(r);
    if (cuts.size() == 3 && angle_diff(cuts[2], cuts[1]) < 0.0) std::swap(cuts[1], cuts[2]);
    cuts.push_back(hi);

    const double ex = x.edge_distance();
    std::vector<Piece> out;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        const Angle& a = cuts[c];
        const Angle& b = cuts[c + 1];
        double len = angle_diff(b, a);
        if (!(len > 0.0)) continue;
        Piece pc;
        pc.k1_active = f_minus(x, a.shifted(0.5 * len)) > 0.0;

        const Angle* near = nullptr;
        bool below = false;
        double best = 2.0 * len;
        if (pc.k1_active) {
            for (const Angle& r : rs) {
                double db = angle_diff(a, r);  // r below the piece
                double da = angle_diff(r, b);  // r above the piece
                if (db >= 0.0 && db <= best) { best = db; near = &r; below = true; }
                if (da >= 0.0 && da <= best) { best = da; near = &r; below = false; }
            }
        }
        if (near) {
            pc.base = *near;
            pc.quadratic = true;
            pc.dir = below ? 1 : -1;
            double d0 = below ? angle_diff(a, *near) : angle_diff(*near, b);
            double d1 = below ? angle_diff(b, *near) : angle_diff(*near, a);
            pc.tau0 = std::sqrt(std::max(d0, 0.0));
            pc.tau1 = std::sqrt(std::max(d1, 0.0));
            pc.fp = f_minus_dy(x, *near);
            pc.fpp = f_minus_dyy(x, *near);
            pc.eta = 1e-8 * std::max(near->edge_distance(), 1e-300);
        } else {
            bool low_side = (a.v + b.v) <= kTwoPi;
            pc.base = low_side ? a : b;
            pc.dir = low_side ? 1 : -1;
            pc.tau0 = 0.0;
            pc.tau1 = len;
            double lo_hint = 0.25 * (pc.base.edge_distance() + ex * ex * ex / 64.0);
            if (lo_hint < len && pc.base.edge_distance() < 1.0) {
                for (double h = std::max(lo_hint, 1e-300); h < len; h *= 4.0) pc.hints.push_back(h);
            }
        }
        out.push_back(std::move(pc));
    }
    return out;
}

void integrate_panel(const QuadratureGrid& g, const Angle& x, const RootPair& roots, const Panel& pn,
                     double tol, double abs_tol, double* result) {
    const int m = pn.count;
    for (int k = 0; k < m; ++k) result[k] = 0.0;
    std::vector<double> basis(m);
    for (const Piece& pc : make_pieces(x, roots, g.panel_lo(pn), g.panel_hi(pn))) {
        VectorFn f = [&](double tau, double* out) {
            double s = pc.quadratic ? tau * tau : tau;
            Angle y = pc.base.shifted(pc.dir * s);
            double jac = pc.quadratic ? 2.0 * tau : 1.0;
            double total = -2.0 * k2_raw(x, y) * jac;
            if (pc.k1_active) {
                if (pc.quadratic) {
                    double taylor = pc.dir * pc.fp + 0.5 * pc.fpp * s;
                    double q = (s < pc.eta) ? taylor : f_minus(x, y) / s;
                    if (!(q > 0.0)) q = taylor;
                    total += (q > 0.0) ? 8.0 / std::sqrt(q) : 0.0;
                } else {
                    total += k1_raw(x, y) * jac;
                }
            }
            lagrange(pn, g.panel_coordinate(pn, y), basis.data());
            for (int k = 0; k < m; ++k) out[k] = total * basis[k];
        };
        std::vector<double> bps{pc.tau0};
        for (double h : pc.hints)
            if (h > pc.tau0 && h < pc.tau1) bps.push_back(h);
        bps.push_back(pc.tau1);
        AdaptiveOptions opt;
        opt.rel_tol = tol;
        opt.abs_tol = abs_tol;
        opt.max_intervals = 3000;
        VecQuadResult r = integrate_vector(f, m, bps, opt);
        for (int k = 0; k < m; ++k) result[k] += r.value[k];
    }
}

// x-roots of F_-(., y) equal the y-roots of F_-(y, .) by symmetry.
void outer_breakpoints(const Angle& base, int dir, double len, const Angle& y, std::vector<double>& out) {
    if (y.edge_distance() <= 0.0) return;
    RootPair rp = find_f_minus_roots(y);
    for (const Angle& r : {rp.r1, rp.r2}) {
        double tau = dir > 0 ? angle_diff(r, base) : angle_diff(base, r);
        if (tau > 0.0 && tau < len) out.push_back(tau);
    }
}

// Galerkin block int_P int_Q l_k(x) K(x, y) l_l(y) dy dx, row-major m_P x m_Q.
std::vector<double> galerkin_block(const QuadratureGrid& g, const Panel& pp, const Panel& pq, double tol,
                                   double abs_inner) {
    const int mp = pp.count, mq = pq.count;
    Angle lo = g.panel_lo(pp), hi = g.panel_hi(pp);
    const double len = angle_diff(hi, lo);
    const bool low_side = (lo.v + hi.v) <= kTwoPi;
    const Angle base = low_side ? lo : hi;
    const int dir = low_side ? 1 : -1;

    std::vector<double> bps{0.0};
    outer_breakpoints(base, dir, len, g.panel_lo(pq), bps);
    outer_breakpoints(base, dir, len, g.panel_hi(pq), bps);
    if (base.edge_distance() < 1.0) {
        double h0 = std::max(0.25 * base.edge_distance(), 1e-20 * len);
        for (double h = h0; h < len; h *= 4.0) bps.push_back(h);
    }
    bps.push_back(len);
    std::sort(bps.begin(), bps.end());
    bps.erase(std::unique(bps.begin(), bps.end()), bps.end());

    std::vector<double> inner(mq), lx(mp);
    VectorFn f = [&](double tau, double* out) {
        Angle x = base.shifted(dir * tau);
        // Below this the x^(-1/3) growth of the integrand contributes < 1e-18.
        if (x.edge_distance() < 1e-28) {
            std::fill(out, out + mp * mq, 0.0);
            return;
        }
        RootPair roots = find_f_minus_roots(x);
        integrate_panel(g, x, roots, pq, tol, abs_inner, inner.data());
        lagrange(pp, g.panel_coordinate(pp, x), lx.data());
        for (int k = 0; k < mp; ++k)
            for (int l = 0; l < mq; ++l) out[k * mq + l] = lx[k] * inner[l];
    };
    AdaptiveOptions opt;
    opt.rel_tol = 10.0 * tol;
    opt.abs_tol = abs_inner * len;
    opt.max_intervals = 4000;
    return integrate_vector(f, mp * mq, bps, opt).value;
}

bool row_flag(const QuadratureGrid& g, const Angle& x, const RootPair& roots, const Panel& pn) {
    Angle lo = g.panel_lo(pn), hi = g.panel_hi(pn);
    double width = angle_diff(hi, lo);
    for (const Angle& r : {roots.r1, roots.r2}) {
        double d = std::max({angle_diff(lo, r), angle_diff(r, hi), 0.0});
        if (d < 2.0 * width) return true;
    }
    return in_corner_zone(g, x, pn) && panel_rule_suspect(g, x, pn);
}

}  // namespace

LProduct assemble_l_product(std::shared_ptr<const QuadratureGrid> grid, double tol) {
    const QuadratureGrid& g = *grid;
    const int n = g.size;
    const int np = static_cast<int>(g.panels.size());
    std::vector<int> panel_of(n);
    for (int p = 0; p < np; ++p)
        for (int i : g.panels[p].index) panel_of[i] = p;

    LProduct lp;
    lp.grid = grid;
    lp.v.resize(n);
    lp.a.resize(n, n);
    // rough[p * np + q]: the kernel is not resolved by the node rule on P x Q.
    std::vector<std::atomic<char>> rough(static_cast<std::size_t>(np) * np);
    for (auto& r : rough) r.store(0);

    parallel_for(static_cast<std::size_t>(n), [&](std::size_t ii) {
        const int i = static_cast<int>(ii);
        const Angle& x = g.points[i];
        RootPair roots = find_f_minus_roots(x);
        lp.v(i) = potential_v(x, std::min(1e-12, tol));
        for (int q = 0; q < np; ++q) {
            const Panel& pn = g.panels[q];
            if (row_flag(g, x, roots, pn)) {
                rough[static_cast<std::size_t>(panel_of[i]) * np + q].store(1);
                rough[static_cast<std::size_t>(q) * np + panel_of[i]].store(1);
            }
            for (int k = 0; k < pn.count; ++k) {
                int j = pn.index[k];
                lp.a(i, j) = g.weights[j] * plain_kernel(x, g.points[j]);
            }
        }
    });
    // Panel end points catch root curves that slip between the row nodes.
    parallel_for(static_cast<std::size_t>(np), [&](std::size_t pi) {
        const Panel& pp = g.panels[pi];
        for (const Angle& x : {g.panel_lo(pp), g.panel_hi(pp)}) {
            if (x.edge_distance() <= 0.0) continue;
            RootPair roots = find_f_minus_roots(x);
            for (int q = 0; q < np; ++q) {
                if (row_flag(g, x, roots, g.panels[q])) {
                    rough[pi * np + q].store(1);
                    rough[static_cast<std::size_t>(q) * np + pi].store(1);
                }
            }
        }
    });

    std::vector<std::pair<int, int>> pairs;
    for (int p = 0; p < np; ++p)
        for (int q = p; q < np; ++q)
            if (rough[static_cast<std::size_t>(p) * np + q].load()) pairs.emplace_back(p, q);

    parallel_for(pairs.size(), [&](std::size_t k) {
        const Panel& pp = g.panels[pairs[k].first];
        const Panel& pq = g.panels[pairs[k].second];
        double vmax = 0.0;
        for (int i : pp.index) vmax = std::max(vmax, lp.v(i));
        for (int j : pq.index) vmax = std::max(vmax, lp.v(j));
        std::vector<double> blk = galerkin_block(g, pp, pq, tol, 1e-16 * vmax);
        for (int r = 0; r < pp.count; ++r) {
            for (int c = 0; c < pq.count; ++c) {
                int i = pp.index[r], j = pq.index[c];
                double b = blk[static_cast<std::size_t>(r) * pq.count + c];
                if (&pp == &pq) b = 0.5 * (b + blk[static_cast<std::size_t>(c) * pq.count + r]);
                lp.a(i, j) = b / g.weights[i];
                lp.a(j, i) = b / g.weights[j];
            }
        }
    });
    lp.adaptive_cells = static_cast<int>(pairs.size());
    return lp;
}

}  // namespace fpu
