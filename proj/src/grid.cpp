#include <cmath>
#include <stdexcept>

#include "fpu/discretize.hpp"
#include "fpu/quadrature.hpp"

namespace fpu {

namespace {
constexpr int kPanelNodes = 16;
}

Angle QuadratureGrid::panel_point(const Panel& pn, double t) const {
    double d = kPi * std::pow(t, grading_exponent);
    return pn.upper ? Angle::from_complement(d) : Angle::from_value(d);
}

double QuadratureGrid::panel_coordinate(const Panel& pn, const Angle& y) const {
    double d = pn.upper ? y.vc : y.v;
    return std::pow(std::max(d, 0.0) / kPi, 1.0 / grading_exponent);
}

Angle QuadratureGrid::panel_lo(const Panel& pn) const {
    return panel_point(pn, pn.upper ? pn.t_hi : pn.t_lo);
}

Angle QuadratureGrid::panel_hi(const Panel& pn) const {
    return panel_point(pn, pn.upper ? pn.t_lo : pn.t_hi);
}

QuadratureGrid build_grid(int n, double p) {
    if (n < 8 || n % 2 != 0) throw std::invalid_argument("build_grid: n must be even and at least 8");
    if (!(p >= 1.0)) throw std::invalid_argument("build_grid: grading exponent must be >= 1");
    QuadratureGrid g;
    g.size = n;
    g.grading_exponent = p;
    g.nodes.assign(n, 0.0);
    g.weights.assign(n, 0.0);
    g.points.assign(n, Angle{});

    const int half = n / 2;
    const int panels = (half + kPanelNodes - 1) / kPanelNodes;
    const int base = half / panels, extra = half % panels;

    std::vector<Panel> lower;
    int idx = 0;
    for (int k = 0; k < panels; ++k) {
        Panel pn;
        pn.count = base + (k < extra ? 1 : 0);
        pn.first = idx;
        pn.t_lo = static_cast<double>(k) / panels;
        pn.t_hi = static_cast<double>(k + 1) / panels;
        GaussRule gr = gauss_legendre(pn.count);
        double hw = 0.5 * (pn.t_hi - pn.t_lo), mid = 0.5 * (pn.t_hi + pn.t_lo);
        double wsum = 0.0;
        for (int j = 0; j < pn.count; ++j) {
            double t = mid + hw * gr.nodes[j];
            pn.t.push_back(t);
            pn.index.push_back(idx + j);
            double w = gr.weights[j] * hw * p * kPi * std::pow(t, p - 1.0);
            g.weights[idx + j] = w;
            g.points[idx + j] = g.panel_point(pn, t);
            wsum += w;
        }
        // Exact for integer p; pins the panel length for fractional p.
        double exact = kPi * (std::pow(pn.t_hi, p) - std::pow(pn.t_lo, p));
        for (int j = 0; j < pn.count; ++j) g.weights[idx + j] *= exact / wsum;
        for (int j = 0; j < pn.count; ++j) {
            double prod = 1.0;
            for (int l = 0; l < pn.count; ++l)
                if (l != j) prod *= (pn.t[j] - pn.t[l]);
            pn.bary.push_back(1.0 / prod);
        }
        idx += pn.count;
        lower.push_back(std::move(pn));
    }
    for (auto& pn : lower) {
        Panel up = pn;
        up.upper = true;
        for (int j = 0; j < up.count; ++j) {
            int i = pn.index[j];
            int m = n - 1 - i;
            up.index[j] = m;
            g.weights[m] = g.weights[i];
            g.points[m] = g.points[i].reflected();
        }
        up.first = n - pn.first - pn.count;
        g.panels.push_back(std::move(pn));
        g.panels.push_back(std::move(up));
    }
    for (int i = 0; i < n; ++i) g.nodes[i] = g.points[i].v;
    return g;
}

}  // namespace fpu
