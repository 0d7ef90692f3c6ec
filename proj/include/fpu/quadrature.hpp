#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fpu {

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1], ascending
    std::vector<double> weights;
};

// m-point Gauss-Legendre rule by Newton iteration on P_m.
GaussRule gauss_legendre(int m);

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
    bool converged = false;
};

struct VecQuadResult {
    std::vector<double> value;
    double error = 0.0;  // max-norm error estimate
    int evaluations = 0;
    bool converged = false;
};

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_error(achieved) {}
    double achieved_error;
};

struct AdaptiveOptions {
    double abs_tol = 1e-14;
    double rel_tol = 1e-10;
    int max_intervals = 4000;
};

using ScalarFn = std::function<double(double)>;
// Writes dim values at t into out.
using VectorFn = std::function<void(double t, double* out)>;

// Globally adaptive Gauss-Kronrod (10/21) on [a, b]; breakpoints split the
// initial partition and are never evaluated.
QuadResult integrate(const ScalarFn& f, double a, double b, const AdaptiveOptions& opt = {});
QuadResult integrate(const ScalarFn& f, const std::vector<double>& breakpoints,
                     const AdaptiveOptions& opt = {});

VecQuadResult integrate_vector(const VectorFn& f, int dim, const std::vector<double>& breakpoints,
                               const AdaptiveOptions& opt = {});

// Same as integrate(), throwing QuadratureError when not converged.
double integrate_or_throw(const ScalarFn& f, const std::vector<double>& breakpoints,
                          const AdaptiveOptions& opt, const char* what);

// Geometric breakpoints lo, lo*r, lo*r^2, ... up to hi (inclusive ends).
std::vector<double> geometric_breakpoints(double lo, double hi, double ratio);

}  // namespace fpu
