#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "fpu/discretize.hpp"

namespace fpu {

enum class SeriesKind { resolvent_scan, correlation_decay, relaxation_time, md_estimate };

std::string to_string(SeriesKind kind);

struct CorrelationSeries {
    std::vector<double> abscissa;  // ascending, positive (t = 0 allowed for decays)
    std::vector<double> values;
    std::vector<double> errors;    // zero unless kind == md_estimate
    SeriesKind kind = SeriesKind::resolvent_scan;

    // Throws std::logic_error when an invariant of the kind is violated.
    void validate() const;
};

struct ExponentFit {
    double exponent = 0.0;
    double amplitude = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    double residual = 0.0;  // max |log deviation|
    int points = 0;
};

// Spectral measure of the discretized omega' on a decomposition of the
// antisymmetric (or full) block of L~: weights |<v_k, g>|^2 at mu_k.
struct SpectralMeasure {
    Eigen::VectorXd mu;
    Eigen::VectorXd weight;
};

SpectralMeasure omega_prime_measure(const SpectralDecomposition& sd);

double resolvent_r(const SpectralDecomposition& sd, double lambda);
double resolvent_r(const SpectralMeasure& m, double lambda);
double correlation_c(const SpectralDecomposition& sd, double t);
double correlation_c(const SpectralMeasure& m, double t);

// Direct solve of (lambda + M) u = g, as an independent route to R.
double resolvent_by_solve(const SymmetricOperator& op, double lambda);

// int_I omega'(x)^2 exp(-t W(x)) dx.
double relaxation_time_c(double t, double tol = 1e-9);

double c0_constant(double w0, double tol = 1e-13);
double c0_closed_form(double w0);
// Lanczos (g = 7, 9 terms) with reflection below 1/2.
double gamma_lanczos(double x);

struct ExpansionTerms {
    double term1 = 0.0;  // <w', (l + W)^-1 w'>
    double term2 = 0.0;  // <w', (l + W)^-1 A (l + W)^-1 w'>
    double term3 = 0.0;  // <phi, (l + L~)^-1 phi>, phi = A (l + W)^-1 w'
};

ExpansionTerms resolvent_expansion_terms(const SpectralDecomposition& sd, double lambda);

ExponentFit fit_power_law(const CorrelationSeries& series, double lo, double hi);

// (T^2 / 2pi) C((12 T)^2 |t| / pi).
double kinetic_prediction(const SpectralDecomposition& sd, double t, double temperature);

struct ZeroModeReport {
    double lambda0 = 0.0;
    double lambda1 = 0.0;
    double lambda2 = 0.0;            // effective gap
    double angles_deg[2] = {0.0, 0.0};  // principal angles to span{V^1/2, w V^1/2}
    int below_threshold = 0;         // eigenvalues < 0.02
};

// sd: decomposition of the symmetric parity block of 1 - B.
ZeroModeReport zero_mode_check(const SpectralDecomposition& sd);

// Smallest W on the block's nodes.
double min_w(const SpectralDecomposition& sd);
// Throws std::domain_error unless min W <= lambda_lo / 10.
void require_resolvent_window(const SpectralDecomposition& sd, double lambda_lo);
// Throws std::domain_error unless min W <= 1 / (10 t_hi).
void require_correlation_window(const SpectralDecomposition& sd, double t_hi);

std::vector<double> log_spaced(double lo, double hi, int points);
CorrelationSeries resolvent_scan(const SpectralDecomposition& sd, const std::vector<double>& lambdas);
CorrelationSeries correlation_scan(const SpectralDecomposition& sd, const std::vector<double>& times);
CorrelationSeries relaxation_time_scan(const std::vector<double>& times, double tol = 1e-9);

}  // namespace fpu
