#pragma once

#include <cstdint>
#include <vector>

#include "fpu/rng.hpp"
#include "fpu/spectral.hpp"

namespace fpu {

struct MDConfig {
    int n = 1024;
    double beta = 0.1;
    double temperature = 0.5;
    double dt = 0.05;
    double t_max = 500.0;
    int n_traj = 200;
    std::uint64_t seed = 1;
    // Correlation sampling: J recorded every sample_dt, time origins every
    // origin_dt over a run of length 2 t_max.
    double sample_dt = 0.25;
    double origin_dt = 1.0;

    // Throws std::invalid_argument naming the offending field.
    void validate() const;
    int steps_per_sample() const;
    bool operator==(const MDConfig&) const = default;
};

// Periodic chain, bond i joins sites i and i+1 (mod n).
struct ChainState {
    std::vector<double> q;
    std::vector<double> p;
    int size() const { return static_cast<int>(q.size()); }
};

double potential_u(double r, double beta);
double potential_u_prime(double r, double beta);

struct SampleStats {
    long long proposals = 0;
    long long accepted = 0;
    double acceptance() const { return proposals ? static_cast<double>(accepted) / proposals : 1.0; }
};

// Gibbs state: Gaussian momenta (variance T), stretches ~ exp(-U/T) by
// rejection from N(0, 4T); both mean-subtracted, q_0 = 0.
ChainState sample_equilibrium(const MDConfig& cfg, Philox4x32& rng, SampleStats* stats = nullptr);
// Stretch draws alone (no mean subtraction), for sampler tests.
std::vector<double> sample_stretches(int count, double beta, double temperature, Philox4x32& rng,
                                     SampleStats* stats = nullptr);

// Force F_i = U'(q_{i+1} - q_i) - U'(q_i - q_{i-1}).
void forces(const ChainState& s, double beta, std::vector<double>& f);
void verlet_step(ChainState& s, const MDConfig& cfg);

// Velocity Verlet with a force cache carried between steps.
class VerletIntegrator {
public:
    VerletIntegrator(ChainState& s, const MDConfig& cfg);
    void step();
    void run(long long steps);

private:
    ChainState& s_;
    double beta_, dt_;
    std::vector<double> f_;
};

double total_energy(const ChainState& s, double beta);
double total_momentum(const ChainState& s);
// Verlet's modified energy H + dt^2 (p.U''p / 12 - |F|^2 / 24). The O(dt^2)
// bounded oscillation of H cancels, leaving the O(dt^4) remainder and any
// secular drift.
double modified_energy(const ChainState& s, double beta, double dt);

struct EnergyDrift {
    double final_raw = 0.0;  // |H(end) - H(0)| / H(0)
    double max_raw = 0.0;
    double final_modified = 0.0;
    double max_modified = 0.0;
    double momentum = 0.0;  // |P(end)|, zero initially
};

// One Gibbs-sampled chain, run for `steps` Verlet steps; maxima over every
// probe_every-th step.
EnergyDrift measure_energy_drift(const MDConfig& cfg, long long steps, int probe_every = 100);
// e_i = p_i^2 / 2 + (U(q_{i+1} - q_i) + U(q_i - q_{i-1})) / 2.
double local_energy(const ChainState& s, int i, double beta);
void local_energies(const ChainState& s, double beta, std::vector<double>& e);
// j_{i,i+1} = -(p_{i+1} + p_i) U'(q_{i+1} - q_i) / 2.
double bond_current(const ChainState& s, int i, double beta);
double total_current(const ChainState& s, double beta);

struct CurrentCorrelation {
    CorrelationSeries c;      // (1/N) <J(t) J(0)> with standard errors
    double mean_current = 0.0;  // per-bond <j>
    double mean_current_se = 0.0;
    double acceptance = 1.0;
    // Per-trajectory estimates, kept for derived quantities.
    std::vector<std::vector<double>> per_trajectory;
};

CurrentCorrelation current_autocorrelation(const MDConfig& cfg);

struct EnergySpread {
    CorrelationSeries d_integral;  // D(0) + (2/chi) int_0^t (t - s) C(s) ds
    CorrelationSeries d_direct;    // sum_i i^2 S(i, t) from energy covariances
    double chi = 0.0;              // sum_{|i| <= 4} <de_i de_0>
    double d0 = 0.0;
    std::vector<double> s0;        // S(i, 0), i = -4..4
    std::vector<double> s_sym_t;   // S(i, t_max) - S(-i, t_max), i = 1..16
    std::vector<double> s_sym_err;
    double acceptance = 1.0;
    bool sound_crossing_warning = false;
};

EnergySpread energy_spread(const MDConfig& cfg);

}  // namespace fpu
