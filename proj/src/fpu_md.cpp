#include "fpu/fpu_md.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "fpu/parallel.hpp"

namespace fpu {

namespace {

int ratio_or_throw(double a, double b, const char* what) {
    double r = a / b;
    long long k = std::llround(r);
    if (k < 1 || std::abs(r - static_cast<double>(k)) > 1e-9 * r)
        throw std::invalid_argument(std::string("MDConfig: ") + what);
    return static_cast<int>(k);
}

}  // namespace

void MDConfig::validate() const {
    if (n < 4) throw std::invalid_argument("MDConfig: n must be at least 4");
    if (!(beta >= 0.0)) throw std::invalid_argument("MDConfig: beta must be >= 0");
    if (!(temperature > 0.0)) throw std::invalid_argument("MDConfig: temperature must be positive");
    if (!(dt > 0.0 && dt <= 0.2)) throw std::invalid_argument("MDConfig: dt must lie in (0, 0.2]");
    if (!(t_max > 0.0)) throw std::invalid_argument("MDConfig: t_max must be positive");
    if (n_traj < 2) throw std::invalid_argument("MDConfig: n_traj must be at least 2");
    ratio_or_throw(sample_dt, dt, "sample_dt must be a multiple of dt");
    ratio_or_throw(origin_dt, sample_dt, "origin_dt must be a multiple of sample_dt");
    ratio_or_throw(t_max, origin_dt, "t_max must be a multiple of origin_dt");
}

int MDConfig::steps_per_sample() const { return ratio_or_throw(sample_dt, dt, "sample_dt must be a multiple of dt"); }

double potential_u(double r, double beta) {
    double r2 = r * r;
    return 0.125 * r2 + 0.25 * beta * r2 * r2;
}

double potential_u_prime(double r, double beta) { return 0.25 * r + beta * r * r * r; }

std::vector<double> sample_stretches(int count, double beta, double temperature, Philox4x32& rng, SampleStats* stats) {
    std::normal_distribution<double> proposal(0.0, 2.0 * std::sqrt(temperature));
    std::vector<double> r(count);
    long long tried = 0, kept = 0;
    for (int i = 0; i < count; ++i) {
        // exp(-U/T) / exp(-r^2 / 8T) = exp(-beta r^4 / 4T) <= 1.
        for (;;) {
            double x = proposal(rng);
            ++tried;
            if (tried > 1000 && kept < tried / 1000)
                throw std::runtime_error("sample_equilibrium: rejection sampler acceptance below 1e-3");
            double x2 = x * x;
            if (rng.uniform() <= std::exp(-beta * x2 * x2 / (4.0 * temperature))) {
                r[i] = x;
                ++kept;
                break;
            }
        }
    }
    if (stats) {
        stats->proposals += tried;
        stats->accepted += kept;
    }
    return r;
}

ChainState sample_equilibrium(const MDConfig& cfg, Philox4x32& rng, SampleStats* stats) {
    const int n = cfg.n;
    std::normal_distribution<double> momentum(0.0, std::sqrt(cfg.temperature));
    ChainState s;
    s.p.resize(n);
    for (double& p : s.p) p = momentum(rng);
    double pm = 0.0;
    for (double p : s.p) pm += p;
    pm /= n;
    for (double& p : s.p) p -= pm;

    std::vector<double> r = sample_stretches(n, cfg.beta, cfg.temperature, rng, stats);
    double rm = 0.0;
    for (double x : r) rm += x;
    rm /= n;
    s.q.resize(n);
    s.q[0] = 0.0;
    for (int i = 1; i < n; ++i) s.q[i] = s.q[i - 1] + (r[i - 1] - rm);
    return s;
}

void forces(const ChainState& s, double beta, std::vector<double>& f) {
    const int n = s.size();
    f.resize(n);
    // Bond i: r_i = q_{i+1} - q_i; F_i = U'(r_i) - U'(r_{i-1}).
    double prev = potential_u_prime(s.q[0] - s.q[n - 1], beta);
    for (int i = 0; i < n - 1; ++i) {
        double cur = potential_u_prime(s.q[i + 1] - s.q[i], beta);
        f[i] = cur - prev;
        prev = cur;
    }
    f[n - 1] = potential_u_prime(s.q[0] - s.q[n - 1], beta) - prev;
}

VerletIntegrator::VerletIntegrator(ChainState& s, const MDConfig& cfg) : s_(s), beta_(cfg.beta), dt_(cfg.dt) {
    forces(s_, beta_, f_);
}

void VerletIntegrator::step() {
    const int n = s_.size();
    const double h = 0.5 * dt_;
    for (int i = 0; i < n; ++i) {
        s_.p[i] += h * f_[i];
        s_.q[i] += dt_ * s_.p[i];
    }
    forces(s_, beta_, f_);
    for (int i = 0; i < n; ++i) s_.p[i] += h * f_[i];
}

void VerletIntegrator::run(long long steps) {
    for (long long k = 0; k < steps; ++k) step();
}

void verlet_step(ChainState& s, const MDConfig& cfg) {
    VerletIntegrator v(s, cfg);
    v.step();
}

double total_energy(const ChainState& s, double beta) {
    const int n = s.size();
    double h = 0.0;
    for (int i = 0; i < n; ++i) {
        int j = (i + 1) % n;
        h += 0.5 * s.p[i] * s.p[i] + potential_u(s.q[j] - s.q[i], beta);
    }
    return h;
}

double total_momentum(const ChainState& s) {
    double m = 0.0;
    for (double p : s.p) m += p;
    return m;
}

double modified_energy(const ChainState& s, double beta, double dt) {
    const int n = s.size();
    std::vector<double> f;
    forces(s, beta, f);
    double pvp = 0.0, ff = 0.0;
    for (int i = 0; i < n; ++i) {
        int j = (i + 1) % n;
        double r = s.q[j] - s.q[i];
        double dp = s.p[j] - s.p[i];
        pvp += (0.25 + 3.0 * beta * r * r) * dp * dp;
        ff += f[i] * f[i];
    }
    return total_energy(s, beta) + dt * dt * (pvp / 12.0 - ff / 24.0);
}

EnergyDrift measure_energy_drift(const MDConfig& cfg, long long steps, int probe_every) {
    if (steps < 1 || probe_every < 1) throw std::invalid_argument("measure_energy_drift: steps and probe_every must be positive");
    Philox4x32 rng(cfg.seed, 0);
    ChainState s = sample_equilibrium(cfg, rng);
    const double h0 = total_energy(s, cfg.beta);
    const double m0 = modified_energy(s, cfg.beta, cfg.dt);
    EnergyDrift d;
    VerletIntegrator v(s, cfg);
    for (long long k = 1; k <= steps; ++k) {
        v.step();
        if (k % probe_every == 0 || k == steps) {
            d.max_raw = std::max(d.max_raw, std::abs(total_energy(s, cfg.beta) - h0) / h0);
            d.max_modified = std::max(d.max_modified, std::abs(modified_energy(s, cfg.beta, cfg.dt) - m0) / m0);
        }
    }
    d.final_raw = std::abs(total_energy(s, cfg.beta) - h0) / h0;
    d.final_modified = std::abs(modified_energy(s, cfg.beta, cfg.dt) - m0) / m0;
    d.momentum = std::abs(total_momentum(s));
    return d;
}

double local_energy(const ChainState& s, int i, double beta) {
    const int n = s.size();
    i = ((i % n) + n) % n;
    int ip = (i + 1) % n, im = (i + n - 1) % n;
    return 0.5 * s.p[i] * s.p[i] + 0.5 * (potential_u(s.q[ip] - s.q[i], beta) + potential_u(s.q[i] - s.q[im], beta));
}

void local_energies(const ChainState& s, double beta, std::vector<double>& e) {
    const int n = s.size();
    e.resize(n);
    std::vector<double> u(n);
    for (int i = 0; i < n; ++i) u[i] = potential_u(s.q[(i + 1) % n] - s.q[i], beta);
    for (int i = 0; i < n; ++i) e[i] = 0.5 * s.p[i] * s.p[i] + 0.5 * (u[i] + u[(i + n - 1) % n]);
}

double bond_current(const ChainState& s, int i, double beta) {
    const int n = s.size();
    i = ((i % n) + n) % n;
    int ip = (i + 1) % n;
    return -0.5 * (s.p[ip] + s.p[i]) * potential_u_prime(s.q[ip] - s.q[i], beta);
}

double total_current(const ChainState& s, double beta) {
    const int n = s.size();
    double j = 0.0;
    for (int i = 0; i < n; ++i) {
        int ip = (i + 1) == n ? 0 : i + 1;
        j -= 0.5 * (s.p[ip] + s.p[i]) * potential_u_prime(s.q[ip] - s.q[i], beta);
    }
    return j;
}

namespace {

struct TrajectoryResult {
    std::vector<double> c;      // (1/N) J(s + t) J(s) averaged over origins s
    double mean_current = 0.0;  // per bond, averaged over the run
    std::vector<std::vector<double>> products;  // (1/N) sum_k e_{k+i}(t) e_k(0)
    double energy_per_site = 0.0;
    std::vector<double> sample_energy_per_site;  // e-bar at each energy sample
    SampleStats stats;
};

TrajectoryResult run_trajectory(const MDConfig& cfg, int traj, const std::vector<long long>& energy_samples) {
    Philox4x32 rng(cfg.seed, static_cast<std::uint64_t>(traj));
    TrajectoryResult out;
    ChainState s = sample_equilibrium(cfg, rng, &out.stats);
    const int n = cfg.n;
    const int sps = cfg.steps_per_sample();
    const long long lags = std::llround(cfg.t_max / cfg.sample_dt);  // lag index range [0, lags]
    const long long origin_stride = std::llround(cfg.origin_dt / cfg.sample_dt);
    const long long samples = 2 * lags + 1;

    std::vector<double> e0, e;
    if (!energy_samples.empty()) local_energies(s, cfg.beta, e0);
    std::size_t next_energy = 0;
    auto record_energy = [&](long long sample) {
        while (next_energy < energy_samples.size() && energy_samples[next_energy] == sample) {
            local_energies(s, cfg.beta, e);
            double ebar = 0.0;
            for (double x : e) ebar += x;
            out.sample_energy_per_site.push_back(ebar / n);
            std::vector<double> prod(n, 0.0);
            for (int i = 0; i < n; ++i) {
                double acc = 0.0;
                for (int k = 0; k < n; ++k) {
                    int ki = k + i;
                    if (ki >= n) ki -= n;
                    acc += e[ki] * e0[k];
                }
                prod[i] = acc / n;
            }
            out.products.push_back(std::move(prod));
            ++next_energy;
        }
    };

    std::vector<double> j(samples);
    VerletIntegrator v(s, cfg);
    j[0] = total_current(s, cfg.beta);
    record_energy(0);
    for (long long k = 1; k < samples; ++k) {
        v.run(sps);
        j[k] = total_current(s, cfg.beta);
        record_energy(k);
    }
    if (!energy_samples.empty()) {
        double sum = 0.0;
        for (double x : e0) sum += x;
        out.energy_per_site = sum / n;
    }
    double jsum = 0.0;
    for (double x : j) jsum += x;
    out.mean_current = jsum / (static_cast<double>(samples) * n);

    out.c.assign(lags + 1, 0.0);
    long long origins = 0;
    for (long long o = 0; o <= lags; o += origin_stride) {
        for (long long l = 0; l <= lags; ++l) out.c[l] += j[o + l] * j[o];
        ++origins;
    }
    for (double& c : out.c) c /= static_cast<double>(origins) * n;
    return out;
}

void mean_and_se(const std::vector<double>& x, double& mean, double& se) {
    const double n = static_cast<double>(x.size());
    mean = 0.0;
    for (double v : x) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    se = std::sqrt(ss / (n - 1.0) / n);
}

std::vector<TrajectoryResult> run_ensemble(const MDConfig& cfg, const std::vector<long long>& energy_samples) {
    cfg.validate();
    std::vector<TrajectoryResult> runs(cfg.n_traj);
    parallel_for(static_cast<std::size_t>(cfg.n_traj),
                 [&](std::size_t t) { runs[t] = run_trajectory(cfg, static_cast<int>(t), energy_samples); });
    return runs;
}

double acceptance_of(const std::vector<TrajectoryResult>& runs) {
    SampleStats total;
    for (const auto& r : runs) {
        total.proposals += r.stats.proposals;
        total.accepted += r.stats.accepted;
    }
    return total.acceptance();
}

CurrentCorrelation summarize_current(const MDConfig& cfg, std::vector<TrajectoryResult>& runs) {
    CurrentCorrelation cc;
    const std::size_t lags = runs.front().c.size();
    cc.c.kind = SeriesKind::md_estimate;
    std::vector<double> col(runs.size());
    for (std::size_t l = 0; l < lags; ++l) {
        for (std::size_t t = 0; t < runs.size(); ++t) col[t] = runs[t].c[l];
        double m, se;
        mean_and_se(col, m, se);
        cc.c.abscissa.push_back(static_cast<double>(l) * cfg.sample_dt);
        cc.c.values.push_back(m);
        cc.c.errors.push_back(se);
    }
    for (std::size_t t = 0; t < runs.size(); ++t) col[t] = runs[t].mean_current;
    mean_and_se(col, cc.mean_current, cc.mean_current_se);
    cc.acceptance = acceptance_of(runs);
    for (auto& r : runs) cc.per_trajectory.push_back(std::move(r.c));
    return cc;
}

}  // namespace

CurrentCorrelation current_autocorrelation(const MDConfig& cfg) {
    std::vector<TrajectoryResult> runs = run_ensemble(cfg, {});
    return summarize_current(cfg, runs);
}

EnergySpread energy_spread(const MDConfig& cfg) {
    cfg.validate();
    const long long lags = std::llround(cfg.t_max / cfg.sample_dt);
    constexpr int kDirectTimes = 21;
    std::vector<long long> energy_samples;
    for (int k = 0; k < kDirectTimes; ++k) energy_samples.push_back(lags * k / (kDirectTimes - 1));
    energy_samples.erase(std::unique(energy_samples.begin(), energy_samples.end()), energy_samples.end());

    std::vector<TrajectoryResult> runs = run_ensemble(cfg, energy_samples);
    const int n = cfg.n;
    const std::size_t nt = runs.size();
    EnergySpread es;
    es.acceptance = acceptance_of(runs);
    es.sound_crossing_warning = cfg.t_max > static_cast<double>(n);

    double ebar = 0.0;
    for (const auto& r : runs) ebar += r.energy_per_site;
    ebar /= static_cast<double>(nt);
    const double e2 = ebar * ebar;
    auto cov = [&](std::size_t traj, std::size_t sample, int i) {
        int idx = ((i % n) + n) % n;
        return runs[traj].products[sample][idx] - e2;
    };
    auto ensemble_cov = [&](std::size_t sample, int i) {
        double m = 0.0;
        for (std::size_t t = 0; t < nt; ++t) m += cov(t, sample, i);
        return m / static_cast<double>(nt);
    };

    // Energy correlations of the Gibbs state vanish beyond neighbouring sites.
    for (int i = -4; i <= 4; ++i) es.chi += ensemble_cov(0, i);
    for (int i = -4; i <= 4; ++i) {
        double s = ensemble_cov(0, i) / es.chi;
        es.s0.push_back(s);
        es.d0 += static_cast<double>(i) * i * s;
    }

    es.d_direct.kind = SeriesKind::md_estimate;
    std::vector<double> col(nt);
    for (std::size_t k = 0; k < energy_samples.size(); ++k) {
        // Subtracting each trajectory's own e-bar(t) e-bar(0) removes the
        // total-energy fluctuation, which sum i^2 would amplify by ~N^3. In
        // expectation that subtraction lowers every covariance by chi / N, so
        // 1/N is added back per site.
        for (std::size_t t = 0; t < nt; ++t) {
            const double shift = runs[t].sample_energy_per_site[k] * runs[t].sample_energy_per_site[0];
            double d = 0.0;
            for (int i = -n / 2; i < n / 2; ++i) {
                int idx = ((i % n) + n) % n;
                double s = (runs[t].products[k][idx] - shift) / es.chi + 1.0 / n;
                d += static_cast<double>(i) * i * s;
            }
            col[t] = d;
        }
        double m, se;
        mean_and_se(col, m, se);
        es.d_direct.abscissa.push_back(static_cast<double>(energy_samples[k]) * cfg.sample_dt);
        es.d_direct.values.push_back(m);
        es.d_direct.errors.push_back(se);
    }
    const std::size_t last = energy_samples.size() - 1;
    for (int i = 1; i <= 16 && i < n / 2; ++i) {
        for (std::size_t t = 0; t < nt; ++t) col[t] = (cov(t, last, i) - cov(t, last, -i)) / es.chi;
        double m, se;
        mean_and_se(col, m, se);
        es.s_sym_t.push_back(m);
        es.s_sym_err.push_back(se);
    }

    // D(t) = D(0) + (2/chi) int_0^t (t - s) C(s) ds, trapezoid on the sample grid.
    const double h = cfg.sample_dt;
    std::vector<std::vector<double>> d(nt, std::vector<double>(lags + 1));
    for (std::size_t t = 0; t < nt; ++t) {
        const std::vector<double>& c = runs[t].c;
        // With I0(t) = int_0^t C and I1(t) = int_0^t s C: D = D0 + (2/chi)(t I0 - I1).
        double i0 = 0.0, i1 = 0.0;
        d[t][0] = es.d0;
        for (long long l = 1; l <= lags; ++l) {
            double s0 = (l - 1) * h, s1 = l * h;
            i0 += 0.5 * h * (c[l - 1] + c[l]);
            i1 += 0.5 * h * (s0 * c[l - 1] + s1 * c[l]);
            d[t][l] = es.d0 + 2.0 / es.chi * (s1 * i0 - i1);
        }
    }
    es.d_integral.kind = SeriesKind::md_estimate;
    for (long long l = 0; l <= lags; ++l) {
        for (std::size_t t = 0; t < nt; ++t) col[t] = d[t][l];
        double m, se;
        mean_and_se(col, m, se);
        es.d_integral.abscissa.push_back(static_cast<double>(l) * h);
        es.d_integral.values.push_back(m);
        es.d_integral.errors.push_back(se);
    }
    return es;
}

}  // namespace fpu
