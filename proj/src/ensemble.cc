// Copyright 2026 The ddmem Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ddmem/ensemble.h"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ddmem/quadrature.h"

namespace ddmem {

namespace {

constexpr int D = 10;  // nine entries of g, then the flip probability
constexpr std::size_t kChunk = 64;
constexpr std::size_t kJackknifeBlocks = 20;

using Sample = std::array<double, D>;

Sample sample_of(const Su2 &u) {
    const HeisenbergMatrix g = u.heisenberg();
    Sample x;
    for (int q = 0; q < 3; ++q)
        for (int p = 0; p < 3; ++p) x[3 * q + p] = g.g[q][p];
    x[9] = u.flip_probability();
    return x;
}

// Running mean and co-moment matrix (Welford), merged with the pairwise formula.
struct Moments {
    double n = 0;
    Sample mean{};
    std::array<double, D * D> m2{};

    void add(const Sample &x) {
        n += 1;
        Sample d;
        for (int i = 0; i < D; ++i) {
            d[i] = x[i] - mean[i];
            mean[i] += d[i] / n;
        }
        for (int i = 0; i < D; ++i)
            for (int j = 0; j < D; ++j) m2[i * D + j] += d[i] * (x[j] - mean[j]);
    }

    void add_weighted(const Sample &x, double w) {
        // quadrature path: plain weighted sums kept in mean (weights sum to one), no spread
        for (int i = 0; i < D; ++i) mean[i] += w * x[i];
        n += w;
    }

    static Moments merge(const Moments &a, const Moments &b) {
        if (a.n == 0) return b;
        if (b.n == 0) return a;
        Moments r;
        r.n = a.n + b.n;
        Sample d;
        for (int i = 0; i < D; ++i) {
            d[i] = b.mean[i] - a.mean[i];
            r.mean[i] = a.mean[i] + d[i] * b.n / r.n;
        }
        const double f = a.n * b.n / r.n;
        for (int i = 0; i < D; ++i)
            for (int j = 0; j < D; ++j) r.m2[i * D + j] = a.m2[i * D + j] + b.m2[i * D + j] + d[i] * d[j] * f;
        return r;
    }

    double cov(int i, int j) const { return n > 1 ? m2[i * D + j] / (n - 1) : 0.0; }
};

Moments pairwise_merge(const std::vector<Moments> &v, std::size_t lo, std::size_t hi) {
    if (hi - lo == 0) return {};
    if (hi - lo == 1) return v[lo];
    const std::size_t mid = lo + (hi - lo) / 2;
    return Moments::merge(pairwise_merge(v, lo, mid), pairwise_merge(v, mid, hi));
}

double linear_se(const Moments &mo, const Sample &grad) {
    if (mo.n <= 1) return 0.0;
    double v = 0;
    for (int i = 0; i < D; ++i) {
        if (grad[i] == 0) continue;
        for (int j = 0; j < D; ++j) v += grad[i] * grad[j] * mo.cov(i, j);
    }
    return std::sqrt(std::max(v, 0.0) / mo.n);
}

struct Derived {
    HeisenbergMatrix G;
    double flip, rho, signal, artificial;
};

Derived derive(const Sample &mean, double N) {
    Derived d;
    for (int q = 0; q < 3; ++q)
        for (int p = 0; p < 3; ++p) d.G.g[q][p] = mean[3 * q + p];
    d.flip = mean[9];
    d.rho = population_from_flip(d.flip, N);
    const Coherence c = coherence(d.G, N);
    d.signal = c.signal;
    d.artificial = c.artificial;
    return d;
}

EnsembleResult finish(const Moments &mo, std::int64_t m, const EnsembleConfig &cfg, bool stochastic) {
    EnsembleResult r;
    r.m = m;
    r.t = static_cast<double>(m) * cfg.spec.L() * cfg.spec.tau;
    const Derived d = derive(mo.mean, cfg.N);
    r.G = d.G;
    r.flip = d.flip;
    r.rho_ss = d.rho;
    r.eta_coh = d.signal;
    r.eta_artificial = d.artificial;
    const RatioResult rr = ratio(d.signal, d.rho);
    r.R = rr.R;
    if (stochastic) {
        for (int q = 0; q < 3; ++q)
            for (int p = 0; p < 3; ++p) r.G_err.g[q][p] = std::sqrt(std::max(mo.cov(3 * q + p, 3 * q + p), 0.0) / mo.n);
        r.flip_err = std::sqrt(std::max(mo.cov(9, 9), 0.0) / mo.n);
        const double scale = population_from_flip(1.0, cfg.N);
        r.rho_ss_err = scale * r.flip_err;
        Sample gs{};
        gs[0] = d.G.g[0][0];
        gs[1] = d.G.g[0][1];
        gs[3] = d.G.g[1][0];
        gs[4] = d.G.g[1][1];
        r.eta_coh_err = linear_se(mo, gs);
        const double kappa = artificial_coherence_coefficient(cfg.N);
        if (std::isfinite(kappa)) {
            // under a vanishing true value A/kappa is a quadratic form in a Gaussian pair:
            // mean tr(S), variance 2 tr(S^2), S the covariance of (G_xz, G_yz)
            const double s22 = mo.cov(2, 2) / mo.n, s55 = mo.cov(5, 5) / mo.n, s25 = mo.cov(2, 5) / mo.n;
            const double bias = kappa * (s22 + s55);
            const double null_sd = kappa * std::sqrt(2 * (s22 * s22 + s55 * s55 + 2 * s25 * s25));
            const double x = d.G.g[0][2], y = d.G.g[1][2];
            const double lin = 2 * kappa * std::sqrt(std::max(x * x * s22 + y * y * s55 + 2 * x * y * s25, 0.0));
            r.eta_artificial_err = std::hypot(lin, null_sd);
            r.artificial_noise_limited = r.eta_artificial <= bias + 3 * null_sd;
        }
        if (d.rho > 0 && std::isfinite(r.R)) {
            Sample gr{};
            for (int i = 0; i < D; ++i) gr[i] = gs[i] / d.rho;
            gr[9] = -d.signal * scale / (d.rho * d.rho);
            r.R_err = linear_se(mo, gr);
        }
        r.noise_limited = ratio(d.signal, d.rho, r.rho_ss_err).noise_limited;
    }
    r.eta_below_threshold = r.eta_coh < cfg.eta_threshold;
    if (cfg.broadening.shape == Shape::Lorentzian) {
        // the rephasing envelope of a Lorentzian line decays as exp(-gamma tau)
        const double f = std::exp(-cfg.broadening.gamma * cfg.spec.tau);
        r.guard_value = f == 0 ? 0.0 : cfg.N * f;
        r.guard = cfg.N > 1 && r.guard_value > cfg.guard_threshold ? GuardStatus::Warn : GuardStatus::Ok;
    } else {
        r.guard_value = collective_emission_value(cfg.N, cfg.broadening.gamma, cfg.spec.tau);
        r.guard = collective_emission_guard(cfg.N, cfg.broadening.gamma, cfg.spec.tau, cfg.guard_threshold);
    }
    if (r.guard == GuardStatus::Warn) {
        std::ostringstream os;
        os << "collective emission guard: " << r.guard_value << " > " << cfg.guard_threshold;
        r.warnings.push_back(os.str());
    }
    return r;
}

void mark_crossings(std::vector<EnsembleResult> &rows) {
    bool seen = false;
    for (auto &r : rows) {
        if (r.eta_below_threshold && !seen) {
            r.eta_crossing = true;
            seen = true;
        }
    }
}

// Runs body(chunk) for chunk in [0, n_chunks) on the given number of threads.
template <class F>
void parallel_chunks(std::size_t n_chunks, unsigned workers, F &&body) {
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n_chunks, 1))));
    if (workers == 1) {
        for (std::size_t c = 0; c < n_chunks; ++c) body(c);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            try {
                for (std::size_t c = next++; c < n_chunks && !failed; c = next++) body(c);
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
            }
        });
    }
    for (auto &t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

// Time-ordered propagation with the OU offset; calls record(rep, T) after every repetition.
template <class F>
void evolve_ou(SpinState &spin, const SequenceSpec &spec, double eps, std::int64_t m_max, const OuOptions &ou,
               F &&record) {
    const int L = spec.L();
    std::vector<Su2> pulses(L);
    for (int i = 0; i < L; ++i) pulses[i] = pi_pulse_su2(spec.phases[i], pulse_error(spec, i, eps));
    const int sub = std::max(1, ou.substeps);
    const double dt = 0.5 * spec.tau / sub;
    auto half_gap = [&](double &phase) {
        for (int s = 0; s < sub; ++s) {
            if (ou.model == OuPhaseModel::PiecewiseConstant) {
                phase += (spin.delta0 + spin.delta_t) * dt;
                spin.delta_t = ou_step(spin.delta_t, dt, ou.params, spin.rng);
            } else {
                const OuIntegratedStep st = ou_step_integrated(spin.delta_t, dt, ou.params, spin.rng);
                phase += spin.delta0 * dt + st.phase;
                spin.delta_t = st.delta;
            }
        }
    };
    auto apply_phase = [](Su2 &T, double phase) {
        const cplx e = std::polar(1.0, -0.5 * phase);
        T.a *= e;
        T.b *= std::conj(e);
    };
    Su2 T;
    for (std::int64_t rep = 1; rep <= m_max; ++rep) {
        for (int i = 0; i < L; ++i) {
            double phase = 0;
            half_gap(phase);
            apply_phase(T, phase);
            T = pulses[i] * T;
            phase = 0;
            half_gap(phase);
            apply_phase(T, phase);
        }
        if ((rep & 1023) == 0) T = T.normalized();
        record(rep, T);
    }
}

}  // namespace

void EnsembleConfig::validate() const {
    if (n_sample < 100) throw std::invalid_argument("n_sample must be at least 100");
    if (!(N >= 1)) throw std::invalid_argument("N must be >= 1");
    if (!std::isfinite(eps)) throw std::invalid_argument("eps must be finite");
    if (m_checkpoints.empty()) throw std::invalid_argument("need at least one checkpoint");
    for (std::size_t i = 0; i < m_checkpoints.size(); ++i) {
        if (m_checkpoints[i] < 1) throw std::invalid_argument("checkpoints must be >= 1");
        if (i > 0 && m_checkpoints[i] <= m_checkpoints[i - 1])
            throw std::invalid_argument("checkpoints must be strictly increasing");
    }
    if (ou_substeps < 1) throw std::invalid_argument("ou_substeps must be >= 1");
    spec.validate();
    broadening.validate();
}

double population_from_flip(double flip, double N) {
    if (std::isinf(N)) return flip;
    return (1 - 2 / N) * flip;
}

double population(const HeisenbergMatrix &G, double N) { return population_from_flip(0.5 * (1 - G.g[2][2]), N); }

double artificial_coherence_coefficient(double N) {
    if (std::isinf(N)) return std::numeric_limits<double>::infinity();
    if (N <= 1) return 0.0;
    const double a = 1 - 2 / N;
    return N * a * a / (4 * (1 - 1 / N));
}

Coherence coherence(const HeisenbergMatrix &G, double N) {
    const auto &g = G.g;
    Coherence c;
    c.signal = 0.5 * (g[0][0] * g[0][0] + g[0][1] * g[0][1] + g[1][0] * g[1][0] + g[1][1] * g[1][1]);
    const double a = g[0][2] * g[0][2] + g[1][2] * g[1][2];
    const double k = artificial_coherence_coefficient(N);
    c.artificial = a == 0 ? 0.0 : k * a;
    return c;
}

RatioResult ratio(double eta_coh, double rho_ss, double rho_err) {
    RatioResult r;
    r.R = rho_ss > 0 ? eta_coh / rho_ss : std::numeric_limits<double>::infinity();
    r.noise_limited = rho_ss <= rho_err;
    return r;
}

double collective_emission_value(double N, double gamma, double tau) {
    const double x = gamma * tau;
    const double f = std::exp(-0.5 * x * x);
    if (f == 0) return 0.0;  // avoids inf * 0
    return N * f;
}

GuardStatus collective_emission_guard(double N, double gamma, double tau, double threshold) {
    if (N <= 1) return GuardStatus::Ok;
    return collective_emission_value(N, gamma, tau) > threshold ? GuardStatus::Warn : GuardStatus::Ok;
}

Su2 propagate_spin_su2(SpinState &spin, const SequenceSpec &spec, double eps, std::int64_t m, const OuOptions *ou) {
    if (m < 0) throw std::domain_error("repetition count must be non-negative");
    if (!ou) return repeat(sequence_su2(spec, spin.delta0, eps), m);
    Su2 out;
    evolve_ou(spin, spec, eps, m, *ou, [&](std::int64_t rep, const Su2 &T) {
        if (rep == m) out = T;
    });
    return out;
}

HeisenbergMatrix propagate_spin(SpinState &spin, const SequenceSpec &spec, double eps, std::int64_t m,
                                const OuOptions *ou) {
    return propagate_spin_su2(spin, spec, eps, m, ou).heisenberg();
}

GAverage average_G(const std::vector<SpinState> &spins, const SequenceSpec &spec, double eps, std::int64_t m) {
    if (spins.size() < 100) throw std::invalid_argument("average_G needs at least 100 spins");
    std::vector<Moments> parts((spins.size() + kChunk - 1) / kChunk);
    for (std::size_t k = 0; k < spins.size(); ++k) {
        SpinState s = spins[k];
        parts[k / kChunk].add(sample_of(propagate_spin_su2(s, spec, eps, m)));
    }
    const Moments mo = pairwise_merge(parts, 0, parts.size());
    GAverage out;
    out.n = spins.size();
    const Derived d = derive(mo.mean, kInfiniteN);
    out.mean = d.G;
    out.flip = d.flip;
    for (int q = 0; q < 3; ++q)
        for (int p = 0; p < 3; ++p) out.error.g[q][p] = std::sqrt(std::max(mo.cov(3 * q + p, 3 * q + p), 0.0) / mo.n);
    out.flip_err = std::sqrt(std::max(mo.cov(9, 9), 0.0) / mo.n);
    return out;
}

std::vector<EnsembleResult> run_experiment(const EnsembleConfig &cfg) {
    cfg.validate();
    const std::size_t C = cfg.m_checkpoints.size();
    const std::size_t n_chunks = (cfg.n_sample + kChunk - 1) / kChunk;
    std::vector<std::vector<Moments>> chunk_moments(n_chunks, std::vector<Moments>(C));
    const std::int64_t m_max = cfg.m_checkpoints.back();
    OuOptions ou{cfg.broadening, cfg.ou_substeps, cfg.ou_model};

    parallel_chunks(n_chunks, resolve_workers(cfg.workers), [&](std::size_t c) {
        auto &mom = chunk_moments[c];
        const std::size_t lo = c * kChunk, hi = std::min(cfg.n_sample, lo + kChunk);
        for (std::size_t k = lo; k < hi; ++k) {
            SpinState spin = make_spin(cfg.broadening, k, cfg.ou_enabled);
            if (cfg.ou_enabled) {
                std::size_t next = 0;
                evolve_ou(spin, cfg.spec, cfg.eps, m_max, ou, [&](std::int64_t rep, const Su2 &T) {
                    if (next < C && rep == cfg.m_checkpoints[next]) mom[next++].add(sample_of(T));
                });
            } else {
                const Su2 T1 = sequence_su2(cfg.spec, spin.delta0, cfg.eps);
                for (std::size_t i = 0; i < C; ++i) mom[i].add(sample_of(repeat(T1, cfg.m_checkpoints[i])));
            }
        }
    });

    std::vector<EnsembleResult> rows;
    rows.reserve(C);
    const std::size_t blocks = std::min(kJackknifeBlocks, n_chunks);
    for (std::size_t i = 0; i < C; ++i) {
        std::vector<Moments> per_chunk(n_chunks);
        for (std::size_t c = 0; c < n_chunks; ++c) per_chunk[c] = chunk_moments[c][i];
        const Moments total = pairwise_merge(per_chunk, 0, n_chunks);
        EnsembleResult r = finish(total, cfg.m_checkpoints[i], cfg, true);
        if (cfg.jackknife && blocks >= 2) {
            std::vector<Moments> block(blocks);
            for (std::size_t b = 0; b < blocks; ++b)
                block[b] = pairwise_merge(per_chunk, b * n_chunks / blocks, (b + 1) * n_chunks / blocks);
            std::vector<double> rho(blocks), eta(blocks), R(blocks);
            for (std::size_t b = 0; b < blocks; ++b) {
                Moments rest;
                for (std::size_t o = 0; o < blocks; ++o)
                    if (o != b) rest = Moments::merge(rest, block[o]);
                const Derived d = derive(rest.mean, cfg.N);
                rho[b] = d.rho;
                eta[b] = d.signal;
                R[b] = ratio(d.signal, d.rho).R;
            }
            auto jk = [blocks](const std::vector<double> &v) {
                double mean = 0;
                for (double x : v) mean += x;
                mean /= static_cast<double>(blocks);
                double s = 0;
                for (double x : v) s += (x - mean) * (x - mean);
                return std::sqrt(s * static_cast<double>(blocks - 1) / static_cast<double>(blocks));
            };
            r.rho_ss_jk = jk(rho);
            r.eta_coh_jk = jk(eta);
            r.R_jk = std::isfinite(r.R) ? jk(R) : std::numeric_limits<double>::quiet_NaN();
        }
        rows.push_back(std::move(r));
    }
    mark_crossings(rows);
    return rows;
}

std::vector<EnsembleResult> run_quadrature(const EnsembleConfig &cfg, QuadratureKind kind, std::size_t gh_nodes) {
    if (cfg.ou_enabled) throw std::invalid_argument("quadrature path requires the OU process to be disabled");
    cfg.spec.validate();
    cfg.broadening.validate();
    const std::size_t C = cfg.m_checkpoints.size();
    const std::int64_t m_max = cfg.m_checkpoints.back();
    QuadratureRule rule;
    if (kind == QuadratureKind::Periodic) {
        rule = periodic_rule(cfg.broadening, cfg.spec.tau, 2L * cfg.spec.L() * m_max);
    } else {
        if (cfg.broadening.shape != Shape::Gaussian) throw std::invalid_argument("Gauss-Hermite needs a Gaussian line");
        rule = gauss_hermite_rule(cfg.broadening.gaussian_sigma(), gh_nodes);
    }
    const std::size_t n = rule.nodes.size();
    const std::size_t n_chunks = (n + kChunk - 1) / kChunk;
    std::vector<std::vector<Moments>> chunk_sums(n_chunks, std::vector<Moments>(C));
    parallel_chunks(n_chunks, resolve_workers(cfg.workers), [&](std::size_t c) {
        const std::size_t lo = c * kChunk, hi = std::min(n, lo + kChunk);
        for (std::size_t j = lo; j < hi; ++j) {
            const Su2 T1 = sequence_su2(cfg.spec, rule.nodes[j], cfg.eps);
            for (std::size_t i = 0; i < C; ++i)
                chunk_sums[c][i].add_weighted(sample_of(repeat(T1, cfg.m_checkpoints[i])), rule.weights[j]);
        }
    });
    std::vector<EnsembleResult> rows;
    for (std::size_t i = 0; i < C; ++i) {
        // plain sums in chunk order, pairwise over chunks
        std::vector<Sample> s(n_chunks);
        for (std::size_t c = 0; c < n_chunks; ++c) s[c] = chunk_sums[c][i].mean;
        while (s.size() > 1) {
            std::vector<Sample> t((s.size() + 1) / 2);
            for (std::size_t k = 0; k < t.size(); ++k) {
                t[k] = s[2 * k];
                if (2 * k + 1 < s.size())
                    for (int d = 0; d < D; ++d) t[k][d] += s[2 * k + 1][d];
            }
            s.swap(t);
        }
        Moments mo;
        mo.n = 1;
        mo.mean = s.empty() ? Sample{} : s[0];
        mo.mean[9] = std::max(mo.mean[9], 0.0);
        rows.push_back(finish(mo, cfg.m_checkpoints[i], cfg, false));
    }
    mark_crossings(rows);
    return rows;
}

std::vector<std::int64_t> log_checkpoints(std::int64_t m_max, int per_decade) {
    if (m_max < 1) throw std::invalid_argument("m_max must be >= 1");
    std::vector<std::int64_t> out;
    for (int i = 0;; ++i) {
        const auto m = static_cast<std::int64_t>(std::llround(std::pow(10.0, static_cast<double>(i) / per_decade)));
        if (m > m_max) break;
        if (out.empty() || m > out.back()) out.push_back(m);
    }
    if (out.back() != m_max) out.push_back(m_max);
    return out;
}

unsigned resolve_workers(unsigned requested) {
    if (requested > 0) return requested;
    if (const char *env = std::getenv("DDMEM_WORKERS")) {
        char *end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace ddmem
