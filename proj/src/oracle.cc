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

#include "ddmem/oracle.h"

#include <gsl/gsl_multifit.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "ddmem/ensemble.h"
#include "ddmem/quadrature.h"

namespace ddmem {

using std::numbers::pi;

namespace {

void check_size(std::size_t n) {
    if (n == 0) throw std::invalid_argument("W state needs at least one atom");
    if (n > static_cast<std::size_t>(kMaxWStateAtoms))
        throw std::length_error("W-state simulation is limited to 12 atoms");
}

// applies u to atom k: amplitudes (s, g) = (bit set, bit clear)
void apply_single(std::vector<cplx> &psi, int k, const Unitary2 &u) {
    const std::size_t bit = std::size_t{1} << k;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        if (i & bit) continue;
        const cplx g = psi[i], s = psi[i | bit];
        psi[i | bit] = u.m00 * s + u.m01 * g;
        psi[i] = u.m10 * s + u.m11 * g;
    }
}

}  // namespace

WStateSim WStateSim::uniform(const std::vector<double> &delta) {
    check_size(delta.size());
    const double a = 1 / std::sqrt(static_cast<double>(delta.size()));
    return {static_cast<int>(delta.size()), std::vector<cplx>(delta.size(), cplx(a, 0)), delta};
}

WStateSim WStateSim::with_amplitudes(std::vector<cplx> c, const std::vector<double> &delta) {
    check_size(delta.size());
    if (c.size() != delta.size()) throw std::invalid_argument("amplitude and detuning counts differ");
    double n2 = 0;
    for (auto x : c) n2 += std::norm(x);
    if (!(n2 > 0)) throw std::invalid_argument("amplitudes vanish");
    for (auto &x : c) x /= std::sqrt(n2);
    return {static_cast<int>(delta.size()), std::move(c), delta};
}

std::vector<cplx> WStateSim::initial_state() const {
    std::vector<cplx> psi(std::size_t{1} << N);
    for (int k = 0; k < N; ++k) psi[std::size_t{1} << k] = c[k];
    return psi;
}

Metrics exact_w_metrics(const WStateSim &sim, const SequenceSpec &spec, double eps, std::int64_t m) {
    check_size(static_cast<std::size_t>(sim.N));
    if (sim.c.size() != static_cast<std::size_t>(sim.N) || sim.delta.size() != sim.c.size())
        throw std::invalid_argument("inconsistent W-state simulation");
    std::vector<cplx> psi = sim.initial_state();
    for (int k = 0; k < sim.N; ++k) apply_single(psi, k, repeat(sequence_unitary(spec, sim.delta[k], eps), m));

    double norm = 0;
    for (auto x : psi) norm += std::norm(x);
    if (std::abs(norm - 1) > 1e-12) throw std::runtime_error("W-state norm drifted");

    Metrics out;
    std::vector<cplx> a(sim.N);
    double a0 = 0;
    for (int k = 0; k < sim.N; ++k) {
        a[k] = std::abs(sim.c[k]) > 0 ? std::conj(sim.c[k]) / std::abs(sim.c[k]) : cplx(1, 0);
        a0 += std::abs(sim.c[k]);
    }
    // <S+ S-> = || S- psi ||^2 with S- = sum_k a_k |g><s|_k
    std::vector<cplx> lowered(psi.size());
    double pop = 0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        if (psi[i] == cplx(0, 0)) continue;
        for (int k = 0; k < sim.N; ++k) {
            const std::size_t bit = std::size_t{1} << k;
            if (!(i & bit)) continue;
            lowered[i & ~bit] += a[k] * psi[i];
            pop += std::norm(psi[i]);
        }
    }
    double ss = 0;
    for (auto x : lowered) ss += std::norm(x);
    out.rho_ss = pop / sim.N;
    out.eta_coh = ss / (a0 * a0);
    return out;
}

Metrics coherent_state_metrics(const std::vector<cplx> &c, const std::vector<double> &delta, const SequenceSpec &spec,
                               double eps, std::int64_t m) {
    if (delta.empty() || c.size() != delta.size()) throw std::invalid_argument("inconsistent coherent state");
    const std::size_t N = delta.size();
    // per atom: <sigma_-> = C*A + D*B + e^{i beta} D*A + e^{-i beta} C*B, three beta harmonics
    auto moments = [&](bool evolve, double &pop, double &ssm) {
        std::array<cplx, 3> sum{};
        double self = 0, diag = 0;
        for (std::size_t k = 0; k < N; ++k) {
            const cplx s0 = c[k], g0(std::sqrt(std::max(0.0, 1 - std::norm(c[k]))), 0);
            cplx A = s0, B = 0, C = 0, D = g0;
            if (evolve) {
                const Unitary2 T = repeat(sequence_unitary(spec, delta[k], eps), m);
                A = T.m00 * s0;
                B = T.m01 * g0;
                C = T.m10 * s0;
                D = T.m11 * g0;
            }
            const cplx a = std::abs(c[k]) > 0 ? std::conj(c[k]) / std::abs(c[k]) : cplx(1, 0);
            const std::array<cplx, 3> h{std::conj(C) * B, std::conj(C) * A + std::conj(D) * B, std::conj(D) * A};
            for (int j = 0; j < 3; ++j) {
                sum[j] += a * h[j];
                self += std::norm(h[j]);
            }
            diag += std::norm(A) + std::norm(B);
        }
        double coll = 0;
        for (auto x : sum) coll += std::norm(x);
        pop = diag / static_cast<double>(N);
        ssm = coll - self + diag;
    };
    double pop0, ssm0, pop, ssm;
    moments(false, pop0, ssm0);
    moments(true, pop, ssm);
    return {pop, ssm / ssm0};
}

Metrics coherent_state_metrics(const std::vector<double> &delta, const SequenceSpec &spec, double eps,
                               std::int64_t m) {
    const double a = 1 / std::sqrt(static_cast<double>(delta.size()));
    return coherent_state_metrics(std::vector<cplx>(delta.size(), cplx(a, 0)), delta, spec, eps, m);
}

Metrics numeric_beta_average(const SequenceSpec &spec, double eps, double delta, std::int64_t m, int n_beta,
                             double N) {
    if (n_beta < 64) throw std::invalid_argument("n_beta must be at least 64");
    if (!(N >= 2) || std::isinf(N)) throw std::invalid_argument("numeric beta average needs finite N >= 2");
    const Unitary2 T = repeat(sequence_unitary(spec, delta, eps), m);
    const double p = 1 / N;
    double pop = 0, perp = 0;
    // periodic integrand: the trapezoid rule is the plain mean over a uniform grid
    for (int j = 0; j < n_beta; ++j) {
        const double beta = 2 * pi * j / n_beta;
        const cplx s0 = std::polar(std::sqrt(p), beta), g0(std::sqrt(1 - p), 0);
        const cplx s = T.m00 * s0 + T.m01 * g0;
        const cplx g = T.m10 * s0 + T.m11 * g0;
        const cplx sg = std::conj(s) * g;  // <sigma_x> = 2 Re, <sigma_y> = 2 Im up to sign
        perp += 4 * std::norm(sg);
        pop += std::norm(s);
    }
    pop /= n_beta;
    perp /= n_beta;
    Metrics out;
    out.rho_ss = pop - p;
    out.eta_coh = N * perp / (4 * (1 - p));
    return out;
}

PowerFit fit_power_law(const std::vector<double> &x, const std::vector<double> &y, bool quadratic_correction) {
    if (x.size() != y.size()) throw std::invalid_argument("fit_power_law: size mismatch");
    const std::size_t n = x.size();
    const std::size_t k = quadratic_correction ? 3 : 2;
    if (n < k + (quadratic_correction ? 1 : 0)) throw std::invalid_argument("fit_power_law: too few points");
    for (std::size_t i = 0; i < n; ++i)
        if (!(x[i] > 0 && y[i] > 0)) throw std::invalid_argument("fit_power_law: values must be positive");
    auto del = [](auto *p, auto f) { return std::unique_ptr<std::remove_pointer_t<decltype(p)>, decltype(f)>(p, f); };
    auto X = del(gsl_matrix_alloc(n, k), &gsl_matrix_free);
    auto Y = del(gsl_vector_alloc(n), &gsl_vector_free);
    auto c = del(gsl_vector_alloc(k), &gsl_vector_free);
    auto cov = del(gsl_matrix_alloc(k, k), &gsl_matrix_free);
    auto ws = del(gsl_multifit_linear_alloc(n, k), &gsl_multifit_linear_free);
    for (std::size_t i = 0; i < n; ++i) {
        gsl_matrix_set(X.get(), i, 0, 1.0);
        gsl_matrix_set(X.get(), i, 1, std::log(x[i]));
        if (quadratic_correction) gsl_matrix_set(X.get(), i, 2, x[i] * x[i]);
        gsl_vector_set(Y.get(), i, std::log(y[i]));
    }
    double chisq = 0;
    gsl_multifit_linear(X.get(), Y.get(), c.get(), cov.get(), &chisq, ws.get());
    PowerFit f;
    f.prefactor = std::exp(gsl_vector_get(c.get(), 0));
    f.exponent = gsl_vector_get(c.get(), 1);
    f.points = n;
    // gsl scales the covariance by the residual variance already
    f.exponent_err = n > k ? std::sqrt(gsl_matrix_get(cov.get(), 1, 1)) : 0.0;
    return f;
}

ArbitrationReport arbitrate_constants(Preset seq, const std::vector<double> &eps_list,
                                      const std::vector<std::int64_t> &m_list, const BroadeningParams &broadening,
                                      double tau, const RegimeExpansion *expansion_override, double constant_tol) {
    if (eps_list.empty() || m_list.empty()) throw std::invalid_argument("arbitrate_constants: empty grid");
    const RegimeExpansion e = expansion_override ? *expansion_override : expansion(seq);
    ArbitrationReport rep;
    rep.seq = seq;
    EnsembleConfig cfg;
    cfg.spec = SequenceSpec::preset(seq, tau);
    cfg.broadening = broadening;
    cfg.m_checkpoints = m_list;
    std::sort(cfg.m_checkpoints.begin(), cfg.m_checkpoints.end());
    cfg.workers = 1;

    std::vector<double> eps_sorted = eps_list;
    std::sort(eps_sorted.begin(), eps_sorted.end());
    const QuadratureRule one = periodic_rule(broadening, tau, 2L * cfg.spec.L());
    for (double eps : eps_sorted) {
        // rms single-repetition angle over the line
        double a2 = 0;
        for (std::size_t j = 0; j < one.nodes.size(); ++j) {
            const double a = to_axis_angle(sequence_su2(cfg.spec, one.nodes[j], eps)).alpha;
            const double w = std::min(a, 2 * pi - a);
            a2 += one.weights[j] * w * w;
        }
        const double alpha = std::sqrt(std::max(a2, 0.0));
        cfg.eps = eps;
        const auto rows = run_quadrature(cfg);
        for (const auto &r : rows) {
            ArbitrationPoint pt;
            pt.eps = eps;
            pt.m = r.m;
            pt.alpha_m = alpha * static_cast<double>(r.m);
            pt.rho_ss = r.rho_ss;
            pt.coh_loss = 1 - r.eta_coh;
            const double md = static_cast<double>(r.m);
            pt.rho_ratio = pt.rho_ss / (e.rho_coef * std::pow(md, e.rho_m_exponent) * std::pow(eps, e.rho_eps_exponent));
            pt.coh_ratio = pt.coh_loss / (e.coh_coef * md * md * std::pow(eps, e.coh_eps_exponent));
            pt.excluded = pt.alpha_m > 0.3;
            if (pt.excluded) {
                std::ostringstream os;
                os << "excluded eps=" << eps << " m=" << r.m << " (alpha m = " << pt.alpha_m << ")";
                rep.notes.push_back(os.str());
            }
            rep.points.push_back(pt);
        }
    }

    auto retained = [&](auto pred) {
        std::vector<ArbitrationPoint> v;
        for (const auto &p : rep.points)
            if (!p.excluded && pred(p)) v.push_back(p);
        return v;
    };
    auto fit_on = [&](const std::vector<ArbitrationPoint> &v, auto xf, auto yf, bool quad) {
        std::vector<double> x, y;
        for (const auto &p : v) {
            if (yf(p) > 0) {
                x.push_back(xf(p));
                y.push_back(yf(p));
            }
        }
        if (x.size() < (quad ? 4u : 2u)) return PowerFit{};
        return fit_power_law(x, y, quad);
    };
    const double eps_lo = eps_sorted.front();
    const std::int64_t m_lo = cfg.m_checkpoints.front();
    const auto at_eps = retained([&](const ArbitrationPoint &p) { return p.eps == eps_lo; });
    const auto at_m = retained([&](const ArbitrationPoint &p) { return p.m == m_lo; });
    auto m_of = [](const ArbitrationPoint &p) { return static_cast<double>(p.m); };
    auto eps_of = [](const ArbitrationPoint &p) { return p.eps; };
    auto rho_of = [](const ArbitrationPoint &p) { return p.rho_ss; };
    auto coh_of = [](const ArbitrationPoint &p) { return p.coh_loss; };
    const bool quad = at_m.size() >= 4;
    rep.rho_m = fit_on(at_eps, m_of, rho_of, false);
    rep.rho_eps = fit_on(at_m, eps_of, rho_of, quad);
    rep.coh_eps = fit_on(at_m, eps_of, coh_of, quad);
    if (rep.rho_m.points == 0 || rep.rho_eps.points == 0) rep.notes.push_back("too few retained points for a fit");

    std::map<double, std::vector<ArbitrationPoint>> by_eps;
    for (const auto &p : rep.points)
        if (!p.excluded) by_eps[p.eps].push_back(p);
    bool first = true;
    for (const auto &[eps, v] : by_eps) {
        double rlo = INFINITY, rhi = 0, clo = INFINITY, chi = 0, rs = 0, cs = 0;
        for (const auto &p : v) {
            rlo = std::min(rlo, p.rho_ratio);
            rhi = std::max(rhi, p.rho_ratio);
            clo = std::min(clo, p.coh_ratio);
            chi = std::max(chi, p.coh_ratio);
            rs += p.rho_ratio;
            cs += p.coh_ratio;
        }
        if (v.size() >= 2) {
            rep.rho_ratio_spread = std::max(rep.rho_ratio_spread, rlo > 0 ? rhi / rlo - 1 : INFINITY);
            rep.coh_ratio_spread = std::max(rep.coh_ratio_spread, clo > 0 ? chi / clo - 1 : INFINITY);
        }
        if (first) {
            rep.rho_ratio_mean = rs / static_cast<double>(v.size());
            rep.coh_ratio_mean = cs / static_cast<double>(v.size());
            first = false;
        }
    }
    rep.rho_ratio_constant = !by_eps.empty() && rep.rho_ratio_spread <= constant_tol;
    rep.coh_ratio_constant = !by_eps.empty() && rep.coh_ratio_spread <= constant_tol;
    return rep;
}

}  // namespace ddmem
