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

#include "ddmem/verify.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <numbers>
#include <random>
#include <set>
#include <stdexcept>

#include "ddmem/broadening.h"
#include "ddmem/ensemble.h"
#include "ddmem/memory.h"
#include "ddmem/oracle.h"
#include "ddmem/quadrature.h"
#include "ddmem/sequences.h"

namespace ddmem {

using std::numbers::pi;

namespace {

std::string fmt(const char *f, ...) {
    char buf[1024];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

const std::vector<Preset> &all_presets() {
    static const std::vector<Preset> v = {Preset::CP,     Preset::CPMG,   Preset::XY4,
                                         Preset::XY8,    Preset::U5a_CP, Preset::U5a_XY4};
    return v;
}

class Recorder {
  public:
    Recorder(const VerifyOptions &opt, VerifyReport &rep, int criterion)
        : opt_(opt), rep_(rep), criterion_(criterion) {}

    void check(const std::string &id, bool passed, const std::string &detail, bool known = false) {
        Check c;
        c.criterion = criterion_;
        c.id = id;
        c.passed = passed;
        c.known_failure = known && !passed;
        c.detail = detail;
        push(c);
    }
    void info(const std::string &id, const std::string &detail) {
        Check c;
        c.criterion = criterion_;
        c.id = id;
        c.passed = true;
        c.info = true;
        c.detail = detail;
        push(c);
    }
    bool full() const { return opt_.level == VerifyLevel::Full; }
    unsigned workers() const { return opt_.workers; }
    const VerifyOptions &options() const { return opt_; }

  private:
    void push(const Check &c) {
        rep_.checks.push_back(c);
        if (opt_.on_check) opt_.on_check(c);
    }
    const VerifyOptions &opt_;
    VerifyReport &rep_;
    int criterion_;
};

double wrap_angle(double a) { return std::remainder(a, 2 * pi); }

BroadeningParams fig3_line() {
    BroadeningParams b;
    b.gamma = 2 * pi * 27e3;
    b.seed = 20260101;
    return b;
}

// rms single-repetition rotation angle over the line, folded into [0, pi]
double rms_alpha(const SequenceSpec &spec, double eps, const BroadeningParams &b) {
    const QuadratureRule rule = periodic_rule(b, spec.tau, 2L * spec.L());
    double s = 0;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        const double a = canonical(to_axis_angle(sequence_su2(spec, rule.nodes[j], eps))).alpha;
        s += rule.weights[j] * a * a;
    }
    return std::sqrt(std::max(s, 0.0));
}

// ---------------------------------------------------------------------------------------------
// 0: oracle and pipeline invariants

void invariants(Recorder &rec) {
    // closed-form beta integration against the brute-force grid
    {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> u(0, 1);
        double worst = 0;
        for (Preset p : all_presets()) {
            for (int i = 0; i < 8; ++i) {
                const double tau = 100e-6, delta = (2 * u(rng) - 1) * 2 * pi * 40e3, eps = 0.2 * pi * u(rng);
                const std::int64_t m = 1 + static_cast<std::int64_t>(u(rng) * 20);
                const double N = 3 + 20 * u(rng);
                const SequenceSpec spec = SequenceSpec::preset(p, tau);
                const Metrics b64 = numeric_beta_average(spec, eps, delta, m, 64, N);
                const Metrics b256 = numeric_beta_average(spec, eps, delta, m, 256, N);
                const Su2 T = repeat(sequence_su2(spec, delta, eps), m);
                const double rho = population_from_flip(T.flip_probability(), N);
                const double eta = coherence(T.heisenberg(), N).total();
                worst = std::max({worst, std::abs(b64.rho_ss - rho), std::abs(b64.eta_coh - eta),
                                  std::abs(b64.rho_ss - b256.rho_ss), std::abs(b64.eta_coh - b256.eta_coh)});
            }
        }
        rec.check("beta_average.closed_form", worst <= 1e-10, fmt("max deviation %.3g (limit 1e-10)", worst));
    }
    // Monte Carlo against the exact quadrature, OU off
    {
        const std::size_t n = rec.full() ? 100000 : 20000;
        int bad = 0, total = 0;
        double worst_z = 0;
        std::string where;
        for (Preset p : comparison_presets()) {
            for (double eps : {0.01 * pi, 0.1 * pi}) {
                EnsembleConfig c;
                c.n_sample = n;
                c.N = kInfiniteN;
                c.spec = SequenceSpec::preset(p, 100e-6);
                c.eps = eps;
                c.broadening = fig3_line();
                c.m_checkpoints = {1, 10, 100};
                c.workers = rec.workers();
                const auto mc = run_experiment(c);
                const auto q = run_quadrature(c);
                for (std::size_t i = 0; i < mc.size(); ++i) {
                    // 1e-13 absorbs rounding where the sampling error itself is below double precision
                    const double zr = std::abs(mc[i].rho_ss - q[i].rho_ss) / (mc[i].rho_ss_err + 1e-13 / 3);
                    const double ze = std::abs(mc[i].eta_coh - q[i].eta_coh) / (mc[i].eta_coh_err + 1e-13 / 3);
                    for (double z : {zr, ze}) {
                        ++total;
                        if (z > 3) ++bad;
                        if (z > worst_z) {
                            worst_z = z;
                            where = fmt("%s eps=%.2fpi m=%lld", preset_name(p).c_str(), eps / pi,
                                        static_cast<long long>(mc[i].m));
                        }
                    }
                }
            }
        }
        rec.check("mc_vs_quadrature", bad == 0,
                  fmt("n_sample=%zu: %d of %d comparisons beyond 3 SE, worst %.2f SE at %s", n, bad, total, worst_z,
                      where.c_str()));
    }
    // Gauss-Hermite is only a small Gamma tau m cross-check of the periodic rule
    {
        EnsembleConfig c;
        c.spec = SequenceSpec::preset(Preset::CP, 100e-6);
        c.eps = 0.1 * pi;
        c.broadening = fig3_line();
        c.m_checkpoints = {1};
        const auto pr = run_quadrature(c, QuadratureKind::Periodic);
        const auto gh = run_quadrature(c, QuadratureKind::GaussHermite, 200);
        const double d = std::max(std::abs(pr[0].rho_ss - gh[0].rho_ss), std::abs(pr[0].eta_coh - gh[0].eta_coh));
        rec.check("gauss_hermite.m1", d <= 1e-8, fmt("periodic vs 200-node Gauss-Hermite at m=1: %.3g", d));
    }
}

// ---------------------------------------------------------------------------------------------
// 1: identity at eps = 0

void criterion1(Recorder &rec) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0, 1);
    for (Preset p : all_presets()) {
        double worst_rho = 0, worst_eta = 0;
        for (int i = 0; i < 100; ++i) {
            const double tau = std::pow(10.0, -6 + 4 * u(rng));
            const double delta = (2 * u(rng) - 1) * 2 * pi * 200e3;
            const Su2 T = sequence_su2(SequenceSpec::preset(p, tau), delta, 0.0);
            for (std::int64_t m : {1, 10, 100}) {
                const Su2 Tm = repeat(T, m);
                worst_rho = std::max(worst_rho, Tm.flip_probability());
                worst_eta = std::max(worst_eta, std::abs(coherence(Tm.heisenberg(), kInfiniteN).signal - 1));
            }
        }
        rec.check(preset_name(p), worst_rho <= 1e-10 && worst_eta <= 1e-10,
                  fmt("max rho_ss %.2g, max |eta_coh - 1| %.2g (limit 1e-10)", worst_rho, worst_eta));
    }
}

// ---------------------------------------------------------------------------------------------
// 2: table of single-repetition rotations

struct Oriented {
    double alpha, theta, phi;
};

Oriented orient(double alpha, Vec3 n, const Vec3 &reference) {
    // the rotation (alpha, n) and its inverse (alpha, -n) are compared on an equal footing
    if (n[0] * reference[0] + n[1] * reference[1] + n[2] * reference[2] < 0) n = {-n[0], -n[1], -n[2]};
    return {alpha, std::acos(std::clamp(n[2], -1.0, 1.0)), std::atan2(n[1], n[0])};
}

struct TableError {
    double alpha = 0, theta = 0, phi = 0;
};

TableError table_error(Preset seq, double x, double eps, bool printed) {
    const double tau = 100e-6;
    const SequenceSpec spec = SequenceSpec::preset(seq, tau);
    const RotationRep r = canonical(to_axis_angle(sequence_su2(spec, x / tau, eps)));
    const AxisAngleApprox a = printed ? printed_axis_angle(seq, x / tau, tau, eps) : approx_axis_angle(seq, x / tau, tau, eps);
    double at = a.alpha;
    Vec3 nt = {std::sin(a.theta) * std::cos(a.phi), std::sin(a.theta) * std::sin(a.phi), std::cos(a.theta)};
    if (at < 0) {
        at = -at;
        nt = {-nt[0], -nt[1], -nt[2]};
    }
    const Oriented e = orient(r.alpha, r.axis, nt);
    const Oriented t = orient(at, nt, nt);
    TableError err;
    err.alpha = std::abs(e.alpha - t.alpha) / std::abs(t.alpha);
    err.theta = std::abs(e.theta - t.theta) / std::abs(t.theta);
    double dphi = std::abs(wrap_angle(e.phi - t.phi));
    // XY4: a pi shift of the axis azimuth is invisible after phase averaging
    if (seq == Preset::XY4) dphi = std::min(dphi, std::abs(wrap_angle(e.phi - t.phi - pi)));
    err.phi = std::abs(t.phi) < 1e-9 ? dphi : dphi / std::abs(t.phi);
    return err;
}

void criterion2(Recorder &rec) {
    const double eps = 0.01 * pi, lim = 5 * eps;
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<double> xs(50);
    for (auto &x : xs) x = 2 * pi * u(rng);
    for (Preset p : {Preset::CP, Preset::CPMG, Preset::XY4, Preset::XY8}) {
        TableError w;
        for (double x : xs) {
            const TableError e = table_error(p, x, eps, false);
            w.alpha = std::max(w.alpha, e.alpha);
            w.theta = std::max(w.theta, e.theta);
            w.phi = std::max(w.phi, e.phi);
        }
        rec.check(preset_name(p), w.alpha <= lim && w.theta <= lim && w.phi <= lim,
                  fmt("max relative error alpha %.3g theta %.3g phi %.3g (limit 5 eps = %.4f)", w.alpha, w.theta, w.phi,
                      lim));
    }
    {
        TableError w;
        for (double x : xs) {
            const TableError e = table_error(Preset::CPMG, x, eps, true);
            w.alpha = std::max(w.alpha, e.alpha);
            w.theta = std::max(w.theta, e.theta);
        }
        rec.info("CPMG.printed_row", fmt("row as printed: max relative error alpha %.3g theta %.3g; it describes "
                                         "phases (pi/2, pi/2), not (0, pi)",
                                         w.alpha, w.theta));
    }
    const std::vector<double> eps_grid = {0.05 * pi, 0.075 * pi, 0.1 * pi, 0.125 * pi, 0.15 * pi, 0.175 * pi, 0.2 * pi};
    for (auto [p, k] : {std::pair{Preset::U5a_CP, 3.0}, std::pair{Preset::U5a_XY4, 6.0}}) {
        std::vector<double> slopes;
        for (int i = 0; i < 9; ++i) {
            const double x = 2 * pi * u(rng), tau = 100e-6;
            const SequenceSpec spec = SequenceSpec::preset(p, tau);
            std::vector<double> al;
            for (double e : eps_grid) al.push_back(canonical(to_axis_angle(sequence_su2(spec, x / tau, e))).alpha);
            slopes.push_back(fit_power_law(eps_grid, al, true).exponent);
        }
        std::vector<double> s = slopes;
        std::sort(s.begin(), s.end());
        const double med = s[s.size() / 2];
        rec.check(preset_name(p) + ".alpha_exponent", std::abs(med - k) <= 0.3,
                  fmt("median fitted exponent %.3f over 9 values of Delta tau (range %.2f..%.2f), expected %.0f +- 0.3",
                      med, s.front(), s.back(), k));
    }
}

// ---------------------------------------------------------------------------------------------
// 3: small-m exponents and coefficient ratios

std::vector<double> criterion3_eps(Preset p) {
    if (p == Preset::CP) return {0.001 * pi, 0.002 * pi, 0.004 * pi, 0.008 * pi};
    if (p == Preset::U5a_XY4) return {0.1 * pi, 0.125 * pi, 0.15 * pi, 0.2 * pi};
    return {0.01 * pi, 0.02 * pi, 0.04 * pi, 0.08 * pi};
}

void criterion3(Recorder &rec) {
    BroadeningParams b = fig3_line();
    const double tau = 100e-6;
    const std::vector<std::int64_t> ms = {2, 3, 5, 8, 12, 20};
    const auto &ovr = rec.options().coefficient_overrides;
    for (Preset p : comparison_presets()) {
        const RegimeExpansion *o = ovr.count(p) ? &ovr.at(p) : nullptr;
        const RegimeExpansion e = o ? *o : expansion(p);
        const ArbitrationReport r = arbitrate_constants(p, criterion3_eps(p), ms, b, tau, o);
        const std::string n = preset_name(p);
        std::int64_t mlo = 0, mhi = 0;
        for (const auto &pt : r.points) {
            if (pt.excluded || pt.eps != r.points.front().eps) continue;
            mlo = mlo ? std::min(mlo, pt.m) : pt.m;
            mhi = std::max(mhi, pt.m);
        }
        rec.check(n + ".rho.m_slope", std::abs(r.rho_m.exponent / 2 - 1) <= 0.05 && mhi >= 10 * mlo,
                  fmt("fitted %.4f over m in [%lld, %lld], expected 2 +- 5%%", r.rho_m.exponent,
                      static_cast<long long>(mlo), static_cast<long long>(mhi)));
        rec.check(n + ".rho.eps_slope", std::abs(r.rho_eps.exponent - e.rho_eps_exponent) <= 0.5,
                  fmt("fitted %.3f, expected %d +- 0.5", r.rho_eps.exponent, e.rho_eps_exponent));
        rec.check(n + ".coh.eps_slope", std::abs(r.coh_eps.exponent - e.coh_eps_exponent) <= 0.5,
                  fmt("fitted %.3f, expected %d +- 0.5", r.coh_eps.exponent, e.coh_eps_exponent));
        rec.check(n + ".ratio_constant", r.rho_ratio_constant && r.coh_ratio_constant,
                  fmt("measured/printed spread across m: rho %.2f%%, coherence %.2f%% (limit 10%%)",
                      100 * r.rho_ratio_spread, 100 * r.coh_ratio_spread));
        for (const auto &note : r.notes) rec.info(n + ".note", note);

        // calibration against the recorded ratios; a tampered coefficient shows up here
        const ArbitrationRatio want = arbitration_ratio(p);
        const double eps_rho = 0.01 * pi, eps_coh = p == Preset::U5a_XY4 ? 0.04 * pi : 0.01 * pi;
        const ArbitrationReport c1 = arbitrate_constants(p, {eps_rho}, {2}, b, tau, o);
        const ArbitrationReport c2 = arbitrate_constants(p, {eps_coh}, {2}, b, tau, o);
        const double rr = c1.points[0].rho_ratio, cr = c2.points[0].coh_ratio;
        rec.check(n + ".calibration",
                  std::abs(rr / want.rho - 1) <= 0.05 && std::abs(cr / want.coh - 1) <= 0.05,
                  fmt("measured/printed rho %.4f (recorded %.3f), coherence %.4f (recorded %.3f), limit 5%%", rr,
                      want.rho, cr, want.coh));
    }
}

// ---------------------------------------------------------------------------------------------
// 4: large-m saturation

void criterion4(Recorder &rec) {
    const double eps = 0.1 * pi, tau = 100e-6;
    EnsembleConfig c;
    c.N = 1e10;
    c.eps = eps;
    c.broadening = fig3_line();
    c.workers = rec.workers();
    auto run = [&](Preset p, std::vector<std::int64_t> ms) {
        c.spec = SequenceSpec::preset(p, tau);
        c.m_checkpoints = std::move(ms);
        return run_quadrature(c);
    };
    auto spread = [](const std::vector<EnsembleResult> &rows, double &mean) {
        double lo = INFINITY, hi = -INFINITY, s = 0;
        for (const auto &r : rows) {
            lo = std::min(lo, r.rho_ss);
            hi = std::max(hi, r.rho_ss);
            s += r.rho_ss;
        }
        mean = s / static_cast<double>(rows.size());
        return (hi - lo) / mean;
    };

    {
        const auto rows = run(Preset::CP, {1000, 1500, 2000, 3000, 5000, 7000, 10000});
        const double am = rms_alpha(SequenceSpec::preset(Preset::CP, tau), eps, c.broadening) * 1000;
        double mean = 0;
        const double v = spread(rows, mean);
        rec.check("CP.rho_saturates", v < 0.05 && am > 10,
                  fmt("rho_ss varies by %.2f%% over m in [1000, 10000] (alpha m >= %.0f), limit 5%%", 100 * v, am));
        rec.info("CP.saturation_constant",
                 fmt("rho_ss -> %.4f against the printed 1; coherence -> %.4f against the printed 1/2", mean,
                     rows.back().eta_coh));
    }
    {
        const auto rows = run(Preset::XY4, {3000, 5000, 7000, 10000, 15000, 20000, 30000});
        double mean = 0;
        const double v = spread(rows, mean);
        const double k = mean / (eps * eps);
        rec.check("XY4.rho_saturation_level", std::abs(k / 0.5 - 1) <= 0.2,
                  fmt("rho_ss -> %.4f eps^2 (m-variation %.1f%%), expected (1/2 +- 20%%) eps^2. Population "
                      "coefficients measure at half the printed values throughout",
                      k, 100 * v),
                  true);
        rec.info("XY4.rho_saturation_arbitrated",
                 fmt("against the arbitrated 1/4 eps^2: %.1f%% off", 100 * std::abs(k / 0.25 - 1)));
        rec.check("XY4.eta_returns", rows.back().eta_coh > 0.99,
                  fmt("eta_coh at m=30000 is %.4f, expected > 0.99. The net rotation is about a near-z axis by a "
                      "Delta-dependent angle, which dephases the transverse signal",
                      rows.back().eta_coh),
                  true);
    }
    {
        const auto rows = run(Preset::XY8, {10000, 15000, 20000, 30000});
        double mean = 0;
        spread(rows, mean);
        rec.info("XY8.saturation_constant", fmt("rho_ss -> %.3f against the printed 1 (coherence %.3f)", mean,
                                                rows.back().eta_coh));
    }
}

// ---------------------------------------------------------------------------------------------
// 5: R against m

void criterion5(Recorder &rec) {
    const double eps = 0.1 * pi, tau = 100e-6;
    const std::vector<Preset> seqs = comparison_presets();
    std::map<Preset, std::vector<EnsembleResult>> rows;
    for (Preset p : seqs) {
        EnsembleConfig c;
        c.n_sample = 10000;
        c.N = 1e10;
        c.spec = SequenceSpec::preset(p, tau);
        c.eps = eps;
        c.broadening = fig3_line();
        c.workers = rec.workers();
        std::set<std::int64_t> ms;
        for (auto m : log_checkpoints(1000, 8)) ms.insert(m);
        for (int P : {40, 80}) ms.insert(P / c.spec.L());
        c.m_checkpoints.assign(ms.begin(), ms.end());
        rows[p] = run_experiment(c);
    }
    auto at = [&](Preset p, std::int64_t m) -> const EnsembleResult & {
        for (const auto &r : rows[p])
            if (r.m == m) return r;
        throw std::logic_error("checkpoint missing");
    };

    // (a) at equal storage time, i.e. equal pulse count
    for (int P : {40, 80}) {
        bool ok = true;
        std::string vals;
        for (std::size_t i = 0; i < seqs.size(); ++i) {
            const auto &r = at(seqs[i], P / preset_length(seqs[i]));
            vals += fmt("%s%s %.4g", i ? " < " : "", preset_name(seqs[i]).c_str(), r.R);
            if (i > 0 && !(at(seqs[i - 1], P / preset_length(seqs[i - 1])).R < r.R)) ok = false;
        }
        rec.check(fmt("a.ordering.pulses=%d", P), ok, vals);
    }
    {
        std::string vals;
        for (std::int64_t m : {1, 10}) {
            vals += fmt("m=%lld:", static_cast<long long>(m));
            for (Preset p : seqs) vals += fmt(" %s %.4g", preset_name(p).c_str(), at(p, m).R);
            vals += "; ";
        }
        rec.info("a.equal_m", vals);
    }

    // (b) overlays before saturation
    for (Preset p : seqs) {
        const double alpha = rms_alpha(SequenceSpec::preset(p, tau), eps, fig3_line());
        double worst = 0, worst_printed = 0, worst_rel = 0;
        int n = 0;
        std::int64_t worst_m = 0;
        for (const auto &r : rows[p]) {
            if (alpha * static_cast<double>(r.m) > 0.3) continue;
            ++n;
            const double a = analytic_ratio_small_m(p, r.m, eps, true);
            const double z = std::abs(r.R - a) / r.R_err;
            if (z > worst) {
                worst = z;
                worst_m = r.m;
                worst_rel = a / r.R - 1;
            }
            worst_printed = std::max(worst_printed, std::abs(analytic_ratio_small_m(p, r.m, eps, false) / r.R - 1));
        }
        if (n == 0) {
            rec.check("b.overlay." + preset_name(p), false,
                      fmt("no checkpoint before saturation: rms alpha = %.3f already exceeds 0.3 at m = 1", alpha), true);
            continue;
        }
        rec.check("b.overlay." + preset_name(p), worst <= 3,
                  fmt("%d checkpoints with alpha m <= 0.3; worst %.1f SE at m=%lld (overlay off by %+.1f%%); "
                      "the printed-coefficient overlay is off by up to %.0f%%",
                      n, worst, static_cast<long long>(worst_m), 100 * worst_rel, 100 * worst_printed),
                  true);
    }

    // (c) first to cross R = 10
    std::map<Preset, double> cross;
    for (Preset p : seqs) {
        cross[p] = INFINITY;
        const auto &v = rows[p];
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (v[i].R < 10) {
                if (i == 0) {
                    cross[p] = static_cast<double>(v[0].m);
                } else {
                    const double l0 = std::log(v[i - 1].R), l1 = std::log(v[i].R);
                    const double x0 = std::log(static_cast<double>(v[i - 1].m)), x1 = std::log(static_cast<double>(v[i].m));
                    cross[p] = std::exp(x0 + (std::log(10.0) - l0) * (x1 - x0) / (l1 - l0));
                }
                break;
            }
        }
    }
    bool first = true;
    std::string vals;
    for (Preset p : seqs) {
        vals += fmt("%s %.3g; ", preset_name(p).c_str(), cross[p]);
        if (p != Preset::CP && !(cross[Preset::CP] < cross[p])) first = false;
    }
    rec.check("c.first_below_10", first && std::isfinite(cross[Preset::CP]), "crossing m: " + vals);
}

// ---------------------------------------------------------------------------------------------
// 6: Ornstein-Uhlenbeck statistics

void criterion6(Recorder &rec) {
    BroadeningParams b;
    b.sigma_delta = 2 * pi * 284;
    b.tau_c = 3.5e-3;
    b.seed = 6;
    const int n = 10000, per_tc = 20;
    const double dt = b.tau_c / per_tc, s2 = b.sigma_delta * b.sigma_delta;
    std::vector<double> d0(n), dh(n), d1(n), d2(n);
    for (int k = 0; k < n; ++k) {
        RandomStream rng(b.seed, static_cast<std::uint64_t>(k));
        double d = ou_init(b, rng);
        d0[k] = d;
        for (int s = 1; s <= 2 * per_tc; ++s) {
            d = ou_step(d, dt, b, rng);
            if (s == per_tc / 2) dh[k] = d;
            if (s == per_tc) d1[k] = d;
        }
        d2[k] = d;
    }
    for (auto [lag, v] : {std::pair{0.5, &dh}, std::pair{1.0, &d1}, std::pair{2.0, &d2}}) {
        double mean = 0, sq = 0;
        for (int k = 0; k < n; ++k) {
            const double x = d0[k] * (*v)[k];
            mean += x;
            sq += x * x;
        }
        mean /= n;
        const double se = std::sqrt((sq / n - mean * mean) / (n - 1));
        const double want = s2 * std::exp(-lag);
        rec.check(fmt("autocorrelation.s=%.1ftau_c", lag), std::abs(mean - want) <= 3 * se,
                  fmt("%.5g vs %.5g, %.2f SE", mean, want, std::abs(mean - want) / se));
    }
    {
        double var = 0;
        for (double x : d2) var += x * x;
        var /= n;
        const double se = s2 * std::sqrt(2.0 / n);
        rec.check("stationary_variance", std::abs(var - s2) <= 3 * se,
                  fmt("variance after 2 tau_c %.5g vs %.5g, %.2f SE", var, s2, std::abs(var - s2) / se));
    }
    {
        const double start = 1.5 * b.sigma_delta, step = b.tau_c;
        std::vector<double> one(n), two(n), one_phase(n), two_phase(n);
        for (int k = 0; k < n; ++k) {
            RandomStream r1(b.seed, static_cast<std::uint64_t>(k), 1), r2(b.seed, static_cast<std::uint64_t>(k), 2);
            one[k] = ou_step(start, step, b, r1);
            two[k] = ou_step(ou_step(start, step / 2, b, r2), step / 2, b, r2);
            RandomStream r3(b.seed, static_cast<std::uint64_t>(k), 3), r4(b.seed, static_cast<std::uint64_t>(k), 4);
            one_phase[k] = ou_step_integrated(start, step, b, r3).phase;
            const OuIntegratedStep h = ou_step_integrated(start, step / 2, b, r4);
            two_phase[k] = h.phase + ou_step_integrated(h.delta, step / 2, b, r4).phase;
        }
        const KsResult ks = ks_two_sample(one, two);
        rec.check("markov.one_vs_two_steps", ks.p > 0.01, fmt("KS D=%.4f p=%.3f (limit p > 0.01)", ks.D, ks.p));
        const KsResult kp = ks_two_sample(one_phase, two_phase);
        rec.check("markov.integrated_phase", kp.p > 0.01, fmt("KS D=%.4f p=%.3f (limit p > 0.01)", kp.D, kp.p));
    }
}

// ---------------------------------------------------------------------------------------------
// 7: population against tau with the OU process

struct TauCurve {
    std::vector<double> tau, rho, err;
};

std::map<Preset, TauCurve> tau_sweep(double sigma, double tau_c, std::size_t n, unsigned workers) {
    std::map<Preset, TauCurve> out;
    std::vector<double> taus;
    for (int k : {700, 400, 250, 150, 100, 70, 50, 40, 32, 25, 20, 16, 12, 8, 4, 2, 1}) taus.push_back(25e-3 / k);
    for (Preset p : comparison_presets()) {
        TauCurve &c = out[p];
        for (double tau : taus) {
            EnsembleConfig e;
            e.n_sample = n;
            e.N = 1e10;
            e.spec = SequenceSpec::preset(p, tau);
            e.eps = 0.01 * pi;
            e.broadening = fig3_line();
            e.broadening.sigma_delta = sigma;
            e.broadening.tau_c = tau_c;
            e.ou_enabled = true;
            e.workers = workers;
            e.m_checkpoints = {std::llround(1.0 / (e.spec.L() * tau))};
            const auto r = run_experiment(e);
            c.tau.push_back(tau);
            c.rho.push_back(r[0].rho_ss);
            c.err.push_back(r[0].rho_ss_err);
        }
    }
    return out;
}

void criterion7_eval(Recorder &rec, const std::map<Preset, TauCurve> &cv, double tau_c, const std::string &tag,
                     bool info_only) {
    auto emit = [&](const std::string &id, bool ok, const std::string &d, bool known = false) {
        if (info_only)
            rec.info(tag + "." + id, std::string(ok ? "holds: " : "does not hold: ") + d);
        else
            rec.check(tag + "." + id, ok, d, known);
    };
    const std::vector<Preset> seqs = comparison_presets();
    // (a)
    {
        bool ok = true;
        double worst = 0;
        const auto &ref = cv.at(Preset::CP);
        for (std::size_t i = 0; i < ref.tau.size(); ++i) {
            if (ref.tau[i] < 10e-3) continue;
            for (std::size_t a = 0; a < seqs.size(); ++a)
                for (std::size_t b = a + 1; b < seqs.size(); ++b) {
                    const auto &A = cv.at(seqs[a]), &B = cv.at(seqs[b]);
                    const double z = std::abs(A.rho[i] - B.rho[i]) / std::hypot(A.err[i], B.err[i]);
                    worst = std::max(worst, z);
                    if (z > 3) ok = false;
                }
        }
        emit("a.equal_long_tau", ok, fmt("tau >= 10 ms: largest pairwise difference %.2f combined SE (limit 3)", worst));
    }
    // (b)
    {
        const auto &cp = cv.at(Preset::CP), &x8 = cv.at(Preset::XY8);
        double best = 0, best_tau = 0;
        for (std::size_t i = 0; i < cp.tau.size(); ++i) {
            if (cp.tau[i] > tau_c) continue;
            const double r = x8.rho[i] > 0 ? cp.rho[i] / x8.rho[i] : INFINITY;
            if (r > best) {
                best = r;
                best_tau = cp.tau[i];
            }
        }
        emit("b.cp_over_xy8", best >= 10,
             fmt("largest rho_CP / rho_XY8 for tau <= tau_c is %.3g at tau = %.3g ms (limit 10)", best, 1e3 * best_tau));
    }
    // (c)
    for (Preset p : {Preset::XY8, Preset::U5a_CP}) {
        const auto &c = cv.at(p);
        const double lo = tau_c / preset_length(p);
        const std::size_t k = std::min_element(c.rho.begin(), c.rho.end()) - c.rho.begin();
        const bool inside = c.tau[k] > lo && c.tau[k] < tau_c;
        const bool rises = k > 0 && k + 1 < c.rho.size() && c.rho.front() - c.rho[k] > 3 * std::hypot(c.err.front(), c.err[k]) &&
                           c.rho.back() - c.rho[k] > 3 * std::hypot(c.err.back(), c.err[k]);
        emit("c.minimum." + preset_name(p), inside && rises,
             fmt("minimum rho_ss %.3g at tau = %.3g ms; window (%.3g, %.3g) ms; rises on both sides: %s", c.rho[k],
                 1e3 * c.tau[k], 1e3 * lo, 1e3 * tau_c, rises ? "yes" : "no"),
             true);
    }
}

void criterion7(Recorder &rec) {
    const double tau_c = 3.5e-3;
    const std::size_t n = 1000;
    for (double hz : {284.0, 168.0}) {
        const auto cv = tau_sweep(2 * pi * hz, tau_c, n, rec.workers());
        criterion7_eval(rec, cv, tau_c, fmt("sigma=%.0fHz", hz), false);
        std::string curve;
        for (Preset p : comparison_presets()) {
            const auto &c = cv.at(p);
            curve += preset_name(p) + ":";
            for (std::size_t i = 0; i < c.tau.size(); i += 4) curve += fmt(" %.2g", c.rho[i]);
            curve += "; ";
        }
        rec.info(fmt("sigma=%.0fHz.curve", hz), "rho_ss at tau = 35.7 us, 0.17, 0.625, 2.08, 25 ms: " + curve);
    }
    // the other reading of the sigma units, reported only
    for (double hz : {284.0, 168.0}) {
        const auto cv = tau_sweep(hz, tau_c, n, rec.workers());
        criterion7_eval(rec, cv, tau_c, fmt("sigma=%.0frad/s", hz), true);
    }
}

// ---------------------------------------------------------------------------------------------
// 8: single excitation against the coherent state

void criterion8(Recorder &rec) {
    const std::vector<int> Ns = rec.full() ? std::vector<int>{4, 6, 8, 10} : std::vector<int>{4, 6, 8};
    const int draws = rec.full() ? 40 : 10;
    const double eps = 0.1 * pi;
    BroadeningParams b = fig3_line();
    std::map<Preset, std::vector<double>> mean_d;
    std::vector<double> agg;
    for (int N : Ns) {
        double worst = 0, worst_nonuniform = 0;
        std::map<Preset, double> sum;
        for (int s = 0; s < draws; ++s) {
            b.seed = 800 + static_cast<std::uint64_t>(s);
            const std::vector<double> delta = sample_detunings(b, static_cast<std::size_t>(N));
            std::vector<cplx> c(static_cast<std::size_t>(N));
            for (int k = 0; k < N; ++k) c[k] = std::polar(1 + 0.3 * std::sin(1.7 * k + s), 0.4 * k);
            const WStateSim uni = WStateSim::uniform(delta), non = WStateSim::with_amplitudes(c, delta);
            for (Preset p : all_presets()) {
                const SequenceSpec spec = SequenceSpec::preset(p, 100e-6);
                double dmax = 0;
                for (std::int64_t m = 1; m <= 5; ++m) {
                    const Metrics w = exact_w_metrics(uni, spec, eps, m);
                    const Metrics k = coherent_state_metrics(delta, spec, eps, m);
                    dmax = std::max({dmax, std::abs(w.rho_ss - k.rho_ss), std::abs(w.eta_coh - k.eta_coh)});
                    const Metrics wn = exact_w_metrics(non, spec, eps, m);
                    const Metrics kn = coherent_state_metrics(non.c, delta, spec, eps, m);
                    worst_nonuniform =
                        std::max({worst_nonuniform, std::abs(wn.rho_ss - kn.rho_ss), std::abs(wn.eta_coh - kn.eta_coh)});
                }
                worst = std::max(worst, dmax);
                sum[p] += dmax / draws;
            }
        }
        rec.check(fmt("N=%d.uniform", N), worst <= 2.0 / N, fmt("max discrepancy %.4f (limit 2/N = %.4f)", worst, 2.0 / N));
        rec.check(fmt("N=%d.nonuniform", N), worst_nonuniform <= 2.0 / N,
                  fmt("max discrepancy %.4f (limit %.4f)", worst_nonuniform, 2.0 / N));
        double a = 0;
        for (auto &[p, v] : sum) {
            mean_d[p].push_back(v);
            a = std::max(a, v);
        }
        agg.push_back(a);
    }
    std::vector<double> x(Ns.begin(), Ns.end());
    const PowerFit f = fit_power_law(x, agg);
    rec.check("scaling", std::abs(f.exponent + 1) <= 0.3,
              fmt("worst-sequence mean discrepancy falls as N^%.3f (expected -1 +- 0.3)", f.exponent));
    std::string per;
    for (auto &[p, v] : mean_d) per += fmt("%s %.2f; ", preset_name(p).c_str(), fit_power_law(x, v).exponent);
    rec.info("scaling.per_sequence", "exponents " + per);
}

// ---------------------------------------------------------------------------------------------
// 9: CP and CPMG after phase averaging

void criterion9(Recorder &rec) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0, 1);
    double worst = 0;
    for (int i = 0; i < 20; ++i) {
        const double tau = std::pow(10.0, -5 + 2 * u(rng));
        EnsembleConfig c;
        c.N = kInfiniteN;
        c.eps = (0.01 + 0.19 * u(rng)) * pi;
        c.broadening.gamma = (20 + 40 * u(rng)) / tau;
        c.m_checkpoints = {1 + static_cast<std::int64_t>(200 * u(rng))};
        c.spec = SequenceSpec::preset(Preset::CP, tau);
        const auto a = run_quadrature(c);
        c.spec = SequenceSpec::preset(Preset::CPMG, tau);
        const auto b = run_quadrature(c);
        worst = std::max({worst, std::abs(a[0].rho_ss - b[0].rho_ss), std::abs(a[0].eta_coh - b[0].eta_coh)});
    }
    rec.check("identical", worst <= 1e-12, fmt("max |difference| over 20 parameter sets %.3g (limit 1e-12)", worst));
}

// ---------------------------------------------------------------------------------------------
// 10: read-out layer

void criterion10(Recorder &rec) {
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(0, 1);
    double worst = 0;
    for (int i = 0; i < 200; ++i) {
        MemoryParams p;
        p.d_tilde = std::pow(10.0, -2 + 3.3 * u(rng));
        p.eta_D = u(rng);
        p.mu_in = 0.1 + 10 * u(rng);
        const double rho = std::pow(10.0, -8 + 7 * u(rng)), eta = u(rng);
        const double got = snr(p, eta, rho).value;
        const double want = -std::expm1(-p.d_tilde) * p.eta_D * p.mu_in * (eta / rho);
        worst = std::max(worst, std::abs(got - want) / std::max(std::abs(want), 1e-300));
    }
    rec.check("identity", worst <= 1e-12, fmt("max relative deviation %.3g (limit 1e-12)", worst));
    MemoryParams p;
    p.d_tilde = 1;
    const double pref = snr_from_ratio(p, 1.0).value;
    rec.check("prefactor.d=1", std::abs(pref - 0.63212) <= 5e-6, fmt("SNR / R = %.6f (expected 0.63212)", pref));
    p.d_tilde = 20;
    const double big = snr_from_ratio(p, 1000.0).value;
    rec.check("limit.d=20", std::abs(big / 1000.0 - 1) <= 1e-8, fmt("SNR / R - 1 = %.3g (limit 1e-8)", big / 1000.0 - 1));
}

using Runner = void (*)(Recorder &);

Runner runner(int c) {
    switch (c) {
        case 0: return invariants;
        case 1: return criterion1;
        case 2: return criterion2;
        case 3: return criterion3;
        case 4: return criterion4;
        case 5: return criterion5;
        case 6: return criterion6;
        case 7: return criterion7;
        case 8: return criterion8;
        case 9: return criterion9;
        case 10: return criterion10;
    }
    throw std::invalid_argument("no such criterion");
}

double runtime_limit(int c) {
    switch (c) {
        case 1: return 10;
        case 2: return 30;
        case 3: return 300;
        case 5: return 600;
        case 6: return 60;
        case 7: return 1800;
        case 8: return 120;
    }
    return 0;
}

}  // namespace

int VerifyReport::unexpected_failures() const {
    int n = 0;
    for (const auto &c : checks)
        if (!c.info && !c.passed && !c.known_failure) ++n;
    return n;
}

bool VerifyReport::criterion_passed(int criterion) const {
    for (const auto &c : checks)
        if (c.criterion == criterion && !c.info && !c.passed) return false;
    return true;
}

nlohmann::json VerifyReport::to_json() const {
    nlohmann::json j;
    j["level"] = level == VerifyLevel::Full ? "full" : "fast";
    j["unexpected_failures"] = unexpected_failures();
    nlohmann::json arr = nlohmann::json::array();
    for (const auto &c : checks) {
        arr.push_back({{"criterion", c.criterion},
                       {"id", c.id},
                       {"status", c.info ? "info" : c.passed ? "pass" : c.known_failure ? "known_failure" : "fail"},
                       {"detail", c.detail}});
    }
    j["checks"] = arr;
    nlohmann::json t = nlohmann::json::object();
    for (const auto &[k, v] : seconds) t[std::to_string(k)] = v;
    j["seconds"] = t;
    return j;
}

std::vector<int> criteria_for(VerifyLevel level) {
    if (level == VerifyLevel::Fast) return {0, 1, 2, 3, 6, 8, 9, 10};
    return {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
}

std::string criterion_title(int c) {
    switch (c) {
        case 0: return "oracle and pipeline invariants";
        case 1: return "identity at eps = 0";
        case 2: return "single-repetition rotation table";
        case 3: return "small-m exponents and coefficient ratios";
        case 4: return "large-m saturation";
        case 5: return "R against m";
        case 6: return "Ornstein-Uhlenbeck statistics";
        case 7: return "population against tau with OU noise";
        case 8: return "single excitation vs coherent state";
        case 9: return "CP and CPMG after phase averaging";
        case 10: return "memory read-out layer";
    }
    return "?";
}

VerifyReport run_verify(const VerifyOptions &options) {
    VerifyReport rep;
    rep.level = options.level;
    const std::vector<int> list = options.criteria.empty() ? criteria_for(options.level) : options.criteria;
    for (int c : list) {
        Recorder rec(options, rep, c);
        const auto t0 = std::chrono::steady_clock::now();
        try {
            runner(c)(rec);
        } catch (const std::exception &e) {
            rec.check("exception", false, e.what());
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rep.seconds[c] = s;
        const double lim = runtime_limit(c);
        if (lim > 0 && options.level == VerifyLevel::Full)
            rec.check("runtime", s < lim, fmt("%.1f s (limit %.0f s)", s, lim));
    }
    return rep;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("KS test needs two non-empty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double D = 0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        D = std::max(D, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double ne = na * nb / (na + nb);
    const double lam = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * D;
    // Kolmogorov distribution tail, 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2)
    double p = 0;
    if (lam < 0.2) {
        p = 1;
    } else {
        for (int k = 1; k <= 100; ++k) {
            const double t = 2 * ((k % 2) ? 1 : -1) * std::exp(-2.0 * k * k * lam * lam);
            p += t;
            if (std::abs(t) < 1e-12) break;
        }
    }
    return {D, std::clamp(p, 0.0, 1.0)};
}

void parse_coefficient_override(const std::string &text, std::map<Preset, RegimeExpansion> &out) {
    const auto colon = text.rfind(':');
    const auto eq = text.find('=');
    if (colon == std::string::npos || eq == std::string::npos || eq < colon)
        throw std::invalid_argument("override must look like SEQ:key=value, got " + text);
    const Preset p = parse_preset(text.substr(0, colon));
    const std::string key = text.substr(colon + 1, eq - colon - 1);
    const double v = std::stod(text.substr(eq + 1));
    if (!out.count(p)) out.emplace(p, expansion(p));
    RegimeExpansion &e = out.at(p);
    if (key == "rho_coef")
        e.rho_coef = v;
    else if (key == "coh_coef")
        e.coh_coef = v;
    else if (key == "rho_eps_exponent")
        e.rho_eps_exponent = static_cast<int>(v);
    else if (key == "coh_eps_exponent")
        e.coh_eps_exponent = static_cast<int>(v);
    else
        throw std::invalid_argument("unknown coefficient key " + key);
}

}  // namespace ddmem
