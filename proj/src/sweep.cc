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

#include "ddmem/sweep.h"

#include <algorithm>
#include <cmath>

#include "ddmem/analytic.h"

namespace ddmem {

namespace {

void note(std::vector<std::string> &out, const std::string &w) {
    if (std::find(out.begin(), out.end(), w) == out.end()) out.push_back(w);
}

SweepRow to_row(const std::string &sequence, SigmaUnits units, double tau, const EnsembleResult &r) {
    SweepRow row;
    row.sequence = sequence;
    row.sigma_delta_units = sigma_units_name(units);
    row.m = r.m;
    row.tau_s = tau;
    row.t_s = r.t;
    row.rho_ss = r.rho_ss;
    row.rho_ss_err = r.rho_ss_err;
    row.eta_coh = r.eta_coh;
    row.eta_coh_err = r.eta_coh_err;
    row.R = r.R;
    row.R_err = r.R_err;
    row.guard_flag = r.guard == GuardStatus::Warn;
    row.eta_coh_below = r.eta_below_threshold;
    row.eta_crossing = r.eta_crossing;
    row.noise_limited = r.noise_limited;
    row.eta_artificial = r.eta_artificial;
    row.eta_artificial_err = r.eta_artificial_err;
    row.artificial_noise_limited = r.artificial_noise_limited;
    return row;
}

void add_overlays(SweepRow &row, Preset p, double eps, std::optional<double> large_m) {
    if (p == Preset::Custom) return;
    row.rho_ss_analytic = analytic_population(p, row.m, eps, Regime::SmallM);
    row.eta_coh_analytic = 1 - *analytic_coherence_loss(p, row.m, eps, Regime::SmallM);
    row.R_analytic = analytic_ratio_small_m(p, row.m, eps, false);
    row.R_analytic_arbitrated = analytic_ratio_small_m(p, row.m, eps, true);
    row.R_large_m = large_m;
}

}  // namespace

SweepOutput run_sweep(const ExperimentConfig &config) {
    config.validate();
    SweepOutput out;
    const std::vector<SigmaUnits> readings =
        config.ou_enabled ? config.sigma_readings() : std::vector<SigmaUnits>{config.sigma_readings().front()};
    const std::vector<double> taus =
        config.sweep == SweepAxis::Tau ? config.tau_grid() : std::vector<double>{config.tau()};
    for (const SequenceEntry &entry : config.sequences) {
        for (SigmaUnits units : readings) {
            for (double tau : taus) {
                EnsembleConfig ec;
                ec.n_sample = config.n_sample;
                ec.N = config.N;
                ec.spec = entry.spec(tau);
                ec.eps = config.eps();
                ec.broadening = config.broadening(units);
                ec.ou_enabled = config.ou_enabled;
                ec.ou_substeps = config.ou_substeps;
                ec.ou_model = config.ou_model;
                ec.workers = config.workers;
                ec.guard_threshold = config.guard_threshold;
                ec.jackknife = config.jackknife;
                if (config.sweep == SweepAxis::Tau) {
                    const double reps = config.total_time_s / (ec.spec.L() * tau);
                    ec.m_checkpoints = {std::max<std::int64_t>(1, std::llround(reps))};
                } else {
                    ec.m_checkpoints = config.checkpoints();
                }
                const auto results =
                    config.engine == Engine::Quadrature ? run_quadrature(ec) : run_experiment(ec);
                std::optional<double> large_m;
                if (entry.preset != Preset::Custom)
                    large_m = ratio_limit_large_m(entry.preset, ec.broadening, tau, ec.eps);
                for (const auto &r : results) {
                    SweepRow row = to_row(entry.name, units, tau, r);
                    add_overlays(row, entry.preset, ec.eps, large_m);
                    for (const auto &w : r.warnings) note(out.warnings, entry.name + ": " + w);
                    out.rows.push_back(std::move(row));
                }
            }
        }
    }
    apply_snr(out.rows, config.memory, &out.warnings);
    return out;
}

void apply_snr(std::vector<SweepRow> &rows, const MemoryParams &memory, std::vector<std::string> *warnings) {
    std::vector<std::string> sink;
    auto &w = warnings ? *warnings : sink;
    for (auto &row : rows) {
        const MemoryValue v = snr(memory, row.eta_coh, row.rho_ss);
        row.snr = v.value;
        for (const auto &msg : v.warnings) note(w, msg);
    }
}

}  // namespace ddmem
