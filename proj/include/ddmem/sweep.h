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

#ifndef DDMEM_SWEEP_H
#define DDMEM_SWEEP_H

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ddmem/config.h"

namespace ddmem {

/// One output row. Optional fields are analytic overlays, empty where no tabulated entry exists.
struct SweepRow {
    std::string sequence;
    std::string sigma_delta_units;
    std::int64_t m = 0;
    double tau_s = 0, t_s = 0;
    double rho_ss = 0, rho_ss_err = 0;
    double eta_coh = 0, eta_coh_err = 0;
    double R = 0, R_err = 0;
    double snr = 0;
    bool guard_flag = false;
    bool eta_coh_below = false;
    bool eta_crossing = false;
    bool noise_limited = false;
    double eta_artificial = 0, eta_artificial_err = 0;
    bool artificial_noise_limited = false;
    std::optional<double> rho_ss_analytic, eta_coh_analytic, R_analytic, R_analytic_arbitrated, R_large_m;

    bool operator==(const SweepRow &) const = default;
};

struct SweepOutput {
    std::vector<SweepRow> rows;
    /// distinct warnings in first-seen order
    std::vector<std::string> warnings;
};

/// Runs every sequence (and every sigma reading) over the configured axis. The repetition sweep records
/// all checkpoints of one run; the tau sweep uses m = round(total_time / (L tau)) at each tau.
SweepOutput run_sweep(const ExperimentConfig &config);

/// Replaces the snr column using the given memory parameters.
void apply_snr(std::vector<SweepRow> &rows, const MemoryParams &memory, std::vector<std::string> *warnings = nullptr);

}  // namespace ddmem

#endif
