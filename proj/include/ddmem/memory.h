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

#ifndef DDMEM_MEMORY_H
#define DDMEM_MEMORY_H

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ddmem {

enum class Scheme { AfcBackward, AfcForward, Eit };

std::string scheme_name(Scheme s);
/// Accepts "AFC_backward", "AFC_forward", "EIT" (case-insensitive).
Scheme parse_scheme(std::string_view s);

struct MemoryParams {
    /// effective optical depth
    double d_tilde = 1.0;
    double eta_D = 1.0;
    Scheme scheme = Scheme::AfcBackward;
    double mu_in = 1.0;
    /// EIT constant; no default, EIT refuses to run without it
    std::optional<double> C;
    /// fraction of the storage-state population that reaches the excited state before emission
    double transfer = 1.0;

    void validate() const;
};

struct MemoryValue {
    double value = 0;
    std::vector<std::string> warnings;
};

/// Read-out efficiency of the scheme, clamped to [0, 1].
MemoryValue memory_efficiency(const MemoryParams &p);

/// (1 - e^{-d}) * transfer * rho_ss. Warns above 0.1 photons.
MemoryValue noise_photons(double d_tilde, double rho_ss, double transfer = 1.0);

/// mu_in eta_M eta_coh / mu_noise. +inf for rho_ss = 0 with eta_coh > 0, and 0 for eta_coh = 0.
MemoryValue snr(const MemoryParams &p, double eta_coh, double rho_ss);

/// snr() in terms of R directly, for rows where only R is available.
MemoryValue snr_from_ratio(const MemoryParams &p, double R);

}  // namespace ddmem

#endif
