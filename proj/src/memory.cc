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

#include "ddmem/memory.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ddmem {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto &c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

// 1 - e^{-d} without cancellation at small d
double extraction(double d) { return -std::expm1(-d); }

// eta_M / (1 - e^{-d}); for backward AFC one extraction factor cancels exactly
double efficiency_per_extraction(const MemoryParams &p, double eta_M) {
    if (p.scheme == Scheme::AfcBackward) return extraction(p.d_tilde) * p.eta_D;
    return eta_M / extraction(p.d_tilde);
}

}  // namespace

std::string scheme_name(Scheme s) {
    switch (s) {
        case Scheme::AfcBackward: return "AFC_backward";
        case Scheme::AfcForward: return "AFC_forward";
        case Scheme::Eit: return "EIT";
    }
    return "?";
}

Scheme parse_scheme(std::string_view s) {
    const std::string l = lower(s);
    if (l == "afc_backward" || l == "afc-backward") return Scheme::AfcBackward;
    if (l == "afc_forward" || l == "afc-forward") return Scheme::AfcForward;
    if (l == "eit") return Scheme::Eit;
    throw std::invalid_argument("unknown memory scheme: " + std::string(s));
}

void MemoryParams::validate() const {
    if (!(d_tilde >= 0)) throw std::invalid_argument("d_tilde must be >= 0");
    if (!(eta_D >= 0 && eta_D <= 1)) throw std::invalid_argument("eta_D must lie in [0, 1]");
    if (!(mu_in > 0)) throw std::invalid_argument("mu_in must be > 0");
    if (!(transfer >= 0 && transfer <= 1)) throw std::invalid_argument("transfer must lie in [0, 1]");
    if (scheme == Scheme::Eit) {
        if (!C) throw std::invalid_argument("EIT scheme needs the constant C");
        if (!(*C >= 0)) throw std::invalid_argument("C must be >= 0");
    }
}

MemoryValue memory_efficiency(const MemoryParams &p) {
    p.validate();
    MemoryValue r;
    const double d = p.d_tilde;
    switch (p.scheme) {
        case Scheme::AfcBackward: {
            const double x = extraction(d);
            r.value = x * x * p.eta_D;
            break;
        }
        case Scheme::AfcForward:
            r.value = std::isinf(d) ? 0.0 : d * d * std::exp(-d) * p.eta_D;
            break;
        case Scheme::Eit:
            if (d == 0) {
                r.value = 0;
                r.warnings.push_back("EIT efficiency undefined at d_tilde = 0, using 0");
            } else {
                r.value = 1 - *p.C / d;
            }
            break;
    }
    r.value = std::clamp(r.value, 0.0, 1.0);
    return r;
}

MemoryValue noise_photons(double d_tilde, double rho_ss, double transfer) {
    MemoryValue r;
    r.value = extraction(d_tilde) * transfer * rho_ss;
    if (r.value > 0.1) r.warnings.push_back("noise photon number above 0.1, the single-photon noise model is stretched");
    return r;
}

MemoryValue snr(const MemoryParams &p, double eta_coh, double rho_ss) {
    MemoryValue eff = memory_efficiency(p);
    MemoryValue r;
    r.warnings = std::move(eff.warnings);
    if (eta_coh == 0 || eff.value == 0) {
        r.value = 0;
        return r;
    }
    const double x = extraction(p.d_tilde) * p.transfer;
    if (rho_ss <= 0 || x == 0) {
        r.value = std::numeric_limits<double>::infinity();
        return r;
    }
    MemoryValue noise = noise_photons(p.d_tilde, rho_ss, p.transfer);
    for (auto &w : noise.warnings) r.warnings.push_back(std::move(w));
    r.value = p.mu_in * efficiency_per_extraction(p, eff.value) / p.transfer * (eta_coh / rho_ss);
    return r;
}

MemoryValue snr_from_ratio(const MemoryParams &p, double R) {
    MemoryValue eff = memory_efficiency(p);
    MemoryValue r;
    r.warnings = std::move(eff.warnings);
    if (R == 0 || eff.value == 0) {
        r.value = 0;
        return r;
    }
    const double x = extraction(p.d_tilde) * p.transfer;
    if (std::isinf(R) || x == 0) {
        r.value = std::numeric_limits<double>::infinity();
        return r;
    }
    r.value = p.mu_in * efficiency_per_extraction(p, eff.value) / p.transfer * R;
    return r;
}

}  // namespace ddmem
