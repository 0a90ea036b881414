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

#include "ddmem/broadening.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ddmem {

std::string shape_name(Shape s) { return s == Shape::Gaussian ? "gaussian" : "lorentzian"; }

Shape parse_shape(std::string_view s) {
    std::string k;
    for (char c : s) k.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (k == "gaussian") return Shape::Gaussian;
    if (k == "lorentzian") return Shape::Lorentzian;
    throw std::invalid_argument("unknown line shape '" + std::string(s) + "'");
}

void BroadeningParams::validate() const {
    if (!(gamma >= 0) || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be finite and >= 0");
    if (!(sigma_delta >= 0) || !std::isfinite(sigma_delta))
        throw std::invalid_argument("sigma_delta must be finite and >= 0");
    if (!(tau_c > 0) || !std::isfinite(tau_c)) throw std::invalid_argument("tau_c must be positive");
}

double BroadeningParams::gaussian_sigma() const { return gamma / std::sqrt(8.0 * std::numbers::ln2); }

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t spin, std::uint32_t tag) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(spin), static_cast<std::uint32_t>(spin >> 32), tag};
    engine_.seed(seq);
}

double RandomStream::uniform() {
    // 53 random bits, shifted off zero.
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double sample_detuning(const BroadeningParams &p, RandomStream &rng) {
    if (p.shape == Shape::Gaussian) return p.gaussian_sigma() * rng.gaussian();
    return 0.5 * p.gamma * std::tan(std::numbers::pi * (rng.uniform() - 0.5));
}

std::vector<double> sample_detunings(const BroadeningParams &p, std::size_t n) {
    if (n == 0) throw std::invalid_argument("sample count must be positive");
    p.validate();
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        RandomStream rng(p.seed, k);
        out[k] = sample_detuning(p, rng);
    }
    return out;
}

double ou_init(const BroadeningParams &p, RandomStream &rng) { return p.sigma_delta * rng.gaussian(); }

double ou_step(double delta, double dt, const BroadeningParams &p, RandomStream &rng) {
    const double mu = std::exp(-dt / p.tau_c);
    return delta * mu + p.sigma_delta * std::sqrt(-std::expm1(-2 * dt / p.tau_c)) * rng.gaussian();
}

OuIntegratedStep ou_step_integrated(double delta, double dt, const BroadeningParams &p, RandomStream &rng) {
    const double tc = p.tau_c, s2 = p.sigma_delta * p.sigma_delta;
    const double r = dt / tc;
    const double mu = std::exp(-r);
    const double one_minus_mu = -std::expm1(-r);
    const double var_x = s2 * -std::expm1(-2 * r);
    // 2r - 3 + 4mu - mu^2 = 2r - 2(1-mu) - (1-mu)^2, series for small r to avoid cancellation
    double bracket;
    if (r < 1e-3) {
        bracket = 2.0 / 3.0 * r * r * r * (1 - 0.75 * r + 0.35 * r * r);
    } else {
        bracket = 2 * r - 2 * one_minus_mu - one_minus_mu * one_minus_mu;
    }
    const double var_y = s2 * tc * tc * bracket;
    const double cov = s2 * tc * one_minus_mu * one_minus_mu;
    const double n1 = rng.gaussian(), n2 = rng.gaussian();
    OuIntegratedStep out{};
    if (var_x <= 0) {
        out.delta = delta * mu;
        out.phase = delta * tc * one_minus_mu;
        return out;
    }
    const double sx = std::sqrt(var_x);
    const double cond = std::max(var_y - cov * cov / var_x, 0.0);
    out.delta = delta * mu + sx * n1;
    out.phase = delta * tc * one_minus_mu + cov / sx * n1 + std::sqrt(cond) * n2;
    return out;
}

SpinState make_spin(const BroadeningParams &p, std::uint64_t spin_index, bool ou_enabled) {
    SpinState s{0.0, 0.0, RandomStream(p.seed, spin_index)};
    s.delta0 = sample_detuning(p, s.rng);
    s.delta_t = ou_enabled ? ou_init(p, s.rng) : 0.0;
    return s;
}

}  // namespace ddmem
