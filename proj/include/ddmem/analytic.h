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

#ifndef DDMEM_ANALYTIC_H
#define DDMEM_ANALYTIC_H

#include <cstdint>
#include <optional>

#include "ddmem/broadening.h"
#include "ddmem/sequences.h"

namespace ddmem {

/// Small-eps axis-angle parameters of one repetition.
struct AxisAngleApprox {
    /// false for the composite sequences, which only carry the leading eps exponent of alpha
    bool closed_form = true;
    double alpha = 0, theta = 0, phi = 0;
    int alpha_exponent = 0;
};

/// Closed forms with c_k = cos(k delta tau / 2), s_k = sin(k delta tau / 2).
/// The CPMG row is the one reproduced by the exact product for phases (0, pi): alpha = 2 s1 eps,
/// theta = pi/2 - c1 eps / 2, phi = pi/2.
AxisAngleApprox approx_axis_angle(Preset seq, double delta, double tau, double eps);

/// The rows exactly as tabulated in the literature. Differs from approx_axis_angle only for CPMG
/// (alpha = 2 c1 eps, theta = pi/2 - s1 eps / 2, phi = pi/2).
AxisAngleApprox printed_axis_angle(Preset seq, double delta, double tau, double eps);

enum class Regime { SmallM, LargeM };

/// Tabulated lowest-order expansions. Small m: coefficient * m^2 * eps^exponent.
struct RegimeExpansion {
    Preset seq;
    double rho_coef;
    int rho_m_exponent;
    int rho_eps_exponent;
    double coh_coef;
    int coh_eps_exponent;
    /// Large-m limits; only available for CP, XY4, XY8. rho limit = rho_large_coef * eps^rho_large_eps_exponent.
    std::optional<double> rho_large_coef;
    int rho_large_eps_exponent = 0;
    std::optional<double> coh_large;
};

/// Printed table entries. CPMG maps onto CP. Custom throws std::invalid_argument.
RegimeExpansion expansion(Preset seq);

/// Oracle-measured coefficient / printed coefficient, constant in m and eps.
struct ArbitrationRatio {
    double rho;
    double coh;
};
ArbitrationRatio arbitration_ratio(Preset seq);

/// nullopt where the table has no entry (large m for the composite sequences).
std::optional<double> analytic_population(Preset seq, std::int64_t m, double eps, Regime regime);
std::optional<double> analytic_coherence_loss(Preset seq, std::int64_t m, double eps, Regime regime);

/// Small-m overlay R = (1 - coherence loss) / population, using printed coefficients,
/// or coefficients scaled by arbitration_ratio when arbitrated is set.
double analytic_ratio_small_m(Preset seq, std::int64_t m, double eps, bool arbitrated);

/// Large-m limit: [avg sin^2 theta]^2 / rho with rho ~ avg sin^2 theta, clamped to [0, 1].
/// theta is the polar angle of the exact single-repetition axis, averaged adaptively over p(Delta).
double ratio_limit_large_m(Preset seq, const BroadeningParams &broadening, double tau, double eps);

}  // namespace ddmem

#endif
