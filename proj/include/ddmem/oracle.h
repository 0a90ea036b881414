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

#ifndef DDMEM_ORACLE_H
#define DDMEM_ORACLE_H

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ddmem/analytic.h"
#include "ddmem/broadening.h"
#include "ddmem/sequences.h"
#include "ddmem/su2.h"

namespace ddmem {

inline constexpr int kMaxWStateAtoms = 12;

/// Single excitation shared over N atoms, sum_k c_k |g...s_k...g>, each atom with its own detuning.
/// Bit k of a basis index is set when atom k is in |s>.
struct WStateSim {
    int N = 0;
    std::vector<cplx> c;
    std::vector<double> delta;

    /// c_k = 1/sqrt(N). Throws std::length_error for N > 12.
    static WStateSim uniform(const std::vector<double> &delta);
    /// Normalises c. Throws std::length_error for N > 12, std::invalid_argument on size mismatch.
    static WStateSim with_amplitudes(std::vector<cplx> c, const std::vector<double> &delta);

    std::vector<cplx> initial_state() const;
};

struct Metrics {
    /// mean single-atom population of |s>, including the stored 1/N
    double rho_ss = 0;
    double eta_coh = 0;
};

/// Exact state-vector evolution under the product of every atom's m-repetition propagator.
/// eta_coh = <S+ S-> with read-out phases -arg c_k, normalised to its initial value.
/// Throws std::length_error for N > 12 and std::runtime_error if the norm drifts by more than 1e-12.
Metrics exact_w_metrics(const WStateSim &sim, const SequenceSpec &spec, double eps, std::int64_t m);

/// Product state with atom k in sqrt(1 - |c_k|^2)|g> + e^{i beta} c_k |s>, evolved on the same detunings,
/// beta-averaged in closed form. The coherence keeps every term of <S+ S-> (the incoherent diagonal and the
/// artificial coherence), normalised to its initial value. This is what exact_w_metrics is compared against.
Metrics coherent_state_metrics(const std::vector<cplx> &c, const std::vector<double> &delta, const SequenceSpec &spec,
                               double eps, std::int64_t m);
/// Uniform amplitudes 1/sqrt(N), N = delta.size().
Metrics coherent_state_metrics(const std::vector<double> &delta, const SequenceSpec &spec, double eps, std::int64_t m);

/// Brute-force beta average for one spin prepared in sqrt(1 - 1/N)|g> + e^{i beta} N^{-1/2}|s>, trapezoid rule
/// with n_beta points. Returns the population excess over 1/N and the coherence normalised to its initial value
/// (artificial term included). Requires n_beta >= 64 and finite N >= 2.
Metrics numeric_beta_average(const SequenceSpec &spec, double eps, double delta, std::int64_t m, int n_beta, double N);

struct PowerFit {
    double exponent = 0;
    double exponent_err = 0;
    double prefactor = 0;
    std::size_t points = 0;
};

/// Least-squares fit of log y = a + b log x. With quadratic_correction, log y = a + b log x + c x^2,
/// which absorbs the next order of a series in x; needs at least four points.
PowerFit fit_power_law(const std::vector<double> &x, const std::vector<double> &y, bool quadratic_correction = false);

struct ArbitrationPoint {
    double eps = 0;
    std::int64_t m = 0;
    double alpha_m = 0;
    double rho_ss = 0, coh_loss = 0;
    /// measured / printed
    double rho_ratio = 0, coh_ratio = 0;
    bool excluded = false;
};

struct ArbitrationReport {
    Preset seq = Preset::CP;
    std::vector<ArbitrationPoint> points;
    PowerFit rho_m;     // at the smallest eps
    PowerFit rho_eps;   // at the smallest m
    PowerFit coh_eps;   // at the smallest m
    /// max/min - 1 of the ratios across m at fixed eps, worst eps
    double rho_ratio_spread = 0, coh_ratio_spread = 0;
    /// mean ratio at the smallest eps
    double rho_ratio_mean = 0, coh_ratio_mean = 0;
    bool rho_ratio_constant = false, coh_ratio_constant = false;
    std::vector<std::string> notes;
};

/// Measures small-m coefficients with the exact periodic quadrature and compares them with the printed
/// expansion. Points with alpha m > 0.3 (alpha the rms single-repetition angle) are excluded and noted.
/// expansion_override replaces the printed coefficients, for mutation tests.
ArbitrationReport arbitrate_constants(Preset seq, const std::vector<double> &eps_list,
                                      const std::vector<std::int64_t> &m_list, const BroadeningParams &broadening,
                                      double tau, const RegimeExpansion *expansion_override = nullptr,
                                      double constant_tol = 0.10);

}  // namespace ddmem

#endif
