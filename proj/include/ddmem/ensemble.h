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

#ifndef DDMEM_ENSEMBLE_H
#define DDMEM_ENSEMBLE_H

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "ddmem/broadening.h"
#include "ddmem/sequences.h"
#include "ddmem/su2.h"

namespace ddmem {

inline constexpr double kInfiniteN = std::numeric_limits<double>::infinity();

/// How the OU offset enters the phase of a gap.
enum class OuPhaseModel {
    /// offset sampled at the start of each sub-step and held constant across it (one normal per step)
    PiecewiseConstant,
    /// exact joint update of the offset and its integral (two normals per step)
    ExactIntegral,
};

struct EnsembleConfig {
    std::size_t n_sample = 10000;
    /// physical atom number, kInfiniteN drops the 1/N terms
    double N = kInfiniteN;
    SequenceSpec spec;
    double eps = 0.0;
    BroadeningParams broadening;
    std::vector<std::int64_t> m_checkpoints{1};
    bool ou_enabled = false;
    /// sub-steps per tau/2 gap
    int ou_substeps = 1;
    OuPhaseModel ou_model = OuPhaseModel::PiecewiseConstant;
    /// 0: DDMEM_WORKERS, else hardware concurrency
    unsigned workers = 0;
    double guard_threshold = 0.01;
    double eta_threshold = 0.9;
    /// delete-one-block jackknife errors in addition to the linearised ones
    bool jackknife = false;

    void validate() const;
};

enum class GuardStatus { Ok, Warn };

struct EnsembleResult {
    std::int64_t m = 0;
    /// t = m L tau [s]
    double t = 0;
    HeisenbergMatrix G;
    HeisenbergMatrix G_err = HeisenbergMatrix::zero();
    /// ensemble mean of |<g|T|s>|^2, equal to (1 - G_zz)/2 without the cancellation
    double flip = 0, flip_err = 0;
    double rho_ss = 0, rho_ss_err = 0;
    /// signal coherence, (G_xx^2 + G_xy^2 + G_yx^2 + G_yy^2) / 2
    double eta_coh = 1, eta_coh_err = 0;
    /// coherence created by the pulses themselves, reported apart from eta_coh
    double eta_artificial = 0, eta_artificial_err = 0;
    /// true when eta_artificial is within 3 standard errors of its sampling bias
    bool artificial_noise_limited = false;
    double R = std::numeric_limits<double>::infinity(), R_err = 0;
    /// rho_ss no larger than its standard error
    bool noise_limited = false;
    bool eta_below_threshold = false;
    /// first checkpoint where eta_coh falls below the threshold
    bool eta_crossing = false;
    GuardStatus guard = GuardStatus::Ok;
    double guard_value = 0;
    /// jackknife errors, NaN unless requested
    double rho_ss_jk = std::numeric_limits<double>::quiet_NaN();
    double eta_coh_jk = std::numeric_limits<double>::quiet_NaN();
    double R_jk = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::string> warnings;
};

/// rho_ss from a flip probability: (1 - 2/N) flip. Equal to the beta-averaged population of |s>
/// minus its initial value 1/N for the input state sqrt(1-1/N)|g> + e^{i beta} N^{-1/2}|s>.
double population_from_flip(double flip, double N);
/// rho_ss from G; loses precision below ~1e-16. Prefer EnsembleResult::rho_ss.
double population(const HeisenbergMatrix &G, double N);

/// Coefficient of (G_xz^2 + G_yz^2) after normalising the beta-averaged coherence to its initial value:
/// N (1 - 2/N)^2 / (4 (1 - 1/N)), approximately N/4.
double artificial_coherence_coefficient(double N);

struct Coherence {
    double signal;      // (G_xx^2 + G_xy^2 + G_yx^2 + G_yy^2)/2
    double artificial;  // artificial_coherence_coefficient(N) (G_xz^2 + G_yz^2)
    double total() const { return signal + artificial; }
};
Coherence coherence(const HeisenbergMatrix &G, double N);

struct RatioResult {
    double R;
    bool noise_limited;
};
/// R = eta / rho; +inf when rho <= 0. noise_limited when rho <= rho_err.
RatioResult ratio(double eta_coh, double rho_ss, double rho_err = 0.0);

double collective_emission_value(double N, double gamma, double tau);
/// Warn when N exp(-gamma^2 tau^2 / 2) > threshold. N = 1 is always ok.
GuardStatus collective_emission_guard(double N, double gamma, double tau, double threshold = 0.01);

struct OuOptions {
    BroadeningParams params;
    int substeps = 1;
    OuPhaseModel model = OuPhaseModel::PiecewiseConstant;
};

/// Propagator of one spin over m repetitions. With ou set, every gap advances the spin's own OU offset
/// (a time-ordered product); otherwise the single-repetition propagator is raised to the m-th power.
Su2 propagate_spin_su2(SpinState &spin, const SequenceSpec &spec, double eps, std::int64_t m,
                       const OuOptions *ou = nullptr);
HeisenbergMatrix propagate_spin(SpinState &spin, const SequenceSpec &spec, double eps, std::int64_t m,
                                const OuOptions *ou = nullptr);

struct GAverage {
    HeisenbergMatrix mean;
    HeisenbergMatrix error = HeisenbergMatrix::zero();
    double flip = 0, flip_err = 0;
    std::size_t n = 0;
};
/// Static-detuning average over the given spins (at least 100). Spins are copied, not advanced.
GAverage average_G(const std::vector<SpinState> &spins, const SequenceSpec &spec, double eps, std::int64_t m);

/// Monte Carlo over n_sample spins keyed by (seed, spin index). Bit-identical for any worker count.
std::vector<EnsembleResult> run_experiment(const EnsembleConfig &config);

enum class QuadratureKind { Periodic, GaussHermite };

/// Deterministic inhomogeneous average with OU disabled. Periodic is exact for Gaussian and Lorentzian
/// lines; GaussHermite (Gaussian only) is accurate only while Gamma tau m stays small.
std::vector<EnsembleResult> run_quadrature(const EnsembleConfig &config, QuadratureKind kind = QuadratureKind::Periodic,
                                           std::size_t gh_nodes = 200);

/// Default checkpoints: integers log-spaced from 1 to m_max, per_decade points per decade.
std::vector<std::int64_t> log_checkpoints(std::int64_t m_max, int per_decade = 8);

/// Worker count: explicit value, else DDMEM_WORKERS, else hardware concurrency (at least 1).
unsigned resolve_workers(unsigned requested);

}  // namespace ddmem

#endif
