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

#ifndef DDMEM_BROADENING_H
#define DDMEM_BROADENING_H

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace ddmem {

enum class Shape { Gaussian, Lorentzian };

std::string shape_name(Shape s);
Shape parse_shape(std::string_view s);

struct BroadeningParams {
    Shape shape = Shape::Gaussian;
    /// Inhomogeneous FWHM [rad/s].
    double gamma = 0.0;
    /// Stationary width of the Ornstein-Uhlenbeck offset [rad/s].
    double sigma_delta = 0.0;
    /// Correlation time [s].
    double tau_c = 1.0;
    std::uint64_t seed = 1;

    void validate() const;
    /// Standard deviation of the Gaussian line, gamma / sqrt(8 ln 2).
    double gaussian_sigma() const;
};

/// Per-spin stream keyed by (seed, spin index, stream tag). Draw order within a stream is fixed,
/// so (seed, spin, step) determines every number.
class RandomStream {
  public:
    RandomStream(std::uint64_t seed, std::uint64_t spin, std::uint32_t tag = 0);

    double gaussian() { return normal_(engine_); }
    /// Uniform on the open interval (0, 1).
    double uniform();

  private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_;
};

double sample_detuning(const BroadeningParams &p, RandomStream &rng);

/// Spin k uses the first draw of RandomStream(seed, k), the same draw the ensemble engine uses.
/// Throws std::invalid_argument for n = 0.
std::vector<double> sample_detunings(const BroadeningParams &p, std::size_t n);

/// Draws from the stationary law Normal(0, sigma_delta^2).
double ou_init(const BroadeningParams &p, RandomStream &rng);

/// Exact transition: delta e^{-dt/tau_c} + sigma_delta sqrt(1 - e^{-2 dt/tau_c}) nu.
double ou_step(double delta, double dt, const BroadeningParams &p, RandomStream &rng);

struct OuIntegratedStep {
    double delta;  // offset at the end of the step
    double phase;  // integral of the offset over the step [rad]
};

/// Joint exact update of the offset and its time integral: two normals per step.
OuIntegratedStep ou_step_integrated(double delta, double dt, const BroadeningParams &p, RandomStream &rng);

struct SpinState {
    double delta0 = 0.0;
    double delta_t = 0.0;
    RandomStream rng;
};

/// Draws the static detuning, then the stationary OU start when ou_enabled.
SpinState make_spin(const BroadeningParams &p, std::uint64_t spin_index, bool ou_enabled);

}  // namespace ddmem

#endif
