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

#ifndef DDMEM_QUADRATURE_H
#define DDMEM_QUADRATURE_H

#include <cstddef>
#include <functional>
#include <vector>

#include "ddmem/broadening.h"

namespace ddmem {

/// sum_j weights[j] f(nodes[j]) approximates the average of f over p(Delta).
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    double apply(const std::function<double(double)> &f) const;
};

/// n-point Gauss-Hermite rule for Normal(0, sigma^2).
QuadratureRule gauss_hermite_rule(double sigma, std::size_t n);

/// E[exp(i k Delta tau / 2)] under the line shape.
double characteristic(const BroadeningParams &p, double tau, int k);

/// Rule that is exact for any trigonometric polynomial sum_{|k| <= max_harmonic} c_k exp(i k Delta tau / 2).
/// Nodes sit on one 4 pi / tau period. Harmonics whose characteristic weight is below ~1e-18 are
/// dropped from the weights, which lets the node count shrink to max_harmonic + (kept harmonics) + 1.
QuadratureRule periodic_rule(const BroadeningParams &p, double tau, long max_harmonic);

/// Adaptive Gauss-Kronrod average of f over p(Delta). Gaussian: +-6 sigma window.
/// Lorentzian: substitution Delta = (gamma/2) tan u, truncated where the excluded mass drops below 1e-9.
double adaptive_average(const std::function<double(double)> &f, const BroadeningParams &p, double rel_tol = 1e-8);

}  // namespace ddmem

#endif
