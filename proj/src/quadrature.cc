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

#include "ddmem/quadrature.h"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>

namespace ddmem {

using std::numbers::pi;

double QuadratureRule::apply(const std::function<double(double)> &f) const {
    double s = 0;
    for (std::size_t j = 0; j < nodes.size(); ++j) s += weights[j] * f(nodes[j]);
    return s;
}

QuadratureRule gauss_hermite_rule(double sigma, std::size_t n) {
    if (n == 0) throw std::invalid_argument("Gauss-Hermite rule needs at least one node");
    QuadratureRule rule;
    if (sigma == 0) {
        rule.nodes = {0.0};
        rule.weights = {1.0};
        return rule;
    }
    // weight exp(-x^2) on the real line
    std::unique_ptr<gsl_integration_fixed_workspace, decltype(&gsl_integration_fixed_free)> w(
        gsl_integration_fixed_alloc(gsl_integration_fixed_hermite, n, 0.0, 1.0, 0.0, 0.0),
        &gsl_integration_fixed_free);
    if (!w) throw std::runtime_error("gsl_integration_fixed_alloc failed");
    const double *x = gsl_integration_fixed_nodes(w.get());
    const double *wt = gsl_integration_fixed_weights(w.get());
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        rule.nodes[j] = std::sqrt(2.0) * sigma * x[j];
        rule.weights[j] = wt[j] / std::sqrt(pi);
    }
    return rule;
}

double characteristic(const BroadeningParams &p, double tau, int k) {
    const double u = 0.5 * k * tau;
    if (p.shape == Shape::Gaussian) {
        const double s = p.gaussian_sigma() * u;
        return std::exp(-0.5 * s * s);
    }
    return std::exp(-0.5 * p.gamma * std::abs(u));
}

QuadratureRule periodic_rule(const BroadeningParams &p, double tau, long max_harmonic) {
    if (!(tau > 0)) throw std::invalid_argument("tau must be positive");
    if (max_harmonic < 0) throw std::invalid_argument("max_harmonic must be non-negative");
    std::vector<double> phi{1.0};
    for (long k = 1; k <= max_harmonic; ++k) {
        double c = characteristic(p, tau, static_cast<int>(k));
        if (c < 1e-18) break;
        phi.push_back(c);
    }
    const long kept = static_cast<long>(phi.size()) - 1;
    // a harmonic k' of the integrand aliases to k' - n; it must land beyond the kept weights
    const long n = max_harmonic + kept + 1;
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (long j = 0; j < n; ++j) {
        const double x = 4 * pi * static_cast<double>(j) / static_cast<double>(n);
        double w = 1.0;
        for (long k = 1; k <= kept; ++k) w += 2 * phi[k] * std::cos(0.5 * k * x);
        rule.nodes[j] = x / tau;
        rule.weights[j] = w / static_cast<double>(n);
    }
    return rule;
}

namespace {

struct Closure {
    const std::function<double(double)> *f;
    double scale;
    bool lorentz;
};

double gaussian_integrand(double x, void *params) {
    const auto *c = static_cast<const Closure *>(params);
    return (*c->f)(c->scale * x) * std::exp(-0.5 * x * x) / std::sqrt(2 * pi);
}

double lorentz_integrand(double u, void *params) {
    const auto *c = static_cast<const Closure *>(params);
    return (*c->f)(c->scale * std::tan(u)) / pi;
}

}  // namespace

double adaptive_average(const std::function<double(double)> &f, const BroadeningParams &p, double rel_tol) {
    if (p.gamma == 0) return f(0.0);
    gsl_error_handler_t *old = gsl_set_error_handler_off();
    const std::size_t limit = 20000;
    std::unique_ptr<gsl_integration_workspace, decltype(&gsl_integration_workspace_free)> ws(
        gsl_integration_workspace_alloc(limit), &gsl_integration_workspace_free);
    double result = 0, abserr = 0;
    gsl_function F;
    if (p.shape == Shape::Gaussian) {
        Closure c{&f, p.gaussian_sigma(), false};
        F.function = &gaussian_integrand;
        F.params = &c;
        gsl_integration_qag(&F, -6.0, 6.0, 0.0, rel_tol, limit, GSL_INTEG_GAUSS61, ws.get(), &result, &abserr);
    } else {
        Closure c{&f, 0.5 * p.gamma, true};
        F.function = &lorentz_integrand;
        F.params = &c;
        const double cut = 0.5 * pi * 1e-9;  // excluded probability mass 1e-9
        gsl_integration_qag(&F, -0.5 * pi + cut, 0.5 * pi - cut, 0.0, rel_tol, limit, GSL_INTEG_GAUSS61, ws.get(),
                            &result, &abserr);
    }
    gsl_set_error_handler(old);
    return result;
}

}  // namespace ddmem
