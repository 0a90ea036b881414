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


#include "ddmem/oracle.h"

#include <cmath>
#include <numbers>

#include "ddmem/broadening.h"
#include "ddmem/ensemble.h"
#include "gtest/gtest.h"

using namespace ddmem;
using std::numbers::pi;

namespace {

BroadeningParams fig3_line(std::uint64_t seed = 3) {
    BroadeningParams b;
    b.gamma = 2 * pi * 27e3;
    b.seed = seed;
    return b;
}

}  // namespace

TEST(w_state, zero_error_is_stored_excitation) {
    const auto delta = sample_detunings(fig3_line(), 5);
    const Metrics m = exact_w_metrics(WStateSim::uniform(delta), SequenceSpec::preset(Preset::XY4, 1e-4), 0, 3);
    EXPECT_NEAR(m.rho_ss, 0.2, 1e-14);
    EXPECT_NEAR(m.eta_coh, 1, 1e-12);
}

TEST(w_state, refuses_large_systems) {
    EXPECT_THROW(WStateSim::uniform(std::vector<double>(13, 0.0)), std::length_error);
    EXPECT_THROW(WStateSim::with_amplitudes(std::vector<cplx>(3, 1.0), {0, 0}), std::invalid_argument);
}

TEST(w_state, amplitudes_normalised) {
    const WStateSim s = WStateSim::with_amplitudes({1.0, cplx(0, 2), 2.0}, {0, 1, 2});
    double n = 0;
    for (auto c : s.c) n += std::norm(c);
    EXPECT_NEAR(n, 1, 1e-15);
    const auto psi = s.initial_state();
    ASSERT_EQ(psi.size(), 8u);
    EXPECT_NEAR(std::abs(psi[1]), 1 / 3.0, 1e-15);
    EXPECT_EQ(psi[0], cplx(0));
}

TEST(w_state, single_atom_is_exact_spin) {
    // N = 1: the excitation sits on one spin, population follows |a|^2 of its propagator
    const SequenceSpec spec = SequenceSpec::preset(Preset::CP, 1e-4);
    const double d = 2 * pi * 3e3, eps = 0.2;
    const Metrics m = exact_w_metrics(WStateSim::uniform({d}), spec, eps, 4);
    const Su2 T = repeat(sequence_su2(spec, d, eps), 4);
    EXPECT_NEAR(m.rho_ss, 1 - T.flip_probability(), 1e-13);
}

TEST(w_state, close_to_coherent_state) {
    const SequenceSpec spec = SequenceSpec::preset(Preset::CP, 100e-6);
    for (int seed = 0; seed < 5; ++seed) {
        const auto delta = sample_detunings(fig3_line(100 + seed), 6);
        const Metrics w = exact_w_metrics(WStateSim::uniform(delta), spec, 0.1 * pi, 5);
        const Metrics c = coherent_state_metrics(delta, spec, 0.1 * pi, 5);
        EXPECT_NEAR(w.rho_ss, c.rho_ss, 1e-12);
        EXPECT_LE(std::abs(w.eta_coh - c.eta_coh), 2.0 / 6);
    }
}

TEST(w_state, nonuniform_amplitudes) {
    const SequenceSpec spec = SequenceSpec::preset(Preset::XY4, 100e-6);
    const auto delta = sample_detunings(fig3_line(7), 8);
    std::vector<cplx> c;
    for (int k = 0; k < 8; ++k) c.push_back(std::polar(1 + 0.3 * std::sin(1.7 * k), 0.4 * k));
    const WStateSim s = WStateSim::with_amplitudes(c, delta);
    for (std::int64_t m = 1; m <= 5; ++m) {
        const Metrics w = exact_w_metrics(s, spec, 0.1 * pi, m), k = coherent_state_metrics(s.c, delta, spec, 0.1 * pi, m);
        EXPECT_LE(std::abs(w.rho_ss - k.rho_ss), 0.25);
        EXPECT_LE(std::abs(w.eta_coh - k.eta_coh), 0.25);
    }
}

TEST(beta_average, zero_error) {
    const Metrics m = numeric_beta_average(SequenceSpec::preset(Preset::CP, 1e-4), 0, 123, 10, 64, 40);
    EXPECT_NEAR(m.rho_ss, 0, 1e-14);
    EXPECT_NEAR(m.eta_coh, 1, 1e-13);
}

TEST(beta_average, closed_form_and_grid_size) {
    for (Preset p : {Preset::CP, Preset::CPMG, Preset::XY4, Preset::XY8, Preset::U5a_CP, Preset::U5a_XY4}) {
        const SequenceSpec spec = SequenceSpec::preset(p, 1e-4);
        const double d = 2 * pi * 7e3, eps = 0.13 * pi, N = 9;
        const Metrics a = numeric_beta_average(spec, eps, d, 6, 64, N), b = numeric_beta_average(spec, eps, d, 6, 256, N);
        EXPECT_LT(std::abs(a.rho_ss - b.rho_ss), 1e-12);
        EXPECT_LT(std::abs(a.eta_coh - b.eta_coh), 1e-12);
        const Su2 T = repeat(sequence_su2(spec, d, eps), 6);
        EXPECT_NEAR(a.rho_ss, population_from_flip(T.flip_probability(), N), 1e-10);
        EXPECT_NEAR(a.eta_coh, coherence(T.heisenberg(), N).total(), 1e-10);
    }
    EXPECT_THROW(numeric_beta_average(SequenceSpec::preset(Preset::CP, 1e-4), 0.1, 0, 1, 32, 10), std::invalid_argument);
}

TEST(fit, power_law) {
    std::vector<double> x, y;
    for (double v : {1.0, 2.0, 4.0, 8.0}) {
        x.push_back(v);
        y.push_back(3 * v * v * v);
    }
    const PowerFit f = fit_power_law(x, y);
    EXPECT_NEAR(f.exponent, 3, 1e-12);
    EXPECT_NEAR(f.prefactor, 3, 1e-10);
    EXPECT_EQ(f.points, 4u);
}

TEST(fit, quadratic_correction) {
    std::vector<double> x, y;
    for (double v : {0.1, 0.15, 0.2, 0.3, 0.4}) {
        x.push_back(v);
        y.push_back(std::pow(v, 6) * std::exp(-2 * v * v));
    }
    EXPECT_NEAR(fit_power_law(x, y, true).exponent, 6, 1e-10);
    EXPECT_GT(std::abs(fit_power_law(x, y).exponent - 6), 1e-3);
}

TEST(arbitrate, cp_constant_over_m) {
    const auto r = arbitrate_constants(Preset::CP, {0.0005 * pi}, {2, 4, 8, 16, 32, 64}, fig3_line(), 100e-6);
    EXPECT_TRUE(r.rho_ratio_constant);
    EXPECT_LE(r.rho_ratio_spread, 0.10);
    EXPECT_NEAR(r.rho_m.exponent, 2, 0.02);
    for (const auto &p : r.points) EXPECT_FALSE(p.excluded);
}

TEST(arbitrate, xy4_eps_exponent) {
    const auto r = arbitrate_constants(Preset::XY4, {0.01 * pi, 0.02 * pi, 0.04 * pi}, {2}, fig3_line(), 100e-6);
    EXPECT_NEAR(r.rho_eps.exponent, 6, 0.2);
}

TEST(arbitrate, u5a_xy4_eps_exponent) {
    const auto r =
        arbitrate_constants(Preset::U5a_XY4, {0.1 * pi, 0.125 * pi, 0.15 * pi, 0.2 * pi}, {2}, fig3_line(), 100e-6);
    EXPECT_NEAR(r.rho_eps.exponent, 18, 1);
    EXPECT_NEAR(r.coh_eps.exponent, 12, 1);
}

TEST(arbitrate, excludes_saturated_points) {
    const auto r = arbitrate_constants(Preset::CP, {0.02 * pi}, {2, 3, 50}, fig3_line(), 100e-6);
    ASSERT_EQ(r.points.size(), 3u);
    EXPECT_FALSE(r.points[1].excluded);
    EXPECT_TRUE(r.points[2].excluded);
    EXPECT_FALSE(r.notes.empty());
}
