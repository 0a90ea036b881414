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


#include "ddmem/sequences.h"

#include <cmath>
#include <numbers>
#include <random>

#include "ddmem/su2.h"
#include "gtest/gtest.h"

using namespace ddmem;
using std::numbers::pi;

namespace {
const std::vector<Preset> kPresets = {Preset::CP, Preset::CPMG, Preset::XY4, Preset::XY8, Preset::U5a_CP, Preset::U5a_XY4};
}

TEST(building_block, zero_error_is_rotated_pulse) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int i = 0; i < 50; ++i) {
        const double phi = pi * u(rng), tau = 1e-4 * (1.1 + u(rng)), delta = 2 * pi * 5e4 * u(rng);
        const Unitary2 b = building_block(phi, tau, delta, 0);
        EXPECT_GT(trace_fidelity(b, pi_pulse(phi, 0)), 1 - 1e-12);
        EXPECT_GT(trace_fidelity(b * b, Unitary2::identity()), 1 - 1e-12);
    }
    EXPECT_GT(trace_fidelity(building_block(0.4, 1e-4, 0, 0), pi_pulse(0.4, 0)), 1 - 1e-15);
}

TEST(building_block, three_factor_product) {
    const double tau = 100e-6, delta = 2 * pi * 10e3, eps = 0.01 * pi;
    const Unitary2 v = free_evolution(delta, tau / 2);
    const Unitary2 want = compose(v, compose(pi_pulse(0, eps), v));
    const Unitary2 got = building_block(0, tau, delta, eps);
    EXPECT_LT(std::abs(got.m00 - want.m00) + std::abs(got.m01 - want.m01) + std::abs(got.m10 - want.m10) +
                  std::abs(got.m11 - want.m11),
              1e-14);
    EXPECT_GT(trace_fidelity(to_su2(got).to_unitary(), building_block_su2(0, tau, delta, eps).to_unitary()), 1 - 1e-14);
}

TEST(presets, phase_lists) {
    EXPECT_EQ(preset_phases(Preset::CP), (std::vector<double>{0, 0}));
    EXPECT_EQ(preset_phases(Preset::CPMG), (std::vector<double>{0, pi}));
    EXPECT_EQ(preset_phases(Preset::XY4), (std::vector<double>{0, pi / 2, 0, pi / 2}));
    EXPECT_EQ(preset_length(Preset::XY8), 8);
    EXPECT_EQ(preset_length(Preset::U5a_CP), 10);
    EXPECT_EQ(preset_length(Preset::U5a_XY4), 20);
    EXPECT_EQ(SequenceSpec::preset(Preset::U5a_XY4, 1e-4).L(), 20);
    const auto u = u5a_phases(0.0);
    ASSERT_EQ(u.size(), 5u);
    for (std::size_t i = 0; i < u.size(); ++i) EXPECT_DOUBLE_EQ(u[i], u[u.size() - 1 - i]);
}

TEST(presets, names_round_trip) {
    for (Preset p : kPresets) EXPECT_EQ(parse_preset(preset_name(p)), p);
    EXPECT_THROW(parse_preset("XY16"), std::invalid_argument);
    EXPECT_EQ(comparison_presets().size(), 5u);
}

TEST(materialize, single_pulse_custom) {
    const PulseProgram p = materialize(SequenceSpec::custom({0.0}, 1e-4));
    EXPECT_EQ(p.pulse_count(), 1);
    ASSERT_EQ(p.events.size(), 3u);
    EXPECT_NEAR(p.duration(), 1e-4, 1e-18);
}

TEST(materialize, merges_half_gaps) {
    const PulseProgram p = materialize(SequenceSpec::preset(Preset::XY4, 2e-4));
    EXPECT_EQ(p.pulse_count(), 4);
    EXPECT_EQ(p.events.size(), 9u);
    EXPECT_NEAR(p.duration(), 8e-4, 1e-15);
}

TEST(spec, validation) {
    EXPECT_THROW(SequenceSpec::custom({}, 1e-4), std::invalid_argument);
    EXPECT_THROW(SequenceSpec::custom({0.0}, -1.0), std::invalid_argument);
    EXPECT_THROW(SequenceSpec::custom({0.0, 1.0}, 1e-4, {0.1}), std::invalid_argument);
}

TEST(sequence, identity_at_zero_error) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1, 1);
    for (Preset p : kPresets) {
        for (int i = 0; i < 20; ++i) {
            const SequenceSpec s = SequenceSpec::preset(p, 1e-4 * (1.05 + u(rng)));
            EXPECT_GT(trace_fidelity(sequence_unitary(s, 2 * pi * 1e5 * u(rng), 0), Unitary2::identity()), 1 - 1e-12);
        }
    }
}

TEST(sequence, product_order) {
    // T = U(phi_L) ... U(phi_1): the first phase acts first
    const double tau = 1e-4, delta = 2 * pi * 2e3, eps = 0.05;
    const SequenceSpec s = SequenceSpec::custom({0.1, 0.9, 2.0}, tau);
    const Unitary2 want = building_block(2.0, tau, delta, eps) * building_block(0.9, tau, delta, eps) *
                          building_block(0.1, tau, delta, eps);
    EXPECT_GT(trace_fidelity(sequence_unitary(s, delta, eps), want), 1 - 1e-14);
    const Su2 a = sequence_su2(s, delta, eps);
    EXPECT_GT(trace_fidelity(a.to_unitary(), want), 1 - 1e-14);
}

TEST(sequence, per_pulse_errors) {
    const double tau = 1e-4, delta = 2 * pi * 1e3;
    const SequenceSpec s = SequenceSpec::custom({0.0, pi / 2}, tau, {0.01, 0.03});
    const Unitary2 want = building_block(pi / 2, tau, delta, 0.03) * building_block(0, tau, delta, 0.01);
    EXPECT_GT(trace_fidelity(sequence_unitary(s, delta, 99.0), want), 1 - 1e-14);
}

TEST(sequence, cp_small_error_axis) {
    const double eps = 0.01 * pi, tau = 1e-4, x = 1.0;
    const RotationRep r = canonical(to_axis_angle(sequence_su2(SequenceSpec::preset(Preset::CP, tau), x / tau, eps)));
    EXPECT_NEAR(r.alpha, 2 * std::cos(x / 2) * eps, 2 * eps * eps);
    EXPECT_NEAR(std::abs(r.theta() - pi / 2), 0.5 * std::sin(x / 2) * eps, eps * eps);
}

TEST(sequence, xy8_cubic_angle) {
    const double eps = 0.1 * pi, tau = 1e-4, delta = 0.7 / tau;
    const SequenceSpec s = SequenceSpec::preset(Preset::XY8, tau);
    const double a1 = canonical(to_axis_angle(sequence_su2(s, delta, eps))).alpha;
    // an independent smaller pair keeps higher orders out of the ratio
    const double b1 = canonical(to_axis_angle(sequence_su2(s, delta, eps / 10))).alpha;
    const double b2 = canonical(to_axis_angle(sequence_su2(s, delta, eps / 5))).alpha;
    EXPECT_NEAR(b2 / b1, 8, 0.4);
    const double a2 = canonical(to_axis_angle(sequence_su2(s, delta, 2 * eps))).alpha;
    EXPECT_GT(a2 / a1, 1);
}

TEST(first_order_cancellation, examples) {
    const std::vector<double> xy4 = {0, pi / 2, 0, pi / 2}, cp = {0, 0, 0, 0};
    EXPECT_TRUE(first_order_cancellation_check(xy4));
    EXPECT_FALSE(first_order_cancellation_check(cp));
    const std::vector<double> three = {0, 0, 0};
    EXPECT_THROW(first_order_cancellation_check(three), std::invalid_argument);
}

TEST(first_order_cancellation, constructed_sequence_is_second_order) {
    const double p1 = pi / 3, p3 = pi / 5;
    const std::vector<double> ph = {p1, (p3 + p1 + pi) / 2, p3, (3 * p3 - p1 + pi) / 2};
    EXPECT_TRUE(first_order_cancellation_check(ph));
    const SequenceSpec s = SequenceSpec::custom(ph, 1e-4);
    const double delta = 0.9e4;
    const Su2 t0 = sequence_su2(s, delta, 0);
    auto dev = [&](double e) {
        const Su2 d = sequence_su2(s, delta, e) * t0.adjoint();
        return canonical(to_axis_angle(d)).alpha / e;
    };
    EXPECT_LT(dev(1e-3), 0.2 * dev(1e-2) + 1e-9);
    EXPECT_LT(dev(1e-3), 1e-2);
}
