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


#include "ddmem/analytic.h"

#include <cmath>
#include <numbers>

#include "ddmem/ensemble.h"
#include "ddmem/su2.h"
#include "gtest/gtest.h"

using namespace ddmem;
using std::numbers::pi;

TEST(table, cp_row) {
    const double eps = 0.01 * pi, tau = 1e-4, x = 0.8;
    const AxisAngleApprox a = approx_axis_angle(Preset::CP, x / tau, tau, eps);
    EXPECT_DOUBLE_EQ(a.alpha, 2 * std::cos(x / 2) * eps);
    EXPECT_DOUBLE_EQ(a.theta, pi / 2 - 0.5 * std::sin(x / 2) * eps);
    EXPECT_EQ(a.phi, 0.0);
}

TEST(table, xy4_row) {
    const double eps = 0.02, tau = 1e-4, x = 2.1;
    const AxisAngleApprox a = approx_axis_angle(Preset::XY4, x / tau, tau, eps);
    EXPECT_DOUBLE_EQ(a.alpha, std::cos(x) * eps * eps);
    EXPECT_DOUBLE_EQ(a.theta, (std::cos(x / 2) + std::sin(x / 2)) * eps / std::sqrt(2.0));
    EXPECT_DOUBLE_EQ(a.phi, pi / 4);
}

TEST(table, composites_have_no_closed_form) {
    EXPECT_FALSE(approx_axis_angle(Preset::U5a_CP, 1, 1e-4, 0.1).closed_form);
    EXPECT_EQ(approx_axis_angle(Preset::U5a_XY4, 1, 1e-4, 0.1).alpha_exponent, 6);
    EXPECT_THROW(approx_axis_angle(Preset::Custom, 1, 1e-4, 0.1), std::invalid_argument);
}

TEST(table, cpmg_row_reproduces_exact_product) {
    const double eps = 1e-3, tau = 1e-4;
    for (double x : {0.3, 1.1, 2.5, 4.0}) {
        const RotationRep r =
            canonical(to_axis_angle(sequence_su2(SequenceSpec::preset(Preset::CPMG, tau), x / tau, eps)));
        const AxisAngleApprox a = approx_axis_angle(Preset::CPMG, x / tau, tau, eps);
        EXPECT_NEAR(r.alpha, std::abs(a.alpha), 10 * eps * eps);
        const AxisAngleApprox printed = printed_axis_angle(Preset::CPMG, x / tau, tau, eps);
        EXPECT_EQ(printed.alpha, 2 * std::cos(x / 2) * eps);
    }
}

TEST(table, cp_at_node_is_second_order) {
    const double tau = 1e-4, x = pi;
    const SequenceSpec s = SequenceSpec::preset(Preset::CP, tau);
    EXPECT_NEAR(approx_axis_angle(Preset::CP, x / tau, tau, 0.01).alpha, 0, 1e-17);
    // at the node the two blocks cancel to every order
    EXPECT_LE(canonical(to_axis_angle(sequence_su2(s, x / tau, 0.01))).alpha, 1e-4);
    const double near = 3.1, eps = 0.01;
    const double exact = canonical(to_axis_angle(sequence_su2(s, near / tau, eps))).alpha;
    EXPECT_NEAR(exact / approx_axis_angle(Preset::CP, near / tau, tau, eps).alpha, 1, 5 * eps);
}

TEST(population, cp_small_m) {
    EXPECT_DOUBLE_EQ(*analytic_population(Preset::CP, 10, 0.01 * pi, Regime::SmallM), 100 * std::pow(0.01 * pi, 2));
    EXPECT_NEAR(*analytic_population(Preset::CP, 10, 0.01 * pi, Regime::SmallM), 9.8696e-2, 1e-6);
}

TEST(population, u5a_xy4_small_m) {
    const double v = *analytic_population(Preset::U5a_XY4, 10, 0.1 * pi, Regime::SmallM);
    EXPECT_NEAR(v, 0.67 * 100 * std::exp(18 * std::log(0.1 * pi)), 1e-20);
    EXPECT_NEAR(v, 5.9535e-8, 1e-11);
}

TEST(population, zero_repetitions) {
    for (Preset p : comparison_presets())
        for (Regime r : {Regime::SmallM, Regime::LargeM}) EXPECT_EQ(analytic_population(p, 0, 0.1, r).value_or(-1), 0.0);
}

TEST(population, large_m_entries) {
    EXPECT_DOUBLE_EQ(*analytic_population(Preset::CP, 5000, 0.1, Regime::LargeM), 1.0);
    EXPECT_DOUBLE_EQ(*analytic_population(Preset::XY4, 5000, 0.1, Regime::LargeM), 0.5 * 0.01);
    EXPECT_FALSE(analytic_population(Preset::U5a_CP, 5000, 0.1, Regime::LargeM).has_value());
}

TEST(coherence_loss, entries) {
    EXPECT_DOUBLE_EQ(*analytic_coherence_loss(Preset::XY4, 3, 0.1, Regime::SmallM), 0.5 * 9 * 1e-4);
    EXPECT_DOUBLE_EQ(*analytic_coherence_loss(Preset::XY4, 3000, 0.1, Regime::LargeM), 0.0);
    EXPECT_DOUBLE_EQ(*analytic_coherence_loss(Preset::CP, 3000, 0.1, Regime::LargeM), 0.5);
    for (Preset p : comparison_presets())
        for (Regime r : {Regime::SmallM, Regime::LargeM}) EXPECT_EQ(analytic_coherence_loss(p, 7, 0.0, r).value_or(-1), 0.0);
}

TEST(ratio, small_m_overlay) {
    const double eps = 0.1 * pi;
    const double rho = std::pow(eps, 2) * 4, loss = std::pow(eps, 2) * 4;
    EXPECT_DOUBLE_EQ(analytic_ratio_small_m(Preset::CP, 2, eps, false), (1 - loss) / rho);
    EXPECT_DOUBLE_EQ(analytic_ratio_small_m(Preset::CP, 2, eps, true), (1 - loss) / (0.5 * rho));
    EXPECT_TRUE(std::isinf(analytic_ratio_small_m(Preset::XY8, 2, 0.0, false)));
}

TEST(ratio, large_m_limit) {
    BroadeningParams b;
    b.gamma = 2 * pi * 27e3;
    const double tau = 1e-4;
    EXPECT_NEAR(ratio_limit_large_m(Preset::CP, b, tau, 0.01), 1, 1e-3);
    const double eps = 0.01 * pi;
    EXPECT_NEAR(ratio_limit_large_m(Preset::XY4, b, tau, eps) / (0.5 * eps * eps), 1, 0.05);
    for (Preset p : comparison_presets()) {
        const double r = ratio_limit_large_m(p, b, tau, 0.2);
        EXPECT_GE(r, 0);
        EXPECT_LE(r, 1);
    }
}

TEST(arbitration, every_sequence_has_ratios) {
    for (Preset p : comparison_presets()) {
        const ArbitrationRatio a = arbitration_ratio(p);
        EXPECT_EQ(a.rho, 0.5);
        EXPECT_EQ(a.coh, 1.0);
    }
    EXPECT_EQ(arbitration_ratio(Preset::CPMG).rho, 0.5);
    EXPECT_THROW(arbitration_ratio(Preset::Custom), std::invalid_argument);
}

TEST(expansion, cpmg_maps_onto_cp) {
    EXPECT_EQ(expansion(Preset::CPMG).rho_coef, expansion(Preset::CP).rho_coef);
    EXPECT_EQ(expansion(Preset::U5a_XY4).rho_eps_exponent, 18);
    EXPECT_EQ(expansion(Preset::U5a_XY4).coh_eps_exponent, 12);
}
