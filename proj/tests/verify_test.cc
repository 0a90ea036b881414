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


#include "ddmem/verify.h"

#include <cmath>
#include <random>

#include "gtest/gtest.h"

using namespace ddmem;

TEST(ks, identical_and_shifted) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    std::vector<double> a(4000), b(4000), c(4000);
    for (auto &x : a) x = g(rng);
    for (auto &x : b) x = g(rng);
    for (auto &x : c) x = g(rng) + 0.2;
    EXPECT_GT(ks_two_sample(a, b).p, 0.01);
    EXPECT_LT(ks_two_sample(a, c).p, 1e-6);
    EXPECT_EQ(ks_two_sample(a, a).D, 0.0);
    EXPECT_THROW(ks_two_sample({}, a), std::invalid_argument);
}

TEST(ks, statistic_by_hand) {
    // empirical CDFs differ by at most 2/4 between {1,2,3,4} and {3,4,5,6}
    EXPECT_DOUBLE_EQ(ks_two_sample({1, 2, 3, 4}, {3, 4, 5, 6}).D, 0.5);
    EXPECT_DOUBLE_EQ(ks_two_sample({1, 2}, {3, 4}).D, 1.0);
}

TEST(ks, null_p_values_are_uniform) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0, 1);
    int below = 0;
    const int trials = 400;
    for (int t = 0; t < trials; ++t) {
        std::vector<double> a(500), b(500);
        for (auto &x : a) x = u(rng);
        for (auto &x : b) x = u(rng);
        if (ks_two_sample(a, b).p < 0.1) ++below;
    }
    EXPECT_NEAR(below / static_cast<double>(trials), 0.1, 0.05);
}

TEST(overrides, parse) {
    std::map<Preset, RegimeExpansion> m;
    parse_coefficient_override("XY4:rho_coef=0.2", m);
    parse_coefficient_override("U5a:CP:coh_coef=1.5", m);
    EXPECT_EQ(m.at(Preset::XY4).rho_coef, 0.2);
    EXPECT_EQ(m.at(Preset::XY4).coh_coef, 0.5);
    EXPECT_EQ(m.at(Preset::U5a_CP).coh_coef, 1.5);
    EXPECT_THROW(parse_coefficient_override("XY4=0.2", m), std::invalid_argument);
    EXPECT_THROW(parse_coefficient_override("XY4:gamma=1", m), std::invalid_argument);
}

TEST(verify, cheap_criteria_pass) {
    VerifyOptions o;
    o.criteria = {1, 9, 10};
    const VerifyReport r = run_verify(o);
    EXPECT_EQ(r.unexpected_failures(), 0);
    EXPECT_TRUE(r.criterion_passed(1));
    const auto j = r.to_json();
    EXPECT_EQ(j["unexpected_failures"], 0);
    EXPECT_FALSE(j["checks"].empty());
}

TEST(verify, tampered_coefficient_is_named) {
    VerifyOptions o;
    o.criteria = {3};
    parse_coefficient_override("XY8:rho_coef=0.5", o.coefficient_overrides);
    const VerifyReport r = run_verify(o);
    EXPECT_GT(r.unexpected_failures(), 0);
    bool named = false;
    for (const auto &c : r.checks)
        if (!c.passed && c.id == "XY8.calibration") named = true;
    EXPECT_TRUE(named);
}

TEST(verify, levels) {
    EXPECT_EQ(criteria_for(VerifyLevel::Full).size(), 11u);
    for (int c : criteria_for(VerifyLevel::Fast)) EXPECT_NE(c, 7);
    EXPECT_NE(criterion_title(8), "?");
}
