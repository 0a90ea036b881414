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


#include "ddmem/memory.h"

#include <cmath>
#include <limits>
#include <random>

#include "gtest/gtest.h"

using namespace ddmem;

namespace {
MemoryParams afc(double d, Scheme s = Scheme::AfcBackward) {
    MemoryParams p;
    p.d_tilde = d;
    p.scheme = s;
    return p;
}
const double kInf = std::numeric_limits<double>::infinity();
}  // namespace

TEST(efficiency, afc_backward) {
    EXPECT_DOUBLE_EQ(memory_efficiency(afc(kInf)).value, 1.0);
    EXPECT_NEAR(memory_efficiency(afc(1)).value, std::pow(1 - std::exp(-1.0), 2), 1e-15);
    EXPECT_NEAR(memory_efficiency(afc(1)).value, 0.39958, 1e-5);
}

TEST(efficiency, afc_forward) {
    EXPECT_NEAR(memory_efficiency(afc(2, Scheme::AfcForward)).value, 4 * std::exp(-2.0), 1e-15);
    EXPECT_NEAR(memory_efficiency(afc(2, Scheme::AfcForward)).value, 0.5413, 1e-4);
    EXPECT_EQ(memory_efficiency(afc(kInf, Scheme::AfcForward)).value, 0.0);
}

TEST(efficiency, eit) {
    MemoryParams p = afc(10, Scheme::Eit);
    EXPECT_THROW(memory_efficiency(p), std::invalid_argument);
    p.C = 2;
    EXPECT_DOUBLE_EQ(memory_efficiency(p).value, 0.8);
    p.C = 20;
    EXPECT_EQ(memory_efficiency(p).value, 0.0);
    p.d_tilde = 0;
    const MemoryValue v = memory_efficiency(p);
    EXPECT_EQ(v.value, 0.0);
    EXPECT_FALSE(v.warnings.empty());
}

TEST(efficiency, validation) {
    MemoryParams p;
    p.eta_D = 1.5;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = MemoryParams();
    p.mu_in = 0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    EXPECT_EQ(parse_scheme("afc_forward"), Scheme::AfcForward);
    EXPECT_THROW(parse_scheme("dlcz"), std::invalid_argument);
}

TEST(noise, photons) {
    EXPECT_EQ(noise_photons(1, 0).value, 0.0);
    EXPECT_EQ(noise_photons(0, 0.3).value, 0.0);
    EXPECT_NEAR(noise_photons(1, 1e-3).value, 6.321e-4, 1e-7);
    EXPECT_NEAR(noise_photons(1, 1e-3, 0.5).value, 3.1606e-4, 1e-8);
    EXPECT_TRUE(noise_photons(1, 1e-3).warnings.empty());
    EXPECT_FALSE(noise_photons(5, 0.5).warnings.empty());
}

TEST(snr, identity_with_ratio) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 500; ++i) {
        MemoryParams p = afc(std::pow(10.0, -2 + 3 * u(rng)));
        p.eta_D = 0.05 + 0.95 * u(rng);
        p.mu_in = 0.1 + 5 * u(rng);
        const double eta = u(rng), rho = std::pow(10.0, -9 + 8 * u(rng));
        const double want = (1 - std::exp(-p.d_tilde)) * p.eta_D * p.mu_in * eta / rho;
        EXPECT_NEAR(snr(p, eta, rho).value / want, 1, 1e-12);
        EXPECT_NEAR(snr_from_ratio(p, eta / rho).value / want, 1, 1e-12);
    }
}

TEST(snr, examples) {
    EXPECT_NEAR(snr_from_ratio(afc(1), 1e3).value, 632.12, 0.01);
    EXPECT_NEAR(snr_from_ratio(afc(1), 1).value, 0.632, 1e-3);
    EXPECT_NEAR(snr_from_ratio(afc(50), 777).value, 777, 1e-9);
    EXPECT_TRUE(std::isinf(snr_from_ratio(afc(1), kInf).value));
    EXPECT_TRUE(std::isinf(snr(afc(1), 1, 0).value));
    EXPECT_EQ(snr(afc(1), 0, 1e-3).value, 0.0);
}

TEST(snr, monotone_in_depth) {
    double last = 0;
    for (double d = 0.1; d < 20; d *= 1.3) {
        const double v = snr_from_ratio(afc(d), 100).value;
        EXPECT_GT(v, last);
        last = v;
    }
}

TEST(snr, transfer_knob_cancels) {
    MemoryParams p = afc(2);
    const double full = snr(p, 0.9, 1e-3).value;
    p.transfer = 0.5;
    EXPECT_NEAR(snr(p, 0.9, 1e-3).value, 2 * full, 1e-9 * full);
}
