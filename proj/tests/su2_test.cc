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


#include "ddmem/su2.h"

#include <cmath>
#include <numbers>
#include <random>

#include "gtest/gtest.h"

using namespace ddmem;
using std::numbers::pi;

namespace {

using M2 = std::array<cplx, 4>;

M2 mul(const M2 &a, const M2 &b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3]};
}

// exp(A) by scaling, Taylor series and squaring
M2 expm(M2 a) {
    int s = 0;
    double n = 0;
    for (auto x : a) n = std::max(n, std::abs(x));
    while (n > 0.25) {
        n /= 2;
        ++s;
    }
    for (auto &x : a) x /= std::pow(2.0, s);
    M2 r = {1, 0, 0, 1}, term = {1, 0, 0, 1};
    for (int k = 1; k < 30; ++k) {
        term = mul(term, a);
        for (auto &x : term) x /= k;
        for (int i = 0; i < 4; ++i) r[i] += term[i];
    }
    for (int i = 0; i < s; ++i) r = mul(r, r);
    return r;
}

M2 of(const Unitary2 &u) { return {u.m00, u.m01, u.m10, u.m11}; }

double dist(const Unitary2 &u, const M2 &m) {
    const M2 a = of(u);
    double d = 0;
    for (int i = 0; i < 4; ++i) d = std::max(d, std::abs(a[i] - m[i]));
    return d;
}

Unitary2 random_unitary(std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    RotationRep r;
    r.alpha = 2 * pi * std::uniform_real_distribution<double>(0, 1)(rng);
    const double x = g(rng), y = g(rng), z = g(rng), n = std::sqrt(x * x + y * y + z * z);
    r.axis = {x / n, y / n, z / n};
    return from_axis_angle(r) * std::polar(1.0, g(rng));
}

const cplx I(0, 1);

}  // namespace

TEST(free_evolution, zero_duration) {
    EXPECT_EQ(dist(free_evolution(123.0, 0.0), {1, 0, 0, 1}), 0.0);
}

TEST(free_evolution, full_turn) {
    const Unitary2 u = free_evolution(2 * pi, 1.0);
    EXPECT_LT(dist(u, {-1, 0, 0, -1}), 1e-15);
    EXPECT_NEAR(to_axis_angle(u).alpha, 2 * pi, 1e-12);
}

TEST(free_evolution, matches_matrix_exponential) {
    const double delta = 2 * pi * 27e3, t = 100e-6;
    const M2 e = expm({-I * delta * t / 2.0, 0, 0, I * delta * t / 2.0});
    EXPECT_LT(dist(free_evolution(delta, t), e), 1e-13);
    EXPECT_NEAR(free_evolution(delta, t).m00.imag(), -std::sin(2.7 * pi / 2 * 2), 1e-13);
}

TEST(free_evolution, rejects_bad_input) {
    EXPECT_THROW(free_evolution(1.0, -1.0), std::domain_error);
    EXPECT_THROW(free_evolution(NAN, 1.0), std::domain_error);
}

TEST(pi_pulse, ideal) {
    EXPECT_LT(dist(pi_pulse(0, 0), {0, 1, 1, 0}), 1e-15);
    EXPECT_LT(dist(pi_pulse(pi / 2, 0), {0, -I, I, 0}), 1e-15);
}

TEST(pi_pulse, inversion_defect) {
    const double eps = 0.06 * pi;
    const Unitary2 u = pi_pulse(0, eps);
    EXPECT_NEAR(std::norm(u.m10), std::pow(std::cos(eps / 2), 2), 1e-15);
    EXPECT_NEAR(std::norm(u.m10), 0.99115, 1e-5);
    EXPECT_LT(u.unitarity_defect(), 1e-15);
}

TEST(pi_pulse, matches_matrix_exponential) {
    // Pi_phi = i exp(-i (pi + eps)/2 (cos phi sigma_x + sin phi sigma_y)) up to the sign convention of eps
    for (double phi : {0.0, 0.3, pi / 2, 2.0}) {
        for (double eps : {0.0, 0.01, -0.2}) {
            const double a = pi + eps;
            const cplx nx = std::cos(phi), ny = std::sin(phi);
            const M2 e = expm({0, -I * a / 2.0 * (nx - I * ny), -I * a / 2.0 * (nx + I * ny), 0});
            M2 w;
            for (int i = 0; i < 4; ++i) w[i] = I * e[i];
            const Unitary2 p = pi_pulse(phi, -eps);
            EXPECT_GT(trace_fidelity(p, Unitary2{w[0], w[1], w[2], w[3]}), 1 - 1e-13);
        }
    }
}

TEST(compose, identities) {
    std::mt19937_64 rng(3);
    const Unitary2 u = random_unitary(rng);
    EXPECT_LT(dist(compose(Unitary2::identity(), u), of(u)), 1e-15);
    EXPECT_LT(dist(compose(u, u.adjoint()), {1, 0, 0, 1}), 1e-14);
}

TEST(compose, broadening_corrected_at_zero_error) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int i = 0; i < 50; ++i) {
        const double delta = 2 * pi * 1e5 * u(rng), tau = 1e-4 * (1 + u(rng)), phi = pi * u(rng);
        const Unitary2 v = free_evolution(delta, tau);
        EXPECT_GT(trace_fidelity(compose(v, compose(pi_pulse(phi, 0), v)), pi_pulse(phi, 0)), 1 - 1e-12);
    }
}

TEST(axis_angle, pauli_x) {
    const RotationRep r = to_axis_angle(Unitary2::pauli_x());
    EXPECT_NEAR(r.alpha, pi, 1e-15);
    EXPECT_NEAR(std::abs(r.axis[0]), 1, 1e-15);
}

TEST(axis_angle, identity_is_degenerate) {
    const RotationRep r = to_axis_angle(Unitary2::identity());
    EXPECT_EQ(r.alpha, 0.0);
    EXPECT_EQ(r.axis, (Vec3{0, 0, 1}));
}

TEST(axis_angle, round_trip) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 100; ++i) {
        const Unitary2 u = random_unitary(rng);
        EXPECT_GT(trace_fidelity(from_axis_angle(to_axis_angle(u)), u), 1 - 1e-12);
        const RotationRep c = canonical(to_axis_angle(u));
        EXPECT_GE(c.alpha, 0);
        EXPECT_LE(c.alpha, pi);
        EXPECT_GT(trace_fidelity(from_axis_angle(c), u), 1 - 1e-12);
    }
}

TEST(axis_angle, su2_and_unitary_agree) {
    std::mt19937_64 rng(6);
    for (int i = 0; i < 20; ++i) {
        const Unitary2 u = random_unitary(rng);
        const RotationRep a = canonical(to_axis_angle(u)), b = canonical(to_axis_angle(to_su2(u)));
        EXPECT_NEAR(a.alpha, b.alpha, 1e-12);
        for (int k = 0; k < 3; ++k) EXPECT_NEAR(a.axis[k], b.axis[k], 1e-10);
    }
}

TEST(heisenberg, identity) {
    const HeisenbergMatrix g = heisenberg_matrix(Unitary2::identity());
    for (int q = 0; q < 3; ++q)
        for (int p = 0; p < 3; ++p) EXPECT_EQ(g(q, p), q == p ? 1.0 : 0.0);
}

TEST(heisenberg, z_rotation) {
    const double a = 0.7;
    RotationRep r;
    r.alpha = a;
    const HeisenbergMatrix g = heisenberg_matrix(from_axis_angle(r));
    EXPECT_NEAR(g(2, 2), 1, 1e-15);
    EXPECT_NEAR(g(0, 0), std::cos(a), 1e-15);
    EXPECT_NEAR(std::abs(g(0, 1)), std::sin(a), 1e-15);
    EXPECT_NEAR(g(0, 2), 0, 1e-15);
}

TEST(heisenberg, direct_conjugation) {
    const M2 sx = {0, 1, 1, 0}, sy = {0, -I, I, 0}, sz = {1, 0, 0, -1};
    const std::array<M2, 3> s = {sx, sy, sz};
    std::mt19937_64 rng(7);
    for (int i = 0; i < 50; ++i) {
        const Unitary2 u = random_unitary(rng);
        const M2 U = of(u), Ud = of(u.adjoint());
        const HeisenbergMatrix g = heisenberg_matrix(u);
        for (int q = 0; q < 3; ++q) {
            const M2 c = mul(Ud, mul(s[q], U));
            for (int p = 0; p < 3; ++p) {
                const M2 t = mul(c, s[p]);
                EXPECT_NEAR(g(q, p), 0.5 * (t[0] + t[3]).real(), 1e-12);
            }
        }
        EXPECT_LT(g.orthogonality_defect(), 1e-10);
        EXPECT_NEAR(g.det(), 1, 1e-10);
        const HeisenbergMatrix h = to_su2(u).heisenberg();
        for (int q = 0; q < 3; ++q)
            for (int p = 0; p < 3; ++p) EXPECT_NEAR(g(q, p), h(q, p), 1e-12);
    }
}

TEST(heisenberg, composition_order) {
    std::mt19937_64 rng(8);
    const Unitary2 a = random_unitary(rng), b = random_unitary(rng);
    const HeisenbergMatrix ab = heisenberg_matrix(a * b), prod = heisenberg_matrix(a) * heisenberg_matrix(b);
    for (int q = 0; q < 3; ++q)
        for (int p = 0; p < 3; ++p) EXPECT_NEAR(ab(q, p), prod(q, p), 1e-12);
}

TEST(repeat, edge_cases) {
    std::mt19937_64 rng(9);
    const Unitary2 u = random_unitary(rng);
    EXPECT_LT(dist(repeat(u, 1), of(u)), 1e-15);
    EXPECT_LT(dist(repeat(u, 0), {1, 0, 0, 1}), 0.0 + 1e-300);
    EXPECT_THROW(repeat(u, -1), std::domain_error);
}

TEST(repeat, closure) {
    RotationRep r;
    r.alpha = pi / 7;
    r.axis = {1, 0, 0};
    EXPECT_GT(trace_fidelity(repeat(from_axis_angle(r), 14), Unitary2::identity()), 1 - 1e-12);
}

TEST(repeat, against_explicit_products) {
    const double tau = 100e-6, delta = 2 * pi * 3e3, eps = 0.01 * pi;
    const Unitary2 v = free_evolution(delta, tau / 2);
    const Unitary2 block = v * pi_pulse(0, eps) * v;
    Unitary2 slow = Unitary2::identity();
    for (int i = 0; i < 100; ++i) slow = block * slow;
    EXPECT_LT(dist(repeat(block, 100), of(slow)), 1e-10);
    Su2 s = Su2::identity();
    const Su2 bs = to_su2(block);
    for (int i = 0; i < 1000; ++i) s = bs * s;
    const Su2 f = repeat(bs, 1000);
    EXPECT_LT(std::abs(f.a - s.a) + std::abs(f.b - s.b), 1e-10);
}

TEST(su2, flip_probability_without_cancellation) {
    const Su2 u = pi_pulse_su2(0, 0) * pi_pulse_su2(0, 1e-9);
    EXPECT_GT(u.flip_probability(), 0);
    EXPECT_NEAR(u.flip_probability(), std::pow(std::sin(0.5e-9), 2), 1e-30);
}
