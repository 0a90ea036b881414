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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ddmem {

namespace {

void require_finite(double v, const char *what) {
    if (!std::isfinite(v)) {
        throw std::domain_error(std::string(what) + " must be finite");
    }
}

}  // namespace

Unitary2 Unitary2::pauli_x() { return {0.0, 1.0, 1.0, 0.0}; }
Unitary2 Unitary2::pauli_y() { return {0.0, cplx(0, -1), cplx(0, 1), 0.0}; }
Unitary2 Unitary2::pauli_z() { return {1.0, 0.0, 0.0, -1.0}; }

Unitary2 Unitary2::adjoint() const {
    return {std::conj(m00), std::conj(m10), std::conj(m01), std::conj(m11)};
}

Unitary2 Unitary2::operator*(const Unitary2 &b) const {
    return {m00 * b.m00 + m01 * b.m10, m00 * b.m01 + m01 * b.m11,
            m10 * b.m00 + m11 * b.m10, m10 * b.m01 + m11 * b.m11};
}

Unitary2 Unitary2::operator*(cplx s) const { return {m00 * s, m01 * s, m10 * s, m11 * s}; }

Unitary2 Unitary2::operator+(const Unitary2 &b) const {
    return {m00 + b.m00, m01 + b.m01, m10 + b.m10, m11 + b.m11};
}

double Unitary2::unitarity_defect() const {
    Unitary2 p = adjoint() * (*this);
    return std::max({std::abs(p.m00 - 1.0), std::abs(p.m01), std::abs(p.m10), std::abs(p.m11 - 1.0)});
}

double RotationRep::theta() const { return std::acos(std::clamp(axis[2], -1.0, 1.0)); }

double RotationRep::phi() const { return std::atan2(axis[1], axis[0]); }

HeisenbergMatrix HeisenbergMatrix::zero() {
    HeisenbergMatrix z;
    for (auto &row : z.g) row.fill(0.0);
    return z;
}

HeisenbergMatrix HeisenbergMatrix::operator*(const HeisenbergMatrix &b) const {
    HeisenbergMatrix r = zero();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) r.g[i][j] += g[i][k] * b.g[k][j];
    return r;
}

HeisenbergMatrix HeisenbergMatrix::transpose() const {
    HeisenbergMatrix r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.g[i][j] = g[j][i];
    return r;
}

double HeisenbergMatrix::det() const {
    return g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0]) +
           g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
}

double HeisenbergMatrix::orthogonality_defect() const {
    HeisenbergMatrix p = transpose() * (*this);
    double worst = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) worst = std::max(worst, std::abs(p.g[i][j] - (i == j ? 1.0 : 0.0)));
    return worst;
}

Su2 Su2::normalized() const {
    double n = std::sqrt(norm2());
    return {a / n, b / n};
}

Unitary2 Su2::to_unitary() const { return {a, -std::conj(b), b, std::conj(a)}; }

HeisenbergMatrix Su2::heisenberg() const {
    // quaternion q = (q0, q1, q2, q3) with a = q0 - i q3, b = q2 - i q1
    const double q0 = a.real(), q3 = -a.imag(), q2 = b.real(), q1 = -b.imag();
    HeisenbergMatrix h;
    h.g[0][0] = 1 - 2 * (q2 * q2 + q3 * q3);
    h.g[0][1] = 2 * (q1 * q2 - q0 * q3);
    h.g[0][2] = 2 * (q1 * q3 + q0 * q2);
    h.g[1][0] = 2 * (q1 * q2 + q0 * q3);
    h.g[1][1] = 1 - 2 * (q1 * q1 + q3 * q3);
    h.g[1][2] = 2 * (q2 * q3 - q0 * q1);
    h.g[2][0] = 2 * (q1 * q3 - q0 * q2);
    h.g[2][1] = 2 * (q2 * q3 + q0 * q1);
    h.g[2][2] = 1 - 2 * (q1 * q1 + q2 * q2);
    return h;
}

Su2 to_su2(const Unitary2 &u) {
    cplx s = std::sqrt(u.det());
    return Su2{u.m00 / s, u.m10 / s}.normalized();
}

Unitary2 free_evolution(double delta, double t) {
    require_finite(delta, "detuning");
    require_finite(t, "duration");
    if (t < 0) throw std::domain_error("duration must be non-negative");
    const double h = 0.5 * delta * t;
    const double c = std::cos(h), s = std::sin(h);
    return {cplx(c, -s), 0.0, 0.0, cplx(c, s)};
}

Unitary2 pi_pulse(double phi, double eps) {
    require_finite(phi, "pulse phase");
    require_finite(eps, "amplitude error");
    const double c = std::cos(0.5 * eps), s = std::sin(0.5 * eps);
    const cplx e = std::polar(1.0, phi);
    return {cplx(0, s), c * std::conj(e), c * e, cplx(0, s)};
}

Su2 free_evolution_su2(double delta, double t) {
    Unitary2 v = free_evolution(delta, t);
    return {v.m00, 0.0};
}

Su2 pi_pulse_su2(double phi, double eps) {
    require_finite(phi, "pulse phase");
    require_finite(eps, "amplitude error");
    const double c = std::cos(0.5 * eps), s = std::sin(0.5 * eps);
    return {s, cplx(0, -c) * std::polar(1.0, phi)};
}

Unitary2 compose(const Unitary2 &a, const Unitary2 &b) { return a * b; }

RotationRep to_axis_angle(const Su2 &u) {
    const double q0 = u.a.real();
    const Vec3 q{-u.b.imag(), u.b.real(), -u.a.imag()};
    const double s = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2]);
    RotationRep r;
    r.alpha = 2 * std::atan2(s, q0);
    if (s < kDegenerateAxisThreshold) {
        r.alpha = q0 >= 0 ? 0.0 : 2 * std::numbers::pi;
        r.axis = {0.0, 0.0, 1.0};
        return r;
    }
    r.axis = {q[0] / s, q[1] / s, q[2] / s};
    return r;
}

RotationRep to_axis_angle(const Unitary2 &u) { return to_axis_angle(to_su2(u)); }

Unitary2 from_axis_angle(const RotationRep &r) {
    const double c = std::cos(0.5 * r.alpha), s = std::sin(0.5 * r.alpha);
    const double q1 = s * r.axis[0], q2 = s * r.axis[1], q3 = s * r.axis[2];
    return Su2{cplx(c, -q3), cplx(q2, -q1)}.to_unitary();
}

RotationRep canonical(const RotationRep &r) {
    RotationRep c = r;
    if (c.alpha < 0) {
        c.alpha = -c.alpha;
        c.axis = {-c.axis[0], -c.axis[1], -c.axis[2]};
    }
    c.alpha = std::fmod(c.alpha, 2 * std::numbers::pi);
    if (c.alpha > std::numbers::pi) {
        c.alpha = 2 * std::numbers::pi - c.alpha;
        c.axis = {-c.axis[0], -c.axis[1], -c.axis[2]};
    }
    return c;
}

HeisenbergMatrix heisenberg_matrix(const Unitary2 &u) { return to_su2(u).heisenberg(); }

Unitary2 repeat(const Unitary2 &u, std::int64_t m) {
    if (m < 0) throw std::domain_error("repetition count must be non-negative");
    Unitary2 result = Unitary2::identity();
    Unitary2 base = u;
    while (m > 0) {
        if (m & 1) result = result * base;
        m >>= 1;
        if (m > 0) base = base * base;
    }
    if (result.unitarity_defect() > 1e-12) result = renormalize(result);
    return result;
}

Su2 repeat(const Su2 &u, std::int64_t m) {
    if (m < 0) throw std::domain_error("repetition count must be non-negative");
    Su2 result, base = u;
    while (m > 0) {
        if (m & 1) result = result * base;
        m >>= 1;
        if (m > 0) base = base * base;
    }
    return result;
}

double trace_fidelity(const Unitary2 &a, const Unitary2 &b) { return 0.5 * std::abs((a.adjoint() * b).trace()); }

Unitary2 renormalize(const Unitary2 &u) {
    cplx c00 = u.m00, c10 = u.m10, c01 = u.m01, c11 = u.m11;
    double n0 = std::sqrt(std::norm(c00) + std::norm(c10));
    c00 /= n0;
    c10 /= n0;
    cplx p = std::conj(c00) * c01 + std::conj(c10) * c11;
    c01 -= p * c00;
    c11 -= p * c10;
    double n1 = std::sqrt(std::norm(c01) + std::norm(c11));
    return {c00, c01 / n1, c10, c11 / n1};
}

}  // namespace ddmem
