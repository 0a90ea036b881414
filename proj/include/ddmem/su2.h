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

#ifndef DDMEM_SU2_H
#define DDMEM_SU2_H

#include <array>
#include <complex>
#include <cstdint>

namespace ddmem {

using cplx = std::complex<double>;
using Vec3 = std::array<double, 3>;

// Basis: index 0 is the storage state |s> (sigma_z = +1), index 1 is |g>.

/// A 2x2 unitary stored row-major. Not restricted to det = 1; pulses have det = -1.
struct Unitary2 {
    cplx m00{1.0}, m01{0.0}, m10{0.0}, m11{1.0};

    static Unitary2 identity() { return {}; }
    static Unitary2 pauli_x();
    static Unitary2 pauli_y();
    static Unitary2 pauli_z();

    cplx det() const { return m00 * m11 - m01 * m10; }
    cplx trace() const { return m00 + m11; }
    Unitary2 adjoint() const;
    Unitary2 operator*(const Unitary2 &b) const;
    Unitary2 operator*(cplx s) const;
    Unitary2 operator+(const Unitary2 &b) const;

    /// max |(U^dagger U - 1)_ij|
    double unitarity_defect() const;
};

/// Axis-angle form u = exp(-i alpha/2 n.sigma), up to global phase.
struct RotationRep {
    double alpha = 0.0;
    Vec3 axis{0.0, 0.0, 1.0};

    /// polar angle of the axis in [0, pi]
    double theta() const;
    /// azimuth of the axis in (-pi, pi]
    double phi() const;
};

/// g_qp with u^dagger sigma_q u = sum_p g_qp sigma_p. Row q, column p; q,p in {x,y,z}.
struct HeisenbergMatrix {
    std::array<std::array<double, 3>, 3> g{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};

    static HeisenbergMatrix identity() { return {}; }
    static HeisenbergMatrix zero();
    double operator()(int q, int p) const { return g[q][p]; }
    double &operator()(int q, int p) { return g[q][p]; }
    HeisenbergMatrix operator*(const HeisenbergMatrix &b) const;
    HeisenbergMatrix transpose() const;
    double det() const;
    /// max |(g^T g - 1)_ij|
    double orthogonality_defect() const;
};

/// Special-unitary carrier [[a, -conj(b)], [b, conj(a)]]. Used on the hot paths.
struct Su2 {
    cplx a{1.0}, b{0.0};

    static Su2 identity() { return {}; }
    Su2 operator*(const Su2 &r) const {
        return {a * r.a - std::conj(b) * r.b, b * r.a + std::conj(a) * r.b};
    }
    Su2 adjoint() const { return {std::conj(a), -b}; }
    double norm2() const { return std::norm(a) + std::norm(b); }
    /// Rescales onto the unit 3-sphere.
    Su2 normalized() const;
    /// Probability of a transition |s> <-> |g>, |<g|u|s>|^2. Free of the 1 - g_zz cancellation.
    double flip_probability() const { return std::norm(b); }
    Unitary2 to_unitary() const;
    HeisenbergMatrix heisenberg() const;
};

/// Projects u onto SU(2) by dividing through sqrt(det u). Sign choice is the principal root.
Su2 to_su2(const Unitary2 &u);

/// V_t = cos(delta t/2) 1 - i sin(delta t/2) sigma_z. Throws std::domain_error on non-finite input or t < 0.
Unitary2 free_evolution(double delta, double t);
/// Pi_phi = cos(eps/2)(cos phi sigma_x + sin phi sigma_y) + i sin(eps/2) 1. Throws on non-finite input.
Unitary2 pi_pulse(double phi, double eps);

Su2 free_evolution_su2(double delta, double t);
/// pi_pulse(phi, eps) / i, which has det = +1.
Su2 pi_pulse_su2(double phi, double eps);

/// a * b: b acts first.
Unitary2 compose(const Unitary2 &a, const Unitary2 &b);

/// Degenerate threshold on |sin(alpha/2)|, below which the canonical axis (0,0,1) is returned.
inline constexpr double kDegenerateAxisThreshold = 1e-9;

RotationRep to_axis_angle(const Unitary2 &u);
RotationRep to_axis_angle(const Su2 &u);
Unitary2 from_axis_angle(const RotationRep &r);

/// Identifies (alpha, n) with (2 pi - alpha, -n), returning alpha in [0, pi].
RotationRep canonical(const RotationRep &r);

HeisenbergMatrix heisenberg_matrix(const Unitary2 &u);

/// u^m by binary powering. m = 0 gives the identity. Throws std::domain_error for m < 0.
Unitary2 repeat(const Unitary2 &u, std::int64_t m);
Su2 repeat(const Su2 &u, std::int64_t m);

/// |tr(a^dagger b)| / 2. Equals 1 iff a and b agree up to global phase.
double trace_fidelity(const Unitary2 &a, const Unitary2 &b);

/// Gram-Schmidt on the columns; restores U^dagger U = 1 after long chains.
Unitary2 renormalize(const Unitary2 &u);

}  // namespace ddmem

#endif
