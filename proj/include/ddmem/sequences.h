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

#ifndef DDMEM_SEQUENCES_H
#define DDMEM_SEQUENCES_H

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ddmem/su2.h"

namespace ddmem {

enum class Preset { CP, CPMG, XY4, XY8, U5a_CP, U5a_XY4, Custom };

/// Canonical display name, e.g. "U5a:CP".
std::string preset_name(Preset p);
/// Accepts "U5a:CP", "U5a_CP", "u5a:cp". Throws std::invalid_argument otherwise.
Preset parse_preset(std::string_view name);
/// The five sequences compared throughout (CPMG is omitted since it matches CP after phase averaging).
std::vector<Preset> comparison_presets();

struct SequenceSpec {
    Preset name = Preset::CP;
    /// Chronological pulse phases [rad]: phases[0] is applied first.
    std::vector<double> phases;
    /// Inter-pulse spacing [s].
    double tau = 100e-6;
    /// Per-pulse amplitude errors for Custom sequences. Empty means the scalar eps applies to every pulse.
    std::vector<double> pulse_eps;

    int L() const { return static_cast<int>(phases.size()); }
    /// Throws std::invalid_argument when the invariants are violated.
    void validate() const;

    static SequenceSpec preset(Preset p, double tau);
    static SequenceSpec custom(std::vector<double> phases, double tau, std::vector<double> pulse_eps = {});
};

struct PulseEvent {
    enum class Kind { FreeEvolve, Pulse };
    Kind kind;
    /// Duration [s] for FreeEvolve, phase [rad] for Pulse.
    double value;
    /// Index into SequenceSpec::phases for Pulse events, -1 otherwise.
    int pulse_index = -1;
};

/// Chronological event list for one repetition.
struct PulseProgram {
    std::vector<PulseEvent> events;
    double duration() const;
    int pulse_count() const;
};

/// Phases of the five-pulse composite at base phase phi. The list is a palindrome, so
/// reading it right-to-left (operator order) or left-to-right (time order) gives the same program.
std::vector<double> u5a_phases(double phi);
std::vector<double> preset_phases(Preset p);
int preset_length(Preset p);

/// U(phi) = V_{tau/2} Pi_phi V_{tau/2}.
Unitary2 building_block(double phi, double tau, double delta, double eps);
Su2 building_block_su2(double phi, double tau, double delta, double eps);

/// Merges adjacent half gaps, so pulses are separated by tau and the program starts and ends with tau/2.
PulseProgram materialize(const SequenceSpec &spec);

/// T = U(phi_L) ... U(phi_1) for one repetition.
Unitary2 sequence_unitary(const SequenceSpec &spec, double delta, double eps);
Su2 sequence_su2(const SequenceSpec &spec, double delta, double eps);

/// Amplitude error seen by pulse i.
inline double pulse_error(const SequenceSpec &spec, int i, double eps) {
    return spec.pulse_eps.empty() ? eps : spec.pulse_eps[i];
}

/// For a four-pulse list: true iff phi2 = (phi3 + phi1 + pi)/2 and phi4 = (3 phi3 - phi1 + pi)/2 mod 2 pi
/// for some choice of 2 pi representatives of phi1 and phi3. When it holds, T(eps) - T(0) = O(eps^2);
/// T(0) itself is a z rotation, the identity only for phi3 = phi1 mod pi.
/// Throws std::invalid_argument unless exactly four phases are given.
bool first_order_cancellation_check(std::span<const double> phases, double tol = 1e-9);

}  // namespace ddmem

#endif
