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

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ddmem {

using std::numbers::pi;

std::string preset_name(Preset p) {
    switch (p) {
        case Preset::CP: return "CP";
        case Preset::CPMG: return "CPMG";
        case Preset::XY4: return "XY4";
        case Preset::XY8: return "XY8";
        case Preset::U5a_CP: return "U5a:CP";
        case Preset::U5a_XY4: return "U5a:XY4";
        case Preset::Custom: return "Custom";
    }
    return "?";
}

Preset parse_preset(std::string_view name) {
    std::string k;
    for (char c : name) {
        if (c == '_') c = ':';
        k.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    if (k == "cp") return Preset::CP;
    if (k == "cpmg") return Preset::CPMG;
    if (k == "xy4") return Preset::XY4;
    if (k == "xy8") return Preset::XY8;
    if (k == "u5a:cp") return Preset::U5a_CP;
    if (k == "u5a:xy4") return Preset::U5a_XY4;
    if (k == "custom") return Preset::Custom;
    throw std::invalid_argument("unknown sequence preset '" + std::string(name) + "'");
}

std::vector<Preset> comparison_presets() {
    return {Preset::CP, Preset::XY4, Preset::XY8, Preset::U5a_CP, Preset::U5a_XY4};
}

std::vector<double> u5a_phases(double phi) {
    return {phi + 4 * pi / 3, phi + pi / 6, phi + 5 * pi / 3, phi + pi / 6, phi + 4 * pi / 3};
}

std::vector<double> preset_phases(Preset p) {
    auto cat = [](std::initializer_list<std::vector<double>> parts) {
        std::vector<double> out;
        for (auto &v : parts) out.insert(out.end(), v.begin(), v.end());
        return out;
    };
    switch (p) {
        case Preset::CP: return {0.0, 0.0};
        case Preset::CPMG: return {0.0, pi};
        case Preset::XY4: return {0.0, pi / 2, 0.0, pi / 2};
        case Preset::XY8: return {0.0, pi / 2, 0.0, pi / 2, pi / 2, 0.0, pi / 2, 0.0};
        case Preset::U5a_CP: return cat({u5a_phases(0), u5a_phases(0)});
        case Preset::U5a_XY4: return cat({u5a_phases(0), u5a_phases(pi / 2), u5a_phases(0), u5a_phases(pi / 2)});
        case Preset::Custom: break;
    }
    throw std::invalid_argument("Custom has no preset phase list");
}

int preset_length(Preset p) { return static_cast<int>(preset_phases(p).size()); }

void SequenceSpec::validate() const {
    if (phases.empty()) throw std::invalid_argument("sequence needs at least one pulse");
    if (!(tau > 0) || !std::isfinite(tau)) throw std::invalid_argument("tau must be positive");
    for (double p : phases)
        if (!std::isfinite(p)) throw std::invalid_argument("pulse phases must be finite");
    if (!pulse_eps.empty()) {
        if (name != Preset::Custom) throw std::invalid_argument("per-pulse errors are only allowed for Custom sequences");
        if (pulse_eps.size() != phases.size()) throw std::invalid_argument("pulse_eps length must equal the pulse count");
    }
    if (name != Preset::Custom && phases != preset_phases(name))
        throw std::invalid_argument("phase list does not match preset " + preset_name(name));
}

SequenceSpec SequenceSpec::preset(Preset p, double tau) {
    SequenceSpec s;
    s.name = p;
    s.phases = preset_phases(p);
    s.tau = tau;
    s.validate();
    return s;
}

SequenceSpec SequenceSpec::custom(std::vector<double> phases, double tau, std::vector<double> pulse_eps) {
    SequenceSpec s;
    s.name = Preset::Custom;
    s.phases = std::move(phases);
    s.tau = tau;
    s.pulse_eps = std::move(pulse_eps);
    s.validate();
    return s;
}

double PulseProgram::duration() const {
    double t = 0;
    for (const auto &e : events)
        if (e.kind == PulseEvent::Kind::FreeEvolve) t += e.value;
    return t;
}

int PulseProgram::pulse_count() const {
    return static_cast<int>(std::count_if(events.begin(), events.end(),
                                          [](const PulseEvent &e) { return e.kind == PulseEvent::Kind::Pulse; }));
}

Unitary2 building_block(double phi, double tau, double delta, double eps) {
    if (!(tau > 0)) throw std::domain_error("tau must be positive");
    Unitary2 v = free_evolution(delta, 0.5 * tau);
    return v * pi_pulse(phi, eps) * v;
}

Su2 building_block_su2(double phi, double tau, double delta, double eps) {
    if (!(tau > 0)) throw std::domain_error("tau must be positive");
    Su2 v = free_evolution_su2(delta, 0.5 * tau);
    return v * pi_pulse_su2(phi, eps) * v;
}

PulseProgram materialize(const SequenceSpec &spec) {
    spec.validate();
    PulseProgram prog;
    const int L = spec.L();
    prog.events.push_back({PulseEvent::Kind::FreeEvolve, 0.5 * spec.tau});
    for (int i = 0; i < L; ++i) {
        prog.events.push_back({PulseEvent::Kind::Pulse, spec.phases[i], i});
        prog.events.push_back({PulseEvent::Kind::FreeEvolve, i + 1 < L ? spec.tau : 0.5 * spec.tau});
    }
    return prog;
}

Unitary2 sequence_unitary(const SequenceSpec &spec, double delta, double eps) {
    spec.validate();
    Unitary2 t = Unitary2::identity();
    for (int i = 0; i < spec.L(); ++i) t = building_block(spec.phases[i], spec.tau, delta, pulse_error(spec, i, eps)) * t;
    return t;
}

Su2 sequence_su2(const SequenceSpec &spec, double delta, double eps) {
    Su2 t;
    for (int i = 0; i < spec.L(); ++i)
        t = building_block_su2(spec.phases[i], spec.tau, delta, pulse_error(spec, i, eps)) * t;
    return t;
}

bool first_order_cancellation_check(std::span<const double> p, double tol) {
    if (p.size() != 4) throw std::invalid_argument("first-order cancellation check needs exactly four phases");
    // A 2 pi shift of phi1 or phi3 moves both right-hand sides by pi at once, so the doubled
    // residuals must be multiples of 2 pi with equal parity. This keeps the check independent of
    // how the phases are represented.
    const double d2 = (2 * p[1] - (p[2] + p[0] + pi)) / (2 * pi);
    const double d4 = (2 * p[3] - (3 * p[2] - p[0] + pi)) / (2 * pi);
    const double k2 = std::round(d2), k4 = std::round(d4);
    if (std::abs(d2 - k2) * 2 * pi > tol || std::abs(d4 - k4) * 2 * pi > tol) return false;
    return std::fmod(std::abs(k2 - k4), 2.0) == 0.0;
}

}  // namespace ddmem
