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

#include "ddmem/config.h"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ddmem {

using nlohmann::json;
using std::numbers::pi;

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto &c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

[[noreturn]] void bad(const std::string &key, const std::string &why) {
    throw std::invalid_argument("config: " + key + ": " + why);
}

std::string sweep_name(SweepAxis a) { return a == SweepAxis::Tau ? "tau" : "repetitions"; }
SweepAxis parse_sweep(const std::string &s) {
    const std::string l = lower(s);
    if (l == "tau") return SweepAxis::Tau;
    if (l == "repetitions" || l == "m") return SweepAxis::Repetitions;
    bad("sweep", "expected repetitions or tau, got " + s);
}

std::string format_name(OutputFormat f) { return f == OutputFormat::JsonLines ? "json" : "csv"; }
OutputFormat parse_format(const std::string &s) {
    const std::string l = lower(s);
    if (l == "csv") return OutputFormat::Csv;
    if (l == "json" || l == "jsonl") return OutputFormat::JsonLines;
    bad("format", "expected csv or json, got " + s);
}

std::string engine_name(Engine e) { return e == Engine::Quadrature ? "quadrature" : "monte_carlo"; }
Engine parse_engine(const std::string &s) {
    const std::string l = lower(s);
    if (l == "quadrature") return Engine::Quadrature;
    if (l == "monte_carlo" || l == "mc") return Engine::MonteCarlo;
    bad("engine", "expected monte_carlo or quadrature, got " + s);
}

std::string ou_model_name(OuPhaseModel m) { return m == OuPhaseModel::ExactIntegral ? "exact_integral" : "piecewise"; }
OuPhaseModel parse_ou_model(const std::string &s) {
    const std::string l = lower(s);
    if (l == "piecewise") return OuPhaseModel::PiecewiseConstant;
    if (l == "exact_integral") return OuPhaseModel::ExactIntegral;
    bad("ou_model", "expected piecewise or exact_integral, got " + s);
}

json sequence_to_json(const SequenceEntry &e) {
    if (e.preset != Preset::Custom) return e.name;
    json j = {{"name", e.name}, {"phases_pi", e.phases_pi}};
    if (!e.pulse_eps_pi.empty()) j["pulse_eps_pi"] = e.pulse_eps_pi;
    return j;
}

SequenceEntry sequence_from_json(const json &j) {
    if (j.is_string()) {
        try {
            return SequenceEntry::of(parse_preset(j.get<std::string>()));
        } catch (const std::invalid_argument &) {
            bad("sequences", "unknown preset " + j.get<std::string>());
        }
    }
    if (!j.is_object()) bad("sequences", "entries must be preset names or objects");
    SequenceEntry e;
    e.preset = Preset::Custom;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.key() == "name")
            e.name = it->get<std::string>();
        else if (it.key() == "phases_pi")
            e.phases_pi = it->get<std::vector<double>>();
        else if (it.key() == "pulse_eps_pi")
            e.pulse_eps_pi = it->get<std::vector<double>>();
        else
            bad("sequences." + it.key(), "unknown key");
    }
    if (e.name.empty()) bad("sequences.name", "custom sequences need a name");
    if (e.phases_pi.empty()) bad("sequences.phases_pi", "custom sequences need phases");
    return e;
}

json memory_to_json(const MemoryParams &m) {
    json j = {{"scheme", scheme_name(m.scheme)}, {"d_tilde", m.d_tilde}, {"eta_D", m.eta_D},
              {"mu_in", m.mu_in},           {"transfer", m.transfer}};
    if (m.C) j["C"] = *m.C;
    return j;
}

MemoryParams memory_from_json(const json &j, MemoryParams m) {
    if (!j.is_object()) bad("memory", "expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string &k = it.key();
        if (k == "scheme")
            m.scheme = parse_scheme(it->get<std::string>());
        else if (k == "d_tilde")
            m.d_tilde = it->get<double>();
        else if (k == "eta_D")
            m.eta_D = it->get<double>();
        else if (k == "mu_in")
            m.mu_in = it->get<double>();
        else if (k == "C")
            m.C = it->get<double>();
        else if (k == "transfer")
            m.transfer = it->get<double>();
        else
            bad("memory." + k, "unknown key");
    }
    return m;
}

}  // namespace

SequenceEntry SequenceEntry::of(Preset p) {
    if (p == Preset::Custom) throw std::invalid_argument("SequenceEntry::of needs a named preset");
    SequenceEntry e;
    e.name = preset_name(p);
    e.preset = p;
    return e;
}

SequenceSpec SequenceEntry::spec(double tau) const {
    if (preset != Preset::Custom) return SequenceSpec::preset(preset, tau);
    std::vector<double> ph(phases_pi.size()), pe(pulse_eps_pi.size());
    std::transform(phases_pi.begin(), phases_pi.end(), ph.begin(), [](double x) { return x * pi; });
    std::transform(pulse_eps_pi.begin(), pulse_eps_pi.end(), pe.begin(), [](double x) { return x * pi; });
    return SequenceSpec::custom(std::move(ph), tau, std::move(pe));
}

ExperimentConfig::ExperimentConfig() {
    for (Preset p : comparison_presets()) sequences.push_back(SequenceEntry::of(p));
}

std::string sigma_units_name(SigmaUnits u) {
    switch (u) {
        case SigmaUnits::Angular: return "angular";
        case SigmaUnits::Hz: return "hz";
        case SigmaUnits::Both: return "both";
    }
    return "?";
}

SigmaUnits parse_sigma_units(std::string_view s) {
    const std::string l = lower(s);
    if (l == "angular") return SigmaUnits::Angular;
    if (l == "hz") return SigmaUnits::Hz;
    if (l == "both") return SigmaUnits::Both;
    bad("sigma_delta_units", "expected angular, hz or both, got " + std::string(s));
}

double ExperimentConfig::eps() const { return eps_pi * pi; }
double ExperimentConfig::gamma() const { return 2 * pi * 1e3 * gamma_khz; }
double ExperimentConfig::tau() const { return tau_us * 1e-6; }
double ExperimentConfig::tau_c() const { return tau_c_ms * 1e-3; }

double ExperimentConfig::sigma_delta(SigmaUnits units) const {
    if (units == SigmaUnits::Both) throw std::invalid_argument("sigma_delta needs a single reading");
    return units == SigmaUnits::Angular ? 2 * pi * sigma_delta_hz : sigma_delta_hz;
}

std::vector<SigmaUnits> ExperimentConfig::sigma_readings() const {
    if (sigma_delta_units == SigmaUnits::Both) return {SigmaUnits::Angular, SigmaUnits::Hz};
    return {sigma_delta_units};
}

std::vector<std::int64_t> ExperimentConfig::checkpoints() const {
    if (!m_checkpoints.empty()) return m_checkpoints;
    return log_checkpoints(m_max, checkpoints_per_decade);
}

std::vector<double> ExperimentConfig::tau_grid() const {
    std::vector<double> out;
    if (!tau_grid_us.empty()) {
        for (double t : tau_grid_us) out.push_back(t * 1e-6);
        return out;
    }
    for (int k : {700, 400, 250, 150, 100, 70, 50, 40, 32, 25, 20, 16, 12, 8, 4, 2, 1}) out.push_back(25e-3 / k);
    return out;
}

BroadeningParams ExperimentConfig::broadening(SigmaUnits units) const {
    BroadeningParams b;
    b.shape = shape;
    b.gamma = gamma();
    b.sigma_delta = sigma_delta(units);
    b.tau_c = tau_c();
    b.seed = seed;
    return b;
}

void ExperimentConfig::validate() const {
    if (sequences.empty()) bad("sequences", "at least one sequence is required");
    std::set<std::string> names;
    for (const auto &s : sequences) {
        if (!names.insert(s.name).second) bad("sequences", "duplicate sequence " + s.name);
        try {
            s.spec(tau() > 0 ? tau() : 1.0).validate();
        } catch (const std::invalid_argument &e) {
            bad("sequences", e.what());
        }
    }
    if (!std::isfinite(eps_pi)) bad("eps_pi", "must be finite");
    if (!(gamma_khz >= 0)) bad("gamma_khz", "must be >= 0");
    if (!(tau_us > 0)) bad("tau_us", "must be > 0");
    if (!(sigma_delta_hz >= 0)) bad("sigma_delta_hz", "must be >= 0");
    if (!(tau_c_ms > 0)) bad("tau_c_ms", "must be > 0");
    if (engine == Engine::MonteCarlo && n_sample < 100) bad("n_sample", "must be >= 100");
    if (!(N >= 1)) bad("N", "must be >= 1");
    if (m_max < 1) bad("m_max", "must be >= 1");
    for (std::size_t i = 0; i < m_checkpoints.size(); ++i) {
        if (m_checkpoints[i] < 1) bad("m_checkpoints", "entries must be >= 1");
        if (i > 0 && m_checkpoints[i] <= m_checkpoints[i - 1]) bad("m_checkpoints", "must be strictly increasing");
    }
    if (checkpoints_per_decade < 1) bad("checkpoints_per_decade", "must be >= 1");
    for (std::size_t i = 0; i < tau_grid_us.size(); ++i) {
        if (!(tau_grid_us[i] > 0)) bad("tau_grid_us", "entries must be > 0");
        if (i > 0 && tau_grid_us[i] <= tau_grid_us[i - 1]) bad("tau_grid_us", "must be sorted and strictly increasing");
    }
    if (!(total_time_s > 0)) bad("total_time_s", "must be > 0");
    if (ou_substeps < 1) bad("ou_substeps", "must be >= 1");
    if (!(guard_threshold > 0)) bad("guard_threshold", "must be > 0");
    if (engine == Engine::Quadrature && ou_enabled) bad("engine", "quadrature requires ou_enabled = false");
    try {
        memory.validate();
    } catch (const std::invalid_argument &e) {
        bad("memory", e.what());
    }
}

json ExperimentConfig::to_json() const {
    json seqs = json::array();
    for (const auto &s : sequences) seqs.push_back(sequence_to_json(s));
    json j = {
        {"bundle", bundle},
        {"sequences", seqs},
        {"eps_pi", eps_pi},
        {"gamma_khz", gamma_khz},
        {"shape", shape_name(shape)},
        {"tau_us", tau_us},
        {"sigma_delta_hz", sigma_delta_hz},
        {"sigma_delta_units", sigma_units_name(sigma_delta_units)},
        {"tau_c_ms", tau_c_ms},
        {"seed", seed},
        {"n_sample", n_sample},
        {"N", N},
        {"m_max", m_max},
        {"m_checkpoints", m_checkpoints},
        {"checkpoints_per_decade", checkpoints_per_decade},
        {"sweep", sweep_name(sweep)},
        {"tau_grid_us", tau_grid_us},
        {"total_time_s", total_time_s},
        {"ou_enabled", ou_enabled},
        {"ou_substeps", ou_substeps},
        {"ou_model", ou_model_name(ou_model)},
        {"jackknife", jackknife},
        {"engine", engine_name(engine)},
        {"guard_threshold", guard_threshold},
        {"format", format_name(format)},
        {"memory", memory_to_json(memory)},
    };
    return j;
}

ExperimentConfig ExperimentConfig::from_json(const json &j, const ExperimentConfig &base) {
    if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
    ExperimentConfig c = base;
    for (const char *key : {"bundle", "preset"}) {
        if (j.contains(key)) {
            if (!j[key].is_string()) bad(key, "expected a bundle name");
            try {
                c = ddmem::bundle(j[key].get<std::string>());
            } catch (const std::invalid_argument &e) {
                bad(key, e.what());
            }
        }
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string &k = it.key();
        const json &v = *it;
        try {
            if (k == "bundle" || k == "preset") {
                continue;
            } else if (k == "sequences") {
                c.sequences.clear();
                if (v.is_string()) {
                    c.sequences = parse_sequence_list(v.get<std::string>());
                } else {
                    for (const auto &e : v) c.sequences.push_back(sequence_from_json(e));
                }
            } else if (k == "eps_pi") {
                c.eps_pi = v.get<double>();
            } else if (k == "gamma_khz") {
                c.gamma_khz = v.get<double>();
            } else if (k == "shape") {
                c.shape = parse_shape(v.get<std::string>());
            } else if (k == "tau_us") {
                c.tau_us = v.get<double>();
            } else if (k == "sigma_delta_hz") {
                c.sigma_delta_hz = v.get<double>();
            } else if (k == "sigma_delta_units") {
                c.sigma_delta_units = parse_sigma_units(v.get<std::string>());
            } else if (k == "tau_c_ms") {
                c.tau_c_ms = v.get<double>();
            } else if (k == "seed") {
                c.seed = v.get<std::uint64_t>();
            } else if (k == "n_sample") {
                c.n_sample = v.get<std::size_t>();
            } else if (k == "N") {
                c.N = v.is_string() && lower(v.get<std::string>()) == "inf" ? kInfiniteN : v.get<double>();
            } else if (k == "m_max") {
                c.m_max = v.get<std::int64_t>();
            } else if (k == "m_checkpoints") {
                c.m_checkpoints = v.get<std::vector<std::int64_t>>();
            } else if (k == "checkpoints_per_decade") {
                c.checkpoints_per_decade = v.get<int>();
            } else if (k == "sweep") {
                c.sweep = parse_sweep(v.get<std::string>());
            } else if (k == "tau_grid_us") {
                c.tau_grid_us = v.get<std::vector<double>>();
            } else if (k == "total_time_s") {
                c.total_time_s = v.get<double>();
            } else if (k == "ou_enabled") {
                c.ou_enabled = v.get<bool>();
            } else if (k == "ou_substeps") {
                c.ou_substeps = v.get<int>();
            } else if (k == "ou_model") {
                c.ou_model = parse_ou_model(v.get<std::string>());
            } else if (k == "jackknife") {
                c.jackknife = v.get<bool>();
            } else if (k == "workers") {
                c.workers = v.get<unsigned>();
            } else if (k == "engine") {
                c.engine = parse_engine(v.get<std::string>());
            } else if (k == "guard_threshold") {
                c.guard_threshold = v.get<double>();
            } else if (k == "format") {
                c.format = parse_format(v.get<std::string>());
            } else if (k == "output") {
                c.output = v.get<std::string>();
            } else if (k == "memory") {
                c.memory = memory_from_json(v, c.memory);
            } else {
                bad(k, "unknown key");
            }
        } catch (const json::exception &e) {
            bad(k, e.what());
        }
    }
    return c;
}

std::string ExperimentConfig::hash() const {
    const std::string text = to_json().dump();
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 failed");
    static const char *hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 15]);
    }
    return out;
}

std::vector<std::string> bundle_names() { return {"fig3", "fig4_caption", "fig4_appendix"}; }

ExperimentConfig bundle(std::string_view name) {
    ExperimentConfig c;
    c.bundle = std::string(name);
    if (name == "fig3") {
        c.eps_pi = 0.1;
        c.gamma_khz = 27;
        c.tau_us = 100;
        c.N = 1e10;
        c.m_max = 10000;
        c.sweep = SweepAxis::Repetitions;
        return c;
    }
    if (name == "fig4_caption" || name == "fig4_appendix") {
        c.eps_pi = 0.01;
        c.gamma_khz = 27;
        c.N = 1e10;
        c.sweep = SweepAxis::Tau;
        c.total_time_s = 1.0;
        c.ou_enabled = true;
        c.n_sample = 1000;
        if (name == "fig4_caption") {
            c.sigma_delta_hz = 284;
            c.tau_c_ms = 3.5;
        } else {
            c.sigma_delta_hz = 168;
            c.tau_c_ms = 3.7;
        }
        return c;
    }
    throw std::invalid_argument("unknown bundle: " + std::string(name));
}

ExperimentConfig load_config(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    json j;
    try {
        j = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error &e) {
        throw std::invalid_argument("config: " + path + ": " + e.what());
    }
    return ExperimentConfig::from_json(j);
}

std::vector<SequenceEntry> parse_sequence_list(std::string_view list) {
    std::vector<SequenceEntry> out;
    std::size_t start = 0;
    while (start <= list.size()) {
        const std::size_t end = std::min(list.find(',', start), list.size());
        std::string item(list.substr(start, end - start));
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (item.empty()) bad("sequences", "empty entry in list");
        try {
            out.push_back(SequenceEntry::of(parse_preset(item)));
        } catch (const std::invalid_argument &) {
            bad("sequences", "unknown preset " + item);
        }
        start = end + 1;
    }
    return out;
}

}  // namespace ddmem
