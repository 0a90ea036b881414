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

#ifndef DDMEM_CONFIG_H
#define DDMEM_CONFIG_H

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ddmem/broadening.h"
#include "ddmem/ensemble.h"
#include "ddmem/memory.h"
#include "ddmem/sequences.h"

namespace ddmem {

enum class SweepAxis { Repetitions, Tau };
enum class OutputFormat { Csv, JsonLines };
/// How sigma_delta_hz is read: angular multiplies by 2 pi, hz uses the number as rad/s unchanged.
enum class SigmaUnits { Angular, Hz, Both };
enum class Engine { MonteCarlo, Quadrature };

/// A preset, or a custom phase list in units of pi with optional per-pulse errors in units of pi.
struct SequenceEntry {
    std::string name;
    Preset preset = Preset::CP;
    std::vector<double> phases_pi;
    std::vector<double> pulse_eps_pi;

    static SequenceEntry of(Preset p);
    SequenceSpec spec(double tau) const;
};

/// Every physical quantity carries its unit in the key name; SI-angular values are derived on demand.
struct ExperimentConfig {
    std::string bundle;
    std::vector<SequenceEntry> sequences;
    double eps_pi = 0.1;
    double gamma_khz = 27.0;
    Shape shape = Shape::Gaussian;
    double tau_us = 100.0;
    double sigma_delta_hz = 0.0;
    SigmaUnits sigma_delta_units = SigmaUnits::Angular;
    double tau_c_ms = 3.5;
    std::uint64_t seed = 1;
    std::size_t n_sample = 10000;
    double N = 1e10;
    std::int64_t m_max = 1000;
    /// empty: log-spaced from 1 to m_max
    std::vector<std::int64_t> m_checkpoints;
    int checkpoints_per_decade = 8;
    SweepAxis sweep = SweepAxis::Repetitions;
    std::vector<double> tau_grid_us;
    double total_time_s = 1.0;
    bool ou_enabled = false;
    int ou_substeps = 1;
    OuPhaseModel ou_model = OuPhaseModel::PiecewiseConstant;
    bool jackknife = false;
    unsigned workers = 0;
    Engine engine = Engine::MonteCarlo;
    double guard_threshold = 0.01;
    OutputFormat format = OutputFormat::Csv;
    std::string output;
    MemoryParams memory;

    ExperimentConfig();

    /// Throws std::invalid_argument naming the offending key.
    void validate() const;

    double eps() const;
    double gamma() const;
    double tau() const;
    double tau_c() const;
    /// sigma_delta in rad/s for one reading of the units (Both is not accepted here)
    double sigma_delta(SigmaUnits units) const;
    std::vector<SigmaUnits> sigma_readings() const;
    std::vector<std::int64_t> checkpoints() const;
    /// default tau grid when tau_grid_us is empty: 25 ms / k, so that m L tau = 1 s holds exactly for every preset
    std::vector<double> tau_grid() const;
    BroadeningParams broadening(SigmaUnits units) const;

    nlohmann::json to_json() const;
    /// Strict: unknown keys are errors. Missing keys keep the defaults of the named bundle when
    /// "bundle" (or "preset") is present, else those of base.
    static ExperimentConfig from_json(const nlohmann::json &j, const ExperimentConfig &base = ExperimentConfig());

    /// SHA-256 of the canonical JSON form, hex encoded.
    std::string hash() const;
};

std::string sigma_units_name(SigmaUnits u);
SigmaUnits parse_sigma_units(std::string_view s);

/// Parameter bundles: fig3, fig4_caption, fig4_appendix.
std::vector<std::string> bundle_names();
ExperimentConfig bundle(std::string_view name);

ExperimentConfig load_config(const std::string &path);

/// Parses "CP,XY4,U5a:CP" into entries.
std::vector<SequenceEntry> parse_sequence_list(std::string_view list);

}  // namespace ddmem

#endif
