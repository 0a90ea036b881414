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

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "ddmem/config.h"
#include "ddmem/io.h"
#include "ddmem/memory.h"
#include "ddmem/sweep.h"
#include "ddmem/verify.h"

using namespace ddmem;

namespace {

struct SweepArgs {
    std::string config_path, preset, sequences, format, output, shape, sigma_units, engine;
    std::optional<double> eps, gamma_khz, tau_us, sigma_delta_hz, tau_c_ms, N, total_time_s, guard;
    std::optional<std::int64_t> m_max;
    std::optional<std::size_t> n_sample;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    std::vector<std::string> sets;
    bool ou = false, no_ou = false, jackknife = false, tau_sweep = false, no_config_line = false;
};

struct MemoryArgs {
    std::optional<double> d_tilde, eta_D, mu_in, C, transfer;
    std::string scheme;

    nlohmann::json to_json() const {
        nlohmann::json j = nlohmann::json::object();
        if (d_tilde) j["d_tilde"] = *d_tilde;
        if (eta_D) j["eta_D"] = *eta_D;
        if (mu_in) j["mu_in"] = *mu_in;
        if (C) j["C"] = *C;
        if (transfer) j["transfer"] = *transfer;
        if (!scheme.empty()) j["scheme"] = scheme;
        return j;
    }
    void add(CLI::App *app) {
        app->add_option("--d-tilde", d_tilde, "effective optical depth");
        app->add_option("--eta-d", eta_D, "detection efficiency");
        app->add_option("--mu-in", mu_in, "mean input photon number");
        app->add_option("--scheme", scheme, "AFC_backward, AFC_forward or EIT");
        app->add_option("--C", C, "EIT efficiency constant");
        app->add_option("--transfer", transfer, "fraction of the storage population reaching the excited state");
    }
};

MemoryParams memory_from(const MemoryArgs &a, MemoryParams base) {
    if (a.d_tilde) base.d_tilde = *a.d_tilde;
    if (a.eta_D) base.eta_D = *a.eta_D;
    if (a.mu_in) base.mu_in = *a.mu_in;
    if (a.C) base.C = *a.C;
    if (a.transfer) base.transfer = *a.transfer;
    if (!a.scheme.empty()) base.scheme = parse_scheme(a.scheme);
    base.validate();
    return base;
}

ExperimentConfig build_config(const SweepArgs &a, const MemoryArgs &mem) {
    ExperimentConfig base;
    if (!a.config_path.empty()) base = load_config(a.config_path);
    nlohmann::json j = nlohmann::json::object();
    if (!a.preset.empty()) {
        if (!a.config_path.empty()) throw std::invalid_argument("--preset and --config are exclusive");
        j["bundle"] = a.preset;
    }
    if (!a.sequences.empty()) j["sequences"] = a.sequences;
    if (a.eps) j["eps_pi"] = *a.eps;
    if (a.gamma_khz) j["gamma_khz"] = *a.gamma_khz;
    if (!a.shape.empty()) j["shape"] = a.shape;
    if (a.tau_us) j["tau_us"] = *a.tau_us;
    if (a.sigma_delta_hz) j["sigma_delta_hz"] = *a.sigma_delta_hz;
    if (!a.sigma_units.empty()) j["sigma_delta_units"] = a.sigma_units;
    if (a.tau_c_ms) j["tau_c_ms"] = *a.tau_c_ms;
    if (a.N) j["N"] = *a.N;
    if (a.total_time_s) j["total_time_s"] = *a.total_time_s;
    if (a.guard) j["guard_threshold"] = *a.guard;
    if (a.m_max) j["m_max"] = *a.m_max;
    if (a.n_sample) j["n_sample"] = *a.n_sample;
    if (a.seed) j["seed"] = *a.seed;
    if (a.workers) j["workers"] = *a.workers;
    if (a.ou) j["ou_enabled"] = true;
    if (a.no_ou) j["ou_enabled"] = false;
    if (a.jackknife) j["jackknife"] = true;
    if (a.tau_sweep) j["sweep"] = "tau";
    if (!a.engine.empty()) j["engine"] = a.engine;
    if (!a.format.empty()) j["format"] = a.format;
    if (!a.output.empty()) j["output"] = a.output;
    for (const auto &s : a.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got " + s);
        const std::string key = s.substr(0, eq), val = s.substr(eq + 1);
        nlohmann::json v;
        try {
            v = nlohmann::json::parse(val);
        } catch (const nlohmann::json::exception &) {
            v = val;
        }
        j[key] = v;
    }
    const nlohmann::json m = mem.to_json();
    if (!m.empty()) {
        nlohmann::json merged = j.contains("memory") ? j["memory"] : base.to_json()["memory"];
        merged.update(m);
        j["memory"] = merged;
    }
    ExperimentConfig c = ExperimentConfig::from_json(j, base);
    c.validate();
    return c;
}

int cmd_sweep(const SweepArgs &a, const MemoryArgs &mem) {
    const ExperimentConfig c = build_config(a, mem);
    const SweepOutput out = run_sweep(c);
    for (const auto &w : out.warnings) std::cerr << "warning: " << w << "\n";
    OutputHeader h;
    h.config_hash = c.hash();
    h.seed = c.seed;
    if (!a.no_config_line) h.config = c.to_json().dump();
    std::ofstream file;
    std::ostream *os = &std::cout;
    if (!c.output.empty() && c.output != "-") {
        file.open(c.output, std::ios::binary);
        if (!file) throw std::runtime_error("cannot open " + c.output);
        os = &file;
    }
    if (c.format == OutputFormat::Csv)
        write_csv(*os, h, out.rows);
    else
        write_jsonl(*os, h, out.rows);
    os->flush();
    if (!*os) throw std::runtime_error("write failed");
    return 0;
}

int cmd_verify(const std::string &level, const std::vector<std::string> &overrides, const std::vector<int> &criteria,
               const std::string &report, unsigned workers, bool quiet) {
    VerifyOptions o;
    if (level == "fast")
        o.level = VerifyLevel::Fast;
    else if (level == "full")
        o.level = VerifyLevel::Full;
    else
        throw std::invalid_argument("verify level must be fast or full");
    for (const auto &s : overrides) parse_coefficient_override(s, o.coefficient_overrides);
    o.criteria = criteria;
    o.workers = workers;
    if (!quiet) {
        o.on_check = [](const Check &c) {
            const char *tag = c.info ? "info" : c.passed ? "pass" : c.known_failure ? "KNOWN" : "FAIL";
            std::cerr << "[" << tag << "] " << c.criterion << "/" << c.id << ": " << c.detail << "\n";
        };
    }
    const VerifyReport r = run_verify(o);
    const std::string text = r.to_json().dump(2);
    if (report.empty() || report == "-") {
        std::cout << text << "\n";
    } else {
        std::ofstream f(report);
        f << text << "\n";
        if (!f) throw std::runtime_error("cannot write " + report);
    }
    const int bad = r.unexpected_failures();
    if (bad) {
        std::cerr << bad << " check(s) failed:";
        for (const auto &c : r.checks)
            if (!c.info && !c.passed && !c.known_failure) std::cerr << " " << c.criterion << "/" << c.id;
        std::cerr << "\n";
    }
    return bad ? 1 : 0;
}

int cmd_snr(const std::string &input, const std::vector<double> &Rs, const MemoryArgs &mem, const std::string &output) {
    const MemoryParams p = memory_from(mem, MemoryParams());
    std::ofstream file;
    std::ostream *os = &std::cout;
    if (!output.empty() && output != "-") {
        file.open(output, std::ios::binary);
        if (!file) throw std::runtime_error("cannot open " + output);
        os = &file;
    }
    if (!input.empty()) {
        std::ifstream in(input, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open " + input);
        std::string first;
        std::getline(in, first);
        in.seekg(0);
        const bool jsonl = !first.empty() && first[0] == '{';
        OutputHeader h;
        std::vector<SweepRow> rows;
        if (jsonl)
            read_jsonl(in, h, rows);
        else
            read_csv(in, h, rows);
        std::vector<std::string> warnings;
        apply_snr(rows, p, &warnings);
        for (const auto &w : warnings) std::cerr << "warning: " << w << "\n";
        if (jsonl)
            write_jsonl(*os, h, rows);
        else
            write_csv(*os, h, rows);
        return 0;
    }
    if (Rs.empty()) throw std::invalid_argument("snr needs --input or --R");
    *os << "R,snr\r\n";
    for (double R : Rs) {
        const MemoryValue v = snr_from_ratio(p, R);
        for (const auto &w : v.warnings) std::cerr << "warning: " << w << "\n";
        *os << format_double(R) << "," << format_double(v.value) << "\r\n";
    }
    return 0;
}

int cmd_presets(const std::string &name) {
    if (name.empty()) {
        for (const auto &n : bundle_names()) std::cout << n << "\n";
        return 0;
    }
    std::cout << bundle(name).to_json().dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"ddmem: dynamical-decoupling noise in spin-ensemble memories"};
    app.require_subcommand(1);

    SweepArgs sa;
    MemoryArgs sweep_mem;
    auto *sweep = app.add_subcommand("sweep", "run a sweep and write CSV or JSON lines");
    sweep->add_option("--config", sa.config_path, "JSON config file (comments allowed)");
    sweep->add_option("--preset", sa.preset, "parameter bundle: fig3, fig4_caption, fig4_appendix");
    sweep->add_option("--sequences", sa.sequences, "comma list, e.g. CP,XY4,U5a:CP");
    sweep->add_option("--eps", sa.eps, "pulse amplitude error in units of pi");
    sweep->add_option("--gamma-khz", sa.gamma_khz, "inhomogeneous FWHM / 2 pi [kHz]");
    sweep->add_option("--shape", sa.shape, "gaussian or lorentzian");
    sweep->add_option("--tau-us", sa.tau_us, "pulse spacing [us]");
    sweep->add_option("--sigma-delta-hz", sa.sigma_delta_hz, "OU width");
    sweep->add_option("--sigma-units", sa.sigma_units, "angular, hz or both");
    sweep->add_option("--tau-c-ms", sa.tau_c_ms, "OU correlation time [ms]");
    sweep->add_option("--N", sa.N, "atom number");
    sweep->add_option("--m-max", sa.m_max, "largest repetition count");
    sweep->add_option("--n-sample", sa.n_sample, "Monte Carlo spins");
    sweep->add_option("--seed", sa.seed, "RNG seed");
    sweep->add_option("--workers", sa.workers, "worker threads (0: DDMEM_WORKERS or all cores)");
    sweep->add_option("--total-time-s", sa.total_time_s, "m L tau for the tau sweep");
    sweep->add_option("--guard-threshold", sa.guard, "collective-emission warning level");
    sweep->add_flag("--ou", sa.ou, "enable spectral diffusion");
    sweep->add_flag("--no-ou", sa.no_ou, "disable spectral diffusion");
    sweep->add_flag("--tau-sweep", sa.tau_sweep, "sweep tau instead of m");
    sweep->add_flag("--jackknife", sa.jackknife, "add jackknife errors");
    sweep->add_option("--engine", sa.engine, "monte_carlo or quadrature");
    sweep->add_option("--format", sa.format, "csv or jsonl");
    sweep->add_option("--output,-o", sa.output, "output file (default stdout)");
    sweep->add_option("--set", sa.sets, "raw config override key=value (JSON value)");
    sweep->add_flag("--no-config-line", sa.no_config_line, "omit the config JSON from the header");
    sweep_mem.add(sweep);

    std::string level = "fast", report;
    std::vector<std::string> overrides;
    std::vector<int> criteria;
    unsigned vworkers = 0;
    bool quiet = false;
    auto *verify = app.add_subcommand("verify", "run the invariant suites and emit a JSON report");
    verify->add_option("level", level, "fast or full")->check(CLI::IsMember({"fast", "full"}));
    verify->add_option("--override-coefficient", overrides, "SEQ:key=value, keys rho_coef and coh_coef");
    verify->add_option("--criteria", criteria, "run only these criteria")->delimiter(',');
    verify->add_option("--report", report, "report file (default stdout)");
    verify->add_option("--workers", vworkers, "worker threads");
    verify->add_flag("--quiet,-q", quiet, "no per-check lines on stderr");

    std::string input, snr_out;
    std::vector<double> Rs;
    MemoryArgs snr_mem;
    auto *snr_cmd = app.add_subcommand("snr", "SNR from R for a finished sweep or given values");
    snr_cmd->add_option("--input", input, "sweep output (CSV or JSON lines)");
    snr_cmd->add_option("--R", Rs, "R values")->delimiter(',');
    snr_cmd->add_option("--output,-o", snr_out, "output file (default stdout)");
    snr_mem.add(snr_cmd);

    std::string bundle_name;
    auto *presets = app.add_subcommand("presets", "list bundles, or print one as JSON");
    presets->add_option("name", bundle_name, "bundle to print");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*sweep) return cmd_sweep(sa, sweep_mem);
        if (*verify) return cmd_verify(level, overrides, criteria, report, vworkers, quiet);
        if (*snr_cmd) return cmd_snr(input, Rs, snr_mem, snr_out);
        if (*presets) return cmd_presets(bundle_name);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
