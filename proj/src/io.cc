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

#include "ddmem/io.h"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace ddmem {

using nlohmann::json;

namespace {

// Column accessors keep the CSV and JSON schemas in one place.
enum class Kind { Text, Int, Real, Flag, Optional };

struct Column {
    const char *name;
    Kind kind;
    std::string SweepRow::*text = nullptr;
    std::int64_t SweepRow::*integer = nullptr;
    double SweepRow::*real = nullptr;
    bool SweepRow::*flag = nullptr;
    std::optional<double> SweepRow::*opt = nullptr;
};

const std::vector<Column> &columns() {
    static const std::vector<Column> cols = {
        {"sequence", Kind::Text, &SweepRow::sequence},
        {"sigma_delta_units", Kind::Text, &SweepRow::sigma_delta_units},
        {"m", Kind::Int, nullptr, &SweepRow::m},
        {"tau_s", Kind::Real, nullptr, nullptr, &SweepRow::tau_s},
        {"t_s", Kind::Real, nullptr, nullptr, &SweepRow::t_s},
        {"rho_ss", Kind::Real, nullptr, nullptr, &SweepRow::rho_ss},
        {"rho_ss_err", Kind::Real, nullptr, nullptr, &SweepRow::rho_ss_err},
        {"eta_coh", Kind::Real, nullptr, nullptr, &SweepRow::eta_coh},
        {"eta_coh_err", Kind::Real, nullptr, nullptr, &SweepRow::eta_coh_err},
        {"R", Kind::Real, nullptr, nullptr, &SweepRow::R},
        {"R_err", Kind::Real, nullptr, nullptr, &SweepRow::R_err},
        {"snr", Kind::Real, nullptr, nullptr, &SweepRow::snr},
        {"guard_flag", Kind::Flag, nullptr, nullptr, nullptr, &SweepRow::guard_flag},
        {"eta_coh_below_0.9_flag", Kind::Flag, nullptr, nullptr, nullptr, &SweepRow::eta_coh_below},
        {"eta_coh_crossing", Kind::Flag, nullptr, nullptr, nullptr, &SweepRow::eta_crossing},
        {"noise_limited", Kind::Flag, nullptr, nullptr, nullptr, &SweepRow::noise_limited},
        {"eta_artificial", Kind::Real, nullptr, nullptr, &SweepRow::eta_artificial},
        {"eta_artificial_err", Kind::Real, nullptr, nullptr, &SweepRow::eta_artificial_err},
        {"artificial_noise_limited", Kind::Flag, nullptr, nullptr, nullptr, &SweepRow::artificial_noise_limited},
        {"rho_ss_analytic", Kind::Optional, nullptr, nullptr, nullptr, nullptr, &SweepRow::rho_ss_analytic},
        {"eta_coh_analytic", Kind::Optional, nullptr, nullptr, nullptr, nullptr, &SweepRow::eta_coh_analytic},
        {"R_analytic", Kind::Optional, nullptr, nullptr, nullptr, nullptr, &SweepRow::R_analytic},
        {"R_analytic_arbitrated", Kind::Optional, nullptr, nullptr, nullptr, nullptr, &SweepRow::R_analytic_arbitrated},
        {"R_large_m", Kind::Optional, nullptr, nullptr, nullptr, nullptr, &SweepRow::R_large_m},
    };
    return cols;
}

std::int64_t parse_int(std::string_view s) {
    std::int64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw std::invalid_argument("bad integer: " + std::string(s));
    return v;
}

bool parse_flag(std::string_view s) {
    if (s == "1") return true;
    if (s == "0") return false;
    throw std::invalid_argument("bad flag: " + std::string(s));
}

std::string quote(const std::string &s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string cell(const SweepRow &r, const Column &c) {
    switch (c.kind) {
        case Kind::Text: return quote(r.*c.text);
        case Kind::Int: return std::to_string(r.*c.integer);
        case Kind::Real: return format_double(r.*c.real);
        case Kind::Flag: return r.*c.flag ? "1" : "0";
        case Kind::Optional: return (r.*c.opt) ? format_double(*(r.*c.opt)) : "";
    }
    return "";
}

void set_cell(SweepRow &r, const Column &c, const std::string &v) {
    switch (c.kind) {
        case Kind::Text: r.*c.text = v; break;
        case Kind::Int: r.*c.integer = parse_int(v); break;
        case Kind::Real: r.*c.real = parse_double(v); break;
        case Kind::Flag: r.*c.flag = parse_flag(v); break;
        case Kind::Optional:
            if (v.empty())
                (r.*c.opt).reset();
            else
                r.*c.opt = parse_double(v);
            break;
    }
}

json number(double x) {
    if (std::isfinite(x)) return x;
    return format_double(x);
}

double number_from(const json &j) {
    if (j.is_string()) return parse_double(j.get<std::string>());
    return j.get<double>();
}

bool parse_header_line(const std::string &line, OutputHeader &h) {
    if (line.rfind("# ", 0) != 0) return false;
    const auto colon = line.find(": ");
    if (colon == std::string::npos) return true;
    const std::string key = line.substr(2, colon - 2), value = line.substr(colon + 2);
    if (key == "config_hash") h.config_hash = value;
    if (key == "seed") h.seed = static_cast<std::uint64_t>(std::stoull(value));
    if (key == "config") h.config = value;
    return true;
}

}  // namespace

const std::vector<std::string> &csv_columns() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto &c : columns()) v.push_back(c.name);
        return v;
    }();
    return names;
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc()) throw std::runtime_error("to_chars failed");
    return std::string(buf, p);
}

double parse_double(std::string_view s) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    double v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw std::invalid_argument("bad number: " + std::string(s));
    return v;
}

void write_csv(std::ostream &out, const OutputHeader &header, const std::vector<SweepRow> &rows) {
    out << "# ddmem sweep\r\n";
    out << "# config_hash: " << header.config_hash << "\r\n";
    out << "# seed: " << header.seed << "\r\n";
    if (!header.config.empty()) out << "# config: " << header.config << "\r\n";
    const auto &cols = columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i].name;
    out << "\r\n";
    for (const auto &r : rows) {
        for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cell(r, cols[i]);
        out << "\r\n";
    }
}

bool read_csv_record(std::istream &in, std::vector<std::string> &fields) {
    fields.clear();
    std::string cur;
    bool quoted = false, any = false;
    char c;
    while (in.get(c)) {
        any = true;
        if (quoted) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    cur += '"';
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else if (c == '\r') {
            if (in.peek() == '\n') in.get(c);
            break;
        } else if (c == '\n') {
            break;
        } else {
            cur += c;
        }
    }
    if (!any) return false;
    if (quoted) throw std::invalid_argument("unterminated quoted field");
    fields.push_back(std::move(cur));
    return true;
}

void read_csv(std::istream &in, OutputHeader &header, std::vector<SweepRow> &rows) {
    header = {};
    rows.clear();
    while (in.peek() == '#') {
        std::string line;
        std::getline(in, line);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        parse_header_line(line, header);
    }
    std::vector<std::string> f;
    if (!read_csv_record(in, f)) throw std::invalid_argument("missing CSV column header");
    const auto &cols = columns();
    std::vector<const Column *> order;
    for (const auto &name : f) {
        const Column *match = nullptr;
        for (const auto &c : cols)
            if (name == c.name) match = &c;
        if (!match) throw std::invalid_argument("unknown CSV column: " + name);
        order.push_back(match);
    }
    while (read_csv_record(in, f)) {
        if (f.size() == 1 && f[0].empty()) continue;
        if (f.size() != order.size()) throw std::invalid_argument("CSV row has the wrong number of fields");
        SweepRow r;
        for (std::size_t i = 0; i < f.size(); ++i) set_cell(r, *order[i], f[i]);
        rows.push_back(std::move(r));
    }
}

void write_jsonl(std::ostream &out, const OutputHeader &header, const std::vector<SweepRow> &rows) {
    json h = {{"config_hash", header.config_hash}, {"seed", header.seed}};
    if (!header.config.empty()) h["config"] = json::parse(header.config);
    out << json{{"header", h}}.dump() << "\n";
    for (const auto &r : rows) {
        json j = json::object();
        for (const auto &c : columns()) {
            switch (c.kind) {
                case Kind::Text: j[c.name] = r.*c.text; break;
                case Kind::Int: j[c.name] = r.*c.integer; break;
                case Kind::Real: j[c.name] = number(r.*c.real); break;
                case Kind::Flag: j[c.name] = r.*c.flag; break;
                case Kind::Optional: j[c.name] = (r.*c.opt) ? number(*(r.*c.opt)) : json(nullptr); break;
            }
        }
        out << j.dump() << "\n";
    }
}

void read_jsonl(std::istream &in, OutputHeader &header, std::vector<SweepRow> &rows) {
    header = {};
    rows.clear();
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const json j = json::parse(line);
        if (first && j.contains("header")) {
            const json &h = j["header"];
            header.config_hash = h.value("config_hash", "");
            header.seed = h.value("seed", std::uint64_t{0});
            if (h.contains("config")) header.config = h["config"].dump();
            first = false;
            continue;
        }
        first = false;
        SweepRow r;
        for (const auto &c : columns()) {
            if (!j.contains(c.name)) throw std::invalid_argument(std::string("missing field ") + c.name);
            const json &v = j[c.name];
            switch (c.kind) {
                case Kind::Text: r.*c.text = v.get<std::string>(); break;
                case Kind::Int: r.*c.integer = v.get<std::int64_t>(); break;
                case Kind::Real: r.*c.real = number_from(v); break;
                case Kind::Flag: r.*c.flag = v.get<bool>(); break;
                case Kind::Optional:
                    if (v.is_null())
                        (r.*c.opt).reset();
                    else
                        r.*c.opt = number_from(v);
                    break;
            }
        }
        rows.push_back(std::move(r));
    }
}

}  // namespace ddmem
