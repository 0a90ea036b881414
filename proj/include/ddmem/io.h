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

#ifndef DDMEM_IO_H
#define DDMEM_IO_H

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "ddmem/sweep.h"

namespace ddmem {

struct OutputHeader {
    std::string config_hash;
    std::uint64_t seed = 0;
    /// canonical config JSON, one line
    std::string config;
};

/// Column names of the CSV schema, in order.
const std::vector<std::string> &csv_columns();

/// Shortest round-trip decimal, '.' separator, "inf", "-inf", "nan" for non-finite values.
std::string format_double(double x);
/// Inverse of format_double; throws std::invalid_argument on trailing garbage.
double parse_double(std::string_view s);

/// RFC-4180 CSV preceded by "# key: value" header lines.
void write_csv(std::ostream &out, const OutputHeader &header, const std::vector<SweepRow> &rows);
void read_csv(std::istream &in, OutputHeader &header, std::vector<SweepRow> &rows);

/// JSON lines: a header object, then one object per row. Non-finite numbers are written as strings.
void write_jsonl(std::ostream &out, const OutputHeader &header, const std::vector<SweepRow> &rows);
void read_jsonl(std::istream &in, OutputHeader &header, std::vector<SweepRow> &rows);

/// Splits one CSV record, honouring quotes; the record may span lines, so it reads from the stream.
bool read_csv_record(std::istream &in, std::vector<std::string> &fields);

}  // namespace ddmem

#endif
