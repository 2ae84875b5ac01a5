// Copyright 2026 The qtree Authors
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

#ifndef QTREE_SERIALIZE_H
#define QTREE_SERIALIZE_H

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "qtree/tree_model.h"

namespace qtree {

inline constexpr int kFormatVersion = 1;

/// A batch of circuits sharing depth, strength and batch seed.
struct InstanceSet {
    int t = 1;
    double theta = kThetaMin;
    uint64_t seed = 0;
    std::vector<uint64_t> ids;
    std::vector<TreeInstance> circuits;
};

/// Builds circuits 0..n-1 with seeds circuit_seed(seed, id).
InstanceSet make_instance_set(int t, double theta, uint64_t seed, size_t n_circuits);

/// Writes the instances document. `header` (run config, version) is stored
/// under the "header" key when non-null.
void write_instances(std::ostream &out, const InstanceSet &set, const nlohmann::json &header = nullptr);
InstanceSet read_instances(std::istream &in);

struct RecordLine {
    uint64_t circuit_id = 0;
    uint64_t shot = 0;
    MeasurementRecord record;
};

/// One JSON object per line. An optional first line {"header": ...}
/// carries the producing config.
void write_records(std::ostream &out, std::span<const RecordLine> records, const nlohmann::json &header = nullptr);
std::vector<RecordLine> read_records(std::istream &in);

/// Parses a whole JSON document, reporting syntax errors with the line
/// number and the key path being read when the error occurred.
nlohmann::json parse_json_document(const std::string &text);

/// Delimited-text outputs open with one "# {json}" line carrying the
/// producing config; readers skip lines starting with '#'.
void write_comment_header(std::ostream &out, const nlohmann::json &header);

/// Shortest text that round-trips the double.
std::string format_double(double x);

/// Splits a comma-delimited line.
std::vector<std::string> split_csv_line(const std::string &line);

}  // namespace qtree

#endif
