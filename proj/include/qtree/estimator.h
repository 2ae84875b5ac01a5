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

#ifndef QTREE_ESTIMATOR_H
#define QTREE_ESTIMATOR_H

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "qtree/sampler.h"
#include "qtree/serialize.h"

namespace qtree {

struct EstimatorResult {
    double z_hat = 0.0;
    double se = 0.0;
    size_t n_circuits = 0;
    size_t n_shots = 0;
    int t = 0;
    double theta = 0.0;
};

/// 1/2 - (-1)^m0 / sign(n_z), so -1/2 when the prediction agrees with m0
/// and 3/2 when it does not.
double x_statistic(int m0, double n_z);

/// Grand mean of per-circuit means and its standard error, the sample
/// standard deviation of the circuit means over sqrt(N_c). `xs[i]` holds the
/// shot values of circuit i.
EstimatorResult estimate_Z(const std::vector<std::vector<double>> &xs, int t = 0, double theta = 0.0);

/// Samples `n_shots` records per circuit with per-shot streams
/// shot_stream(seed, circuit_id, shot). Output is ordered by (circuit, shot).
std::vector<RecordLine> simulate_records(const InstanceSet &set, size_t n_shots, uint64_t seed, Backend backend,
                                         int workers = 0);

/// Decodes every record at each depth t' = 1..set.t (truncating instance and
/// record) and aggregates. Element t'-1 holds the depth-t' estimate.
std::vector<EstimatorResult> estimate_from_records(const InstanceSet &set, std::span<const RecordLine> records,
                                                   int workers = 0);

struct ProtocolConfig {
    int t = 4;
    double theta = 2.0;
    size_t n_circuits = 834;
    size_t n_shots = 8;
    uint64_t seed = 0;
    Backend backend = Backend::kBranch;
    int workers = 0;
};

/// Builds instances, samples, decodes and aggregates. Returns one result per
/// t' = 1..t, the smaller depths obtained by truncation.
std::vector<EstimatorResult> run_protocol(const ProtocolConfig &config);

/// Columns t, theta, z_hat, se, n_circuits, n_shots.
void write_results_csv(std::ostream &out, const std::vector<EstimatorResult> &rows,
                       const nlohmann::json &header = nullptr);
std::vector<EstimatorResult> read_results_csv(std::istream &in);

}  // namespace qtree

#endif
