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

#ifndef QTREE_POOL_H
#define QTREE_POOL_H

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "qtree/rng.h"

namespace qtree {

/// Empirical population of collapse-process Z values at a single time step.
struct Pool {
    double theta = 0.0;
    int t = 0;
    std::vector<double> values;

    size_t size() const {
        return values.size();
    }
};

Pool pool_init(size_t size, double theta);

/// One collapse node with Haar-random input eigenbases: inputs carry smaller
/// eigenvalues z_left and z_right, weak outcomes and the projective outcome
/// are Born-sampled, and the surviving qubit's smaller eigenvalue is returned.
double pool_node_sample(double z_left, double z_right, double theta, Rng &rng);

/// Advances the pool one generation. Slot i of generation t+1 draws from the
/// stream derive_seed(seed, {kPoolSlot, theta bits, t+1, i}), so the result
/// does not depend on the worker count.
void pool_step(Pool &pool, uint64_t seed, int workers = 0);

struct PoolStats {
    double z_mean = 0.0;
    double z_typ = 0.0;  // geometric mean over entries above kPoolZeroFloor; 0 if none
    double se = 0.0;     // pool standard deviation / sqrt(size)
    size_t n_positive = 0;
};

inline constexpr double kPoolZeroFloor = 1e-300;

PoolStats pool_stats(const Pool &pool);

struct CurvePoint {
    double theta = 0.0;
    int t = 0;
    double z_mean = 0.0;
    double z_typ = 0.0;
    double se = 0.0;
    size_t pool_size = 0;
};

/// Runs an independent pool per theta and records statistics after every
/// step t = 1..t_max. Rows are ordered by theta (grid order) then t.
std::vector<CurvePoint> pool_run(const std::vector<double> &theta_grid, int t_max, size_t size, uint64_t seed,
                                 int workers = 0);

/// Parses "start:stop:count" (inclusive endpoints) or a single value.
std::vector<double> parse_theta_grid(const std::string &spec);

void write_curves_csv(std::ostream &out, const std::vector<CurvePoint> &points,
                      const nlohmann::json &header = nullptr);
std::vector<CurvePoint> read_curves_csv(std::istream &in);

}  // namespace qtree

#endif
