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

#ifndef QTREE_TREE_MODEL_H
#define QTREE_TREE_MODEL_H

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "qtree/qmath.h"

namespace qtree {

// Node layout (heap / BFS order): node k at time i in [1, t] and position
// p in [0, 2^(i-1)) has id 2^(i-1) - 1 + p. Its through output r feeds the
// left child 2k+1, its ancilla output s feeds the right child 2k+2.
//
// Record layout: bits[0] = m0, then node k's pair at bits[1+2k] (m_r) and
// bits[2+2k] (m_s). A depth-t' record is therefore a prefix of a depth-t one.

/// One realization of the tree circuit.
struct TreeInstance {
    int depth = 1;
    double theta = kThetaMin;
    std::vector<NodeGates> gates;  // BFS order, 2^depth - 1 entries
    uint64_t seed = 0;
};

struct MeasurementRecord {
    std::vector<uint8_t> bits;

    uint8_t m0() const {
        return bits.at(0);
    }
    /// Weak outcomes (everything after m0).
    std::span<const uint8_t> weak() const {
        return std::span<const uint8_t>(bits).subspan(1);
    }
    bool operator==(const MeasurementRecord &) const = default;
};

struct NodePosition {
    int time = 1;
    size_t pos = 0;
    bool operator==(const NodePosition &) const = default;
};

inline constexpr int kMaxDepth = 40;

size_t node_count(int t);
size_t record_length(int t);
size_t weak_length(int t);

/// Throws DomainError unless 1 <= t <= kMaxDepth.
void check_depth(int t);

NodePosition node_position(int t, size_t id);
size_t node_id(int t, NodePosition p);
/// Parent of a non-root node.
size_t parent(int t, size_t id);
size_t left_child(int t, size_t id);
size_t right_child(int t, size_t id);
bool is_leaf(int t, size_t id);

inline size_t r_bit(size_t node) {
    return 1 + 2 * node;
}
inline size_t s_bit(size_t node) {
    return 2 + 2 * node;
}

/// Draws 4(2^t - 1) Haar unitaries node by node from a stream seeded by
/// `seed`. Because gates are drawn in BFS order, the depth-t' prefix of an
/// instance equals build_instance(t', theta, seed).
TreeInstance build_instance(int t, double theta, uint64_t seed);

/// Seed of circuit `circuit_id` in a batch generated from `batch_seed`.
uint64_t circuit_seed(uint64_t batch_seed, uint64_t circuit_id);

TreeInstance truncate(const TreeInstance &instance, int t_prime);
MeasurementRecord truncate(const MeasurementRecord &record, int t_prime);
std::pair<TreeInstance, MeasurementRecord> truncate(const TreeInstance &instance,
                                                    const MeasurementRecord &record, int t_prime);

/// Throws DomainError if the record does not fit the instance.
void check_record(const TreeInstance &instance, const MeasurementRecord &record);

}  // namespace qtree

#endif
