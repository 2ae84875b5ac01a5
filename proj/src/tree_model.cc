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

#include "qtree/tree_model.h"

#include <string>

#include "qtree/errors.h"

namespace qtree {

void check_depth(int t) {
    if (t < 1 || t > kMaxDepth) {
        throw DomainError("tree depth t=" + std::to_string(t) + " outside [1, " + std::to_string(kMaxDepth) + "]");
    }
}

size_t node_count(int t) {
    check_depth(t);
    return (size_t{1} << t) - 1;
}

size_t record_length(int t) {
    return 1 + 2 * node_count(t);
}

size_t weak_length(int t) {
    return 2 * node_count(t);
}

namespace {

void check_node(int t, size_t id) {
    if (id >= node_count(t)) {
        throw DomainError("node id " + std::to_string(id) + " outside depth-" + std::to_string(t) + " tree");
    }
}

}  // namespace

NodePosition node_position(int t, size_t id) {
    check_node(t, id);
    int time = 1;
    while ((size_t{1} << time) - 1 <= id) {
        ++time;
    }
    return {time, id - ((size_t{1} << (time - 1)) - 1)};
}

size_t node_id(int t, NodePosition p) {
    check_depth(t);
    if (p.time < 1 || p.time > t || p.pos >= (size_t{1} << (p.time - 1))) {
        throw DomainError("node position (" + std::to_string(p.time) + ", " + std::to_string(p.pos) +
                          ") outside depth-" + std::to_string(t) + " tree");
    }
    return (size_t{1} << (p.time - 1)) - 1 + p.pos;
}

size_t parent(int t, size_t id) {
    check_node(t, id);
    if (id == 0) {
        throw DomainError("root node has no parent");
    }
    return (id - 1) / 2;
}

size_t left_child(int t, size_t id) {
    if (is_leaf(t, id)) {
        throw DomainError("leaf node " + std::to_string(id) + " has no children");
    }
    return 2 * id + 1;
}

size_t right_child(int t, size_t id) {
    return left_child(t, id) + 1;
}

bool is_leaf(int t, size_t id) {
    check_node(t, id);
    return id >= (size_t{1} << (t - 1)) - 1;
}

uint64_t circuit_seed(uint64_t batch_seed, uint64_t circuit_id) {
    return derive_seed(batch_seed, {tag(StreamTag::kInstance), circuit_id});
}

TreeInstance build_instance(int t, double theta, uint64_t seed) {
    const size_t n = node_count(t);
    TreeInstance inst;
    inst.depth = t;
    inst.theta = checked_theta(theta);
    inst.seed = seed;
    inst.gates.reserve(n);
    Rng rng(seed);
    for (size_t k = 0; k < n; ++k) {
        inst.gates.push_back(haar_node_gates(rng));
    }
    return inst;
}

TreeInstance truncate(const TreeInstance &instance, int t_prime) {
    check_depth(t_prime);
    if (t_prime > instance.depth) {
        throw DomainError("cannot truncate depth-" + std::to_string(instance.depth) + " instance to depth " +
                          std::to_string(t_prime));
    }
    TreeInstance out;
    out.depth = t_prime;
    out.theta = instance.theta;
    out.seed = instance.seed;
    out.gates.assign(instance.gates.begin(), instance.gates.begin() + static_cast<ptrdiff_t>(node_count(t_prime)));
    return out;
}

MeasurementRecord truncate(const MeasurementRecord &record, int t_prime) {
    const size_t n = record_length(t_prime);
    if (n > record.bits.size()) {
        throw DomainError("record of length " + std::to_string(record.bits.size()) + " is shorter than depth " +
                          std::to_string(t_prime) + " needs");
    }
    return MeasurementRecord{{record.bits.begin(), record.bits.begin() + static_cast<ptrdiff_t>(n)}};
}

std::pair<TreeInstance, MeasurementRecord> truncate(const TreeInstance &instance,
                                                    const MeasurementRecord &record, int t_prime) {
    check_record(instance, record);
    return {truncate(instance, t_prime), truncate(record, t_prime)};
}

void check_record(const TreeInstance &instance, const MeasurementRecord &record) {
    if (record.bits.size() != record_length(instance.depth)) {
        throw DomainError("record length " + std::to_string(record.bits.size()) + " does not match depth-" +
                          std::to_string(instance.depth) + " instance (expected " +
                          std::to_string(record_length(instance.depth)) + ")");
    }
    for (uint8_t b : record.bits) {
        if (b > 1) {
            throw DomainError("record bit value " + std::to_string(b) + " is not 0 or 1");
        }
    }
}

}  // namespace qtree
