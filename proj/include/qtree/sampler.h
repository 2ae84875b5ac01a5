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

#ifndef QTREE_SAMPLER_H
#define QTREE_SAMPLER_H

#include <cstdint>
#include <span>
#include <vector>

#include "qtree/qmath.h"
#include "qtree/tree_model.h"

namespace qtree {

enum class Backend { kStatevector, kBranch };

/// Default statevector cap (2^16 amplitudes) and the largest override.
inline constexpr int kStatevectorDepthCap = 4;
inline constexpr int kStatevectorDepthHardCap = 5;

/// Pure state on n qubits; qubit q is bit q of the amplitude index.
class StateVector {
   public:
    /// Computational basis state |basis_index>.
    explicit StateVector(int n_qubits, size_t basis_index = 0);

    int num_qubits() const {
        return n_qubits_;
    }
    std::span<const Complex> amplitudes() const {
        return amps_;
    }
    double norm2() const;
    void renormalize();

    /// Appends a qubit in |0> as the new most significant bit.
    void add_qubit();
    /// Applies a two-qubit gate; `first` is the more significant tensor factor of `gate`.
    void apply(const Mat4 &gate, int first, int second);
    /// Applies diag(d0, d1) to qubit q.
    void apply_diagonal(int q, double d0, double d1);
    /// Sum over amplitudes of |a|^2 * d(bit q)^2: the unnormalized Born weight of diag(d0, d1).
    double diagonal_weight(int q, double d0, double d1) const;

   private:
    int n_qubits_;
    std::vector<Complex> amps_;
};

/// Subtree POVM element E = Tr_subtree[T^dag T] on the subtree root's input
/// qubit, stored as a trace-normalized matrix and a log scale factor.
struct BranchSummary {
    Mat2 effective_povm = Mat2::Identity();
    double log_scale = 0.0;
};

/// Statevector qubit that enters node `node` (the root qubit is 0; node k's
/// fresh ancilla is qubit k + 1).
int input_qubit(size_t node);

/// Born sampling on the full statevector. Needs depth <= max_depth
/// (at most kStatevectorDepthHardCap).
MeasurementRecord sample_record_statevector(const TreeInstance &instance, Rng &rng,
                                            int max_depth = kStatevectorDepthCap);

/// Born sampling by depth-first recursion over subtrees; same distribution as
/// the statevector backend with O(t) live 2x2/4x4 matrices.
MeasurementRecord sample_record_branch(const TreeInstance &instance, Rng &rng);

MeasurementRecord sample_record(const TreeInstance &instance, Rng &rng, Backend backend);

/// Exact joint probability of a full record (including the 1/2 for m0) by
/// forced Kraus updates on the statevector.
double record_probability(const TreeInstance &instance, const MeasurementRecord &record,
                          int max_depth = kStatevectorDepthCap);

/// Realized POVM element of the subtree rooted at `node` for the weak
/// outcomes in `weak_bits` (full-tree weak layout).
BranchSummary branch_summary(const TreeInstance &instance, size_t node, std::span<const uint8_t> weak_bits);

/// record_probability computed with branch summaries; any depth.
double record_probability_branch(const TreeInstance &instance, const MeasurementRecord &record);

/// Per-shot stream: a function of (batch seed, circuit id, shot) only.
Rng shot_stream(uint64_t seed, uint64_t circuit_id, uint64_t shot);

}  // namespace qtree

#endif
