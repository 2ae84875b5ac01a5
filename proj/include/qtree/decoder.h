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

#ifndef QTREE_DECODER_H
#define QTREE_DECODER_H

#include <cstdint>
#include <span>

#include "qtree/qmath.h"
#include "qtree/tree_model.h"

namespace qtree {

struct DecodeResult {
    DensityMatrix2 rho;
    BlochVector n;
    double z = 0.5;
};

/// Instrumentation for the linear-cost claim.
struct DecodeStats {
    size_t node_ops = 0;
};

/// Collapse-direction node operator: the conjugated, time-reversed
/// entangling circuit U_ent^T = (U1^T x U2^T) CNOT (U3^T x U4^T).
Mat4 collapse_unitary(const NodeGates &g);

/// One collapse node: weak Kraus on both inputs, U_ent^T, then projection of
/// the second qubit on |m_p>. Returns the normalized first-qubit state and
/// writes the projection probability (relative to unit-trace inputs) to
/// `weight`.
Mat2 collapse_node(const Mat2 &left, const Mat2 &right, const Mat4 &u_collapse, const KrausPair &k, int m_r,
                   int m_s, int m_p, double *weight);

/// Reconstructs the probe state from the weak outcomes by running the
/// collapse process leaves-to-root with I/2 leaf inputs. Throws
/// InconsistentRecordError if some node's projection weight is below 1e-300.
DecodeResult decode_bloch(const TreeInstance &instance, std::span<const uint8_t> weak_bits,
                          DecodeStats *stats = nullptr);

/// Same, but with the collapse-side projection of node k onto |m_p[k]>
/// instead of |0>.
DecodeResult decode_bloch(const TreeInstance &instance, std::span<const uint8_t> projective_bits,
                          std::span<const uint8_t> weak_bits, DecodeStats *stats = nullptr);

/// sign(n_z) with sign(0) := +1.
int predict_sign(const BlochVector &n);

/// Instance with each node's U2 replaced by U2 X^{m_p[k]}, which turns the
/// collapse projection onto |m_p[k]> into one onto |0>.
TreeInstance absorb_projective(const TreeInstance &instance, std::span<const uint8_t> projective_bits);

/// Checks rho(U, M_p, M_w) == rho(U_{M_p}, 0, M_w) entrywise within tol.
bool invariance_check(const TreeInstance &instance, std::span<const uint8_t> projective_bits,
                      std::span<const uint8_t> weak_bits, double tol = 1e-12);

}  // namespace qtree

#endif
