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

#ifndef QTREE_CIRCUITS_H
#define QTREE_CIRCUITS_H

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "qtree/qmath.h"
#include "qtree/tree_model.h"

namespace qtree {

enum class WeakVariant { kStandard, kNative };

const char *variant_name(WeakVariant v);
WeakVariant parse_variant(const std::string &name);

enum class GateKind { kH, kU3, kCX, kRY, kRX, kRZZ, kReset, kMeasure };

const char *gate_name(GateKind kind);

struct GateOp {
    GateKind kind = GateKind::kH;
    std::vector<double> params;
    std::vector<int> qubits;
    int clbit = -1;  // measurements only

    bool operator==(const GateOp &) const = default;
};

struct GateCircuit {
    int t = 1;
    double theta = kThetaMin;
    uint64_t seed = 0;
    WeakVariant variant = WeakVariant::kNative;
    int n_ancillas = 1;
    int n_qubits = 0;  // 2^t tree qubits followed by the weak-measurement ancillas
    int n_clbits = 0;  // equals the record length; clbit i is record position i
    std::vector<GateOp> ops;
};

/// Gate-level circuit: H and measurement on the root, then every node in
/// BFS order as U1, U2, CX, U3, U4 followed by one weak-measurement block per
/// output. Weak blocks take ancillas round-robin and reset them on reuse.
GateCircuit build_gate_circuit(const TreeInstance &instance, int n_ancillas, WeakVariant variant);

/// Joint unitary on (data, ancilla) of a weak-measurement block, with the
/// ancilla preparation from |0> folded in: CX * (I x RY(theta)) for the
/// standard block and (I x RX(pi/2)) * ZZ(pi/2 - theta) * (I x H) for the
/// native one.
Mat4 weak_block_unitary(double theta, WeakVariant variant);

/// Kraus operator <m|_ancilla U |0>_ancilla induced by the block.
Mat2 weak_block_kraus(double theta, WeakVariant variant, int m);

struct EquivalenceReport {
    double max_infidelity = 0.0;
    double max_deviation = 0.0;  // max |psi_native - phase * psi_standard|
    Complex phase;               // <psi_standard | psi_native> of the first trial
    double max_phase_spread = 0.0;
};

/// Runs both blocks on random pure states of a (reference, data) pair with
/// the ancilla in |0>.
EquivalenceReport verify_variant_equivalence(double theta, int trials, Rng &rng);

/// u3(theta, phi, lambda) angles reproducing `u` up to a global phase.
std::array<double, 3> u3_angles(const Mat2 &u);
Mat2 u3_matrix(double theta, double phi, double lambda);

/// Checks that every ancilla is reset between a measurement and its next
/// use and that each block prepares before measuring. Returns an empty
/// string when the schedule is safe, else a description of the violation.
std::string check_schedule(const GateCircuit &circuit);

std::string export_qasm(const GateCircuit &circuit);
GateCircuit import_qasm(const std::string &text);

/// {seed}_{t}_{theta in milliradians}.qasm
std::string qasm_filename(uint64_t seed, int t, double theta);

}  // namespace qtree

#endif
