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

#include "qtree/circuits.h"

#include <cmath>
#include <numbers>

#include "qtree/errors.h"
#include "qtree/sampler.h"

namespace qtree {

namespace {

Mat2 hadamard() {
    Mat2 h;
    h << 1.0, 1.0, 1.0, -1.0;
    return h / std::sqrt(2.0);
}

Mat2 ry(double a) {
    Mat2 m;
    m << std::cos(a / 2), -std::sin(a / 2), std::sin(a / 2), std::cos(a / 2);
    return m;
}

Mat2 rx(double a) {
    const Complex mi(0.0, -std::sin(a / 2));
    Mat2 m;
    m << std::cos(a / 2), mi, mi, std::cos(a / 2);
    return m;
}

Mat4 zz(double phi) {
    const Complex minus = std::exp(Complex(0.0, -phi / 2));
    const Complex plus = std::exp(Complex(0.0, phi / 2));
    return Vec4(minus, plus, plus, minus).asDiagonal();
}

void add(GateCircuit &c, GateKind kind, std::vector<int> qubits, std::vector<double> params = {}, int clbit = -1) {
    c.ops.push_back(GateOp{kind, std::move(params), std::move(qubits), clbit});
}

void add_u3(GateCircuit &c, const Unitary2 &u, int q) {
    const auto a = u3_angles(u.m);
    add(c, GateKind::kU3, {q}, {a[0], a[1], a[2]});
}

}  // namespace

const char *variant_name(WeakVariant v) {
    return v == WeakVariant::kStandard ? "standard" : "native";
}

WeakVariant parse_variant(const std::string &name) {
    if (name == "standard") {
        return WeakVariant::kStandard;
    }
    if (name == "native") {
        return WeakVariant::kNative;
    }
    throw DomainError("unknown weak-measurement variant '" + name + "' (expected standard or native)");
}

const char *gate_name(GateKind kind) {
    switch (kind) {
        case GateKind::kH:
            return "h";
        case GateKind::kU3:
            return "u3";
        case GateKind::kCX:
            return "cx";
        case GateKind::kRY:
            return "ry";
        case GateKind::kRX:
            return "rx";
        case GateKind::kRZZ:
            return "rzz";
        case GateKind::kReset:
            return "reset";
        case GateKind::kMeasure:
            return "measure";
    }
    return "?";
}

GateCircuit build_gate_circuit(const TreeInstance &instance, int n_ancillas, WeakVariant variant) {
    if (n_ancillas < 1) {
        throw DomainError("at least one weak-measurement ancilla is required");
    }
    check_depth(instance.depth);
    GateCircuit c;
    c.t = instance.depth;
    c.theta = instance.theta;
    c.seed = instance.seed;
    c.variant = variant;
    c.n_ancillas = n_ancillas;
    const int tree_qubits = 1 << instance.depth;
    c.n_qubits = tree_qubits + n_ancillas;
    c.n_clbits = static_cast<int>(record_length(instance.depth));

    add(c, GateKind::kH, {0});
    add(c, GateKind::kMeasure, {0}, {}, 0);

    size_t blocks = 0;
    auto weak_block = [&](int data, int clbit) {
        const int anc = tree_qubits + static_cast<int>(blocks % static_cast<size_t>(n_ancillas));
        if (blocks >= static_cast<size_t>(n_ancillas)) {
            add(c, GateKind::kReset, {anc});
        }
        ++blocks;
        if (variant == WeakVariant::kStandard) {
            add(c, GateKind::kRY, {anc}, {instance.theta});
            add(c, GateKind::kCX, {data, anc});
        } else {
            add(c, GateKind::kH, {anc});
            add(c, GateKind::kRZZ, {data, anc}, {std::numbers::pi / 2 - instance.theta});
            add(c, GateKind::kRX, {anc}, {std::numbers::pi / 2});
        }
        add(c, GateKind::kMeasure, {anc}, {}, clbit);
    };

    for (size_t k = 0; k < instance.gates.size(); ++k) {
        const int in = input_qubit(k);
        const int fresh = static_cast<int>(k) + 1;
        const NodeGates &g = instance.gates[k];
        add_u3(c, g.u[0], in);
        add_u3(c, g.u[1], fresh);
        add(c, GateKind::kCX, {in, fresh});
        add_u3(c, g.u[2], in);
        add_u3(c, g.u[3], fresh);
        weak_block(in, static_cast<int>(r_bit(k)));
        weak_block(fresh, static_cast<int>(s_bit(k)));
    }
    return c;
}

Mat4 weak_block_unitary(double theta, WeakVariant variant) {
    theta = checked_theta(theta);
    const Mat2 id = Mat2::Identity();
    if (variant == WeakVariant::kStandard) {
        return cnot() * kron(id, ry(theta));
    }
    return kron(id, rx(std::numbers::pi / 2)) * zz(std::numbers::pi / 2 - theta) * kron(id, hadamard());
}

Mat2 weak_block_kraus(double theta, WeakVariant variant, int m) {
    const Mat4 u = weak_block_unitary(theta, variant);
    Mat2 k;
    for (int out = 0; out < 2; ++out) {
        for (int in = 0; in < 2; ++in) {
            k(out, in) = u(2 * out + m, 2 * in);
        }
    }
    return k;
}

EquivalenceReport verify_variant_equivalence(double theta, int trials, Rng &rng) {
    if (trials < 1) {
        throw DomainError("trials must be at least 1");
    }
    const Mat4 us = weak_block_unitary(theta, WeakVariant::kStandard);
    const Mat4 un = weak_block_unitary(theta, WeakVariant::kNative);
    EquivalenceReport rep;
    for (int trial = 0; trial < trials; ++trial) {
        Vec4 psi;
        for (int i = 0; i < 4; ++i) {
            psi(i) = Complex(rng.normal(), rng.normal());
        }
        psi /= psi.norm();
        // (reference, data) x ancilla |0>; the blocks act on (data, ancilla).
        Eigen::Matrix<Complex, 8, 1> out_s, out_n;
        for (int r = 0; r < 2; ++r) {
            const Vec4 in = Vec4(psi(2 * r), 0.0, psi(2 * r + 1), 0.0);
            out_s.segment<4>(4 * r) = us * in;
            out_n.segment<4>(4 * r) = un * in;
        }
        const Complex overlap = out_s.dot(out_n);
        rep.max_infidelity = std::max(rep.max_infidelity, 1.0 - std::norm(overlap));
        if (trial == 0) {
            rep.phase = overlap;
        }
        rep.max_phase_spread = std::max(rep.max_phase_spread, std::abs(overlap - rep.phase));
        rep.max_deviation = std::max(rep.max_deviation, (out_n - overlap * out_s).norm());
    }
    return rep;
}

std::array<double, 3> u3_angles(const Mat2 &u) {
    const double c = std::abs(u(0, 0));
    const double s = std::abs(u(1, 0));
    const double theta = 2.0 * std::atan2(s, c);
    constexpr double kTiny = 1e-14;
    double alpha, phi, lambda;
    if (s < kTiny) {
        alpha = std::arg(u(0, 0));
        phi = 0.0;
        lambda = std::arg(u(1, 1)) - alpha;
    } else if (c < kTiny) {
        alpha = std::arg(u(1, 0));
        phi = 0.0;
        lambda = std::arg(-u(0, 1)) - alpha;
    } else {
        alpha = std::arg(u(0, 0));
        phi = std::arg(u(1, 0)) - alpha;
        lambda = std::arg(-u(0, 1)) - alpha;
    }
    auto wrap = [](double a) { return std::remainder(a, 2.0 * std::numbers::pi); };
    return {theta, wrap(phi), wrap(lambda)};
}

Mat2 u3_matrix(double theta, double phi, double lambda) {
    const double c = std::cos(theta / 2);
    const double s = std::sin(theta / 2);
    Mat2 m;
    m << c, -std::exp(Complex(0.0, lambda)) * s, std::exp(Complex(0.0, phi)) * s,
        std::exp(Complex(0.0, phi + lambda)) * c;
    return m;
}

std::string check_schedule(const GateCircuit &circuit) {
    const int first_ancilla = circuit.n_qubits - circuit.n_ancillas;
    // Per ancilla: 0 = fresh or reset, 1 = block open, 2 = measured and dirty.
    std::vector<int> state(static_cast<size_t>(circuit.n_ancillas), 0);
    for (size_t i = 0; i < circuit.ops.size(); ++i) {
        const GateOp &op = circuit.ops[i];
        for (int q : op.qubits) {
            if (q < 0 || q >= circuit.n_qubits) {
                return "op " + std::to_string(i) + " uses qubit " + std::to_string(q) + " out of range";
            }
        }
        for (size_t j = 0; j < op.qubits.size(); ++j) {
            const int q = op.qubits[j];
            if (q < first_ancilla) {
                continue;
            }
            int &st = state[static_cast<size_t>(q - first_ancilla)];
            const std::string where = "op " + std::to_string(i) + " (" + gate_name(op.kind) + ") on ancilla q[" +
                                      std::to_string(q) + "]";
            switch (op.kind) {
                case GateKind::kReset:
                    if (st == 1) {
                        return where + ": reset inside an open weak block";
                    }
                    st = 0;
                    break;
                case GateKind::kMeasure:
                    if (st != 1) {
                        return where + ": measurement without a preceding block preparation";
                    }
                    st = 2;
                    break;
                default:
                    if (st == 2) {
                        return where + ": reused after measurement without reset";
                    }
                    st = 1;
                    break;
            }
        }
    }
    for (size_t a = 0; a < state.size(); ++a) {
        if (state[a] == 1) {
            return "ancilla q[" + std::to_string(first_ancilla + static_cast<int>(a)) + "] left in an open block";
        }
    }
    return "";
}

std::string qasm_filename(uint64_t seed, int t, double theta) {
    return std::to_string(seed) + "_" + std::to_string(t) + "_" +
           std::to_string(static_cast<long>(std::lround(theta * 1000.0))) + ".qasm";
}

}  // namespace qtree
