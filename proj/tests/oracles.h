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

// Test-only reference implementations. They share no code paths with the
// library beyond the instance data types and the Kraus/entangler formulas.

#ifndef QTREE_TESTS_ORACLES_H
#define QTREE_TESTS_ORACLES_H

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <regex>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "qtree/circuits.h"
#include "qtree/qmath.h"
#include "qtree/tree_model.h"

namespace qtree::oracle {

using C = std::complex<double>;

inline Mat2 kraus_direct(double theta, int m) {
    // K_m = sin(theta/2) I + (cos(theta/2) - sin(theta/2)) |m><m|
    Mat2 k = Mat2::Identity() * std::sin(theta / 2);
    k(m, m) += std::cos(theta / 2) - std::sin(theta / 2);
    return k;
}

inline Mat4 entangler_direct(const NodeGates &g) {
    Mat4 cx = Mat4::Zero();
    cx(0, 0) = cx(1, 1) = cx(2, 3) = cx(3, 2) = 1.0;
    Mat4 a, b;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            a(i, j) = g.u[0].m(i / 2, j / 2) * g.u[1].m(i % 2, j % 2);
            b(i, j) = g.u[2].m(i / 2, j / 2) * g.u[3].m(i % 2, j % 2);
        }
    }
    return b * cx * a;
}

/// Plain statevector over n qubits; qubit q is bit q of the index.
struct Sv {
    int n;
    std::vector<C> a;
    explicit Sv(int n_) : n(n_), a(size_t{1} << n_, 0.0) {
        a[0] = 1.0;
    }
    void gate1(const Mat2 &u, int q) {
        const size_t bit = size_t{1} << q;
        for (size_t i = 0; i < a.size(); ++i) {
            if (i & bit) continue;
            const C x0 = a[i], x1 = a[i | bit];
            a[i] = u(0, 0) * x0 + u(0, 1) * x1;
            a[i | bit] = u(1, 0) * x0 + u(1, 1) * x1;
        }
    }
    // `first` is the more significant factor of u.
    void gate2(const Mat4 &u, int first, int second) {
        const size_t b1 = size_t{1} << first, b2 = size_t{1} << second;
        for (size_t i = 0; i < a.size(); ++i) {
            if ((i & b1) || (i & b2)) continue;
            const size_t idx[4] = {i, i | b2, i | b1, i | b1 | b2};
            C x[4], y[4];
            for (int k = 0; k < 4; ++k) x[k] = a[idx[k]];
            for (int r = 0; r < 4; ++r) {
                y[r] = 0.0;
                for (int k = 0; k < 4; ++k) y[r] += u(r, k) * x[k];
            }
            for (int k = 0; k < 4; ++k) a[idx[k]] = y[k];
        }
    }
    // Projects qubit q onto |m> without renormalizing.
    void project(int q, int m) {
        const size_t bit = size_t{1} << q;
        for (size_t i = 0; i < a.size(); ++i) {
            if (((i & bit) != 0) != (m == 1)) a[i] = 0.0;
        }
    }
    // Moves a definite |1> on qubit q back to |0>.
    void reset_known(int q) {
        const size_t bit = size_t{1} << q;
        for (size_t i = 0; i < a.size(); ++i) {
            if (i & bit) {
                a[i & ~bit] += a[i];
                a[i] = 0.0;
            }
        }
    }
    double norm2() const {
        double s = 0.0;
        for (auto &x : a) s += std::norm(x);
        return s;
    }
};

/// Unnormalized probe state after the expansion process with forced weak
/// outcomes. Qubit 0 is the probe, Bell-paired with the root (qubit 1); node
/// k adds qubit k + 2. The trace is the probability of the weak record.
inline Mat2 brute_force_probe(const TreeInstance &inst, std::span<const uint8_t> weak) {
    const size_t n_nodes = inst.gates.size();
    const int nq = static_cast<int>(n_nodes) + 2;
    Sv s(nq);
    s.a[0] = 1.0 / std::sqrt(2.0);
    s.a[3] = 1.0 / std::sqrt(2.0);
    std::vector<int> first_out(n_nodes), second_out(n_nodes);
    for (size_t k = 0; k < n_nodes; ++k) {
        int in = 1;
        if (k > 0) {
            const size_t p = (k - 1) / 2;
            in = (k == 2 * p + 1) ? first_out[p] : second_out[p];
        }
        const int fresh = static_cast<int>(k) + 2;
        first_out[k] = in;
        second_out[k] = fresh;
        s.gate2(entangler_direct(inst.gates[k]), in, fresh);
        s.gate1(kraus_direct(inst.theta, weak[2 * k]), in);
        s.gate1(kraus_direct(inst.theta, weak[2 * k + 1]), fresh);
    }
    Mat2 rho = Mat2::Zero();
    for (size_t i = 0; i < s.a.size(); i += 2) {
        rho(0, 0) += std::norm(s.a[i]);
        rho(1, 1) += std::norm(s.a[i + 1]);
        rho(0, 1) += s.a[i] * std::conj(s.a[i + 1]);
    }
    rho(1, 0) = std::conj(rho(0, 1));
    return rho;
}

/// All 2^(2(2^t-1)) weak records of depth t, as bit vectors.
inline std::vector<std::vector<uint8_t>> all_weak_records(int t) {
    const size_t len = 2 * ((size_t{1} << t) - 1);
    std::vector<std::vector<uint8_t>> out;
    for (size_t r = 0; r < (size_t{1} << len); ++r) {
        std::vector<uint8_t> bits(len);
        for (size_t i = 0; i < len; ++i) bits[i] = (r >> i) & 1;
        out.push_back(bits);
    }
    return out;
}

/// Root effects of every weak record, built bottom-up from subtree effects:
/// E = <0| U^dag (K E_L K x K E_R K) U |0>. The probe state for a record is
/// proportional to E^T, so Z = lambda_min(E) / Tr E with weight Tr E / 2.
inline std::vector<Mat2> root_effects(const TreeInstance &inst) {
    const int t = inst.depth;
    std::function<std::vector<Mat2>(size_t, int)> effects = [&](size_t node, int level) {
        std::vector<Mat2> left{Mat2::Identity()}, right{Mat2::Identity()};
        if (level < t) {
            left = effects(2 * node + 1, level + 1);
            right = effects(2 * node + 2, level + 1);
        }
        const Mat4 u = entangler_direct(inst.gates[node]);
        std::vector<Mat2> out;
        for (int mr = 0; mr < 2; ++mr) {
            const Mat2 kr = kraus_direct(inst.theta, mr);
            for (int ms = 0; ms < 2; ++ms) {
                const Mat2 ks = kraus_direct(inst.theta, ms);
                for (const Mat2 &el : left) {
                    for (const Mat2 &er : right) {
                        Mat4 mid;
                        const Mat2 a = kr * el * kr, b = ks * er * ks;
                        for (int i = 0; i < 4; ++i)
                            for (int j = 0; j < 4; ++j) mid(i, j) = a(i / 2, j / 2) * b(i % 2, j % 2);
                        const Mat4 full = u.adjoint() * mid * u;
                        Mat2 e;
                        for (int i = 0; i < 2; ++i)
                            for (int j = 0; j < 2; ++j) e(i, j) = full(2 * i, 2 * j);
                        out.push_back(e);
                    }
                }
            }
        }
        return out;
    };
    return effects(0, 1);
}

inline double lambda_min_direct(const Mat2 &e) {
    const double a = e(0, 0).real(), d = e(1, 1).real();
    const double tr = a + d;
    const double disc = std::sqrt((a - d) * (a - d) + 4.0 * std::norm(e(0, 1)));
    return 0.5 * (tr - disc);
}

/// Exact Z_t(theta) of one instance: sum over records of p * Z.
inline double exact_instance_z(const TreeInstance &inst) {
    double z = 0.0;
    for (const Mat2 &e : root_effects(inst)) {
        z += 0.5 * std::max(0.0, lambda_min_direct(e));
    }
    return z;
}

/// Checks text against the OpenQASM 2.0 subset used by exported circuits:
/// version line, qelib include, one qreg and one creg, then statements whose
/// register indices are in range. Returns an empty string when valid.
inline std::string qasm_grammar_errors(const std::string &text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool version = false;
    long nq = -1, nc = -1;
    const std::string real = R"([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)";
    const std::regex id_re(R"(^[a-z][A-Za-z0-9_]*$)");
    const std::regex qarg(R"(^q\[(\d+)\]$)");
    const std::regex gate_re("^([a-z][a-z0-9_]*)(?:\\((" + real + "(?:," + real + ")*)\\))? (q\\[\\d+\\](?:,q\\[\\d+\\])*)$");
    const std::regex measure_re(R"(^measure q\[(\d+)\] -> c\[(\d+)\]$)");
    const std::regex reg_re(R"(^(qreg|creg) ([a-z]+)\[(\d+)\]$)");
    const std::set<std::string> known = {"u3", "cx", "h", "rx", "ry", "rzz", "reset"};
    const std::map<std::string, std::pair<int, int>> arity = {{"u3", {3, 1}}, {"cx", {0, 2}}, {"h", {0, 1}},
                                                               {"rx", {1, 1}}, {"ry", {1, 1}}, {"rzz", {1, 2}},
                                                               {"reset", {0, 1}}};
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = "line " + std::to_string(lineno) + ": ";
        if (line.rfind("//", 0) == 0 || line.empty()) continue;
        if (line.back() != ';') return where + "missing semicolon";
        const std::string stmt = line.substr(0, line.size() - 1);
        std::smatch m;
        if (!version) {
            if (stmt != "OPENQASM 2.0") return where + "first statement must be OPENQASM 2.0";
            version = true;
            continue;
        }
        if (stmt == "include \"qelib1.inc\"") continue;
        if (std::regex_match(stmt, m, reg_re)) {
            if (m[1] == "qreg") {
                if (m[2] != "q" || nq >= 0) return where + "unexpected qreg";
                nq = std::stol(m[3].str());
            } else {
                if (m[2] != "c" || nc >= 0) return where + "unexpected creg";
                nc = std::stol(m[3].str());
            }
            continue;
        }
        if (nq < 0 || nc < 0) return where + "statement before register declarations";
        if (std::regex_match(stmt, m, measure_re)) {
            if (std::stol(m[1].str()) >= nq || std::stol(m[2].str()) >= nc) return where + "index out of range";
            continue;
        }
        if (!std::regex_match(stmt, m, gate_re)) return where + "malformed statement '" + stmt + "'";
        const std::string name = m[1].str();
        if (!known.count(name)) return where + "unknown gate " + name;
        const int n_params = m[2].matched ? 1 + static_cast<int>(std::count(m[2].first, m[2].second, ',')) : 0;
        const int n_args = 1 + static_cast<int>(std::count(m[3].first, m[3].second, ','));
        if (arity.at(name) != std::make_pair(n_params, n_args)) return where + "wrong arity for " + name;
        std::string args = m[3].str();
        std::regex idx_re(R"(\[(\d+)\])");
        for (auto it = std::sregex_iterator(args.begin(), args.end(), idx_re); it != std::sregex_iterator(); ++it) {
            if (std::stol((*it)[1].str()) >= nq) return where + "qubit index out of range";
        }
    }
    if (!version) return "missing version";
    return "";
}

/// Probability of a full record from simulating the gate-level circuit with
/// forced measurement outcomes (m0 included).
inline double gate_circuit_probability(const GateCircuit &c, std::span<const uint8_t> bits) {
    Sv s(c.n_qubits);
    const Mat2 h = (Mat2() << 1, 1, 1, -1).finished() / std::sqrt(2.0);
    std::vector<int> last(static_cast<size_t>(c.n_qubits), 0);
    for (const GateOp &op : c.ops) {
        switch (op.kind) {
            case GateKind::kH:
                s.gate1(h, op.qubits[0]);
                break;
            case GateKind::kU3:
                s.gate1(u3_matrix(op.params[0], op.params[1], op.params[2]), op.qubits[0]);
                break;
            case GateKind::kRY: {
                const double a = op.params[0];
                s.gate1((Mat2() << std::cos(a / 2), -std::sin(a / 2), std::sin(a / 2), std::cos(a / 2)).finished(),
                        op.qubits[0]);
                break;
            }
            case GateKind::kRX: {
                const double a = op.params[0];
                const C mi(0, -std::sin(a / 2));
                s.gate1((Mat2() << std::cos(a / 2), mi, mi, std::cos(a / 2)).finished(), op.qubits[0]);
                break;
            }
            case GateKind::kCX: {
                Mat4 cx = Mat4::Zero();
                cx(0, 0) = cx(1, 1) = cx(2, 3) = cx(3, 2) = 1.0;
                s.gate2(cx, op.qubits[0], op.qubits[1]);
                break;
            }
            case GateKind::kRZZ: {
                const double p = op.params[0];
                Mat4 zz = Mat4::Zero();
                zz(0, 0) = zz(3, 3) = std::exp(C(0, -p / 2));
                zz(1, 1) = zz(2, 2) = std::exp(C(0, p / 2));
                s.gate2(zz, op.qubits[0], op.qubits[1]);
                break;
            }
            case GateKind::kReset:
                s.reset_known(op.qubits[0]);
                break;
            case GateKind::kMeasure:
                s.project(op.qubits[0], bits[static_cast<size_t>(op.clbit)]);
                break;
        }
    }
    return s.norm2();
}

}  // namespace qtree::oracle

#endif
