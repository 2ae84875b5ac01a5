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

#include "qtree/sampler.h"

#include <cmath>
#include <string>

#include "qtree/errors.h"

namespace qtree {

StateVector::StateVector(int n_qubits, size_t basis_index)
    : n_qubits_(n_qubits), amps_(size_t{1} << n_qubits, Complex(0.0)) {
    amps_.at(basis_index) = 1.0;
}

double StateVector::norm2() const {
    double s = 0.0;
    for (const auto &a : amps_) {
        s += std::norm(a);
    }
    return s;
}

void StateVector::renormalize() {
    const double inv = 1.0 / std::sqrt(norm2());
    for (auto &a : amps_) {
        a *= inv;
    }
}

void StateVector::add_qubit() {
    amps_.resize(amps_.size() * 2, Complex(0.0));
    ++n_qubits_;
}

void StateVector::apply(const Mat4 &gate, int first, int second) {
    const size_t bf = size_t{1} << first;
    const size_t bs = size_t{1} << second;
    for (size_t i = 0; i < amps_.size(); ++i) {
        if ((i & bf) || (i & bs)) {
            continue;
        }
        const size_t idx[4] = {i, i | bs, i | bf, i | bf | bs};
        Complex in[4];
        for (int k = 0; k < 4; ++k) {
            in[k] = amps_[idx[k]];
        }
        for (int r = 0; r < 4; ++r) {
            Complex acc = 0.0;
            for (int c = 0; c < 4; ++c) {
                acc += gate(r, c) * in[c];
            }
            amps_[idx[r]] = acc;
        }
    }
}

void StateVector::apply_diagonal(int q, double d0, double d1) {
    const size_t bq = size_t{1} << q;
    for (size_t i = 0; i < amps_.size(); ++i) {
        amps_[i] *= (i & bq) ? d1 : d0;
    }
}

double StateVector::diagonal_weight(int q, double d0, double d1) const {
    const size_t bq = size_t{1} << q;
    double s0 = 0.0;
    double s1 = 0.0;
    for (size_t i = 0; i < amps_.size(); ++i) {
        ((i & bq) ? s1 : s0) += std::norm(amps_[i]);
    }
    return d0 * d0 * s0 + d1 * d1 * s1;
}

int input_qubit(size_t node) {
    if (node == 0) {
        return 0;
    }
    const size_t p = (node - 1) / 2;
    return (node % 2 == 1) ? input_qubit(p) : static_cast<int>(p + 1);
}

Rng shot_stream(uint64_t seed, uint64_t circuit_id, uint64_t shot) {
    return stream(seed, {tag(StreamTag::kShot), circuit_id, shot});
}

namespace {

void check_statevector_depth(int depth, int max_depth) {
    if (max_depth > kStatevectorDepthHardCap) {
        throw CapacityError("statevector cap cannot exceed depth " + std::to_string(kStatevectorDepthHardCap));
    }
    if (depth > max_depth) {
        throw CapacityError("statevector backend limited to depth " + std::to_string(max_depth) + ", got t=" +
                            std::to_string(depth));
    }
}

/// Runs the expansion circuit on a statevector, filling bits[1..]. For each
/// weak measurement `choose(w0, w1)` receives the Born weights of both
/// outcomes and returns the outcome to apply. With `renormalize` false the
/// returned norm^2 is the joint probability of the chosen outcomes given m0.
template <typename Choose>
double run_statevector(const TreeInstance &inst, std::vector<uint8_t> &bits, bool renormalize, Choose &&choose) {
    const KrausPair k = kraus_pair(inst.theta);
    StateVector sv(1, bits[0]);
    const size_t n = inst.gates.size();
    for (size_t node = 0; node < n; ++node) {
        const int q_in = input_qubit(node);
        const int q_new = static_cast<int>(node + 1);
        sv.add_qubit();
        sv.apply(entangling_unitary(inst.gates[node]), q_in, q_new);
        for (auto [q, bit] : {std::pair{q_in, r_bit(node)}, std::pair{q_new, s_bit(node)}}) {
            const double w0 = sv.diagonal_weight(q, k.k0(0), k.k0(1));
            const double w1 = sv.diagonal_weight(q, k.k1(0), k.k1(1));
            const int m = choose(w0, w1, bit);
            bits[bit] = static_cast<uint8_t>(m);
            const auto &d = k.diag(m);
            sv.apply_diagonal(q, d(0), d(1));
            if (renormalize) {
                sv.renormalize();
            }
        }
    }
    return sv.norm2();
}

}  // namespace

MeasurementRecord sample_record_statevector(const TreeInstance &instance, Rng &rng, int max_depth) {
    check_statevector_depth(instance.depth, max_depth);
    MeasurementRecord rec;
    rec.bits.assign(record_length(instance.depth), 0);
    rec.bits[0] = static_cast<uint8_t>(rng.uniform() < 0.5 ? 0 : 1);
    run_statevector(instance, rec.bits, true, [&](double w0, double w1, size_t) {
        return rng.uniform() * (w0 + w1) < w0 ? 0 : 1;
    });
    return rec;
}

double record_probability(const TreeInstance &instance, const MeasurementRecord &record, int max_depth) {
    check_statevector_depth(instance.depth, max_depth);
    check_record(instance, record);
    std::vector<uint8_t> bits = record.bits;
    const double norm2 = run_statevector(instance, bits, false, [&](double, double, size_t bit) {
        return static_cast<int>(record.bits[bit]);
    });
    return 0.5 * norm2;
}

namespace {

Mat2 sandwich(const Eigen::Vector2d &d, const Mat2 &m) {
    Mat2 out = m;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            out(i, j) *= d(i) * d(j);
        }
    }
    return out;
}

/// (K_r x K_s) sigma (K_r x K_s) for diagonal Kraus operators.
Mat4 sandwich(const Eigen::Vector2d &dr, const Eigen::Vector2d &ds, const Mat4 &sigma) {
    Mat4 out = sigma;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            out(i, j) *= dr(i >> 1) * ds(i & 1) * dr(j >> 1) * ds(j & 1);
        }
    }
    return out;
}

BranchSummary node_summary(const Mat4 &u, const Eigen::Vector2d &dr, const Eigen::Vector2d &ds,
                           const BranchSummary &left, const BranchSummary &right) {
    const Mat4 inner = kron(sandwich(dr, left.effective_povm), sandwich(ds, right.effective_povm));
    Mat2 e = project_second(u.adjoint() * inner * u, 0);
    BranchSummary out;
    const double tr = e.trace().real();
    out.log_scale = left.log_scale + right.log_scale;
    if (tr > 0.0) {
        e /= tr;
        out.log_scale += std::log(tr);
    } else {
        out.log_scale = -INFINITY;
    }
    out.effective_povm = e;
    return out;
}

/// Born-samples the subtree rooted at `node` given its input state and
/// returns the realized subtree POVM element.
BranchSummary sample_subtree(const TreeInstance &inst, const KrausPair &k, size_t node, const Mat2 &rho_in,
                             Rng &rng, std::vector<uint8_t> &bits) {
    const Mat4 u = entangling_unitary(inst.gates[node]);
    Mat2 anc = Mat2::Zero();
    anc(0, 0) = 1.0;
    Mat4 sigma = u * kron(rho_in, anc) * u.adjoint();

    // First qubit (r) then second qubit (s).
    const Mat2 rho_r = trace_out_second(sigma);
    const double w0r = sandwich(k.k0, rho_r).trace().real();
    const double w1r = sandwich(k.k1, rho_r).trace().real();
    const int mr = rng.uniform() * (w0r + w1r) < w0r ? 0 : 1;
    sigma = sandwich(k.diag(mr), Eigen::Vector2d(1.0, 1.0), sigma);
    sigma /= sigma.trace().real();

    const Mat2 rho_s = trace_out_first(sigma);
    const double w0s = sandwich(k.k0, rho_s).trace().real();
    const double w1s = sandwich(k.k1, rho_s).trace().real();
    const int ms = rng.uniform() * (w0s + w1s) < w0s ? 0 : 1;
    sigma = sandwich(Eigen::Vector2d(1.0, 1.0), k.diag(ms), sigma);
    sigma /= sigma.trace().real();

    bits[r_bit(node)] = static_cast<uint8_t>(mr);
    bits[s_bit(node)] = static_cast<uint8_t>(ms);

    BranchSummary left;
    BranchSummary right;
    if (!is_leaf(inst.depth, node)) {
        Mat2 rho_l = trace_out_second(sigma);
        left = sample_subtree(inst, k, 2 * node + 1, rho_l / rho_l.trace().real(), rng, bits);
        Mat2 rho_rt = trace_out_first(kron(left.effective_povm, Mat2::Identity()) * sigma);
        right = sample_subtree(inst, k, 2 * node + 2, rho_rt / rho_rt.trace().real(), rng, bits);
    }
    return node_summary(u, k.diag(mr), k.diag(ms), left, right);
}

}  // namespace

MeasurementRecord sample_record_branch(const TreeInstance &instance, Rng &rng) {
    const KrausPair k = kraus_pair(instance.theta);
    MeasurementRecord rec;
    rec.bits.assign(record_length(instance.depth), 0);
    rec.bits[0] = static_cast<uint8_t>(rng.uniform() < 0.5 ? 0 : 1);
    Mat2 rho = Mat2::Zero();
    rho(rec.bits[0], rec.bits[0]) = 1.0;
    sample_subtree(instance, k, 0, rho, rng, rec.bits);
    return rec;
}

MeasurementRecord sample_record(const TreeInstance &instance, Rng &rng, Backend backend) {
    return backend == Backend::kStatevector ? sample_record_statevector(instance, rng)
                                            : sample_record_branch(instance, rng);
}

BranchSummary branch_summary(const TreeInstance &instance, size_t node, std::span<const uint8_t> weak_bits) {
    if (weak_bits.size() != weak_length(instance.depth)) {
        throw DomainError("weak record length " + std::to_string(weak_bits.size()) + " does not match depth " +
                          std::to_string(instance.depth));
    }
    const KrausPair k = kraus_pair(instance.theta);
    BranchSummary left;
    BranchSummary right;
    if (!is_leaf(instance.depth, node)) {
        left = branch_summary(instance, 2 * node + 1, weak_bits);
        right = branch_summary(instance, 2 * node + 2, weak_bits);
    }
    const int mr = weak_bits[r_bit(node) - 1];
    const int ms = weak_bits[s_bit(node) - 1];
    return node_summary(entangling_unitary(instance.gates[node]), k.diag(mr), k.diag(ms), left, right);
}

double record_probability_branch(const TreeInstance &instance, const MeasurementRecord &record) {
    check_record(instance, record);
    const BranchSummary root = branch_summary(instance, 0, record.weak());
    const int m0 = record.m0();
    return 0.5 * root.effective_povm(m0, m0).real() * std::exp(root.log_scale);
}

}  // namespace qtree
