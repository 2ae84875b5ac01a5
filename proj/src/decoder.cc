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

#include "qtree/decoder.h"

#include <string>
#include <vector>

#include "qtree/errors.h"

namespace qtree {

namespace {

constexpr double kUnderflow = 1e-300;

Mat2 sandwich(const Eigen::Vector2d &d, const Mat2 &m) {
    Mat2 out = m;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            out(i, j) *= d(i) * d(j);
        }
    }
    return out;
}

}  // namespace

Mat4 collapse_unitary(const NodeGates &g) {
    return entangling_unitary(g).transpose();
}

Mat2 collapse_node(const Mat2 &left, const Mat2 &right, const Mat4 &u_collapse, const KrausPair &k, int m_r,
                   int m_s, int m_p, double *weight) {
    const Mat4 sigma = kron(sandwich(k.diag(m_r), left), sandwich(k.diag(m_s), right));
    Mat2 out = project_second(u_collapse * sigma * u_collapse.adjoint(), m_p);
    const double w = out.trace().real();
    if (weight != nullptr) {
        *weight = w;
    }
    if (w > 0.0) {
        out /= w;
    }
    return out;
}

DecodeResult decode_bloch(const TreeInstance &instance, std::span<const uint8_t> weak_bits, DecodeStats *stats) {
    return decode_bloch(instance, {}, weak_bits, stats);
}

DecodeResult decode_bloch(const TreeInstance &instance, std::span<const uint8_t> projective_bits,
                          std::span<const uint8_t> weak_bits, DecodeStats *stats) {
    const size_t n = node_count(instance.depth);
    if (weak_bits.size() != 2 * n) {
        throw DomainError("weak record length " + std::to_string(weak_bits.size()) + " does not match depth-" +
                          std::to_string(instance.depth) + " instance (expected " + std::to_string(2 * n) + ")");
    }
    if (!projective_bits.empty() && projective_bits.size() != n) {
        throw DomainError("expected one projective outcome per node");
    }
    const KrausPair k = kraus_pair(instance.theta);
    const Mat2 mixed = Mat2::Identity() * 0.5;
    std::vector<Mat2> out(n);
    // Children have larger ids, so a reverse sweep visits leaves first.
    for (size_t i = n; i-- > 0;) {
        const bool leaf = is_leaf(instance.depth, i);
        const Mat2 &left = leaf ? mixed : out[2 * i + 1];
        const Mat2 &right = leaf ? mixed : out[2 * i + 2];
        const int mp = projective_bits.empty() ? 0 : projective_bits[i];
        double w = 0.0;
        out[i] = collapse_node(left, right, collapse_unitary(instance.gates[i]), k, weak_bits[2 * i],
                               weak_bits[2 * i + 1], mp, &w);
        if (!(w >= kUnderflow)) {
            throw InconsistentRecordError("record has zero probability at node " + std::to_string(i));
        }
        if (stats != nullptr) {
            ++stats->node_ops;
        }
    }
    DecodeResult res;
    res.rho.m = 0.5 * (out[0] + out[0].adjoint());
    res.n = bloch(res.rho);
    res.z = eig2(res.rho).z;
    return res;
}

int predict_sign(const BlochVector &n) {
    return n.z < 0.0 ? -1 : 1;
}

TreeInstance absorb_projective(const TreeInstance &instance, std::span<const uint8_t> projective_bits) {
    if (projective_bits.size() != instance.gates.size()) {
        throw DomainError("expected one projective outcome per node");
    }
    Mat2 x;
    x << 0, 1, 1, 0;
    TreeInstance out = instance;
    for (size_t i = 0; i < out.gates.size(); ++i) {
        if (projective_bits[i] == 1) {
            out.gates[i].u[1].m = out.gates[i].u[1].m * x;
        }
    }
    return out;
}

bool invariance_check(const TreeInstance &instance, std::span<const uint8_t> projective_bits,
                      std::span<const uint8_t> weak_bits, double tol) {
    const DecodeResult direct = decode_bloch(instance, projective_bits, weak_bits);
    const DecodeResult absorbed = decode_bloch(absorb_projective(instance, projective_bits), weak_bits);
    return (direct.rho.m - absorbed.rho.m).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace qtree
