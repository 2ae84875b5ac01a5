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

// Composite checks shared by the unit tests and the acceptance binary.

#ifndef QTREE_TESTS_CHECKS_H
#define QTREE_TESTS_CHECKS_H

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.h"
#include "qtree/decoder.h"
#include "qtree/estimator.h"
#include "qtree/sampler.h"

namespace qtree::check {

struct Unbiasedness {
    double expected_x = 0.0;  // orbit-averaged sum over records of p * X
    double z_decoded = 0.0;   // sum over weak records of p * Z from the decoder
    double z_exact = 0.0;     // oracle::exact_instance_z
};

/// Exact E[X] for one instance. For each weak record the root gate U1 is
/// replaced by U1 V, which rotates the conditioned probe state by V^T without
/// changing the record's probability; V is chosen so the probe's Bloch vector
/// sits at polar angle arccos(u). Averaging over u uniform in [-1, 1] is the
/// Haar average over V. Per record the summand is linear in u on each side
/// of u = 0, so two-point Gauss-Legendre on [-1, 0] and [0, 1] is exact.
inline Unbiasedness enumerated_unbiasedness(const TreeInstance &inst) {
    Unbiasedness res;
    const double g = 0.5 / std::sqrt(3.0);
    const double nodes[4] = {-0.5 - g, -0.5 + g, 0.5 - g, 0.5 + g};
    for (const auto &weak : oracle::all_weak_records(inst.depth)) {
        MeasurementRecord rec;
        rec.bits.push_back(0);
        rec.bits.insert(rec.bits.end(), weak.begin(), weak.end());
        double p_weak = 0.0;
        for (int m0 = 0; m0 < 2; ++m0) {
            rec.bits[0] = static_cast<uint8_t>(m0);
            p_weak += record_probability(inst, rec);
        }
        if (p_weak < 1e-300) {
            continue;
        }
        const DecodeResult d = decode_bloch(inst, weak);
        res.z_decoded += p_weak * d.z;
        const Eig2 e = eig2(d.rho);
        double avg = 0.0;
        for (double u : nodes) {
            const double beta = std::acos(u);
            Mat2 ry;
            ry << std::cos(beta / 2), -std::sin(beta / 2), std::sin(beta / 2), std::cos(beta / 2);
            const Mat2 w = ry * e.nu.m.adjoint();
            TreeInstance rotated = inst;
            rotated.gates[0].u[0].m = inst.gates[0].u[0].m * w.transpose();
            const DecodeResult dr = decode_bloch(rotated, weak);
            for (int m0 = 0; m0 < 2; ++m0) {
                rec.bits[0] = static_cast<uint8_t>(m0);
                avg += 0.25 * record_probability(rotated, rec) * x_statistic(m0, dr.n.z);
            }
        }
        res.expected_x += avg;
    }
    res.z_exact = oracle::exact_instance_z(inst);
    return res;
}

struct MeanWithError {
    double mean = 0.0;
    double se = 0.0;
};

/// Exact Z_t(theta) per Haar instance, averaged over `n` instances.
inline MeanWithError exact_haar_z(int t, double theta, int n, uint64_t seed) {
    double s = 0.0, ss = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = oracle::exact_instance_z(build_instance(t, theta, circuit_seed(seed, i)));
        s += z;
        ss += z * z;
    }
    MeanWithError r;
    r.mean = s / n;
    r.se = std::sqrt(std::max(0.0, (ss / n - r.mean * r.mean) * n / (n - 1.0)) / n);
    return r;
}

}  // namespace qtree::check

#endif
