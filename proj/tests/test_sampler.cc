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

#include <gtest/gtest.h>

#include <map>

#include "oracles.h"
#include "qtree/errors.h"
#include "qtree/sampler.h"

using namespace qtree;

namespace {

MeasurementRecord full_record(int m0, const std::vector<uint8_t> &weak) {
    MeasurementRecord r;
    r.bits.push_back(static_cast<uint8_t>(m0));
    r.bits.insert(r.bits.end(), weak.begin(), weak.end());
    return r;
}

}  // namespace

TEST(Sampler, InputQubitLineage) {
    EXPECT_EQ(input_qubit(0), 0);
    EXPECT_EQ(input_qubit(1), 0);  // left child continues the root line
    EXPECT_EQ(input_qubit(2), 1);  // right child takes node 0's fresh qubit
    EXPECT_EQ(input_qubit(3), 0);
    EXPECT_EQ(input_qubit(4), 2);
    EXPECT_EQ(input_qubit(5), 1);
    EXPECT_EQ(input_qubit(6), 3);
}

TEST(Sampler, RecordProbabilitiesMatchBruteForce) {
    // p(m0, M_w) = <m0| probe |m0> of the Bell-paired probe.
    for (int t = 1; t <= 2; ++t) {
        for (double theta : {1.8, 2.4, kThetaMax}) {
            const TreeInstance inst = build_instance(t, theta, 11 + t);
            double total = 0.0, total_branch = 0.0;
            for (const auto &weak : oracle::all_weak_records(t)) {
                const Mat2 probe = oracle::brute_force_probe(inst, weak);
                for (int m0 = 0; m0 < 2; ++m0) {
                    const MeasurementRecord rec = full_record(m0, weak);
                    const double p = record_probability(inst, rec);
                    const double pb = record_probability_branch(inst, rec);
                    EXPECT_NEAR(p, probe(m0, m0).real(), 1e-13);
                    EXPECT_NEAR(pb, probe(m0, m0).real(), 1e-13);
                    total += p;
                    total_branch += pb;
                }
            }
            EXPECT_NEAR(total, 1.0, 1e-12);
            EXPECT_NEAR(total_branch, 1.0, 1e-12);
        }
    }
}

TEST(Sampler, BranchMatchesStatevectorAtDepthThree) {
    const TreeInstance inst = build_instance(3, 2.2, 4);
    Rng rng(1);
    for (int i = 0; i < 200; ++i) {
        const MeasurementRecord rec = sample_record_branch(inst, rng);
        EXPECT_NEAR(record_probability(inst, rec), record_probability_branch(inst, rec), 1e-13);
        EXPECT_GT(record_probability(inst, rec), 0.0);
    }
}

TEST(Sampler, EmpiricalFrequenciesMatchBornRule) {
    const TreeInstance inst = build_instance(1, 2.0, 8);
    for (Backend backend : {Backend::kStatevector, Backend::kBranch}) {
        std::map<std::vector<uint8_t>, int> counts;
        const int n = 80000;
        for (int s = 0; s < n; ++s) {
            Rng rng = shot_stream(3, 0, static_cast<uint64_t>(s));
            counts[sample_record(inst, rng, backend).bits]++;
        }
        for (const auto &weak : oracle::all_weak_records(1)) {
            for (int m0 = 0; m0 < 2; ++m0) {
                const MeasurementRecord rec = full_record(m0, weak);
                const double p = record_probability(inst, rec);
                const double f = counts[rec.bits] / static_cast<double>(n);
                EXPECT_NEAR(f, p, 5.0 * std::sqrt(p * (1 - p) / n) + 1e-12);
            }
        }
    }
}

TEST(Sampler, ProjectiveLimitWithIdentityGates) {
    // theta = pi, identity gates: outcome m deterministically flags 1 - b for
    // a qubit in |b>, since K_0 = diag(0, 1).
    TreeInstance inst = build_instance(3, kThetaMax, 1);
    for (auto &g : inst.gates) {
        for (auto &u : g.u) u.m = Mat2::Identity();
    }
    for (uint64_t s = 0; s < 50; ++s) {
        Rng rng = shot_stream(1, 0, s);
        const MeasurementRecord rec = sample_record_branch(inst, rng);
        for (size_t k = 0; k < inst.gates.size(); ++k) {
            EXPECT_EQ(rec.bits[r_bit(k)], 1 - rec.m0());
            EXPECT_EQ(rec.bits[s_bit(k)], 1 - rec.m0());
        }
    }
}

TEST(Sampler, StatevectorCapacity) {
    const TreeInstance inst = build_instance(5, 2.0, 1);
    Rng rng(1);
    EXPECT_THROW(sample_record_statevector(inst, rng), CapacityError);
    EXPECT_NO_THROW(sample_record_branch(inst, rng));
}

TEST(Sampler, Determinism) {
    const TreeInstance inst = build_instance(4, 2.3, 9);
    for (Backend b : {Backend::kStatevector, Backend::kBranch}) {
        Rng r1 = shot_stream(5, 2, 7), r2 = shot_stream(5, 2, 7);
        EXPECT_EQ(sample_record(inst, r1, b), sample_record(inst, r2, b));
    }
}

TEST(Sampler, WeakLimitOutcomesAreFairCoins) {
    // theta = pi/2: Kraus operators are I/sqrt2, every record equally likely.
    const TreeInstance inst = build_instance(2, kThetaMin, 2);
    for (const auto &weak : oracle::all_weak_records(2)) {
        EXPECT_NEAR(record_probability(inst, full_record(0, weak)), 1.0 / 128.0, 1e-14);
    }
}
