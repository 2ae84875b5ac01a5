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

#include "oracles.h"
#include "qtree/decoder.h"
#include "qtree/errors.h"
#include "qtree/sampler.h"

using namespace qtree;

namespace {

Mat2 normalized(const Mat2 &m) {
    return m / m.trace().real();
}

}  // namespace

TEST(Decoder, MatchesBruteForceProbe) {
    // The decoded state equals the brute-force probe state (Bell pair with
    // the root) conditioned on the weak record.
    Rng pick(3);
    for (int trial = 0; trial < 60; ++trial) {
        const int t = 1 + trial % 3;
        const double theta = kThetaMin + (kThetaMax - kThetaMin) * pick.uniform() * 0.95;
        const TreeInstance inst = build_instance(t, theta, 1000 + trial);
        Rng rng(trial);
        const MeasurementRecord rec = sample_record_branch(inst, rng);
        const Mat2 probe = normalized(oracle::brute_force_probe(inst, rec.weak()));
        const DecodeResult d = decode_bloch(inst, rec.weak());
        EXPECT_LT((d.rho.m - probe).cwiseAbs().maxCoeff(), 1e-10) << "t=" << t << " theta=" << theta;
        EXPECT_NEAR(d.z, oracle::lambda_min_direct(probe), 1e-10);
    }
}

TEST(Decoder, OutputIsDensityMatrix) {
    Rng rng(4);
    for (int i = 0; i < 100; ++i) {
        const TreeInstance inst = build_instance(4, 1.6 + 0.015 * i, 50 + i);
        const MeasurementRecord rec = sample_record_branch(inst, rng);
        const DecodeResult d = decode_bloch(inst, rec.weak());
        EXPECT_TRUE(is_density_matrix(d.rho.m, 1e-12));
        EXPECT_NEAR(d.n.norm(), 1.0 - 2.0 * d.z, 1e-12);
        EXPECT_GE(d.z, -1e-15);
        EXPECT_LE(d.z, 0.5 + 1e-15);
    }
}

TEST(Decoder, WeakLimitGivesMaximallyMixed) {
    const TreeInstance inst = build_instance(3, kThetaMin, 2);
    Rng rng(1);
    for (int i = 0; i < 20; ++i) {
        const MeasurementRecord rec = sample_record_branch(inst, rng);
        const DecodeResult d = decode_bloch(inst, rec.weak());
        EXPECT_LT(d.n.norm(), 1e-12);
        EXPECT_NEAR(d.z, 0.5, 1e-12);
    }
}

TEST(Decoder, ProjectiveLimitIdentityGates) {
    // With identity gates at theta = pi the record of all (1 - b) decodes to |b><b|.
    TreeInstance inst = build_instance(2, kThetaMax, 1);
    for (auto &g : inst.gates) {
        for (auto &u : g.u) u.m = Mat2::Identity();
    }
    for (int b = 0; b < 2; ++b) {
        const std::vector<uint8_t> weak(6, static_cast<uint8_t>(1 - b));
        const DecodeResult d = decode_bloch(inst, weak);
        EXPECT_NEAR(d.rho.m(b, b).real(), 1.0, 1e-12);
        EXPECT_EQ(predict_sign(d.n), b == 0 ? 1 : -1);
    }
}

TEST(Decoder, ZeroProbabilityRecordRejected) {
    TreeInstance inst = build_instance(1, kThetaMax, 1);
    for (auto &u : inst.gates[0].u) u.m = Mat2::Identity();
    // Inconsistent flags: the two outputs of a CNOT on |b>|0> agree.
    const std::vector<uint8_t> weak = {0, 1};
    EXPECT_THROW(decode_bloch(inst, weak), InconsistentRecordError);
}

TEST(Decoder, LengthMismatch) {
    const TreeInstance inst = build_instance(2, 2.0, 1);
    const std::vector<uint8_t> weak(5, 0);
    EXPECT_THROW(decode_bloch(inst, weak), DomainError);
}

TEST(Decoder, AbsorbingProjectiveOutcomesLeavesStateInvariant) {
    Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        const int t = 1 + trial % 4;
        const TreeInstance inst = build_instance(t, 1.7 + 0.014 * trial, 300 + trial);
        const MeasurementRecord rec = sample_record_branch(inst, rng);
        std::vector<uint8_t> proj(inst.gates.size());
        for (auto &b : proj) b = static_cast<uint8_t>(rng() & 1);
        EXPECT_TRUE(invariance_check(inst, proj, rec.weak(), 1e-12));
    }
}

TEST(Decoder, IsDeterministic) {
    const TreeInstance inst = build_instance(4, 2.2, 5);
    Rng rng(2);
    const MeasurementRecord rec = sample_record_branch(inst, rng);
    DecodeStats stats;
    const DecodeResult a = decode_bloch(inst, rec.weak(), &stats);
    const DecodeResult b = decode_bloch(inst, rec.weak());
    EXPECT_EQ(a.rho.m, b.rho.m);
    EXPECT_EQ(stats.node_ops, 15u);
}

TEST(Decoder, PredictSignConvention) {
    EXPECT_EQ(predict_sign(BlochVector{0, 0, 0.0}), 1);
    EXPECT_EQ(predict_sign(BlochVector{0, 0, -1e-300}), -1);
    EXPECT_EQ(predict_sign(BlochVector{0, 0, 0.4}), 1);
}
