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

#include <sstream>

#include "checks.h"
#include "qtree/errors.h"
#include "qtree/estimator.h"

using namespace qtree;

TEST(Estimator, XStatistic) {
    EXPECT_DOUBLE_EQ(x_statistic(0, 0.4), -0.5);
    EXPECT_DOUBLE_EQ(x_statistic(1, 0.4), 1.5);
    EXPECT_DOUBLE_EQ(x_statistic(0, 0.0), -0.5);
    EXPECT_DOUBLE_EQ(x_statistic(1, -0.2), -0.5);
    EXPECT_DOUBLE_EQ(x_statistic(0, -0.2), 1.5);
}

TEST(Estimator, SingleCircuit) {
    const EstimatorResult r = estimate_Z({{-0.5, 1.5}});
    EXPECT_DOUBLE_EQ(r.z_hat, 0.5);
    EXPECT_DOUBLE_EQ(r.se, 0.0);
    EXPECT_EQ(r.n_circuits, 1u);
    EXPECT_EQ(r.n_shots, 2u);
}

TEST(Estimator, TwoCircuits) {
    const EstimatorResult r = estimate_Z({{0.0}, {1.0}});
    EXPECT_DOUBLE_EQ(r.z_hat, 0.5);
    EXPECT_NEAR(r.se, 0.5, 1e-15);
}

TEST(Estimator, EmptyInputRejected) {
    EXPECT_THROW(estimate_Z({}), DomainError);
    EXPECT_THROW(estimate_Z({{}}), DomainError);
}

TEST(Estimator, WeakLimitPipeline) {
    // theta = pi/2: the decoder returns n = 0 and m0 is a fair coin, so Z = 1/2.
    ProtocolConfig cfg;
    cfg.t = 2;
    cfg.theta = kThetaMin;
    cfg.n_circuits = 500;
    cfg.n_shots = 8;
    cfg.seed = 21;
    const auto res = run_protocol(cfg);
    ASSERT_EQ(res.size(), 2u);
    for (const auto &r : res) {
        EXPECT_LE(std::abs(r.z_hat - 0.5), 1.96 * r.se) << r.t;
        EXPECT_GT(r.se, 0.0);
    }
}

TEST(Estimator, ProjectiveLimitIdentityGatesEveryShotAgrees) {
    // With identity gates at theta = pi every prediction matches m0, X = -1/2.
    InstanceSet set = make_instance_set(4, kThetaMax, 3, 50);
    for (auto &c : set.circuits) {
        for (auto &g : c.gates) {
            for (auto &u : g.u) u.m = Mat2::Identity();
        }
    }
    const auto recs = simulate_records(set, 8, 3, Backend::kBranch);
    for (const auto &r : recs) {
        const DecodeResult d = decode_bloch(set.circuits[r.circuit_id], r.record.weak());
        ASSERT_DOUBLE_EQ(x_statistic(r.record.m0(), d.n.z), -0.5);
        ASSERT_NEAR(d.z, 0.0, 1e-12);
    }
}

TEST(Estimator, ProjectiveLimitHaarGatesAveragesToZero) {
    ProtocolConfig cfg;
    cfg.t = 4;
    cfg.theta = kThetaMax;
    cfg.n_circuits = 50;
    cfg.n_shots = 8;
    cfg.seed = 4;
    const auto res = run_protocol(cfg);
    EXPECT_LE(std::abs(res[3].z_hat), 3.0 * res[3].se);
}

TEST(Estimator, EnumeratedUnbiasedness) {
    for (double theta : {1.8, 2.2, 2.8}) {
        for (int i = 0; i < 3; ++i) {
            const TreeInstance inst = build_instance(2, theta, 700 + i);
            const check::Unbiasedness u = check::enumerated_unbiasedness(inst);
            EXPECT_NEAR(u.expected_x, u.z_exact, 1e-9) << theta;
            EXPECT_NEAR(u.z_decoded, u.z_exact, 1e-12) << theta;
        }
    }
}

TEST(Estimator, TruncationConsistency) {
    const InstanceSet full = make_instance_set(4, 2.3, 8, 40);
    const auto recs = simulate_records(full, 4, 8, Backend::kBranch);
    const auto from_full = estimate_from_records(full, recs);
    for (int tp = 1; tp <= 3; ++tp) {
        const InstanceSet direct = make_instance_set(tp, 2.3, 8, 40);
        std::vector<RecordLine> cut = recs;
        for (auto &r : cut) r.record = truncate(r.record, tp);
        const auto from_direct = estimate_from_records(direct, cut);
        EXPECT_EQ(from_direct.back().z_hat, from_full[tp - 1].z_hat);
        EXPECT_EQ(from_direct.back().se, from_full[tp - 1].se);
    }
}

TEST(Estimator, StandardErrorShrinksAsRootN) {
    double se_small = 0.0, se_large = 0.0;
    const int reps = 12;
    for (int s = 0; s < reps; ++s) {
        ProtocolConfig cfg;
        cfg.t = 1;
        cfg.theta = 2.0;
        cfg.n_shots = 4;
        cfg.seed = 100 + s;
        cfg.n_circuits = 300;
        se_small += run_protocol(cfg)[0].se;
        cfg.seed = 500 + s;
        cfg.n_circuits = 600;
        se_large += run_protocol(cfg)[0].se;
    }
    EXPECT_NEAR(se_small / se_large, std::sqrt(2.0), 0.1 * std::sqrt(2.0));
}

TEST(Estimator, WorkerCountInvariance) {
    ProtocolConfig cfg;
    cfg.t = 3;
    cfg.theta = 2.1;
    cfg.n_circuits = 60;
    cfg.n_shots = 4;
    cfg.seed = 6;
    cfg.workers = 1;
    const auto a = run_protocol(cfg);
    cfg.workers = 4;
    const auto b = run_protocol(cfg);
    for (size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].z_hat, b[i].z_hat);
        EXPECT_EQ(a[i].se, b[i].se);
    }
}

TEST(Estimator, BackendsAgreeStatistically) {
    // Both backends draw from the same shot stream but consume it differently,
    // so compare statistics rather than records.
    ProtocolConfig cfg;
    cfg.t = 3;
    cfg.theta = 2.0;
    cfg.n_circuits = 400;
    cfg.n_shots = 8;
    cfg.seed = 2;
    cfg.backend = Backend::kStatevector;
    const auto a = run_protocol(cfg);
    cfg.backend = Backend::kBranch;
    const auto b = run_protocol(cfg);
    for (size_t i = 0; i < a.size(); ++i) {
        EXPECT_LE(std::abs(a[i].z_hat - b[i].z_hat), 3.0 * std::hypot(a[i].se, b[i].se));
    }
}

TEST(Estimator, ResultsCsvRoundTrip) {
    std::vector<EstimatorResult> rows = {{0.25, 0.01, 834, 8, 1, 2.0}, {-0.1, 0.02, 834, 8, 2, 2.2}};
    std::stringstream ss;
    write_results_csv(ss, rows, nlohmann::json{{"k", 1}});
    const auto back = read_results_csv(ss);
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[1].z_hat, -0.1);
    EXPECT_EQ(back[1].t, 2);
    EXPECT_EQ(back[0].n_circuits, 834u);
}
