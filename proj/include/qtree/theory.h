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

#ifndef QTREE_THEORY_H
#define QTREE_THEORY_H

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "qtree/qmath.h"

namespace qtree {

/// A collapse node frozen at the pure-input baseline: gates, input states
/// and the Born-sampled weak (m_r, m_s) and projective (m_p) outcomes.
struct FrozenNode {
    NodeGates gates;
    Vec2 left;
    Vec2 right;
    int m_r = 0;
    int m_s = 0;
    int m_p = 0;
    Mat4 collapse = Mat4::Identity();  // collapse_unitary(gates)
};

FrozenNode sample_frozen_node(double theta, Rng &rng);

/// Smaller eigenvalue of the node output when the inputs carry smaller
/// eigenvalues z_left, z_right in the frozen eigenbases.
double frozen_node_output(const FrozenNode &node, const KrausPair &k, double z_left, double z_right);

struct LinearCoefficients {
    double a1 = 0.0;
    double a2 = 0.0;
    std::array<int, 3> outcomes{};  // m_r, m_s, m_p
    NodeGates gates;
};

inline constexpr double kDefaultEpsilon = 1e-6;

/// One-sided finite differences Z_out(eps, 0)/eps and Z_out(0, eps)/eps.
LinearCoefficients node_linear_coefficients(double theta, Rng &rng, double epsilon = kDefaultEpsilon);
LinearCoefficients linear_coefficients(const FrozenNode &node, double theta, double epsilon = kDefaultEpsilon);

/// Exact first-order coefficients from the output vectors:
/// (|v0|^2 |v1|^2 - |<v0, v1>|^2) / |v0|^4.
std::pair<double, double> analytic_linear_coefficients(const FrozenNode &node, double theta);

enum class CoefficientMethod { kFiniteDifference, kAnalytic };

struct MeanEstimate {
    double mean = 0.0;
    double mc_error = 0.0;
    size_t n_samples = 0;
};

/// Monte Carlo E[A1^lambda + A2^lambda]. Sample i uses the stream
/// (seed, kNodeSample, i) regardless of theta, so scans over theta share
/// random numbers.
MeanEstimate mean_A_power(double theta, double lambda, size_t n_samples, uint64_t seed, int workers = 0,
                          CoefficientMethod method = CoefficientMethod::kFiniteDifference);

struct VelocityEstimate {
    double theta = 0.0;
    double lambda = 1.0;
    double v = 0.0;
    double mc_error = 0.0;
    bool minus_infinity = false;  // set when the mean vanishes
};

/// v = ln(E[A1^lambda + A2^lambda]) / lambda with a delta-method error.
VelocityEstimate velocity(double theta, double lambda, size_t n_samples, uint64_t seed, int workers = 0,
                          CoefficientMethod method = CoefficientMethod::kFiniteDifference);

/// min over the lambda grid of v(theta, lambda), all lambdas from one set
/// of samples. The minimizing lambda is returned in the result.
VelocityEstimate front_velocity(double theta, const std::vector<double> &lambdas, size_t n_samples, uint64_t seed,
                                int workers = 0);

struct CriticalPointResult {
    double theta_c = 0.0;
    double ci_halfwidth = 0.0;  // 95% statistical half-width
    size_t n_samples = 0;
    int evaluations = 0;
};

/// Bisection for E[A1^lambda + A2^lambda] = 1 on [lo, hi] with common random
/// numbers. Throws DomainError if the bracket has no sign change.
CriticalPointResult find_critical_point(double lambda, size_t n_samples, double tol, uint64_t seed, int workers = 0,
                                        double lo = kThetaMin, double hi = kThetaMax);

struct StationarityResult {
    double dv_dlambda = 0.0;  // central difference
    double mc_error = 0.0;
    double analytic = 0.0;  // E[A1 ln A1 + A2 ln A2] / E[A1 + A2] - ln E[A1 + A2]
    double analytic_error = 0.0;
};

/// dv/dlambda at lambda = 1 by central difference with step h.
StationarityResult lambda_stationarity(double theta, size_t n_samples, uint64_t seed, double h = 0.05,
                                       int workers = 0);

struct ScalingFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // RMS residual
    size_t n_points = 0;
};

/// Least squares of ln(-ln Ztyp) against ln t. Needs at least 10 points
/// with 0 < Ztyp < 1.
ScalingFit scaling_fit(const std::vector<std::pair<int, double>> &series);

/// Least squares of y against x; the fit used for linear fronts.
ScalingFit linear_fit(const std::vector<double> &x, const std::vector<double> &y);

}  // namespace qtree

#endif
