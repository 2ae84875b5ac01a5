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

#ifndef QTREE_QMATH_H
#define QTREE_QMATH_H

#include <Eigen/Dense>
#include <array>
#include <span>
#include <complex>

#include "qtree/rng.h"

namespace qtree {

using Complex = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using Vec2 = Eigen::Vector2cd;
using Vec4 = Eigen::Vector4cd;

// Two-qubit matrices use the basis |q1 q2> with index 2*q1 + q2, so the
// first tensor factor is the most significant bit.

struct Unitary2 {
    Mat2 m = Mat2::Identity();
};

/// The four single-qubit gates of one tree node: U1, U2 before the CNOT
/// (on input and ancilla respectively), U3, U4 after it.
struct NodeGates {
    std::array<Unitary2, 4> u;
};

/// Weak measurement K_m = sin(theta/2) I + [cos(theta/2) - sin(theta/2)] |m><m|.
/// Both operators are real and diagonal; only the diagonals are stored.
struct KrausPair {
    double theta = 0.0;
    Eigen::Vector2d k0;
    Eigen::Vector2d k1;

    const Eigen::Vector2d &diag(int m) const {
        return m == 0 ? k0 : k1;
    }
    Mat2 op(int m) const;
};

struct DensityMatrix2 {
    Mat2 m = Mat2::Identity() * 0.5;
};

struct BlochVector {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double norm() const;
};

struct Eig2 {
    /// Smaller eigenvalue.
    double z = 0.5;
    /// Orthonormal eigenvectors, larger eigenvalue first.
    Unitary2 nu;
};

inline constexpr double kThetaMin = 1.5707963267948966;
inline constexpr double kThetaMax = 3.141592653589793;
/// Slack accepted on the theta interval; values inside it are clamped.
inline constexpr double kThetaSlack = 1e-4;

/// Validates theta against [pi/2, pi] (with kThetaSlack) and clamps it.
double checked_theta(double theta);

/// Haar-random 2x2 unitary: Gram-Schmidt on a complex Ginibre matrix with
/// positive diagonal R, which is the phase-corrected QR construction.
Unitary2 haar_unitary(Rng &rng);

/// Haar-random pure state (first column of a Haar unitary).
Vec2 haar_state(Rng &rng);

NodeGates haar_node_gates(Rng &rng);

KrausPair kraus_pair(double theta);

Mat4 kron(const Mat2 &a, const Mat2 &b);
const Mat4 &cnot();

/// (U3 x U4) . CNOT . (U1 x U2), CNOT controlled on the first qubit.
Mat4 entangling_unitary(const NodeGates &g);

/// Smaller eigenvalue of a Hermitian PSD 2x2 matrix. Accurate in relative
/// terms even when the matrix is nearly rank one.
double smaller_eigenvalue(const Mat2 &h);

/// Smaller eigenvalue of the normalized mixture sum_k w_k v_k v_k^dagger.
/// The determinant is accumulated pairwise (Cauchy-Binet), so values far
/// below machine epsilon relative to the trace stay accurate.
double mixture_smaller_eigenvalue(std::span<const Vec2> vecs, std::span<const double> weights);

Eig2 eig2(const DensityMatrix2 &rho);
BlochVector bloch(const DensityMatrix2 &rho);
DensityMatrix2 rho_from_bloch(const BlochVector &n);

/// Entropy in nats.
double von_neumann_entropy(const DensityMatrix2 &rho);

/// Hermitian, unit trace and PSD within `tol`.
bool is_density_matrix(const Mat2 &m, double tol = 1e-12);
bool is_unitary(const Mat2 &m, double tol = 1e-12);
bool is_unitary(const Mat4 &m, double tol = 1e-12);

/// Reduced state of the first qubit.
Mat2 trace_out_second(const Mat4 &m);
/// Reduced state of the second qubit.
Mat2 trace_out_first(const Mat4 &m);
/// <m|_2 M |m>_2: the unnormalized first-qubit block after finding the
/// second qubit in |m>.
Mat2 project_second(const Mat4 &m, int outcome);

/// Pure-state density matrix |v><v|.
inline Mat2 outer(const Vec2 &v) {
    return v * v.adjoint();
}

}  // namespace qtree

#endif
