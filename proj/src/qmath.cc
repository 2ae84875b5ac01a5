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

#include "qtree/qmath.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qtree/errors.h"

namespace qtree {

Mat2 KrausPair::op(int m) const {
    Mat2 out = Mat2::Zero();
    out(0, 0) = diag(m)(0);
    out(1, 1) = diag(m)(1);
    return out;
}

double BlochVector::norm() const {
    return std::sqrt(x * x + y * y + z * z);
}

double checked_theta(double theta) {
    if (!(theta >= kThetaMin - kThetaSlack && theta <= kThetaMax + kThetaSlack)) {
        std::ostringstream ss;
        ss << "measurement strength theta=" << theta << " outside [pi/2, pi]";
        throw DomainError(ss.str());
    }
    return std::clamp(theta, kThetaMin, kThetaMax);
}

namespace {

inline Complex complex_normal(Rng &rng) {
    double re = rng.normal();
    double im = rng.normal();
    return {re, im};
}

}  // namespace

Unitary2 haar_unitary(Rng &rng) {
    Vec2 a(complex_normal(rng), complex_normal(rng));
    Vec2 b(complex_normal(rng), complex_normal(rng));
    a /= a.norm();
    b -= a * a.dot(b);
    b /= b.norm();
    Unitary2 u;
    u.m.col(0) = a;
    u.m.col(1) = b;
    return u;
}

Vec2 haar_state(Rng &rng) {
    Vec2 a(complex_normal(rng), complex_normal(rng));
    return a / a.norm();
}

NodeGates haar_node_gates(Rng &rng) {
    NodeGates g;
    for (auto &u : g.u) {
        u = haar_unitary(rng);
    }
    return g;
}

KrausPair kraus_pair(double theta) {
    theta = checked_theta(theta);
    // cos(pi/2) evaluates to 6e-17; snap it so theta = pi is exactly projective.
    double c = std::cos(theta / 2);
    if (std::abs(c) < 1e-15) {
        c = 0.0;
    }
    const double s = std::sin(theta / 2);
    KrausPair k;
    k.theta = theta;
    k.k0 = Eigen::Vector2d(c, s);
    k.k1 = Eigen::Vector2d(s, c);
    return k;
}

Mat4 kron(const Mat2 &a, const Mat2 &b) {
    Mat4 out;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
        }
    }
    return out;
}

const Mat4 &cnot() {
    static const Mat4 m = [] {
        Mat4 c = Mat4::Zero();
        c(0, 0) = 1;
        c(1, 1) = 1;
        c(2, 3) = 1;
        c(3, 2) = 1;
        return c;
    }();
    return m;
}

Mat4 entangling_unitary(const NodeGates &g) {
    Mat4 inner = kron(g.u[0].m, g.u[1].m);
    inner.row(2).swap(inner.row(3));  // CNOT controlled on the first qubit
    return kron(g.u[2].m, g.u[3].m) * inner;
}

double smaller_eigenvalue(const Mat2 &h) {
    const double a = h(0, 0).real();
    const double d = h(1, 1).real();
    const double b2 = std::norm(h(0, 1));
    const double half_gap = 0.5 * (a - d);
    const double larger = 0.5 * (a + d) + std::sqrt(half_gap * half_gap + b2);
    if (larger <= 0.0) {
        return 0.0;
    }
    const double det = a * d - b2;
    return std::max(0.0, det / larger);
}

double mixture_smaller_eigenvalue(std::span<const Vec2> vecs, std::span<const double> weights) {
    Mat2 rho = Mat2::Zero();
    double det = 0.0;
    for (size_t k = 0; k < vecs.size(); ++k) {
        rho += weights[k] * outer(vecs[k]);
        for (size_t l = k + 1; l < vecs.size(); ++l) {
            const Complex wedge = vecs[k](0) * vecs[l](1) - vecs[k](1) * vecs[l](0);
            det += weights[k] * weights[l] * std::norm(wedge);
        }
    }
    const double a = rho(0, 0).real();
    const double d = rho(1, 1).real();
    const double half_gap = 0.5 * (a - d);
    const double larger = 0.5 * (a + d) + std::sqrt(half_gap * half_gap + std::norm(rho(0, 1)));
    const double trace = a + d;
    if (larger <= 0.0 || trace <= 0.0) {
        return 0.0;
    }
    return std::min(0.5, det / (larger * trace));
}

Eig2 eig2(const DensityMatrix2 &rho) {
    const Mat2 &m = rho.m;
    const double a = m(0, 0).real();
    const double d = m(1, 1).real();
    const Complex b = m(0, 1);
    const double half_gap = 0.5 * (a - d);
    const double disc = std::sqrt(half_gap * half_gap + std::norm(b));
    const double larger = 0.5 * (a + d) + disc;

    Eig2 out;
    out.z = std::clamp(smaller_eigenvalue(m), 0.0, 0.5);
    if (disc < 1e-15) {
        return out;  // degenerate: computational basis
    }
    // Two candidate eigenvectors for `larger`; use the better conditioned one.
    Vec2 v1(b, larger - a);
    Vec2 v2(larger - d, std::conj(b));
    Vec2 v = v1.squaredNorm() >= v2.squaredNorm() ? v1 : v2;
    v /= v.norm();
    out.nu.m.col(0) = v;
    out.nu.m.col(1) = Vec2(-std::conj(v(1)), std::conj(v(0)));
    return out;
}

BlochVector bloch(const DensityMatrix2 &rho) {
    const Mat2 &m = rho.m;
    return {2.0 * m(0, 1).real(), -2.0 * m(0, 1).imag(), (m(0, 0) - m(1, 1)).real()};
}

DensityMatrix2 rho_from_bloch(const BlochVector &n) {
    DensityMatrix2 rho;
    rho.m(0, 0) = 0.5 * (1.0 + n.z);
    rho.m(1, 1) = 0.5 * (1.0 - n.z);
    rho.m(0, 1) = Complex(0.5 * n.x, -0.5 * n.y);
    rho.m(1, 0) = Complex(0.5 * n.x, 0.5 * n.y);
    return rho;
}

double von_neumann_entropy(const DensityMatrix2 &rho) {
    const double z = eig2(rho).z;
    double s = 0.0;
    for (double p : {z, 1.0 - z}) {
        if (p > 0.0) {
            s -= p * std::log(p);
        }
    }
    return s;
}

bool is_density_matrix(const Mat2 &m, double tol) {
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > tol) {
        return false;
    }
    if (std::abs(m.trace() - 1.0) > tol) {
        return false;
    }
    const double a = m(0, 0).real();
    const double d = m(1, 1).real();
    const double half_gap = 0.5 * (a - d);
    const double lower = 0.5 * (a + d) - std::sqrt(half_gap * half_gap + std::norm(m(0, 1)));
    return lower >= -tol;
}

bool is_unitary(const Mat2 &m, double tol) {
    return (m.adjoint() * m - Mat2::Identity()).cwiseAbs().maxCoeff() <= tol;
}

bool is_unitary(const Mat4 &m, double tol) {
    return (m.adjoint() * m - Mat4::Identity()).cwiseAbs().maxCoeff() <= tol;
}

Mat2 trace_out_second(const Mat4 &m) {
    Mat2 out;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            out(i, j) = m(2 * i, 2 * j) + m(2 * i + 1, 2 * j + 1);
        }
    }
    return out;
}

Mat2 trace_out_first(const Mat4 &m) {
    return m.block<2, 2>(0, 0) + m.block<2, 2>(2, 2);
}

Mat2 project_second(const Mat4 &m, int outcome) {
    Mat2 out;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            out(i, j) = m(2 * i + outcome, 2 * j + outcome);
        }
    }
    return out;
}

}  // namespace qtree
