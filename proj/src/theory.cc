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

#include "qtree/theory.h"

#include <cmath>
#include <functional>

#include "qtree/decoder.h"
#include "qtree/errors.h"
#include "qtree/parallel.h"

namespace qtree {

namespace {

constexpr size_t kChunk = 8192;

Vec2 perp(const Vec2 &a) {
    return Vec2(-std::conj(a(1)), std::conj(a(0)));
}

// Two-qubit state after Kraus and the collapse unitary.
Vec4 node_state(const Mat4 &u_collapse, const KrausPair &k, const Vec2 &x, const Vec2 &y, int m_r, int m_s) {
    const auto &dr = k.diag(m_r);
    const auto &ds = k.diag(m_s);
    Vec4 in;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            in(2 * i + j) = dr(i) * x(i) * ds(j) * y(j);
        }
    }
    return u_collapse * in;
}

// Surviving-qubit vector after projecting the second qubit onto |m_p>.
Vec2 node_vector(const Mat4 &u_collapse, const KrausPair &k, const Vec2 &x, const Vec2 &y, int m_r, int m_s,
                 int m_p) {
    const Vec4 out = node_state(u_collapse, k, x, y, m_r, m_s);
    return Vec2(out(m_p), out(2 + m_p));
}

double power_or_zero(double a, double lambda) {
    return a > 0.0 ? std::pow(a, lambda) : 0.0;
}

std::pair<double, double> coefficients(double theta, uint64_t seed, size_t i, CoefficientMethod method) {
    Rng rng = stream(seed, {tag(StreamTag::kNodeSample), i});
    const FrozenNode node = sample_frozen_node(theta, rng);
    if (method == CoefficientMethod::kAnalytic) {
        return analytic_linear_coefficients(node, theta);
    }
    const LinearCoefficients c = linear_coefficients(node, theta);
    return {c.a1, c.a2};
}

// Accumulates n_acc sums over samples in fixed chunks; chunk partials are
// combined in index order so the result is independent of the worker count.
std::vector<double> accumulate(double theta, size_t n, uint64_t seed, int workers, CoefficientMethod method,
                               int n_acc, const std::function<void(double, double, double *)> &add) {
    const size_t n_chunks = (n + kChunk - 1) / kChunk;
    std::vector<double> partial(n_chunks * n_acc, 0.0);
    const int w = resolve_workers(workers);
#pragma omp parallel for schedule(dynamic) num_threads(w)
    for (size_t c = 0; c < n_chunks; ++c) {
        double *acc = &partial[c * n_acc];
        const size_t end = std::min(n, (c + 1) * kChunk);
        for (size_t i = c * kChunk; i < end; ++i) {
            const auto [a1, a2] = coefficients(theta, seed, i, method);
            add(a1, a2, acc);
        }
    }
    std::vector<double> total(n_acc, 0.0);
    for (size_t c = 0; c < n_chunks; ++c) {
        for (int j = 0; j < n_acc; ++j) {
            total[j] += partial[c * n_acc + j];
        }
    }
    return total;
}

MeanEstimate moments_to_estimate(double sum, double sumsq, size_t n) {
    MeanEstimate e;
    e.n_samples = n;
    const double dn = static_cast<double>(n);
    e.mean = sum / dn;
    if (n > 1) {
        const double var = std::max(0.0, (sumsq - dn * e.mean * e.mean) / (dn - 1.0));
        e.mc_error = std::sqrt(var / dn);
    }
    return e;
}

}  // namespace

FrozenNode sample_frozen_node(double theta, Rng &rng) {
    const KrausPair k = kraus_pair(theta);
    FrozenNode node;
    node.gates = haar_node_gates(rng);
    node.left = haar_state(rng);
    node.right = haar_state(rng);
    node.collapse = collapse_unitary(node.gates);
    std::array<double, 8> p{};
    double total = 0.0;
    for (int o = 0; o < 8; o += 2) {
        const Vec4 out = node_state(node.collapse, k, node.left, node.right, o >> 2, (o >> 1) & 1);
        p[o] = std::norm(out(0)) + std::norm(out(2));
        p[o + 1] = std::norm(out(1)) + std::norm(out(3));
        total += p[o] + p[o + 1];
    }
    double u = rng.uniform() * total;
    int chosen = 7;
    for (int o = 0; o < 8; ++o) {
        if (p[o] > 0.0 && u < p[o]) {
            chosen = o;
            break;
        }
        u -= p[o];
    }
    while (p[chosen] <= 0.0) {
        --chosen;
    }
    node.m_r = chosen >> 2;
    node.m_s = (chosen >> 1) & 1;
    node.m_p = chosen & 1;
    return node;
}

double frozen_node_output(const FrozenNode &node, const KrausPair &k, double z_left, double z_right) {
    const Mat4 &uc = node.collapse;
    const std::array<Vec2, 2> xs = {node.left, perp(node.left)};
    const std::array<Vec2, 2> ys = {node.right, perp(node.right)};
    const std::array<double, 2> wx = {1.0 - z_left, z_left};
    const std::array<double, 2> wy = {1.0 - z_right, z_right};
    std::array<Vec2, 4> vecs;
    std::array<double, 4> w;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            vecs[2 * i + j] = node_vector(uc, k, xs[i], ys[j], node.m_r, node.m_s, node.m_p);
            w[2 * i + j] = wx[i] * wy[j];
        }
    }
    return mixture_smaller_eigenvalue(vecs, w);
}

LinearCoefficients linear_coefficients(const FrozenNode &node, double theta, double epsilon) {
    if (!(epsilon > 0.0 && epsilon <= 1e-3)) {
        throw DomainError("epsilon must lie in (0, 1e-3]");
    }
    const KrausPair k = kraus_pair(theta);
    LinearCoefficients c;
    c.a1 = frozen_node_output(node, k, epsilon, 0.0) / epsilon;
    c.a2 = frozen_node_output(node, k, 0.0, epsilon) / epsilon;
    c.outcomes = {node.m_r, node.m_s, node.m_p};
    c.gates = node.gates;
    return c;
}

LinearCoefficients node_linear_coefficients(double theta, Rng &rng, double epsilon) {
    return linear_coefficients(sample_frozen_node(theta, rng), theta, epsilon);
}

std::pair<double, double> analytic_linear_coefficients(const FrozenNode &node, double theta) {
    const KrausPair k = kraus_pair(theta);
    const Mat4 &uc = node.collapse;
    const Vec2 v0 = node_vector(uc, k, node.left, node.right, node.m_r, node.m_s, node.m_p);
    const Vec2 v1 = node_vector(uc, k, perp(node.left), node.right, node.m_r, node.m_s, node.m_p);
    const Vec2 v2 = node_vector(uc, k, node.left, perp(node.right), node.m_r, node.m_s, node.m_p);
    const double n0 = v0.squaredNorm();
    auto coefficient = [&](const Vec2 &v) {
        // |v0 wedge v|^2 equals |v0|^2 |v|^2 - |<v0, v>|^2 without the cancellation.
        const double wedge = std::norm(v0(0) * v(1) - v0(1) * v(0));
        return wedge / (n0 * n0);
    };
    return {coefficient(v1), coefficient(v2)};
}

MeanEstimate mean_A_power(double theta, double lambda, size_t n_samples, uint64_t seed, int workers,
                          CoefficientMethod method) {
    theta = checked_theta(theta);
    if (n_samples < 1) {
        throw DomainError("n_samples must be at least 1");
    }
    const auto sums = accumulate(theta, n_samples, seed, workers, method, 2, [lambda](double a1, double a2, double *acc) {
        const double s = power_or_zero(a1, lambda) + power_or_zero(a2, lambda);
        acc[0] += s;
        acc[1] += s * s;
    });
    return moments_to_estimate(sums[0], sums[1], n_samples);
}

VelocityEstimate velocity(double theta, double lambda, size_t n_samples, uint64_t seed, int workers,
                          CoefficientMethod method) {
    if (!(lambda > 0.0)) {
        throw DomainError("lambda must be positive");
    }
    const MeanEstimate m = mean_A_power(theta, lambda, n_samples, seed, workers, method);
    VelocityEstimate v;
    v.theta = checked_theta(theta);
    v.lambda = lambda;
    if (m.mean <= 0.0) {
        v.minus_infinity = true;
        v.v = -std::numeric_limits<double>::infinity();
        return v;
    }
    v.v = std::log(m.mean) / lambda;
    v.mc_error = m.mc_error / (m.mean * lambda);
    return v;
}

VelocityEstimate front_velocity(double theta, const std::vector<double> &lambdas, size_t n_samples, uint64_t seed,
                                int workers) {
    if (lambdas.empty()) {
        throw DomainError("lambda grid is empty");
    }
    const int n_l = static_cast<int>(lambdas.size());
    const auto sums = accumulate(checked_theta(theta), n_samples, seed, workers, CoefficientMethod::kAnalytic,
                                 2 * n_l, [&lambdas, n_l](double a1, double a2, double *acc) {
                                     for (int j = 0; j < n_l; ++j) {
                                         const double s = power_or_zero(a1, lambdas[j]) + power_or_zero(a2, lambdas[j]);
                                         acc[2 * j] += s;
                                         acc[2 * j + 1] += s * s;
                                     }
                                 });
    VelocityEstimate best;
    best.theta = theta;
    best.v = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n_l; ++j) {
        const MeanEstimate m = moments_to_estimate(sums[2 * j], sums[2 * j + 1], n_samples);
        if (m.mean <= 0.0) {
            best.v = -std::numeric_limits<double>::infinity();
            best.minus_infinity = true;
            best.lambda = lambdas[j];
            return best;
        }
        const double v = std::log(m.mean) / lambdas[j];
        if (v < best.v) {
            best.v = v;
            best.lambda = lambdas[j];
            best.mc_error = m.mc_error / (m.mean * lambdas[j]);
        }
    }
    return best;
}

CriticalPointResult find_critical_point(double lambda, size_t n_samples, double tol, uint64_t seed, int workers,
                                        double lo, double hi) {
    if (!(tol > 0.0)) {
        throw DomainError("tol must be positive");
    }
    lo = checked_theta(lo);
    hi = checked_theta(hi);
    CriticalPointResult res;
    res.n_samples = n_samples;
    auto f = [&](double theta) {
        ++res.evaluations;
        return mean_A_power(theta, lambda, n_samples, seed, workers);
    };
    MeanEstimate f_lo = f(lo);
    MeanEstimate f_hi = f(hi);
    if (!(f_lo.mean > 1.0 && f_hi.mean < 1.0)) {
        throw DomainError("no sign change of E[A1^lambda + A2^lambda] - 1 on [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "]: values " + std::to_string(f_lo.mean) + ", " +
                          std::to_string(f_hi.mean));
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const MeanEstimate f_mid = f(mid);
        if (f_mid.mean > 1.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
    res.theta_c = 0.5 * (lo + hi);
    // The bracket values share random numbers, so their secant is a smooth
    // slope estimate.
    const double slope = (f_hi.mean - f_lo.mean) / (hi - lo);
    const double se = 0.5 * (f_lo.mc_error + f_hi.mc_error);
    res.ci_halfwidth = slope < 0.0 ? 1.96 * se / -slope : std::numeric_limits<double>::infinity();
    return res;
}

StationarityResult lambda_stationarity(double theta, size_t n_samples, uint64_t seed, double h, int workers) {
    if (!(h > 0.0 && h < 1.0)) {
        throw DomainError("h must lie in (0, 1)");
    }
    const double lp = 1.0 + h;
    const double lm = 1.0 - h;
    // sums of s+, s-, s+^2, s-^2, s+ s-, s1, s1 ln, s1^2, (s1 ln)^2, s1 * s1 ln
    const auto acc = accumulate(checked_theta(theta), n_samples, seed, workers, CoefficientMethod::kFiniteDifference,
                                10, [lp, lm](double a1, double a2, double *s) {
                                    const double sp = power_or_zero(a1, lp) + power_or_zero(a2, lp);
                                    const double sm = power_or_zero(a1, lm) + power_or_zero(a2, lm);
                                    const double s1 = std::max(a1, 0.0) + std::max(a2, 0.0);
                                    const double sl = (a1 > 0.0 ? a1 * std::log(a1) : 0.0) +
                                                      (a2 > 0.0 ? a2 * std::log(a2) : 0.0);
                                    s[0] += sp;
                                    s[1] += sm;
                                    s[2] += sp * sp;
                                    s[3] += sm * sm;
                                    s[4] += sp * sm;
                                    s[5] += s1;
                                    s[6] += sl;
                                    s[7] += s1 * s1;
                                    s[8] += sl * sl;
                                    s[9] += s1 * sl;
                                });
    const double n = static_cast<double>(n_samples);
    StationarityResult r;
    auto cov = [n](double sxy, double mx, double my) { return (sxy / n - mx * my) * n / (n - 1.0); };

    const double mp = acc[0] / n;
    const double mm = acc[1] / n;
    r.dv_dlambda = (std::log(mp) / lp - std::log(mm) / lm) / (2.0 * h);
    // Delta method with gradient (1/(2h)) * (1/(lp mp), -1/(lm mm)).
    const double gp = 1.0 / (2.0 * h * lp * mp);
    const double gm = -1.0 / (2.0 * h * lm * mm);
    const double var_d = gp * gp * cov(acc[2], mp, mp) + gm * gm * cov(acc[3], mm, mm) +
                         2.0 * gp * gm * cov(acc[4], mp, mm);
    r.mc_error = std::sqrt(std::max(0.0, var_d) / n);

    const double m1 = acc[5] / n;
    const double ml = acc[6] / n;
    r.analytic = ml / m1 - std::log(m1);
    // Gradient of ml/m1 - ln m1 with respect to (m1, ml).
    const double g1 = -ml / (m1 * m1) - 1.0 / m1;
    const double gl = 1.0 / m1;
    const double var_a = g1 * g1 * cov(acc[7], m1, m1) + gl * gl * cov(acc[8], ml, ml) +
                         2.0 * g1 * gl * cov(acc[9], m1, ml);
    r.analytic_error = std::sqrt(std::max(0.0, var_a) / n);
    return r;
}

ScalingFit linear_fit(const std::vector<double> &x, const std::vector<double> &y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw DomainError("linear fit needs at least two paired points");
    }
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n;
    const double my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx <= 0.0) {
        throw DomainError("linear fit needs distinct abscissae");
    }
    ScalingFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double rss = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - fit.intercept - fit.slope * x[i];
        rss += r * r;
    }
    fit.residual = std::sqrt(rss / n);
    fit.n_points = x.size();
    return fit;
}

ScalingFit scaling_fit(const std::vector<std::pair<int, double>> &series) {
    if (series.size() < 10) {
        throw DomainError("scaling fit needs at least 10 points");
    }
    std::vector<double> x, y;
    for (const auto &[t, z] : series) {
        if (!(z > 0.0 && z < 1.0) || t < 1) {
            throw DomainError("scaling fit needs 0 < Ztyp < 1 and t >= 1; got Ztyp=" + std::to_string(z) +
                              " at t=" + std::to_string(t));
        }
        x.push_back(std::log(static_cast<double>(t)));
        y.push_back(std::log(-std::log(z)));
    }
    return linear_fit(x, y);
}

}  // namespace qtree
