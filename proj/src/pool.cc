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

#include "qtree/pool.h"

#include <bit>
#include <cmath>
#include <istream>
#include <ostream>

#include "qtree/errors.h"
#include "qtree/parallel.h"
#include "qtree/qmath.h"
#include "qtree/serialize.h"

namespace qtree {

namespace {

Vec2 perp(const Vec2 &a) {
    return Vec2(-std::conj(a(1)), std::conj(a(0)));
}

// Haar on SU(2) from a Haar unit vector.
Mat2 su2(const Vec2 &u) {
    Mat2 m;
    m << u(0), -std::conj(u(1)), u(1), std::conj(u(0));
    return m;
}

size_t uniform_index(Rng &rng, size_t n) {
    return static_cast<size_t>((static_cast<unsigned __int128>(rng()) * n) >> 64);
}

// A qubit state as a two-term mixture of (unnormalized) vectors.
struct Mixture {
    std::array<Vec2, 2> v;
    std::array<double, 2> w;
};

void weak_measure(Mixture &mix, const KrausPair &k, Rng &rng) {
    double p[2];
    for (int m = 0; m < 2; ++m) {
        const auto &d = k.diag(m);
        p[m] = 0.0;
        for (int i = 0; i < 2; ++i) {
            p[m] += mix.w[i] * (d(0) * d(0) * std::norm(mix.v[i](0)) + d(1) * d(1) * std::norm(mix.v[i](1)));
        }
    }
    const int m = rng.uniform() * (p[0] + p[1]) < p[0] ? 0 : 1;
    const auto &d = k.diag(m);
    for (auto &v : mix.v) {
        v(0) *= d(0);
        v(1) *= d(1);
    }
}

double node_sample(double z_left, double z_right, const KrausPair &k, Rng &rng) {
    const Vec2 a = haar_state(rng);
    const Vec2 b = haar_state(rng);
    Mixture left{{a, perp(a)}, {1.0 - z_left, z_left}};
    Mixture right{{b, perp(b)}, {1.0 - z_right, z_right}};
    weak_measure(left, k, rng);
    weak_measure(right, k, rng);
    const Mat2 u_left = su2(haar_state(rng));
    const Mat2 u_right = su2(haar_state(rng));
    for (auto &v : left.v) {
        v = u_left * v;
    }
    for (auto &v : right.v) {
        v = u_right * v;
    }
    // The gate on the measured output and the measurement basis combine
    // into a Haar-random measurement basis {c, perp(c)}. The gate on the
    // surviving output leaves its spectrum unchanged and is dropped.
    const Vec2 c = haar_state(rng);
    const std::array<Vec2, 2> rows = {Vec2(c(0), -std::conj(c(1))), Vec2(c(1), std::conj(c(0)))};

    std::array<std::array<Vec2, 4>, 2> phi;
    std::array<double, 4> w;
    double p[2] = {0.0, 0.0};
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const int ij = 2 * i + j;
            w[ij] = left.w[i] * right.w[j];
            const Vec2 &x = left.v[i];
            const Vec2 &y = right.v[j];
            for (int m = 0; m < 2; ++m) {
                const Vec2 &r = rows[m];
                // CNOT flips the second qubit when the first is |1>.
                const Complex y0 = r(0) * y(0) + r(1) * y(1);
                const Complex y1 = r(0) * y(1) + r(1) * y(0);
                phi[m][ij] = Vec2(x(0) * y0, x(1) * y1);
                p[m] += w[ij] * phi[m][ij].squaredNorm();
            }
        }
    }
    const int m = rng.uniform() * (p[0] + p[1]) < p[0] ? 0 : 1;
    return mixture_smaller_eigenvalue(phi[m], w);
}

}  // namespace

Pool pool_init(size_t size, double theta) {
    if (size == 0) {
        throw DomainError("pool size must be at least 1");
    }
    Pool pool;
    pool.theta = checked_theta(theta);
    pool.values.assign(size, 0.5);
    return pool;
}

double pool_node_sample(double z_left, double z_right, double theta, Rng &rng) {
    return node_sample(z_left, z_right, kraus_pair(theta), rng);
}

void pool_step(Pool &pool, uint64_t seed, int workers) {
    const std::vector<double> prev = pool.values;
    const size_t n = prev.size();
    const KrausPair k = kraus_pair(pool.theta);
    const uint64_t theta_bits = std::bit_cast<uint64_t>(pool.theta);
    const uint64_t next_t = static_cast<uint64_t>(pool.t + 1);
    const int w = resolve_workers(workers);
#pragma omp parallel for schedule(static, 4096) num_threads(w)
    for (size_t i = 0; i < n; ++i) {
        Rng rng = stream(seed, {tag(StreamTag::kPoolSlot), theta_bits, next_t, i});
        const double zl = prev[uniform_index(rng, n)];
        const double zr = prev[uniform_index(rng, n)];
        pool.values[i] = node_sample(zl, zr, k, rng);
    }
    pool.t += 1;
}

PoolStats pool_stats(const Pool &pool) {
    PoolStats s;
    const double n = static_cast<double>(pool.size());
    double sum = 0.0;
    double log_sum = 0.0;
    for (double z : pool.values) {
        sum += z;
        if (z > kPoolZeroFloor) {
            log_sum += std::log(z);
            ++s.n_positive;
        }
    }
    s.z_mean = sum / n;
    double ss = 0.0;
    for (double z : pool.values) {
        ss += (z - s.z_mean) * (z - s.z_mean);
    }
    if (pool.size() > 1) {
        s.se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
    s.z_typ = s.n_positive > 0 ? std::exp(log_sum / static_cast<double>(s.n_positive)) : 0.0;
    return s;
}

std::vector<CurvePoint> pool_run(const std::vector<double> &theta_grid, int t_max, size_t size, uint64_t seed,
                                 int workers) {
    if (t_max < 1) {
        throw DomainError("t_max must be at least 1");
    }
    std::vector<CurvePoint> out;
    out.reserve(theta_grid.size() * static_cast<size_t>(t_max));
    for (double theta : theta_grid) {
        Pool pool = pool_init(size, theta);
        for (int t = 1; t <= t_max; ++t) {
            pool_step(pool, seed, workers);
            const PoolStats s = pool_stats(pool);
            out.push_back(CurvePoint{pool.theta, t, s.z_mean, s.z_typ, s.se, size});
        }
    }
    return out;
}

std::vector<double> parse_theta_grid(const std::string &spec) {
    auto parse = [&](const std::string &s) {
        size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception &) {
            used = 0;
        }
        if (used != s.size() || s.empty()) {
            throw DomainError("bad theta grid '" + spec + "': expected start:stop:count");
        }
        return v;
    };
    std::vector<std::string> parts;
    size_t pos = 0;
    while (true) {
        size_t next = spec.find(':', pos);
        parts.push_back(spec.substr(pos, next == std::string::npos ? std::string::npos : next - pos));
        if (next == std::string::npos) {
            break;
        }
        pos = next + 1;
    }
    if (parts.size() == 1) {
        return {checked_theta(parse(parts[0]))};
    }
    if (parts.size() != 3) {
        throw DomainError("bad theta grid '" + spec + "': expected start:stop:count");
    }
    const double start = parse(parts[0]);
    const double stop = parse(parts[1]);
    const double count_d = parse(parts[2]);
    const long count = static_cast<long>(count_d);
    if (count < 1 || static_cast<double>(count) != count_d) {
        throw DomainError("bad theta grid '" + spec + "': count must be a positive integer");
    }
    std::vector<double> grid;
    for (long i = 0; i < count; ++i) {
        const double x = count == 1 ? start : start + (stop - start) * static_cast<double>(i) / (count - 1);
        grid.push_back(checked_theta(x));
    }
    return grid;
}

void write_curves_csv(std::ostream &out, const std::vector<CurvePoint> &points, const nlohmann::json &header) {
    write_comment_header(out, header);
    out << "theta,t,z_mean,z_typ,se,pool_size\n";
    for (const auto &p : points) {
        out << format_double(p.theta) << ',' << p.t << ',' << format_double(p.z_mean) << ','
            << format_double(p.z_typ) << ',' << format_double(p.se) << ',' << p.pool_size << '\n';
    }
}

std::vector<CurvePoint> read_curves_csv(std::istream &in) {
    std::vector<CurvePoint> out;
    std::string line;
    size_t lineno = 0;
    bool seen_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') {
            continue;
        }
        const auto cells = split_csv_line(line);
        if (!seen_header) {
            if (cells.size() < 6 || cells[0] != "theta") {
                throw ParseError("expected curves header theta,t,z_mean,z_typ,se,pool_size", lineno, "header");
            }
            seen_header = true;
            continue;
        }
        if (cells.size() != 6) {
            throw ParseError("expected 6 columns", lineno, "row");
        }
        static const char *names[] = {"theta", "t", "z_mean", "z_typ", "se", "pool_size"};
        double v[6];
        for (int c = 0; c < 6; ++c) {
            try {
                size_t used = 0;
                v[c] = std::stod(cells[c], &used);
                if (used != cells[c].size()) {
                    throw std::invalid_argument("trailing");
                }
            } catch (const std::exception &) {
                throw ParseError("not a number: '" + cells[c] + "'", lineno, names[c]);
            }
        }
        out.push_back(CurvePoint{v[0], static_cast<int>(v[1]), v[2], v[3], v[4], static_cast<size_t>(v[5])});
    }
    return out;
}

}  // namespace qtree
