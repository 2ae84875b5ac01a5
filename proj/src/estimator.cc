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

#include "qtree/estimator.h"

#include <cmath>
#include <istream>
#include <map>
#include <ostream>

#include "qtree/decoder.h"
#include "qtree/errors.h"
#include "qtree/parallel.h"

namespace qtree {

double x_statistic(int m0, double n_z) {
    const double parity = m0 == 0 ? 1.0 : -1.0;
    return 0.5 - parity / predict_sign(BlochVector{0.0, 0.0, n_z});
}

EstimatorResult estimate_Z(const std::vector<std::vector<double>> &xs, int t, double theta) {
    if (xs.empty()) {
        throw DomainError("estimate_Z needs at least one circuit");
    }
    EstimatorResult res;
    res.t = t;
    res.theta = theta;
    res.n_circuits = xs.size();
    std::vector<double> means;
    means.reserve(xs.size());
    size_t min_shots = SIZE_MAX;
    for (const auto &shots : xs) {
        if (shots.empty()) {
            throw DomainError("every circuit needs at least one shot");
        }
        double s = 0.0;
        for (double x : shots) {
            s += x;
        }
        means.push_back(s / static_cast<double>(shots.size()));
        min_shots = std::min(min_shots, shots.size());
    }
    res.n_shots = min_shots;
    const double n = static_cast<double>(means.size());
    double sum = 0.0;
    for (double m : means) {
        sum += m;
    }
    res.z_hat = sum / n;
    if (means.size() > 1) {
        double ss = 0.0;
        for (double m : means) {
            ss += (m - res.z_hat) * (m - res.z_hat);
        }
        res.se = std::sqrt(ss / (n * (n - 1.0)));
    }
    return res;
}

std::vector<RecordLine> simulate_records(const InstanceSet &set, size_t n_shots, uint64_t seed, Backend backend,
                                         int workers) {
    const size_t n_circuits = set.circuits.size();
    std::vector<RecordLine> out(n_circuits * n_shots);
    const int w = resolve_workers(workers);
#pragma omp parallel for schedule(dynamic) num_threads(w)
    for (size_t c = 0; c < n_circuits; ++c) {
        for (size_t s = 0; s < n_shots; ++s) {
            Rng rng = shot_stream(seed, set.ids[c], s);
            RecordLine &line = out[c * n_shots + s];
            line.circuit_id = set.ids[c];
            line.shot = s;
            line.record = sample_record(set.circuits[c], rng, backend);
        }
    }
    return out;
}

std::vector<EstimatorResult> estimate_from_records(const InstanceSet &set, std::span<const RecordLine> records,
                                                   int workers) {
    std::map<uint64_t, size_t> index;
    for (size_t c = 0; c < set.ids.size(); ++c) {
        index[set.ids[c]] = c;
    }
    // Circuits in sorted id order; shots in file order.
    std::map<uint64_t, std::vector<const RecordLine *>> by_circuit;
    for (const auto &r : records) {
        auto it = index.find(r.circuit_id);
        if (it == index.end()) {
            throw DomainError("record references unknown circuit_id " + std::to_string(r.circuit_id));
        }
        check_record(set.circuits[it->second], r.record);
        by_circuit[r.circuit_id].push_back(&r);
    }
    if (by_circuit.empty()) {
        throw DomainError("no records to estimate from");
    }
    std::vector<std::pair<size_t, std::vector<const RecordLine *>>> groups;
    for (auto &[id, lines] : by_circuit) {
        groups.emplace_back(index[id], std::move(lines));
    }

    std::vector<EstimatorResult> results;
    const int w = resolve_workers(workers);
    for (int tp = 1; tp <= set.t; ++tp) {
        std::vector<std::vector<double>> xs(groups.size());
#pragma omp parallel for schedule(dynamic) num_threads(w)
        for (size_t g = 0; g < groups.size(); ++g) {
            const TreeInstance inst = truncate(set.circuits[groups[g].first], tp);
            for (const RecordLine *line : groups[g].second) {
                const MeasurementRecord rec = truncate(line->record, tp);
                const DecodeResult d = decode_bloch(inst, rec.weak());
                xs[g].push_back(x_statistic(rec.m0(), d.n.z));
            }
        }
        results.push_back(estimate_Z(xs, tp, set.theta));
    }
    return results;
}

std::vector<EstimatorResult> run_protocol(const ProtocolConfig &config) {
    const InstanceSet set = make_instance_set(config.t, config.theta, config.seed, config.n_circuits);
    const auto records = simulate_records(set, config.n_shots, config.seed, config.backend, config.workers);
    return estimate_from_records(set, records, config.workers);
}

void write_results_csv(std::ostream &out, const std::vector<EstimatorResult> &rows, const nlohmann::json &header) {
    write_comment_header(out, header);
    out << "t,theta,z_hat,se,n_circuits,n_shots\n";
    for (const auto &r : rows) {
        out << r.t << ',' << format_double(r.theta) << ',' << format_double(r.z_hat) << ',' << format_double(r.se)
            << ',' << r.n_circuits << ',' << r.n_shots << '\n';
    }
}

std::vector<EstimatorResult> read_results_csv(std::istream &in) {
    std::vector<EstimatorResult> out;
    std::string line;
    size_t lineno = 0;
    bool seen_header = false;
    static const char *names[] = {"t", "theta", "z_hat", "se", "n_circuits", "n_shots"};
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') {
            continue;
        }
        const auto cells = split_csv_line(line);
        if (!seen_header) {
            if (cells.size() != 6 || cells[0] != "t") {
                throw ParseError("expected header t,theta,z_hat,se,n_circuits,n_shots", lineno, "header");
            }
            seen_header = true;
            continue;
        }
        if (cells.size() != 6) {
            throw ParseError("expected 6 columns", lineno, "row");
        }
        double v[6];
        for (int c = 0; c < 6; ++c) {
            size_t used = 0;
            try {
                v[c] = std::stod(cells[c], &used);
            } catch (const std::exception &) {
                used = std::string::npos;
            }
            if (used != cells[c].size()) {
                throw ParseError("not a number: '" + cells[c] + "'", lineno, names[c]);
            }
        }
        EstimatorResult r;
        r.t = static_cast<int>(v[0]);
        r.theta = v[1];
        r.z_hat = v[2];
        r.se = v[3];
        r.n_circuits = static_cast<size_t>(v[4]);
        r.n_shots = static_cast<size_t>(v[5]);
        out.push_back(r);
    }
    return out;
}

}  // namespace qtree
