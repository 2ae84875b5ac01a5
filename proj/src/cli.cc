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

#include "qtree/cli.h"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "qtree/circuits.h"
#include "qtree/decoder.h"
#include "qtree/errors.h"
#include "qtree/estimator.h"
#include "qtree/plot.h"
#include "qtree/pool.h"
#include "qtree/serialize.h"
#include "qtree/theory.h"

namespace qtree {

namespace {

using nlohmann::json;

struct Globals {
    int workers = 0;
    bool no_timestamp = false;
};

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json make_header(const Globals &g, const std::string &command, const json &config) {
    json h = {{"tool", "qtree"}, {"version", QTREE_VERSION}, {"command", command}, {"config", config}};
    if (!g.no_timestamp) {
        h["timestamp"] = utc_timestamp();
    }
    return h;
}

// Writes to `path`, or to `out` when the path is empty or "-".
void with_output(const std::string &path, std::ostream &out, const std::function<void(std::ostream &)> &body) {
    if (path.empty() || path == "-") {
        body(out);
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    body(f);
    if (!f) {
        throw std::runtime_error("write to '" + path + "' failed");
    }
}

std::ifstream open_input(const std::string &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot open '" + path + "' for reading");
    }
    return f;
}

Backend parse_backend(const std::string &s) {
    if (s == "branch") {
        return Backend::kBranch;
    }
    if (s == "statevector") {
        return Backend::kStatevector;
    }
    throw DomainError("unknown backend '" + s + "' (expected branch or statevector)");
}

}  // namespace

int dispatch(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"qtree: measurement-induced phase transition on dynamical quantum trees"};
    app.set_version_flag("--version", std::string(QTREE_VERSION));
    app.require_subcommand(1);
    Globals g;
    app.add_option("--workers", g.workers, "worker threads (default: QTREE_WORKERS or all cores)")
        ->check(CLI::NonNegativeNumber);
    app.add_flag("--no-timestamp", g.no_timestamp, "omit the timestamp from output headers");

    std::function<void()> run;

    // simulate
    struct {
        int t = 4;
        double theta = 2.0;
        size_t n_circuits = 834;
        size_t n_shots = 8;
        uint64_t seed = 0;
        std::string backend = "branch";
        std::string instances_in;
        std::string instances_out;
        std::string out;
    } sim;
    auto *c_sim = app.add_subcommand("simulate", "sample measurement records for random tree circuits");
    c_sim->add_option("--t", sim.t, "tree depth")->check(CLI::Range(1, kMaxDepth));
    c_sim->add_option("--theta", sim.theta, "measurement strength in [pi/2, pi]");
    c_sim->add_option("--n-circuits", sim.n_circuits, "number of random circuits")->check(CLI::PositiveNumber);
    c_sim->add_option("--n-shots", sim.n_shots, "shots per circuit")->check(CLI::PositiveNumber);
    c_sim->add_option("--seed", sim.seed, "batch seed");
    c_sim->add_option("--backend", sim.backend, "branch or statevector");
    c_sim->add_option("--instances", sim.instances_in, "reuse circuits from an instance file");
    c_sim->add_option("--instances-out", sim.instances_out, "write the sampled circuits here");
    c_sim->add_option("--out", sim.out, "records output (JSON lines)");
    c_sim->callback([&] {
        run = [&] {
            InstanceSet set;
            if (!sim.instances_in.empty()) {
                auto f = open_input(sim.instances_in);
                set = read_instances(f);
            } else {
                set = make_instance_set(sim.t, sim.theta, sim.seed, sim.n_circuits);
            }
            const json config = {{"t", set.t},           {"theta", set.theta},
                                 {"n_circuits", set.ids.size()}, {"n_shots", sim.n_shots},
                                 {"seed", sim.seed},     {"backend", sim.backend},
                                 {"instances", sim.instances_in}};
            const json header = make_header(g, "simulate", config);
            const auto records = simulate_records(set, sim.n_shots, sim.seed, parse_backend(sim.backend), g.workers);
            if (!sim.instances_out.empty()) {
                with_output(sim.instances_out, out, [&](std::ostream &o) { write_instances(o, set, header); });
            }
            with_output(sim.out, out, [&](std::ostream &o) { write_records(o, records, header); });
        };
    });

    // decode
    struct {
        std::string instances;
        std::string records;
        std::string out;
        int t_prime = 0;
    } dec;
    auto *c_dec = app.add_subcommand("decode", "decode records into probe Bloch vectors");
    c_dec->add_option("--instances", dec.instances, "instance file")->required();
    c_dec->add_option("--records", dec.records, "records file (JSON lines)")->required();
    c_dec->add_option("--t-prime", dec.t_prime, "decode the depth-t' prefix (default: full depth)");
    c_dec->add_option("--out", dec.out, "output (comma-delimited)");
    c_dec->callback([&] {
        run = [&] {
            auto fi = open_input(dec.instances);
            const InstanceSet set = read_instances(fi);
            auto fr = open_input(dec.records);
            const auto records = read_records(fr);
            const int tp = dec.t_prime > 0 ? dec.t_prime : set.t;
            std::map<uint64_t, size_t> index;
            for (size_t i = 0; i < set.ids.size(); ++i) index[set.ids[i]] = i;
            const json header = make_header(
                g, "decode", {{"instances", dec.instances}, {"records", dec.records}, {"t_prime", tp}});
            with_output(dec.out, out, [&](std::ostream &o) {
                write_comment_header(o, header);
                o << "circuit_id,shot,t,m0,nx,ny,nz,z,prediction\n";
                for (const auto &r : records) {
                    const auto it = index.find(r.circuit_id);
                    if (it == index.end()) {
                        throw DomainError("record references unknown circuit_id " + std::to_string(r.circuit_id));
                    }
                    check_record(set.circuits[it->second], r.record);
                    const auto [inst, rec] = truncate(set.circuits[it->second], r.record, tp);
                    const DecodeResult d = decode_bloch(inst, rec.weak());
                    o << r.circuit_id << ',' << r.shot << ',' << tp << ',' << int(rec.m0()) << ','
                      << format_double(d.n.x) << ',' << format_double(d.n.y) << ',' << format_double(d.n.z) << ','
                      << format_double(d.z) << ',' << predict_sign(d.n) << '\n';
                }
            });
        };
    });

    // estimate
    struct {
        std::string instances;
        std::string records;
        std::string out;
    } est;
    auto *c_est = app.add_subcommand("estimate", "estimate Z for every truncated depth from records");
    c_est->add_option("--instances", est.instances, "instance file")->required();
    c_est->add_option("--records", est.records, "records file (JSON lines)")->required();
    c_est->add_option("--out", est.out, "results (comma-delimited)");
    c_est->callback([&] {
        run = [&] {
            auto fi = open_input(est.instances);
            const InstanceSet set = read_instances(fi);
            auto fr = open_input(est.records);
            const auto records = read_records(fr);
            const auto results = estimate_from_records(set, records, g.workers);
            const json header =
                make_header(g, "estimate", {{"instances", est.instances}, {"records", est.records}});
            with_output(est.out, out, [&](std::ostream &o) { write_results_csv(o, results, header); });
        };
    });

    // pool
    struct {
        std::string grid = "1.5707963267948966:3.141592653589793:50";
        int t_max = 800;
        size_t size = 1000000;
        uint64_t seed = 0;
        std::string out;
    } pl;
    auto *c_pool = app.add_subcommand("pool", "pool-method curves Z_t(theta) and Ztyp_t(theta)");
    c_pool->add_option("--theta-grid", pl.grid, "start:stop:count (inclusive) or a single theta");
    c_pool->add_option("--t-max", pl.t_max, "last depth")->check(CLI::PositiveNumber);
    c_pool->add_option("--pool-size", pl.size, "pool size")->check(CLI::PositiveNumber);
    c_pool->add_option("--seed", pl.seed, "seed");
    c_pool->add_option("--out", pl.out, "curves (comma-delimited)");
    c_pool->callback([&] {
        run = [&] {
            const auto grid = parse_theta_grid(pl.grid);
            const auto points = pool_run(grid, pl.t_max, pl.size, pl.seed, g.workers);
            const json header = make_header(
                g, "pool",
                {{"theta_grid", pl.grid}, {"t_max", pl.t_max}, {"pool_size", pl.size}, {"seed", pl.seed}});
            with_output(pl.out, out, [&](std::ostream &o) { write_curves_csv(o, points, header); });
        };
    });

    // critical
    struct {
        size_t samples = 10000000;
        double tol = 1e-3;
        double lambda = 1.0;
        uint64_t seed = 0;
        double lo = kThetaMin;
        double hi = kThetaMax;
        bool stationarity = false;
        std::string out;
    } cr;
    auto *c_crit = app.add_subcommand("critical", "solve E[A1^lambda + A2^lambda] = 1 for theta_c");
    c_crit->add_option("--samples", cr.samples, "node samples per evaluation")->check(CLI::PositiveNumber);
    c_crit->add_option("--tol", cr.tol, "bisection tolerance in theta")->check(CLI::PositiveNumber);
    c_crit->add_option("--lambda", cr.lambda, "exponent lambda")->check(CLI::PositiveNumber);
    c_crit->add_option("--seed", cr.seed, "seed");
    c_crit->add_option("--lo", cr.lo, "bracket start");
    c_crit->add_option("--hi", cr.hi, "bracket end");
    c_crit->add_flag("--stationarity", cr.stationarity, "also report dv/dlambda at theta_c");
    c_crit->add_option("--out", cr.out, "result (comma-delimited)");
    c_crit->callback([&] {
        run = [&] {
            const auto res = find_critical_point(cr.lambda, cr.samples, cr.tol, cr.seed, g.workers, cr.lo, cr.hi);
            const json header = make_header(g, "critical",
                                            {{"samples", cr.samples},
                                             {"tol", cr.tol},
                                             {"lambda", cr.lambda},
                                             {"seed", cr.seed},
                                             {"lo", cr.lo},
                                             {"hi", cr.hi}});
            std::optional<StationarityResult> st;
            if (cr.stationarity) {
                st = lambda_stationarity(res.theta_c, cr.samples, cr.seed, 0.05, g.workers);
            }
            char line[160];
            std::snprintf(line, sizeof(line), "theta_c = %.5f +/- %.5f (95%%, %zu samples per evaluation)\n",
                          res.theta_c, res.ci_halfwidth, res.n_samples);
            if (!cr.out.empty()) {
                with_output(cr.out, out, [&](std::ostream &o) {
                    write_comment_header(o, header);
                    o << "theta_c,ci_halfwidth,n_samples,evaluations";
                    o << (st ? ",dv_dlambda,dv_dlambda_error\n" : "\n");
                    o << format_double(res.theta_c) << ',' << format_double(res.ci_halfwidth) << ','
                      << res.n_samples << ',' << res.evaluations;
                    if (st) {
                        o << ',' << format_double(st->dv_dlambda) << ',' << format_double(st->mc_error);
                    }
                    o << '\n';
                });
            }
            out << line;
            if (st) {
                std::snprintf(line, sizeof(line), "dv/dlambda at lambda=1: %.5f +/- %.5f\n", st->dv_dlambda,
                              st->mc_error);
                out << line;
            }
        };
    });

    // velocity
    struct {
        std::string grid = "1.8:2.8:11";
        double lambda = 1.0;
        size_t samples = 1000000;
        uint64_t seed = 0;
        std::string out;
    } vel;
    auto *c_vel = app.add_subcommand("velocity", "front velocity v(theta, lambda) scan");
    c_vel->add_option("--theta-grid", vel.grid, "start:stop:count or a single theta");
    c_vel->add_option("--lambda", vel.lambda, "exponent lambda")->check(CLI::PositiveNumber);
    c_vel->add_option("--samples", vel.samples, "node samples per theta")->check(CLI::PositiveNumber);
    c_vel->add_option("--seed", vel.seed, "seed");
    c_vel->add_option("--out", vel.out, "scan (comma-delimited)");
    c_vel->callback([&] {
        run = [&] {
            const auto grid = parse_theta_grid(vel.grid);
            const json header = make_header(
                g, "velocity",
                {{"theta_grid", vel.grid}, {"lambda", vel.lambda}, {"samples", vel.samples}, {"seed", vel.seed}});
            std::vector<VelocityEstimate> rows;
            for (double th : grid) {
                rows.push_back(velocity(th, vel.lambda, vel.samples, vel.seed, g.workers));
            }
            with_output(vel.out, out, [&](std::ostream &o) {
                write_comment_header(o, header);
                o << "theta,lambda,v,mc_error\n";
                for (const auto &r : rows) {
                    o << format_double(r.theta) << ',' << format_double(r.lambda) << ','
                      << (r.minus_infinity ? std::string("-inf") : format_double(r.v)) << ','
                      << format_double(r.mc_error) << '\n';
                }
            });
        };
    });

    // scaling
    struct {
        std::string curves;
        double theta = 2.2142;
        int t_min = 50;
        int t_max = 0;
    } sc;
    auto *c_sc = app.add_subcommand("scaling", "fit ln(-ln Ztyp_t) against ln t at one theta");
    c_sc->add_option("--curves", sc.curves, "curves file from the pool command")->required();
    c_sc->add_option("--theta", sc.theta, "theta (nearest grid value is used)");
    c_sc->add_option("--t-min", sc.t_min, "first depth in the fit")->check(CLI::PositiveNumber);
    c_sc->add_option("--t-max", sc.t_max, "last depth in the fit (default: all)");
    c_sc->callback([&] {
        run = [&] {
            auto f = open_input(sc.curves);
            const auto curves = read_curves_csv(f);
            if (curves.empty()) {
                throw DomainError("curves file has no rows");
            }
            double nearest = curves.front().theta;
            for (const auto &p : curves) {
                if (std::abs(p.theta - sc.theta) < std::abs(nearest - sc.theta)) nearest = p.theta;
            }
            std::vector<std::pair<int, double>> series;
            for (const auto &p : curves) {
                if (p.theta == nearest && p.t >= sc.t_min && (sc.t_max <= 0 || p.t <= sc.t_max)) {
                    series.emplace_back(p.t, p.z_typ);
                }
            }
            const ScalingFit fit = scaling_fit(series);
            char line[200];
            std::snprintf(line, sizeof(line), "theta = %.6g: exponent = %.4f, rms residual = %.3g over %zu points\n",
                          nearest, fit.slope, fit.residual, fit.n_points);
            out << line;
        };
    });

    // export-qasm
    struct {
        std::string instances;
        int t = 4;
        double theta = 2.0;
        size_t n_circuits = 1;
        uint64_t seed = 0;
        int l = 4;
        std::string variant = "native";
        std::string out_dir = ".";
    } ex;
    auto *c_ex = app.add_subcommand("export-qasm", "write OpenQASM 2.0 circuits, one per file");
    c_ex->add_option("--instances", ex.instances, "instance file (default: build from --t/--theta/--seed)");
    c_ex->add_option("--t", ex.t, "tree depth")->check(CLI::Range(1, 20));
    c_ex->add_option("--theta", ex.theta, "measurement strength");
    c_ex->add_option("--n-circuits", ex.n_circuits, "number of circuits")->check(CLI::PositiveNumber);
    c_ex->add_option("--seed", ex.seed, "batch seed");
    c_ex->add_option("--l", ex.l, "weak-measurement ancillas")->check(CLI::PositiveNumber);
    c_ex->add_option("--variant", ex.variant, "standard or native");
    c_ex->add_option("--out-dir", ex.out_dir, "output directory");
    c_ex->callback([&] {
        run = [&] {
            InstanceSet set;
            if (!ex.instances.empty()) {
                auto f = open_input(ex.instances);
                set = read_instances(f);
            } else {
                set = make_instance_set(ex.t, ex.theta, ex.seed, ex.n_circuits);
            }
            const WeakVariant variant = parse_variant(ex.variant);
            std::filesystem::create_directories(ex.out_dir);
            for (const auto &inst : set.circuits) {
                const GateCircuit c = build_gate_circuit(inst, ex.l, variant);
                const std::string path =
                    (std::filesystem::path(ex.out_dir) / qasm_filename(inst.seed, inst.depth, inst.theta)).string();
                with_output(path, out, [&](std::ostream &o) { o << export_qasm(c); });
                out << path << '\n';
            }
        };
    });

    // plot
    struct {
        std::string curves;
        std::string estimates;
        std::string out;
        std::vector<int> ts;
        std::string title;
    } pt;
    auto *c_plot = app.add_subcommand("plot", "SVG of pool curves and estimates with 1.96*SE bars");
    c_plot->add_option("--curves", pt.curves, "curves file from the pool command")->required();
    c_plot->add_option("--estimates", pt.estimates, "results file from the estimate command");
    c_plot->add_option("--t", pt.ts, "curve depths to draw");
    c_plot->add_option("--title", pt.title, "plot title");
    c_plot->add_option("--out", pt.out, "SVG output");
    c_plot->callback([&] {
        run = [&] {
            auto fc = open_input(pt.curves);
            const auto curves = read_curves_csv(fc);
            std::vector<EstimatorResult> estimates;
            if (!pt.estimates.empty()) {
                auto fe = open_input(pt.estimates);
                estimates = read_results_csv(fe);
            }
            PlotOptions opts;
            opts.curve_ts = pt.ts;
            opts.title = pt.title;
            const std::string svg = emit_plot(curves, estimates, opts);
            with_output(pt.out, out, [&](std::ostream &o) { o << svg; });
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp &e) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion &e) {
        out << QTREE_VERSION << '\n';
        return 0;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        if (run) {
            run();
        }
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace qtree
