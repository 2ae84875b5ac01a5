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

#include <map>
#include <regex>
#include <sstream>

#include "json.hpp"
#include "qtree/circuits.h"
#include "qtree/errors.h"
#include "qtree/serialize.h"

namespace qtree {

namespace {

const std::map<std::string, GateKind> &gate_table() {
    static const std::map<std::string, GateKind> table = {
        {"h", GateKind::kH},     {"u3", GateKind::kU3},       {"cx", GateKind::kCX},
        {"ry", GateKind::kRY},   {"rx", GateKind::kRX},       {"rzz", GateKind::kRZZ},
        {"reset", GateKind::kReset}, {"measure", GateKind::kMeasure},
    };
    return table;
}

size_t param_count(GateKind kind) {
    switch (kind) {
        case GateKind::kU3:
            return 3;
        case GateKind::kRY:
        case GateKind::kRX:
        case GateKind::kRZZ:
            return 1;
        default:
            return 0;
    }
}

size_t qubit_count(GateKind kind) {
    return (kind == GateKind::kCX || kind == GateKind::kRZZ) ? 2 : 1;
}

}  // namespace

std::string export_qasm(const GateCircuit &circuit) {
    std::ostringstream out;
    const nlohmann::json meta = {{"t", circuit.t},
                                 {"theta", circuit.theta},
                                 {"seed", circuit.seed},
                                 {"variant", variant_name(circuit.variant)},
                                 {"l", circuit.n_ancillas}};
    out << "OPENQASM 2.0;\n";
    out << "include \"qelib1.inc\";\n";
    out << "// qtree " << QTREE_VERSION << " " << meta.dump() << "\n";
    out << "qreg q[" << circuit.n_qubits << "];\n";
    out << "creg c[" << circuit.n_clbits << "];\n";
    for (const GateOp &op : circuit.ops) {
        if (op.kind == GateKind::kMeasure) {
            out << "measure q[" << op.qubits.at(0) << "] -> c[" << op.clbit << "];\n";
            continue;
        }
        out << gate_name(op.kind);
        if (!op.params.empty()) {
            out << '(';
            for (size_t i = 0; i < op.params.size(); ++i) {
                out << (i ? "," : "") << format_double(op.params[i]);
            }
            out << ')';
        }
        out << ' ';
        for (size_t i = 0; i < op.qubits.size(); ++i) {
            out << (i ? "," : "") << "q[" << op.qubits[i] << ']';
        }
        out << ";\n";
    }
    return out.str();
}

GateCircuit import_qasm(const std::string &text) {
    static const std::regex header_re(R"(^//\s*qtree\s+\S+\s+(\{.*\})\s*$)");
    static const std::regex reg_re(R"(^(qreg|creg)\s+([a-z]+)\[(\d+)\]$)");
    static const std::regex measure_re(R"(^measure\s+q\[(\d+)\]\s*->\s*c\[(\d+)\]$)");
    static const std::regex gate_re(R"(^([a-z0-9]+)\s*(?:\(([^)]*)\))?\s+(.+)$)");
    static const std::regex qarg_re(R"(^\s*q\[(\d+)\]\s*$)");

    GateCircuit c;
    c.n_qubits = -1;
    c.n_clbits = -1;
    std::istringstream in(text);
    std::string line;
    size_t lineno = 0;
    bool saw_version = false;
    while (std::getline(in, line)) {
        ++lineno;
        std::smatch m;
        if (std::regex_match(line, m, header_re)) {
            const auto meta = nlohmann::json::parse(m[1].str(), nullptr, false);
            if (meta.is_discarded()) {
                throw ParseError("bad metadata comment", lineno, "header");
            }
            c.t = meta.value("t", 1);
            c.theta = meta.value("theta", kThetaMin);
            c.seed = meta.value("seed", uint64_t{0});
            c.variant = parse_variant(meta.value("variant", std::string("native")));
            c.n_ancillas = meta.value("l", 1);
            continue;
        }
        const size_t comment = line.find("//");
        if (comment != std::string::npos) {
            line.erase(comment);
        }
        std::string stmt;
        std::istringstream stmts(line);
        while (std::getline(stmts, stmt, ';')) {
            const size_t b = stmt.find_first_not_of(" \t\r");
            if (b == std::string::npos) {
                continue;
            }
            stmt = stmt.substr(b, stmt.find_last_not_of(" \t\r") - b + 1);
            if (stmt == "OPENQASM 2.0") {
                saw_version = true;
                continue;
            }
            if (stmt.rfind("include", 0) == 0) {
                continue;
            }
            if (std::regex_match(stmt, m, reg_re)) {
                const int size = std::stoi(m[3].str());
                if (m[1] == "qreg") {
                    c.n_qubits = size;
                } else {
                    c.n_clbits = size;
                }
                continue;
            }
            if (std::regex_match(stmt, m, measure_re)) {
                c.ops.push_back(GateOp{GateKind::kMeasure, {}, {std::stoi(m[1].str())}, std::stoi(m[2].str())});
                continue;
            }
            if (!std::regex_match(stmt, m, gate_re)) {
                throw ParseError("unrecognized statement '" + stmt + "'", lineno, "statement");
            }
            const auto it = gate_table().find(m[1].str());
            if (it == gate_table().end()) {
                throw ParseError("unsupported gate '" + m[1].str() + "'", lineno, "gate");
            }
            GateOp op;
            op.kind = it->second;
            if (m[2].matched) {
                std::istringstream ps(m[2].str());
                std::string p;
                while (std::getline(ps, p, ',')) {
                    size_t used = 0;
                    try {
                        op.params.push_back(std::stod(p, &used));
                    } catch (const std::exception &) {
                        used = std::string::npos;
                    }
                    if (used == std::string::npos || p.find_first_not_of(" \t", used) != std::string::npos) {
                        throw ParseError("bad parameter '" + p + "'", lineno, "params");
                    }
                }
            }
            std::istringstream qs(m[3].str());
            std::string q;
            while (std::getline(qs, q, ',')) {
                std::smatch qm;
                if (!std::regex_match(q, qm, qarg_re)) {
                    throw ParseError("bad qubit argument '" + q + "'", lineno, "qubits");
                }
                op.qubits.push_back(std::stoi(qm[1].str()));
            }
            if (op.params.size() != param_count(op.kind) || op.qubits.size() != qubit_count(op.kind)) {
                throw ParseError("wrong arity for '" + m[1].str() + "'", lineno, "gate");
            }
            c.ops.push_back(std::move(op));
        }
    }
    if (!saw_version) {
        throw ParseError("missing OPENQASM 2.0 version line", 1, "version");
    }
    if (c.n_qubits < 0 || c.n_clbits < 0) {
        throw ParseError("missing qreg or creg declaration", lineno, "registers");
    }
    return c;
}

}  // namespace qtree
