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

#include "qtree/serialize.h"

#include <algorithm>
#include <charconv>
#include <sstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <string>

#include "qtree/errors.h"

namespace qtree {

using nlohmann::json;

namespace {

size_t line_of_offset(const std::string &text, size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<size_t>(std::count(text.begin(), text.begin() + static_cast<ptrdiff_t>(offset), '\n'));
}

/// SAX consumer that only tracks the key path, used to locate syntax errors.
class PathTracker : public nlohmann::json_sax<json> {
   public:
    bool null() override {
        return value();
    }
    bool boolean(bool) override {
        return value();
    }
    bool number_integer(number_integer_t) override {
        return value();
    }
    bool number_unsigned(number_unsigned_t) override {
        return value();
    }
    bool number_float(number_float_t, const string_t &) override {
        return value();
    }
    bool string(string_t &) override {
        return value();
    }
    bool binary(binary_t &) override {
        return value();
    }
    bool start_object(std::size_t) override {
        frames_.push_back({false, 0, ""});
        return true;
    }
    bool key(string_t &k) override {
        frames_.back().key = k;
        return true;
    }
    bool end_object() override {
        frames_.pop_back();
        return value();
    }
    bool start_array(std::size_t) override {
        frames_.push_back({true, 0, ""});
        return true;
    }
    bool end_array() override {
        frames_.pop_back();
        return value();
    }
    bool parse_error(std::size_t position, const std::string &, const nlohmann::detail::exception &ex) override {
        error_position = position;
        error_message = ex.what();
        error_path = path();
        return false;
    }

    std::string path() const {
        std::string out;
        for (const auto &f : frames_) {
            if (f.is_array) {
                out += "[" + std::to_string(f.index) + "]";
            } else if (!f.key.empty()) {
                out += (out.empty() ? "" : ".") + f.key;
            }
        }
        return out;
    }

    size_t error_position = 0;
    std::string error_message;
    std::string error_path;

   private:
    struct Frame {
        bool is_array;
        size_t index;
        std::string key;
    };

    bool value() {
        if (!frames_.empty() && frames_.back().is_array) {
            ++frames_.back().index;
        }
        return true;
    }

    std::vector<Frame> frames_;
};

const json &require(const json &obj, const char *key, const std::string &path, size_t line = 0) {
    if (!obj.is_object() || !obj.contains(key)) {
        throw ParseError("missing field", line, path.empty() ? key : path + "." + key);
    }
    return obj.at(key);
}

template <typename T>
T get_as(const json &v, const std::string &path, size_t line = 0) {
    try {
        return v.get<T>();
    } catch (const json::exception &) {
        throw ParseError("wrong type (" + std::string(v.type_name()) + ")", line, path);
    }
}

json unitary_to_json(const Unitary2 &u) {
    json row = json::array();
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            row.push_back(u.m(i, j).real());
            row.push_back(u.m(i, j).imag());
        }
    }
    return row;
}

Unitary2 unitary_from_json(const json &v, const std::string &path) {
    if (!v.is_array() || v.size() != 8) {
        throw ParseError("expected 8 numbers", 0, path);
    }
    Unitary2 u;
    for (int k = 0; k < 4; ++k) {
        const std::string p_re = path + "[" + std::to_string(2 * k) + "]";
        const std::string p_im = path + "[" + std::to_string(2 * k + 1) + "]";
        if (!v[2 * k].is_number() || !v[2 * k + 1].is_number()) {
            throw ParseError("expected a number", 0, v[2 * k].is_number() ? p_im : p_re);
        }
        u.m(k / 2, k % 2) = Complex(v[2 * k].get<double>(), v[2 * k + 1].get<double>());
    }
    return u;
}

}  // namespace

json parse_json_document(const std::string &text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error &) {
        PathTracker tracker;
        json::sax_parse(text, &tracker);
        throw ParseError(tracker.error_message, line_of_offset(text, tracker.error_position), tracker.error_path);
    }
}

InstanceSet make_instance_set(int t, double theta, uint64_t seed, size_t n_circuits) {
    InstanceSet set;
    set.t = t;
    set.theta = checked_theta(theta);
    set.seed = seed;
    for (size_t i = 0; i < n_circuits; ++i) {
        set.ids.push_back(i);
        set.circuits.push_back(build_instance(t, theta, circuit_seed(seed, i)));
    }
    return set;
}

void write_instances(std::ostream &out, const InstanceSet &set, const json &header) {
    json doc;
    doc["format_version"] = kFormatVersion;
    if (!header.is_null()) {
        doc["header"] = header;
    }
    doc["t"] = set.t;
    doc["theta"] = set.theta;
    doc["seed"] = set.seed;
    json circuits = json::array();
    for (size_t i = 0; i < set.circuits.size(); ++i) {
        json gates = json::array();
        for (const auto &node : set.circuits[i].gates) {
            json four = json::array();
            for (const auto &u : node.u) {
                four.push_back(unitary_to_json(u));
            }
            gates.push_back(std::move(four));
        }
        circuits.push_back({{"id", set.ids[i]}, {"gates", std::move(gates)}});
    }
    doc["circuits"] = std::move(circuits);
    out << doc.dump(1) << "\n";
}

InstanceSet read_instances(std::istream &in) {
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const json doc = parse_json_document(text);
    if (!doc.is_object()) {
        throw ParseError("instances document must be an object", 1, "");
    }
    const int version = get_as<int>(require(doc, "format_version", ""), "format_version");
    if (version != kFormatVersion) {
        throw ParseError("unsupported format_version " + std::to_string(version) + " (expected " +
                             std::to_string(kFormatVersion) + ")",
                         0, "format_version");
    }
    InstanceSet set;
    set.t = get_as<int>(require(doc, "t", ""), "t");
    try {
        check_depth(set.t);
        set.theta = checked_theta(get_as<double>(require(doc, "theta", ""), "theta"));
    } catch (const DomainError &e) {
        throw ParseError(e.what(), 0, "t/theta");
    }
    set.seed = get_as<uint64_t>(require(doc, "seed", ""), "seed");
    const json &circuits = require(doc, "circuits", "");
    if (!circuits.is_array()) {
        throw ParseError("expected an array", 0, "circuits");
    }
    const size_t n_nodes = node_count(set.t);
    for (size_t c = 0; c < circuits.size(); ++c) {
        const std::string cpath = "circuits[" + std::to_string(c) + "]";
        const uint64_t id = get_as<uint64_t>(require(circuits[c], "id", cpath), cpath + ".id");
        const json &gates = require(circuits[c], "gates", cpath);
        if (!gates.is_array() || gates.size() != n_nodes) {
            throw ParseError("expected " + std::to_string(n_nodes) + " nodes for t=" + std::to_string(set.t), 0,
                             cpath + ".gates");
        }
        TreeInstance inst;
        inst.depth = set.t;
        inst.theta = set.theta;
        inst.seed = circuit_seed(set.seed, id);
        inst.gates.resize(n_nodes);
        for (size_t k = 0; k < n_nodes; ++k) {
            const std::string npath = cpath + ".gates[" + std::to_string(k) + "]";
            if (!gates[k].is_array() || gates[k].size() != 4) {
                throw ParseError("expected 4 unitaries", 0, npath);
            }
            for (size_t j = 0; j < 4; ++j) {
                inst.gates[k].u[j] = unitary_from_json(gates[k][j], npath + "[" + std::to_string(j) + "]");
            }
        }
        set.ids.push_back(id);
        set.circuits.push_back(std::move(inst));
    }
    return set;
}

void write_records(std::ostream &out, std::span<const RecordLine> records, const json &header) {
    if (!header.is_null()) {
        out << json{{"header", header}}.dump() << "\n";
    }
    for (const auto &r : records) {
        json line;
        line["circuit_id"] = r.circuit_id;
        line["shot"] = r.shot;
        line["bits"] = r.record.bits;
        out << line.dump() << "\n";
    }
}

std::vector<RecordLine> read_records(std::istream &in) {
    std::vector<RecordLine> out;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error &e) {
            PathTracker tracker;
            json::sax_parse(line, &tracker);
            throw ParseError(e.what(), lineno, tracker.error_path);
        }
        if (obj.is_object() && obj.contains("header")) {
            continue;
        }
        RecordLine r;
        r.circuit_id = get_as<uint64_t>(require(obj, "circuit_id", "", lineno), "circuit_id", lineno);
        r.shot = get_as<uint64_t>(require(obj, "shot", "", lineno), "shot", lineno);
        const json &bits = require(obj, "bits", "", lineno);
        if (!bits.is_array()) {
            throw ParseError("expected an array", lineno, "bits");
        }
        r.record.bits.reserve(bits.size());
        for (size_t i = 0; i < bits.size(); ++i) {
            const std::string p = "bits[" + std::to_string(i) + "]";
            if (!bits[i].is_number_integer() || bits[i].get<int64_t>() < 0 || bits[i].get<int64_t>() > 1) {
                throw ParseError("record bit must be 0 or 1, got " + bits[i].dump(), lineno, p);
            }
            r.record.bits.push_back(static_cast<uint8_t>(bits[i].get<int>()));
        }
        out.push_back(std::move(r));
    }
    return out;
}

void write_comment_header(std::ostream &out, const nlohmann::json &header) {
    if (!header.is_null()) {
        out << "# " << header.dump() << "\n";
    }
}

std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

std::vector<std::string> split_csv_line(const std::string &line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) {
            cell.pop_back();
        }
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

}  // namespace qtree
