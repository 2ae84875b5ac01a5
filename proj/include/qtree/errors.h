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

#ifndef QTREE_ERRORS_H
#define QTREE_ERRORS_H

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qtree {

/// An argument lies outside the domain an operation accepts.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// A statevector computation would exceed the configured qubit cap.
struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A measurement record has (numerically) zero probability under its instance.
struct InconsistentRecordError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed input file. `line` is 1-based, 0 when unknown.
struct ParseError : std::runtime_error {
    ParseError(const std::string &what, size_t line, std::string field)
        : std::runtime_error(format(what, line, field)), line(line), field(std::move(field)) {
    }
    size_t line;
    std::string field;

   private:
    static std::string format(const std::string &what, size_t line, const std::string &field) {
        std::string out = "parse error";
        if (line != 0) {
            out += " at line " + std::to_string(line);
        }
        if (!field.empty()) {
            out += " in field '" + field + "'";
        }
        return out + ": " + what;
    }
};

}  // namespace qtree

#endif
