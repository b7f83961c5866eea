#pragma once

#include <stdexcept>
#include <string>

namespace lynx {

/// Raised by the file parsers. Carries a 1-based line/column position.
class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& msg, int line, int col)
        : std::runtime_error("line " + std::to_string(line) + ", col " +
                             std::to_string(col) + ": " + msg),
          line_(line),
          col_(col) {}

    int line() const { return line_; }
    int column() const { return col_; }

private:
    int line_;
    int col_;
};

/// Semantically invalid data or configuration: malformed sequences,
/// undeclared predicates, empty classes, bad thresholds, ...
class data_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace lynx
