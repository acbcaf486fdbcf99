#pragma once

#include "linrk/tableau.hpp"

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

namespace linrk {

/// Parse failure with the 1-based line it refers to.
class TableauParseError : public std::runtime_error {
public:
    TableauParseError(int line, const std::string& message);

    [[nodiscard]] int line() const noexcept { return line_; }

private:
    int line_;
};

/// Plain-text tableau format:
///
///   # comment
///   [method]
///   name = ROS2D
///   order = 2
///   embedded_order = 1
///   [alpha]
///   0
///   1 0
///   [gamma]
///   0.2928932188134524
///   -0.5857864376269049 0.2928932188134524
///   [b]
///   0.5 0.5
///   [bhat]
///   1 0
///
/// [alpha] and [gamma] rows are row-major and lower triangular; row i may
/// list up to i entries (1-based). Nonzero entries right of the diagonal,
/// and a nonzero alpha diagonal, are rejected with a line-numbered error.
[[nodiscard]] RowTableau parse_tableau(std::istream& in);
[[nodiscard]] RowTableau parse_tableau_string(const std::string& text);
[[nodiscard]] RowTableau read_tableau_file(const std::filesystem::path& path);

/// Writes t in the format above with round-trip precision.
void write_tableau(std::ostream& out, const RowTableau& t);

}  // namespace linrk
