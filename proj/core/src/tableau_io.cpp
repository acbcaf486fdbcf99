#include "linrk/tableau_io.hpp"

#include "linrk/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

namespace linrk {

TableauParseError::TableauParseError(int line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

namespace {

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

double parse_number(const std::string& token, int line) {
    std::istringstream is(token);
    double v = 0.0;
    is >> v;
    if (is.fail() || !is.eof()) throw TableauParseError(line, "not a number: '" + token + "'");
    if (!std::isfinite(v)) throw TableauParseError(line, "non-finite value: '" + token + "'");
    return v;
}

std::vector<double> parse_row(const std::string& text, int line) {
    std::string s = text;
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream is(s);
    std::vector<double> out;
    std::string token;
    while (is >> token) out.push_back(parse_number(token, line));
    return out;
}

int parse_int(const std::string& text, int line) {
    int v = 0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) throw TableauParseError(line, "not an integer: '" + text + "'");
    return v;
}

struct Row {
    int line = 0;
    std::vector<double> values;
};

Matrix assemble(const std::vector<Row>& rows, Index s, const char* name, bool strict, int section_line) {
    Matrix m = Matrix::Zero(s, s);
    if (rows.size() != static_cast<std::size_t>(s)) {
        throw TableauParseError(rows.empty() ? section_line : rows.back().line,
                                std::string("[") + name + "] has " + std::to_string(rows.size()) +
                                    " rows, expected " + std::to_string(s));
    }
    for (Index i = 0; i < s; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i)];
        if (row.values.size() > static_cast<std::size_t>(s)) {
            throw TableauParseError(row.line, std::string("[") + name + "] row has more than " +
                                                  std::to_string(s) + " entries");
        }
        for (std::size_t jj = 0; jj < row.values.size(); ++jj) {
            const auto j = static_cast<Index>(jj);
            const double v = row.values[jj];
            if (j > i && v != 0.0) {
                std::ostringstream os;
                os << "upper-triangular entry " << name << '[' << i + 1 << "][" << j + 1
                   << "] = " << v << " is not allowed";
                throw TableauParseError(row.line, os.str());
            }
            if (strict && j == i && v != 0.0) {
                std::ostringstream os;
                os << "diagonal entry " << name << '[' << i + 1 << "][" << j + 1
                   << "] must be zero (strictly lower triangular)";
                throw TableauParseError(row.line, os.str());
            }
            m(i, j) = v;
        }
    }
    return m;
}

}  // namespace

RowTableau parse_tableau(std::istream& in) {
    std::string section;
    std::map<std::string, int> section_lines;
    std::map<std::string, std::pair<int, std::string>> method_keys;
    std::vector<Row> alpha_rows;
    std::vector<Row> gamma_rows;
    std::vector<double> b;
    std::vector<double> bhat;

    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') throw TableauParseError(line_no, "unterminated section header");
            section = lower(trim(std::string_view(line).substr(1, line.size() - 2)));
            if (section != "method" && section != "alpha" && section != "gamma" && section != "b" &&
                section != "bhat") {
                throw TableauParseError(line_no, "unknown section [" + section + "]");
            }
            if (section_lines.count(section)) {
                throw TableauParseError(line_no, "duplicate section [" + section + "]");
            }
            section_lines[section] = line_no;
            continue;
        }

        if (section.empty()) throw TableauParseError(line_no, "content before the first section");
        if (section == "method") {
            const auto eq = line.find('=');
            if (eq == std::string::npos) throw TableauParseError(line_no, "expected key = value");
            const std::string key = lower(trim(std::string_view(line).substr(0, eq)));
            const std::string value = trim(std::string_view(line).substr(eq + 1));
            if (key != "name" && key != "order" && key != "embedded_order") {
                throw TableauParseError(line_no, "unknown key '" + key + "'");
            }
            method_keys[key] = {line_no, value};
        } else if (section == "alpha") {
            alpha_rows.push_back({line_no, parse_row(line, line_no)});
        } else if (section == "gamma") {
            gamma_rows.push_back({line_no, parse_row(line, line_no)});
        } else if (section == "b") {
            auto v = parse_row(line, line_no);
            b.insert(b.end(), v.begin(), v.end());
        } else {
            auto v = parse_row(line, line_no);
            bhat.insert(bhat.end(), v.begin(), v.end());
        }
    }

    const int eof_line = std::max(line_no, 1);
    if (!method_keys.count("name")) throw TableauParseError(eof_line, "[method] name is missing");
    if (!section_lines.count("gamma")) throw TableauParseError(eof_line, "[gamma] section is missing");
    if (b.empty()) throw TableauParseError(eof_line, "[b] section is missing or empty");

    RowTableau t;
    t.name = method_keys["name"].second;
    if (t.name.empty()) throw TableauParseError(method_keys["name"].first, "empty method name");
    if (auto it = method_keys.find("order"); it != method_keys.end()) {
        t.order = parse_int(it->second.second, it->second.first);
    }

    const auto s = static_cast<Index>(b.size());
    t.b = Eigen::Map<const Vector>(b.data(), s);
    if (section_lines.count("alpha")) {
        t.alpha = assemble(alpha_rows, s, "alpha", true, section_lines["alpha"]);
    } else {
        t.alpha = Matrix::Zero(s, s);
    }
    t.gamma = assemble(gamma_rows, s, "gamma", false, section_lines["gamma"]);

    if (section_lines.count("bhat")) {
        if (bhat.size() != b.size()) {
            throw TableauParseError(section_lines["bhat"], "[bhat] length differs from [b]");
        }
        t.b_hat = Vector(Eigen::Map<const Vector>(bhat.data(), s));
        if (auto it = method_keys.find("embedded_order"); it != method_keys.end()) {
            t.embedded_order = parse_int(it->second.second, it->second.first);
        } else {
            t.embedded_order = std::max(1, t.order - 1);
        }
    } else if (auto it = method_keys.find("embedded_order"); it != method_keys.end()) {
        throw TableauParseError(it->second.first, "embedded_order given without [bhat]");
    }

    for (Index i = 0; i < s; ++i) {
        if (t.gamma(i, i) == 0.0) {
            throw TableauParseError(gamma_rows[static_cast<std::size_t>(i)].line,
                                    "gamma diagonal entry " + std::to_string(i + 1) + " is zero");
        }
    }
    return t;
}

RowTableau parse_tableau_string(const std::string& text) {
    std::istringstream is(text);
    return parse_tableau(is);
}

RowTableau read_tableau_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("cannot open tableau file '" + path.string() + "'");
    return parse_tableau(in);
}

void write_tableau(std::ostream& out, const RowTableau& t) {
    const Index s = t.stages();
    const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
    auto write_row = [&](const Matrix& m, Index i) {
        for (Index j = 0; j <= i; ++j) out << (j ? " " : "") << m(i, j);
        out << '\n';
    };
    out << "[method]\n";
    out << "name = " << t.name << '\n';
    out << "order = " << t.order << '\n';
    if (t.embedded_order) out << "embedded_order = " << *t.embedded_order << '\n';
    out << "[alpha]\n";
    for (Index i = 0; i < s; ++i) write_row(t.alpha, i);
    out << "[gamma]\n";
    for (Index i = 0; i < s; ++i) write_row(t.gamma, i);
    out << "[b]\n";
    for (Index i = 0; i < s; ++i) out << (i ? " " : "") << t.b(i);
    out << '\n';
    if (t.b_hat) {
        out << "[bhat]\n";
        for (Index i = 0; i < s; ++i) out << (i ? " " : "") << (*t.b_hat)(i);
        out << '\n';
    }
    out.precision(old_precision);
}

}  // namespace linrk
