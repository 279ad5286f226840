#include "gridplan/mps.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <unordered_map>

#include "gridplan/error.hpp"
#include "gridplan/scenario.hpp"

namespace gridplan {

namespace {

constexpr char kDigits[] = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ";

std::string base36(long value, int digits) {
    std::string out(static_cast<std::size_t>(digits), '0');
    for (int k = digits - 1; k >= 0 && value > 0; --k) {
        out[static_cast<std::size_t>(k)] = kDigits[value % 36];
        value /= 36;
    }
    return out;
}

std::optional<long> parse_code(const std::string& code, char prefix, int width) {
    if (static_cast<int>(code.size()) != width || code[0] != prefix) return std::nullopt;
    long v = 0;
    for (std::size_t k = 1; k < code.size(); ++k) {
        const char c = code[k];
        int d;
        if (c >= '0' && c <= '9') d = c - '0';
        else if (c >= 'A' && c <= 'Z') d = c - 'A' + 10;
        else return std::nullopt;
        v = v * 36 + d;
    }
    return v;
}

std::string pad(const std::string& s, std::size_t width) { return s.size() >= width ? s : s + std::string(width - s.size(), ' '); }

std::vector<std::string> tokens(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string t;
    while (in >> t) out.push_back(t);
    return out;
}

double number(const std::string& text, int line_no) {
    double v = 0.0;
    const char* end = text.data() + text.size();
    auto [p, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || p != end) {
        const std::string lower = [&] {
            std::string s = text;
            for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            return s;
        }();
        if (lower == "inf" || lower == "+inf" || lower == "infinity" || lower == "1e+30" || lower == "1e30") return kInfinity;
        if (lower == "-inf" || lower == "-infinity" || lower == "-1e+30" || lower == "-1e30") return -kInfinity;
        throw Error(ErrorKind::SchemaViolation, "MPS line " + std::to_string(line_no) + ": bad number '" + text + "'");
    }
    if (std::abs(v) >= 1e30) return v > 0 ? kInfinity : -kInfinity;
    return v;
}

[[noreturn]] void fail(int line_no, const std::string& what) {
    throw Error(ErrorKind::SchemaViolation, "MPS line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

std::string MpsNameMap::row_code(int i) const { return "R" + base36(i, width - 1); }
std::string MpsNameMap::column_code(int j) const { return "C" + base36(j, width - 1); }

MpsDocument export_mps(const LinearProgram& lp, const MpsOptions& options) {
    if (options.name_width < 2) throw Error(ErrorKind::NameMapOverflow, "MPS name width must be at least 2");
    const int n = lp.num_variables();
    const int m = lp.num_constraints();
    double capacity = std::pow(36.0, options.name_width - 1);
    if (n > capacity || m > capacity) {
        throw Error(ErrorKind::NameMapOverflow, std::to_string(std::max(n, m)) + " names do not fit in " +
                                                    std::to_string(options.name_width) + "-character codes");
    }
    MpsDocument doc;
    MpsNameMap& map = doc.names;
    map.width = options.name_width;
    if (static_cast<int>(map.objective.size()) > map.width) map.objective = map.objective.substr(0, static_cast<std::size_t>(map.width));
    map.rows.reserve(static_cast<std::size_t>(m));
    map.columns.reserve(static_cast<std::size_t>(n));
    for (const auto& c : lp.constraints()) map.rows.push_back(c.name);
    for (const auto& v : lp.variables()) map.columns.push_back(v.name);

    const auto w = static_cast<std::size_t>(map.width);
    std::ostringstream out;
    out << "NAME          " << options.problem_name << "\n";
    out << "ROWS\n";
    out << " N  " << map.objective << "\n";
    for (int i = 0; i < m; ++i) {
        const char t = lp.constraint(i).sense == Sense::LessEqual ? 'L' : lp.constraint(i).sense == Sense::Equal ? 'E' : 'G';
        out << ' ' << t << "  " << map.row_code(i) << "\n";
    }
    out << "COLUMNS\n";
    const SparseMatrix a = lp.column_major();
    for (int j = 0; j < n; ++j) {
        const std::string code = pad(map.column_code(j), w);
        const double c = lp.variable(j).cost;
        const bool empty = a.start[static_cast<std::size_t>(j)] == a.start[static_cast<std::size_t>(j) + 1];
        if (c != 0.0 || empty) out << "    " << code << "  " << pad(map.objective, w) << "  " << format_number(c) << "\n";
        for (std::size_t k = a.start[static_cast<std::size_t>(j)]; k < a.start[static_cast<std::size_t>(j) + 1]; ++k) {
            out << "    " << code << "  " << pad(map.row_code(a.index[k]), w) << "  " << format_number(a.value[k]) << "\n";
        }
    }
    out << "RHS\n";
    if (lp.objective_offset() != 0.0) {
        out << "    " << pad("RHS", w) << "  " << pad(map.objective, w) << "  " << format_number(-lp.objective_offset()) << "\n";
    }
    for (int i = 0; i < m; ++i) {
        const double r = lp.constraint(i).rhs;
        if (r != 0.0) out << "    " << pad("RHS", w) << "  " << pad(map.row_code(i), w) << "  " << format_number(r) << "\n";
    }
    out << "BOUNDS\n";
    for (int j = 0; j < n; ++j) {
        const auto& v = lp.variable(j);
        const std::string code = pad(map.column_code(j), w);
        auto line = [&](const char* type, std::optional<double> value) {
            out << ' ' << type << ' ' << pad("BND", w) << "  " << code;
            if (value) out << "  " << format_number(*value);
            out << "\n";
        };
        if (v.lower == v.upper) {
            line("FX", v.lower);
            continue;
        }
        if (std::isinf(v.lower) && std::isinf(v.upper)) {
            line("FR", std::nullopt);
            continue;
        }
        if (std::isinf(v.lower)) line("MI", std::nullopt);
        else if (v.lower != 0.0 || v.upper < 0.0) line("LO", v.lower);
        if (std::isfinite(v.upper)) line("UP", v.upper);
    }
    out << "ENDATA\n";
    doc.text = out.str();
    return doc;
}

LinearProgram import_mps(const std::string& text, const MpsNameMap* names) {
    enum class Section { None, Name, Rows, Columns, Rhs, Ranges, Bounds, End };
    struct RowInfo {
        std::string name;
        char type;
        double rhs = 0.0;
        std::optional<double> range;
        std::vector<Term> terms;
    };
    struct ColInfo {
        std::string name;
        double cost = 0.0;
        double lower = 0.0;
        double upper = kInfinity;
        bool lower_set = false;
    };
    std::vector<RowInfo> rows;
    std::unordered_map<std::string, int> row_index;
    std::vector<ColInfo> cols;
    std::unordered_map<std::string, int> col_index;
    std::string objective;
    double offset = 0.0;

    auto find_row = [&](const std::string& name, int line_no) -> int {
        auto it = row_index.find(name);
        if (it == row_index.end()) fail(line_no, "unknown row " + name);
        return it->second;
    };

    Section section = Section::None;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '*') continue;
        auto tok = tokens(line);
        if (tok.empty()) continue;
        if (line[0] != ' ' && line[0] != '\t') {
            const std::string& head = tok[0];
            if (head == "NAME") section = Section::Name;
            else if (head == "ROWS") section = Section::Rows;
            else if (head == "COLUMNS") section = Section::Columns;
            else if (head == "RHS") section = Section::Rhs;
            else if (head == "RANGES") section = Section::Ranges;
            else if (head == "BOUNDS") section = Section::Bounds;
            else if (head == "ENDATA") section = Section::End;
            else if (head == "OBJSENSE") fail(line_no, "OBJSENSE is not supported (minimization only)");
            else fail(line_no, "unknown section " + head);
            continue;
        }
        switch (section) {
            case Section::Rows: {
                if (tok.size() != 2) fail(line_no, "ROWS entry needs type and name");
                const char t = tok[0][0];
                if (t == 'N') {
                    if (objective.empty()) objective = tok[1];
                    continue;
                }
                if (t != 'L' && t != 'G' && t != 'E') fail(line_no, "bad row type " + tok[0]);
                if (!row_index.emplace(tok[1], static_cast<int>(rows.size())).second) fail(line_no, "duplicate row " + tok[1]);
                rows.push_back(RowInfo{tok[1], t, 0.0, std::nullopt, {}});
                break;
            }
            case Section::Columns: {
                if (tok.size() >= 3 && tok[1] == "'MARKER'") fail(line_no, "integer markers are not supported");
                if (tok.size() != 3 && tok.size() != 5) fail(line_no, "COLUMNS entry needs 3 or 5 fields");
                auto [it, inserted] = col_index.emplace(tok[0], static_cast<int>(cols.size()));
                if (inserted) cols.push_back(ColInfo{tok[0]});
                ColInfo& col = cols[static_cast<std::size_t>(it->second)];
                for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
                    const double v = number(tok[k + 1], line_no);
                    if (tok[k] == objective) col.cost += v;
                    else rows[static_cast<std::size_t>(find_row(tok[k], line_no))].terms.push_back({it->second, v});
                }
                break;
            }
            case Section::Rhs:
            case Section::Ranges: {
                // optional set name: odd token count means it is present
                const std::size_t first = tok.size() % 2 == 1 ? 1 : 0;
                if (tok.size() < 2 + first) fail(line_no, "RHS/RANGES entry too short");
                for (std::size_t k = first; k + 1 < tok.size(); k += 2) {
                    const double v = number(tok[k + 1], line_no);
                    if (tok[k] == objective) {
                        if (section == Section::Rhs) offset = -v;
                        continue;
                    }
                    RowInfo& r = rows[static_cast<std::size_t>(find_row(tok[k], line_no))];
                    if (section == Section::Rhs) r.rhs = v;
                    else r.range = v;
                }
                break;
            }
            case Section::Bounds: {
                const std::string& type = tok[0];
                const bool valued = type == "UP" || type == "LO" || type == "FX";
                const bool unvalued = type == "FR" || type == "MI" || type == "PL";
                if (!valued && !unvalued) fail(line_no, "unsupported bound type " + type);
                const std::size_t need = valued ? 3 : 2;
                if (tok.size() != need && tok.size() != need + 1) fail(line_no, "bad BOUNDS entry");
                const std::string& cname = tok[tok.size() == need + 1 ? 2 : 1];
                auto it = col_index.find(cname);
                if (it == col_index.end()) fail(line_no, "bound on unknown column " + cname);
                ColInfo& c = cols[static_cast<std::size_t>(it->second)];
                const double v = valued ? number(tok.back(), line_no) : 0.0;
                if (type == "UP") {
                    c.upper = v;
                    if (v < 0.0 && !c.lower_set && c.lower == 0.0) c.lower = -kInfinity;
                } else if (type == "LO") {
                    c.lower = v;
                    c.lower_set = true;
                } else if (type == "FX") {
                    c.lower = c.upper = v;
                    c.lower_set = true;
                } else if (type == "FR") {
                    c.lower = -kInfinity;
                    c.upper = kInfinity;
                } else if (type == "MI") {
                    c.lower = -kInfinity;
                    c.lower_set = true;
                } else {
                    c.upper = kInfinity;
                }
                break;
            }
            case Section::Name: break;
            case Section::None: fail(line_no, "data before the first section");
            case Section::End: fail(line_no, "data after ENDATA");
        }
    }
    if (section != Section::End) throw Error(ErrorKind::SchemaViolation, "MPS text has no ENDATA");

    auto row_name = [&](const std::string& code) {
        if (names) {
            if (auto i = parse_code(code, 'R', names->width); i && *i < static_cast<long>(names->rows.size())) {
                return names->rows[static_cast<std::size_t>(*i)];
            }
        }
        return code;
    };
    auto col_name = [&](const std::string& code) {
        if (names) {
            if (auto j = parse_code(code, 'C', names->width); j && *j < static_cast<long>(names->columns.size())) {
                return names->columns[static_cast<std::size_t>(*j)];
            }
        }
        return code;
    };

    LinearProgram lp;
    for (const auto& c : cols) lp.add_variable(col_name(c.name), c.lower, c.upper, c.cost);
    for (const auto& r : rows) {
        Sense sense = r.type == 'L' ? Sense::LessEqual : r.type == 'G' ? Sense::GreaterEqual : Sense::Equal;
        double rhs = r.rhs;
        std::optional<std::pair<Sense, double>> companion;
        if (r.range && *r.range != 0.0) {
            const double R = std::abs(*r.range);
            if (r.type == 'L') companion = {{Sense::GreaterEqual, rhs - R}};
            else if (r.type == 'G') companion = {{Sense::LessEqual, rhs + R}};
            else if (*r.range > 0) {
                sense = Sense::GreaterEqual;
                companion = {{Sense::LessEqual, rhs + R}};
            } else {
                sense = Sense::LessEqual;
                companion = {{Sense::GreaterEqual, rhs - R}};
            }
        }
        const std::string name = row_name(r.name);
        lp.add_constraint(name, sense, rhs, r.terms);
        if (companion) lp.add_constraint(name + ".range", companion->first, companion->second, r.terms);
    }
    lp.set_objective_offset(offset);
    return lp;
}

void write_name_map(const MpsNameMap& names, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::MissingFile, "cannot write " + path.string());
    out << "width " << names.width << "\n";
    out << "objective " << names.objective << "\n";
    for (std::size_t i = 0; i < names.rows.size(); ++i) out << "row " << names.row_code(static_cast<int>(i)) << ' ' << names.rows[i] << "\n";
    for (std::size_t j = 0; j < names.columns.size(); ++j)
        out << "col " << names.column_code(static_cast<int>(j)) << ' ' << names.columns[j] << "\n";
}

MpsNameMap read_name_map(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::MissingFile, "cannot read " + path.string());
    MpsNameMap map;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto tok = tokens(line);
        if (tok.empty()) continue;
        auto bad = [&] { throw Error(ErrorKind::SchemaViolation, path.string() + ":" + std::to_string(line_no) + ": bad entry"); };
        if (tok[0] == "width" && tok.size() == 2) map.width = std::stoi(tok[1]);
        else if (tok[0] == "objective" && tok.size() == 2) map.objective = tok[1];
        else if (tok[0] == "row" && tok.size() == 3) {
            if (tok[1] != map.row_code(static_cast<int>(map.rows.size()))) bad();
            map.rows.push_back(tok[2]);
        } else if (tok[0] == "col" && tok.size() == 3) {
            if (tok[1] != map.column_code(static_cast<int>(map.columns.size()))) bad();
            map.columns.push_back(tok[2]);
        } else bad();
    }
    return map;
}

Solution import_solution(const LinearProgram& lp, const MpsNameMap& names, const std::filesystem::path& path,
                         double tolerance) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::MissingFile, "cannot read " + path.string());
    const int n = lp.num_variables();
    Solution s;
    s.primal.assign(static_cast<std::size_t>(n), 0.0);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto tok = tokens(line);
        if (tok.empty() || tok[0][0] == '#') continue;
        if (tok.size() != 2) {
            throw Error(ErrorKind::SchemaViolation, path.string() + ":" + std::to_string(line_no) + ": expected 'column value'");
        }
        std::optional<int> j;
        if (auto code = parse_code(tok[0], 'C', names.width); code && *code < n) j = static_cast<int>(*code);
        else j = lp.find_variable(tok[0]);
        if (!j) throw Error(ErrorKind::UnknownColumn, path.string() + ":" + std::to_string(line_no) + ": " + tok[0]);
        s.primal[static_cast<std::size_t>(*j)] = number(tok[1], line_no);
    }
    certify(lp, s);
    if (!(s.max_relative_residual <= tolerance)) {
        std::string worst;
        double worst_v = -1.0;
        for (int i = 0; i < lp.num_constraints(); ++i) {
            const auto& r = lp.constraint(i);
            const double a = s.row_activity[static_cast<std::size_t>(i)];
            double v = r.sense == Sense::LessEqual ? a - r.rhs : r.sense == Sense::GreaterEqual ? r.rhs - a : std::abs(a - r.rhs);
            v /= std::max(1.0, std::abs(r.rhs));
            if (v > worst_v) {
                worst_v = v;
                worst = r.name;
            }
        }
        throw Error(ErrorKind::ResidualTooLarge, "imported solution violates " + worst + " by " + format_number(worst_v) +
                                                     " (relative), tolerance " + format_number(tolerance));
    }
    s.status = SolveStatus::Optimal;
    s.message = "imported from " + path.filename().string();
    return s;
}

}  // namespace gridplan
