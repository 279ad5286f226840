#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gridplan/linear_program.hpp"
#include "gridplan/simplex.hpp"

namespace gridplan {

/// MPS-legal codes for structured names: row i is "R" + base36(i), column j
/// is "C" + base36(j), each padded to the same width. The map is the only
/// link back to names like gen[DE,ccgt,12].
struct MpsNameMap {
    std::string objective = "COST";
    std::vector<std::string> rows;     // structured names, by row index
    std::vector<std::string> columns;  // structured names, by column index
    int width = 8;

    std::string row_code(int i) const;
    std::string column_code(int j) const;
};

struct MpsOptions {
    int name_width = 8;  // fixed-format name field
    std::string problem_name = "GRIDPLAN";
};

struct MpsDocument {
    std::string text;
    MpsNameMap names;
};

/// Throws NameMapOverflow when the codes cannot fit in `name_width`.
MpsDocument export_mps(const LinearProgram& lp, const MpsOptions& options = {});

/// Parses fixed- or free-format MPS (names must not contain blanks). Coded
/// names are translated back through `names` when given.
LinearProgram import_mps(const std::string& text, const MpsNameMap* names = nullptr);

void write_name_map(const MpsNameMap& names, const std::filesystem::path& path);
MpsNameMap read_name_map(const std::filesystem::path& path);

/// Reads `column value` lines produced by an external solver (coded or
/// structured names), recomputes residuals against `lp` and returns an
/// optimal-status Solution without duals. Throws UnknownColumn or
/// ResidualTooLarge (when max violation exceeds `tolerance`).
Solution import_solution(const LinearProgram& lp, const MpsNameMap& names, const std::filesystem::path& path,
                         double tolerance = 1e-6);

}  // namespace gridplan
