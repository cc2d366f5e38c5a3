#pragma once

#include "stdwr/adaptivity.hpp"

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace stdwr {

/// "loop,N,NKmax,NDoFtot,Je,eta_h,eta_tau,Ieff"
[[nodiscard]] const std::string& csv_header();

/// One CSV row; reals in "%.5e" (6 significant digits), Ieff "exact" when empty.
[[nodiscard]] std::string format_record(const ConvergenceRecord& record);

/// Convergence CSV written row by row and flushed after each row.
class CsvWriter {
public:
    explicit CsvWriter(const std::filesystem::path& path);
    void append(const ConvergenceRecord& record);
    [[nodiscard]] const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

/// A parsed convergence CSV; cells keep their original text.
struct CsvTable {
    std::string name;
    std::vector<std::vector<std::string>> rows;
};

/// Rejects a wrong header, wrong column counts and non-numeric fields.
[[nodiscard]] CsvTable parse_convergence_csv(const std::string& text, const std::string& name = {});
[[nodiscard]] CsvTable read_convergence_csv(const std::filesystem::path& path);

enum class TableFormat { Plain, Markdown };

/// Tables placed side by side, row i of every table on line i.
[[nodiscard]] std::string emit_table(const std::vector<CsvTable>& tables, TableFormat format);

/// "slab,eta_tau_n,eta_h_n" rows (slab 1-based).
[[nodiscard]] std::string slab_indicator_csv(const IndicatorSet& set);
/// "slab,cell,eta_h_contrib" rows (slab 1-based, cell 0-based).
[[nodiscard]] std::string cell_indicator_csv(const IndicatorSet& set);

/// Nodal field dump: per slab and temporal node a "# slab n t" line then "x y value" lines.
[[nodiscard]] std::string field_dump(const Trajectory& field);

/// Writes indicators, partition, meshes and optionally fields of one loop into `dir`.
void write_loop_dump(const std::filesystem::path& dir, const LoopSnapshot& snapshot, bool fields);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace stdwr
