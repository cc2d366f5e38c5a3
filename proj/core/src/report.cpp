#include "stdwr/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace stdwr {

namespace {

constexpr std::size_t n_columns = 8;

std::string real(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.5e", v);
    return buf;
}

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, sep)) {
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == sep) {
        out.emplace_back();
    }
    return out;
}

bool is_integer(const std::string& s)
{
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

bool is_real(const std::string& s)
{
    if (s.empty()) {
        return false;
    }
    try {
        std::size_t pos = 0;
        (void)std::stod(s, &pos);
        return pos == s.size();
    } catch (const std::exception&) {
        return false;
    }
}

const std::vector<std::string>& column_titles()
{
    static const std::vector<std::string> t{"loop", "N", "NKmax", "NDoFtot", "J(e)", "eta_h", "eta_tau", "Ieff"};
    return t;
}

}  // namespace

const std::string& csv_header()
{
    static const std::string h = "loop,N,NKmax,NDoFtot,Je,eta_h,eta_tau,Ieff";
    return h;
}

std::string format_record(const ConvergenceRecord& r)
{
    return std::to_string(r.loop) + "," + std::to_string(r.N) + "," + std::to_string(r.NKmax) + ","
         + std::to_string(r.NDoFtot) + "," + real(r.Je) + "," + real(r.eta_h) + "," + real(r.eta_tau) + ","
         + (r.Ieff ? real(*r.Ieff) : std::string("exact"));
}

CsvWriter::CsvWriter(const std::filesystem::path& path)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc)
{
    if (!out_) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    out_ << csv_header() << '\n';
    out_.flush();
}

void CsvWriter::append(const ConvergenceRecord& record)
{
    out_ << format_record(record) << '\n';
    out_.flush();
    if (!out_) {
        throw std::runtime_error("write failed for '" + path_.string() + "'");
    }
}

CsvTable parse_convergence_csv(const std::string& text, const std::string& name)
{
    CsvTable t;
    t.name = name;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) {
        throw std::invalid_argument("malformed CSV '" + name + "': missing header");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != csv_header()) {
        throw std::invalid_argument("malformed CSV '" + name + "': unexpected header '" + line + "'");
    }
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        auto cells = split(line, ',');
        if (cells.size() != n_columns) {
            throw std::invalid_argument("malformed CSV '" + name + "' line " + std::to_string(lineno)
                                        + ": expected 8 fields");
        }
        for (std::size_t c = 0; c < n_columns; ++c) {
            const bool ok = c < 4 ? is_integer(cells[c]) : (is_real(cells[c]) || (c == 7 && cells[c] == "exact"));
            if (!ok) {
                throw std::invalid_argument("malformed CSV '" + name + "' line " + std::to_string(lineno)
                                            + ": bad field '" + cells[c] + "'");
            }
        }
        t.rows.push_back(std::move(cells));
    }
    return t;
}

CsvTable read_convergence_csv(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_convergence_csv(ss.str(), path.stem().string());
}

std::string emit_table(const std::vector<CsvTable>& tables, TableFormat format)
{
    if (tables.empty()) {
        return {};
    }
    std::size_t n_rows = 0;
    for (const auto& t : tables) {
        n_rows = std::max(n_rows, t.rows.size());
    }
    // Grid of cells: header row then data rows; missing rows render blank.
    std::vector<std::vector<std::string>> grid(n_rows + 1);
    for (const auto& t : tables) {
        for (const auto& title : column_titles()) {
            grid[0].push_back(title);
        }
        for (std::size_t i = 0; i < n_rows; ++i) {
            for (std::size_t c = 0; c < n_columns; ++c) {
                grid[i + 1].push_back(i < t.rows.size() ? t.rows[i][c] : std::string());
            }
        }
    }
    const std::size_t width = grid[0].size();
    std::vector<std::size_t> w(width, 0);
    for (const auto& row : grid) {
        for (std::size_t c = 0; c < width; ++c) {
            w[c] = std::max(w[c], row[c].size());
        }
    }
    auto pad = [](const std::string& s, std::size_t n) { return std::string(n - s.size(), ' ') + s; };

    std::string out;
    std::string names;
    for (std::size_t k = 0; k < tables.size(); ++k) {
        names += (k ? " | " : "") + (tables[k].name.empty() ? "table " + std::to_string(k + 1) : tables[k].name);
    }
    if (format == TableFormat::Markdown) {
        out += "**" + names + "**\n\n";
        for (std::size_t r = 0; r < grid.size(); ++r) {
            out += "|";
            for (std::size_t c = 0; c < width; ++c) {
                out += " " + pad(grid[r][c], w[c]) + " |";
                if (c % n_columns == n_columns - 1 && c + 1 < width) {
                    out += "|";
                }
            }
            out += "\n";
            if (r == 0) {
                out += "|";
                for (std::size_t c = 0; c < width; ++c) {
                    out += std::string(w[c] + 1, '-') + ":|";
                    if (c % n_columns == n_columns - 1 && c + 1 < width) {
                        out += "|";
                    }
                }
                out += "\n";
            }
        }
    } else {
        out += names + "\n";
        for (const auto& row : grid) {
            std::string line;
            for (std::size_t c = 0; c < width; ++c) {
                if (c > 0) {
                    line += c % n_columns == 0 ? "  ||  " : "  ";
                }
                line += pad(row[c], w[c]);
            }
            out += line + "\n";
        }
    }
    return out;
}

std::string slab_indicator_csv(const IndicatorSet& set)
{
    std::string out = "slab,eta_tau_n,eta_h_n\n";
    for (std::size_t n = 0; n < set.eta_tau.size(); ++n) {
        out += std::to_string(n + 1) + "," + real(set.eta_tau[n]) + "," + real(set.eta_h[n]) + "\n";
    }
    return out;
}

std::string cell_indicator_csv(const IndicatorSet& set)
{
    std::string out = "slab,cell,eta_h_contrib\n";
    for (std::size_t n = 0; n < set.eta_h_cells.size(); ++n) {
        for (std::size_t c = 0; c < set.eta_h_cells[n].size(); ++c) {
            out += std::to_string(n + 1) + "," + std::to_string(c) + "," + real(set.eta_h_cells[n][c]) + "\n";
        }
    }
    return out;
}

std::string field_dump(const Trajectory& field)
{
    std::string out;
    char buf[128];
    for (std::size_t n = 0; n < field.n_slabs(); ++n) {
        const auto& dofs = *field.dofs[n];
        const auto& slab = field.slabs[n];
        const auto times = slab.node_times();
        for (std::size_t k = 0; k < slab.nodal.size(); ++k) {
            std::snprintf(buf, sizeof buf, "# slab %zu t %.17g\n", n + 1, times[k]);
            out += buf;
            for (std::size_t i = 0; i < dofs.n_nodes(); ++i) {
                const Point x = dofs.position(i);
                std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", x.x, x.y,
                              slab.nodal[k][static_cast<Eigen::Index>(i)]);
                out += buf;
            }
        }
    }
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    out << text;
    if (!out) {
        throw std::runtime_error("write failed for '" + path.string() + "'");
    }
}

void write_loop_dump(const std::filesystem::path& dir, const LoopSnapshot& snap, bool fields)
{
    std::filesystem::create_directories(dir);
    write_text(dir / "indicators_slab.csv", slab_indicator_csv(snap.indicators));
    write_text(dir / "indicators_cell.csv", cell_indicator_csv(snap.indicators));
    write_text(dir / "partition.txt", snap.mesh.partition.dump());
    std::string meshes;
    for (std::size_t n = 0; n < snap.mesh.n_slabs(); ++n) {
        meshes += "# slab " + std::to_string(n + 1) + "\n" + snap.mesh.meshes[n]->dump();
    }
    write_text(dir / "meshes.txt", meshes);
    if (fields) {
        write_text(dir / "primal.txt", field_dump(snap.primal));
        if (snap.dual) {
            write_text(dir / "dual.txt", field_dump(*snap.dual));
        }
    }
}

}  // namespace stdwr
