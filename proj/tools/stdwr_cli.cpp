// Command line driver: solve one configuration, tabulate CSVs, sweep epsilon and mode.

#include "stdwr/config.hpp"
#include "stdwr/report.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// --out wins over STDWR_OUT_DIR, which wins over the config's `out`.
fs::path output_dir(const stdwr::RunConfig& config, const std::string& flag)
{
    if (!flag.empty()) {
        return flag;
    }
    if (const char* env = std::getenv("STDWR_OUT_DIR"); env && *env) {
        return env;
    }
    return config.out;
}

int run(const stdwr::RunConfig& config, const fs::path& out_dir, bool dump_fields)
{
    fs::create_directories(out_dir);
    const fs::path csv = out_dir / (config.stem() + ".csv");
    stdwr::write_text(out_dir / (config.stem() + ".cfg"), stdwr::format_config(config));
    stdwr::CsvWriter writer(csv);
    const bool dump = config.dump || dump_fields;

    std::cout << config.stem() << "\n" << stdwr::csv_header() << std::endl;
    const auto observer = [&](const stdwr::LoopSnapshot& snap) {
        writer.append(snap.record);
        std::cout << stdwr::format_record(snap.record);
        if (snap.decision) {
            std::cout << "  -> " << stdwr::decision_name(*snap.decision);
        }
        std::cout << std::endl;
        if (dump) {
            const fs::path dir = out_dir / (config.stem() + "_loop" + std::to_string(snap.record.loop));
            stdwr::write_loop_dump(dir, snap, dump_fields);
        }
    };
    const auto data = config.problem();
    const auto result = stdwr::adaptive_loop(config.adapt_config(), data, config.delta0, config.initial_mesh(),
                                             observer);
    if (!result.error.empty()) {
        std::cerr << "stdwr: " << config.stem() << ": " << result.error << "\n";
        return 1;
    }
    std::cout << "wrote " << csv.string() << std::endl;
    return 0;
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Space-time adaptive DWR solver for convection-diffusion-reaction problems"};
    app.require_subcommand(1);

    auto* solve = app.add_subcommand("solve", "Run the adaptive loop for one configuration");
    std::string config_path;
    std::string out_flag;
    bool dump_fields = false;
    solve->add_option("--config", config_path, "key=value configuration file")->required()->check(CLI::ExistingFile);
    solve->add_flag("--dump-fields", dump_fields, "Write indicators, meshes and nodal fields of every loop");
    solve->add_option("--out", out_flag, "Output directory (overrides STDWR_OUT_DIR and the config)");

    auto* table = app.add_subcommand("table", "Print convergence CSVs side by side");
    std::vector<std::string> csvs;
    std::string format = "plain";
    table->add_option("csv", csvs, "Convergence CSV files")->required()->check(CLI::ExistingFile);
    table->add_option("--format", format, "plain or markdown")->check(CLI::IsMember({"plain", "markdown"}));

    auto* sweep = app.add_subcommand("sweep", "Run a base configuration for several epsilons and modes");
    std::string base_path;
    std::string eps_list = "1e-3,1e-4,1e-6";
    std::string mode_list = "hoRe,hoFE";
    std::string sweep_out;
    sweep->add_option("--base", base_path, "Base configuration file")->required()->check(CLI::ExistingFile);
    sweep->add_option("--eps", eps_list, "Comma-separated diffusion coefficients");
    sweep->add_option("--modes", mode_list, "Comma-separated temporal weight modes");
    sweep->add_option("--out", sweep_out, "Output directory (overrides STDWR_OUT_DIR and the config)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) {
            stdwr::RunConfig config;
            try {
                config = stdwr::load_config(config_path);
            } catch (const std::invalid_argument& e) {
                std::cerr << "stdwr: config " << config_path << ": " << e.what() << "\n";
                return 2;
            }
            return run(config, output_dir(config, out_flag), dump_fields);
        }
        if (table->parsed()) {
            std::vector<stdwr::CsvTable> tables;
            for (const auto& path : csvs) {
                tables.push_back(stdwr::read_convergence_csv(path));
            }
            std::cout << stdwr::emit_table(tables,
                                           format == "markdown" ? stdwr::TableFormat::Markdown
                                                                : stdwr::TableFormat::Plain);
            return 0;
        }
        if (sweep->parsed()) {
            const std::string base = read_file(base_path);
            int status = 0;
            for (const auto& eps : split_list(eps_list)) {
                for (const auto& mode : split_list(mode_list)) {
                    // Drop any pinned s so each mode gets its default temporal dual degree.
                    const std::string text = stdwr::override_config(base, {{"epsilon", eps}, {"mode", mode}, {"s", ""}});
                    stdwr::RunConfig config;
                    try {
                        config = stdwr::parse_config(text);
                    } catch (const std::invalid_argument& e) {
                        std::cerr << "stdwr: sweep eps=" << eps << " mode=" << mode << ": " << e.what() << "\n";
                        return 2;
                    }
                    status = std::max(status, run(config, output_dir(config, sweep_out), false));
                }
            }
            return status;
        }
    } catch (const std::exception& e) {
        std::cerr << "stdwr: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
