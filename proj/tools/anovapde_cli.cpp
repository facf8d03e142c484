// Batch experiment runner. See configs/ for examples and include/anovapde/cli/spec.hpp
// for the file grammar.
//
// Exit codes: 0 ok, 1 invalid configuration, 2 numerical failure, 3 I/O error.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "anovapde/cli/reference.hpp"
#include "anovapde/cli/runner.hpp"
#include "anovapde/cli/spec.hpp"
#include "anovapde/cli/table.hpp"

namespace {

using namespace anovapde;
using namespace anovapde::cli;

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw IoError("failed writing '" + path + "'");
}

void write_rows(const std::string& out_path, const std::vector<Row>& rows, const TableOptions& opt) {
    if (out_path.empty()) {
        emit_table(std::cout, rows, opt);
        std::cout.flush();
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + out_path + "' for writing");
    emit_table(out, rows, opt);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"anovapde: PCA/ANOVA heat-equation pricing of LIBOR market model products"};
    std::string config_path, out_path, format = "csv";
    std::optional<int> threads;
    std::optional<std::uint64_t> seed;
    app.add_option("--config", config_path, "experiment file (YAML)")->required();
    app.add_option("--out", out_path, "result table (default: stdout); the resolved config goes to <out>.resolved.yaml");
    app.add_option("--format", format, "csv or plain")->check(CLI::IsMember({"csv", "plain"}));
    app.add_option("--threads", threads, "worker threads (overrides run.threads)")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "seed for every Monte Carlo block (overrides the config)");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    std::vector<Row> rows;
    TableOptions opt;
    bool have_config = false;
    auto flush_partial = [&] {
        if (!have_config || rows.empty()) return;
        try {
            write_rows(out_path, rows, opt);
            std::cerr << "[anovapde] wrote " << rows.size() << " completed rows before the failure\n";
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
        }
    };

    try {
        Config cfg = load_config(config_path);
        if (seed) override_seed(cfg, *seed);
        if (threads) cfg.run.threads = *threads;
        opt.format = parse_format(format);
        opt.timing = cfg.run.timing;
        opt.full_precision = cfg.run.full_precision;
        have_config = true;

        const std::string resolved = resolved_text(cfg);
        std::cerr << "# resolved configuration\n" << resolved;
        if (!out_path.empty()) write_file(out_path + ".resolved.yaml", resolved);

        ReferenceTable refs;
        if (!cfg.run.references.empty()) refs = ReferenceTable::load(cfg.run.references);
        Runner runner(cfg, cfg.run.threads, std::move(refs), &std::cerr);
        std::cerr << "[anovapde] " << runner.threads() << " worker threads\n";
        runner.run_all(rows);
        write_rows(out_path, rows, opt);
        return 0;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        flush_partial();
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << "invalid configuration: " << e.what() << '\n';
        flush_partial();
        return 1;
    } catch (const DomainError& e) {
        std::cerr << "invalid configuration: " << e.what() << '\n';
        flush_partial();
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        flush_partial();
        return 2;
    } catch (const IncompletePlanError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        flush_partial();
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        flush_partial();
        return 2;
    }
}
