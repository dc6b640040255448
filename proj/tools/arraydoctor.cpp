// Config-driven experiment runner.
//
//   arraydoctor run <config.json> [--seed N] [--out results.csv] [--threads N]
//   arraydoctor validate <config.json>
//   arraydoctor stats <config.json> [--seed N] [--out results.csv] [--threads N]
//
// Precedence for seed and threads: command line, then ARRAYDOCTOR_SEED and
// ARRAYDOCTOR_THREADS, then the config file.

#include <arraydoctor/config.hpp>
#include <arraydoctor/scenario.hpp>

#include <CLI11.hpp>

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <iostream>

namespace {

constexpr int exit_config = 2;
constexpr int exit_io = 3;

std::optional<std::uint64_t> env_unsigned(const char* name) {
    const char* v = std::getenv(name);
    if (!v || !*v) return std::nullopt;
    char* end = nullptr;
    errno = 0;
    const unsigned long long x = std::strtoull(v, &end, 10);
    if (errno != 0 || *end != '\0' || v[0] == '-')
        throw arraydoctor::ConfigError(std::string("environment variable ") + name + " must be a non-negative integer");
    return x;
}

struct RunOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::string out;
};

bool readable(const std::string& path) {
    std::ifstream in(path);
    if (!in) std::cerr << "error: cannot open config file '" << path << "'\n";
    return static_cast<bool>(in);
}

int execute(const RunOptions& opt, bool stats_only) {
    if (!readable(opt.config)) return exit_io;
    arraydoctor::ScenarioConfig cfg = arraydoctor::load_config(opt.config);
    if (stats_only && cfg.scenario != arraydoctor::ScenarioKind::Stats)
        throw arraydoctor::ConfigError("config field 'scenario': the stats command needs scenario \"stats\"");
    if (auto s = env_unsigned("ARRAYDOCTOR_SEED")) cfg.seed = *s;
    if (auto t = env_unsigned("ARRAYDOCTOR_THREADS")) cfg.threads = static_cast<unsigned>(*t);
    if (opt.seed) cfg.seed = *opt.seed;
    if (opt.threads) cfg.threads = *opt.threads;

    const arraydoctor::ResultTable table = arraydoctor::run_scenario(cfg);
    if (opt.out.empty()) {
        table.write_csv(std::cout);
        return std::cout ? 0 : exit_io;
    }
    std::ofstream out(opt.out, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot open '" << opt.out << "' for writing\n";
        return exit_io;
    }
    table.write_csv(out);
    out.close();
    if (!out) {
        std::cerr << "error: failed writing '" << opt.out << "'\n";
        return exit_io;
    }
    return 0;
}

void add_run_options(CLI::App* cmd, RunOptions& opt) {
    cmd->add_option("config", opt.config, "scenario config (JSON)")->required();
    cmd->add_option("--seed", opt.seed, "master seed");
    cmd->add_option("--out", opt.out, "CSV output path (default stdout)");
    cmd->add_option("--threads", opt.threads, "worker threads, 0 = all cores");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Blockage diagnosis for planar antenna arrays"};
    app.require_subcommand(1);

    RunOptions run_opt, stats_opt;
    std::string validate_path;
    CLI::App* run = app.add_subcommand("run", "run a scenario and write its CSV table");
    add_run_options(run, run_opt);
    CLI::App* stats = app.add_subcommand("stats", "run a pattern-statistics scenario");
    add_run_options(stats, stats_opt);
    CLI::App* validate = app.add_subcommand("validate", "check a config without running it");
    validate->add_option("config", validate_path, "scenario config (JSON)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (validate->parsed()) {
            if (!readable(validate_path)) return exit_io;
            const arraydoctor::ScenarioConfig cfg = arraydoctor::load_config(validate_path);
            std::cout << validate_path << ": ok (" << arraydoctor::to_string(cfg.scenario) << ", schema "
                      << cfg.schema_version << ")\n";
            return 0;
        }
        if (run->parsed()) return execute(run_opt, false);
        return execute(stats_opt, true);
    } catch (const arraydoctor::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
