// Command-line front end: `toe run <config>` and `toe closed-form`.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "toe/toe.hpp"

namespace {

constexpr int kExitMismatch = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitDomain = 4;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Timing-of-events duration model simulator and verifier", "toe"};
    app.set_version_flag("--version", std::string("toe ") + TOE_VERSION);
    app.require_subcommand(1);

    auto* run_cmd = app.add_subcommand("run", "Run the experiments listed in a config file");
    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> n;
    unsigned workers = 1;
    run_cmd->add_option("config", config_path, "Experiment config file")->required();
    run_cmd->add_option("--out", out_dir, "Output directory (overrides 'out' in the config)");
    run_cmd->add_option("--seed", seed, "Seed override");
    run_cmd->add_option("--n", n, "Sample size override");
    run_cmd->add_option("--workers", workers, "Sampling threads; outputs do not depend on it")
        ->check(CLI::Range(1u, 1024u));

    auto* cf_cmd = app.add_subcommand("closed-form", "Constant-hazard reference values vs Monte Carlo");
    double lw = 0.0;
    double l0 = 0.0;
    double l1 = 0.0;
    std::size_t cf_n = 100000;
    std::uint64_t cf_seed = 42;
    cf_cmd->add_option("--lw", lw, "Treatment hazard rate")->required();
    cf_cmd->add_option("--l0", l0, "Pre-treatment outcome hazard rate")->required();
    cf_cmd->add_option("--l1", l1, "Post-treatment outcome hazard rate")->required();
    cf_cmd->add_option("--n", cf_n, "Monte Carlo sample size")->check(CLI::PositiveNumber);
    cf_cmd->add_option("--seed", cf_seed, "Monte Carlo seed");
    cf_cmd->add_option("--workers", workers, "Sampling threads")->check(CLI::Range(1u, 1024u));

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            auto cfg = toe::load_config(config_path);
            if (seed) cfg.seed = *seed;
            if (n) {
                if (!cfg.experiments.empty() && *n < toe::kMinGofSample) {
                    throw toe::ConfigError(0, "--n", "statistical experiments need n >= 100");
                }
                cfg.n = *n;
            }
            const auto result = toe::run(cfg, {out_dir.value_or(cfg.out), workers});
            for (const auto& row : result.rows) {
                std::cout << '[' << row.status() << "] " << row.experiment << ' ' << row.cause
                          << " statistic=" << toe::csv::format_double(row.report.statistic)
                          << " threshold=" << toe::csv::format_double(row.report.threshold) << '\n';
            }
            return result.ok() ? 0 : kExitMismatch;
        }
        const auto table = toe::closed_form_table(lw, l0, l1, cf_n, cf_seed, workers);
        toe::write_closed_form_table(std::cout, table);
        return 0;
    } catch (const toe::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const toe::OutputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDomain;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDomain;
    }
}
