#include "covshift/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

struct Flags {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    std::string scenario;
    std::optional<std::size_t> n_theta;
    std::optional<std::size_t> n_f;
    std::string data;
    std::string weights;
};

covshift::ExperimentConfig resolve(const Flags& f) {
    covshift::ExperimentConfig cfg = f.config.empty() ? covshift::ExperimentConfig{} : covshift::load_config(f.config);
    if (!f.out.empty()) cfg.out_dir = f.out;
    if (f.seed) cfg.seed_base = *f.seed;
    if (f.workers) cfg.workers = *f.workers;
    if (!f.scenario.empty()) cfg.scenario = f.scenario;
    if (f.n_theta) cfg.n_theta = *f.n_theta;
    if (f.n_f) cfg.n_f = *f.n_f;
    if (!f.weights.empty()) {
        try {
            cfg.weight_source = covshift::parse_weight_source(f.weights);
        } catch (const std::invalid_argument& e) {
            throw covshift::ConfigError(e.what());
        }
    }
    covshift::validate(cfg);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Covariate-shift regression with relative density-ratio weights"};
    app.require_subcommand(1);
    Flags flags;

    auto add_common = [&flags](CLI::App* sub) {
        sub->add_option("--config", flags.config, "JSON config file")->check(CLI::ExistingFile);
        sub->add_option("--out", flags.out, "Output directory");
        sub->add_option("--seed", flags.seed, "Base seed");
        sub->add_option("--workers", flags.workers, "Worker threads (0: all cores)");
        sub->add_option("--scenario", flags.scenario, "Scenario name (overrides config)");
        sub->add_option("--n-theta", flags.n_theta, "Density-ratio sample size")->check(CLI::PositiveNumber);
        sub->add_option("--n-f", flags.n_f, "Labeled sample size")->check(CLI::PositiveNumber);
    };

    using Command = int (*)(const covshift::ExperimentConfig&, std::ostream&);
    const std::vector<std::tuple<const char*, const char*, Command>> simple = {
        {"check-filters", "Check the filter conditions of the three filter families", covshift::cmd_check_filters},
        {"figure1", "True density ratio and relative ratio curves", covshift::cmd_figure1},
        {"estimate-dre", "One density-ratio estimate on the evaluation grid", covshift::cmd_estimate_dre},
        {"rate-dre", "Density-ratio error rates over the n_theta grid", covshift::cmd_rate_dre},
        {"rate-regression", "Target regression error rates over the n_f grid", covshift::cmd_rate_regression},
        {"diagnose", "Sample-size sufficiency conditions", covshift::cmd_diagnose},
    };
    Command chosen = nullptr;
    for (const auto& [name, help, fn] : simple) {
        CLI::App* sub = app.add_subcommand(name, help);
        add_common(sub);
        if (std::string(name) == "rate-regression") {
            sub->add_option("--weights", flags.weights, "Weight source: dre, true or unit");
        }
        sub->callback([&chosen, fn = fn] { chosen = fn; });
    }
    bool fit = false;
    CLI::App* fit_cmd = app.add_subcommand("fit", "Fit the weighted regressor and predict on the evaluation grid");
    add_common(fit_cmd);
    fit_cmd->add_option("--data", flags.data, "CSV with columns x,y")->check(CLI::ExistingFile);
    fit_cmd->add_option("--weights", flags.weights, "Weight source: dre, true or unit");
    fit_cmd->callback([&fit] { fit = true; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? covshift::kExitOk : covshift::kExitUsage;
    }

    try {
        const covshift::ExperimentConfig cfg = resolve(flags);
        if (fit) {
            return covshift::cmd_fit(cfg, flags.data.empty() ? std::nullopt : std::optional<std::string>(flags.data),
                                     std::cout);
        }
        return chosen(cfg, std::cout);
    } catch (const covshift::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return covshift::kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return covshift::kExitCheckFailed;
    }
}
