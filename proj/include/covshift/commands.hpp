#pragma once

#include "covshift/experiment.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace covshift {

enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitUsage = 2 };

/// Per-family results of the filter-condition sweep.
struct FilterCheckRow {
    FilterSpec spec;
    FilterCheckReport report;
};

std::vector<FilterCheckRow> run_filter_checks(const ExperimentConfig& cfg);

/// True ratio curves on an evaluation grid.
struct Figure1Data {
    std::vector<double> x;
    std::vector<double> theta;
    std::vector<double> phi;
};

/// Midpoint grid (i - 1/2) / N on the unit interval, evenly spaced over the
/// display range on the real line.
std::vector<double> evaluation_grid(const Scenario& scenario, std::size_t points);

/// Throws ConfigError for the identity scenario.
Figure1Data run_figure1(const ExperimentConfig& cfg);

/// Records ordered by grid index, then replication index.
MetricsReport run_rate_dre(const ExperimentConfig& cfg);

struct RateRegressionResult {
    MetricsReport report;
    /// Unweighted excess risk on the same data, aligned with report.records.
    std::vector<double> excess_risk_unit;
    std::vector<double> err_f_unit;
};

RateRegressionResult run_rate_regression(const ExperimentConfig& cfg, WeightSource source);

/// Sample-size conditions at (cfg.n_theta, cfg.n_f). Operator norms are the
/// top eigenvalues of the empirical source/target operators.
std::vector<InequalityCheck> run_diagnose(const ExperimentConfig& cfg);

// Subcommands. Each writes its files into cfg.out_dir, reports to `log`
// and returns an exit code.
int cmd_check_filters(const ExperimentConfig& cfg, std::ostream& log);
int cmd_figure1(const ExperimentConfig& cfg, std::ostream& log);
int cmd_estimate_dre(const ExperimentConfig& cfg, std::ostream& log);
/// `data_path`: CSV with columns x,y. Without it a labeled sample of size
/// cfg.n_f is drawn from the scenario and written as labeled.csv.
int cmd_fit(const ExperimentConfig& cfg, const std::optional<std::string>& data_path, std::ostream& log);
int cmd_rate_dre(const ExperimentConfig& cfg, std::ostream& log);
int cmd_rate_regression(const ExperimentConfig& cfg, std::ostream& log);
int cmd_diagnose(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace covshift
