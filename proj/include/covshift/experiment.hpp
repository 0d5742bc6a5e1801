#pragma once

#include "covshift/dre.hpp"
#include "covshift/filters.hpp"
#include "covshift/kernels.hpp"
#include "covshift/metrics.hpp"
#include "covshift/regression.hpp"
#include "covshift/scenarios.hpp"

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace covshift {

/// Malformed or out-of-range experiment configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class WeightSource { dre, true_ratio, unit };

WeightSource parse_weight_source(const std::string& name);
std::string weight_source_name(WeightSource source);

struct ExperimentConfig {
    std::string scenario = "log";
    /// Bandwidth defaults to the scenario's domain default when unset.
    KernelFamily kernel_family = KernelFamily::gaussian;
    std::optional<double> bandwidth;

    FilterFamily filter_family = FilterFamily::krr;
    /// Declared qualification; family default (1 for krr, 2 otherwise) when unset.
    std::optional<double> filter_tau;
    /// Declared constants overriding the family defaults.
    std::optional<double> filter_E;
    std::optional<double> filter_F;
    std::optional<double> lam_override;
    std::optional<double> mu_override;

    double alpha = 0.5;
    double iota = 0.5;
    double m = 10.0;
    double r = 0.5;
    double epsilon = 0.01;
    double beta = 1.5;
    double noise_sigma = 0.1;

    double delta = 0.1;
    double delta_phi = 1.0;
    double xi_m = 1.0;

    std::vector<std::size_t> n_theta_grid{125, 250, 500, 1000, 2000};
    std::vector<std::size_t> n_f_grid{100, 200, 400, 800};
    std::size_t replications = 20;
    std::size_t n_mc = 100000;
    std::uint64_t seed_base = 0;
    unsigned workers = 0;  // 0: hardware concurrency
    std::string out_dir = "out";

    WeightSource weight_source = WeightSource::dre;
    /// Sample sizes for the single-run commands.
    std::size_t n_theta = 1000;
    std::size_t n_f = 200;
    std::size_t grid_points = 500;

    Scenario make_scenario() const { return Scenario::by_name(scenario, noise_sigma); }
    KernelSpec kernel() const;
    /// Filter of the configured family with parameter `lam`.
    FilterSpec filter(double lam) const;
    /// Declared spec of `family`; the tau/E/F overrides apply only to the
    /// configured family.
    FilterSpec filter_for(FilterFamily family, double lam) const;
    unsigned worker_count() const;
};

/// Parses JSON text. Unknown keys are rejected. Throws ConfigError.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
/// Range checks shared by parse_config and programmatic construction.
void validate(const ExperimentConfig& config);

/// n_theta = ceil(n_f^beta).
std::size_t coupled_n_theta(std::size_t n_f, double beta);

/// Seed of replication `index`: seed_base + index.
inline std::uint64_t replication_seed(const ExperimentConfig& cfg, std::size_t index) {
    return cfg.seed_base + index;
}

/// Density-ratio pipeline on fresh samples; fills err_phi_rhoR (untruncated
/// relative estimate against phi under the mixture) and err_theta_rhoS
/// (final estimate against theta under the source).
ReplicationRecord run_dre_replication(const ExperimentConfig& cfg, std::size_t n_theta, std::uint64_t seed);

struct RegressionOutcome {
    ReplicationRecord record;
    /// Excess target risk of the unweighted fit on the same labeled data.
    double excess_risk_unit = kMissing;
    double err_f_unit = kMissing;
};

/// One covariate-shift regression replication with the given weight source.
/// The unweighted comparison shares the labeled sample and MC sample.
RegressionOutcome run_regression_replication(const ExperimentConfig& cfg, std::size_t n_f, std::uint64_t seed,
                                             WeightSource source);

/// Exponent s and lam used by the regression experiments.
double regression_exponent(const ExperimentConfig& cfg);

/// Runs fn(i) for i in [0, count) on up to `workers` threads. The first
/// exception (lowest index) is rethrown after all workers finish.
template <typename Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
    if (count == 0) return;
    const std::size_t threads = std::max<std::size_t>(1, std::min<std::size_t>(workers, count));
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::size_t error_index = count;
    std::exception_ptr error;
    auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (i < error_index) {
                    error_index = i;
                    error = std::current_exception();
                }
            }
        }
    };
    if (threads == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace covshift
