#include "covshift/experiment.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace covshift {

using nlohmann::json;

WeightSource parse_weight_source(const std::string& name) {
    if (name == "dre") return WeightSource::dre;
    if (name == "true") return WeightSource::true_ratio;
    if (name == "unit") return WeightSource::unit;
    throw std::invalid_argument("unknown weight source '" + name + "' (expected dre, true or unit)");
}

std::string weight_source_name(WeightSource source) {
    switch (source) {
        case WeightSource::dre:
            return "dre";
        case WeightSource::true_ratio:
            return "true";
        case WeightSource::unit:
            return "unit";
    }
    return "unknown";
}

KernelSpec ExperimentConfig::kernel() const {
    const double bw = bandwidth.value_or(make_scenario().default_bandwidth());
    return kernel_family == KernelFamily::gaussian ? KernelSpec::gaussian(bw) : KernelSpec::laplacian(bw);
}

FilterSpec ExperimentConfig::filter(double lam) const { return filter_for(filter_family, lam); }

FilterSpec ExperimentConfig::filter_for(FilterFamily family, double lam) const {
    if (family != filter_family) return FilterSpec::standard(family, lam, 2.0);
    FilterSpec spec = FilterSpec::standard(family, lam, filter_tau.value_or(2.0));
    if (filter_tau) spec.tau = *filter_tau;
    if (filter_E) spec.E = *filter_E;
    if (filter_F) spec.F = *filter_F;
    return spec;
}

unsigned ExperimentConfig::worker_count() const {
    if (workers > 0) return workers;
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

template <typename T>
void read_optional(const json& obj, const char* key, std::optional<T>& out) {
    if (!obj.contains(key)) return;
    T value{};
    read(obj, key, value);
    out = value;
}

void read_grid(const json& obj, const char* key, std::vector<std::size_t>& out) {
    if (!obj.contains(key)) return;
    const json& arr = obj.at(key);
    if (!arr.is_array()) throw ConfigError(std::string("config key '") + key + "' must be an array");
    out.clear();
    for (const auto& v : arr) {
        if (!v.is_number_integer() || v.get<long long>() <= 0) {
            throw ConfigError(std::string("config key '") + key + "' must hold positive integers");
        }
        out.push_back(v.get<std::size_t>());
    }
}

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

void require_increasing(const std::vector<std::size_t>& grid, const std::string& name) {
    require(!grid.empty(), name + " must not be empty");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        require(grid[i] > grid[i - 1], name + " must be strictly increasing");
    }
}

}  // namespace

void validate(const ExperimentConfig& c) {
    try {
        (void)c.make_scenario();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    require(!c.bandwidth || (*c.bandwidth > 0.0 && std::isfinite(*c.bandwidth)), "kernel bandwidth must be positive");
    require(!c.filter_tau || *c.filter_tau >= 1.0, "filter tau must be >= 1");
    require(!c.filter_E || *c.filter_E >= 0.0, "filter E must be non-negative");
    require(!c.filter_F || *c.filter_F >= 0.0, "filter F must be non-negative");
    require(!c.lam_override || *c.lam_override > 0.0, "lam_override must be positive");
    require(!c.mu_override || *c.mu_override > 0.0, "mu_override must be positive");
    require(c.alpha > 0.0 && c.alpha < 1.0, "alpha must lie in (0, 1)");
    require(c.iota >= 0.5, "iota must be >= 1/2");
    require(c.m > 2.0, "m must exceed 2");
    require(c.r >= 0.5, "r must be >= 1/2");
    require(c.epsilon > 0.0, "epsilon must be positive");
    require(c.beta >= 1.0, "beta must be >= 1");
    require(c.noise_sigma >= 0.0, "noise_sigma must be non-negative");
    require(c.delta > 0.0 && c.delta < 1.0, "delta must lie in (0, 1)");
    require(c.delta_phi >= 0.0 && c.xi_m >= 0.0, "placeholder constants must be non-negative");
    require_increasing(c.n_theta_grid, "n_theta_grid");
    require_increasing(c.n_f_grid, "n_f_grid");
    require(c.replications >= 1, "replications must be >= 1");
    require(c.n_mc >= 1, "n_mc must be >= 1");
    require(c.n_theta >= 1 && c.n_f >= 1, "n_theta and n_f must be >= 1");
    require(c.grid_points >= 2, "grid_points must be >= 2");
}

ExperimentConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config must be a JSON object");
    check_keys(root,
               {"scenario", "kernel", "filter", "alpha", "iota", "m", "r", "epsilon", "beta", "noise_sigma", "delta",
                "delta_phi", "xi_m", "n_theta_grid", "n_f_grid", "replications", "n_mc", "seed_base", "workers", "out",
                "weight_source", "n_theta", "n_f", "grid_points"},
               "config");

    ExperimentConfig c;
    read(root, "scenario", c.scenario);
    if (root.contains("kernel")) {
        const json& k = root.at("kernel");
        if (!k.is_object()) throw ConfigError("'kernel' must be an object");
        check_keys(k, {"family", "bandwidth"}, "kernel");
        std::string family = "gaussian";
        read(k, "family", family);
        try {
            c.kernel_family = parse_kernel_family(family);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        read_optional(k, "bandwidth", c.bandwidth);
    }
    if (root.contains("filter")) {
        const json& f = root.at("filter");
        if (!f.is_object()) throw ConfigError("'filter' must be an object");
        check_keys(f, {"family", "tau", "E", "F", "lam_override", "mu_override"}, "filter");
        std::string family = "krr";
        read(f, "family", family);
        try {
            c.filter_family = parse_filter_family(family);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        read_optional(f, "tau", c.filter_tau);
        read_optional(f, "E", c.filter_E);
        read_optional(f, "F", c.filter_F);
        read_optional(f, "lam_override", c.lam_override);
        read_optional(f, "mu_override", c.mu_override);
    }
    read(root, "alpha", c.alpha);
    read(root, "iota", c.iota);
    read(root, "m", c.m);
    read(root, "r", c.r);
    read(root, "epsilon", c.epsilon);
    read(root, "beta", c.beta);
    read(root, "noise_sigma", c.noise_sigma);
    read(root, "delta", c.delta);
    read(root, "delta_phi", c.delta_phi);
    read(root, "xi_m", c.xi_m);
    read_grid(root, "n_theta_grid", c.n_theta_grid);
    read_grid(root, "n_f_grid", c.n_f_grid);
    read(root, "replications", c.replications);
    read(root, "n_mc", c.n_mc);
    read(root, "seed_base", c.seed_base);
    read(root, "workers", c.workers);
    read(root, "out", c.out_dir);
    if (root.contains("weight_source")) {
        std::string ws;
        read(root, "weight_source", ws);
        try {
            c.weight_source = parse_weight_source(ws);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    read(root, "n_theta", c.n_theta);
    read(root, "n_f", c.n_f);
    read(root, "grid_points", c.grid_points);
    validate(c);
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::size_t coupled_n_theta(std::size_t n_f, double beta) {
    const double v = std::pow(static_cast<double>(n_f), beta);
    // Guard against pow landing a hair above an exact integer.
    const double rounded = std::round(v);
    if (std::abs(v - rounded) <= 1e-9 * rounded) return static_cast<std::size_t>(rounded);
    return static_cast<std::size_t>(std::ceil(v));
}

double regression_exponent(const ExperimentConfig& cfg) {
    return select_exponent_s(cfg.beta, cfg.iota, cfg.r, cfg.epsilon);
}

namespace {

enum McStream : std::uint64_t { kMcPhi = 100, kMcTheta = 101, kMcTarget = 102 };

DensityRatioEstimate fit_dre(const ExperimentConfig& cfg, const Scenario& scenario, std::size_t n_theta,
                             std::uint64_t seed) {
    const PointSet source = scenario.sample_source(n_theta, seed);
    const PointSet target = scenario.sample_target(n_theta, seed);
    const double mu = cfg.mu_override.value_or(schedule_mu(n_theta, cfg.iota));
    const double D = schedule_truncation(n_theta, cfg.iota, cfg.m);
    return DensityRatioEstimate(estimate_relative_ratio(source, target, cfg.alpha, cfg.kernel(), cfg.filter(mu)), D);
}

ReplicationRecord base_record(const ExperimentConfig& cfg, std::uint64_t seed) {
    ReplicationRecord r;
    r.scenario = cfg.scenario;
    r.alpha = cfg.alpha;
    r.iota = cfg.iota;
    r.m = cfg.m;
    r.filter = filter_family_name(cfg.filter_family);
    r.seed = seed;
    return r;
}

}  // namespace

ReplicationRecord run_dre_replication(const ExperimentConfig& cfg, std::size_t n_theta, std::uint64_t seed) {
    const Scenario scenario = cfg.make_scenario();
    const DensityRatioEstimate est = fit_dre(cfg, scenario, n_theta, seed);

    ReplicationRecord rec = base_record(cfg, seed);
    rec.n_theta = n_theta;
    const double alpha = cfg.alpha;
    rec.err_phi_rhoR = mc_l2_error([&est](const PointSet& x) { return est.relative_raw(x); },
                                   [&scenario, alpha](const PointSet& x) { return scenario.phi(alpha, x); },
                                   [&scenario, alpha](std::size_t n, std::uint64_t s) {
                                       return scenario.sample_mixture(n, alpha, s);
                                   },
                                   cfg.n_mc, derive_seed(seed, kMcPhi));
    rec.err_theta_rhoS = mc_l2_error([&est](const PointSet& x) { return est.theta(x); },
                                     [&scenario](const PointSet& x) { return scenario.theta(x); },
                                     [&scenario](std::size_t n, std::uint64_t s) { return scenario.sample_source(n, s); },
                                     cfg.n_mc, derive_seed(seed, kMcTheta));
    return rec;
}

RegressionOutcome run_regression_replication(const ExperimentConfig& cfg, std::size_t n_f, std::uint64_t seed,
                                             WeightSource source) {
    const Scenario scenario = cfg.make_scenario();
    const KernelSpec kernel = cfg.kernel();
    const LabeledSample data = scenario.sample_labeled(n_f, seed);
    const double lam = cfg.lam_override.value_or(schedule_lambda(n_f, regression_exponent(cfg)));
    const FilterSpec filter = cfg.filter(lam);
    const std::uint64_t mc_seed = derive_seed(seed, kMcTarget);

    RegressionOutcome out;
    out.record = base_record(cfg, seed);
    out.record.n_f = n_f;

    WeightFunction weights;
    std::optional<DensityRatioEstimate> est;
    switch (source) {
        case WeightSource::dre: {
            const std::size_t n_theta = coupled_n_theta(n_f, cfg.beta);
            out.record.n_theta = n_theta;
            est.emplace(fit_dre(cfg, scenario, n_theta, seed));
            weights = [&est](const PointSet& x) { return est->theta(x); };
            break;
        }
        case WeightSource::true_ratio:
            weights = [&scenario](const PointSet& x) { return scenario.theta(x); };
            break;
        case WeightSource::unit:
            weights = unit_weights();
            break;
    }

    const Regressor reg = fit_iw_spectral(data, weights, kernel, filter);
    out.record.excess_risk = excess_target_risk(reg, scenario, cfg.n_mc, mc_seed);
    out.record.err_f_rhoT = std::sqrt(out.record.excess_risk);

    if (source == WeightSource::unit) {
        out.excess_risk_unit = out.record.excess_risk;
    } else {
        const Regressor plain = fit_iw_spectral(data, unit_weights(), kernel, filter);
        out.excess_risk_unit = excess_target_risk(plain, scenario, cfg.n_mc, mc_seed);
    }
    out.err_f_unit = std::sqrt(out.excess_risk_unit);
    return out;
}

}  // namespace covshift
