#include "covshift/commands.hpp"

#include "covshift/csv.hpp"
#include "covshift/svg.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace covshift {

namespace fs = std::filesystem;

namespace {

constexpr const char* kBlue = "#1f77b4";
constexpr const char* kOrange = "#ff7f0e";
constexpr const char* kGreen = "#2ca02c";
constexpr const char* kGrey = "#7f7f7f";

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
    fs::create_directories(cfg.out_dir);
    return (fs::path(cfg.out_dir) / name).string();
}

void save(const ExperimentConfig& cfg, const std::string& name, const std::string& contents, std::ostream& log) {
    const std::string path = out_path(cfg, name);
    csv::write_file(path, contents);
    log << "wrote " << path << '\n';
}

std::string num(double v) { return csv::number(v); }
std::string num(std::size_t v) { return std::to_string(v); }

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

PointSet column(const std::vector<double>& xs) {
    return points_1d(Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size())));
}

void require_replications(const ExperimentConfig& cfg) {
    if (cfg.replications < 5) throw ConfigError("rate experiments need at least 5 replications");
}

/// Reference line through the first median with the given slope.
std::vector<double> guide(const std::vector<double>& ns, double first, double slope) {
    std::vector<double> out;
    for (double n : ns) out.push_back(first * std::pow(n / ns.front(), slope));
    return out;
}

/// Slope fit, or NaN fields when the grid has a single point.
LogLogFit try_fit(const std::vector<double>& ns, const std::vector<double>& errs) {
    if (ns.size() < 2) return {kMissing, kMissing, kMissing};
    return fit_loglog_slope(ns, errs);
}

std::string describe(const std::exception& e, std::uint64_t seed, std::size_t n) {
    return "replication seed " + std::to_string(seed) + " (n = " + std::to_string(n) + "): " + e.what();
}

std::string records_csv(const MetricsReport& report) {
    std::ostringstream o;
    o << kRecordHeader << '\n';
    csv::Writer w(o);
    for (const auto& r : report.records) {
        w.row({r.scenario, num(r.n_theta), num(r.n_f), num(r.alpha), num(r.iota), num(r.m), r.filter,
               std::to_string(r.seed), num(r.err_phi_rhoR), num(r.err_theta_rhoS), num(r.err_f_rhoT),
               num(r.excess_risk)});
    }
    return o.str();
}

}  // namespace

std::vector<FilterCheckRow> run_filter_checks(const ExperimentConfig& cfg) {
    std::vector<FilterCheckRow> rows;
    for (FilterFamily family : {FilterFamily::krr, FilterFamily::gradient_flow, FilterFamily::spectral_cutoff}) {
        const FilterSpec spec = cfg.filter_for(family, 1.0);
        rows.push_back({spec, check_filter_conditions(spec, FilterCheckGrids::standard(spec.tau))});
    }
    return rows;
}

int cmd_check_filters(const ExperimentConfig& cfg, std::ostream& log) {
    const auto rows = run_filter_checks(cfg);
    std::ostringstream o;
    o << "family,tau,E,F,passes,worst_margin,witness_condition,witness_lambda,witness_c,witness_t\n";
    csv::Writer w(o);
    bool all = true;
    for (const auto& [spec, rep] : rows) {
        all = all && rep.passes;
        const bool has_witness = !rep.passes;
        w.row({filter_family_name(spec.family), num(spec.tau), num(spec.E), num(spec.F), rep.passes ? "1" : "0",
               num(rep.worst_margin), has_witness ? std::to_string(rep.witness_condition) : "",
               has_witness ? num(rep.witness_lambda) : "", has_witness ? num(rep.witness_c) : "",
               has_witness ? num(rep.witness_t) : ""});
        log << filter_family_name(spec.family) << " tau=" << spec.tau << " E=" << spec.E << " F=" << spec.F << ": "
            << (rep.passes ? "pass" : "FAIL");
        if (has_witness) {
            log << " (condition " << rep.witness_condition << ", lambda=" << rep.witness_lambda
                << ", c=" << rep.witness_c << ", t=" << rep.witness_t << ")";
        }
        log << '\n';
    }
    save(cfg, "check_filters.csv", o.str(), log);
    return all ? kExitOk : kExitCheckFailed;
}

std::vector<double> evaluation_grid(const Scenario& scenario, std::size_t points) {
    std::vector<double> xs(points);
    if (scenario.domain() == Domain::unit_interval) {
        for (std::size_t i = 0; i < points; ++i) xs[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(points);
    } else {
        const auto [lo, hi] = scenario.display_range();
        for (std::size_t i = 0; i < points; ++i) {
            xs[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
        }
    }
    return xs;
}

Figure1Data run_figure1(const ExperimentConfig& cfg) {
    if (cfg.scenario == "identity") throw ConfigError("figure1 needs a scenario with a non-constant ratio");
    const Scenario scenario = cfg.make_scenario();
    Figure1Data d;
    d.x = evaluation_grid(scenario, cfg.grid_points);
    for (double x : d.x) {
        d.theta.push_back(scenario.theta(x));
        d.phi.push_back(scenario.phi(cfg.alpha, x));
    }
    return d;
}

int cmd_figure1(const ExperimentConfig& cfg, std::ostream& log) {
    const Figure1Data d = run_figure1(cfg);
    std::ostringstream o;
    o << "x,theta,phi\n";
    csv::Writer w(o);
    for (std::size_t i = 0; i < d.x.size(); ++i) w.row({num(d.x[i]), num(d.theta[i]), num(d.phi[i])});
    const std::string stem = "figure1_" + cfg.scenario;
    save(cfg, stem + ".csv", o.str(), log);

    svg::Plot plot;
    plot.title = "Density ratio vs relative density ratio (" + cfg.scenario + ")";
    plot.x_label = "x";
    plot.y_label = "ratio";
    plot.series.push_back({"theta", d.x, d.theta, kBlue});
    plot.series.push_back({"phi, alpha=" + num(cfg.alpha), d.x, d.phi, kOrange});
    save(cfg, stem + ".svg", svg::render(plot), log);
    return kExitOk;
}

int cmd_estimate_dre(const ExperimentConfig& cfg, std::ostream& log) {
    const Scenario scenario = cfg.make_scenario();
    const std::uint64_t seed = replication_seed(cfg, 0);
    const PointSet source = scenario.sample_source(cfg.n_theta, seed);
    const PointSet target = scenario.sample_target(cfg.n_theta, seed);
    const double mu = cfg.mu_override.value_or(schedule_mu(cfg.n_theta, cfg.iota));
    const double D = schedule_truncation(cfg.n_theta, cfg.iota, cfg.m);
    const DensityRatioEstimate est(estimate_relative_ratio(source, target, cfg.alpha, cfg.kernel(), cfg.filter(mu)),
                                   D);

    const std::vector<double> xs = evaluation_grid(scenario, cfg.grid_points);
    const PointSet q = column(xs);
    const auto raw = to_vector(est.relative_raw(q));
    const auto trunc = to_vector(est.relative(q));
    const auto th = to_vector(est.theta(q));
    const auto truth = to_vector(scenario.theta(q));
    const auto phi = to_vector(scenario.phi(cfg.alpha, q));

    std::ostringstream o;
    o << "x,phi_hat,phi_hat_trunc,theta_hat,theta,phi\n";
    csv::Writer w(o);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        w.row({num(xs[i]), num(raw[i]), num(trunc[i]), num(th[i]), num(truth[i]), num(phi[i])});
    }
    save(cfg, "estimate_dre.csv", o.str(), log);

    svg::Plot plot;
    plot.title = "Density ratio estimate (" + cfg.scenario + ", n_theta=" + num(cfg.n_theta) + ")";
    plot.x_label = "x";
    plot.y_label = "ratio";
    plot.series.push_back({"theta", xs, truth, kBlue});
    plot.series.push_back({"theta_hat", xs, th, kBlue, true});
    plot.series.push_back({"phi", xs, phi, kOrange});
    plot.series.push_back({"phi_hat", xs, raw, kOrange, true});
    plot.series.push_back({"phi_hat truncated", xs, trunc, kGreen, true});
    save(cfg, "estimate_dre.svg", svg::render(plot), log);
    log << "mu=" << mu << " D=" << D << '\n';
    return kExitOk;
}

namespace {

LabeledSample read_labeled(const std::string& path) {
    const csv::Table t = csv::read_file(path);
    const int cx = t.column("x");
    const int cy = t.column("y");
    if (cx < 0 || cy < 0) throw ConfigError("data file '" + path + "' needs columns x and y");
    LabeledSample data;
    data.xs.resize(static_cast<Eigen::Index>(t.rows.size()), 1);
    data.ys.resize(static_cast<Eigen::Index>(t.rows.size()));
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        try {
            std::size_t used = 0;
            const std::string& fx = t.rows[i][static_cast<std::size_t>(cx)];
            const std::string& fy = t.rows[i][static_cast<std::size_t>(cy)];
            data.xs(static_cast<Eigen::Index>(i), 0) = std::stod(fx, &used);
            if (used != fx.size()) throw std::invalid_argument(fx);
            data.ys(static_cast<Eigen::Index>(i)) = std::stod(fy, &used);
            if (used != fy.size()) throw std::invalid_argument(fy);
        } catch (const std::logic_error&) {
            throw ConfigError("data file '" + path + "': row " + std::to_string(i + 1) + " is not numeric");
        }
    }
    if (data.size() == 0) throw ConfigError("data file '" + path + "' has no rows");
    return data;
}

}  // namespace

int cmd_fit(const ExperimentConfig& cfg, const std::optional<std::string>& data_path, std::ostream& log) {
    const Scenario scenario = cfg.make_scenario();
    const std::uint64_t seed = replication_seed(cfg, 0);
    LabeledSample data;
    if (data_path) {
        data = read_labeled(*data_path);
    } else {
        data = scenario.sample_labeled(cfg.n_f, seed);
        std::ostringstream o;
        o << "x,y\n";
        csv::Writer w(o);
        for (std::size_t i = 0; i < data.size(); ++i) {
            w.row({num(data.xs(static_cast<Eigen::Index>(i), 0)), num(data.ys(static_cast<Eigen::Index>(i)))});
        }
        save(cfg, "labeled.csv", o.str(), log);
    }

    const KernelSpec kernel = cfg.kernel();
    const std::size_t n_f = data.size();
    const double lam = cfg.lam_override.value_or(schedule_lambda(n_f, regression_exponent(cfg)));
    std::optional<DensityRatioEstimate> est;
    WeightFunction weights;
    switch (cfg.weight_source) {
        case WeightSource::dre: {
            const std::size_t n_theta = coupled_n_theta(n_f, cfg.beta);
            const double mu = cfg.mu_override.value_or(schedule_mu(n_theta, cfg.iota));
            est.emplace(estimate_relative_ratio(scenario.sample_source(n_theta, seed),
                                                scenario.sample_target(n_theta, seed), cfg.alpha, kernel,
                                                cfg.filter(mu)),
                        schedule_truncation(n_theta, cfg.iota, cfg.m));
            weights = [&est](const PointSet& x) { return est->theta(x); };
            log << "density ratio from n_theta=" << n_theta << '\n';
            break;
        }
        case WeightSource::true_ratio:
            weights = [&scenario](const PointSet& x) { return scenario.theta(x); };
            break;
        case WeightSource::unit:
            weights = unit_weights();
            break;
    }
    const Regressor reg = fit_iw_spectral(data, weights, kernel, cfg.filter(lam));

    const std::vector<double> xs = evaluation_grid(scenario, cfg.grid_points);
    const PointSet q = column(xs);
    const auto pred = to_vector(reg.predict(q));
    const auto truth = to_vector(scenario.f_rho(q));
    std::ostringstream o;
    o << "x,f_hat,f_rho\n";
    csv::Writer w(o);
    for (std::size_t i = 0; i < xs.size(); ++i) w.row({num(xs[i]), num(pred[i]), num(truth[i])});
    save(cfg, "predictions.csv", o.str(), log);
    log << "weights=" << weight_source_name(cfg.weight_source) << " lambda=" << lam << '\n';
    return kExitOk;
}

MetricsReport run_rate_dre(const ExperimentConfig& cfg) {
    require_replications(cfg);
    const std::size_t reps = cfg.replications;
    MetricsReport report;
    report.records.resize(cfg.n_theta_grid.size() * reps);
    parallel_for(report.records.size(), cfg.worker_count(), [&](std::size_t job) {
        const std::size_t n = cfg.n_theta_grid[job / reps];
        const std::uint64_t seed = replication_seed(cfg, job % reps);
        try {
            report.records[job] = run_dre_replication(cfg, n, seed);
        } catch (const std::exception& e) {
            throw std::runtime_error(describe(e, seed, n));
        }
    });
    return report;
}

int cmd_rate_dre(const ExperimentConfig& cfg, std::ostream& log) {
    const MetricsReport report = run_rate_dre(cfg);
    save(cfg, "rate_dre.csv", records_csv(report), log);

    const auto phi = report.aggregate(&ReplicationRecord::err_phi_rhoR, &ReplicationRecord::n_theta);
    const auto theta = report.aggregate(&ReplicationRecord::err_theta_rhoS, &ReplicationRecord::n_theta);
    std::vector<double> ns, phi_med, theta_med;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        ns.push_back(static_cast<double>(phi[i].first));
        phi_med.push_back(phi[i].second.median);
        theta_med.push_back(theta[i].second.median);
    }
    const double rate = cfg.iota / (2.0 * cfg.iota + 1.0);
    const double phi_theory = -rate;
    const double theta_theory = -(rate - 2.0 * truncation_exponent(cfg.iota, cfg.m));
    const LogLogFit phi_fit = try_fit(ns, phi_med);
    const LogLogFit theta_fit = try_fit(ns, theta_med);
    const auto phi_guide = guide(ns, phi_med.front(), phi_theory);
    const auto theta_guide = guide(ns, theta_med.front(), theta_theory);

    std::ostringstream s;
    s << "n_theta,err_phi_median,err_phi_q1,err_phi_q3,err_theta_median,err_theta_q1,err_theta_q3,guide_phi,"
         "guide_theta\n";
    csv::Writer sw(s);
    for (std::size_t i = 0; i < ns.size(); ++i) {
        sw.row({num(phi[i].first), num(phi_med[i]), num(phi[i].second.q1), num(phi[i].second.q3), num(theta_med[i]),
                num(theta[i].second.q1), num(theta[i].second.q3), num(phi_guide[i]), num(theta_guide[i])});
    }
    save(cfg, "rate_dre_summary.csv", s.str(), log);

    std::ostringstream f;
    f << "metric,slope,intercept,r2,theory_slope\n";
    csv::Writer fw(f);
    fw.row({"err_phi_rhoR", num(phi_fit.slope), num(phi_fit.intercept), num(phi_fit.r2), num(phi_theory)});
    fw.row({"err_theta_rhoS", num(theta_fit.slope), num(theta_fit.intercept), num(theta_fit.r2), num(theta_theory)});
    save(cfg, "rate_dre_fit.csv", f.str(), log);

    svg::Plot plot;
    plot.title = "Density ratio error (" + cfg.scenario + ")";
    plot.x_label = "n_theta";
    plot.y_label = "median L2 error";
    plot.log_x = plot.log_y = true;
    plot.series.push_back({"phi, rho_R", ns, phi_med, kOrange, false, true});
    plot.series.push_back({"theta, rho_S", ns, theta_med, kBlue, false, true});
    plot.series.push_back({"guide slope " + num(phi_theory), ns, phi_guide, kOrange, true});
    plot.series.push_back({"guide slope " + num(theta_theory), ns, theta_guide, kBlue, true});
    save(cfg, "rate_dre.svg", svg::render(plot), log);

    log << "slope err_phi_rhoR = " << phi_fit.slope << " (guide " << phi_theory << ")\n";
    log << "slope err_theta_rhoS = " << theta_fit.slope << " (guide " << theta_theory << ")\n";
    return kExitOk;
}

RateRegressionResult run_rate_regression(const ExperimentConfig& cfg, WeightSource source) {
    require_replications(cfg);
    const std::size_t reps = cfg.replications;
    const std::size_t jobs = cfg.n_f_grid.size() * reps;
    RateRegressionResult out;
    out.report.records.resize(jobs);
    out.excess_risk_unit.resize(jobs);
    out.err_f_unit.resize(jobs);
    parallel_for(jobs, cfg.worker_count(), [&](std::size_t job) {
        const std::size_t n = cfg.n_f_grid[job / reps];
        const std::uint64_t seed = replication_seed(cfg, job % reps);
        try {
            RegressionOutcome r = run_regression_replication(cfg, n, seed, source);
            out.report.records[job] = std::move(r.record);
            out.excess_risk_unit[job] = r.excess_risk_unit;
            out.err_f_unit[job] = r.err_f_unit;
        } catch (const std::exception& e) {
            throw std::runtime_error(describe(e, seed, n));
        }
    });
    return out;
}

int cmd_rate_regression(const ExperimentConfig& cfg, std::ostream& log) {
    const RateRegressionResult res = run_rate_regression(cfg, cfg.weight_source);
    save(cfg, "rate_regression.csv", records_csv(res.report), log);

    const std::size_t reps = cfg.replications;
    std::vector<double> ns, err_med, risk_med, unit_err_med, unit_risk_med;
    std::vector<Summary> err_sum;
    for (std::size_t g = 0; g < cfg.n_f_grid.size(); ++g) {
        std::vector<double> e, r, ue, ur;
        for (std::size_t k = 0; k < reps; ++k) {
            const std::size_t j = g * reps + k;
            e.push_back(res.report.records[j].err_f_rhoT);
            r.push_back(res.report.records[j].excess_risk);
            ue.push_back(res.err_f_unit[j]);
            ur.push_back(res.excess_risk_unit[j]);
        }
        ns.push_back(static_cast<double>(cfg.n_f_grid[g]));
        err_sum.push_back(summarize(e));
        err_med.push_back(err_sum.back().median);
        risk_med.push_back(summarize(r).median);
        unit_err_med.push_back(summarize(ue).median);
        unit_risk_med.push_back(summarize(ur).median);
    }
    const double s_exp = regression_exponent(cfg);
    const double theory = -cfg.r * s_exp;
    const LogLogFit fit = try_fit(ns, err_med);
    const LogLogFit unit_fit = try_fit(ns, unit_err_med);
    const auto guide_line = guide(ns, err_med.front(), theory);

    std::ostringstream s;
    s << "n_f,n_theta,lambda,err_f_median,err_f_q1,err_f_q3,excess_risk_median,err_f_unit_median,"
         "excess_risk_unit_median,guide\n";
    csv::Writer sw(s);
    for (std::size_t g = 0; g < ns.size(); ++g) {
        const std::size_t n_f = cfg.n_f_grid[g];
        const std::size_t n_theta = cfg.weight_source == WeightSource::dre ? coupled_n_theta(n_f, cfg.beta) : 0;
        const double lam = cfg.lam_override.value_or(schedule_lambda(n_f, s_exp));
        sw.row({num(n_f), num(n_theta), num(lam), num(err_med[g]), num(err_sum[g].q1), num(err_sum[g].q3),
                num(risk_med[g]), num(unit_err_med[g]), num(unit_risk_med[g]), num(guide_line[g])});
    }
    save(cfg, "rate_regression_summary.csv", s.str(), log);

    std::ostringstream f;
    f << "metric,weights,slope,intercept,r2,theory_slope\n";
    csv::Writer fw(f);
    fw.row({"err_f_rhoT", weight_source_name(cfg.weight_source), num(fit.slope), num(fit.intercept), num(fit.r2),
            num(theory)});
    fw.row({"err_f_rhoT", "unit", num(unit_fit.slope), num(unit_fit.intercept), num(unit_fit.r2), num(theory)});
    save(cfg, "rate_regression_fit.csv", f.str(), log);

    svg::Plot plot;
    plot.title = "Target regression error (" + cfg.scenario + ")";
    plot.x_label = "n_f";
    plot.y_label = "median L2(rho_T) error";
    plot.log_x = plot.log_y = true;
    plot.series.push_back({weight_source_name(cfg.weight_source) + " weights", ns, err_med, kBlue, false, true});
    if (cfg.weight_source != WeightSource::unit) {
        plot.series.push_back({"unit weights", ns, unit_err_med, kGrey, false, true});
    }
    plot.series.push_back({"guide slope " + num(theory), ns, guide_line, kBlue, true});
    save(cfg, "rate_regression.svg", svg::render(plot), log);

    log << "s = " << s_exp << ", slope err_f_rhoT = " << fit.slope << " (guide " << theory << ")\n";
    return kExitOk;
}

namespace {

/// Top eigenvalue of the empirical operator (1/n) sum K(., x_i) <., K(., x_i)>.
double empirical_norm(const PointSet& xs, const KernelSpec& kernel) {
    const auto n = xs.rows();
    const OperatorRep rep(xs, Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n)), kernel);
    Eigen::VectorXd v = Eigen::VectorXd::Ones(n).normalized();
    double value = 0.0;
    for (int it = 0; it < 500; ++it) {
        Eigen::VectorXd w = rep.sym_multiply(v);
        const double next = v.dot(w);
        const double norm = w.norm();
        if (norm == 0.0) return 0.0;
        v = w / norm;
        if (std::abs(next - value) <= 1e-12 * std::abs(next)) return next;
        value = next;
    }
    return value;
}

}  // namespace

std::vector<InequalityCheck> run_diagnose(const ExperimentConfig& cfg) {
    const Scenario scenario = cfg.make_scenario();
    const KernelSpec kernel = cfg.kernel();
    const std::uint64_t seed = replication_seed(cfg, 0);
    SampleSizeInputs in;
    in.n_theta = cfg.n_theta;
    in.n_f = cfg.n_f;
    in.s = regression_exponent(cfg);
    in.iota = cfg.iota;
    in.m = cfg.m;
    in.r = cfg.r;
    in.alpha = cfg.alpha;
    in.kappa_sq = kappa_sq(kernel);
    in.delta = cfg.delta;
    in.norm_source = empirical_norm(scenario.sample_source(cfg.n_theta, seed), kernel);
    in.norm_target = empirical_norm(scenario.sample_target(cfg.n_theta, seed), kernel);
    in.delta_phi = cfg.delta_phi;
    in.xi_m = cfg.xi_m;
    return sample_size_diagnostic(in);
}

int cmd_diagnose(const ExperimentConfig& cfg, std::ostream& log) {
    const auto checks = run_diagnose(cfg);
    std::ostringstream o;
    o << "condition,n_theta,n_f,lhs,rhs,passes,slack\n";
    csv::Writer w(o);
    for (const auto& c : checks) {
        w.row({c.name, num(cfg.n_theta), num(cfg.n_f), num(c.lhs), num(c.rhs), c.passes ? "1" : "0", num(c.slack)});
        log << c.name << ": lhs=" << c.lhs << " rhs=" << c.rhs << " slack=" << c.slack
            << (c.passes ? " ok" : " FAILS") << '\n';
    }
    save(cfg, "diagnose.csv", o.str(), log);
    return kExitOk;
}

}  // namespace covshift
