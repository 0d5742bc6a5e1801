#include "covshift/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace covshift {

double mc_l2_error(const Evaluator& f_est, const Evaluator& f_true, const Sampler& sampler, std::size_t n_mc,
                   std::uint64_t seed) {
    if (n_mc == 0) throw std::invalid_argument("mc_l2_error: n_mc must be positive");
    const PointSet xs = sampler(n_mc, seed);
    const Eigen::VectorXd a = f_est(xs);
    const Eigen::VectorXd b = f_true(xs);
    if (a.size() != xs.rows() || b.size() != xs.rows()) {
        throw std::invalid_argument("mc_l2_error: evaluator returned the wrong number of values");
    }
    double sum = 0.0;
    for (Eigen::Index i = 0; i < xs.rows(); ++i) {
        const double d = a[i] - b[i];
        if (!std::isfinite(d)) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "mc_l2_error: non-finite evaluation at x = " << xs.row(i);
            throw std::runtime_error(msg.str());
        }
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(n_mc));
}

double excess_target_risk(const Regressor& reg, const Scenario& scenario, std::size_t n_mc, std::uint64_t seed) {
    const double err = mc_l2_error([&reg](const PointSet& x) { return reg.predict(x); },
                                   [&scenario](const PointSet& x) { return scenario.f_rho(x); },
                                   [&scenario](std::size_t n, std::uint64_t s) { return scenario.sample_target(n, s); },
                                   n_mc, seed);
    return err * err;
}

double h_norm_proxy(const Eigen::VectorXd& coeffs, const OperatorRep& rep) {
    if (coeffs.size() != rep.size()) throw std::invalid_argument("h_norm_proxy: coefficient length mismatch");
    const double q = coeffs.dot(rep.gram() * coeffs);
    return std::sqrt(std::max(q, 0.0));
}

std::optional<double> h_norm_difference(const KernelExpansion& a, const KernelExpansion& b) {
    if (a.points.rows() != b.points.rows() || a.points.cols() != b.points.cols() || a.points != b.points ||
        a.kernel.family != b.kernel.family || a.kernel.bandwidth != b.kernel.bandwidth) {
        return std::nullopt;
    }
    const Eigen::VectorXd diff = a.coeffs - b.coeffs;
    const double q = diff.dot(gram(a.kernel, a.points, a.points) * diff);
    return std::sqrt(std::max(q, 0.0));
}

LogLogFit fit_loglog_slope(std::span<const double> ns, std::span<const double> errs) {
    if (ns.size() != errs.size()) throw std::invalid_argument("fit_loglog_slope: length mismatch");
    if (ns.size() < 2) throw std::invalid_argument("fit_loglog_slope: need at least two points");
    const std::size_t k = ns.size();
    std::vector<double> lx(k), ly(k);
    for (std::size_t i = 0; i < k; ++i) {
        if (!(ns[i] > 0.0)) throw std::invalid_argument("fit_loglog_slope: sample sizes must be positive");
        if (!(errs[i] > 0.0)) throw std::invalid_argument("fit_loglog_slope: errors must be positive");
        lx[i] = std::log(ns[i]);
        ly[i] = std::log(errs[i]);
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(k);
    my /= static_cast<double>(k);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_loglog_slope: all sample sizes are equal");
    LogLogFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

Summary summarize(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("summarize: no values");
    std::sort(values.begin(), values.end());
    auto quantile = [&values](double p) {
        const double pos = p * static_cast<double>(values.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, values.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        return values[lo] + frac * (values[hi] - values[lo]);
    };
    return {quantile(0.5), quantile(0.25), quantile(0.75)};
}

std::vector<std::pair<std::size_t, Summary>> MetricsReport::aggregate(double ReplicationRecord::*metric,
                                                                      std::size_t ReplicationRecord::*key) const {
    std::map<std::size_t, std::vector<double>> groups;
    for (const auto& r : records) {
        const double v = r.*metric;
        if (std::isnan(v)) continue;
        groups[r.*key].push_back(v);
    }
    std::vector<std::pair<std::size_t, Summary>> out;
    for (auto& [n, vals] : groups) out.emplace_back(n, summarize(std::move(vals)));
    return out;
}

}  // namespace covshift
