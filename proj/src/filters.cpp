#include "covshift/filters.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace covshift {

FilterFamily parse_filter_family(const std::string& name) {
    if (name == "krr") return FilterFamily::krr;
    if (name == "gradient_flow") return FilterFamily::gradient_flow;
    if (name == "spectral_cutoff") return FilterFamily::spectral_cutoff;
    throw std::invalid_argument("unknown filter family '" + name + "'");
}

std::string filter_family_name(FilterFamily family) {
    switch (family) {
        case FilterFamily::krr:
            return "krr";
        case FilterFamily::gradient_flow:
            return "gradient_flow";
        case FilterFamily::spectral_cutoff:
            return "spectral_cutoff";
    }
    return "unknown";
}

namespace {
void require_lambda(double lam) {
    if (!(lam > 0.0) || !std::isfinite(lam)) throw std::invalid_argument("filter parameter must be positive");
}
void require_tau(double tau) {
    if (!(tau >= 1.0) || !std::isfinite(tau)) throw std::invalid_argument("filter qualification tau must be >= 1");
}
}  // namespace

double gradient_flow_residual_constant(double tau) {
    return std::max(1.0, std::pow(tau / std::numbers::e, tau));
}

FilterSpec FilterSpec::krr(double lam) {
    require_lambda(lam);
    return {FilterFamily::krr, lam, 1.0, 1.0, 1.0};
}

FilterSpec FilterSpec::gradient_flow(double lam, double tau) {
    require_lambda(lam);
    require_tau(tau);
    return {FilterFamily::gradient_flow, lam, tau, 1.0, gradient_flow_residual_constant(tau)};
}

FilterSpec FilterSpec::spectral_cutoff(double lam, double tau) {
    require_lambda(lam);
    require_tau(tau);
    return {FilterFamily::spectral_cutoff, lam, tau, 1.0, 1.0};
}

FilterSpec FilterSpec::standard(FilterFamily family, double lam, double tau) {
    switch (family) {
        case FilterFamily::krr:
            return krr(lam);
        case FilterFamily::gradient_flow:
            return gradient_flow(lam, tau);
        case FilterFamily::spectral_cutoff:
            return spectral_cutoff(lam, tau);
    }
    throw std::invalid_argument("unknown filter family");
}

FilterSpec FilterSpec::with_lambda(double new_lam) const {
    require_lambda(new_lam);
    FilterSpec out = *this;
    out.lam = new_lam;
    return out;
}

double filter_value(const FilterSpec& spec, double t) {
    const double lam = spec.lam;
    switch (spec.family) {
        case FilterFamily::krr:
            return 1.0 / (t + lam);
        case FilterFamily::gradient_flow: {
            const double u = t / lam;
            if (u < 1e-6) return (1.0 - u / 2.0 + u * u / 6.0) / lam;
            return -std::expm1(-u) / t;
        }
        case FilterFamily::spectral_cutoff:
            return t >= lam ? 1.0 / t : 0.0;
    }
    return 0.0;
}

Eigen::VectorXd apply_filter(const OperatorRep& rep, const FilterSpec& spec, const Eigen::VectorXd& b) {
    if (spec.family == FilterFamily::krr) return apply_shifted_inverse(rep, spec.lam, b);
    return apply_operator_function(rep, [&spec](double t) { return filter_value(spec, t); }, b);
}

FilterCheckGrids FilterCheckGrids::standard(double tau, double kappa_sq, int n_c, int n_t, double t_min) {
    FilterCheckGrids g;
    for (int i = 0; i < n_c; ++i) {
        const double frac = n_c == 1 ? 0.0 : static_cast<double>(i) / (n_c - 1);
        g.c_cond1.push_back(frac);
        g.c_cond2.push_back(frac * tau);
    }
    const double lo = std::log(t_min);
    const double hi = std::log(kappa_sq);
    for (int i = 0; i < n_t; ++i) {
        const double frac = n_t == 1 ? 1.0 : static_cast<double>(i) / (n_t - 1);
        g.t.push_back(i == n_t - 1 ? kappa_sq : std::exp(lo + frac * (hi - lo)));
    }
    g.lambdas = {1e-3, 1e-2, 1e-1, 1.0};
    return g;
}

FilterCheckReport check_filter_conditions(const FilterSpec& spec, const FilterCheckGrids& grids) {
    constexpr double kSlack = 1e-9;
    FilterCheckReport report;
    auto consider = [&](int condition, double lam, double c, double lhs, double t_at, double rhs) {
        double margin;
        if (rhs > 0.0) {
            margin = 1.0 - lhs / rhs;
        } else {
            margin = lhs > 0.0 ? -std::numeric_limits<double>::infinity() : 1.0;
        }
        if (margin < report.worst_margin) {
            report.worst_margin = margin;
            report.witness_condition = condition;
            report.witness_lambda = lam;
            report.witness_c = c;
            report.witness_t = t_at;
        }
        if (lhs > rhs * (1.0 + kSlack)) report.passes = false;
    };

    for (double lam : grids.lambdas) {
        const FilterSpec at = spec.with_lambda(lam);
        std::vector<double> g(grids.t.size());
        for (std::size_t i = 0; i < grids.t.size(); ++i) g[i] = filter_value(at, grids.t[i]);

        for (double c : grids.c_cond1) {
            double sup = -1.0, t_sup = 0.0;
            for (std::size_t i = 0; i < grids.t.size(); ++i) {
                const double v = std::pow(grids.t[i], c) * g[i];
                if (v > sup) {
                    sup = v;
                    t_sup = grids.t[i];
                }
            }
            consider(1, lam, c, sup, t_sup, spec.E * std::pow(lam, c - 1.0));
        }
        for (double c : grids.c_cond2) {
            double sup = -1.0, t_sup = 0.0;
            for (std::size_t i = 0; i < grids.t.size(); ++i) {
                const double v = std::pow(grids.t[i], c) * std::abs(1.0 - grids.t[i] * g[i]);
                if (v > sup) {
                    sup = v;
                    t_sup = grids.t[i];
                }
            }
            consider(2, lam, c, sup, t_sup, spec.F * std::pow(lam, c));
        }
    }
    return report;
}

}  // namespace covshift
