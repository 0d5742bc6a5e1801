#include "covshift/scenarios.hpp"

#include "covshift/dre.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace covshift {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double uniform_open(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

namespace {

enum Stream : std::uint64_t { kSource = 1, kTarget = 2, kLabeled = 3, kMixture = 4 };

double standard_normal(std::mt19937_64& rng) {
    return std::normal_distribution<double>(0.0, 1.0)(rng);
}

[[noreturn]] void outside_support(const std::string& name, double x) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "scenario '" << name << "': x = " << x << " is outside the support";
    throw std::domain_error(msg.str());
}

}  // namespace

Scenario Scenario::by_name(const std::string& name, double noise_sigma) {
    if (!(noise_sigma >= 0.0)) throw std::invalid_argument("noise_sigma must be non-negative");
    Scenario s;
    s.name_ = name;
    s.noise_sigma_ = noise_sigma;
    auto uniform = [](std::mt19937_64& rng) { return uniform_open(rng); };

    if (name == "identity") {
        s.domain_ = Domain::unit_interval;
        s.draw_source_ = uniform;
        s.draw_target_ = uniform;
        s.theta_ = [name](double x) {
            if (!(x >= 0.0 && x <= 1.0)) outside_support(name, x);
            return 1.0;
        };
    } else if (name == "log") {
        s.domain_ = Domain::unit_interval;
        s.draw_source_ = uniform;
        // The product of two uniforms has density -ln x on (0, 1).
        s.draw_target_ = [](std::mt19937_64& rng) {
            const double u = uniform_open(rng);
            return u * uniform_open(rng);
        };
        s.theta_ = [name](double x) {
            if (!(x > 0.0 && x <= 1.0)) outside_support(name, x);
            return -std::log(x);
        };
    } else if (name == "logsq") {
        s.domain_ = Domain::unit_interval;
        s.draw_source_ = uniform;
        // exp(-Gamma(3, 1)): density (ln x)^2 / 2 on (0, 1).
        s.draw_target_ = [](std::mt19937_64& rng) {
            const double u = uniform_open(rng);
            const double v = uniform_open(rng);
            return u * v * uniform_open(rng);
        };
        s.theta_ = [name](double x) {
            if (!(x > 0.0 && x <= 1.0)) outside_support(name, x);
            const double l = std::log(x);
            return 0.5 * l * l;
        };
    } else if (name == "gauss_shift") {
        s.domain_ = Domain::real_line;
        s.draw_source_ = [](std::mt19937_64& rng) { return standard_normal(rng); };
        s.draw_target_ = [](std::mt19937_64& rng) { return 1.0 + standard_normal(rng); };
        s.theta_ = [name](double x) {
            if (!std::isfinite(x)) outside_support(name, x);
            return std::exp(x - 0.5);
        };
    } else {
        throw std::invalid_argument("unknown scenario '" + name + "'");
    }
    return s;
}

std::vector<std::string> Scenario::names() {
    return {"identity", "log", "logsq", "gauss_shift"};
}

std::pair<double, double> Scenario::display_range() const {
    if (domain_ == Domain::unit_interval) return {0.0, 1.0};
    return {-4.0, 5.0};
}

PointSet Scenario::sample_source(std::size_t n, std::uint64_t seed) const {
    std::mt19937_64 rng(derive_seed(seed, kSource));
    PointSet out(static_cast<Eigen::Index>(n), 1);
    for (Eigen::Index i = 0; i < out.rows(); ++i) out(i, 0) = draw_source_(rng);
    return out;
}

PointSet Scenario::sample_target(std::size_t n, std::uint64_t seed) const {
    std::mt19937_64 rng(derive_seed(seed, kTarget));
    PointSet out(static_cast<Eigen::Index>(n), 1);
    for (Eigen::Index i = 0; i < out.rows(); ++i) out(i, 0) = draw_target_(rng);
    return out;
}

PointSet Scenario::sample_mixture(std::size_t n, double alpha, std::uint64_t seed) const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("mixture weight must lie in [0, 1]");
    std::mt19937_64 rng(derive_seed(seed, kMixture));
    PointSet out(static_cast<Eigen::Index>(n), 1);
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        out(i, 0) = uniform_open(rng) < alpha ? draw_target_(rng) : draw_source_(rng);
    }
    return out;
}

LabeledSample Scenario::sample_labeled(std::size_t n_f, std::uint64_t seed) const {
    std::mt19937_64 rng(derive_seed(seed, kLabeled));
    LabeledSample out;
    out.xs.resize(static_cast<Eigen::Index>(n_f), 1);
    out.ys.resize(static_cast<Eigen::Index>(n_f));
    for (Eigen::Index i = 0; i < out.xs.rows(); ++i) {
        const double x = draw_source_(rng);
        out.xs(i, 0) = x;
        out.ys[i] = f_rho(x) + noise_sigma_ * standard_normal(rng);
    }
    return out;
}

double Scenario::theta(double x) const {
    return theta_(x);
}

double Scenario::phi(double alpha, double x) const {
    return relative_of_standard(theta_(x), alpha);
}

double Scenario::f_rho(double x) const {
    if (domain_ == Domain::unit_interval) return std::sin(2.0 * std::numbers::pi * x);
    return x * std::exp(-0.5 * x * x);
}

Eigen::VectorXd Scenario::theta(const PointSet& xs) const {
    Eigen::VectorXd out(xs.rows());
    for (Eigen::Index i = 0; i < xs.rows(); ++i) out[i] = theta(xs(i, 0));
    return out;
}

Eigen::VectorXd Scenario::phi(double alpha, const PointSet& xs) const {
    Eigen::VectorXd out(xs.rows());
    for (Eigen::Index i = 0; i < xs.rows(); ++i) out[i] = phi(alpha, xs(i, 0));
    return out;
}

Eigen::VectorXd Scenario::f_rho(const PointSet& xs) const {
    Eigen::VectorXd out(xs.rows());
    for (Eigen::Index i = 0; i < xs.rows(); ++i) out[i] = f_rho(xs(i, 0));
    return out;
}

}  // namespace covshift
