#pragma once

#include "covshift/kernels.hpp"
#include "covshift/regression.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace covshift {

enum class Domain { unit_interval, real_line };

/// splitmix64-style mixing of a base seed with a stream index.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

/// Uniform draw on the open interval (0, 1) from 53 random bits.
double uniform_open(std::mt19937_64& rng);

/// A synthetic covariate-shift problem with exact samplers and closed-form
/// ground truth. All shipped scenarios are one-dimensional and have finite
/// density-ratio moments of every order.
///
///   identity     source = target = U(0, 1), theta = 1
///   log          source U(0, 1), target U V,   theta(x) = -ln x
///   logsq        source U(0, 1), target U V W, theta(x) = (ln x)^2 / 2
///   gauss_shift  source N(0, 1), target N(1, 1), theta(x) = exp(x - 1/2)
///
/// Regression function: sin(2 pi x) on the unit interval, x exp(-x^2 / 2)
/// on the real line. Labels carry N(0, noise_sigma^2) noise.
class Scenario {
public:
    static Scenario by_name(const std::string& name, double noise_sigma = 0.1);
    static std::vector<std::string> names();

    const std::string& name() const { return name_; }
    Domain domain() const { return domain_; }
    double noise_sigma() const { return noise_sigma_; }
    /// Default Gaussian bandwidth for the domain.
    double default_bandwidth() const { return domain_ == Domain::unit_interval ? 0.2 : 1.0; }
    /// Plotting / query range.
    std::pair<double, double> display_range() const;

    PointSet sample_source(std::size_t n, std::uint64_t seed) const;
    PointSet sample_target(std::size_t n, std::uint64_t seed) const;
    /// Draws from (1 - alpha) source + alpha target.
    PointSet sample_mixture(std::size_t n, double alpha, std::uint64_t seed) const;
    LabeledSample sample_labeled(std::size_t n_f, std::uint64_t seed) const;

    /// Throws std::domain_error outside the support.
    double theta(double x) const;
    double phi(double alpha, double x) const;
    double f_rho(double x) const;

    Eigen::VectorXd theta(const PointSet& xs) const;
    Eigen::VectorXd phi(double alpha, const PointSet& xs) const;
    Eigen::VectorXd f_rho(const PointSet& xs) const;

private:
    using Draw = std::function<double(std::mt19937_64&)>;

    std::string name_;
    Domain domain_ = Domain::unit_interval;
    double noise_sigma_ = 0.1;
    Draw draw_source_;
    Draw draw_target_;
    std::function<double(double)> theta_;
};

}  // namespace covshift
