#include "covshift/regression.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

using namespace covshift;

namespace {

WeightFunction constant_weights(double v) {
    return [v](const PointSet& x) { return Eigen::VectorXd::Constant(x.rows(), v); };
}

LabeledSample random_sample(std::mt19937_64& rng, Eigen::Index n) {
    LabeledSample d;
    d.xs = oracle::random_points(rng, n, 1, 0.0, 1.0);
    d.ys = oracle::random_vector(rng, n);
    return d;
}

}  // namespace

TEST_CASE("single labeled point") {
    LabeledSample d;
    d.xs = points_1d(Eigen::VectorXd::Constant(1, 0.2));
    d.ys = Eigen::VectorXd::Constant(1, 2.0);
    for (double lam : {0.01, 0.5, 3.0}) {
        const Regressor r = fit_iw_spectral(d, unit_weights(), KernelSpec::gaussian(1.0), FilterSpec::krr(lam));
        CHECK(r.predict(d.xs)[0] == doctest::Approx(2.0 / (1.0 + lam)).epsilon(1e-14));
        CHECK(r.lam == lam);
    }
}

TEST_CASE("all-zero weights give the zero function") {
    std::mt19937_64 rng(61);
    const LabeledSample d = random_sample(rng, 30);
    for (const FilterSpec& f : {FilterSpec::krr(0.1), FilterSpec::gradient_flow(0.1), FilterSpec::spectral_cutoff(0.1)}) {
        const Regressor r = fit_iw_spectral(d, constant_weights(0.0), KernelSpec::gaussian(0.2), f);
        CHECK(r.expansion.coeffs.cwiseAbs().maxCoeff() == 0.0);
        CHECK(r.predict(oracle::random_points(rng, 20, 1)).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("property: unit weights reduce to kernel ridge regression") {
    std::mt19937_64 rng(62);
    for (int trial = 0; trial < 40; ++trial) {
        const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng() % 50);
        const LabeledSample d = random_sample(rng, n);
        const double lam = 0.001 + 0.5 * static_cast<double>(rng() % 100) / 100.0;
        const Regressor r = fit_iw_spectral(d, unit_weights(), KernelSpec::gaussian(0.3), FilterSpec::krr(lam));
        Eigen::MatrixXd A = oracle::gaussian_gram(d.xs, d.xs, 0.3) / static_cast<double>(n);
        A.diagonal().array() += lam;
        const Eigen::VectorXd c = A.partialPivLu().solve(d.ys / static_cast<double>(n));
        REQUIRE(oracle::rel_err(r.expansion.coeffs, c) <= 1e-8);
        CHECK(r.weights_used == Eigen::VectorXd::Ones(n));
    }
}

TEST_CASE("property: scaling the weights and lambda together leaves the coefficients unchanged") {
    std::mt19937_64 rng(63);
    for (int trial = 0; trial < 10; ++trial) {
        const LabeledSample d = random_sample(rng, 25);
        const Eigen::VectorXd theta = oracle::random_weights(rng, 25) * 25.0;
        auto base = [&theta](const PointSet&) { return theta; };
        const double gamma = 0.25 + static_cast<double>(rng() % 100) / 25.0;
        auto scaled = [&theta, gamma](const PointSet&) { return Eigen::VectorXd(gamma * theta); };
        const KernelSpec k = KernelSpec::gaussian(0.4);
        const Regressor r1 = fit_iw_spectral(d, base, k, FilterSpec::krr(0.05));
        const Regressor r2 = fit_iw_spectral(d, scaled, k, FilterSpec::krr(0.05 * gamma));
        CHECK(oracle::rel_err(r2.expansion.coeffs, r1.expansion.coeffs) <= 1e-10);
    }
}

TEST_CASE("property: zero-weight points get coefficient zero and can be removed") {
    std::mt19937_64 rng(64);
    for (const FilterSpec& f : {FilterSpec::krr(0.05), FilterSpec::gradient_flow(0.05), FilterSpec::spectral_cutoff(0.05)}) {
        const LabeledSample d = random_sample(rng, 30);
        Eigen::VectorXd theta = oracle::random_weights(rng, 30) * 30.0;
        for (int i = 0; i < 30; i += 3) theta[i] = 0.0;
        const KernelSpec k = KernelSpec::gaussian(0.25);
        const Regressor full = fit_iw_spectral(d, [&theta](const PointSet&) { return theta; }, k, f);
        for (int i = 0; i < 30; i += 3) CHECK(full.expansion.coeffs[i] == 0.0);

        // The kept points with weights rescaled so u = theta / n_f is unchanged.
        std::vector<int> keep;
        for (int i = 0; i < 30; ++i)
            if (theta[i] > 0.0) keep.push_back(i);
        LabeledSample r;
        r.xs.resize(static_cast<Eigen::Index>(keep.size()), 1);
        r.ys.resize(static_cast<Eigen::Index>(keep.size()));
        Eigen::VectorXd kept_theta(static_cast<Eigen::Index>(keep.size()));
        for (std::size_t j = 0; j < keep.size(); ++j) {
            r.xs(static_cast<Eigen::Index>(j), 0) = d.xs(keep[j], 0);
            r.ys[static_cast<Eigen::Index>(j)] = d.ys[keep[j]];
            kept_theta[static_cast<Eigen::Index>(j)] = theta[keep[j]] * static_cast<double>(keep.size()) / 30.0;
        }
        const Regressor reduced =
            fit_iw_spectral(r, [&kept_theta](const PointSet&) { return kept_theta; }, k, f);
        const PointSet q = oracle::random_points(rng, 200, 1, -0.2, 1.2);
        CHECK((full.predict(q) - reduced.predict(q)).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("spectral cutoff equals the eigen-projected least-squares fit") {
    std::mt19937_64 rng(65);
    const Eigen::Index n = 25;
    const LabeledSample d = random_sample(rng, n);
    const Eigen::VectorXd theta = oracle::random_weights(rng, n) * static_cast<double>(n);
    const double lam = 0.02;
    const Regressor r = fit_iw_spectral(d, [&theta](const PointSet&) { return theta; }, KernelSpec::gaussian(0.3),
                                        FilterSpec::spectral_cutoff(lam));

    const Eigen::VectorXd u = theta / static_cast<double>(n);
    const Eigen::VectorXd su = u.cwiseSqrt();
    const Eigen::MatrixXd G = oracle::gaussian_gram(d.xs, d.xs, 0.3);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(su.asDiagonal() * G * su.asDiagonal());
    Eigen::VectorXd inner = Eigen::VectorXd::Zero(n);
    const Eigen::VectorXd rhs = su.cwiseProduct(d.ys);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double ev = es.eigenvalues()[k];
        if (ev >= lam) inner += es.eigenvectors().col(k) * (es.eigenvectors().col(k).dot(rhs) / ev);
    }
    const Eigen::VectorXd c = su.cwiseProduct(inner);
    const PointSet q = oracle::random_points(rng, 100, 1, 0.0, 1.0);
    const Eigen::VectorXd expected = oracle::gaussian_gram(q, d.xs, 0.3) * c;
    CHECK(oracle::rel_err(r.predict(q), expected) <= 1e-8);
}

TEST_CASE("weights must be finite and non-negative") {
    std::mt19937_64 rng(66);
    const LabeledSample d = random_sample(rng, 5);
    const KernelSpec k = KernelSpec::gaussian(0.3);
    CHECK_THROWS_AS(fit_iw_spectral(d, constant_weights(-1.0), k, FilterSpec::krr(0.1)), std::invalid_argument);
    CHECK_THROWS_AS(fit_iw_spectral(d, constant_weights(std::nan("")), k, FilterSpec::krr(0.1)),
                    std::invalid_argument);
    LabeledSample bad = d;
    bad.ys[2] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(fit_iw_spectral(bad, unit_weights(), k, FilterSpec::krr(0.1)), std::invalid_argument);
}

TEST_CASE("large weight mass records the top eigenvalue") {
    LabeledSample d;
    d.xs = points_1d(Eigen::VectorXd::Constant(4, 0.5));
    d.ys = Eigen::VectorXd::Ones(4);
    const Regressor r = fit_iw_spectral(d, constant_weights(3.0), KernelSpec::gaussian(1.0), FilterSpec::krr(0.1));
    REQUIRE(r.lambda_max_above_kappa.has_value());
    CHECK(*r.lambda_max_above_kappa == doctest::Approx(3.0));
    const Regressor plain = fit_iw_spectral(d, unit_weights(), KernelSpec::gaussian(1.0), FilterSpec::krr(0.1));
    CHECK_FALSE(plain.lambda_max_above_kappa.has_value());
}

TEST_CASE("lambda schedule") {
    CHECK(schedule_lambda(10000, 0.25) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(schedule_lambda(1, 0.4) == 1.0);
    CHECK(schedule_lambda(256, 0.25) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK_THROWS_AS(schedule_lambda(100, 0.0), std::invalid_argument);
}

TEST_CASE("exponent selection") {
    CHECK(select_exponent_s(2.0, 0.5, 1.0, 0.01) == doctest::Approx(1.0 / 3.0 - 0.01).epsilon(1e-14));
    CHECK(select_exponent_s(1.0, 0.5, 0.5, 0.01) == doctest::Approx(0.24).epsilon(1e-14));
    CHECK(select_exponent_s(1.0, 0.5, 2.0, 0.01) == doctest::Approx(1.0 / 6.0 - 0.01).epsilon(1e-14));
    // Middle branch: beta = 1, T = 1, r in [1.5, 1.5].
    CHECK(select_exponent_s(1.0, 0.5, 1.5, 0.01) == doctest::Approx(0.25 - 0.01).epsilon(1e-14));
    // beta = 1.5, iota = 1/2: T = 1/3, r = 1/2 < 5/6.
    CHECK(select_exponent_s(1.5, 0.5, 0.5, 0.01) == doctest::Approx(0.365).epsilon(1e-14));
    CHECK_THROWS_AS(select_exponent_s(2.0, 0.5, 1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(select_exponent_s(0.5, 0.5, 1.0, 0.01), std::invalid_argument);
}

TEST_CASE("sample-size diagnostic") {
    SampleSizeInputs in;
    in.n_theta = 10;
    in.n_f = 10;
    const auto small = sample_size_diagnostic(in);
    REQUIRE(small.size() == 3);
    bool any_fail = false;
    for (const auto& c : small) {
        any_fail = any_fail || !c.passes;
        CHECK(c.slack == doctest::Approx(c.lhs - c.rhs));
        CHECK(c.passes == (c.lhs >= c.rhs));
    }
    CHECK(any_fail);
    CHECK_FALSE(small[2].passes);
    CHECK(small[2].rhs >= 85.0);

    double prev = -1e300;
    for (std::size_t n : {10, 100, 1000, 10000, 100000}) {
        in.n_theta = n;
        const double slack = sample_size_diagnostic(in)[0].slack;
        CHECK(slack > prev);
        prev = slack;
    }

    in.n_theta = 10;
    in.delta_phi = 0.0;
    in.xi_m = 0.0;
    CHECK(sample_size_diagnostic(in)[0].passes);
}
