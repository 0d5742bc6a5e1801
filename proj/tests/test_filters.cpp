#include "covshift/filters.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

using namespace covshift;

TEST_CASE("filter values") {
    CHECK(filter_value(FilterSpec::krr(1.0), 1.0) == 0.5);
    CHECK(filter_value(FilterSpec::spectral_cutoff(1.0), 0.5) == 0.0);
    CHECK(filter_value(FilterSpec::spectral_cutoff(1.0), 1.0) == 1.0);
    CHECK(filter_value(FilterSpec::gradient_flow(1.0), 1e-12) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(filter_value(FilterSpec::gradient_flow(0.5), 0.0) == 2.0);
    CHECK(filter_value(FilterSpec::gradient_flow(0.5), 1.0) == doctest::Approx(1.0 - std::exp(-2.0)));
    // Both sides of the series crossover.
    const FilterSpec gf = FilterSpec::gradient_flow(1.0);
    CHECK(filter_value(gf, 0.99e-6) == doctest::Approx(-std::expm1(-0.99e-6) / 0.99e-6).epsilon(1e-14));
    CHECK(filter_value(gf, 1.01e-6) == doctest::Approx(-std::expm1(-1.01e-6) / 1.01e-6).epsilon(1e-12));
}

TEST_CASE("declared constants per family") {
    const FilterSpec k = FilterSpec::krr(0.1);
    CHECK(k.tau == 1.0);
    CHECK(k.E == 1.0);
    CHECK(k.F == 1.0);
    const FilterSpec c = FilterSpec::spectral_cutoff(0.1, 3.0);
    CHECK(c.tau == 3.0);
    CHECK(c.E == 1.0);
    CHECK(c.F == 1.0);
    CHECK(FilterSpec::gradient_flow(0.1, 2.0).F == 1.0);
    CHECK(gradient_flow_residual_constant(5.0) == doctest::Approx(std::pow(5.0 / std::exp(1.0), 5.0)));
    CHECK(gradient_flow_residual_constant(std::exp(1.0)) == doctest::Approx(1.0));
    CHECK_THROWS_AS(FilterSpec::krr(0.0), std::invalid_argument);
    CHECK_THROWS_AS(FilterSpec::gradient_flow(0.1, 0.5), std::invalid_argument);
    CHECK(parse_filter_family("spectral_cutoff") == FilterFamily::spectral_cutoff);
    CHECK(filter_family_name(FilterFamily::gradient_flow) == "gradient_flow");
    CHECK_THROWS_AS(parse_filter_family("landweber"), std::invalid_argument);
}

TEST_CASE("filter conditions hold for the shipped constants") {
    for (const FilterSpec& spec : {FilterSpec::krr(1.0), FilterSpec::gradient_flow(1.0, 2.0),
                                   FilterSpec::spectral_cutoff(1.0, 2.0), FilterSpec::gradient_flow(1.0, 5.0)}) {
        const FilterCheckReport r = check_filter_conditions(spec, FilterCheckGrids::standard(spec.tau));
        CHECK(r.passes);
        CHECK(r.worst_margin >= -1e-9);
    }
}

TEST_CASE("gradient flow with F = (2/e)^2 violates the residual condition at c = 0") {
    FilterSpec spec = FilterSpec::gradient_flow(1.0, 2.0);
    spec.F = std::pow(2.0 / std::exp(1.0), 2.0);
    const FilterCheckReport r = check_filter_conditions(spec, FilterCheckGrids::standard(2.0));
    CHECK_FALSE(r.passes);
    CHECK(r.witness_condition == 2);
    CHECK(r.witness_c == 0.0);
}

TEST_CASE("krr with a falsely declared qualification fails near t = kappa^2") {
    FilterSpec spec = FilterSpec::krr(1.0);
    spec.tau = 2.0;
    const FilterCheckReport r = check_filter_conditions(spec, FilterCheckGrids::standard(2.0));
    CHECK_FALSE(r.passes);
    CHECK(r.witness_condition == 2);
    CHECK(r.witness_lambda == 1e-3);
    CHECK(r.witness_t >= 0.5);
    // sup_t t^2 lam / (t + lam) on [0, 1] is lam / (1 + lam), far above F lam^2.
    CHECK(r.worst_margin == doctest::Approx(1.0 - (1e-3 / 1.001) / 1e-6).epsilon(1e-6));
}

TEST_CASE("check grids") {
    const FilterCheckGrids g = FilterCheckGrids::standard(2.0);
    CHECK(g.c_cond1.size() == 50);
    CHECK(g.c_cond2.size() == 50);
    CHECK(g.c_cond1.back() == 1.0);
    CHECK(g.c_cond2.back() == 2.0);
    CHECK(g.t.size() == 200);
    CHECK(g.t.front() == doctest::Approx(1e-8));
    CHECK(g.t.back() == 1.0);
    CHECK(g.lambdas == std::vector<double>{1e-3, 1e-2, 1e-1, 1.0});
}

TEST_CASE("property: residual stays within [0, 1]") {
    for (double lam : {1e-3, 1e-2, 0.1, 1.0}) {
        for (const FilterSpec& spec : {FilterSpec::krr(lam), FilterSpec::gradient_flow(lam),
                                       FilterSpec::spectral_cutoff(lam)}) {
            for (int i = 0; i <= 10000; ++i) {
                const double t = std::pow(10.0, -10.0 + 10.0 * i / 10000.0);
                const double g = filter_value(spec, t);
                REQUIRE(g >= 0.0);
                REQUIRE(t * g <= 1.0 + 1e-12);
            }
        }
    }
}

TEST_CASE("krr filter matches a direct solve") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng() % 50);
        const PointSet p = oracle::random_points(rng, n, 1);
        const Eigen::VectorXd w = oracle::random_weights(rng, n);
        const double lam = std::pow(10.0, -3.0 + 3.0 * static_cast<double>(rng() % 1000) / 1000.0);
        const OperatorRep rep(p, w, KernelSpec::gaussian(0.7));
        const Eigen::VectorXd b = oracle::random_vector(rng, n);
        const Eigen::VectorXd direct = oracle::krr_direct(oracle::gaussian_gram(p, p, 0.7), w, lam, b);
        REQUIRE(oracle::rel_err(apply_filter(rep, FilterSpec::krr(lam), b), direct) <= 1e-8);
    }
}

TEST_CASE("gradient flow filter matches the integrated ODE") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 5; ++trial) {
        const PointSet p = oracle::random_points(rng, 5, 1);
        const Eigen::VectorXd w = oracle::random_weights(rng, 5);
        const OperatorRep rep(p, w, KernelSpec::gaussian(1.0));
        const Eigen::VectorXd b = w.cwiseProduct(oracle::random_vector(rng, 5));
        const double lam = 0.2;
        const Eigen::VectorXd ode = oracle::gradient_flow_euler(oracle::gaussian_gram(p, p, 1.0), w, lam, b);
        CHECK(oracle::rel_err(apply_filter(rep, FilterSpec::gradient_flow(lam), b), ode) <= 1e-4);
    }
}

TEST_CASE("spectral cutoff acts as a projection after the operator") {
    std::mt19937_64 rng(43);
    const Eigen::Index n = 30;
    const PointSet p = oracle::random_points(rng, n, 1);
    const Eigen::VectorXd w = oracle::random_weights(rng, n);
    const OperatorRep rep(p, w, KernelSpec::gaussian(0.5));
    const Eigen::VectorXd b = w.cwiseProduct(oracle::random_vector(rng, n));
    const double lam = 0.01;
    const Eigen::VectorXd c = apply_filter(rep, FilterSpec::spectral_cutoff(lam), b);

    // Independent projector onto eigenvectors of W^(1/2) G W^(1/2) with eigenvalue >= lam.
    const Eigen::VectorXd sw = w.cwiseSqrt();
    const Eigen::MatrixXd B = sw.asDiagonal() * oracle::gaussian_gram(p, p, 0.5) * sw.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
    int kept = 0;
    for (Eigen::Index k = 0; k < n; ++k) {
        if (es.eigenvalues()[k] >= lam) {
            P += es.eigenvectors().col(k) * es.eigenvectors().col(k).transpose();
            ++kept;
        }
    }
    REQUIRE(kept > 0);
    REQUIRE(kept < n);
    const Eigen::VectorXd expected = sw.asDiagonal() * (P * b.cwiseQuotient(sw));
    CHECK(oracle::rel_err(rep.apply(c), expected) <= 1e-10);
}
