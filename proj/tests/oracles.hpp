#pragma once

// Reference computations written independently of the library's linear
// algebra paths: plain loops, std::exp, dense LU solves.

#include <Eigen/Dense>

#include <cmath>
#include <random>

namespace oracle {

inline Eigen::MatrixXd gaussian_gram(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double bw) {
    Eigen::MatrixXd g(a.rows(), b.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < b.rows(); ++j) {
            double sq = 0.0;
            for (Eigen::Index k = 0; k < a.cols(); ++k) sq += (a(i, k) - b(j, k)) * (a(i, k) - b(j, k));
            g(i, j) = std::exp(-sq / (2.0 * bw * bw));
        }
    }
    return g;
}

inline Eigen::MatrixXd random_points(std::mt19937_64& rng, Eigen::Index n, Eigen::Index d, double lo = -2.0,
                                     double hi = 2.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    Eigen::MatrixXd p(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = 0; k < d; ++k) p(i, k) = u(rng);
    return p;
}

inline Eigen::VectorXd random_weights(std::mt19937_64& rng, Eigen::Index n, double lo = 0.1, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) w[i] = u(rng);
    return w / w.sum();
}

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index n) {
    std::normal_distribution<double> g;
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = g(rng);
    return v;
}

/// (W G + lam I)^-1 b by LU.
inline Eigen::VectorXd krr_direct(const Eigen::MatrixXd& G, const Eigen::VectorXd& w, double lam,
                                  const Eigen::VectorXd& b) {
    Eigen::MatrixXd A = w.asDiagonal() * G;
    A.diagonal().array() += lam;
    return A.partialPivLu().solve(b);
}

/// z(T) for z' = b - W G z, z(0) = 0, T = 1 / lam, by explicit Euler with
/// step 1e-4 lam / lam_max.
inline Eigen::VectorXd gradient_flow_euler(const Eigen::MatrixXd& G, const Eigen::VectorXd& w, double lam,
                                           const Eigen::VectorXd& b) {
    const Eigen::MatrixXd A = w.asDiagonal() * G;
    const double top = A.eigenvalues().real().maxCoeff();
    const double T = 1.0 / lam;
    const long steps = static_cast<long>(std::ceil(T / (1e-4 * lam / top)));
    const double h = T / static_cast<double>(steps);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(b.size());
    for (long s = 0; s < steps; ++s) z += h * (b - A * z);
    return z;
}

inline double rel_err(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const double scale = std::max(b.norm(), 1e-300);
    return (a - b).norm() / scale;
}

}  // namespace oracle
