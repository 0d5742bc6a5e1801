#pragma once

#include <Eigen/Dense>

#include <string>

namespace covshift {

/// A set of points stored one per row (n x d).
using PointSet = Eigen::MatrixXd;

enum class KernelFamily { gaussian, laplacian };

/// Bounded Mercer kernel. Both shipped families are translation invariant
/// with K(x, x) = 1, so the uniform bound kappa^2 is exactly 1.
struct KernelSpec {
    KernelFamily family = KernelFamily::gaussian;
    double bandwidth = 1.0;

    static KernelSpec gaussian(double bandwidth);
    static KernelSpec laplacian(double bandwidth);

    /// K(x, y) for two points given as row vectors of a common length.
    double operator()(const Eigen::Ref<const Eigen::RowVectorXd>& x,
                      const Eigen::Ref<const Eigen::RowVectorXd>& y) const;

    std::string name() const;
};

KernelFamily parse_kernel_family(const std::string& name);

/// Uniform diagonal bound sup_x K(x, x).
double kappa_sq(const KernelSpec& kernel);

/// Cross Gram matrix with entry (i, j) = K(rows_i, cols_j).
///
/// Entries are computed per pair from the coordinate differences, so
/// gram(k, A, B) equals gram(k, B, A).transpose() bit for bit.
Eigen::MatrixXd gram(const KernelSpec& kernel, const PointSet& rows, const PointSet& cols);

/// Make a one-dimensional point set from a list of scalars.
PointSet points_1d(const Eigen::Ref<const Eigen::VectorXd>& xs);

}  // namespace covshift
