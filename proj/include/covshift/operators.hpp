#pragma once

#include "covshift/kernels.hpp"

#include <Eigen/Dense>

#include <functional>
#include <memory>

namespace covshift {

/// Eigenpairs of the symmetrized operator matrix, eigenvalues in descending
/// order and clipped at zero.
struct Spectrum {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
    /// Smallest eigenvalue before clipping (diagnostic).
    double raw_min = 0.0;
};

/// Relative threshold below which eigenvalues are treated as numerical zeros.
inline constexpr double kEigenClipRelative = 1e-10;

/// Largest operator size for which the symmetrized matrix is materialized
/// for a direct solve. Larger operators use a matrix-free conjugate-gradient
/// route for shifted inverses.
inline constexpr Eigen::Index kDenseSolveLimit = 6000;

/// Finite-sample weighted integral operator
///
///     L f = sum_k w_k f(x_k) K(., x_k)
///
/// acting on kernel expansions over its own points. On coefficient vectors
/// the action is c -> W G c; spectral work happens on the symmetric
/// conjugate B = W^(1/2) G W^(1/2), which has the same nonzero spectrum.
///
/// The Gram matrix, B and the eigendecomposition are computed on first use
/// and cached; copies share the cache. All accessors are safe to call from
/// several threads.
class OperatorRep {
public:
    OperatorRep(PointSet points, Eigen::VectorXd weights, KernelSpec kernel);

    Eigen::Index size() const { return points_.rows(); }
    const PointSet& points() const { return points_; }
    const Eigen::VectorXd& weights() const { return weights_; }
    const Eigen::VectorXd& sqrt_weights() const { return sqrt_weights_; }
    const KernelSpec& kernel() const { return kernel_; }

    const Eigen::MatrixXd& gram() const;
    const Eigen::MatrixXd& sym() const;
    const Spectrum& spectrum() const;
    double lambda_max() const { return size() == 0 ? 0.0 : spectrum().values[0]; }

    /// Coefficient action c -> W G c.
    Eigen::VectorXd apply(const Eigen::VectorXd& coeffs) const;

    /// B v. Uses the cached matrix when it exists, otherwise streams kernel
    /// tiles so memory stays O(n).
    Eigen::VectorXd sym_multiply(const Eigen::VectorXd& v) const;

private:
    struct Cache;

    PointSet points_;
    Eigen::VectorXd weights_;
    Eigen::VectorXd sqrt_weights_;
    KernelSpec kernel_;
    std::shared_ptr<Cache> cache_;
};

/// Validates inputs (equal lengths, finite, non-negative weights).
OperatorRep build_operator(PointSet points, Eigen::VectorXd weights, KernelSpec kernel);

/// Coefficients of g(L) applied to the expansion with coefficients b:
///
///     c = W^(1/2) V g(Lambda) V^T W^(1/2)+ b
///
/// with the entrywise pseudo-inverse of W^(1/2). Exact whenever b lies in the
/// range of W. Throws std::domain_error if g is not finite at an eigenvalue.
Eigen::VectorXd apply_operator_function(const OperatorRep& rep, const std::function<double(double)>& g,
                                        const Eigen::VectorXd& b);

enum class SolverPath { automatic, dense, conjugate_gradient };

/// Same contract as apply_operator_function for g(t) = 1 / (t + shift), but
/// computed by a linear solve on B + shift I instead of an eigendecomposition.
Eigen::VectorXd apply_shifted_inverse(const OperatorRep& rep, double shift, const Eigen::VectorXd& b,
                                      SolverPath path = SolverPath::automatic);

/// f(x) = sum_k c_k K(x, x_k).
struct KernelExpansion {
    PointSet points;
    Eigen::VectorXd coeffs;
    KernelSpec kernel;

    Eigen::VectorXd operator()(const PointSet& queries) const;
};

/// Evaluates an expansion at each query point. Queries are processed in
/// row blocks so large Monte-Carlo samples never build a full cross Gram.
Eigen::VectorXd evaluate_expansion(const KernelExpansion& expansion, const PointSet& queries);

namespace detail {
/// G v for the Gram matrix of `points`, streamed in column tiles.
Eigen::VectorXd kernel_matvec(const KernelSpec& kernel, const PointSet& points, const Eigen::VectorXd& v);
}  // namespace detail

}  // namespace covshift
