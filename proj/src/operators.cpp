#include "covshift/operators.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace covshift {

struct OperatorRep::Cache {
    std::once_flag gram_once;
    std::once_flag sym_once;
    std::once_flag spectrum_once;
    Eigen::MatrixXd gram;
    Eigen::MatrixXd sym;
    Spectrum spectrum;
    bool sym_ready = false;
    std::mutex sym_ready_mutex;
};

OperatorRep::OperatorRep(PointSet points, Eigen::VectorXd weights, KernelSpec kernel)
    : points_(std::move(points)),
      weights_(std::move(weights)),
      kernel_(kernel),
      cache_(std::make_shared<Cache>()) {
    if (points_.rows() != weights_.size()) {
        throw std::invalid_argument("operator: " + std::to_string(points_.rows()) + " points but " +
                                    std::to_string(weights_.size()) + " weights");
    }
    if (!points_.allFinite()) throw std::invalid_argument("operator: non-finite point coordinate");
    for (Eigen::Index k = 0; k < weights_.size(); ++k) {
        if (!std::isfinite(weights_[k])) {
            throw std::invalid_argument("operator: weight " + std::to_string(k) + " is not finite");
        }
        if (weights_[k] < 0.0) {
            throw std::invalid_argument("operator: weight " + std::to_string(k) + " is negative");
        }
    }
    sqrt_weights_ = weights_.cwiseSqrt();
}

const Eigen::MatrixXd& OperatorRep::gram() const {
    std::call_once(cache_->gram_once, [this] { cache_->gram = covshift::gram(kernel_, points_, points_); });
    return cache_->gram;
}

const Eigen::MatrixXd& OperatorRep::sym() const {
    std::call_once(cache_->sym_once, [this] {
        // sqrt(w_i) * sqrt(w_j) is commutative, so B is exactly symmetric.
        cache_->sym = gram().cwiseProduct(sqrt_weights_ * sqrt_weights_.transpose());
        std::lock_guard lock(cache_->sym_ready_mutex);
        cache_->sym_ready = true;
    });
    return cache_->sym;
}

const Spectrum& OperatorRep::spectrum() const {
    std::call_once(cache_->spectrum_once, [this] {
        const Eigen::Index n = size();
        Spectrum& s = cache_->spectrum;
        if (n == 0) return;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym());
        if (solver.info() != Eigen::Success) throw std::runtime_error("operator: eigendecomposition failed");
        s.values = solver.eigenvalues().reverse();
        s.vectors = solver.eigenvectors().rowwise().reverse();
        s.raw_min = s.values[n - 1];
        const double top = std::max(s.values[0], 0.0);
        const double floor = kEigenClipRelative * top;
        for (Eigen::Index k = 0; k < n; ++k) {
            if (s.values[k] < floor || top == 0.0) s.values[k] = 0.0;
        }
    });
    return cache_->spectrum;
}

Eigen::VectorXd OperatorRep::apply(const Eigen::VectorXd& coeffs) const {
    if (coeffs.size() != size()) throw std::invalid_argument("operator apply: coefficient length mismatch");
    Eigen::VectorXd gc = size() <= kDenseSolveLimit ? Eigen::VectorXd(gram() * coeffs)
                                                     : detail::kernel_matvec(kernel_, points_, coeffs);
    return weights_.cwiseProduct(gc);
}

Eigen::VectorXd OperatorRep::sym_multiply(const Eigen::VectorXd& v) const {
    if (v.size() != size()) throw std::invalid_argument("operator sym_multiply: length mismatch");
    bool ready;
    {
        std::lock_guard lock(cache_->sym_ready_mutex);
        ready = cache_->sym_ready;
    }
    if (ready) return cache_->sym * v;
    const Eigen::VectorXd scaled = sqrt_weights_.cwiseProduct(v);
    return sqrt_weights_.cwiseProduct(detail::kernel_matvec(kernel_, points_, scaled));
}

OperatorRep build_operator(PointSet points, Eigen::VectorXd weights, KernelSpec kernel) {
    return OperatorRep(std::move(points), std::move(weights), kernel);
}

namespace {

Eigen::VectorXd pseudo_inverse_scale(const Eigen::VectorXd& sqrt_w, const Eigen::VectorXd& b) {
    Eigen::VectorXd out(b.size());
    for (Eigen::Index k = 0; k < b.size(); ++k) out[k] = sqrt_w[k] > 0.0 ? b[k] / sqrt_w[k] : 0.0;
    return out;
}

Eigen::VectorXd conjugate_gradient(const OperatorRep& rep, double shift, const Eigen::VectorXd& rhs) {
    constexpr double kRelTol = 1e-13;
    const Eigen::Index n = rhs.size();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    const double rhs_norm = rhs.norm();
    if (rhs_norm == 0.0) return x;
    Eigen::VectorXd r = rhs;
    Eigen::VectorXd p = r;
    double rr = r.squaredNorm();
    const Eigen::Index max_iter = std::max<Eigen::Index>(n, 50);
    for (Eigen::Index it = 0; it < max_iter; ++it) {
        const Eigen::VectorXd ap = rep.sym_multiply(p) + shift * p;
        const double step = rr / p.dot(ap);
        x += step * p;
        r -= step * ap;
        const double rr_next = r.squaredNorm();
        if (std::sqrt(rr_next) <= kRelTol * rhs_norm) return x;
        p = r + (rr_next / rr) * p;
        rr = rr_next;
    }
    throw std::runtime_error("conjugate gradient did not converge");
}

}  // namespace

Eigen::VectorXd apply_operator_function(const OperatorRep& rep, const std::function<double(double)>& g,
                                        const Eigen::VectorXd& b) {
    if (b.size() != rep.size()) throw std::invalid_argument("apply_operator_function: coefficient length mismatch");
    if (rep.size() == 0) return {};
    const Spectrum& s = rep.spectrum();
    const double at_zero = g(0.0);
    if (!std::isfinite(at_zero)) throw std::domain_error("filter is not finite at eigenvalue 0");
    Eigen::VectorXd gvals(s.values.size());
    for (Eigen::Index k = 0; k < s.values.size(); ++k) {
        gvals[k] = s.values[k] == 0.0 ? at_zero : g(s.values[k]);
        if (!std::isfinite(gvals[k])) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "filter is not finite at eigenvalue " << s.values[k] << " (index " << k << ")";
            throw std::domain_error(msg.str());
        }
    }
    const Eigen::VectorXd v = pseudo_inverse_scale(rep.sqrt_weights(), b);
    const Eigen::VectorXd projected = s.vectors.transpose() * v;
    const Eigen::VectorXd filtered = s.vectors * gvals.cwiseProduct(projected);
    return rep.sqrt_weights().cwiseProduct(filtered);
}

Eigen::VectorXd apply_shifted_inverse(const OperatorRep& rep, double shift, const Eigen::VectorXd& b,
                                      SolverPath path) {
    if (!(shift > 0.0)) throw std::invalid_argument("apply_shifted_inverse: shift must be positive");
    if (b.size() != rep.size()) throw std::invalid_argument("apply_shifted_inverse: coefficient length mismatch");
    if (rep.size() == 0) return {};
    if (path == SolverPath::automatic) {
        path = rep.size() <= kDenseSolveLimit ? SolverPath::dense : SolverPath::conjugate_gradient;
    }
    const Eigen::VectorXd v = pseudo_inverse_scale(rep.sqrt_weights(), b);
    Eigen::VectorXd solved;
    if (path == SolverPath::dense) {
        Eigen::MatrixXd shifted = rep.sym();
        shifted.diagonal().array() += shift;
        Eigen::LLT<Eigen::MatrixXd> llt(shifted);
        if (llt.info() != Eigen::Success) throw std::runtime_error("apply_shifted_inverse: Cholesky failed");
        solved = llt.solve(v);
    } else {
        solved = conjugate_gradient(rep, shift, v);
    }
    return rep.sqrt_weights().cwiseProduct(solved);
}

Eigen::VectorXd KernelExpansion::operator()(const PointSet& queries) const {
    return evaluate_expansion(*this, queries);
}

Eigen::VectorXd evaluate_expansion(const KernelExpansion& expansion, const PointSet& queries) {
    if (queries.cols() != expansion.points.cols()) {
        throw std::invalid_argument("evaluate_expansion: query dimension " + std::to_string(queries.cols()) +
                                    " does not match expansion dimension " +
                                    std::to_string(expansion.points.cols()));
    }
    if (expansion.coeffs.size() != expansion.points.rows()) {
        throw std::invalid_argument("evaluate_expansion: coefficient count does not match point count");
    }
    constexpr Eigen::Index kBlock = 512;
    const Eigen::Index q = queries.rows();
    Eigen::VectorXd out(q);
    const Eigen::Index n = expansion.points.rows();
    for (Eigen::Index start = 0; start < q; start += kBlock) {
        const Eigen::Index len = std::min(kBlock, q - start);
        const auto block = queries.middleRows(start, len);
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(len);
        // Points along rows of the tile so the long dimension is vectorized.
        for (Eigen::Index p = 0; p < n; p += kBlock) {
            const Eigen::Index plen = std::min(kBlock, n - p);
            const Eigen::MatrixXd k = gram(expansion.kernel, expansion.points.middleRows(p, plen), block);
            acc.noalias() += k.transpose() * expansion.coeffs.segment(p, plen);
        }
        out.segment(start, len) = acc;
    }
    return out;
}

namespace detail {

Eigen::VectorXd kernel_matvec(const KernelSpec& kernel, const PointSet& points, const Eigen::VectorXd& v) {
    constexpr Eigen::Index kTile = 256;
    constexpr Eigen::Index kChunk = 512;  // rows per cache-resident block
    const Eigen::Index n = points.rows();
    Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
    for (Eigen::Index s = 0; s < n; s += kTile) {
        const Eigen::Index b = std::min(kTile, n - s);
        const auto cols = points.middleRows(s, b);
        // Lower block column, rows s..n, one chunk at a time.
        for (Eigen::Index r = s; r < n; r += kChunk) {
            const Eigen::Index len = std::min(kChunk, n - r);
            const Eigen::MatrixXd tile = gram(kernel, points.middleRows(r, len), cols);
            y.segment(r, len).noalias() += tile * v.segment(s, b);
            const Eigen::Index skip = std::max<Eigen::Index>(0, s + b - r);
            if (len > skip) {
                y.segment(s, b).noalias() += tile.bottomRows(len - skip).transpose() * v.segment(r + skip, len - skip);
            }
        }
    }
    return y;
}

}  // namespace detail

}  // namespace covshift
