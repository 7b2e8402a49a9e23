#ifndef SURROFIT_TRANSFORM_HPP
#define SURROFIT_TRANSFORM_HPP

#include <algorithm>
#include <string>
#include <vector>

#include "surrofit/dataset.hpp"
#include "surrofit/numerics.hpp"
#include "surrofit/testbed.hpp"

namespace surrofit {

enum class Provenance {
    GradientSr1,
    FunctionQuadratic,
    KrigingScale,
    MinMax,
    Ideal,
    Identity,
};

inline const char* to_string(Provenance p) {
    switch (p) {
        case Provenance::GradientSr1: return "gradient-SR1";
        case Provenance::FunctionQuadratic: return "function-quadratic";
        case Provenance::KrigingScale: return "kriging-scale";
        case Provenance::MinMax: return "minmax";
        case Provenance::Ideal: return "ideal";
        case Provenance::Identity: return "identity";
    }
    return "identity";
}

inline Provenance provenance_from_string(const std::string& s) {
    for (Provenance p : {Provenance::GradientSr1, Provenance::FunctionQuadratic,
                         Provenance::KrigingScale, Provenance::MinMax, Provenance::Ideal,
                         Provenance::Identity})
        if (s == to_string(p)) return p;
    throw InvalidArgumentError("unknown transform provenance: " + s);
}

/// Global linear change of coordinates: x_hat = diag(s) V^T x with V
/// orthogonal (columns are eigenvector directions) and s positive scales.
/// Gradients move with the inverse-transpose map, so a chain rule through
/// forward/inverse is exact.
struct DomainTransform {
    int dim = 0;
    Matrix rotation;  // V
    Vector scales;    // s
    Provenance provenance = Provenance::Identity;
    bool degenerate = false;  // set when no usable curvature information existed

    static DomainTransform identity(int dim) {
        DomainTransform t;
        t.dim = dim;
        t.rotation = Matrix::Identity(dim, dim);
        t.scales = Vector::Ones(dim);
        return t;
    }

    Vector forward(const Vector& x) const {
        return scales.cwiseProduct(rotation.transpose() * x);
    }

    Vector inverse(const Vector& xh) const {
        return rotation * xh.cwiseQuotient(scales);
    }

    /// Gradient of f in the transformed frame given its gradient in the
    /// original frame: grad_hat = diag(1/s) V^T g, i.e. g S^{-1} R^T in the
    /// row convention. Equal by the chain rule on x = V diag(1/s) x_hat.
    Vector transform_gradient(const Vector& g) const {
        return (rotation.transpose() * g).cwiseQuotient(scales);
    }

    // Row-wise batch versions; rows are points / gradients.
    Matrix forward_points(const Matrix& pts) const {
        return pts * rotation * scales.asDiagonal();
    }
    Matrix inverse_points(const Matrix& pts) const {
        return pts * scales.cwiseInverse().asDiagonal() * rotation.transpose();
    }
    Matrix transform_gradients(const Matrix& grads) const {
        return grads * rotation * scales.cwiseInverse().asDiagonal();
    }

    void validate() const {
        if (dim < 1 || rotation.rows() != dim || rotation.cols() != dim ||
            scales.size() != dim)
            throw InvalidArgumentError("DomainTransform: inconsistent sizes");
        if (((rotation.transpose() * rotation) - Matrix::Identity(dim, dim))
                .cwiseAbs()
                .maxCoeff() > 1e-10)
            throw InvalidArgumentError("DomainTransform: rotation not orthogonal");
        for (int i = 0; i < dim; ++i)
            if (!(scales[i] > 0.0) || !std::isfinite(scales[i]))
                throw InvalidArgumentError("DomainTransform: scales must be positive");
    }
};

/// Local curvature estimate around one sampled point.
struct LocalHessianEstimate {
    Vector center;
    SymMatrix h;
    enum class Method { Sr1, Quadfit } method = Method::Sr1;
    std::vector<int> support;  // dataset indices that informed the estimate
    bool degenerate = false;   // no update/fit actually constrained the result
    bool ridged = false;       // quadratic fit needed ridge regularization
};

class InsufficientDataError : public NumericsError {
public:
    using NumericsError::NumericsError;
};

namespace detail {

/// Per-dimension spans of the dataset, used to put neighbor distances on a
/// common footing regardless of raw units. Zero span (all points equal in a
/// dimension) falls back to 1 so the metric stays defined.
inline Vector span_scales(const Matrix& pts) {
    Vector lo = pts.colwise().minCoeff();
    Vector hi = pts.colwise().maxCoeff();
    Vector r = hi - lo;
    for (int k = 0; k < r.size(); ++k)
        if (!(r[k] > 0.0)) r[k] = 1.0;
    return r;
}

/// Indices of the `count` nearest points to row `center` (itself included,
/// distance 0) under the span-scaled metric, ascending by (distance, index).
inline std::vector<int> nearest_indices(const Matrix& pts, int center, int count,
                                        const Vector& spans) {
    const int p = static_cast<int>(pts.rows());
    std::vector<std::pair<double, int>> order(p);
    for (int i = 0; i < p; ++i) {
        const Vector d = (pts.row(i) - pts.row(center)).transpose().cwiseQuotient(spans);
        order[i] = {d.squaredNorm(), i};
    }
    std::partial_sort(order.begin(), order.begin() + count, order.end());
    std::vector<int> idx(count);
    for (int i = 0; i < count; ++i) idx[i] = order[i].second;
    return idx;
}

} // namespace detail

/// Estimate the Hessian at dataset point `center` by chaining symmetric
/// rank-one updates over the N+1 nearest points (the center itself among
/// them), visited from furthest to closest. Each neighbor contributes the
/// secant pair step = x_c - x_nb, y = grad(x_c) - grad(x_nb). Updates whose
/// denominator fails the usual SR1 guard are skipped; if every update is
/// skipped the estimate degenerates to the identity seed and is flagged.
inline LocalHessianEstimate sr1_hessian(int center, const Dataset& data) {
    data.validate();
    if (!data.has_gradients())
        throw InvalidArgumentError("sr1_hessian: dataset has no gradients");
    const int n = data.dim();
    const int p = data.size();
    if (center < 0 || center >= p) throw InvalidArgumentError("sr1_hessian: bad center index");
    if (p < n + 1)
        throw InsufficientDataError("sr1_hessian: need at least dim+1 points");

    const Vector spans = detail::span_scales(data.points);
    std::vector<int> sel = detail::nearest_indices(data.points, center, n + 1, spans);
    std::vector<int> neighbors;
    for (int i : sel)
        if (i != center) neighbors.push_back(i);
    std::reverse(neighbors.begin(), neighbors.end());  // furthest first

    const Vector xc = data.points.row(center).transpose();
    const Vector gc = data.gradients.row(center).transpose();

    Matrix h = Matrix::Identity(n, n);
    int applied = 0;
    for (int nb : neighbors) {
        const Vector step = xc - data.points.row(nb).transpose();
        const Vector y = gc - data.gradients.row(nb).transpose();
        const Vector v = y - h * step;
        const double denom = v.dot(step);
        if (std::abs(denom) < 1e-8 * v.norm() * step.norm() || denom == 0.0) continue;
        h += (v * v.transpose()) / denom;  // rank-1 term is exactly symmetric
        ++applied;
    }

    LocalHessianEstimate est;
    est.center = xc;
    est.method = LocalHessianEstimate::Method::Sr1;
    est.support = std::move(sel);
    if (applied == 0) {
        est.h = SymMatrix::identity(n);
        est.degenerate = true;
    } else {
        est.h = SymMatrix::from_dense(h);
    }
    if (!est.h.all_finite())
        throw NumericsError("sr1_hessian: non-finite estimate");
    return est;
}

/// Estimate the Hessian at dataset point `center` from function values only:
/// interpolate a full quadratic (1 + 2N + N(N-1)/2 unknowns, so cross terms
/// included) through exactly that many nearest points, then read the
/// curvature off the fitted coefficients. The fit uses coordinates shifted
/// to the center, which leaves the quadratic part untouched but keeps the
/// system well scaled. A singular cluster falls back to a ridge solve and
/// flags the estimate.
inline LocalHessianEstimate quadfit_hessian(int center, const Dataset& data) {
    data.validate();
    const int n = data.dim();
    const int p = data.size();
    if (center < 0 || center >= p)
        throw InvalidArgumentError("quadfit_hessian: bad center index");
    const int kq = 1 + 2 * n + n * (n - 1) / 2;
    if (p < kq)
        throw InsufficientDataError("quadfit_hessian: need at least " + std::to_string(kq) +
                                    " points");

    const Vector spans = detail::span_scales(data.points);
    std::vector<int> sel = detail::nearest_indices(data.points, center, kq, spans);
    const Vector xc = data.points.row(center).transpose();

    // Columns: x_i x_j for i<j, then x_i^2, then x_i, then 1.
    Matrix m(kq, kq);
    Vector rhs(kq);
    for (int r = 0; r < kq; ++r) {
        const Vector x = data.points.row(sel[r]).transpose() - xc;
        int c = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) m(r, c++) = x[i] * x[j];
        for (int i = 0; i < n; ++i) m(r, c++) = x[i] * x[i];
        for (int i = 0; i < n; ++i) m(r, c++) = x[i];
        m(r, c) = 1.0;
        rhs[r] = data.values[sel[r]];
    }

    Vector w;
    bool ridged = false;
    try {
        w = solve_linear(m, rhs);
    } catch (const IllConditionedError&) {
        const Matrix mtm = m.transpose() * m;
        const double lambda = 1e-10 * mtm.trace() / kq;
        w = (mtm + lambda * Matrix::Identity(kq, kq)).ldlt().solve(m.transpose() * rhs);
        ridged = true;
    }

    LocalHessianEstimate est;
    est.center = xc;
    est.method = LocalHessianEstimate::Method::Quadfit;
    est.support = std::move(sel);
    est.ridged = ridged;
    est.h = SymMatrix(n);
    int c = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) est.h(i, j) = w[c++];
    for (int i = 0; i < n; ++i) est.h(i, i) = 2.0 * w[c++];
    if (!est.h.all_finite())
        throw NumericsError("quadfit_hessian: non-finite estimate");
    return est;
}

/// Saddle-free rectification: rebuild H from its eigenpairs with the
/// eigenvalues replaced by their absolute values. Result is PSD and shares
/// eigenvectors with the input.
inline SymMatrix rectify(const SymMatrix& h) {
    const EigenDecomposition d = sym_eig(h);
    return SymMatrix::from_dense(d.eigenvectors * d.eigenvalues.cwiseAbs().asDiagonal() *
                                 d.eigenvectors.transpose());
}

/// Mean of the rectified local estimates, in list order.
inline SymMatrix average_hessian(const std::vector<LocalHessianEstimate>& estimates) {
    if (estimates.empty())
        throw InvalidArgumentError("average_hessian: no estimates");
    SymMatrix sum = SymMatrix::zero(estimates.front().h.dim());
    for (const auto& e : estimates) sum += rectify(e.h);
    sum *= 1.0 / static_cast<double>(estimates.size());
    return sum;
}

/// Eigendecompose an averaged (rectified) curvature matrix into a transform:
/// V = eigenvectors, s_i = sqrt(lambda_i) with a relative floor so flat
/// directions never produce infinite scaling.
inline DomainTransform transform_from_hessian(const SymMatrix& h_avg, Provenance prov) {
    const EigenDecomposition d = sym_eig(h_avg);
    const double top = d.eigenvalues.maxCoeff();
    const double floor_val = top > 0.0 ? 1e-8 * top : 1.0;
    DomainTransform t;
    t.dim = h_avg.dim();
    t.rotation = d.eigenvectors;
    t.scales = d.eigenvalues.cwiseMax(floor_val).cwiseSqrt();
    t.provenance = prov;
    t.validate();
    return t;
}

/// Combine precomputed local estimates into a transform. Degenerate
/// estimates carry no curvature information and are left out of the average;
/// when nothing usable remains the transform falls back to identity and is
/// flagged.
inline DomainTransform build_transform(const std::vector<LocalHessianEstimate>& estimates,
                                       Provenance prov) {
    if (estimates.empty())
        throw InvalidArgumentError("build_transform: no estimates");
    std::vector<LocalHessianEstimate> usable;
    usable.reserve(estimates.size());
    for (const auto& e : estimates)
        if (!e.degenerate) usable.push_back(e);
    if (usable.empty()) {
        DomainTransform t = DomainTransform::identity(estimates.front().h.dim());
        t.provenance = prov;
        t.degenerate = true;
        return t;
    }
    return transform_from_hessian(average_hessian(usable), prov);
}

/// One-pass transform construction from sampled data: a local Hessian per
/// sampled point (gradient chains when gradients exist, local quadratic fits
/// otherwise), rectified, averaged, eigendecomposed.
inline DomainTransform build_transform(const Dataset& data) {
    data.validate();
    std::vector<LocalHessianEstimate> estimates;
    estimates.reserve(data.size());
    const bool grad = data.has_gradients();
    for (int i = 0; i < data.size(); ++i)
        estimates.push_back(grad ? sr1_hessian(i, data) : quadfit_hessian(i, data));
    return build_transform(estimates,
                           grad ? Provenance::GradientSr1 : Provenance::FunctionQuadratic);
}

/// Reference transform for a sinusoid embedded via x_hat = R S x: the
/// average rectified curvature of the wrapped function is known in closed
/// form, R diag(m_i / S_i^2) R^T with m_i the mean absolute curvature of
/// axis i over the unit cube, so the transform can be built without any
/// sampling. Used as the ground-truth baseline in sweeps.
inline DomainTransform ideal_transform(const SinusoidSpec& spec, const Matrix& r_applied,
                                       const Vector& s_applied) {
    const int n = spec.dim();
    if (r_applied.rows() != n || r_applied.cols() != n || s_applied.size() != n)
        throw InvalidArgumentError("ideal_transform: frame dimensions mismatch");
    if (((r_applied.transpose() * r_applied) - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() >
        1e-8)
        throw InvalidArgumentError("ideal_transform: R is not orthogonal");
    const Vector m = sinusoid_mean_abs_curvature(spec);
    const Vector lam = m.cwiseQuotient(s_applied.cwiseProduct(s_applied));
    const Matrix h = r_applied * lam.asDiagonal() * r_applied.transpose();
    DomainTransform t = transform_from_hessian(SymMatrix::from_dense(h), Provenance::Ideal);
    return t;
}

} // namespace surrofit

#endif
