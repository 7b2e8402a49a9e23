#ifndef SURROFIT_SURROGATE_HPP
#define SURROFIT_SURROGATE_HPP

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "surrofit/dataset.hpp"
#include "surrofit/numerics.hpp"
#include "surrofit/rng.hpp"
#include "surrofit/transform.hpp"

namespace surrofit {

enum class SurrogateKind { Polynomial, GePolynomial, Rbf, GeRbf, Kriging };

inline const char* to_string(SurrogateKind k) {
    switch (k) {
        case SurrogateKind::Polynomial: return "polynomial";
        case SurrogateKind::GePolynomial: return "ge-polynomial";
        case SurrogateKind::Rbf: return "rbf";
        case SurrogateKind::GeRbf: return "ge-rbf";
        case SurrogateKind::Kriging: return "kriging";
    }
    return "rbf";
}

inline SurrogateKind surrogate_kind_from_string(const std::string& s) {
    for (SurrogateKind k : {SurrogateKind::Polynomial, SurrogateKind::GePolynomial,
                            SurrogateKind::Rbf, SurrogateKind::GeRbf, SurrogateKind::Kriging})
        if (s == to_string(k)) return k;
    throw InvalidArgumentError("unknown surrogate kind: " + s);
}

namespace detail {

/// Squared Euclidean distances between row sets, m x k. The expansion
/// |a|^2 + |b|^2 - 2 a.b can dip a hair below zero; clamp it.
inline Matrix sqdist(const Matrix& a, const Matrix& b) {
    const Vector a2 = a.rowwise().squaredNorm();
    const Vector b2 = b.rowwise().squaredNorm();
    Matrix d2 = (-2.0 * a * b.transpose());
    d2.colwise() += a2;
    d2.rowwise() += b2.transpose();
    return d2.cwiseMax(0.0);
}

/// Gaussian kernel matrix phi_ij = exp(-eps |a_i - c_j|^2).
inline Matrix rbf_matrix(const Matrix& a, const Matrix& centers, double eps) {
    return (-eps * sqdist(a, centers)).array().exp();
}

/// Rows of basis-gradient equations for the Gaussian kernel, grouped per
/// point: row (i*dim + m) holds d phi_j / d x_m at point i, i.e.
/// -2 eps (x_im - c_jm) phi_j(x_i).
inline Matrix rbf_grad_rows(const Matrix& pts, const Matrix& centers, double eps) {
    const int p = static_cast<int>(pts.rows());
    const int k = static_cast<int>(centers.rows());
    const int dim = static_cast<int>(pts.cols());
    const Matrix phi = rbf_matrix(pts, centers, eps);
    Matrix g(p * dim, k);
    for (int i = 0; i < p; ++i)
        for (int m = 0; m < dim; ++m)
            for (int j = 0; j < k; ++j)
                g(i * dim + m, j) = -2.0 * eps * (pts(i, m) - centers(j, m)) * phi(i, j);
    return g;
}

/// Per-dimension power basis without coupling terms. Columns are
/// x_1^1..x_d^1, x_1^2..x_d^2, ..., then the constant; K = order*dim + 1.
inline Matrix poly_basis(const Matrix& pts, int order) {
    const int p = static_cast<int>(pts.rows());
    const int dim = static_cast<int>(pts.cols());
    Matrix b(p, order * dim + 1);
    Matrix pow = Matrix::Ones(p, dim);
    for (int j = 0; j < order; ++j) {
        pow = pow.cwiseProduct(pts);
        b.block(0, j * dim, p, dim) = pow;
    }
    b.col(order * dim).setOnes();
    return b;
}

/// Gradient rows of the power basis, grouped per point like rbf_grad_rows.
inline Matrix poly_basis_grad_rows(const Matrix& pts, int order) {
    const int p = static_cast<int>(pts.rows());
    const int dim = static_cast<int>(pts.cols());
    Matrix g = Matrix::Zero(p * dim, order * dim + 1);
    for (int i = 0; i < p; ++i)
        for (int j = 1; j <= order; ++j)
            for (int m = 0; m < dim; ++m)
                g(i * dim + m, (j - 1) * dim + m) = j * std::pow(pts(i, m), j - 1);
    return g;
}

} // namespace detail

/// Fitted model. Predictions take points in the original frame and map them
/// through the owning transform before evaluating the basis expansion.
struct Surrogate {
    SurrogateKind kind = SurrogateKind::Rbf;
    DomainTransform transform;
    Matrix centers;      // K x dim in the transformed frame (empty for polynomial)
    Vector weights;      // basis weights (Kriging: correlation weights)
    int flexibility = 0; // number of basis functions K

    int order = 0;       // polynomial only
    double epsilon = 0.0;// rbf shape
    Vector eps_vector;   // kriging per-dimension shapes
    double mu = 0.0;     // kriging trend
    double sigma2 = 0.0; // kriging process variance

    bool ridged = false;         // square solve needed ridge regularization
    bool rank_deficient = false; // least-squares system lost rank
    bool nugget = false;         // kriging correlation needed a diagonal nugget

    /// Batch prediction, one value per row of `pts` (original frame).
    /// Evaluation is chunked so huge test clouds never materialize a full
    /// kernel matrix.
    Vector predict_many(const Matrix& pts) const {
        const Eigen::Index m = pts.rows();
        Vector out(m);
        constexpr Eigen::Index chunk = 4096;
        for (Eigen::Index at = 0; at < m; at += chunk) {
            const Eigen::Index len = std::min(chunk, m - at);
            const Matrix xh = transform.forward_points(pts.middleRows(at, len));
            out.segment(at, len) = eval_in_frame(xh);
        }
        return out;
    }

    double predict(const Vector& x) const {
        Matrix row(1, x.size());
        row.row(0) = x.transpose();
        return predict_many(row)[0];
    }

private:
    Vector eval_in_frame(const Matrix& xh) const {
        switch (kind) {
            case SurrogateKind::Polynomial:
            case SurrogateKind::GePolynomial:
                return detail::poly_basis(xh, order) * weights;
            case SurrogateKind::Rbf:
            case SurrogateKind::GeRbf:
                return detail::rbf_matrix(xh, centers, epsilon) * weights;
            case SurrogateKind::Kriging: {
                const Vector root = eps_vector.cwiseSqrt();
                const Matrix a = xh * root.asDiagonal();
                const Matrix c = centers * root.asDiagonal();
                Vector v = (-detail::sqdist(a, c)).array().exp().matrix() * weights;
                v.array() += mu;
                return v;
            }
        }
        throw NumericsError("predict: unknown surrogate kind");
    }
};

/// Least-squares polynomial without coupling terms; K = order*dim + 1
/// unknowns. Gradient enhancement stacks one gradient equation per point and
/// dimension under the value equations.
inline Surrogate fit_polynomial(const Dataset& data, int order, bool gradient_enhanced,
                                const DomainTransform& frame) {
    data.validate();
    frame.validate();
    if (order < 1) throw InvalidArgumentError("fit_polynomial: order must be >= 1");
    if (gradient_enhanced && !data.has_gradients())
        throw InvalidArgumentError("fit_polynomial: no gradients in dataset");
    const int p = data.size();
    const int dim = data.dim();
    const int k = order * dim + 1;
    const int rows = gradient_enhanced ? p * (1 + dim) : p;
    if (rows < k)
        throw InsufficientDataError("fit_polynomial: " + std::to_string(rows) +
                                    " equations for " + std::to_string(k) + " unknowns");

    const Matrix xh = frame.forward_points(data.points);
    Matrix a(rows, k);
    Vector rhs(rows);
    a.topRows(p) = detail::poly_basis(xh, order);
    rhs.head(p) = data.values;
    if (gradient_enhanced) {
        a.bottomRows(p * dim) = detail::poly_basis_grad_rows(xh, order);
        const Matrix gh = frame.transform_gradients(data.gradients);
        for (int i = 0; i < p; ++i)
            rhs.segment(p + i * dim, dim) = gh.row(i).transpose();
    }

    const LeastSquaresSolution sol = solve_least_squares(a, rhs);
    Surrogate s;
    s.kind = gradient_enhanced ? SurrogateKind::GePolynomial : SurrogateKind::Polynomial;
    s.transform = frame;
    s.weights = sol.x;
    s.flexibility = k;
    s.order = order;
    s.rank_deficient = sol.rank_deficient;
    return s;
}

struct RbfConfig {
    double epsilon = 0.0;       // > 0: fixed shape; 0: choose via LOOCV
    std::vector<double> grid;   // candidates when choosing automatically

    void validate() const {
        if (epsilon > 0.0) return;
        if (grid.empty())
            throw InvalidArgumentError("RbfConfig: auto shape needs a candidate grid");
        for (double e : grid)
            if (!(e > 0.0)) throw InvalidArgumentError("RbfConfig: candidates must be positive");
    }
};

/// 41 log-uniform shape candidates spanning [1e-2, 1e2].
inline std::vector<double> default_epsilon_grid() {
    std::vector<double> g(41);
    for (int i = 0; i < 41; ++i) g[i] = std::pow(10.0, -2.0 + 4.0 * i / 40.0);
    return g;
}

struct RippaCandidate {
    double epsilon = 0.0;
    double error = 0.0;  // mean of the signed closed-form LOO residuals
    bool valid = false;
};

struct RippaResult {
    double best_epsilon = 0.0;
    int best_index = -1;
    std::vector<RippaCandidate> curve;
};

// Kernel matrices flatter than this are dropped from the LOOCV sweep: past
// it the closed-form residuals and an explicit refit stop agreeing, so the
// error estimate is numerical noise rather than model quality.
inline constexpr double kRippaRcondFloor = 1e-7;

/// Closed-form leave-one-out sweep for the interpolating Gaussian RBF: one
/// full-data solve per candidate gives every held-out residual as
/// W_i / (M^{-1})_ii, and the candidate error is the mean of those signed
/// residuals. The winner is the candidate with the smallest mean residual
/// magnitude (ties to the lower index); the curve still reports the signed
/// mean. Candidates whose kernel matrix is singular or too flat (see
/// kRippaRcondFloor) are marked invalid and skipped.
inline RippaResult rippa_loocv(const Matrix& pts, const Vector& values,
                               const std::vector<double>& grid) {
    if (grid.empty()) throw InvalidArgumentError("rippa_loocv: empty candidate grid");
    if (pts.rows() != values.size() || pts.rows() < 2)
        throw InvalidArgumentError("rippa_loocv: need >= 2 points with values");
    const int p = static_cast<int>(pts.rows());

    RippaResult res;
    res.curve.reserve(grid.size());
    double best_sel = std::numeric_limits<double>::infinity();
    for (double eps : grid) {
        RippaCandidate c;
        c.epsilon = eps;
        double sel = std::numeric_limits<double>::infinity();
        const Matrix m = detail::rbf_matrix(pts, pts, eps);
        Eigen::PartialPivLU<Matrix> lu(m);
        if (lu.rcond() >= kRippaRcondFloor) {
            const Vector w = lu.solve(values);
            const Vector minv_diag = lu.inverse().diagonal();
            double sum = 0.0, abs_sum = 0.0;
            bool ok = true;
            for (int i = 0; i < p; ++i) {
                if (minv_diag[i] == 0.0) {
                    ok = false;
                    break;
                }
                const double e = w[i] / minv_diag[i];
                sum += e;
                abs_sum += std::abs(e);
            }
            c.error = sum / p;
            c.valid = ok && std::isfinite(c.error) && std::isfinite(abs_sum);
            // candidates are ranked by the mean residual magnitude: the signed
            // mean lets held-out errors cancel, so it would crown shape values
            // whose under- and over-shoots happen to balance
            sel = abs_sum / p;
        }
        if (c.valid && sel < best_sel) {
            best_sel = sel;
            res.best_index = static_cast<int>(res.curve.size());
        }
        res.curve.push_back(c);
    }
    if (res.best_index < 0)
        throw NumericsError("rippa_loocv: no usable shape candidate in the grid");
    res.best_epsilon = res.curve[res.best_index].epsilon;
    return res;
}

/// Gaussian RBF with centers at the sample points, so K = p for both the
/// plain and the gradient-enhanced fit (equal flexibility). Plain fits solve
/// the square interpolation system; gradient-enhanced fits solve the stacked
/// (p + p*dim) x p system in the least-squares sense. The shape parameter
/// comes from the config, or from the closed-form LOOCV sweep when left
/// automatic; gradient-enhanced fits reuse the function-value sweep because
/// the closed form only exists for the square system.
inline Surrogate fit_rbf(const Dataset& data, const RbfConfig& cfg, bool gradient_enhanced,
                         const DomainTransform& frame) {
    data.validate();
    frame.validate();
    cfg.validate();
    if (gradient_enhanced && !data.has_gradients())
        throw InvalidArgumentError("fit_rbf: no gradients in dataset");
    const int p = data.size();
    const int dim = data.dim();

    const Matrix xh = frame.forward_points(data.points);
    const double eps =
        cfg.epsilon > 0.0 ? cfg.epsilon : rippa_loocv(xh, data.values, cfg.grid).best_epsilon;

    Surrogate s;
    s.kind = gradient_enhanced ? SurrogateKind::GeRbf : SurrogateKind::Rbf;
    s.transform = frame;
    s.centers = xh;
    s.flexibility = p;
    s.epsilon = eps;

    if (!gradient_enhanced) {
        const Matrix m = detail::rbf_matrix(xh, xh, eps);
        try {
            s.weights = solve_linear(m, data.values);
        } catch (const IllConditionedError&) {
            const double lambda = 1e-10 * m.trace() / p;
            s.weights = (m + lambda * Matrix::Identity(p, p)).ldlt().solve(data.values);
            s.ridged = true;
        }
        return s;
    }

    Matrix a(p * (1 + dim), p);
    Vector rhs(p * (1 + dim));
    a.topRows(p) = detail::rbf_matrix(xh, xh, eps);
    rhs.head(p) = data.values;
    a.bottomRows(p * dim) = detail::rbf_grad_rows(xh, xh, eps);
    const Matrix gh = frame.transform_gradients(data.gradients);
    for (int i = 0; i < p; ++i)
        rhs.segment(p + i * dim, dim) = gh.row(i).transpose();

    const LeastSquaresSolution sol = solve_least_squares(a, rhs);
    s.weights = sol.x;
    s.rank_deficient = sol.rank_deficient;
    return s;
}

namespace detail {

struct KrigingCore {
    double mu = 0.0;
    double sigma2 = 0.0;
    Vector alpha;
    double log_det = 0.0;
    bool nugget = false;
    bool ok = false;
};

inline KrigingCore kriging_core(const Matrix& pts, const Vector& values, const Vector& eps) {
    const int p = static_cast<int>(pts.rows());
    const Matrix scaled = pts * eps.cwiseSqrt().asDiagonal();
    Matrix m = (-sqdist(scaled, scaled)).array().exp();
    Eigen::LLT<Matrix> llt(m);
    KrigingCore core;
    if (llt.info() != Eigen::Success) {
        m.diagonal().array() += 1e-10;
        llt.compute(m);
        core.nugget = true;
        if (llt.info() != Eigen::Success) return core;
    }
    const Vector ones = Vector::Ones(p);
    const Vector minv_1 = llt.solve(ones);
    const double denom = ones.dot(minv_1);
    if (denom == 0.0 || !std::isfinite(denom)) return core;
    core.mu = values.dot(minv_1) / denom;
    const Vector resid = values - core.mu * ones;
    core.alpha = llt.solve(resid);
    core.sigma2 = resid.dot(core.alpha) / p;
    core.log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    core.ok = std::isfinite(core.mu) && std::isfinite(core.sigma2) &&
              std::isfinite(core.log_det) && core.alpha.allFinite();
    return core;
}

} // namespace detail

/// Concentrated log-likelihood of the per-dimension shape vector:
/// -(p/2) log sigma2 - (1/2) log |M|. Returns -inf when the correlation
/// matrix is not cleanly factorable: a nugget-repaired kernel has
/// log |M| -> -infinity, which would make near-singular shapes look
/// arbitrarily attractive to a tuner.
inline double kriging_log_likelihood(const Matrix& pts, const Vector& values,
                                     const Vector& eps) {
    const detail::KrigingCore core = detail::kriging_core(pts, values, eps);
    if (!core.ok || core.nugget) return -std::numeric_limits<double>::infinity();
    const double p = static_cast<double>(pts.rows());
    const double s2 = std::max(core.sigma2, 1e-300);
    return -0.5 * p * std::log(s2) - 0.5 * core.log_det;
}

/// Kriging with the Gaussian correlation exp(-sum_k eps_k d_k^2), a constant
/// trend estimated by generalized least squares, and the closed-form process
/// variance. Interpolates the training data.
inline Surrogate fit_kriging(const Dataset& data, const Vector& eps,
                             const DomainTransform& frame) {
    data.validate();
    frame.validate();
    if (data.size() < 2) throw InsufficientDataError("fit_kriging: need at least 2 points");
    if (eps.size() != data.dim())
        throw InvalidArgumentError("fit_kriging: shape vector size mismatch");
    for (int k = 0; k < eps.size(); ++k)
        if (!(eps[k] > 0.0)) throw InvalidArgumentError("fit_kriging: shapes must be positive");

    const Matrix xh = frame.forward_points(data.points);
    const detail::KrigingCore core = detail::kriging_core(xh, data.values, eps);
    if (!core.ok) throw NumericsError("fit_kriging: correlation matrix not factorable");

    Surrogate s;
    s.kind = SurrogateKind::Kriging;
    s.transform = frame;
    s.centers = xh;
    s.flexibility = data.size();
    s.eps_vector = eps;
    s.weights = core.alpha;
    s.mu = core.mu;
    s.sigma2 = core.sigma2;
    s.nugget = core.nugget;
    return s;
}

namespace detail {

/// Nelder-Mead on R^n, minimizing `f`, capped at `max_iter` iterations.
/// Coefficients: reflection 1, expansion 2, contraction 0.5, shrink 0.5.
/// Returns the best vertex ever evaluated.
template <typename F>
std::pair<Vector, double> nelder_mead(F&& f, const Vector& start, double step, int max_iter) {
    const int n = static_cast<int>(start.size());
    std::vector<Vector> x(n + 1, start);
    std::vector<double> v(n + 1);
    for (int k = 0; k < n; ++k) x[k + 1][k] += step;
    for (int k = 0; k <= n; ++k) v[k] = f(x[k]);

    Vector best_x = x[0];
    double best_v = v[0];
    auto note = [&](const Vector& xx, double vv) {
        if (vv < best_v) {
            best_v = vv;
            best_x = xx;
        }
    };
    for (int k = 0; k <= n; ++k) note(x[k], v[k]);

    std::vector<int> ord(n + 1);
    for (int it = 0; it < max_iter; ++it) {
        for (int k = 0; k <= n; ++k) ord[k] = k;
        std::sort(ord.begin(), ord.end(),
                  [&](int a, int b) { return v[a] < v[b] || (v[a] == v[b] && a < b); });
        const int worst = ord[n];
        Vector centroid = Vector::Zero(n);
        for (int k = 0; k < n; ++k) centroid += x[ord[k]];
        centroid /= n;

        const Vector xr = centroid + (centroid - x[worst]);
        const double vr = f(xr);
        note(xr, vr);
        if (vr < v[ord[0]]) {
            const Vector xe = centroid + 2.0 * (centroid - x[worst]);
            const double ve = f(xe);
            note(xe, ve);
            if (ve < vr) {
                x[worst] = xe;
                v[worst] = ve;
            } else {
                x[worst] = xr;
                v[worst] = vr;
            }
        } else if (vr < v[ord[n - 1]]) {
            x[worst] = xr;
            v[worst] = vr;
        } else {
            const bool outside = vr < v[worst];
            const Vector xc = outside ? centroid + 0.5 * (xr - centroid)
                                      : centroid + 0.5 * (x[worst] - centroid);
            const double vc = f(xc);
            note(xc, vc);
            if (vc < (outside ? vr : v[worst])) {
                x[worst] = xc;
                v[worst] = vc;
            } else {
                for (int k = 1; k <= n; ++k) {
                    x[ord[k]] = x[ord[0]] + 0.5 * (x[ord[k]] - x[ord[0]]);
                    v[ord[k]] = f(x[ord[k]]);
                    note(x[ord[k]], v[ord[k]]);
                }
            }
        }
    }
    return {best_x, best_v};
}

} // namespace detail

/// Pick the per-dimension shape vector by maximizing the concentrated
/// log-likelihood with a simplex search over log10(eps): 5 seeded restarts,
/// 100 iterations each, starts log-uniform in [1e-2, 1e2] per axis. Falls
/// back to the isotropic eps = 1 when no restart finds a finite likelihood.
inline Vector tune_kriging(const Matrix& pts, const Vector& values, std::uint64_t seed) {
    const int n = static_cast<int>(pts.cols());
    const int p = static_cast<int>(pts.rows());
    if (p < n + 2) throw InsufficientDataError("tune_kriging: need at least dim+2 points");

    auto objective = [&](const Vector& z) {
        for (int k = 0; k < n; ++k)
            if (std::abs(z[k]) > 10.0) return std::numeric_limits<double>::infinity();
        const Vector eps = Eigen::pow(10.0, z.array());
        return -kriging_log_likelihood(pts, values, eps);
    };

    Vector best_z;
    double best_v = std::numeric_limits<double>::infinity();
    for (int restart = 0; restart < 5; ++restart) {
        Rng rng(derive_seed(seed, 0x6b726967u, static_cast<std::uint64_t>(restart)));
        // starts vary the overall shape level, near-isotropically: when the
        // likelihood surface is too flat to identify anisotropy (sparse data,
        // high dim), the returned vector should not inherit anisotropy the
        // start happened to have
        Vector z0(n);
        const double level = rng.uniform(-2.0, 2.0);
        for (int k = 0; k < n; ++k) z0[k] = level + rng.uniform(-0.25, 0.25);
        auto [z, v] = detail::nelder_mead(objective, z0, 0.5, 100);
        if (v < best_v) {
            best_v = v;
            best_z = z;
        }
    }
    if (!std::isfinite(best_v)) return Vector::Ones(n);
    return Eigen::pow(10.0, best_z.array());
}

/// Diagonal transform induced by Kriging shapes: squared distances enter the
/// correlation as eps_k d_k^2, so axis k behaves as if stretched by
/// sqrt(eps_k).
inline DomainTransform kriging_scale_transform(const Vector& eps) {
    const int n = static_cast<int>(eps.size());
    if (n < 1) throw InvalidArgumentError("kriging_scale_transform: empty shape vector");
    for (int k = 0; k < n; ++k)
        if (!(eps[k] > 0.0))
            throw InvalidArgumentError("kriging_scale_transform: shapes must be positive");
    DomainTransform t;
    t.dim = n;
    t.rotation = Matrix::Identity(n, n);
    t.scales = eps.cwiseSqrt();
    t.provenance = Provenance::KrigingScale;
    t.validate();
    return t;
}

} // namespace surrofit

#endif
