#ifndef SURROFIT_NUMERICS_HPP
#define SURROFIT_NUMERICS_HPP

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "surrofit/rng.hpp"

namespace surrofit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

class NumericsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown when a linear system is singular to working precision.
class IllConditionedError : public NumericsError {
public:
    IllConditionedError(const std::string& msg, double rcond)
        : NumericsError(msg + " (rcond=" + std::to_string(rcond) + ")"),
          rcond_(rcond) {}
    double rcond() const { return rcond_; }

private:
    double rcond_;
};

class EigenSolverError : public NumericsError {
public:
    using NumericsError::NumericsError;
};

class InvalidArgumentError : public NumericsError {
public:
    using NumericsError::NumericsError;
};

// 1/cond below this is treated as singular in direct solves.
inline constexpr double kSingularRcond = 1e-12;

/// Dense symmetric matrix. Only the lower triangle is stored, so
/// (i,j) and (j,i) are the same memory and symmetry can never drift.
class SymMatrix {
public:
    SymMatrix() : dim_(0) {}

    explicit SymMatrix(int dim) : dim_(dim), tri_(std::size_t(dim) * (dim + 1) / 2, 0.0) {
        if (dim < 1) throw InvalidArgumentError("SymMatrix: dim must be >= 1");
    }

    /// Build from a dense matrix, averaging m and m^T. For an already
    /// symmetric input this is exact.
    static SymMatrix from_dense(const Matrix& m) {
        if (m.rows() != m.cols() || m.rows() < 1)
            throw InvalidArgumentError("SymMatrix: input must be square");
        SymMatrix s(static_cast<int>(m.rows()));
        for (int i = 0; i < s.dim_; ++i)
            for (int j = 0; j <= i; ++j)
                s(i, j) = 0.5 * (m(i, j) + m(j, i));
        return s;
    }

    static SymMatrix identity(int dim) {
        SymMatrix s(dim);
        for (int i = 0; i < dim; ++i) s(i, i) = 1.0;
        return s;
    }

    static SymMatrix zero(int dim) { return SymMatrix(dim); }

    int dim() const { return dim_; }

    double& operator()(int i, int j) { return tri_[index(i, j)]; }
    double operator()(int i, int j) const { return tri_[index(i, j)]; }

    Matrix to_dense() const {
        Matrix m(dim_, dim_);
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j <= i; ++j)
                m(i, j) = m(j, i) = (*this)(i, j);
        return m;
    }

    double trace() const {
        double t = 0.0;
        for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
        return t;
    }

    bool all_finite() const {
        for (double v : tri_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    SymMatrix& operator+=(const SymMatrix& o) {
        if (o.dim_ != dim_) throw InvalidArgumentError("SymMatrix: dim mismatch");
        for (std::size_t k = 0; k < tri_.size(); ++k) tri_[k] += o.tri_[k];
        return *this;
    }

    SymMatrix& operator*=(double a) {
        for (double& v : tri_) v *= a;
        return *this;
    }

private:
    std::size_t index(int i, int j) const {
        if (j > i) std::swap(i, j);
        return std::size_t(i) * (i + 1) / 2 + j;
    }

    int dim_;
    std::vector<double> tri_;
};

/// Eigenpairs of a symmetric matrix, eigenvalues sorted descending.
/// Column i of `eigenvectors` pairs with `eigenvalues[i]`. Each column is
/// sign-fixed: its largest-magnitude entry (lowest index on ties) is >= 0.
struct EigenDecomposition {
    Vector eigenvalues;
    Matrix eigenvectors;
};

inline EigenDecomposition sym_eig(const SymMatrix& m) {
    if (!m.all_finite()) throw InvalidArgumentError("sym_eig: non-finite entries");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m.to_dense());
    if (solver.info() != Eigen::Success)
        throw EigenSolverError("sym_eig: eigensolver failed to converge");

    const int n = m.dim();
    EigenDecomposition d;
    d.eigenvalues.resize(n);
    d.eigenvectors.resize(n, n);
    // Eigen returns ascending order; reverse to descending.
    for (int k = 0; k < n; ++k) {
        const int src = n - 1 - k;
        d.eigenvalues[k] = solver.eigenvalues()[src];
        d.eigenvectors.col(k) = solver.eigenvectors().col(src);
    }
    // Sign convention: largest-|entry| component non-negative, ties broken
    // by lowest row index.
    for (int k = 0; k < n; ++k) {
        int arg = 0;
        double best = std::abs(d.eigenvectors(0, k));
        for (int i = 1; i < n; ++i) {
            const double a = std::abs(d.eigenvectors(i, k));
            if (a > best) {
                best = a;
                arg = i;
            }
        }
        if (d.eigenvectors(arg, k) < 0.0) d.eigenvectors.col(k) = -d.eigenvectors.col(k);
    }
    return d;
}

/// Solve a square system a x = b. Throws IllConditionedError when a is
/// singular to working precision (rcond < 1e-12).
inline Matrix solve_linear(const Matrix& a, const Matrix& b) {
    if (a.rows() != a.cols())
        throw InvalidArgumentError("solve_linear: matrix must be square");
    if (a.rows() != b.rows())
        throw InvalidArgumentError("solve_linear: rhs size mismatch");
    Eigen::PartialPivLU<Matrix> lu(a);
    const double rc = lu.rcond();
    if (!(rc >= kSingularRcond))
        throw IllConditionedError("solve_linear: singular to working precision", rc);
    return lu.solve(b);
}

inline Vector solve_linear(const Matrix& a, const Vector& b) {
    return Vector(solve_linear(a, Matrix(b)));
}

struct LeastSquaresSolution {
    Vector x;
    Eigen::Index rank = 0;
    bool rank_deficient = false;
};

/// Minimum-norm least squares for a.rows() >= a.cols(). Rank deficiency is
/// reported, not thrown; the minimum-norm solution is still returned.
inline LeastSquaresSolution solve_least_squares(const Matrix& a, const Vector& b) {
    if (a.rows() < a.cols())
        throw InvalidArgumentError("solve_least_squares: need rows >= cols");
    if (a.rows() != b.rows())
        throw InvalidArgumentError("solve_least_squares: rhs size mismatch");
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(a);
    LeastSquaresSolution s;
    s.x = cod.solve(b);
    s.rank = cod.rank();
    s.rank_deficient = s.rank < a.cols();
    return s;
}

/// Random orthogonal matrix R = expm(pi (A - A^T)) with A entries uniform in
/// [-0.5, 0.5], filled row-major from `rng`. det(R) = +1.
inline Matrix random_rotation(int dim, Rng& rng) {
    if (dim < 1) throw InvalidArgumentError("random_rotation: dim must be >= 1");
    Matrix a(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            a(i, j) = rng.uniform(-0.5, 0.5);
    const Matrix skew = M_PI * (a - a.transpose());
    return skew.exp();  // Pade + scaling-and-squaring
}

} // namespace surrofit

#endif
