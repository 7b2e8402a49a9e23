#pragma once

// Shared numerical oracles for the test suite: finite-difference derivative
// checks and random symmetric-matrix construction. Deliberately written from
// the definitions (not via library calls under test) so they stay an
// independent route to the same answers.

#include <cmath>
#include <functional>

#include "surrofit/surrofit.hpp"

namespace testsupport {

using surrofit::Matrix;
using surrofit::Rng;
using surrofit::SymMatrix;
using surrofit::Vector;
using ScalarFn = std::function<double(const Vector&)>;
using VectorFn = std::function<Vector(const Vector&)>;

inline Vector fd_gradient(const ScalarFn& f, const Vector& x, double h = 1e-6) {
    Vector g(x.size());
    for (int k = 0; k < x.size(); ++k) {
        const double hk = h * (1.0 + std::abs(x[k]));
        Vector xp = x, xm = x;
        xp[k] += hk;
        xm[k] -= hk;
        g[k] = (f(xp) - f(xm)) / (2.0 * hk);
    }
    return g;
}

/// Hessian of a scalar function: fourth-order stencil on the diagonal, plain
/// cross stencil off it (odd error terms cancel at the evaluation point).
inline Matrix fd_hessian(const ScalarFn& f, const Vector& x, double h = 3e-3) {
    const int n = static_cast<int>(x.size());
    Matrix hess(n, n);
    const double f0 = f(x);
    for (int i = 0; i < n; ++i) {
        Vector e = Vector::Zero(n);
        e[i] = h;
        hess(i, i) =
            (-f(x + 2 * e) + 16 * f(x + e) - 30 * f0 + 16 * f(x - e) - f(x - 2 * e)) /
            (12 * h * h);
        for (int j = i + 1; j < n; ++j) {
            Vector ej = Vector::Zero(n);
            ej[j] = h;
            hess(i, j) = hess(j, i) =
                (f(x + e + ej) - f(x + e - ej) - f(x - e + ej) + f(x - e - ej)) /
                (4 * h * h);
        }
    }
    return hess;
}

/// Hessian via central differences of an analytic gradient; symmetrized.
inline Matrix fd_hessian_of_gradient(const VectorFn& g, const Vector& x, double h = 1e-5) {
    const int n = static_cast<int>(x.size());
    Matrix hess(n, n);
    for (int k = 0; k < n; ++k) {
        const double hk = h * (1.0 + std::abs(x[k]));
        Vector xp = x, xm = x;
        xp[k] += hk;
        xm[k] -= hk;
        hess.col(k) = (g(xp) - g(xm)) / (2.0 * hk);
    }
    return 0.5 * (hess + hess.transpose());
}

/// Random symmetric matrix with eigenvalues drawn uniformly from
/// [lo_mag, hi_mag], each negated with probability 1/2 when mixed_signs.
inline SymMatrix random_sym(int dim, Rng& rng, double lo_mag, double hi_mag,
                            bool mixed_signs) {
    const Matrix v = surrofit::random_rotation(dim, rng);
    Vector lam(dim);
    for (int i = 0; i < dim; ++i) {
        lam[i] = rng.uniform(lo_mag, hi_mag);
        if (mixed_signs && rng.uniform01() < 0.5) lam[i] = -lam[i];
    }
    return SymMatrix::from_dense(v * lam.asDiagonal() * v.transpose());
}

} // namespace testsupport
