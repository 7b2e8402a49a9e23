#ifndef SURROFIT_TESTBED_HPP
#define SURROFIT_TESTBED_HPP

#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include "surrofit/numerics.hpp"
#include "surrofit/sampling.hpp"

namespace surrofit {

/// Analytic test function: value, exact gradient, exact Hessian, and the
/// canonical box it is meant to be sampled on. Gradients are stored as plain
/// vectors; where a row/column convention matters (frame wrapping) it is
/// spelled out at the call site.
struct TestFunction {
    int dim = 0;
    Bounds bounds;
    std::function<double(const Vector&)> value;
    std::function<Vector(const Vector&)> gradient;
    std::function<SymMatrix(const Vector&)> hessian;
    std::string name;
};

/// Decomposable sinusoid family f(x) = (1/N) sum_i A_i sin(F_i x_i).
struct SinusoidSpec {
    Vector amplitudes;   // A_i
    Vector frequencies;  // F_i, radians per unit

    int dim() const { return static_cast<int>(amplitudes.size()); }
};

/// Amplitude/frequency schedule for the N-dimensional sinusoid benchmark
/// (1-based index i):
///   A_i = -2 exp(-(2i-N)^2 / N) + 3            in [1, 3]
///   F_i = 3pi / (2 + 2 exp((-20i+N)/2)) + pi/2 in [pi/2, 2pi]
inline SinusoidSpec make_sinusoid(int n) {
    if (n < 1) throw InvalidArgumentError("make_sinusoid: N must be >= 1");
    SinusoidSpec s;
    s.amplitudes.resize(n);
    s.frequencies.resize(n);
    for (int i = 1; i <= n; ++i) {
        const double d = 2.0 * i - n;
        s.amplitudes[i - 1] = -2.0 * std::exp(-d * d / n) + 3.0;
        s.frequencies[i - 1] =
            3.0 * M_PI / (2.0 + 2.0 * std::exp((-20.0 * i + n) / 2.0)) + M_PI / 2.0;
    }
    return s;
}

inline double eval_sinusoid(const SinusoidSpec& s, const Vector& x) {
    if (x.size() != s.amplitudes.size())
        throw InvalidArgumentError("eval_sinusoid: dimension mismatch");
    const int n = s.dim();
    double f = 0.0;
    for (int i = 0; i < n; ++i) f += s.amplitudes[i] * std::sin(s.frequencies[i] * x[i]);
    return f / n;
}

inline Vector sinusoid_gradient(const SinusoidSpec& s, const Vector& x) {
    if (x.size() != s.amplitudes.size())
        throw InvalidArgumentError("sinusoid_gradient: dimension mismatch");
    const int n = s.dim();
    Vector g(n);
    for (int i = 0; i < n; ++i)
        g[i] = s.amplitudes[i] * s.frequencies[i] * std::cos(s.frequencies[i] * x[i]) / n;
    return g;
}

/// Mean absolute curvature per axis over the canonical unit cube:
///   m_i = mean over [0,1] of |A_i F_i^2 sin(F_i x)| / N
///       = (A_i F_i / N) * integral_0^{F_i} |sin u| du
/// with the fold integral_0^F |sin u| du = 2k + 1 - cos(F - k pi), k = floor(F/pi).
inline Vector sinusoid_mean_abs_curvature(const SinusoidSpec& s) {
    const int n = s.dim();
    Vector m(n);
    for (int i = 0; i < n; ++i) {
        const double f = s.frequencies[i];
        const double k = std::floor(f / M_PI);
        const double folded = 2.0 * k + 1.0 - std::cos(f - k * M_PI);
        m[i] = s.amplitudes[i] * f * folded / n;
    }
    return m;
}

/// TestFunction view of a sinusoid spec on the unit cube.
inline TestFunction sinusoid_function(const SinusoidSpec& s, std::string name = "sinusoid") {
    const int n = s.dim();
    TestFunction f;
    f.dim = n;
    f.bounds = Bounds::cube(n, 0.0, 1.0);
    f.name = std::move(name);
    f.value = [s](const Vector& x) { return eval_sinusoid(s, x); };
    f.gradient = [s](const Vector& x) { return sinusoid_gradient(s, x); };
    f.hessian = [s, n](const Vector& x) {
        SymMatrix h(n);
        for (int i = 0; i < n; ++i) {
            const double fi = s.frequencies[i];
            h(i, i) = -s.amplitudes[i] * fi * fi * std::sin(fi * x[i]) / n;
        }
        return h;
    };
    return f;
}

/// f(x) = sin(2 pi x1) + sin(2 pi x2) on [0,1]^2. Same curvature scale in
/// both axes, so any anisotropy seen by a model comes from the frame it is
/// embedded in, not from the function.
inline TestFunction example_2d() {
    constexpr double w = 2.0 * M_PI;
    TestFunction f;
    f.dim = 2;
    f.bounds = Bounds::cube(2, 0.0, 1.0);
    f.name = "example2d";
    f.value = [](const Vector& x) {
        return std::sin(w * x[0]) + std::sin(w * x[1]);
    };
    f.gradient = [](const Vector& x) {
        Vector g(2);
        g[0] = w * std::cos(w * x[0]);
        g[1] = w * std::cos(w * x[1]);
        return g;
    };
    f.hessian = [](const Vector& x) {
        SymMatrix h(2);
        h(0, 0) = -w * w * std::sin(w * x[0]);
        h(1, 1) = -w * w * std::sin(w * x[1]);
        return h;
    };
    return f;
}

/// f(x) = 1/2 x^T A x with exact gradient A x and constant Hessian A.
inline TestFunction quadratic_form(const SymMatrix& a) {
    const Matrix ad = a.to_dense();
    TestFunction f;
    f.dim = a.dim();
    f.bounds = Bounds::cube(a.dim(), -1.0, 1.0);
    f.name = "quadratic";
    f.value = [ad](const Vector& x) { return 0.5 * x.dot(ad * x); };
    f.gradient = [ad](const Vector& x) { return Vector(ad * x); };
    f.hessian = [a](const Vector&) { return a; };
    return f;
}

inline Matrix rotation_2d(double theta) {
    Matrix r(2, 2);
    r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    return r;
}

/// Embed `inner` in a distorted frame: points map as x_hat = R S x. The
/// returned function g satisfies g(x_hat) = inner((R S)^{-1} x_hat); its
/// gradient is R S^{-1} grad_inner (equivalently grad * S^{-1} R^T in the
/// row convention) and its Hessian transforms congruently. The returned
/// bounds are the axis-aligned bounding box of the image of inner.bounds,
/// so callers sampling that box may probe pre-images outside the canonical
/// cube; every testbed function is analytic everywhere, which keeps that
/// well-defined.
inline TestFunction wrap_frame(const TestFunction& inner, const Matrix& r, const Vector& s) {
    const int n = inner.dim;
    if (r.rows() != n || r.cols() != n || s.size() != n)
        throw InvalidArgumentError("wrap_frame: R/S dimensions must match the function");
    if (((r.transpose() * r) - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-8)
        throw InvalidArgumentError("wrap_frame: R is not orthogonal");
    for (int i = 0; i < n; ++i)
        if (!(s[i] > 0.0)) throw InvalidArgumentError("wrap_frame: scales must be positive");

    const Matrix fwd = r * s.asDiagonal();                        // x -> x_hat
    const Matrix inv = s.cwiseInverse().asDiagonal() * Matrix(r.transpose());

    // Interval image of the inner box under fwd gives the wrapped bounds.
    const Vector mid = 0.5 * (inner.bounds.lo + inner.bounds.hi);
    const Vector half = 0.5 * (inner.bounds.hi - inner.bounds.lo);
    const Vector c = fwd * mid;
    const Vector radius = fwd.cwiseAbs() * half;

    TestFunction g;
    g.dim = n;
    g.bounds = Bounds(c - radius, c + radius);
    g.name = inner.name + "/framed";
    g.value = [inner, inv](const Vector& xh) { return inner.value(inv * xh); };
    g.gradient = [inner, inv](const Vector& xh) {
        // chain rule: grad g = inv^T grad f
        return Vector(inv.transpose() * inner.gradient(inv * xh));
    };
    g.hessian = [inner, inv](const Vector& xh) {
        const Matrix h = inner.hessian(inv * xh).to_dense();
        return SymMatrix::from_dense(inv.transpose() * h * inv);
    };
    return g;
}

} // namespace surrofit

#endif
