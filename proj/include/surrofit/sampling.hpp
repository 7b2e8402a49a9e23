#ifndef SURROFIT_SAMPLING_HPP
#define SURROFIT_SAMPLING_HPP

#include <algorithm>
#include <numeric>
#include <vector>

#include "surrofit/numerics.hpp"
#include "surrofit/rng.hpp"

namespace surrofit {

/// Axis-aligned box. lo/hi per dimension, lo < hi enforced.
struct Bounds {
    Vector lo;
    Vector hi;

    Bounds() = default;
    Bounds(Vector l, Vector h) : lo(std::move(l)), hi(std::move(h)) { validate(); }

    static Bounds cube(int dim, double l, double h) {
        return Bounds(Vector::Constant(dim, l), Vector::Constant(dim, h));
    }

    int dim() const { return static_cast<int>(lo.size()); }

    Vector range() const { return hi - lo; }

    bool contains(const Vector& x, double tol = 0.0) const {
        for (int k = 0; k < dim(); ++k)
            if (x[k] < lo[k] - tol || x[k] > hi[k] + tol) return false;
        return true;
    }

    void validate() const {
        if (lo.size() != hi.size() || lo.size() < 1)
            throw InvalidArgumentError("Bounds: lo/hi size mismatch");
        for (int k = 0; k < dim(); ++k)
            if (!(lo[k] < hi[k]))
                throw InvalidArgumentError("Bounds: need lo < hi in every dimension");
    }
};

/// Latin hypercube sample: p points in `bounds`, one point per stratum per
/// dimension (each axis split into p equal bins, each bin hit exactly once),
/// uniform within the stratum. Strata are paired across dimensions by
/// independent random permutations. Rows of the result are points.
inline Matrix latin_hypercube(int p, const Bounds& bounds, Rng& rng) {
    if (p < 1) throw InvalidArgumentError("latin_hypercube: p must be >= 1");
    bounds.validate();
    const int dim = bounds.dim();
    Matrix pts(p, dim);
    std::vector<int> perm(p);
    for (int k = 0; k < dim; ++k) {
        std::iota(perm.begin(), perm.end(), 0);
        // Fisher-Yates with the seeded stream, not std::shuffle, so the
        // layout is identical on every platform.
        for (int i = p - 1; i > 0; --i) {
            const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
            std::swap(perm[i], perm[j]);
        }
        const double width = (bounds.hi[k] - bounds.lo[k]) / p;
        for (int i = 0; i < p; ++i)
            pts(i, k) = bounds.lo[k] + (perm[i] + rng.uniform01()) * width;
    }
    return pts;
}

/// Plain uniform cloud over `bounds`; rows are points. Used for test sets,
/// where stratification would bias error estimates between repeats.
inline Matrix uniform_cloud(int p, const Bounds& bounds, Rng& rng) {
    if (p < 1) throw InvalidArgumentError("uniform_cloud: p must be >= 1");
    bounds.validate();
    const int dim = bounds.dim();
    Matrix pts(p, dim);
    for (int i = 0; i < p; ++i)
        for (int k = 0; k < dim; ++k)
            pts(i, k) = rng.uniform(bounds.lo[k], bounds.hi[k]);
    return pts;
}

} // namespace surrofit

#endif
