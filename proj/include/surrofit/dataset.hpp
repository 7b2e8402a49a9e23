#ifndef SURROFIT_DATASET_HPP
#define SURROFIT_DATASET_HPP

#include <string>

#include "surrofit/numerics.hpp"

namespace surrofit {

/// Sampled data in one coordinate frame: p locations (rows of `points`),
/// their function values, and optionally the gradient at every location.
/// `frame` records which transform the coordinates live in so that data from
/// different frames cannot be mixed silently.
struct Dataset {
    Matrix points;        // p x dim
    Vector values;        // p
    Matrix gradients;     // p x dim when present, 0 x 0 otherwise
    std::string frame = "raw";

    int size() const { return static_cast<int>(points.rows()); }
    int dim() const { return static_cast<int>(points.cols()); }
    bool has_gradients() const { return gradients.rows() > 0; }

    void validate() const {
        if (points.rows() < 1 || points.cols() < 1)
            throw InvalidArgumentError("Dataset: needs at least one point");
        if (values.size() != points.rows())
            throw InvalidArgumentError("Dataset: value count != point count");
        if (has_gradients() &&
            (gradients.rows() != points.rows() || gradients.cols() != points.cols()))
            throw InvalidArgumentError("Dataset: gradients must be p x dim or absent");
        if (!points.allFinite() || !values.allFinite() ||
            (has_gradients() && !gradients.allFinite()))
            throw InvalidArgumentError("Dataset: non-finite entries");
    }
};

} // namespace surrofit

#endif
