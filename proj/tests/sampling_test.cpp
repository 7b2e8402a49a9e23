#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "surrofit/sampling.hpp"

using namespace surrofit;

TEST_CASE("bounds validate and test containment") {
    const Bounds b = Bounds::cube(3, -1.0, 2.0);
    Vector x(3);
    x << 0.0, -1.0, 2.0;
    CHECK(b.contains(x));
    x[1] = -1.001;
    CHECK_FALSE(b.contains(x));
    CHECK(b.contains(x, 0.01));

    CHECK_THROWS_AS(Bounds(Vector::Ones(2), Vector::Zero(2)), InvalidArgumentError);
    CHECK_THROWS_AS(Bounds(Vector::Ones(2), Vector::Ones(3)), InvalidArgumentError);
}

TEST_CASE("latin hypercube hits every stratum in every dimension exactly once") {
    const int p = 50;
    const Bounds b = Bounds::cube(8, -2.0, 3.0);
    Rng rng(2024);
    const Matrix pts = latin_hypercube(p, b, rng);
    REQUIRE(pts.rows() == p);
    REQUIRE(pts.cols() == 8);

    for (int k = 0; k < 8; ++k) {
        std::vector<int> hits(p, 0);
        const double width = (b.hi[k] - b.lo[k]) / p;
        for (int i = 0; i < p; ++i) {
            CHECK(pts(i, k) >= b.lo[k]);
            CHECK(pts(i, k) < b.hi[k]);
            int stratum = static_cast<int>((pts(i, k) - b.lo[k]) / width);
            if (stratum == p) stratum = p - 1;  // guard the upper edge
            ++hits[stratum];
        }
        for (int s = 0; s < p; ++s) CHECK(hits[s] == 1);
    }
}

TEST_CASE("latin hypercube edge cases and determinism") {
    const Bounds b = Bounds::cube(2, 0.0, 1.0);
    Rng one(5);
    const Matrix single = latin_hypercube(1, b, one);
    CHECK(b.contains(single.row(0).transpose()));

    Rng r1(77), r2(77), r3(78);
    const Matrix a = latin_hypercube(13, b, r1);
    const Matrix c = latin_hypercube(13, b, r2);
    const Matrix d = latin_hypercube(13, b, r3);
    CHECK((a - c).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a - d).cwiseAbs().maxCoeff() > 0.0);

    Rng rng(1);
    CHECK_THROWS_AS(latin_hypercube(0, b, rng), InvalidArgumentError);
}

TEST_CASE("uniform cloud stays in bounds and fills the box evenly") {
    const Bounds b = Bounds::cube(3, -1.0, 3.0);
    Rng rng(99);
    const int p = 20000;
    const Matrix pts = uniform_cloud(p, b, rng);
    for (int i = 0; i < p; ++i) CHECK(b.contains(pts.row(i).transpose()));
    const Vector mean = pts.colwise().mean();
    for (int k = 0; k < 3; ++k)
        CHECK_THAT(mean[k], Catch::Matchers::WithinAbs(1.0, 0.1));  // box center

    Rng r1(4), r2(4);
    CHECK((uniform_cloud(10, b, r1) - uniform_cloud(10, b, r2)).cwiseAbs().maxCoeff() == 0.0);
}
