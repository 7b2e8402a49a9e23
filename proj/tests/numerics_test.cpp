#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"
#include "surrofit/numerics.hpp"

using namespace surrofit;

TEST_CASE("SymMatrix stores one triangle") {
    SymMatrix m(3);
    m(2, 0) = 4.5;
    CHECK(m(0, 2) == 4.5);  // same storage either way round
    m(0, 2) = -1.0;
    CHECK(m(2, 0) == -1.0);
    CHECK(m.trace() == 0.0);

    Matrix skew(2, 2);
    skew << 1.0, 3.0, 1.0, 2.0;
    const SymMatrix s = SymMatrix::from_dense(skew);
    CHECK(s(0, 1) == 2.0);  // averaged with the transpose
    CHECK(s.to_dense()(1, 0) == 2.0);

    CHECK_THROWS_AS(SymMatrix(0), InvalidArgumentError);
    SymMatrix a(2), b(3);
    CHECK_THROWS_AS(a += b, InvalidArgumentError);
}

TEST_CASE("sym_eig matches the closed form in 2D") {
    SymMatrix m(2);
    m(0, 0) = 3.0;
    m(1, 1) = 1.0;
    m(1, 0) = 1.0;
    const EigenDecomposition d = sym_eig(m);
    CHECK_THAT(d.eigenvalues[0], Catch::Matchers::WithinAbs(2.0 + std::sqrt(2.0), 1e-12));
    CHECK_THAT(d.eigenvalues[1], Catch::Matchers::WithinAbs(2.0 - std::sqrt(2.0), 1e-12));

    // random 2x2: eigenvalues from trace/determinant
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        SymMatrix a(2);
        a(0, 0) = rng.uniform(-3, 3);
        a(1, 1) = rng.uniform(-3, 3);
        a(1, 0) = rng.uniform(-3, 3);
        const double tr = a(0, 0) + a(1, 1);
        const double det = a(0, 0) * a(1, 1) - a(1, 0) * a(1, 0);
        const double disc = std::sqrt(tr * tr / 4.0 - det);
        const EigenDecomposition e = sym_eig(a);
        CHECK_THAT(e.eigenvalues[0], Catch::Matchers::WithinAbs(tr / 2.0 + disc, 1e-10));
        CHECK_THAT(e.eigenvalues[1], Catch::Matchers::WithinAbs(tr / 2.0 - disc, 1e-10));
    }
}

TEST_CASE("sym_eig reconstructs and orders") {
    Rng rng(11);
    for (int dim : {2, 3, 5, 8}) {
        const SymMatrix a = testsupport::random_sym(dim, rng, 0.1, 4.0, true);
        const EigenDecomposition d = sym_eig(a);
        for (int k = 1; k < dim; ++k) CHECK(d.eigenvalues[k - 1] >= d.eigenvalues[k]);
        const Matrix recon =
            d.eigenvectors * d.eigenvalues.asDiagonal() * d.eigenvectors.transpose();
        CHECK((recon - a.to_dense()).cwiseAbs().maxCoeff() < 1e-12);
        const Matrix vtv = d.eigenvectors.transpose() * d.eigenvectors;
        CHECK((vtv - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff() < 1e-12);
        // sign rule: dominant entry of every eigenvector is non-negative
        for (int k = 0; k < dim; ++k) {
            int arg = 0;
            d.eigenvectors.col(k).cwiseAbs().maxCoeff(&arg);
            CHECK(d.eigenvectors(arg, k) >= 0.0);
        }
    }
    SymMatrix bad(2);
    bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(sym_eig(bad), InvalidArgumentError);
}

TEST_CASE("solve_linear is exact on well-posed systems and rejects singular ones") {
    Rng rng(3);
    Matrix a(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) a(i, j) = rng.uniform(-1, 1);
    a += 3.0 * Matrix::Identity(3, 3);
    const Vector x_true = Vector::LinSpaced(3, -1.0, 2.0);
    const Vector x = solve_linear(a, Vector(a * x_true));
    CHECK((x - x_true).cwiseAbs().maxCoeff() < 1e-12);

    Matrix sing(2, 2);
    sing << 1, 1, 1, 1;
    try {
        solve_linear(sing, Vector(Vector::Ones(2)));
        FAIL("expected IllConditionedError");
    } catch (const IllConditionedError& e) {
        CHECK(e.rcond() < 1e-12);
    }
    CHECK_THROWS_AS(solve_linear(Matrix::Ones(2, 3), Vector(Vector::Ones(2))),
                    InvalidArgumentError);
}

TEST_CASE("solve_least_squares agrees with the normal equations") {
    Rng rng(5);
    Matrix a(10, 4);
    Vector b(10);
    for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 4; ++j) a(i, j) = rng.uniform(-2, 2);
        b[i] = rng.uniform(-2, 2);
    }
    const LeastSquaresSolution sol = solve_least_squares(a, b);
    CHECK_FALSE(sol.rank_deficient);
    CHECK(sol.rank == 4);
    const Vector oracle = (a.transpose() * a).ldlt().solve(a.transpose() * b);
    CHECK((sol.x - oracle).cwiseAbs().maxCoeff() < 1e-8);

    // duplicated column: rank drops, residual still orthogonal to the range
    Matrix a2(10, 5);
    a2.leftCols(4) = a;
    a2.col(4) = a.col(1);
    const LeastSquaresSolution def = solve_least_squares(a2, b);
    CHECK(def.rank_deficient);
    CHECK(def.rank == 4);
    const Vector normal_resid = a2.transpose() * (a2 * def.x - b);
    CHECK(normal_resid.cwiseAbs().maxCoeff() < 1e-10);

    CHECK_THROWS_AS(solve_least_squares(Matrix::Ones(3, 5), Vector(Vector::Ones(3))),
                    InvalidArgumentError);
}

TEST_CASE("random_rotation gives proper orthogonal matrices in every dimension") {
    for (int dim : {1, 2, 3, 5, 8, 16}) {
        for (int seed = 0; seed < 20; ++seed) {
            Rng rng(1000 * dim + seed);
            const Matrix r = random_rotation(dim, rng);
            CHECK(((r.transpose() * r) - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff() <
                  1e-10);
            CHECK_THAT(r.determinant(), Catch::Matchers::WithinAbs(1.0, 1e-10));
        }
    }
    // seeded means reproducible
    Rng r1(42), r2(42);
    CHECK((random_rotation(4, r1) - random_rotation(4, r2)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("seeded rng streams are stable and well distributed") {
    Rng a(123), b(123), c(124);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    bool any_diff = false;
    for (int i = 0; i < 10; ++i) any_diff |= (b.next_u64() != c.next_u64());
    CHECK(any_diff);

    Rng r(9);
    for (int i = 0; i < 1000; ++i) {
        const double u = r.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(r.below(7) < 7);
    }

    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
    CHECK(derive_seed(1, 2) != derive_seed(2, 2));
    CHECK(derive_seed(5, 1, 0, 0) == derive_seed(5, 1));
}
