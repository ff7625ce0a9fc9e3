#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "brlab/tensor.hpp"
#include "test_helpers.hpp"

using namespace brlab;
using namespace brlab::testing;

TEST_CASE("frobenius norm") {
    CHECK(frobenius_norm(DenseTensor({2, 2, 2})) == 0.0);
    CHECK(frobenius_norm(w_state_reference(3)) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
    DenseTensor id2({2, 2});
    id2.set({0, 0}, 1.0);
    id2.set({1, 1}, 1.0);
    CHECK(frobenius_norm(id2) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

    DenseTensor bad({2});
    bad[0] = Cplx(std::nan(""), 0.0);
    CHECK_THROWS_AS(frobenius_norm(bad), ValidationError);
}

TEST_CASE("unfold") {
    // W_2 = |0><1| + |1><0| as a matrix
    const Matrix m = unfold(w_state_reference(2), {1});
    CHECK(m(0, 0) == Cplx(0.0));
    CHECK(m(0, 1) == Cplx(1.0));
    CHECK(m(1, 0) == Cplx(1.0));
    CHECK(m(1, 1) == Cplx(0.0));

    Rng rng(7);
    SUBCASE("rank-1 product tensor unfolds to rank 1 at every bipartition") {
        DenseTensor t({2, 3, 2});
        const Matrix a = random_complex(rng, 2, 1), b = random_complex(rng, 3, 1), c = random_complex(rng, 2, 1);
        for (std::int64_t i = 0; i < 2; ++i)
            for (std::int64_t j = 0; j < 3; ++j)
                for (std::int64_t k = 0; k < 2; ++k) t.set({i, j, k}, a(i, 0) * b(j, 0) * c(k, 0));
        CHECK(matrix_rank(unfold(t, {1})) == 1);
        CHECK(matrix_rank(unfold(t, {2})) == 1);
        CHECK(matrix_rank(unfold(t, {1, 3})) == 1);
    }

    SUBCASE("W_4 unfolded at {1,2} has rank 2 (elimination oracle)") {
        const Matrix u = unfold(w_state_reference(4), {1, 2});
        CHECK(elimination_rank(u) == 2);
        CHECK(matrix_rank(u) == 2);
    }

    SUBCASE("improper bipartitions rejected") {
        CHECK_THROWS_AS(unfold(w_state_reference(3), {}), ValidationError);
        CHECK_THROWS_AS(unfold(w_state_reference(3), {1, 2, 3}), ValidationError);
    }

    SUBCASE("norm preserved for every bipartition") {
        DenseTensor t({2, 3, 2, 2});
        for (std::int64_t i = 0; i < t.size(); ++i) t[i] = rng.complex_gaussian();
        const double nt = frobenius_norm(t);
        for (const auto& left : std::vector<std::vector<std::int64_t>>{{1}, {2}, {1, 3}, {2, 4}, {1, 2, 3}})
            CHECK(unfold(t, left).norm() == doctest::Approx(nt).epsilon(1e-13));
    }

    SUBCASE("unfolding rank invariant under permuting sites within a side") {
        DenseTensor t({2, 2, 2, 2});
        for (std::int64_t i = 0; i < t.size(); ++i) t[i] = rng.complex_gaussian();
        CHECK(matrix_rank(unfold(t, {1, 2})) == matrix_rank(unfold(t, {2, 1})));
        CHECK(matrix_rank(unfold(t, {1, 4})) == matrix_rank(unfold(t, {4, 1})));
    }
}

TEST_CASE("matrix_rank") {
    CHECK(matrix_rank(Matrix::Identity(3, 3)) == 3);
    Matrix x(2, 2);
    x << 0, 1, 1, 0;
    CHECK(matrix_rank(x) == 2);
    Rng rng(11);
    const Matrix u = random_complex(rng, 4, 1), v = random_complex(rng, 4, 1);
    CHECK(matrix_rank(u * v.adjoint()) == 1);
    CHECK(matrix_rank(Matrix::Zero(3, 3)) == 0);
    CHECK_THROWS_AS(matrix_rank(x, 0.0), ValidationError);

    Rng rng2(12);
    for (int trial = 0; trial < 25; ++trial) {
        const int d = 2 + static_cast<int>(rng2.below(5));
        const Matrix m = random_complex(rng2, d, d);
        CHECK(matrix_rank(m) == elimination_rank(m));
    }
}

TEST_CASE("is_psd and lambda_max") {
    CHECK(is_psd(Matrix::Identity(4, 4)));
    Matrix d(2, 2);
    d << 1, 0, 0, -1;
    CHECK_FALSE(is_psd(d));

    // A_0^eps for eps = 0.1, n = 5: rank-1 psd with eigenvalues {0, 2C/eps^{1/4}}
    const double c = std::pow(2.0 * (1.0 - std::cos(M_PI / 5.0)), -0.25);
    const double s = c / std::pow(0.1, 0.25);
    Matrix a0(2, 2);
    a0 << s, s * std::exp(Cplx(0, M_PI / 5.0)), s * std::exp(Cplx(0, -M_PI / 5.0)), s;
    CHECK(is_psd(a0));
    CHECK(lambda_max(a0) == doctest::Approx(2.0 * s).epsilon(1e-12));

    Matrix diag31(2, 2);
    diag31 << 3, 0, 0, 1;
    CHECK(lambda_max(diag31) == doctest::Approx(3.0));

    Matrix nonherm(2, 2);
    nonherm << 0, 1, 0, 0;
    CHECK_THROWS_AS(lambda_max(nonherm), ValidationError);

    SUBCASE("max eigenvalue of a psd sum dominates both parts") {
        Rng rng(3);
        for (int trial = 0; trial < 100; ++trial) {
            const int dim = 2 + static_cast<int>(rng.below(7));
            const Matrix a = random_psd(rng, dim), b = random_psd(rng, dim);
            CHECK(std::max(lambda_max(a), lambda_max(b)) <= lambda_max(a + b) + 1e-10);
        }
    }

    SUBCASE("lambda_max is multiplicative over tensor powers") {
        Rng rng(5);
        for (int trial = 0; trial < 20; ++trial) {
            const int dim = 2 + static_cast<int>(rng.below(2));
            const Matrix rho = random_psd(rng, dim);
            Matrix power = rho;
            for (int n = 2; n <= 4; ++n) {
                power = kron(power, rho);
                CHECK(lambda_max(power) ==
                      doctest::Approx(std::pow(lambda_max(rho), n)).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("diag_embed") {
    DenseTensor p({2});
    p[0] = 0.3;
    p[1] = 0.7;
    const DenseTensor rho = diag_embed(p);
    CHECK(operator_to_matrix(rho).isApprox((Matrix(2, 2) << 0.3, 0, 0, 0.7).finished()));

    const DenseTensor rho_w3 = diag_embed(w_state_reference(3));
    const Matrix flat = operator_to_matrix(rho_w3);
    CHECK(flat.rows() == 8);
    CHECK(flat.diagonal().sum() == Cplx(3.0));
    CHECK(flat.cwiseAbs().sum() == doctest::Approx(3.0));  // three unit diagonal entries
    CHECK(is_psd(flat));

    SUBCASE("psd iff entrywise nonnegative") {
        DenseTensor t({2, 2});
        t.set({0, 0}, 1.0);
        t.set({1, 1}, -0.5);
        CHECK_FALSE(is_psd(operator_to_matrix(diag_embed(t))));
    }

    SUBCASE("diagonal reads back exactly") {
        Rng rng(9);
        DenseTensor t({3, 2, 2});
        for (std::int64_t i = 0; i < t.size(); ++i) t[i] = rng.uniform();
        const DenseTensor back = diagonal_part(diag_embed(t));
        for (std::int64_t i = 0; i < t.size(); ++i) CHECK(back[i] == t[i]);
    }
}

TEST_CASE("mode_apply and transpose") {
    Rng rng(17);
    DenseTensor t({2, 3, 2});
    for (std::int64_t i = 0; i < t.size(); ++i) t[i] = rng.complex_gaussian();

    const Matrix m = random_complex(rng, 4, 3);
    const DenseTensor applied = mode_apply(m, t, 2);
    CHECK(applied.shape() == std::vector<std::int64_t>{2, 4, 2});
    // check one entry against the direct sum
    Cplx expect = 0.0;
    for (std::int64_t b = 0; b < 3; ++b) expect += m(1, b) * t.at({1, b, 0});
    CHECK(std::abs(applied.at({1, 1, 0}) - expect) < 1e-14);

    const DenseTensor tt = transpose(t, {2, 0, 1});
    CHECK(tt.shape() == std::vector<std::int64_t>{2, 2, 3});
    CHECK(tt.at({1, 0, 2}) == t.at({0, 2, 1}));
}

TEST_CASE("operator matrix round trip") {
    Rng rng(23);
    DenseTensor op({2, 3, 2, 2});  // sites with row dims (2, 2), col dims (3, 2)
    for (std::int64_t i = 0; i < op.size(); ++i) op[i] = rng.complex_gaussian();
    const Matrix m = operator_to_matrix(op);
    CHECK(m.rows() == 4);
    CHECK(m.cols() == 6);
    const DenseTensor back = matrix_to_operator(m, {2, 2}, {3, 2});
    for (std::int64_t i = 0; i < op.size(); ++i) CHECK(back[i] == op[i]);
}
