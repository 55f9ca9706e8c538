#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support/support.hpp"

using namespace toposq;
using namespace support;

namespace {

Matrix diag(std::initializer_list<double> d) {
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
    Eigen::Index k = 0;
    for (double x : d) m(k, k) = x, ++k;
    return m;
}

}  // namespace

TEST_CASE("hermitian matrix rejects asymmetric input") {
    Matrix a = Matrix::Zero(2, 2);
    a(0, 1) = 1.0;
    CHECK_THROWS_AS(HermitianMatrix::from(a), Error);
    try {
        HermitianMatrix::from(a);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotHermitian);
    }
    a(1, 0) = 1.0;
    CHECK_NOTHROW(HermitianMatrix::from(a));
}

TEST_CASE("projection validation") {
    CHECK_THROWS_AS(Projection::from_matrix(diag({1.0, 0.5})), Error);
    const auto p = Projection::from_matrix(diag({1, 0, 1}));
    CHECK(p.rank() == 2);
    CHECK(p.complement().rank() == 1);
}

TEST_CASE("density state validation") {
    CHECK_THROWS_AS(DensityState::from_matrix(diag({0.6, 0.6})), Error);
    CHECK_THROWS_AS(DensityState::from_matrix(diag({1.2, -0.2})), Error);
    CHECK_NOTHROW(DensityState::from_matrix(diag({0.25, 0.75})));
    Vector v(2);
    v << 1.0, 1.0;
    CHECK_THROWS_AS(DensityState::pure(v), Error);
}

TEST_CASE("spectral decomposition of the identity is a single term") {
    const auto s = spectral_decompose(HermitianMatrix::identity(3));
    REQUIRE(s.size() == 1);
    CHECK(s[0].value == doctest::Approx(1.0));
    CHECK(s[0].projection.rank() == 3);
}

TEST_CASE("spectral decomposition of diag(1,2,3)") {
    const auto s = spectral_decompose(HermitianMatrix::from(diag({1, 2, 3})));
    REQUIRE(s.size() == 3);
    for (int k = 0; k < 3; ++k) {
        CHECK(s[static_cast<std::size_t>(k)].value == doctest::Approx(k + 1.0));
        CHECK(frobenius_distance(s[static_cast<std::size_t>(k)].projection.matrix(), projection_matrix(basis_vector(3, k))) < 1e-12);
    }
}

TEST_CASE("degenerate eigenvalues are grouped") {
    const auto s = spectral_decompose(HermitianMatrix::from(diag({2, 2, 5})));
    REQUIRE(s.size() == 2);
    CHECK(s[0].value == doctest::Approx(2.0));
    CHECK(frobenius_distance(s[0].projection.matrix(), diag({1, 1, 0})) < 1e-12);
    CHECK(s[1].value == doctest::Approx(5.0));
    CHECK(frobenius_distance(s[1].projection.matrix(), diag({0, 0, 1})) < 1e-12);

    // a split below eig_group merges, above it does not
    CHECK(spectral_decompose(HermitianMatrix::from(diag({2, 2 + 1e-10, 5}))).size() == 2);
    CHECK(spectral_decompose(HermitianMatrix::from(diag({2, 2 + 1e-6, 5}))).size() == 3);
}

TEST_CASE("spectral projections resolve the identity on random observables") {
    Rng rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + static_cast<int>(index(rng, 4));
        const auto a = random_observable(n, rng, random_unitary(n, rng));
        const auto s = spectral_decompose(a);
        Matrix sum = Matrix::Zero(n, n), recon = Matrix::Zero(n, n);
        for (std::size_t i = 0; i < s.size(); ++i) {
            sum += s[i].projection.matrix();
            recon += s[i].value * s[i].projection.matrix();
            for (std::size_t j = 0; j < i; ++j)
                CHECK((s[i].projection.matrix() * s[j].projection.matrix()).norm() < 1e-9);
        }
        CHECK(frobenius_distance(sum, Matrix::Identity(n, n)) < 1e-9);
        CHECK(frobenius_distance(recon, a.matrix()) < 1e-9);
    }
}

TEST_CASE("proj_leq examples") {
    const auto e11 = Projection::from_matrix(diag({1, 0, 0}));
    const auto e12 = Projection::from_matrix(diag({1, 1, 0}));
    CHECK(proj_leq(Projection::zero(3), e12));
    CHECK(proj_leq(e11, e12));
    CHECK_FALSE(proj_leq(e12, e11));

    Vector plus(2);
    plus << 1.0, 1.0;
    const auto p = Projection::onto(plus);
    const auto q = Projection::from_matrix(diag({1, 0}));
    // oracle: ‖P − QP‖ = 1/√2 for this pair
    CHECK((p.matrix() - q.matrix() * p.matrix()).norm() == doctest::Approx(std::sqrt(0.5)));
    CHECK_FALSE(proj_leq(p, q));
    CHECK_THROWS_AS(proj_leq(e11, q), Error);
}

TEST_CASE("lattice operations examples") {
    const auto p = Projection::from_matrix(diag({1, 0, 1}));
    const auto same = proj_lattice_ops(p, p);
    CHECK(proj_equal(same.meet, p));
    CHECK(proj_equal(same.join, p));
    CHECK(frobenius_distance(same.complement_of_p.matrix(), diag({0, 1, 0})) < 1e-12);

    const auto e1 = Projection::from_matrix(diag({1, 0, 0}));
    const auto e2 = Projection::from_matrix(diag({0, 1, 0}));
    CHECK(frobenius_distance(proj_join(e1, e2).matrix(), e1.matrix() + e2.matrix()) < 1e-12);

    Vector plus(2);
    plus << 1.0, 1.0;
    const auto ops = proj_lattice_ops(Projection::from_matrix(diag({1, 0})), Projection::onto(plus));
    CHECK(ops.meet.rank() == 0);
    CHECK(ops.join.rank() == 2);
}

TEST_CASE("meet and join agree with the null-space oracle") {
    Rng rng(5);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 3 + static_cast<int>(index(rng, 2));
        // share a random subspace so meets are often non-trivial
        const Matrix u = random_unitary(n, rng);
        const int shared = static_cast<int>(index(rng, 2));
        Matrix bp = u.leftCols(shared + 1), bq(n, shared + 1);
        bq << u.leftCols(shared), u.col(shared + 1);
        if (uniform(rng) < 0.3) bq.col(shared) = random_unit_vector(n, rng);
        const auto p = Projection::rounded(bp * bp.adjoint());
        const auto q = Projection::rounded(bq * bq.adjoint());
        const Matrix meet = meet_oracle(p.matrix(), q.matrix());
        CHECK(frobenius_distance(proj_meet(p, q).matrix(), meet) < 1e-8);
        const Matrix join = Matrix::Identity(n, n) - meet_oracle(p.complement().matrix(), q.complement().matrix());
        CHECK(frobenius_distance(proj_join(p, q).matrix(), join) < 1e-8);
    }
}

TEST_CASE("complement is an exact involution") {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const auto p = Projection::onto(random_unit_vector(4, rng));
        const auto cc = p.complement().complement();
        CHECK((cc.matrix() - p.matrix()).norm() == 0.0);
    }
}

TEST_CASE("De Morgan holds for commuting pairs") {
    Rng rng(9);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 4;
        const Matrix u = random_unitary(n, rng);
        Matrix dp = Matrix::Zero(n, n), dq = Matrix::Zero(n, n);
        for (int k = 0; k < n; ++k) {
            dp(k, k) = static_cast<double>(index(rng, 2));
            dq(k, k) = static_cast<double>(index(rng, 2));
        }
        const auto p = Projection::rounded(u * dp * u.adjoint());
        const auto q = Projection::rounded(u * dq * u.adjoint());
        const auto lhs = proj_join(p, q).complement();
        const auto rhs = proj_meet(p.complement(), q.complement());
        CHECK(frobenius_distance(lhs.matrix(), rhs.matrix()) < 1e-9);
    }
}

TEST_CASE("proj_leq is antisymmetric on a random pool") {
    Rng rng(21);
    std::vector<Projection> pool;
    const Matrix u = random_unitary(3, rng);
    for (unsigned s = 0; s < 8; ++s) {
        Matrix d = Matrix::Zero(3, 3);
        for (int k = 0; k < 3; ++k) d(k, k) = (s >> k) & 1u;
        pool.push_back(Projection::rounded(u * d * u.adjoint()));
    }
    for (int k = 0; k < 6; ++k) pool.push_back(Projection::onto(random_unit_vector(3, rng)));
    for (const auto& p : pool)
        for (const auto& q : pool)
            if (proj_leq(p, q) && proj_leq(q, p)) CHECK(frobenius_distance(p.matrix(), q.matrix()) <= 2e-9);
}

TEST_CASE("tolerances validation") {
    Tolerances tol;
    CHECK_NOTHROW(tol.validate());
    tol.eig_group = tol.idem / 2;
    CHECK_THROWS_AS(tol.validate(), Error);
    tol = {};
    tol.order = 0;
    CHECK_THROWS_AS(tol.validate(), Error);
}

TEST_CASE("commute and dimension checks") {
    CHECK(commute(diag({1, 2}), diag({3, 4}), 1e-12));
    Matrix x = Matrix::Zero(2, 2);
    x(0, 1) = x(1, 0) = 1.0;
    CHECK_FALSE(commute(diag({1, 2}), x, 1e-12));
    CHECK_THROWS_AS(require_same_dim(2, 3, "test"), Error);
}
