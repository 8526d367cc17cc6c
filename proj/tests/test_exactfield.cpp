#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "ivd/exactfield.hpp"
#include "ivd/random.hpp"

using namespace ivd;

namespace {

FieldMatrix random_matrix(std::size_t r, std::size_t c, std::uint32_t p, Rng& rng) {
    FieldMatrix m(r, c, p);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m.at(i, j) = static_cast<Residue>(rng.below(p));
    return m;
}

// Size of the row space by enumerating every combination of rows.
std::size_t row_space_size(const FieldMatrix& m) {
    const std::uint32_t p = m.characteristic();
    const PrimeField f(p);
    std::set<FieldVector> seen;
    std::vector<Residue> coef(m.rows(), 0);
    for (;;) {
        FieldVector v(m.cols(), 0);
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = 0; j < m.cols(); ++j) v[j] = f.add(v[j], f.mul(coef[i], m(i, j)));
        seen.insert(v);
        std::size_t t = 0;
        while (t < coef.size() && ++coef[t] == p) coef[t++] = 0;
        if (t == coef.size()) break;
    }
    return seen.size();
}

} // namespace

TEST_CASE("primality") {
    CHECK(is_prime(2));
    CHECK(is_prime(3));
    CHECK(is_prime(65521));
    CHECK_FALSE(is_prime(0));
    CHECK_FALSE(is_prime(1));
    CHECK_FALSE(is_prime(91));
    CHECK_THROWS_AS(PrimeField(4), std::invalid_argument);
}

TEST_CASE("field inverses") {
    for (std::uint32_t p : {2u, 3u, 7u, 101u}) {
        const PrimeField f(p);
        for (Residue a = 1; a < p; ++a) CHECK(f.mul(a, f.inv(a)) == 1);
        CHECK(f.reduce(-1) == p - 1);
    }
}

TEST_CASE("rank depends on the characteristic") {
    CHECK(rank(FieldMatrix::from_rows({{1, 1}, {1, -1}}, 2)) == 1);
    CHECK(rank(FieldMatrix::from_rows({{1, 1}, {1, -1}}, 3)) == 2);
    CHECK(rank(FieldMatrix(3, 0, 2)) == 0);
}

TEST_CASE("rank agrees with row-space enumeration") {
    Rng rng(11);
    for (std::uint32_t p : {2u, 3u}) {
        for (int t = 0; t < 40; ++t) {
            const FieldMatrix m = random_matrix(1 + rng.below(4), 1 + rng.below(5), p, rng);
            std::size_t expected = 1;
            for (std::size_t r = 0; r < rank(m); ++r) expected *= p;
            CHECK(row_space_size(m) == expected);
        }
    }
}

TEST_CASE("kernel satisfies rank-nullity and annihilates") {
    Rng rng(12);
    for (int t = 0; t < 50; ++t) {
        const std::uint32_t p = t % 2 ? 5 : 2;
        const FieldMatrix a = random_matrix(1 + rng.below(6), 1 + rng.below(6), p, rng);
        const FieldMatrix k = kernel_matrix(a);
        CHECK(k.cols() + rank(a) == a.cols());
        CHECK((a * k).is_zero());
        CHECK(rank(k) == k.cols());
    }
}

TEST_CASE("solve returns a solution when one exists") {
    Rng rng(13);
    for (int t = 0; t < 50; ++t) {
        const FieldMatrix a = random_matrix(4, 3, 7, rng);
        FieldVector x(3);
        for (auto& v : x) v = static_cast<Residue>(rng.below(7));
        const FieldVector b = a.apply(x);
        const auto y = solve(a, b);
        REQUIRE(y);
        CHECK(a.apply(*y) == b);
    }
    // x + y = 0 and x + y = 1 over GF(2)
    CHECK_FALSE(solve(FieldMatrix::from_rows({{1, 1}, {1, 1}}, 2), FieldVector{0, 1}));
    CHECK_THROWS_AS(solve(FieldMatrix(2, 2, 2), FieldVector{0}), std::invalid_argument);
}

TEST_CASE("inverse and column space") {
    Rng rng(14);
    for (int t = 0; t < 30; ++t) {
        const FieldMatrix a = random_matrix(4, 4, 3, rng);
        const auto inv = inverse(a);
        CHECK(inv.has_value() == (rank(a) == 4));
        if (inv) CHECK((a * *inv).is_identity());
        const FieldMatrix cs = column_space(a);
        CHECK(cs.cols() == rank(a));
        CHECK(rank(FieldMatrix::hconcat(a, cs)) == rank(a));
    }
    CHECK_FALSE(inverse(FieldMatrix::from_rows({{1, 2}, {2, 4}}, 5)));
}

TEST_CASE("shape errors") {
    const FieldMatrix a(2, 3, 2), b(2, 3, 2);
    CHECK_THROWS_AS(a * b, std::invalid_argument);
    CHECK_THROWS_AS(a * FieldMatrix(3, 1, 3), std::invalid_argument);
    CHECK_THROWS(FieldMatrix::from_entries(2, 2, {0, 1, 2}, 2));
    CHECK(FieldMatrix::identity(3, 5).transpose().is_identity());
}
