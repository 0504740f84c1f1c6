#include <doctest.h>

#include <algorithm>
#include <random>

#include "leadform/errors.hpp"
#include "leadform/spectrum.hpp"
#include "test_support.hpp"

using namespace leadform;

namespace {

double closest(const std::vector<Complex>& roots, Complex z) {
    double best = 1e300;
    for (const auto& r : roots) best = std::min(best, std::abs(r - z));
    return best;
}

}  // namespace

TEST_CASE("Faddeev-LeVerrier on small matrices") {
    Matrix two(2, 2);
    two << 1, 2, 3, 4;
    auto p = characteristic_polynomial(two);
    REQUIRE(p.size() == 3);
    CHECK(p[0] == 1.0);
    CHECK(p[1] == doctest::Approx(-5));
    CHECK(p[2] == doctest::Approx(-2));

    auto zero = characteristic_polynomial(Matrix::Zero(3, 3));
    CHECK(zero == Polynomial{1, 0, 0, 0});

    CHECK_THROWS_AS(characteristic_polynomial(Matrix::Zero(2, 3)), Error);
}

TEST_CASE("evaluate uses Horner on complex arguments") {
    Polynomial p{1, 0, 1};  // s^2 + 1
    CHECK(std::abs(evaluate(p, Complex(0, 1))) < 1e-15);
    CHECK(evaluate(p, Complex(2, 0)).real() == doctest::Approx(5));
}

TEST_CASE("roots of simple, repeated and complex polynomials") {
    auto r = polynomial_roots({1, -3, 2});
    REQUIRE(r.size() == 2);
    CHECK(r[0].real() == doctest::Approx(1));
    CHECK(r[1].real() == doctest::Approx(2));

    // (s + 2)^3 s^2: clustered triple root plus exact zeros
    auto rep = polynomial_roots(testing::poly_from_roots({{-2, 0}, {-2, 0}, {-2, 0}, {0, 0}, {0, 0}}));
    REQUIRE(rep.size() == 5);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(rep[k] - Complex(-2, 0)) < 1e-9);
    CHECK(std::abs(rep[3]) == 0.0);
    CHECK(std::abs(rep[4]) == 0.0);

    // (s^2 + 2s + 5)(s + 1)
    auto cx = polynomial_roots({1, 3, 7, 5});
    REQUIRE(cx.size() == 3);
    CHECK(closest(cx, {-1, 2}) < 1e-12);
    CHECK(closest(cx, {-1, -2}) < 1e-12);
    CHECK(closest(cx, {-1, 0}) < 1e-12);
    CHECK(cx[0].imag() < cx[1].imag());

    CHECK(polynomial_roots({1}).empty());
}

TEST_CASE("spectrum of the cyclic four-agent matrix") {
    Matrix a(4, 4);
    a << -3, 1, 0, 7,
          0, -4, 2, 0,
         -3, 0, -4, -2,
          0, 0, 0, 0;
    auto s = spectrum(a);
    REQUIRE(s.size() == 4);
    CHECK(closest(s, {0, 0}) < 1e-12);
    CHECK(closest(s, {-5.5377, 0}) < 1e-3);
    CHECK(closest(s, {-2.7312, 1.5140}) < 1e-3);
    CHECK(closest(s, {-2.7312, -1.5140}) < 1e-3);
    auto oracle = testing::eigenvalues(a);
    CHECK(multiset_distance(s, oracle) < 1e-10);
}

TEST_CASE("multiset_distance") {
    std::vector<Complex> a{{1, 0}, {2, 0}, {2, 0}};
    std::vector<Complex> b{{2, 0}, {1, 0}, {2, 1e-7}};
    CHECK(multiset_distance(a, b) == doctest::Approx(1e-7));
    std::vector<Complex> c{{1, 0}, {1, 0}, {2, 0}};
    CHECK(multiset_distance(a, c) == doctest::Approx(1));
    CHECK(std::isinf(multiset_distance(a, std::vector<Complex>{{1, 0}})));
}

TEST_CASE("property: spectrum agrees with an eigensolver") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> value(-3.0, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::uniform_int_distribution<int> size(1, 8);
        const int n = size(rng);
        Matrix a(n, n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) a(r, c) = value(rng);
        CHECK(multiset_distance(spectrum(a), testing::eigenvalues(a)) < 1e-6);
    }
}

TEST_CASE("property: repeated real poles are recovered tightly") {
    std::mt19937_64 rng(32);
    std::uniform_int_distribution<int> pick(1, 5);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Complex> roots;
        std::uniform_int_distribution<int> count(2, 8);
        const int n = count(rng);
        for (int k = 0; k < n; ++k) roots.emplace_back(-0.5 * pick(rng), 0.0);
        auto got = polynomial_roots(testing::poly_from_roots(roots));
        CHECK(multiset_distance(got, roots) < 1e-6);
    }
}

TEST_CASE("nearby distinct roots are not merged") {
    std::vector<Complex> pair{{-1.0, 0}, {-1.01, 0}};
    CHECK(multiset_distance(polynomial_roots(testing::poly_from_roots(pair)), pair) < 1e-9);
    std::vector<Complex> mixed{{-1.0, 0}, {-1.0, 0}, {-1.0, 0}, {-1.02, 0}, {-1.02, 0}, {-3, 0}};
    CHECK(multiset_distance(polynomial_roots(testing::poly_from_roots(mixed)), mixed) < 1e-6);
    std::vector<Complex> conj{{-2, 0.01}, {-2, -0.01}, {-2, 0}};
    CHECK(multiset_distance(polynomial_roots(testing::poly_from_roots(conj)), conj) < 1e-6);
}
