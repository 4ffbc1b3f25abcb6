#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hf/numerics.hpp"

using namespace hf;

namespace {

// Independent matvec oracle: walks the raw buffer column-by-column, so it
// shares no loop structure with the implementation.
Vector matvec_oracle(const Matrix& m, const Vector& v) {
    Vector out(m.rows(), 0.0);
    const std::vector<double>& data = m.data();
    for (std::size_t j = 0; j < m.cols(); ++j) {
        for (std::size_t i = 0; i < m.rows(); ++i) {
            out[i] += data[i * m.cols() + j] * v[j];
        }
    }
    return out;
}

}  // namespace

TEST_CASE("matvec identity and zero") {
    Matrix eye(2, 2, {1, 0, 0, 1});
    CHECK(matvec(eye, {3, 4}) == Vector{3, 4});

    Matrix zero(2, 3);
    CHECK(matvec(zero, {1.5, -2, 7}) == Vector{0, 0});
}

TEST_CASE("matvec hand-computed row sums") {
    Matrix m(2, 2, {1, 2, 3, 4});
    Vector r = matvec(m, {1, 1});
    CHECK(r[0] == doctest::Approx(3).epsilon(1e-15));
    CHECK(r[1] == doctest::Approx(7).epsilon(1e-15));
}

TEST_CASE("matvec shape error names both shapes") {
    Matrix m(2, 3);
    CHECK_THROWS_WITH_AS(matvec(m, {1, 2}), doctest::Contains("2x3"), ShapeError);
}

TEST_CASE("matvec matches the scalar-loop oracle on random shapes") {
    Rng rng(12345);
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t rows = 1 + rng.below(12);
        std::size_t cols = 1 + rng.below(12);
        Matrix m = rand_uniform(rng, rows, cols, -5.0, 5.0);
        Vector v(cols);
        for (double& x : v) x = rng.uniform(-5.0, 5.0);

        Vector got = matvec(m, v);
        Vector want = matvec_oracle(m, v);
        for (std::size_t i = 0; i < rows; ++i) {
            double denom = std::max(std::fabs(want[i]), 1.0);
            CHECK(std::fabs(got[i] - want[i]) / denom <= 1e-12);
        }
    }
}

TEST_CASE("matvec_transposed agrees with an explicit transpose") {
    Rng rng(99);
    Matrix m = rand_uniform(rng, 4, 6, -1.0, 1.0);
    Vector v{0.5, -1.0, 2.0, 0.25};

    Matrix mt(6, 4);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 6; ++j) mt(j, i) = m(i, j);

    Vector got = matvec_transposed(m, v);
    Vector want = matvec(mt, v);
    for (std::size_t j = 0; j < 6; ++j) CHECK(got[j] == doctest::Approx(want[j]).epsilon(1e-14));
}

TEST_CASE("concat definition and empty case") {
    CHECK(concat({1}, {2, 3}) == Vector{1, 2, 3});
    CHECK(concat({}, {5}) == Vector{5});
    CHECK(concat({0.5, -0.5}, {0.25}) == Vector{0.5, -0.5, 0.25});
}

TEST_CASE("concat length over randomized lengths") {
    Rng rng(4242);
    for (int trial = 0; trial < 100; ++trial) {
        Vector a(rng.below(101)), b(rng.below(101));
        CHECK(concat(a, b).size() == a.size() + b.size());
    }
}

TEST_CASE("sigmoid values") {
    CHECK(sigmoid({0})[0] == 0.5);
    CHECK(sigmoid({1})[0] == doctest::Approx(0.7310585786300049).epsilon(1e-12));

    Vector sat = sigmoid({1000.0});
    CHECK(sat[0] == doctest::Approx(1.0));
    CHECK(std::isfinite(sat[0]));
    CHECK(sat[0] <= 1.0);
}

TEST_CASE("sigmoid and tanh survive extreme finite inputs") {
    for (double x : {1e308, -1e308, 700.0, -700.0, 0.0}) {
        Vector s = sigmoid({x});
        Vector t = tanh_v({x});
        CHECK(std::isfinite(s[0]));
        CHECK(std::isfinite(t[0]));
        CHECK(s[0] >= 0.0);
        CHECK(s[0] <= 1.0);
        CHECK(t[0] >= -1.0);
        CHECK(t[0] <= 1.0);
    }
}

TEST_CASE("sigmoid and tanh are monotone nondecreasing") {
    Rng rng(7);
    Vector xs(200);
    for (double& x : xs) x = rng.uniform(-50.0, 50.0);
    std::sort(xs.begin(), xs.end());
    Vector s = sigmoid(xs);
    Vector t = tanh_v(xs);
    for (std::size_t i = 1; i < xs.size(); ++i) {
        CHECK(s[i] >= s[i - 1]);
        CHECK(t[i] >= t[i - 1]);
    }
}

TEST_CASE("tanh values and odd symmetry") {
    CHECK(tanh_v({0})[0] == 0.0);
    CHECK(tanh_v({1})[0] == doctest::Approx(0.7615941559557649).epsilon(1e-12));
    CHECK(tanh_v({-0.7})[0] == doctest::Approx(-tanh_v({0.7})[0]).epsilon(1e-15));
}

TEST_CASE("hadamard") {
    CHECK(hadamard({1, 1}, {3.5, -2}) == Vector{3.5, -2});
    CHECK(hadamard({0, 0}, {9, 9}) == Vector{0, 0});
    Vector r = hadamard({0.5, 2}, {4, 0.5});
    CHECK(r[0] == doctest::Approx(2.0));
    CHECK(r[1] == doctest::Approx(1.0));
    CHECK_THROWS_AS(hadamard({1}, {1, 2}), ShapeError);
}

TEST_CASE("add and add_outer") {
    CHECK(add({1, 2}, {3, 4}) == Vector{4, 6});
    CHECK_THROWS_AS(add({1}, {1, 2}), ShapeError);

    Matrix m(2, 2);
    add_outer(m, {1, 2}, {3, 4});
    CHECK(m(0, 0) == 3);
    CHECK(m(0, 1) == 4);
    CHECK(m(1, 0) == 6);
    CHECK(m(1, 1) == 8);
}

TEST_CASE("rand_uniform determinism and bounds") {
    Rng a(7), b(7), c(8);
    Matrix ma = rand_uniform(a, 4, 5, -2.0, 3.0);
    Matrix mb = rand_uniform(b, 4, 5, -2.0, 3.0);
    Matrix mc = rand_uniform(c, 4, 5, -2.0, 3.0);
    CHECK(ma.data() == mb.data());
    CHECK(ma.data() != mc.data());

    double lo = 1.0, hi = 1.0 + 1e-9;
    Rng tight(3);
    Matrix mt = rand_uniform(tight, 10, 10, lo, hi);
    for (double x : mt.data()) {
        CHECK(x >= lo);
        CHECK(x < hi);
    }

    Rng bad(1);
    CHECK_THROWS_AS(rand_uniform(bad, 2, 2, 1.0, 1.0), ParameterError);
}

TEST_CASE("rng equal seeds give equal 10000-value prefixes") {
    Rng a(123456789), b(123456789);
    for (int i = 0; i < 10000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("matrix data length must match shape") {
    CHECK_THROWS_AS(Matrix(2, 2, {1.0, 2.0, 3.0}), ShapeError);
}
