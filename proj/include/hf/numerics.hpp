#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hf/errors.hpp"

namespace hf {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles. Immutable by convention once built:
/// operations return fresh values instead of mutating in place (the training
/// loop, the single writer, goes through data() directly).
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    bool all_finite() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Deterministic seedable generator, self-contained so that equal seeds give
/// equal streams on every platform and toolchain.
///
/// Algorithm: splitmix64 (Steele/Lea/Vigna, public domain). The state walks by
/// the 64-bit golden-ratio constant and each output is the finalized mix of
/// the new state. Doubles take the top 53 bits of an output word, giving a
/// uniform value in [0, 1).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi). Requires lo < hi.
    double uniform(double lo, double hi);

    /// Uniform integer in [0, n). Requires n > 0.
    std::size_t below(std::size_t n);

    /// Fisher-Yates shuffle, consuming one draw per position.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = below(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

/// m * v. Throws ShapeError naming both shapes when m.cols != v.len.
Vector matvec(const Matrix& m, const Vector& v);

/// m^T * v, without materializing the transpose. Requires m.rows == v.len.
Vector matvec_transposed(const Matrix& m, const Vector& v);

/// a's values followed by b's.
Vector concat(const Vector& a, const Vector& b);

/// Elementwise 1/(1+e^-x), computed branchwise so large |x| saturates to the
/// open interval (0, 1) instead of overflowing.
Vector sigmoid(const Vector& v);

/// Elementwise hyperbolic tangent, outputs in (-1, 1).
Vector tanh_v(const Vector& v);

/// Elementwise product. Requires equal lengths.
Vector hadamard(const Vector& a, const Vector& b);

/// Elementwise sum. Requires equal lengths.
Vector add(const Vector& a, const Vector& b);

/// m += u * v^T. Requires m to be u.len x v.len.
void add_outer(Matrix& m, const Vector& u, const Vector& v);

/// Matrix with independent entries uniform in [lo, hi). Same seed, same matrix.
Matrix rand_uniform(Rng& rng, std::size_t rows, std::size_t cols, double lo, double hi);

bool all_finite(const Vector& v);

}  // namespace hf
