#include "hf/numerics.hpp"

#include <cmath>
#include <string>

namespace hf {

namespace {

std::string shape_of(const Matrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
    if (data_.size() != rows_ * cols_) {
        throw ShapeError("matrix data length " + std::to_string(data_.size()) +
                         " does not match shape " + shape_of(*this));
    }
}

bool Matrix::all_finite() const { return hf::all_finite(data_); }

double Rng::uniform(double lo, double hi) {
    if (!(lo < hi)) {
        throw ParameterError("uniform bounds require lo < hi, got lo=" + std::to_string(lo) +
                             " hi=" + std::to_string(hi));
    }
    return lo + (hi - lo) * next_double();
}

std::size_t Rng::below(std::size_t n) {
    if (n == 0) throw ParameterError("Rng::below requires n > 0");
    return static_cast<std::size_t>(next_u64() % n);
}

Vector matvec(const Matrix& m, const Vector& v) {
    if (m.cols() != v.size()) {
        throw ShapeError("matvec shape mismatch: matrix " + shape_of(m) + " vs vector length " +
                         std::to_string(v.size()));
    }
    Vector out(m.rows(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) acc += m(i, j) * v[j];
        out[i] = acc;
    }
    return out;
}

Vector matvec_transposed(const Matrix& m, const Vector& v) {
    if (m.rows() != v.size()) {
        throw ShapeError("matvec_transposed shape mismatch: matrix " + shape_of(m) +
                         " vs vector length " + std::to_string(v.size()));
    }
    Vector out(m.cols(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) out[j] += m(i, j) * v[i];
    }
    return out;
}

Vector concat(const Vector& a, const Vector& b) {
    Vector out;
    out.reserve(a.size() + b.size());
    out.insert(out.end(), a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

Vector sigmoid(const Vector& v) {
    Vector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        double x = v[i];
        if (x >= 0.0) {
            out[i] = 1.0 / (1.0 + std::exp(-x));
        } else {
            double e = std::exp(x);
            out[i] = e / (1.0 + e);
        }
    }
    return out;
}

Vector tanh_v(const Vector& v) {
    Vector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::tanh(v[i]);
    return out;
}

Vector hadamard(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) {
        throw ShapeError("hadamard length mismatch: " + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()));
    }
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

Vector add(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) {
        throw ShapeError("add length mismatch: " + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()));
    }
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    return out;
}

void add_outer(Matrix& m, const Vector& u, const Vector& v) {
    if (m.rows() != u.size() || m.cols() != v.size()) {
        throw ShapeError("add_outer shape mismatch: matrix " + shape_of(m) + " vs outer " +
                         std::to_string(u.size()) + "x" + std::to_string(v.size()));
    }
    for (std::size_t i = 0; i < u.size(); ++i) {
        for (std::size_t j = 0; j < v.size(); ++j) m(i, j) += u[i] * v[j];
    }
}

Matrix rand_uniform(Rng& rng, std::size_t rows, std::size_t cols, double lo, double hi) {
    if (!(lo < hi)) {
        throw ParameterError("rand_uniform bounds require lo < hi, got lo=" + std::to_string(lo) +
                             " hi=" + std::to_string(hi));
    }
    Matrix m(rows, cols);
    for (double& x : m.data()) x = lo + (hi - lo) * rng.next_double();
    return m;
}

bool all_finite(const Vector& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

}  // namespace hf
