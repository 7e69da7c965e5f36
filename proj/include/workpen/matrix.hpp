// matrix.hpp — Small dense square complex matrices (row-major, value semantics)
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "workpen/errors.hpp"

namespace workpen {

using Complex = std::complex<double>;

class ComplexMatrix {
  public:
    ComplexMatrix() = default;

    explicit ComplexMatrix(std::size_t n) : n_(n), a_(n * n, Complex{0.0, 0.0}) {}

    ComplexMatrix(std::size_t n, std::vector<Complex> entries) : n_(n), a_(std::move(entries)) {
        if (a_.size() != n_ * n_) {
            throw DimMismatchError("ComplexMatrix: entry count does not match dimension");
        }
    }

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t dim() const noexcept { return n_; }

    Complex& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

    ComplexMatrix& operator+=(const ComplexMatrix& o) {
        check_same_dim(o);
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
        return *this;
    }

    ComplexMatrix& operator-=(const ComplexMatrix& o) {
        check_same_dim(o);
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
        return *this;
    }

    ComplexMatrix& operator*=(Complex s) {
        for (auto& x : a_) x *= s;
        return *this;
    }

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
    friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }

    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
        a.check_same_dim(b);
        const std::size_t n = a.n_;
        ComplexMatrix c(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < n; ++k) {
                const Complex aik = a(i, k);
                if (aik == Complex{0.0, 0.0}) continue;
                for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
            }
        }
        return c;
    }

    ComplexMatrix adjoint() const {
        ComplexMatrix r(n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) r(j, i) = std::conj((*this)(i, j));
        return r;
    }

    Complex trace() const {
        Complex t{0.0, 0.0};
        for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
        return t;
    }

    // Largest entrywise modulus.
    double max_abs() const {
        double m = 0.0;
        for (const auto& x : a_) m = std::max(m, std::abs(x));
        return m;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (const auto& x : a_) s += std::norm(x);
        return std::sqrt(s);
    }

    // max_ij |M_ij - conj(M_ji)|
    double hermiticity_deviation() const {
        double d = 0.0;
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = i; j < n_; ++j)
                d = std::max(d, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
        return d;
    }

    // (M + M†)/2
    ComplexMatrix symmetrized() const {
        ComplexMatrix r(n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j)
                r(i, j) = 0.5 * ((*this)(i, j) + std::conj((*this)(j, i)));
        return r;
    }

    bool operator==(const ComplexMatrix& o) const = default;

  private:
    void check_same_dim(const ComplexMatrix& o) const {
        if (n_ != o.n_) throw DimMismatchError("ComplexMatrix: dimension mismatch");
    }

    std::size_t n_ = 0;
    std::vector<Complex> a_;
};

inline ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
    return a * b - b * a;
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    return (a - b).max_abs();
}

}  // namespace workpen
