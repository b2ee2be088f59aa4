#ifndef WALKSPEC_BIGMATH_HPP
#define WALKSPEC_BIGMATH_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <complex>
#include <stdexcept>
#include <vector>

namespace walkspec {

using BigInt = boost::multiprecision::cpp_int;
using Complex = std::complex<double>;

// Dense row-major matrix over an exact scalar (BigInt in practice).
// Counting matrices stay small (n <= a few hundred) so no sparse path.
template <typename T>
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols, T init = T(0))
        : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, init) {
        if (rows < 0 || cols < 0) throw std::invalid_argument("Matrix: negative dimension");
    }

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    T& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
    const T& operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }

    bool operator==(const Matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }
    bool operator!=(const Matrix& o) const { return !(*this == o); }

    Matrix operator+(const Matrix& o) const {
        require_same_shape(o);
        Matrix r(rows_, cols_);
        for (size_t k = 0; k < data_.size(); ++k) r.data_[k] = data_[k] + o.data_[k];
        return r;
    }

    Matrix operator-(const Matrix& o) const {
        require_same_shape(o);
        Matrix r(rows_, cols_);
        for (size_t k = 0; k < data_.size(); ++k) r.data_[k] = data_[k] - o.data_[k];
        return r;
    }

    Matrix operator*(const Matrix& o) const {
        if (cols_ != o.rows_) throw std::invalid_argument("Matrix multiply: shape mismatch");
        Matrix r(rows_, o.cols_);
        for (int i = 0; i < rows_; ++i)
            for (int k = 0; k < cols_; ++k) {
                const T& a = (*this)(i, k);
                if (a == T(0)) continue;
                for (int j = 0; j < o.cols_; ++j) r(i, j) += a * o(k, j);
            }
        return r;
    }

    Matrix operator*(const T& s) const {
        Matrix r(rows_, cols_);
        for (size_t k = 0; k < data_.size(); ++k) r.data_[k] = data_[k] * s;
        return r;
    }

    Matrix transpose() const {
        Matrix r(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
        return r;
    }

    Matrix pow(unsigned long long e) const {
        if (rows_ != cols_) throw std::invalid_argument("Matrix pow: not square");
        Matrix base = *this;
        Matrix acc = identity(rows_);
        while (e > 0) {
            if (e & 1ULL) acc = acc * base;
            base = base * base;
            e >>= 1ULL;
        }
        return acc;
    }

    T trace() const {
        T t(0);
        for (int i = 0; i < rows_ && i < cols_; ++i) t += (*this)(i, i);
        return t;
    }

    bool is_zero() const {
        for (const T& v : data_)
            if (v != T(0)) return false;
        return true;
    }

private:
    void require_same_shape(const Matrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw std::invalid_argument("Matrix: shape mismatch");
    }

    int rows_ = 0;
    int cols_ = 0;
    std::vector<T> data_;
};

using IntMatrix = Matrix<BigInt>;

inline BigInt binomial(long long n, long long k) {
    if (k < 0 || k > n) return 0;
    BigInt r = 1;
    for (long long i = 1; i <= k; ++i) {
        r *= n - k + i;
        r /= i;
    }
    return r;
}

// n choose k as a double, for n possibly large but k small.
inline double binomial_real(long long n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r *= double(n - k + i) / double(i);
    return r;
}

// lambda^e with the convention 0^e = 1 for e <= 0 and 0^e = 0 for e > 0.
inline Complex cpow_int(Complex lambda, long long e) {
    if (std::abs(lambda) == 0.0) return e <= 0 ? Complex(1.0, 0.0) : Complex(0.0, 0.0);
    return std::pow(lambda, Complex(double(e), 0.0));
}

}  // namespace walkspec

#endif
