#pragma once

#include <complex>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace dossim {

/**
 * Dense real matrix, row-major storage. Dimensions in this project stay
 * small (couplings and comparison matrices up to ~6x6), so everything is
 * direct dense arithmetic.
 */
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols);
    Matrix(std::initializer_list<std::initializer_list<double>> init);

    static Matrix identity(int n);
    static Matrix zeros(int rows, int cols);
    static Matrix diagonal(std::span<const double> entries);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
    double operator()(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }

    const std::vector<double>& data() const { return data_; }

    Matrix transpose() const;
    Matrix operator+(const Matrix& rhs) const;
    Matrix operator-(const Matrix& rhs) const;
    Matrix operator-() const { return *this * -1.0; }
    Matrix operator*(const Matrix& rhs) const;
    Matrix operator*(double s) const;
    Matrix& operator+=(const Matrix& rhs);

    /// y = M x for a stacked vector.
    std::vector<double> apply(std::span<const double> x) const;

    /// Largest absolute entry.
    double max_abs() const;

    bool is_square() const { return rows_ == cols_ && rows_ > 0; }
    bool is_symmetric(double rel_tol) const;
    bool all_finite() const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

Matrix operator*(double s, const Matrix& m);

/// Solves A x = b by Gaussian elimination with partial pivoting.
/// Throws SingularSystem when no pivot is available.
std::vector<double> solve_linear(Matrix a, std::vector<double> b);

/// All eigenvalues of a (possibly nonsymmetric) square matrix.
/// Characteristic polynomial for dim <= 3, shifted QR iteration above.
std::vector<std::complex<double>> eigenvalues(const Matrix& m);

/// Eigenvalues of a symmetric matrix via cyclic Jacobi, sorted ascending.
/// Symmetry is assumed, not checked.
std::vector<double> symmetric_eigenvalues(const Matrix& m);

/// Unique P with Phi' P + P Phi + Q = 0 for Hurwitz Phi and symmetric
/// positive definite Q, via the vectorized (Kronecker) linear system.
Matrix solve_lyapunov(const Matrix& phi, const Matrix& q);

/// Largest eigenvalue modulus of a square nonnegative matrix.
double spectral_radius(const Matrix& m);

/// Largest singular value.
double spectral_norm(const Matrix& m);

/// lambda_max((M + M') / 2).
double log_norm(const Matrix& m);

/// (lambda_min, lambda_max) of a symmetric matrix.
std::pair<double, double> eig_extremes_symmetric(const Matrix& m);

/// True iff every eigenvalue real part is strictly negative.
bool is_hurwitz(const Matrix& m);

/// Euclidean norm of a vector.
double vec_norm(std::span<const double> v);

}  // namespace dossim
