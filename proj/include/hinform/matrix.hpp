#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hinform {

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NotFiniteValue : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A symmetric factorization pivot fell below the scale-aware tolerance.
struct NotPositiveDefinite : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SingularTriangular : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SingularMatrix : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Dense real matrix, row-major, double precision.
///
/// Values are immutable in practice: every operation below returns a fresh
/// matrix. Entries are validated to be finite when a matrix is built from
/// user-supplied data.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    static Matrix identity(std::size_t n);
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
    static Matrix from_data(std::size_t rows, std::size_t cols, std::vector<double> data);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<const double> flat() const noexcept { return data_; }
    bool is_finite() const noexcept;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix multiply(const Matrix& a, const Matrix& b);
Matrix transposed(const Matrix& a);
Matrix add(const Matrix& a, const Matrix& b);
Matrix subtract(const Matrix& a, const Matrix& b);
Matrix scaled(const Matrix& a, double factor);
std::vector<double> mat_vec(const Matrix& a, std::span<const double> v);

double trace(const Matrix& a);
double frobenius_norm(const Matrix& a);

/// ||A - B||_F; zero iff the matrices are equal.
double frobenius_distance(const Matrix& a, const Matrix& b);
double max_abs(const Matrix& a);

Matrix symmetrized(const Matrix& a);
bool is_symmetric(const Matrix& a, double rel_tol = 1e-12);

/// Lower Cholesky factor of a symmetric positive definite matrix.
///
/// The diagonal is strictly positive; a pivot at or below
/// 1e-12 * max(1, ||P||_F) raises NotPositiveDefinite, which downstream
/// signals an uncontrollable or unstable source system.
Matrix cholesky_lower(const Matrix& p);

/// Solves L X = RHS by forward substitution (L lower triangular).
Matrix solve_lower_triangular(const Matrix& l, const Matrix& rhs);

/// Solves L^T X = RHS by back substitution.
Matrix solve_lower_transposed(const Matrix& l, const Matrix& rhs);

/// Solves A X = RHS with partial-pivot LU. General-purpose plumbing for
/// non-triangular systems (e.g. inverting a comparison transform).
Matrix solve_general(const Matrix& a, const Matrix& rhs);

/// [tr(A), tr(A^2), ..., tr(A^kmax)] - a similarity-invariant fingerprint
/// used to check spectrum preservation without an eigensolver.
std::vector<double> trace_powers(const Matrix& a, std::size_t kmax);

}  // namespace hinform
