#include "hinform/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace hinform {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw DimensionMismatch(what);
}

}  // namespace

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    if (r == 0) throw DimensionMismatch("from_rows: no rows");
    const std::size_t c = rows.begin()->size();
    std::vector<double> data;
    data.reserve(r * c);
    for (const auto& row : rows) {
        if (row.size() != c) throw DimensionMismatch("from_rows: ragged rows");
        data.insert(data.end(), row.begin(), row.end());
    }
    return from_data(r, c, std::move(data));
}

Matrix Matrix::from_data(std::size_t rows, std::size_t cols, std::vector<double> data) {
    if (data.size() != rows * cols)
        throw DimensionMismatch("from_data: entry count does not match dimensions");
    for (double x : data)
        if (!std::isfinite(x)) throw NotFiniteValue("matrix entry is not finite");
    Matrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.data_ = std::move(data);
    return m;
}

bool Matrix::is_finite() const noexcept {
    for (double x : data_)
        if (!std::isfinite(x)) return false;
    return true;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
    require(a.cols() == b.rows(), "multiply: inner dimensions differ");
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
        }
    }
    return out;
}

Matrix transposed(const Matrix& a) {
    Matrix out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
    return out;
}

Matrix add(const Matrix& a, const Matrix& b) {
    require(a.rows() == b.rows() && a.cols() == b.cols(), "add: dimensions differ");
    Matrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) + b(i, j);
    return out;
}

Matrix subtract(const Matrix& a, const Matrix& b) {
    require(a.rows() == b.rows() && a.cols() == b.cols(), "subtract: dimensions differ");
    Matrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) - b(i, j);
    return out;
}

Matrix scaled(const Matrix& a, double factor) {
    Matrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = factor * a(i, j);
    return out;
}

std::vector<double> mat_vec(const Matrix& a, std::span<const double> v) {
    require(a.cols() == v.size(), "mat_vec: dimensions differ");
    std::vector<double> out(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * v[j];
        out[i] = acc;
    }
    return out;
}

double trace(const Matrix& a) {
    require(a.rows() == a.cols(), "trace: matrix not square");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) acc += a(i, i);
    return acc;
}

double frobenius_norm(const Matrix& a) {
    double acc = 0.0;
    for (double x : a.flat()) acc += x * x;
    return std::sqrt(acc);
}

double frobenius_distance(const Matrix& a, const Matrix& b) {
    require(a.rows() == b.rows() && a.cols() == b.cols(),
            "frobenius_distance: dimensions differ");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const double diff = a(i, j) - b(i, j);
            acc += diff * diff;
        }
    return std::sqrt(acc);
}

double max_abs(const Matrix& a) {
    double m = 0.0;
    for (double x : a.flat()) m = std::max(m, std::abs(x));
    return m;
}

Matrix symmetrized(const Matrix& a) {
    require(a.rows() == a.cols(), "symmetrized: matrix not square");
    Matrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = 0.5 * (a(i, j) + a(j, i));
    return out;
}

bool is_symmetric(const Matrix& a, double rel_tol) {
    if (a.rows() != a.cols()) return false;
    const double scale = std::max(1.0, frobenius_norm(a));
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j)
            if (std::abs(a(i, j) - a(j, i)) > rel_tol * scale) return false;
    return true;
}

Matrix cholesky_lower(const Matrix& p) {
    require(p.rows() == p.cols(), "cholesky_lower: matrix not square");
    if (!is_symmetric(p))
        throw DimensionMismatch("cholesky_lower: matrix not symmetric");
    const std::size_t n = p.rows();
    const double pivot_tol = 1e-12 * std::max(1.0, frobenius_norm(p));
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double diag = p(j, j);
        for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
        if (diag <= pivot_tol)
            throw NotPositiveDefinite("cholesky_lower: pivot " + std::to_string(diag) +
                                      " at index " + std::to_string(j) +
                                      " below tolerance " + std::to_string(pivot_tol));
        l(j, j) = std::sqrt(diag);
        for (std::size_t i = j + 1; i < n; ++i) {
            double acc = p(i, j);
            for (std::size_t k = 0; k < j; ++k) acc -= l(i, k) * l(j, k);
            l(i, j) = acc / l(j, j);
        }
    }
    return l;
}

namespace {

double triangular_pivot_tol(const Matrix& l) {
    return 1e-12 * std::max(1.0, frobenius_norm(l));
}

}  // namespace

Matrix solve_lower_triangular(const Matrix& l, const Matrix& rhs) {
    require(l.rows() == l.cols(), "solve_lower_triangular: L not square");
    require(l.rows() == rhs.rows(), "solve_lower_triangular: dimensions differ");
    const std::size_t n = l.rows();
    const double tol = triangular_pivot_tol(l);
    Matrix x(n, rhs.cols());
    for (std::size_t c = 0; c < rhs.cols(); ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(l(i, i)) <= tol)
                throw SingularTriangular("solve_lower_triangular: zero diagonal at " +
                                         std::to_string(i));
            double acc = rhs(i, c);
            for (std::size_t k = 0; k < i; ++k) acc -= l(i, k) * x(k, c);
            x(i, c) = acc / l(i, i);
        }
    }
    return x;
}

Matrix solve_lower_transposed(const Matrix& l, const Matrix& rhs) {
    require(l.rows() == l.cols(), "solve_lower_transposed: L not square");
    require(l.rows() == rhs.rows(), "solve_lower_transposed: dimensions differ");
    const std::size_t n = l.rows();
    const double tol = triangular_pivot_tol(l);
    Matrix x(n, rhs.cols());
    for (std::size_t c = 0; c < rhs.cols(); ++c) {
        for (std::size_t ii = n; ii-- > 0;) {
            if (std::abs(l(ii, ii)) <= tol)
                throw SingularTriangular("solve_lower_transposed: zero diagonal at " +
                                         std::to_string(ii));
            double acc = rhs(ii, c);
            for (std::size_t k = ii + 1; k < n; ++k) acc -= l(k, ii) * x(k, c);
            x(ii, c) = acc / l(ii, ii);
        }
    }
    return x;
}

Matrix solve_general(const Matrix& a, const Matrix& rhs) {
    require(a.rows() == a.cols(), "solve_general: A not square");
    require(a.rows() == rhs.rows(), "solve_general: dimensions differ");
    const std::size_t n = a.rows();
    Matrix lu = a;
    Matrix x = rhs;
    const double tol = 1e-14 * std::max(1.0, frobenius_norm(a));
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(lu(i, k)) > std::abs(lu(pivot, k))) pivot = i;
        if (std::abs(lu(pivot, k)) <= tol)
            throw SingularMatrix("solve_general: matrix is singular to working precision");
        if (pivot != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(pivot, j));
            for (std::size_t j = 0; j < x.cols(); ++j) std::swap(x(k, j), x(pivot, j));
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = lu(i, k) / lu(k, k);
            lu(i, k) = 0.0;
            if (f == 0.0) continue;
            for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= f * lu(k, j);
            for (std::size_t j = 0; j < x.cols(); ++j) x(i, j) -= f * x(k, j);
        }
    }
    for (std::size_t c = 0; c < x.cols(); ++c) {
        for (std::size_t ii = n; ii-- > 0;) {
            double acc = x(ii, c);
            for (std::size_t k = ii + 1; k < n; ++k) acc -= lu(ii, k) * x(k, c);
            x(ii, c) = acc / lu(ii, ii);
        }
    }
    return x;
}

std::vector<double> trace_powers(const Matrix& a, std::size_t kmax) {
    require(a.rows() == a.cols(), "trace_powers: matrix not square");
    require(kmax >= 1, "trace_powers: kmax must be positive");
    std::vector<double> out;
    out.reserve(kmax);
    Matrix power = a;
    out.push_back(trace(power));
    for (std::size_t k = 1; k < kmax; ++k) {
        power = multiply(power, a);
        out.push_back(trace(power));
    }
    return out;
}

}  // namespace hinform
