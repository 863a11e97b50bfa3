#include "hinform/hin.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace hinform {

AngleVector AngleVector::make(std::size_t n, std::size_t d, std::vector<double> thetas) {
    if (n == 0 || d == 0) throw DimensionMismatch("AngleVector: n and d must be positive");
    if (thetas.size() != n * d)
        throw DimensionMismatch("AngleVector: expected " + std::to_string(n * d) +
                                " angles, got " + std::to_string(thetas.size()));
    for (double t : thetas)
        if (!std::isfinite(t)) throw NotFiniteValue("AngleVector: angle is not finite");
    return AngleVector{n, d, std::move(thetas)};
}

HinPair::HinPair(Matrix a, Matrix b)
    : n_(a.rows()), d_(b.cols()), a_(std::move(a)), b_(std::move(b)) {}

HinPair HinPair::unchecked(Matrix a, Matrix b) {
    return HinPair(std::move(a), std::move(b));
}

HinPair HinPair::make(Matrix a, Matrix b, bool require_sign) {
    if (a.rows() == 0 || a.rows() != a.cols())
        throw DimensionMismatch("HinPair: advance matrix must be square and nonempty");
    if (b.rows() != a.rows() || b.cols() == 0)
        throw DimensionMismatch("HinPair: control matrix rows must match state dimension");
    if (!a.is_finite() || !b.is_finite())
        throw NotFiniteValue("HinPair: entries must be finite");

    const double in_residual = input_normal_residual(a, b);
    if (in_residual > 1e-10)
        throw InvalidHinPair("HinPair: input-normal residual " + std::to_string(in_residual) +
                             " exceeds 1e-10");
    const std::size_t n = a.rows();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j + 1 < i; ++j)
            if (std::abs(a(i, j)) > 1e-12)
                throw InvalidHinPair("HinPair: advance matrix is not Hessenberg at (" +
                                     std::to_string(i) + "," + std::to_string(j) + ")");
    for (std::size_t i = 1; i < n; ++i)
        if (std::abs(b(i, 0)) > 1e-12)
            throw InvalidHinPair("HinPair: first control column has support below row 0");
    if (require_sign && b(0, 0) < -1e-12)
        throw InvalidHinPair("HinPair: leading control entry is negative");
    return HinPair(std::move(a), std::move(b));
}

Matrix HinPair::concat() const {
    Matrix m(n_, n_ + d_);
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < d_; ++j) m(i, j) = b_(i, j);
        for (std::size_t j = 0; j < n_; ++j) m(i, d_ + j) = a_(i, j);
    }
    return m;
}

double input_normal_residual(const Matrix& a, const Matrix& b) {
    Matrix gram = add(multiply(a, transposed(a)), multiply(b, transposed(b)));
    return frobenius_distance(gram, Matrix::identity(a.rows()));
}

std::vector<Plane> rotation_schedule(std::size_t n, std::size_t d) {
    std::vector<Plane> planes;
    planes.reserve(n * d);
    planes.push_back({d, 0});
    for (std::size_t s = 1; s < d; ++s) planes.push_back({s - 1, s});
    for (std::size_t g = 1; g < n; ++g) {
        planes.push_back({g + d, g + d - 1});
        if (d >= 2) planes.push_back({g + d - 1, d - 1});
        for (std::size_t s = 2; s < d; ++s) planes.push_back({d + 1 - s, d - s});
    }
    return planes;
}

HinClass classify(const HinPair& pair, double zero_tol) {
    const Matrix& a = pair.advance_matrix();
    const double b11 = pair.control_matrix()(0, 0);
    const std::size_t n = pair.state_dim();

    HinClass cls;
    cls.nondegenerate = std::abs(b11) < 1.0 - zero_tol;
    cls.unreduced = std::abs(b11) > zero_tol;
    cls.standard = b11 >= -zero_tol && b11 <= 1.0 + zero_tol;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double sub = a(i + 1, i);
        if (std::abs(sub) <= zero_tol) cls.unreduced = false;
        if (sub < -zero_tol) cls.standard = false;
    }
    cls.strict = cls.unreduced && cls.standard;
    return cls;
}

namespace detail {

Matrix materialize_concat(const AngleVector& angles) {
    const std::size_t n = angles.n;
    const std::size_t d = angles.d;
    Matrix m(n, n + d);
    for (std::size_t i = 0; i < n; ++i) m(i, d + i) = 1.0;
    const auto schedule = rotation_schedule(n, d);
    for (std::size_t idx = 0; idx < schedule.size(); ++idx) {
        const double t = angles.thetas[idx];
        rotate_columns_right(m, schedule[idx].i, schedule[idx].j, std::cos(t), std::sin(t));
    }
    // The rotations leave only roundoff residue (<= 1e-13) in the structural
    // zero positions; write exact zeros so downstream checks are exact.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j + 1 < i; ++j) m(i, d + j) = 0.0;
    for (std::size_t i = 1; i < n; ++i) m(i, 0) = 0.0;
    return m;
}

std::vector<double> extract_angles(Matrix concat, std::size_t n, std::size_t d,
                                   double zero_tol) {
    const auto schedule = rotation_schedule(n, d);
    std::vector<double> thetas(n * d, 0.0);
    for (std::size_t idx = n * d; idx-- > 0;) {
        const auto [i, j] = schedule[idx];
        const std::size_t row = idx / d;
        const double receiver = concat(row, i);
        const double giver = concat(row, j);
        const auto peel = idx % d == 0 ? peel_primary(receiver, giver)
                                       : peel_secondary(receiver, giver, zero_tol);
        thetas[idx] = peel.theta;
        rotate_columns_right(concat, i, j, std::cos(peel.theta), -std::sin(peel.theta));
    }
    return thetas;
}

}  // namespace detail

HinPair angles_to_hin(const AngleVector& angles) {
    Matrix m = detail::materialize_concat(angles);
    const std::size_t n = angles.n;
    const std::size_t d = angles.d;
    Matrix a(n, n);
    Matrix b(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) b(i, j) = m(i, j);
        for (std::size_t j = 0; j < n; ++j) a(i, j) = m(i, d + j);
    }
    // Sign conventions are a classification concern here: out-of-domain
    // angles legitimately materialize pairs with a negative leading entry.
    return HinPair::make(std::move(a), std::move(b), /*require_sign=*/false);
}

AngleVector hin_to_angles(const HinPair& pair) {
    Matrix m = pair.concat();
    const double ortho = frobenius_distance(multiply(m, transposed(m)),
                                            Matrix::identity(pair.state_dim()));
    if (ortho > 1e-8)
        throw NotOrthonormal("hin_to_angles: row-orthonormality residual " +
                             std::to_string(ortho) + " exceeds 1e-8");
    const HinClass cls = classify(pair);
    if (!cls.standard)
        throw NotStandard("hin_to_angles: pair is not sign-standard");
    return AngleVector{pair.state_dim(), pair.input_dim(),
                       detail::extract_angles(std::move(m), pair.state_dim(), pair.input_dim())};
}

AngleVector canonicalize_angles(const AngleVector& angles) {
    Matrix m = detail::materialize_concat(angles);
    return AngleVector{angles.n, angles.d,
                       detail::extract_angles(std::move(m), angles.n, angles.d)};
}

std::vector<double> state_advance(const AngleVector& angles, std::span<const double> z,
                                  std::span<const double> eps, OpCounter* counter) {
    const std::size_t n = angles.n;
    const std::size_t d = angles.d;
    if (z.size() != n || eps.size() != d)
        throw DimensionMismatch("state_advance: vector dimensions differ from angle dimensions");
    std::vector<double> w(n + d);
    for (std::size_t k = 0; k < d; ++k) w[k] = eps[k];
    for (std::size_t k = 0; k < n; ++k) w[d + k] = z[k];
    const auto schedule = rotation_schedule(n, d);
    for (std::size_t idx = n * d; idx-- > 0;) {
        const double t = angles.thetas[idx];
        rotate_left(w, schedule[idx].i, schedule[idx].j, std::cos(t), std::sin(t), counter);
    }
    return {w.begin() + static_cast<std::ptrdiff_t>(d), w.end()};
}

std::vector<double> state_advance_dense(const HinPair& pair, std::span<const double> z,
                                        std::span<const double> eps) {
    std::vector<double> az = mat_vec(pair.advance_matrix(), z);
    const std::vector<double> be = mat_vec(pair.control_matrix(), eps);
    for (std::size_t i = 0; i < az.size(); ++i) az[i] += be[i];
    return az;
}

std::vector<double> state_advance_grad(const AngleVector& angles, std::span<const double> z,
                                       std::span<const double> eps, std::size_t angle_index,
                                       OpCounter* counter) {
    const std::size_t n = angles.n;
    const std::size_t d = angles.d;
    if (angle_index >= n * d)
        throw DimensionMismatch("state_advance_grad: angle index out of range");
    if (z.size() != n || eps.size() != d)
        throw DimensionMismatch("state_advance_grad: vector dimensions differ");
    std::vector<double> w(n + d);
    for (std::size_t k = 0; k < d; ++k) w[k] = eps[k];
    for (std::size_t k = 0; k < n; ++k) w[d + k] = z[k];
    const auto schedule = rotation_schedule(n, d);
    for (std::size_t idx = n * d; idx-- > 0;) {
        const auto [i, j] = schedule[idx];
        const double t = angles.thetas[idx];
        const double c = std::cos(t);
        const double s = std::sin(t);
        if (idx == angle_index) {
            // Angle derivative of the rotation: the 2x2 block becomes
            // [[-s, c], [-c, -s]] and everything outside the plane vanishes.
            const double wi = w[i];
            const double wj = w[j];
            std::fill(w.begin(), w.end(), 0.0);
            w[i] = -s * wi + c * wj;
            w[j] = -c * wi - s * wj;
            if (counter) {
                counter->multiplications += 4;
                counter->additions += 2;
            }
        } else {
            rotate_left(w, i, j, c, s, counter);
        }
    }
    return {w.begin() + static_cast<std::ptrdiff_t>(d), w.end()};
}

DegenerateSplit split_degenerate(const HinPair& pair, double zero_tol) {
    const Matrix m = pair.concat();
    const std::size_t n = pair.state_dim();
    const std::size_t d = pair.input_dim();
    const std::size_t cap = std::min(n, d);

    std::size_t m_count = 0;
    while (m_count < cap) {
        const std::size_t k = m_count;
        bool identity_like = true;
        for (std::size_t j = 0; j < m.cols() && identity_like; ++j)
            if (std::abs(m(k, j) - (j == k ? 1.0 : 0.0)) > zero_tol) identity_like = false;
        for (std::size_t i = 0; i < n && identity_like; ++i)
            if (std::abs(m(i, k) - (i == k ? 1.0 : 0.0)) > zero_tol) identity_like = false;
        if (!identity_like) break;
        ++m_count;
    }

    const std::size_t tail_n = n - m_count;
    Matrix tail_b(tail_n, d);
    Matrix tail_a(tail_n, tail_n);
    for (std::size_t i = 0; i < tail_n; ++i) {
        for (std::size_t j = 0; j < d; ++j) tail_b(i, j) = m(m_count + i, m_count + j);
        for (std::size_t j = 0; j < tail_n; ++j) tail_a(i, j) = m(m_count + i, m_count + d + j);
    }
    return DegenerateSplit{m_count, HinPair::unchecked(std::move(tail_a), std::move(tail_b))};
}

}  // namespace hinform
