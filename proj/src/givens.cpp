#include "hinform/givens.hpp"

#include <cmath>
#include <numbers>

namespace hinform {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

void count(OpCounter* counter) {
    if (counter) {
        counter->multiplications += 4;
        counter->additions += 2;
    }
}

}  // namespace

GivensRotation GivensRotation::plane(std::size_t i, std::size_t j, double theta) {
    if (i == j) throw DimensionMismatch("GivensRotation: plane indices must differ");
    GivensRotation rot;
    rot.i = i;
    rot.j = j;
    rot.theta = theta;
    rot.c = std::cos(theta);
    rot.s = std::sin(theta);
    return rot;
}

void rotate_left(std::span<double> v, std::size_t i, std::size_t j, double c, double s,
                 OpCounter* counter) {
    const double vi = v[i];
    const double vj = v[j];
    v[i] = c * vi + s * vj;
    v[j] = -s * vi + c * vj;
    count(counter);
}

void rotate_right(std::span<double> v, std::size_t i, std::size_t j, double c, double s,
                  OpCounter* counter) {
    const double vi = v[i];
    const double vj = v[j];
    v[i] = c * vi - s * vj;
    v[j] = s * vi + c * vj;
    count(counter);
}

void rotate_columns_right(Matrix& m, std::size_t i, std::size_t j, double c, double s,
                          OpCounter* counter) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const double vi = m(r, i);
        const double vj = m(r, j);
        m(r, i) = c * vi - s * vj;
        m(r, j) = s * vi + c * vj;
        count(counter);
    }
}

std::vector<double> apply_plane_rotation(std::span<const double> v, const GivensRotation& rot,
                                         RotationSide side, OpCounter* counter) {
    if (rot.i >= v.size() || rot.j >= v.size())
        throw DimensionMismatch("apply_plane_rotation: plane index out of range");
    std::vector<double> out(v.begin(), v.end());
    if (side == RotationSide::left)
        rotate_left(out, rot.i, rot.j, rot.c, rot.s, counter);
    else
        rotate_right(out, rot.i, rot.j, rot.c, rot.s, counter);
    return out;
}

double AngleDomain::lower(std::size_t index) const {
    return is_primary_slot(index) ? 0.0 : -kHalfPi;
}

double AngleDomain::upper(std::size_t index) const {
    return is_primary_slot(index) ? std::numbers::pi : kHalfPi;
}

bool AngleDomain::contains(std::span<const double> thetas, double slack) const {
    if (thetas.size() != n * d) return false;
    for (std::size_t k = 0; k < thetas.size(); ++k) {
        if (thetas[k] < lower(k) - slack || thetas[k] > upper(k) + slack) return false;
        // the lower bound of secondary slots is open
        if (!is_primary_slot(k) && slack == 0.0 && thetas[k] == -kHalfPi) return false;
    }
    return true;
}

std::vector<double> row_from_angles(std::span<const double> thetas, OpCounter* counter) {
    const std::size_t d = thetas.size();
    if (d == 0) throw DimensionMismatch("row_from_angles: need at least one angle");
    std::vector<double> x(d + 1, 0.0);
    x[d] = 1.0;
    for (std::size_t s = 0; s < d; ++s)
        rotate_right(x, d - s, d - s - 1, std::cos(thetas[s]), std::sin(thetas[s]), counter);
    return x;
}

namespace detail {

PeelResult peel_primary(double receiver, double giver) {
    return {std::atan2(giver, receiver), std::hypot(receiver, giver)};
}

PeelResult peel_secondary(double receiver, double giver, double tol) {
    const double h = std::hypot(receiver, giver);
    if (h <= tol) return {0.0, receiver};
    if (std::abs(receiver) <= tol) return {kHalfPi, giver};
    const double sign = receiver > 0.0 ? 1.0 : -1.0;
    return {std::atan2(giver * sign, std::abs(receiver)), sign * h};
}

}  // namespace detail

std::vector<double> angles_from_row(std::span<const double> x, double unit_tol) {
    const std::size_t d = x.size() - 1;
    if (x.size() < 2) throw DimensionMismatch("angles_from_row: need at least two components");
    double norm = 0.0;
    for (double v : x) norm += v * v;
    norm = std::sqrt(norm);
    if (std::abs(norm - 1.0) > unit_tol)
        throw NotUnitNorm("angles_from_row: vector norm " + std::to_string(norm) +
                          " is not 1 within tolerance");

    const double tol = 1e-13 * norm;
    std::vector<double> work(x.begin(), x.end());
    std::vector<double> thetas(d, 0.0);
    for (std::size_t s = d; s-- > 0;) {
        const std::size_t i = d - s;
        const std::size_t j = d - s - 1;
        const auto peel = s == 0 ? detail::peel_primary(work[i], work[j])
                                 : detail::peel_secondary(work[i], work[j], tol);
        thetas[s] = peel.theta;
        rotate_right(work, i, j, std::cos(peel.theta), -std::sin(peel.theta));
    }
    return thetas;
}

}  // namespace hinform
