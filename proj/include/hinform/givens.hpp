#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hinform/matrix.hpp"

namespace hinform {

struct NotUnitNorm : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Per-call-context operation counter. Callers own the accumulator; nothing
/// here touches global state, so concurrent use over distinct counters is safe.
struct OpCounter {
    std::uint64_t multiplications = 0;
    std::uint64_t additions = 0;
};

/// Plane rotation on coordinates (i, j), zero-based, with cached cosine/sine.
///
/// The embedded matrix G has g[i][i] = g[j][j] = cos(theta),
/// g[i][j] = -g[j][i] = sin(theta), and the identity elsewhere. The order of
/// (i, j) is part of the value: swapping them negates the angle.
struct GivensRotation {
    std::size_t i = 0;
    std::size_t j = 0;
    double theta = 0.0;
    double c = 1.0;
    double s = 0.0;

    static GivensRotation plane(std::size_t i, std::size_t j, double theta);
};

enum class RotationSide { left, right };

/// In-place kernels. Each call costs exactly 4 multiplications and 2 additions
/// and touches only components i and j.
void rotate_left(std::span<double> v, std::size_t i, std::size_t j, double c, double s,
                 OpCounter* counter = nullptr);
void rotate_right(std::span<double> v, std::size_t i, std::size_t j, double c, double s,
                  OpCounter* counter = nullptr);

/// Right-multiplication by G expressed as a column-pair update on a matrix.
void rotate_columns_right(Matrix& m, std::size_t i, std::size_t j, double c, double s,
                          OpCounter* counter = nullptr);

/// Returns G.v (left) or v.G (right) without mutating the input.
std::vector<double> apply_plane_rotation(std::span<const double> v, const GivensRotation& rot,
                                         RotationSide side, OpCounter* counter = nullptr);

/// Canonical bounds for the n*d rotation angles: the first slot of each
/// row-group lies in [0, pi], the remaining slots in (-pi/2, pi/2].
struct AngleDomain {
    std::size_t n = 0;
    std::size_t d = 0;

    bool is_primary_slot(std::size_t index) const { return d != 0 && index % d == 0; }
    double lower(std::size_t index) const;
    double upper(std::size_t index) const;
    bool contains(std::span<const double> thetas, double slack = 0.0) const;
};

/// Threads the last standard basis vector of R^{d+1} through d plane
/// rotations, planes (d+1,d), (d,d-1), ..., (2,1) in one-based terms, one
/// angle per plane in slot order. The result is a unit vector whose entries
/// form a cosine-sine cascade; on the canonical domain the component at
/// index d-1 (zero-based) is nonnegative.
std::vector<double> row_from_angles(std::span<const double> thetas,
                                    OpCounter* counter = nullptr);

/// Inverse of row_from_angles. Peels the rotations back off the row,
/// resolving signs by carrying the remaining mass: slots with a vanished
/// prefix get the canonical zero angle, an exactly-zero receiving component
/// maps to +pi/2 with the sign absorbed into the next slot. The returned
/// angles reproduce x exactly up to roundoff.
std::vector<double> angles_from_row(std::span<const double> x, double unit_tol = 1e-10);

namespace detail {

struct PeelResult {
    double theta;
    double carried;
};

/// Primary slots take theta in (-pi, pi] with the carried mass forced +.
PeelResult peel_primary(double receiver, double giver);

/// Secondary slots keep cos(theta) >= 0; the sign of the remaining mass is
/// carried through `carried`. `tol` is the vanished-prefix threshold.
PeelResult peel_secondary(double receiver, double giver, double tol);

}  // namespace detail

}  // namespace hinform
