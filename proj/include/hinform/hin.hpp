#pragma once

#include <span>
#include <vector>

#include "hinform/givens.hpp"
#include "hinform/matrix.hpp"

namespace hinform {

struct InvalidHinPair : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotStandard : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotOrthonormal : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// n*d rotation angles in row-group order: the d angles of the leading group
/// first, then d per subsequent group.
struct AngleVector {
    std::size_t n = 0;
    std::size_t d = 0;
    std::vector<double> thetas;

    static AngleVector make(std::size_t n, std::size_t d, std::vector<double> thetas);
    AngleDomain domain() const { return AngleDomain{n, d}; }
};

struct HinClass {
    bool nondegenerate = false;
    bool unreduced = false;
    bool standard = false;
    bool strict = false;
};

/// A Hessenberg input normal pair: A upper Hessenberg, the first control
/// column supported on its first entry, and (B|A) row-orthonormal.
class HinPair {
public:
    /// Validates input normality (<= 1e-10), the Hessenberg zero pattern
    /// (<= 1e-12) and, when require_sign is set, B(0,0) >= -1e-12.
    static HinPair make(Matrix a, Matrix b, bool require_sign = true);

    /// No validation; for internal construction of blocks that intentionally
    /// break the conventions (e.g. degenerate tails).
    static HinPair unchecked(Matrix a, Matrix b);

    std::size_t state_dim() const noexcept { return n_; }
    std::size_t input_dim() const noexcept { return d_; }
    const Matrix& advance_matrix() const noexcept { return a_; }
    const Matrix& control_matrix() const noexcept { return b_; }

    /// The n x (n+d) concatenation (B | A).
    Matrix concat() const;

private:
    HinPair(Matrix a, Matrix b);

    std::size_t n_ = 0;
    std::size_t d_ = 0;
    Matrix a_;
    Matrix b_;
};

/// ||A A^T + B B^T - I||_F.
double input_normal_residual(const Matrix& a, const Matrix& b);

struct Plane {
    std::size_t i;
    std::size_t j;
};

/// The fixed materialization order of the n*d plane rotations (zero-based
/// column indices into (B|A)). The leading group threads mass from the
/// state block into control column 0 and then left-to-right across the
/// remaining control columns; every later group g splits mass between the
/// diagonal and subdiagonal of its row and then walks right-to-left across
/// control columns d-1..1. Control column 0 is touched by the leading group
/// only, which is what keeps it supported on row 0.
std::vector<Plane> rotation_schedule(std::size_t n, std::size_t d);

/// Classification flags with |entry| <= zero_tol treated as zero.
HinClass classify(const HinPair& pair, double zero_tol = 1e-10);

/// Materializes the pair by right-applying the scheduled rotations to the
/// rows of (0 | I). Total: any angle vector yields a structurally valid
/// pair (exact zeros are written into the structural positions), though
/// angles outside the canonical domain may produce sign-nonstandard pairs.
HinPair angles_to_hin(const AngleVector& angles);

/// Recovers the angles of a standard pair by peeling rows bottom-up, d
/// rotations per row. Throws NotStandard if the sign conventions fail and
/// NotOrthonormal if the row-orthonormality residual exceeds 1e-8. The
/// result reproduces the pair through angles_to_hin; interior angles land
/// in the canonical domain.
AngleVector hin_to_angles(const HinPair& pair);

/// Re-extracts angles from the materialized pair: the result generates the
/// same pair, is idempotent, and is canonical wherever a canonical
/// representation exists.
AngleVector canonicalize_angles(const AngleVector& angles);

/// A z + B eps evaluated implicitly by pushing (eps | z) through the n*d
/// rotations; exactly 4*n*d multiplications on the counter.
std::vector<double> state_advance(const AngleVector& angles, std::span<const double> z,
                                  std::span<const double> eps, OpCounter* counter = nullptr);

/// Dense reference for state_advance.
std::vector<double> state_advance_dense(const HinPair& pair, std::span<const double> z,
                                        std::span<const double> eps);

/// Derivative of state_advance with respect to angle `angle_index`
/// (zero-based): the indexed rotation is replaced by its angle derivative,
/// which zeroes every component outside its plane. Counter cost is at most
/// 8*n*d multiplications.
std::vector<double> state_advance_grad(const AngleVector& angles, std::span<const double> z,
                                       std::span<const double> eps, std::size_t angle_index,
                                       OpCounter* counter = nullptr);

struct DegenerateSplit {
    std::size_t m = 0;
    HinPair tail;
};

/// Detects the largest leading identity block of (B|A) (capped at min(n,d))
/// and returns it together with the remaining row-orthogonal block
/// reinterpreted as an (n-m)-state pair. m = 0 iff the pair is nondegenerate.
DegenerateSplit split_degenerate(const HinPair& pair, double zero_tol = 1e-10);

namespace detail {

/// Materialization without the HinPair wrapper.
Matrix materialize_concat(const AngleVector& angles);

/// Angle extraction from a row-orthonormal (B|A) concatenation; no
/// standardness gate. zero_tol is the vanished-prefix threshold.
std::vector<double> extract_angles(Matrix concat, std::size_t n, std::size_t d,
                                   double zero_tol = 1e-13);

}  // namespace detail

}  // namespace hinform
