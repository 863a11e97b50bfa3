#pragma once

#include <string>
#include <vector>

#include "hinform/hin.hpp"
#include "hinform/matrix.hpp"

namespace hinform {

/// The Stein iteration did not contract; the source system is unstable.
struct NotConverged : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A raw state-space pair with no normality or structure assumed.
struct InputPair {
    Matrix a;
    Matrix b;

    static InputPair make(Matrix a, Matrix b);
    std::size_t state_dim() const noexcept { return a.rows(); }
    std::size_t input_dim() const noexcept { return b.cols(); }
};

struct StageDiagnostic {
    std::string stage;
    double residual;
};

/// Accumulated similarity T (the output pair is T^{-1} A T, T^{-1} B)
/// together with per-stage residual diagnostics.
struct TransformRecord {
    Matrix t_total;
    std::vector<StageDiagnostic> stages;
};

/// Controllability Grammian: the solution P of P - A P A^T = B B^T, computed
/// by the doubling iteration starting from B B^T. Symmetrized on exit; the
/// returned P satisfies the fixed point within tol * max(1, ||P||_F).
/// Throws NotConverged (with the last residual in the message) when the
/// iterate fails to contract within max_doublings.
Matrix solve_stein(const InputPair& pair, double tol = 1e-12, int max_doublings = 60);

/// ||P - A P A^T - B B^T||_F.
double stein_residual(const InputPair& pair, const Matrix& p);

/// Rescales the pair by the Cholesky factor of its Grammian so the result is
/// input normal. Throws NotPositiveDefinite when P is singular, i.e. the
/// source pair is uncontrollable.
std::pair<InputPair, TransformRecord> balance_input_normal(const InputPair& pair,
                                                           const Matrix& p);

/// Orthogonal reduction to Hessenberg form: the first control column becomes
/// beta * e_1 with beta >= 0 and the advance matrix upper Hessenberg. Total
/// for any pair; input normality is preserved since the similarity is
/// orthogonal.
std::pair<InputPair, TransformRecord> hessenberg_reduce(const InputPair& pair);

/// Chooses a +/-1 signature diagonal E (E_11 = +1, greedy down the
/// subdiagonal, +1 on zero subdiagonals) so that E A E has nonnegative
/// subdiagonal entries. Exact arithmetic: structure and normality are
/// preserved bit for bit.
std::pair<InputPair, Matrix> standardize_signs(const InputPair& pair);

struct ToHinResult {
    HinPair pair;
    TransformRecord record;
};

/// Full pipeline: Grammian solve, input-normal balancing (iterated until the
/// re-solved Grammian is the identity to roundoff), Hessenberg reduction,
/// sign standardization. Propagates NotConverged (unstable input) and
/// NotPositiveDefinite (uncontrollable input).
ToHinResult to_standard_hin(const InputPair& pair, double tol = 1e-12);

}  // namespace hinform
