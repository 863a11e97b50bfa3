#include "hinform/transform.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace hinform {

InputPair InputPair::make(Matrix a, Matrix b) {
    if (a.rows() == 0 || a.rows() != a.cols())
        throw DimensionMismatch("InputPair: advance matrix must be square and nonempty");
    if (b.rows() != a.rows() || b.cols() == 0)
        throw DimensionMismatch("InputPair: control matrix rows must match state dimension");
    if (!a.is_finite() || !b.is_finite())
        throw NotFiniteValue("InputPair: entries must be finite");
    return InputPair{std::move(a), std::move(b)};
}

Matrix solve_stein(const InputPair& pair, double tol, int max_doublings) {
    Matrix p = multiply(pair.b, transposed(pair.b));
    Matrix ak = pair.a;
    double last_rel = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= max_doublings; ++k) {
        Matrix update = multiply(ak, multiply(p, transposed(ak)));
        if (!update.is_finite() || !p.is_finite())
            throw NotConverged("stein: iterate overflowed after " + std::to_string(k) +
                               " doublings (spectral radius >= 1)");
        const double scale = std::max(1.0, frobenius_norm(p));
        last_rel = frobenius_norm(update) / scale;
        if (last_rel <= tol) return symmetrized(add(p, update));
        p = add(p, update);
        ak = multiply(ak, ak);
    }
    throw NotConverged("stein: no convergence after " + std::to_string(max_doublings) +
                       " doublings; last relative update " + std::to_string(last_rel));
}

double stein_residual(const InputPair& pair, const Matrix& p) {
    Matrix apat = multiply(pair.a, multiply(p, transposed(pair.a)));
    Matrix bbt = multiply(pair.b, transposed(pair.b));
    return frobenius_norm(subtract(subtract(p, apat), bbt));
}

std::pair<InputPair, TransformRecord> balance_input_normal(const InputPair& pair,
                                                           const Matrix& p) {
    const Matrix l = cholesky_lower(p);
    Matrix b_bal = solve_lower_triangular(l, pair.b);
    Matrix a_bal = solve_lower_triangular(l, multiply(pair.a, l));
    TransformRecord record;
    record.t_total = l;
    record.stages.push_back({"balance", input_normal_residual(a_bal, b_bal)});
    return {InputPair{std::move(a_bal), std::move(b_bal)}, std::move(record)};
}

std::pair<InputPair, TransformRecord> hessenberg_reduce(const InputPair& pair) {
    const std::size_t n = pair.state_dim();
    Matrix a = pair.a;
    Matrix b = pair.b;
    Matrix u = Matrix::identity(n);

    // Left rotation of rows (p, q) folded into the similarity: rows of A, B
    // and U, columns of A.
    const auto rotate = [&](std::size_t p, std::size_t q, double c, double s) {
        for (std::size_t j = 0; j < n; ++j) {
            const double x = a(p, j);
            const double y = a(q, j);
            a(p, j) = c * x + s * y;
            a(q, j) = -s * x + c * y;
        }
        for (std::size_t j = 0; j < b.cols(); ++j) {
            const double x = b(p, j);
            const double y = b(q, j);
            b(p, j) = c * x + s * y;
            b(q, j) = -s * x + c * y;
        }
        for (std::size_t j = 0; j < n; ++j) {
            const double x = u(p, j);
            const double y = u(q, j);
            u(p, j) = c * x + s * y;
            u(q, j) = -s * x + c * y;
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double x = a(i, p);
            const double y = a(i, q);
            a(i, p) = c * x + s * y;
            a(i, q) = -s * x + c * y;
        }
    };

    const auto eliminate = [&](std::size_t p, std::size_t q, double x, double y) {
        if (y == 0.0) return;
        const double r = std::hypot(x, y);
        rotate(p, q, x / r, y / r);
    };

    // First sweep: fold the leading control column onto +beta e_1.
    for (std::size_t i = n; i-- > 1;) eliminate(i - 1, i, b(i - 1, 0), b(i, 0));
    if (b(0, 0) < 0.0) {
        // Row-0 sign flip keeps the similarity orthogonal.
        for (std::size_t j = 0; j < n; ++j) {
            a(0, j) = -a(0, j);
            a(j, 0) = -a(j, 0);
            u(0, j) = -u(0, j);
        }
        for (std::size_t j = 0; j < b.cols(); ++j) b(0, j) = -b(0, j);
    }

    // Column sweeps: zero below the subdiagonal of A, bottom up.
    for (std::size_t j = 0; j + 2 < n; ++j)
        for (std::size_t i = n; i-- > j + 2;) eliminate(i - 1, i, a(i - 1, j), a(i, j));

    for (std::size_t i = 1; i < n; ++i) b(i, 0) = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j + 1 < i; ++j) a(i, j) = 0.0;

    TransformRecord record;
    record.t_total = transposed(u);
    record.stages.push_back(
        {"hessenberg_orthogonality",
         frobenius_distance(multiply(u, transposed(u)), Matrix::identity(n))});
    return {InputPair{std::move(a), std::move(b)}, std::move(record)};
}

std::pair<InputPair, Matrix> standardize_signs(const InputPair& pair) {
    const std::size_t n = pair.state_dim();
    std::vector<double> sign(n, 1.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double sub = pair.a(i + 1, i);
        // (EAE)_{i+1,i} = e_{i+1} * sub * e_i, so e_{i+1} = sign(sub * e_i);
        // a vanished subdiagonal leaves the sign free and takes +1.
        if (sub == 0.0)
            sign[i + 1] = 1.0;
        else
            sign[i + 1] = sub * sign[i] > 0.0 ? 1.0 : -1.0;
    }
    Matrix e(n, n);
    for (std::size_t i = 0; i < n; ++i) e(i, i) = sign[i];
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = sign[i] * pair.a(i, j) * sign[j];
    Matrix b(pair.b.rows(), pair.b.cols());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) b(i, j) = sign[i] * pair.b(i, j);
    return {InputPair{std::move(a), std::move(b)}, std::move(e)};
}

ToHinResult to_standard_hin(const InputPair& pair, double tol) {
    const std::size_t n = pair.state_dim();
    InputPair work = pair;
    Matrix t_total = Matrix::identity(n);
    std::vector<StageDiagnostic> stages;

    // Balancing is iterated: one pass leaves a residual on the order of
    // eps * cond(P), so the Grammian of the balanced pair is re-solved and
    // the pair re-balanced until it is the identity to roundoff.
    for (int pass = 0; pass < 3; ++pass) {
        const Matrix p = solve_stein(work, tol);
        stages.push_back({"stein_residual", stein_residual(work, p)});
        const double deviation = frobenius_distance(p, Matrix::identity(n));
        stages.push_back({"grammian_identity_deviation", deviation});
        if (deviation <= 1e-12 * std::max(1.0, std::sqrt(static_cast<double>(n)))) break;
        auto [balanced, record] = balance_input_normal(work, p);
        work = std::move(balanced);
        t_total = multiply(t_total, record.t_total);
        stages.push_back(record.stages.front());
    }

    auto [hess, hess_record] = hessenberg_reduce(work);
    t_total = multiply(t_total, hess_record.t_total);
    stages.push_back(hess_record.stages.front());

    auto [standard, e] = standardize_signs(hess);
    t_total = multiply(t_total, e);
    stages.push_back({"input_normal_residual", input_normal_residual(standard.a, standard.b)});

    HinPair hin = HinPair::make(std::move(standard.a), std::move(standard.b));
    return ToHinResult{std::move(hin), TransformRecord{std::move(t_total), std::move(stages)}};
}

}  // namespace hinform
