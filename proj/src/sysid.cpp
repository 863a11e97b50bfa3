#include "hinform/sysid.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace hinform {

RlsAccumulator::RlsAccumulator(std::size_t n, std::size_t p)
    : phat_sum_(n, n), dhat_sum_(n, p) {}

void RlsAccumulator::push(std::span<const double> z, std::span<const double> y) {
    if (z.size() != phat_sum_.rows() || y.size() != dhat_sum_.cols())
        throw DimensionMismatch("RlsAccumulator: sample dimensions differ");
    for (std::size_t i = 0; i < z.size(); ++i) {
        for (std::size_t j = 0; j < z.size(); ++j) phat_sum_(i, j) += z[i] * z[j];
        for (std::size_t j = 0; j < y.size(); ++j) dhat_sum_(i, j) += z[i] * y[j];
    }
    ++t_;
}

RlsState RlsAccumulator::state() const {
    if (t_ == 0) throw DimensionMismatch("RlsAccumulator: no samples");
    const double inv = 1.0 / static_cast<double>(t_);
    return RlsState{t_, scaled(phat_sum_, inv), scaled(dhat_sum_, inv)};
}

SimTrace simulate(const AngleVector& angles, const Matrix& c, std::size_t steps,
                  std::uint64_t seed, double noise_std, double obs_noise_std) {
    const std::size_t n = angles.n;
    const std::size_t d = angles.d;
    if (c.cols() != n) throw DimensionMismatch("simulate: observation matrix columns != n");
    if (steps == 0) throw DimensionMismatch("simulate: need at least one step");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    SimTrace trace;
    trace.n = n;
    trace.d = d;
    trace.p = c.rows();
    trace.states.reserve(steps);
    trace.inputs.reserve(steps);
    trace.observations.reserve(steps);

    std::vector<double> z(n, 0.0);
    std::vector<double> eps(d);
    for (std::size_t t = 0; t < steps; ++t) {
        for (double& e : eps) e = noise_std * gauss(rng);
        z = state_advance(angles, z, eps);
        std::vector<double> y = mat_vec(c, z);
        if (obs_noise_std > 0.0)
            for (double& v : y) v += obs_noise_std * gauss(rng);
        trace.inputs.push_back(eps);
        trace.states.push_back(z);
        trace.observations.push_back(std::move(y));
    }
    return trace;
}

RlsState rls_accumulate(const SimTrace& trace) {
    if (trace.states.empty()) throw DimensionMismatch("rls_accumulate: empty trace");
    Matrix phat(trace.n, trace.n);
    Matrix dhat(trace.n, trace.p);
    for (std::size_t t = 0; t < trace.states.size(); ++t) {
        const auto& z = trace.states[t];
        const auto& y = trace.observations[t];
        for (std::size_t i = 0; i < trace.n; ++i) {
            for (std::size_t j = 0; j < trace.n; ++j) phat(i, j) += z[i] * z[j];
            for (std::size_t j = 0; j < trace.p; ++j) dhat(i, j) += z[i] * y[j];
        }
    }
    const double inv = 1.0 / static_cast<double>(trace.states.size());
    return RlsState{trace.states.size(), scaled(phat, inv), scaled(dhat, inv)};
}

RlsSolution rls_solve(const RlsState& state, double ridge) {
    Matrix p = state.phat;
    if (ridge > 0.0) {
        for (std::size_t i = 0; i < p.rows(); ++i) p(i, i) += ridge;
    }
    Matrix l;
    try {
        l = cholesky_lower(symmetrized(p));
    } catch (const NotPositiveDefinite&) {
        throw SingularGrammian(
            "rls_solve: sample Grammian is singular (too few samples or deficient "
            "excitation); consider a positive ridge");
    }
    double piv_max = l(0, 0);
    double piv_min = l(0, 0);
    for (std::size_t i = 1; i < l.rows(); ++i) {
        piv_max = std::max(piv_max, l(i, i));
        piv_min = std::min(piv_min, l(i, i));
    }
    const Matrix chat_t = solve_lower_transposed(l, solve_lower_triangular(l, state.dhat));
    const double ratio = piv_max / piv_min;
    return RlsSolution{transposed(chat_t), ratio * ratio};
}

namespace {

double grammian_deviation(const Matrix& phat_sum, std::size_t t, double sigma2) {
    // ||Phat_t / sigma^2 - I||_F from the running (unnormalized) sum.
    const std::size_t n = phat_sum.rows();
    const double inv = 1.0 / (sigma2 * static_cast<double>(t));
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double v = phat_sum(i, j) * inv - (i == j ? 1.0 : 0.0);
            acc += v * v;
        }
    return std::sqrt(acc);
}

std::vector<std::size_t> checkpoint_steps(std::size_t steps, std::size_t samples) {
    std::vector<std::size_t> out;
    std::size_t t = steps;
    for (std::size_t k = 0; k < samples && t >= 1; ++k) {
        out.push_back(t);
        t /= 2;
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

double relative_error(const Matrix& estimate, const Matrix& truth) {
    return frobenius_distance(estimate, truth) / std::max(1.0, frobenius_norm(truth));
}

}  // namespace

ConditioningReport conditioning_experiment(const AngleVector& angles, const Matrix& c,
                                           std::size_t steps, std::uint64_t seed,
                                           double noise_std,
                                           const Matrix* comparison_transform,
                                           std::size_t trajectory_samples) {
    const std::size_t n = angles.n;
    const std::size_t d = angles.d;
    if (c.cols() != n)
        throw DimensionMismatch("conditioning_experiment: observation matrix columns != n");
    if (steps == 0) throw DimensionMismatch("conditioning_experiment: need at least one step");

    const double sigma2 = noise_std * noise_std;

    // Comparison branch: the same system in similarity-transformed
    // coordinates, driven by the identical noise sequence.
    Matrix a_cmp, b_cmp, c_cmp;
    if (comparison_transform) {
        const Matrix& t_mat = *comparison_transform;
        if (t_mat.rows() != n || t_mat.cols() != n)
            throw DimensionMismatch("conditioning_experiment: comparison transform must be n x n");
        const HinPair pair = angles_to_hin(angles);
        const Matrix t_inv = solve_general(t_mat, Matrix::identity(n));
        a_cmp = multiply(t_inv, multiply(pair.advance_matrix(), t_mat));
        b_cmp = multiply(t_inv, pair.control_matrix());
        c_cmp = multiply(c, t_mat);
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    RlsAccumulator acc(n, c.rows());
    RlsAccumulator acc_cmp(n, c.rows());
    std::vector<double> z(n, 0.0);
    std::vector<double> z_cmp(n, 0.0);
    std::vector<double> eps(d);

    ConditioningReport report;
    report.steps = steps;
    report.noise_std = noise_std;
    const std::vector<std::size_t> checkpoints = checkpoint_steps(steps, trajectory_samples);
    std::size_t next_checkpoint = 0;
    Matrix phat_sum(n, n);

    for (std::size_t t = 1; t <= steps; ++t) {
        for (double& e : eps) e = noise_std * gauss(rng);
        z = state_advance(angles, z, eps);
        const std::vector<double> y = mat_vec(c, z);
        acc.push(z, y);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) phat_sum(i, j) += z[i] * z[j];

        if (comparison_transform) {
            std::vector<double> next = mat_vec(a_cmp, z_cmp);
            const std::vector<double> drive = mat_vec(b_cmp, eps);
            for (std::size_t i = 0; i < n; ++i) next[i] += drive[i];
            z_cmp = std::move(next);
            acc_cmp.push(z_cmp, mat_vec(c_cmp, z_cmp));
        }

        if (next_checkpoint < checkpoints.size() && t == checkpoints[next_checkpoint]) {
            report.deviation_trajectory.emplace_back(t, grammian_deviation(phat_sum, t, sigma2));
            ++next_checkpoint;
        }
    }

    report.final_deviation = grammian_deviation(phat_sum, steps, sigma2);
    const RlsSolution sol = rls_solve(acc.state());
    report.cond = sol.cond_estimate;
    report.chat_error = relative_error(sol.chat, c);

    if (comparison_transform) {
        const RlsSolution sol_cmp = rls_solve(acc_cmp.state());
        report.cond_comparison = sol_cmp.cond_estimate;
        report.chat_error_comparison = relative_error(sol_cmp.chat, c_cmp);
    }
    return report;
}

}  // namespace hinform
