#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hinform/hin.hpp"
#include "hinform/matrix.hpp"

namespace hinform {

struct SingularGrammian : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Time-indexed record of a simulated run. inputs[t] drives the step that
/// produces states[t] from states[t-1] (the initial state is zero), and
/// observations[t] is taken at states[t].
struct SimTrace {
    std::size_t n = 0;
    std::size_t d = 0;
    std::size_t p = 0;
    std::vector<std::vector<double>> states;
    std::vector<std::vector<double>> inputs;
    std::vector<std::vector<double>> observations;
};

/// Sample Grammian (1/t) sum z_i z_i^T and cross moment (1/t) sum z_i y_i^T.
struct RlsState {
    std::size_t t = 0;
    Matrix phat;
    Matrix dhat;
};

/// Streaming accumulator for the normal equations; algebraically identical
/// to the batch sums of rls_accumulate.
class RlsAccumulator {
public:
    RlsAccumulator(std::size_t n, std::size_t p);
    void push(std::span<const double> z, std::span<const double> y);
    std::size_t count() const noexcept { return t_; }
    RlsState state() const;

private:
    std::size_t t_ = 0;
    Matrix phat_sum_;
    Matrix dhat_sum_;
};

/// Draws i.i.d. Gaussian inputs from a seed-deterministic generator and
/// advances the state through the implicit operator; observations are
/// C z_t plus optional Gaussian observation noise.
SimTrace simulate(const AngleVector& angles, const Matrix& c, std::size_t steps,
                  std::uint64_t seed, double noise_std, double obs_noise_std = 0.0);

RlsState rls_accumulate(const SimTrace& trace);

struct RlsSolution {
    Matrix chat;           // p x n
    double cond_estimate;  // squared Cholesky pivot ratio of the Grammian
};

/// Solves the normal equations Phat Chat^T = dhat via Cholesky. An optional
/// ridge delta*I regularizes the Grammian; with ridge = 0 a singular Grammian
/// raises SingularGrammian.
RlsSolution rls_solve(const RlsState& state, double ridge = 0.0);

struct ConditioningReport {
    std::size_t steps = 0;
    double noise_std = 1.0;
    double cond = 0.0;
    double chat_error = 0.0;
    double final_deviation = 0.0;  // ||Phat/sigma^2 - I||_F at the last step
    std::vector<std::pair<std::size_t, double>> deviation_trajectory;
    std::optional<double> cond_comparison;
    std::optional<double> chat_error_comparison;
};

/// Runs the identical noise sequence through the implicit realization and,
/// when a comparison transform is given, through the similarity-transformed
/// dense realization, and reports the conditioning of both sample Grammians
/// together with the observation-matrix recovery errors.
ConditioningReport conditioning_experiment(const AngleVector& angles, const Matrix& c,
                                           std::size_t steps, std::uint64_t seed,
                                           double noise_std = 1.0,
                                           const Matrix* comparison_transform = nullptr,
                                           std::size_t trajectory_samples = 12);

}  // namespace hinform
