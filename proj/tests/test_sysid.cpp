#include <doctest.h>

#include <cmath>
#include <random>

#include "hinform/sysid.hpp"
#include "oracles.hpp"

using namespace hinform;
namespace t = hinform::testing;

namespace {

AngleVector test_angles(std::size_t n, std::size_t d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return AngleVector::make(n, d, t::random_interior_angles(rng, n, d));
}

}  // namespace

TEST_CASE("simulation basics") {
    const AngleVector angles = test_angles(3, 1, 1);
    const Matrix c = Matrix::from_rows({{1.0, 0.5, -0.25}});
    SUBCASE("zero noise keeps the state at the origin") {
        const SimTrace trace = simulate(angles, c, 20, 5, 0.0);
        for (const auto& z : trace.states)
            for (double v : z) CHECK(v == 0.0);
        for (const auto& y : trace.observations)
            for (double v : y) CHECK(v == 0.0);
    }
    SUBCASE("trivial angles never move the state") {
        const AngleVector trivial = AngleVector::make(3, 1, {0.0, 0.0, 0.0});
        const SimTrace trace = simulate(trivial, c, 20, 5, 1.0);
        for (const auto& z : trace.states)
            for (double v : z) CHECK(v == 0.0);
    }
    SUBCASE("same seed gives the same trace") {
        const SimTrace a = simulate(angles, c, 50, 42, 1.0);
        const SimTrace b = simulate(angles, c, 50, 42, 1.0);
        for (std::size_t t = 0; t < 50; ++t)
            CHECK(t::max_abs_diff(a.states[t], b.states[t]) == 0.0);
    }
}

TEST_CASE("simulation matches a dense reference loop") {
    const AngleVector angles = test_angles(2, 1, 7);
    const HinPair pair = angles_to_hin(angles);
    const Matrix c = Matrix::from_rows({{1.0, -1.0}});
    const SimTrace trace = simulate(angles, c, 64, 11, 0.8);
    std::vector<double> z(2, 0.0);
    for (std::size_t step = 0; step < 64; ++step) {
        z = state_advance_dense(pair, z, trace.inputs[step]);
        CHECK(t::max_abs_diff(z, trace.states[step]) <= 1e-12);
        CHECK(t::max_abs_diff(mat_vec(c, z), trace.observations[step]) <= 1e-12);
    }
}

TEST_CASE("rls accumulation") {
    SUBCASE("single unit state") {
        SimTrace trace;
        trace.n = 2;
        trace.d = 1;
        trace.p = 1;
        trace.states = {{1.0, 0.0}};
        trace.inputs = {{0.0}};
        trace.observations = {{2.0}};
        const RlsState state = rls_accumulate(trace);
        CHECK(state.phat(0, 0) == 1.0);
        CHECK(state.phat(0, 1) == 0.0);
        CHECK(state.phat(1, 1) == 0.0);
        CHECK(state.dhat(0, 0) == 2.0);
    }
    SUBCASE("two orthogonal states average to a half identity") {
        SimTrace trace;
        trace.n = 2;
        trace.d = 1;
        trace.p = 1;
        trace.states = {{1.0, 0.0}, {0.0, 1.0}};
        trace.inputs = {{0.0}, {0.0}};
        trace.observations = {{0.0}, {0.0}};
        const RlsState state = rls_accumulate(trace);
        CHECK(frobenius_distance(state.phat, scaled(Matrix::identity(2), 0.5)) == 0.0);
    }
    SUBCASE("batch equals streaming") {
        const AngleVector angles = test_angles(4, 2, 13);
        std::mt19937_64 rng(17);
        const Matrix c = t::random_matrix(rng, 2, 4);
        const SimTrace trace = simulate(angles, c, 200, 19, 1.0);
        const RlsState batch = rls_accumulate(trace);
        RlsAccumulator streaming(4, 2);
        for (std::size_t step = 0; step < trace.states.size(); ++step)
            streaming.push(trace.states[step], trace.observations[step]);
        const RlsState inc = streaming.state();
        CHECK(frobenius_distance(batch.phat, inc.phat) <= 1e-12);
        CHECK(frobenius_distance(batch.dhat, inc.dhat) <= 1e-12);
    }
}

TEST_CASE("rls solve") {
    SUBCASE("identity Grammian returns the cross moment") {
        const Matrix c = Matrix::from_rows({{1.0, 2.0, 3.0}, {-1.0, 0.5, 0.0}});
        const RlsState state{10, Matrix::identity(3), transposed(c)};
        const RlsSolution sol = rls_solve(state);
        CHECK(frobenius_distance(sol.chat, c) <= 1e-14);
        CHECK(sol.cond_estimate == doctest::Approx(1.0));
    }
    SUBCASE("noise-free simulation recovers the observation matrix") {
        const AngleVector angles = test_angles(4, 1, 23);
        std::mt19937_64 rng(29);
        const Matrix c = t::random_matrix(rng, 2, 4);
        const SimTrace trace = simulate(angles, c, 4000, 31, 1.0);
        const RlsSolution sol = rls_solve(rls_accumulate(trace));
        CHECK(frobenius_distance(sol.chat, c) <= 1e-8 * std::max(1.0, frobenius_norm(c)));
    }
    SUBCASE("too few samples give a singular Grammian") {
        const AngleVector angles = test_angles(4, 1, 37);
        const Matrix c = Matrix::from_rows({{1.0, 0.0, 0.0, 0.0}});
        const SimTrace trace = simulate(angles, c, 2, 41, 1.0);
        CHECK_THROWS_AS(rls_solve(rls_accumulate(trace)), SingularGrammian);
        CHECK_NOTHROW(rls_solve(rls_accumulate(trace), 1e-6));
    }
}

TEST_CASE("sample grammian transforms by congruence under similarity") {
    const std::size_t n = 4;
    const AngleVector angles = test_angles(n, 1, 43);
    const Matrix c = Matrix::from_rows({{1.0, 0.0, 0.0, 0.0}});
    Matrix tmat(n, n);
    tmat(0, 0) = 2.0;
    tmat(1, 1) = 1.0;
    tmat(2, 2) = 0.5;
    tmat(3, 3) = 1.0;
    const ConditioningReport report =
        conditioning_experiment(angles, c, 2000, 47, 1.0, &tmat);

    // Recompute both sample Grammians directly with the same noise stream.
    const HinPair pair = angles_to_hin(angles);
    const Matrix t_inv = solve_general(tmat, Matrix::identity(n));
    std::mt19937_64 rng(47);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> z(n, 0.0);
    Matrix phat(n, n), phat_cmp(n, n);
    std::vector<double> eps(1);
    for (std::size_t step = 0; step < 2000; ++step) {
        eps[0] = gauss(rng);
        z = state_advance(angles, z, eps);
        const auto zc = mat_vec(t_inv, z);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                phat(i, j) += z[i] * z[j];
                phat_cmp(i, j) += zc[i] * zc[j];
            }
    }
    const Matrix congruent = multiply(t_inv, multiply(phat, transposed(t_inv)));
    CHECK(frobenius_distance(congruent, phat_cmp) <=
          1e-10 * std::max(1.0, frobenius_norm(phat_cmp)));

    // The experiment's comparison branch advances the transformed recursion
    // directly; its Grammian conditioning must match the congruence path.
    const Matrix l = cholesky_lower(symmetrized(scaled(phat_cmp, 1.0 / 2000.0)));
    double piv_max = l(0, 0), piv_min = l(0, 0);
    for (std::size_t i = 1; i < n; ++i) {
        piv_max = std::max(piv_max, l(i, i));
        piv_min = std::min(piv_min, l(i, i));
    }
    const double cond_direct = (piv_max / piv_min) * (piv_max / piv_min);
    REQUIRE(report.cond_comparison.has_value());
    CHECK(*report.cond_comparison ==
          doctest::Approx(cond_direct).epsilon(1e-8));
    CHECK(report.cond >= 1.0);
}

TEST_CASE("grammian deviation decays with horizon") {
    const AngleVector angles = test_angles(4, 1, 53);
    const Matrix c = Matrix::from_rows({{1.0, 0.0, 0.0, 0.0}});
    const ConditioningReport short_run = conditioning_experiment(angles, c, 5000, 59);
    const ConditioningReport long_run = conditioning_experiment(angles, c, 20000, 59);
    CHECK(long_run.final_deviation < short_run.final_deviation);
    CHECK(short_run.deviation_trajectory.size() >= 4);
}

TEST_CASE("identity comparison transform reproduces the implicit branch") {
    const std::size_t n = 4;
    const AngleVector angles = test_angles(n, 1, 61);
    const Matrix c = Matrix::from_rows({{0.5, -0.5, 1.0, 0.0}});
    const Matrix identity = Matrix::identity(n);
    const ConditioningReport report =
        conditioning_experiment(angles, c, 3000, 67, 1.0, &identity);
    REQUIRE(report.cond_comparison.has_value());
    CHECK(std::abs(report.cond - *report.cond_comparison) <= 1e-6 * report.cond);
    CHECK(std::abs(report.chat_error - *report.chat_error_comparison) <= 1e-8);
}

TEST_CASE("skewed coordinates degrade conditioning") {
    const std::size_t n = 4;
    const AngleVector angles = test_angles(n, 1, 71);
    const Matrix c = Matrix::from_rows({{1.0, 1.0, 1.0, 1.0}});
    Matrix tmat(n, n);
    tmat(0, 0) = 100.0;
    tmat(1, 1) = 1.0;
    tmat(2, 2) = 0.01;
    tmat(3, 3) = 1.0;
    const ConditioningReport report =
        conditioning_experiment(angles, c, 20000, 73, 1.0, &tmat);
    CHECK(report.cond < 100.0);
    REQUIRE(report.cond_comparison.has_value());
    CHECK(*report.cond_comparison >= 100.0);
}
