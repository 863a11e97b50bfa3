#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hinform/hin.hpp"
#include "oracles.hpp"

using namespace hinform;
namespace t = hinform::testing;

namespace {

constexpr double kPi = std::numbers::pi;

Matrix concat_via_dense(const AngleVector& angles) {
    // Reference materialization: multiply the dense embedded rotations.
    const std::size_t n = angles.n;
    const std::size_t d = angles.d;
    Matrix m(n, n + d);
    for (std::size_t i = 0; i < n; ++i) m(i, d + i) = 1.0;
    const auto schedule = rotation_schedule(n, d);
    for (std::size_t idx = 0; idx < schedule.size(); ++idx)
        m = multiply(m, t::dense_rotation(n + d, schedule[idx].i, schedule[idx].j,
                                          angles.thetas[idx]));
    return m;
}

AngleVector random_interior(std::mt19937_64& rng, std::size_t n, std::size_t d) {
    return AngleVector::make(n, d, t::random_interior_angles(rng, n, d));
}

}  // namespace

TEST_CASE("rotation schedule shape") {
    for (std::size_t n : {1, 2, 5}) {
        for (std::size_t d : {1, 2, 4}) {
            const auto planes = rotation_schedule(n, d);
            CHECK(planes.size() == n * d);
            std::size_t column_zero_touches = 0;
            for (const auto& p : planes) {
                CHECK(p.i < n + d);
                CHECK(p.j < n + d);
                CHECK(p.i != p.j);
                if (p.i == 0 || p.j == 0) ++column_zero_touches;
            }
            // Control column 0 is only reachable from the leading group.
            CHECK(column_zero_touches == (d == 1 ? 1 : 2));
        }
    }
}

TEST_CASE("zero angles materialize the trivial pair") {
    const AngleVector angles = AngleVector::make(3, 2, std::vector<double>(6, 0.0));
    const HinPair pair = angles_to_hin(angles);
    CHECK(frobenius_distance(pair.advance_matrix(), Matrix::identity(3)) == 0.0);
    CHECK(frobenius_norm(pair.control_matrix()) == 0.0);
}

TEST_CASE("scalar materialization gives sine control and cosine advance") {
    for (double theta : {0.3, 1.2, kPi / 2.0, 2.5, -0.4, 3.5}) {
        const HinPair pair = angles_to_hin(AngleVector::make(1, 1, {theta}));
        CHECK(pair.control_matrix()(0, 0) == doctest::Approx(std::sin(theta)));
        CHECK(pair.advance_matrix()(0, 0) == doctest::Approx(std::cos(theta)));
        // Standard iff the control entry is nonnegative (no subdiagonal at n=1).
        CHECK(classify(pair).standard == (std::sin(theta) >= -1e-10));
    }
}

TEST_CASE("two-state quarter-turn pair matches the dense product") {
    const AngleVector angles = AngleVector::make(2, 1, {kPi / 2.0, kPi / 2.0});
    const HinPair pair = angles_to_hin(angles);
    const Matrix ref = concat_via_dense(angles);
    CHECK(frobenius_distance(pair.concat(), ref) <= 1e-14);
    CHECK(frobenius_distance(pair.advance_matrix(),
                             Matrix::from_rows({{0.0, 0.0}, {1.0, 0.0}})) <= 1e-15);
    CHECK(frobenius_distance(pair.control_matrix(), Matrix::from_rows({{1.0}, {0.0}})) <=
          1e-15);
}

TEST_CASE("materialization matches the dense rotation product") {
    std::mt19937_64 rng(67);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + rng() % 6;
        const std::size_t d = 1 + rng() % 4;
        std::vector<double> thetas(n * d);
        for (double& v : thetas) v = angle(rng);
        const AngleVector angles = AngleVector::make(n, d, thetas);
        CHECK(frobenius_distance(angles_to_hin(angles).concat(), concat_via_dense(angles)) <=
              1e-12);
    }
}

TEST_CASE("materialized pairs are row-orthonormal with exact structural zeros") {
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng() % 10;
        const std::size_t d = 1 + rng() % 4;
        std::vector<double> thetas(n * d);
        for (double& v : thetas) v = angle(rng);
        const HinPair pair = angles_to_hin(AngleVector::make(n, d, thetas));
        const Matrix m = pair.concat();
        CHECK(frobenius_distance(multiply(m, transposed(m)), Matrix::identity(n)) <= 1e-12);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j + 1 < i; ++j)
                CHECK(pair.advance_matrix()(i, j) == 0.0);
        for (std::size_t i = 1; i < n; ++i) CHECK(pair.control_matrix()(i, 0) == 0.0);
    }
}

TEST_CASE("classification flags follow the definition") {
    SUBCASE("trivial pair") {
        const HinPair pair = angles_to_hin(AngleVector::make(3, 2, std::vector<double>(6, 0.0)));
        const HinClass cls = classify(pair);
        CHECK(cls.nondegenerate);
        CHECK(!cls.unreduced);
        CHECK(cls.standard);
        CHECK(!cls.strict);
    }
    SUBCASE("pure delay pair") {
        const HinPair pair = HinPair::make(Matrix::from_rows({{0.0, 0.0}, {1.0, 0.0}}),
                                           Matrix::from_rows({{1.0}, {0.0}}));
        const HinClass cls = classify(pair);
        CHECK(!cls.nondegenerate);  // B11 = 1
        CHECK(cls.standard);
    }
    SUBCASE("sign flip breaks standardness") {
        std::mt19937_64 rng(73);
        const AngleVector angles = random_interior(rng, 4, 2);
        const HinPair pair = angles_to_hin(angles);
        CHECK(classify(pair).strict);
        Matrix a = pair.advance_matrix();
        a(2, 1) = -a(2, 1);
        const HinPair flipped = HinPair::unchecked(a, pair.control_matrix());
        CHECK(!classify(flipped).standard);
    }
}

TEST_CASE("angle extraction round trip on interior angles") {
    std::mt19937_64 rng(79);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + rng() % 12;
        const std::size_t d = 1 + rng() % 4;
        const AngleVector angles = random_interior(rng, n, d);
        const HinPair pair = angles_to_hin(angles);
        const AngleVector recovered = hin_to_angles(pair);
        CHECK(t::max_abs_diff(angles.thetas, recovered.thetas) <= 1e-10);
        CHECK(frobenius_distance(angles_to_hin(recovered).concat(), pair.concat()) <= 1e-10);
    }
}

TEST_CASE("extraction reproduces the pair even on non-canonical inputs") {
    std::mt19937_64 rng(83);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng() % 8;
        const std::size_t d = 1 + rng() % 4;
        std::vector<double> thetas(n * d);
        for (double& v : thetas) v = angle(rng);
        const AngleVector angles = AngleVector::make(n, d, thetas);
        const HinPair pair = angles_to_hin(angles);
        const AngleVector canonical = canonicalize_angles(angles);
        const HinPair again = angles_to_hin(canonical);
        CHECK(frobenius_distance(pair.concat(), again.concat()) <= 1e-12);
        // Idempotence. The angle tolerance is looser than the pair tolerance:
        // near a vanished walk mass the extraction is ill-conditioned in the
        // angles even though the generated pair is stable.
        const AngleVector twice = canonicalize_angles(canonical);
        CHECK(frobenius_distance(angles_to_hin(twice).concat(), pair.concat()) <= 1e-12);
        CHECK(t::max_abs_diff(canonical.thetas, twice.thetas) <= 1e-9);
    }
}

TEST_CASE("canonicalization leaves canonical angles unchanged") {
    std::mt19937_64 rng(89);
    const AngleVector angles = random_interior(rng, 6, 3);
    const AngleVector canonical = canonicalize_angles(angles);
    CHECK(t::max_abs_diff(angles.thetas, canonical.thetas) <= 1e-12);
    const AngleVector zeros = AngleVector::make(2, 2, std::vector<double>(4, 0.0));
    CHECK(canonicalize_angles(zeros).thetas == zeros.thetas);
}

TEST_CASE("extraction gates") {
    SUBCASE("trivial pair maps to zero angles") {
        const HinPair pair = angles_to_hin(AngleVector::make(2, 3, std::vector<double>(6, 0.0)));
        const AngleVector angles = hin_to_angles(pair);
        for (double v : angles.thetas) CHECK(v == 0.0);
    }
    SUBCASE("negative leading control entry is rejected") {
        const HinPair pair = angles_to_hin(AngleVector::make(1, 1, {-kPi / 4.0}));
        CHECK(pair.control_matrix()(0, 0) < 0.0);
        CHECK_THROWS_AS(hin_to_angles(pair), NotStandard);
    }
    SUBCASE("non-orthonormal rows are rejected") {
        Matrix a = Matrix::from_rows({{0.5, 0.0}, {0.4, 0.5}});
        Matrix b = Matrix::from_rows({{0.3}, {0.0}});
        CHECK_THROWS_AS(hin_to_angles(HinPair::unchecked(a, b)), NotOrthonormal);
    }
}

TEST_CASE("state advance equals the dense advance") {
    std::mt19937_64 rng(97);
    SUBCASE("identity pair keeps the state") {
        const AngleVector angles = AngleVector::make(4, 2, std::vector<double>(8, 0.0));
        const auto z = t::random_vector(rng, 4);
        const auto eps = t::random_vector(rng, 2);
        CHECK(t::max_abs_diff(state_advance(angles, z, eps), z) == 0.0);
    }
    SUBCASE("random instances") {
        for (int trial = 0; trial < 500; ++trial) {
            const std::size_t n = 1 + rng() % 10;
            const std::size_t d = 1 + rng() % 4;
            const AngleVector angles = random_interior(rng, n, d);
            const HinPair pair = angles_to_hin(angles);
            const auto z = t::random_vector(rng, n);
            const auto eps = t::random_vector(rng, d);
            CHECK(t::max_abs_diff(state_advance(angles, z, eps),
                                  state_advance_dense(pair, z, eps)) <= 1e-12);
        }
    }
}

TEST_CASE("state advance multiplication count is exactly 4nd") {
    std::mt19937_64 rng(101);
    SUBCASE("n=8 d=3 costs 96") {
        const AngleVector angles = random_interior(rng, 8, 3);
        OpCounter counter;
        state_advance(angles, t::random_vector(rng, 8), t::random_vector(rng, 3), &counter);
        CHECK(counter.multiplications == 96);
    }
    SUBCASE("general dimensions") {
        for (int trial = 0; trial < 20; ++trial) {
            const std::size_t n = 1 + rng() % 12;
            const std::size_t d = 1 + rng() % 5;
            const AngleVector angles = random_interior(rng, n, d);
            OpCounter counter;
            state_advance(angles, t::random_vector(rng, n), t::random_vector(rng, d), &counter);
            CHECK(counter.multiplications == 4 * n * d);
        }
    }
}

TEST_CASE("gradient matches central finite differences") {
    std::mt19937_64 rng(103);
    const std::size_t n = 6;
    const std::size_t d = 3;
    const AngleVector angles = random_interior(rng, n, d);
    const auto z = t::random_vector(rng, n);
    const auto eps = t::random_vector(rng, d);
    const double h = 1e-6;
    for (std::size_t k = 0; k < n * d; ++k) {
        OpCounter counter;
        const auto grad = state_advance_grad(angles, z, eps, k, &counter);
        CHECK(counter.multiplications <= 8 * n * d);

        AngleVector plus = angles;
        plus.thetas[k] += h;
        AngleVector minus = angles;
        minus.thetas[k] -= h;
        const auto fp = state_advance(plus, z, eps);
        const auto fm = state_advance(minus, z, eps);
        double diff_norm = 0.0;
        double grad_norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double fd = (fp[i] - fm[i]) / (2.0 * h);
            diff_norm += (fd - grad[i]) * (fd - grad[i]);
            grad_norm += grad[i] * grad[i];
        }
        CHECK(std::sqrt(diff_norm) <= 1e-6 * (1.0 + std::sqrt(grad_norm)));
    }
}

TEST_CASE("gradient at zero angles collapses to a single derivative plane") {
    const std::size_t n = 3;
    const std::size_t d = 2;
    const AngleVector angles = AngleVector::make(n, d, std::vector<double>(n * d, 0.0));
    const std::vector<double> z{1.0, 2.0, 3.0};
    const std::vector<double> eps{0.0, 0.0};
    const auto schedule = rotation_schedule(n, d);
    for (std::size_t k = 0; k < n * d; ++k) {
        const auto grad = state_advance_grad(angles, z, eps, k);
        std::vector<double> w(n + d, 0.0);
        for (std::size_t i = 0; i < n; ++i) w[d + i] = z[i];
        const auto [pi, pj] = schedule[k];
        std::vector<double> expected(n + d, 0.0);
        expected[pi] = w[pj];   // theta = 0: derivative block is [[0, 1], [-1, 0]]
        expected[pj] = -w[pi];
        CHECK(t::max_abs_diff(grad, {expected.begin() + d, expected.end()}) <= 1e-15);
    }
}

TEST_CASE("degenerate splitting") {
    SUBCASE("nondegenerate pairs split trivially") {
        std::mt19937_64 rng(107);
        const HinPair pair = angles_to_hin(random_interior(rng, 4, 2));
        const DegenerateSplit split = split_degenerate(pair);
        CHECK(split.m == 0);
        CHECK(frobenius_distance(split.tail.concat(), pair.concat()) == 0.0);
    }
    SUBCASE("pure delay pair exposes a leading identity block") {
        const HinPair pair = HinPair::make(Matrix::from_rows({{0.0, 0.0}, {1.0, 0.0}}),
                                           Matrix::from_rows({{1.0}, {0.0}}));
        const DegenerateSplit split = split_degenerate(pair);
        CHECK(split.m == 1);
        CHECK(split.tail.state_dim() == 1);
        CHECK(split.tail.control_matrix()(0, 0) == doctest::Approx(1.0));
    }
    SUBCASE("identity padded with zero columns") {
        const std::size_t n = 4;
        const std::size_t d = 2;
        Matrix b(n, d);
        Matrix a(n, n);
        // (B|A) = [I_n | 0]: B carries the first d identity columns.
        for (std::size_t i = 0; i < d; ++i) b(i, i) = 1.0;
        for (std::size_t i = d; i < n; ++i) a(i, i - d) = 1.0;
        const HinPair pair = HinPair::unchecked(a, b);
        CHECK(split_degenerate(pair).m == std::min(n, d));
    }
}

TEST_CASE("single-input specialization: vanishing control column leaves an orthogonal advance") {
    std::mt19937_64 rng(109);
    auto thetas = t::random_interior_angles(rng, 5, 1);
    thetas[0] = 0.0;  // sine of the leading angle is the control entry
    const HinPair pair = angles_to_hin(AngleVector::make(5, 1, thetas));
    CHECK(frobenius_norm(pair.control_matrix()) == 0.0);
    const Matrix a = pair.advance_matrix();
    CHECK(frobenius_distance(multiply(a, transposed(a)), Matrix::identity(5)) <= 1e-13);
    for (std::size_t i = 0; i + 1 < 5; ++i) CHECK(a(i + 1, i) >= 0.0);
}

TEST_CASE("pair validation enforces the invariants") {
    CHECK_THROWS_AS(HinPair::make(Matrix::from_rows({{0.5, 0.0}, {0.0, 0.5}}),
                                  Matrix::from_rows({{1.0}, {0.0}})),
                    InvalidHinPair);  // not input normal
    CHECK_THROWS_AS(HinPair::make(Matrix::from_rows({{0.0, 0.0}, {1.0, 0.0}}),
                                  Matrix::from_rows({{0.0}, {1.0}})),
                    InvalidHinPair);  // control support below row 0
    const Matrix a = Matrix::from_rows({{std::cos(0.5)}});
    const Matrix b = Matrix::from_rows({{-std::sin(0.5)}});
    CHECK_THROWS_AS(HinPair::make(a, b), InvalidHinPair);  // negative leading entry
    CHECK_NOTHROW(HinPair::make(a, b, /*require_sign=*/false));
}
