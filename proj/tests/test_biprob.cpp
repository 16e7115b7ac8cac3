#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bitraj/biprob.hpp"
#include "bitraj/propagate.hpp"
#include "oracle.hpp"

#include <numbers>

using namespace bitraj;

namespace {

const double pi = std::numbers::pi;

QuantumScenario rabi(double omega = 1.0, double horizon = 4.0) {
    Matrix rho = Matrix::Zero(2, 2);
    rho(0, 0) = 1.0;
    return validate_scenario(
        {2, HamiltonianSchedule::constant(omega * pauli_x() / 2.0, horizon), rho, pauli_z_pvm()});
}

// Schrödinger-picture brute force over the oracle exponential; static or
// piecewise schedules.
Complex brute(const QuantumScenario& s, const TimeGrid& g, const BiOutcome& o) {
    std::vector<oracle::M> steps, plus, minus;
    double prev = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
        oracle::M u = oracle::M::Identity(s.dimension(), s.dimension());
        for (const auto& seg : s.schedule().segments()) {
            const double lo = std::max(prev, seg.t_start);
            const double hi = std::min(g[j], seg.t_end);
            if (hi > lo) {
                u = oracle::evolve(seg.h, hi - lo) * u;
            }
        }
        steps.push_back(u);
        plus.push_back(s.pvm().projectors[o.plus_at(j + 1)]);
        minus.push_back(s.pvm().projectors[o.minus_at(j + 1)]);
        prev = g[j];
    }
    return oracle::sandwich(s.state().matrix, steps, plus, minus);
}

TimeGrid random_grid(std::size_t n, std::uint64_t seed, double horizon = 1.0) {
    std::vector<double> t;
    for (std::size_t j = 1; j <= n; ++j) {
        const double jitter = 0.3 * std::sin(static_cast<double>(seed * 7 + j));
        t.push_back(horizon * (static_cast<double>(j) + jitter) / static_cast<double>(n));
    }
    t.back() = std::min(t.back(), horizon);
    return TimeGrid(t);
}

} // namespace

TEST_CASE("tuple lattice ordering") {
    const TupleLattice lat({2, 3}); // slot 1 radix 2, slot 2 radix 3
    CHECK(lat.count() == 6);
    CHECK(lat.encode({0, 0}) == 0);
    CHECK(lat.encode({0, 1}) == 1); // earliest slot varies fastest
    CHECK(lat.encode({1, 0}) == 2);
    for (std::size_t i = 0; i < lat.count(); ++i) {
        CHECK(lat.encode(lat.decode(i)) == i);
    }
    CHECK(lat.drop(lat.encode({2, 1}), 0) == 2);
    CHECK(lat.drop(lat.encode({2, 1}), 1) == 1);
    CHECK_THROWS_AS(lat.encode({3, 0}), Error);
    CHECK_THROWS_AS(lat.encode({0}), Error);
}

TEST_CASE("single-time rabi populations") {
    const QuantumScenario s = rabi();
    for (double t : {0.3, 1.0, 2.5, pi}) {
        const TimeGrid g({t});
        CHECK(std::abs(eval_biprob(s, g, {{0}, {0}}) - (1.0 + std::cos(t)) / 2.0) <= 1e-10);
        CHECK(std::abs(eval_biprob(s, g, {{1}, {1}}) - (1.0 - std::cos(t)) / 2.0) <= 1e-10);
    }
    CHECK(std::abs(diagonal_probability(s, TimeGrid({pi}), {0})) <= 1e-12);
}

TEST_CASE("negative bi-probability witness") {
    const QuantumScenario s = rabi();
    const TimeGrid g({pi / 2, pi});
    const BiOutcome o = outcome_from_values(s.pvm(), {1.0, 1.0}, {1.0, -1.0});
    const Complex q = eval_biprob(s, g, o);
    CHECK(std::abs(q - Complex(-0.25, 0.0)) <= 1e-10);
    CHECK(std::abs(brute(s, g, o) - Complex(-0.25, 0.0)) <= 1e-10);
    CHECK(std::abs(eval_biprob_rank_one(s, g, o) - Complex(-0.25, 0.0)) <= 1e-12);
}

TEST_CASE("frozen commuting case") {
    Matrix rho(2, 2);
    rho << 0.7, Complex(0.1, 0.2), Complex(0.1, -0.2), 0.3;
    const QuantumScenario s =
        validate_scenario({2, HamiltonianSchedule::constant(Matrix::Zero(2, 2), 1.0), rho, pauli_z_pvm()});
    const TimeGrid g({0.2, 0.5, 0.9});
    const BiDistribution d = full_distribution(s, g);
    for (std::size_t a = 0; a < d.tuple_count(); ++a) {
        for (std::size_t b = 0; b < d.tuple_count(); ++b) {
            const OutcomeTuple p = d.lattice().decode(a);
            const OutcomeTuple m = d.lattice().decode(b);
            const bool flat_p = p[0] == p[1] && p[1] == p[2];
            const bool flat_m = m[0] == m[1] && m[1] == m[2];
            Complex expect = 0.0;
            if (flat_p && flat_m && p[0] == m[0]) {
                expect = rho(static_cast<Eigen::Index>(p[0]), static_cast<Eigen::Index>(p[0]));
            }
            CHECK(std::abs(d.at(a, b) - expect) < 1e-15);
        }
    }
}

TEST_CASE("trace formula against brute force and the amplitude route") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        for (Eigen::Index dim = 2; dim <= 4; ++dim) {
            const QuantumScenario s = random_scenario(dim, seed, {.segments = 2});
            const std::size_t n = 1 + seed % 3;
            const TimeGrid g = random_grid(n, seed);
            const BiDistribution d = full_distribution(s, g);
            for (std::size_t a = 0; a < d.tuple_count(); a += 3) {
                for (std::size_t b = 0; b < d.tuple_count(); b += 2) {
                    const BiOutcome o{d.lattice().decode(a), d.lattice().decode(b)};
                    const Complex q = d.at(a, b);
                    CHECK(std::abs(q - brute(s, g, o)) < 1e-10);
                    CHECK(std::abs(q - eval_biprob(s, g, o)) < 1e-12);
                    CHECK(std::abs(q - eval_biprob_rank_one(s, g, o)) <= 1e-12);
                }
            }
        }
    }
}

TEST_CASE("amplitude route needs rank-1 projectors") {
    const QuantumScenario s = random_scenario(3, 2, {.pvm_groups = 2});
    CHECK_THROWS_AS(eval_biprob_rank_one(s, TimeGrid({0.5}), {{0}, {0}}), Error);
}

TEST_CASE("distribution structure") {
    SUBCASE("qubit n=1") {
        const BiDistribution d = full_distribution(rabi(), TimeGrid({1.3}));
        CHECK(d.table().size() == 4);
        CHECK(std::abs(d.total() - 1.0) < 1e-12);
    }
    SUBCASE("qubit n=3 diagonals") {
        const QuantumScenario s = random_scenario(2, 3);
        const BiDistribution d = full_distribution(s, TimeGrid({0.2, 0.6, 1.0}));
        CHECK(d.table().size() == 64);
        for (std::size_t a = 0; a < 8; ++a) {
            CHECK(std::abs(d.diagonal(a).imag()) < 1e-14);
            CHECK(d.diagonal(a).real() >= -1e-14);
        }
    }
    SUBCASE("d=3 causality zeros") {
        const QuantumScenario s = random_scenario(3, 6);
        const BiDistribution d = full_distribution(s, TimeGrid({0.4, 0.9}));
        CHECK(d.table().size() == 81);
        for (std::size_t a = 0; a < 9; ++a) {
            for (std::size_t b = 0; b < 9; ++b) {
                if (d.lattice().digit(a, 1) != d.lattice().digit(b, 1)) {
                    CHECK(std::abs(d.at(a, b)) <= 1e-12);
                }
                CHECK(std::abs(d.at(a, b) - std::conj(d.at(b, a))) <= 1e-12);
            }
        }
    }
    SUBCASE("enumeration cap") {
        const QuantumScenario s = random_scenario(4, 1);
        try {
            full_distribution(s, TimeGrid({0.1, 0.2, 0.3, 0.4, 0.5, 0.6}));
            FAIL("expected EnumerationTooLarge");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::EnumerationTooLarge);
            CHECK(std::string(e.what()).find("1048576") != std::string::npos);
        }
        CHECK_NOTHROW(full_distribution(s, TimeGrid({0.1, 0.2, 0.3, 0.4, 0.5})));
    }
    SUBCASE("input errors") {
        const QuantumScenario s = rabi(1.0, 1.0);
        CHECK_THROWS_AS(eval_biprob(s, TimeGrid({0.5}), {{0, 0}, {0, 0}}), Error);
        CHECK_THROWS_AS(outcome_from_values(s.pvm(), {0.5}, {1.0}), Error);
        CHECK_THROWS_AS(full_distribution(s, TimeGrid({0.5, 2.0})), Error);
    }
}

TEST_CASE("diagonal probabilities sum to one") {
    const QuantumScenario s = random_scenario(3, 5);
    const TimeGrid g({0.3, 0.8});
    double sum = 0.0;
    for (std::size_t a = 0; a < 3; ++a) {
        for (std::size_t b = 0; b < 3; ++b) {
            const double p = diagonal_probability(s, g, {a, b});
            CHECK(p >= -1e-12);
            CHECK(p <= 1.0 + 1e-12);
            sum += p;
        }
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("marginalization") {
    SUBCASE("n=1 to the trivial distribution") {
        const BiDistribution m = marginalize(full_distribution(rabi(), TimeGrid({0.7})), 1);
        CHECK(m.slots() == 0);
        REQUIRE(m.table().size() == 1);
        CHECK(std::abs(m.table()[0] - 1.0) < 1e-12);
    }
    SUBCASE("bi-consistency against direct evaluation") {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const QuantumScenario s = random_scenario(3, seed, {.segments = 3});
            const TimeGrid g({0.2, 0.55, 0.9});
            const BiDistribution d = full_distribution(s, g);
            for (std::size_t j = 1; j <= 3; ++j) {
                const BiDistribution m = marginalize(d, j);
                const BiDistribution direct = full_distribution(s, g.without(j - 1));
                REQUIRE(m.table().size() == direct.table().size());
                double worst = 0.0;
                for (std::size_t k = 0; k < m.table().size(); ++k) {
                    worst = std::max(worst, std::abs(m.table()[k] - direct.table()[k]));
                }
                CHECK(worst <= 1e-10);
            }
        }
    }
    SUBCASE("diagonal-only table misses the off-diagonal remainder") {
        const QuantumScenario s = rabi();
        const TimeGrid g({pi / 2, pi});
        BiDistribution d = full_distribution(s, g);
        BiDistribution diag_only = d;
        auto& t = diag_only.mutable_table();
        for (std::size_t a = 0; a < 4; ++a) {
            for (std::size_t b = 0; b < 4; ++b) {
                if (a != b) {
                    t[a * 4 + b] = 0.0;
                }
            }
        }
        const BiDistribution reduced = full_distribution(s, TimeGrid({pi}));
        const BiDistribution m = marginalize(diag_only, 1);
        // reduced diagonal minus the diagonal-only marginal is the sum of
        // entries with f⁺_1 ≠ f⁻_1: 2·Re(−1/4) for f_2 = ↑
        const Complex gap = reduced.diagonal(0) - m.diagonal(0);
        CHECK(std::abs(gap - Complex(-0.5, 0.0)) < 1e-12);
        const Complex offdiag = d.at(d.lattice().encode({0, 0}), d.lattice().encode({0, 1})) +
                                d.at(d.lattice().encode({0, 1}), d.lattice().encode({0, 0}));
        CHECK(std::abs(gap - offdiag) < 1e-12);
    }
    CHECK_THROWS_AS(marginalize(full_distribution(rabi(), TimeGrid({0.7})), 2), Error);
    CHECK_THROWS_AS(marginalize(full_distribution(rabi(), TimeGrid({0.7})), 0), Error);
}

TEST_CASE("averages") {
    const QuantumScenario s = rabi();
    const double t = 1.1;
    const BiDistribution d = full_distribution(s, TimeGrid({t}));

    const TupleFunction one = TupleFunction::tabulate(d, [](const BiOutcome&) { return Complex(1.0); });
    CHECK(std::abs(average(d, one) - 1.0) < 1e-12);

    const BiOutcome pick{{0}, {1}};
    const TupleFunction ind = TupleFunction::tabulate(d, [&](const BiOutcome& o) { return Complex(o == pick); });
    CHECK(average(d, ind) == d(pick));

    // X = f⁺ f⁻ against tr[σz(t) ρ σz(t)]
    const TupleFunction prod = TupleFunction::tabulate(d, [&](const BiOutcome& o) {
        return Complex(s.pvm().outcomes[o.plus[0]] * s.pvm().outcomes[o.minus[0]]);
    });
    const oracle::M u = oracle::evolve(oracle::pauli_x() / 2.0, t);
    const oracle::M z_t = u.adjoint() * oracle::pauli_z() * u;
    CHECK(std::abs(average(d, prod) - (z_t * s.state().matrix * z_t).trace()) < 1e-12);

    // X = f⁺ only: ⟨σz(t)⟩ = cos t
    const TupleFunction left = TupleFunction::tabulate(
        d, [&](const BiOutcome& o) { return Complex(s.pvm().outcomes[o.plus[0]]); });
    CHECK(std::abs(average(d, left) - std::cos(t)) < 1e-12);

    // linearity
    const TupleFunction mix = TupleFunction::tabulate(
        d, [&](const BiOutcome& o) { return 2.0 * prod(o) - Complex(0.0, 3.0) * left(o); });
    CHECK(std::abs(average(d, mix) - (2.0 * average(d, prod) - Complex(0.0, 3.0) * average(d, left))) < 1e-12);

    const BiDistribution other = full_distribution(s, TimeGrid({0.5}));
    CHECK_THROWS_AS(average(other, one), Error);
}

TEST_CASE("average over a finer grid ignores added times") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const QuantumScenario s = random_scenario(3, seed, {.segments = 2});
        const TimeGrid coarse({0.3, 0.9});
        const TimeGrid fine({0.1, 0.3, 0.6, 0.9});
        const BiDistribution dc = full_distribution(s, coarse);
        const BiDistribution df = full_distribution(s, fine);
        auto x = [&](std::size_t p1, std::size_t p2, std::size_t m1, std::size_t m2) {
            return Complex(std::cos(1.0 + p1 + 2.0 * p2 + 0.5 * m1), std::sin(0.3 * m2 + p1 * m1));
        };
        const TupleFunction xc = TupleFunction::tabulate(
            dc, [&](const BiOutcome& o) { return x(o.plus_at(1), o.plus_at(2), o.minus_at(1), o.minus_at(2)); });
        const TupleFunction xf = TupleFunction::tabulate(
            df, [&](const BiOutcome& o) { return x(o.plus_at(2), o.plus_at(4), o.minus_at(2), o.minus_at(4)); });
        CHECK(std::abs(average(dc, xc) - average(df, xf)) <= 1e-10);
    }
}
