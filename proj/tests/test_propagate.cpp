#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bitraj/propagate.hpp"
#include "oracle.hpp"

#include <numbers>
#include <thread>

using namespace bitraj;

namespace {

const double pi = std::numbers::pi;

QuantumScenario rabi(double omega, double horizon) {
    Matrix rho = Matrix::Zero(2, 2);
    rho(0, 0) = 1.0;
    return validate_scenario(
        {2, HamiltonianSchedule::constant(omega * pauli_x() / 2.0, horizon), rho, pauli_z_pvm()});
}

} // namespace

TEST_CASE("rabi half period") {
    const QuantumScenario s = rabi(1.0, 4.0);
    const Matrix u = propagator(s.schedule(), 0.0, pi).matrix;
    const Matrix expect = Complex(0.0, -1.0) * oracle::pauli_x();
    CHECK((u - expect).norm() < 1e-12);
    CHECK((u - oracle::evolve(oracle::pauli_x() / 2.0, pi)).norm() < 1e-12);
}

TEST_CASE("empty interval is the identity") {
    const QuantumScenario s = random_scenario(3, 5);
    CHECK((propagator(s.schedule(), 0.4, 0.4).matrix - Matrix::Identity(3, 3)).norm() == 0.0);
}

TEST_CASE("two-segment product") {
    const Matrix h1 = random_hermitian(3, 11, 0.8);
    const Matrix h2 = random_hermitian(3, 12, 0.9);
    const HamiltonianSchedule sch({{0.0, 1.0, h1}, {1.0, 2.0, h2}});
    const Matrix expect = oracle::evolve(h2, 1.0) * oracle::evolve(h1, 1.0);
    CHECK((propagator(sch, 0.0, 2.0).matrix - expect).norm() < 1e-12);
    CHECK((propagator(sch, 0.0, 2.0, 7).matrix - expect).norm() < 1e-12);
    const Matrix partial = oracle::evolve(h2, 0.3) * oracle::evolve(h1, 0.6);
    CHECK((propagator(sch, 0.4, 1.3).matrix - partial).norm() < 1e-12);
}

TEST_CASE("unitarity, cocycle and inverse") {
    const QuantumScenario s = random_scenario(4, 2, {.segments = 4, .horizon = 2.0});
    const std::vector<double> ts{0.0, 0.5, 1.0, 1.5, 2.0, 0.3, 1.7};
    for (double a : ts) {
        for (double b : ts) {
            const Matrix u = propagator(s.schedule(), a, b).matrix;
            CHECK((u.adjoint() * u - Matrix::Identity(4, 4)).norm() <= 1e-9);
            CHECK((propagator(s.schedule(), b, a).matrix - u.adjoint()).norm() <= 1e-9);
        }
    }
    for (double t1 : {0.0, 0.5}) {
        for (double t2 : {1.0, 1.5}) {
            const double t3 = 2.0;
            const Matrix lhs = propagator(s.schedule(), t1, t3).matrix;
            const Matrix rhs = propagator(s.schedule(), t2, t3).matrix * propagator(s.schedule(), t1, t2).matrix;
            CHECK((lhs - rhs).norm() <= 1e-9);
        }
    }
}

TEST_CASE("propagator errors") {
    const QuantumScenario s = rabi(1.0, 1.0);
    try {
        propagator(s.schedule(), 0.0, 1.5);
        FAIL("expected OutOfHorizon");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::OutOfHorizon);
    }
    CHECK_THROWS_AS(propagator(s.schedule(), 0.0, 0.5, 0), Error);
}

TEST_CASE("heisenberg projectors") {
    const QuantumScenario s = rabi(1.0, 4.0);
    CHECK((heisenberg_projector(s, 1.0, 0.0) - s.pvm().projectors[0]).norm() == 0.0);
    const Matrix flipped = heisenberg_projector(s, 1.0, pi);
    CHECK((flipped - oracle::ket_projector(2, 1)).norm() < 1e-12);
    CHECK((flipped * flipped - flipped).norm() < 1e-12);
    CHECK_THROWS_AS(heisenberg_projector(s, 0.5, 1.0), Error);

    // [H, P] = 0: projectors do not move
    Matrix rho = Matrix::Zero(2, 2);
    rho(0, 0) = 1.0;
    const QuantumScenario z =
        validate_scenario({2, HamiltonianSchedule::constant(0.7 * pauli_z(), 5.0), rho, pauli_z_pvm()});
    for (double t : {0.3, 1.0, 4.9}) {
        CHECK((heisenberg_projector(z, -1.0, t) - z.pvm().projectors[1]).norm() < 1e-14);
    }
}

TEST_CASE("chained projectors match one-shot projectors") {
    const QuantumScenario s = random_scenario(3, 8, {.segments = 3, .horizon = 1.5});
    const std::vector<double> times{0.2, 0.7, 1.5};
    const auto chained = heisenberg_projectors(s.schedule(), times, {&s.pvm(), &s.pvm(), &s.pvm()});
    for (std::size_t j = 0; j < times.size(); ++j) {
        for (std::size_t k = 0; k < s.pvm().size(); ++k) {
            CHECK((chained[j][k] - heisenberg_projector(s, s.pvm().outcomes[k], times[j])).norm() < 1e-12);
        }
    }
}

TEST_CASE("operator norm") {
    CHECK(operator_norm(pauli_x() / 2.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(operator_norm(Matrix::Zero(3, 3)) == 0.0);
    const Matrix h = random_hermitian(4, 3, 0.77);
    CHECK(std::abs(operator_norm(h) - oracle::power_norm(h)) < 1e-10);
    CHECK_THROWS_AS(operator_norm(Matrix::Zero(2, 3)), Error);
}

TEST_CASE("integrated norm is segment exact") {
    const HamiltonianSchedule sch({{0.0, 1.0, pauli_x() / 2.0}, {1.0, 3.0, 2.0 * pauli_z()}});
    CHECK(integrated_norm(sch, 3.0) == doctest::Approx(0.5 + 4.0));
    CHECK(integrated_norm(sch, 2.0) == doctest::Approx(0.5 + 2.0));
    CHECK_THROWS_AS(integrated_norm(sch, 3.5), Error);
}

TEST_CASE("cache hits equal fresh computation under concurrency") {
    const QuantumScenario s = random_scenario(3, 9, {.segments = 2});
    PropagatorCache cache(s.schedule());
    std::vector<std::thread> pool;
    std::vector<int> bad(4, 0);
    for (int w = 0; w < 4; ++w) {
        pool.emplace_back([&, w] {
            for (int k = 0; k < 50; ++k) {
                const double a = 0.1 * (k % 5);
                const double b = 0.5 + 0.1 * (k % 4);
                const Matrix got = cache.get(a, b);
                if ((got - propagator(s.schedule(), a, b).matrix).norm() != 0.0) {
                    ++bad[static_cast<std::size_t>(w)];
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    for (int b : bad) {
        CHECK(b == 0);
    }
    CHECK(cache.size() == 20);
}
