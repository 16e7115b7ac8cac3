#include "bitraj/comb.hpp"

#include "bitraj/parallel.hpp"
#include "bitraj/propagate.hpp"

#include <cmath>
#include <sstream>

namespace bitraj {

namespace {

// instruments[slot][f⁺·m + f⁻]
using SlotInstruments = std::vector<std::vector<Matrix>>;

SlotInstruments slot_instruments(const QuantumScenario& scenario, const TimeGrid& grid, int substeps) {
    grid.require_within(scenario.horizon());
    const ObservablePVM& pvm = scenario.pvm();
    const std::size_t m = pvm.size();
    SlotInstruments out;
    for (double t : grid.times()) {
        const Matrix u = propagator(scenario.schedule(), 0.0, t, substeps).matrix;
        std::vector<Matrix> heis;
        for (const auto& p : pvm.projectors) {
            heis.push_back(u.adjoint() * p * u);
        }
        std::vector<Matrix> slot(m * m);
        for (std::size_t a = 0; a < m; ++a) {
            for (std::size_t b = 0; b < m; ++b) {
                slot[a * m + b] = Superoperator::sandwich(heis[a], heis[b]).matrix();
            }
        }
        out.push_back(std::move(slot));
    }
    return out;
}

Complex run_comb(const SlotInstruments& inst, std::size_t m, const Matrix& vec_rho, const BiOutcome& outcome) {
    Matrix v = vec_rho;
    for (std::size_t j = 1; j <= inst.size(); ++j) {
        v = inst[j - 1][outcome.plus_at(j) * m + outcome.minus_at(j)] * v;
    }
    // tr A = vec(1)†·vec(A)
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.rows()))));
    Complex tr = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
        tr += v(i + i * d);
    }
    return tr;
}

TupleLattice uniform_lattice(const QuantumScenario& scenario, const TimeGrid& grid) {
    return TupleLattice(std::vector<std::size_t>(grid.size(), scenario.pvm().size()));
}

} // namespace

Superoperator bi_instrument(const QuantumScenario& scenario, double f_plus, double f_minus, double t, int substeps) {
    const ObservablePVM& pvm = scenario.pvm();
    const std::size_t a = pvm.index_of(f_plus);
    const std::size_t b = pvm.index_of(f_minus);
    if (!(t >= 0.0) || t > scenario.horizon()) {
        throw Error(Errc::OutOfHorizon, "instrument time outside [0, horizon]");
    }
    const Matrix u = propagator(scenario.schedule(), 0.0, t, substeps).matrix;
    return Superoperator::sandwich(u.adjoint() * pvm.projectors[a] * u, u.adjoint() * pvm.projectors[b] * u);
}

Complex comb_biprob(const QuantumScenario& scenario, const TimeGrid& grid, const BiOutcome& outcome,
                    const EvalOptions& options) {
    check_outcome(uniform_lattice(scenario, grid), outcome);
    return run_comb(slot_instruments(scenario, grid, options.substeps), scenario.pvm().size(),
                    vectorize(scenario.state().matrix), outcome);
}

std::vector<Complex> comb_table(const QuantumScenario& scenario, const TimeGrid& grid, const EvalOptions& options) {
    const TupleLattice lat = uniform_lattice(scenario, grid);
    const std::size_t count = lat.count();
    if (count > options.enumeration_cap || count * count > options.enumeration_cap) {
        std::ostringstream os;
        os << count << "^2 pairs exceed the enumeration cap " << options.enumeration_cap;
        throw Error(Errc::EnumerationTooLarge, os.str());
    }
    const SlotInstruments inst = slot_instruments(scenario, grid, options.substeps);
    const Matrix vec_rho = vectorize(scenario.state().matrix);
    const std::size_t m = scenario.pvm().size();
    std::vector<Complex> out(count * count);
    parallel_for(count, [&](std::size_t a) {
        const OutcomeTuple plus = lat.decode(a);
        for (std::size_t b = 0; b < count; ++b) {
            out[a * count + b] = run_comb(inst, m, vec_rho, BiOutcome{plus, lat.decode(b)});
        }
    });
    return out;
}

} // namespace bitraj
