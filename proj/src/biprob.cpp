#include "bitraj/biprob.hpp"

#include "bitraj/parallel.hpp"
#include "bitraj/propagate.hpp"

#include <cmath>
#include <sstream>

namespace bitraj {

BiOutcome outcome_from_values(const ObservablePVM& pvm, const std::vector<double>& plus,
                              const std::vector<double>& minus) {
    if (plus.size() != minus.size()) {
        throw Error(Errc::LengthMismatch, "plus and minus tuples differ in length");
    }
    BiOutcome o;
    for (double f : plus) {
        o.plus.push_back(pvm.index_of(f));
    }
    for (double f : minus) {
        o.minus.push_back(pvm.index_of(f));
    }
    return o;
}

// --- TupleLattice ----------------------------------------------------------------

TupleLattice::TupleLattice(std::vector<std::size_t> slot_radices) : radices_(std::move(slot_radices)) {
    strides_.resize(radices_.size());
    count_ = 1;
    for (std::size_t s = 0; s < radices_.size(); ++s) {
        if (radices_[s] == 0) {
            throw Error(Errc::InvalidArgument, "slot with no outcomes");
        }
        strides_[s] = count_;
        count_ *= radices_[s];
    }
}

std::size_t TupleLattice::encode(const OutcomeTuple& tuple) const {
    if (tuple.size() != radices_.size()) {
        throw Error(Errc::LengthMismatch, "tuple has " + std::to_string(tuple.size()) + " entries, grid has " +
                                              std::to_string(radices_.size()) + " slots");
    }
    const std::size_t n = radices_.size();
    std::size_t index = 0;
    for (std::size_t p = 0; p < n; ++p) {
        const std::size_t slot = n - 1 - p;
        if (tuple[p] >= radices_[slot]) {
            throw Error(Errc::UnknownOutcome, "outcome index " + std::to_string(tuple[p]) + " out of range at slot " +
                                                  std::to_string(slot + 1));
        }
        index += tuple[p] * strides_[slot];
    }
    return index;
}

OutcomeTuple TupleLattice::decode(std::size_t index) const {
    const std::size_t n = radices_.size();
    OutcomeTuple t(n);
    for (std::size_t p = 0; p < n; ++p) {
        t[p] = digit(index, n - 1 - p);
    }
    return t;
}

TupleLattice TupleLattice::without(std::size_t slot) const {
    std::vector<std::size_t> r = radices_;
    r.erase(r.begin() + static_cast<std::ptrdiff_t>(slot));
    return TupleLattice(std::move(r));
}

std::size_t TupleLattice::drop(std::size_t index, std::size_t slot) const {
    const std::size_t low = index % strides_[slot];
    const std::size_t high = index / (strides_[slot] * radices_[slot]);
    return low + high * strides_[slot];
}

// --- BiDistribution ----------------------------------------------------------------

BiDistribution::BiDistribution(TimeGrid grid, std::vector<std::vector<double>> slot_outcomes,
                               std::vector<Complex> table, std::string fingerprint)
    : grid_(std::move(grid)), slot_outcomes_(std::move(slot_outcomes)), table_(std::move(table)),
      fingerprint_(std::move(fingerprint)) {
    if (slot_outcomes_.size() != grid_.size()) {
        throw Error(Errc::LengthMismatch, "one outcome list per grid slot required");
    }
    std::vector<std::size_t> radices;
    for (const auto& o : slot_outcomes_) {
        radices.push_back(o.size());
    }
    lattice_ = TupleLattice(std::move(radices));
    if (table_.size() != lattice_.count() * lattice_.count()) {
        throw Error(Errc::LengthMismatch, "table size does not match the outcome lattice");
    }
}

Complex BiDistribution::operator()(const BiOutcome& o) const {
    return at(lattice_.encode(o.plus), lattice_.encode(o.minus));
}

Complex BiDistribution::total() const {
    Complex s = 0.0;
    for (const Complex& q : table_) {
        s += q;
    }
    return s;
}

// --- ChainEvaluator -----------------------------------------------------------------

ChainEvaluator::ChainEvaluator(Matrix rho, std::vector<std::vector<Matrix>> slot_projectors)
    : rho_(std::move(rho)), projectors_(std::move(slot_projectors)) {
    std::vector<std::size_t> radices;
    for (const auto& slot : projectors_) {
        radices.push_back(slot.size());
    }
    lattice_ = TupleLattice(std::move(radices));
}

void check_outcome(const TupleLattice& lattice, const BiOutcome& outcome) {
    if (outcome.plus.size() != lattice.slots() || outcome.minus.size() != lattice.slots()) {
        throw Error(Errc::LengthMismatch, "outcome tuples must have one entry per grid time");
    }
    lattice.encode(outcome.plus);
    lattice.encode(outcome.minus);
}

Complex ChainEvaluator::trace_formula(const BiOutcome& outcome) const {
    check_outcome(lattice_, outcome);
    const std::size_t n = lattice_.slots();
    Matrix m = rho_;
    for (std::size_t j = 1; j <= n; ++j) {
        m = projectors_[j - 1][outcome.plus_at(j)] * m * projectors_[j - 1][outcome.minus_at(j)];
    }
    return m.trace();
}

Matrix ChainEvaluator::chain(std::size_t tuple) const {
    const Eigen::Index d = rho_.rows();
    Matrix k = Matrix::Identity(d, d);
    for (std::size_t s = 0; s < lattice_.slots(); ++s) {
        k = projectors_[s][lattice_.digit(tuple, s)] * k;
    }
    return k;
}

std::vector<Complex> ChainEvaluator::table(std::size_t cap) const {
    const std::size_t count = lattice_.count();
    if (count > cap || count * count > cap) {
        std::ostringstream os;
        os << count << "^2 entries exceed the enumeration cap " << cap;
        throw Error(Errc::EnumerationTooLarge, os.str());
    }
    std::vector<Matrix> chains(count);
    std::vector<Matrix> weighted(count);
    parallel_for(count, [&](std::size_t a) {
        chains[a] = chain(a);
        weighted[a] = chains[a] * rho_;
    });
    std::vector<Complex> out(count * count);
    // Q(a, b) = tr[K_a ρ K_b†] = Σ_ij (K_a ρ)_ij conj((K_b)_ij)
    parallel_for(count, [&](std::size_t a) {
        for (std::size_t b = 0; b < count; ++b) {
            out[a * count + b] = (weighted[a].array() * chains[b].array().conjugate()).sum();
        }
    });
    return out;
}

ChainEvaluator make_evaluator(const QuantumScenario& scenario, const TimeGrid& grid, int substeps) {
    grid.require_within(scenario.horizon());
    std::vector<const ObservablePVM*> pvms(grid.size(), &scenario.pvm());
    return ChainEvaluator(scenario.state().matrix,
                          heisenberg_projectors(scenario.schedule(), grid.times(), pvms, substeps));
}

// --- public evaluation API ------------------------------------------------------------

namespace {

std::vector<std::vector<double>> repeated_outcomes(const ObservablePVM& pvm, std::size_t n) {
    return std::vector<std::vector<double>>(n, pvm.outcomes);
}

} // namespace

Complex eval_biprob(const QuantumScenario& scenario, const TimeGrid& grid, const BiOutcome& outcome,
                    const EvalOptions& options) {
    if (outcome.plus.size() != grid.size() || outcome.minus.size() != grid.size()) {
        throw Error(Errc::LengthMismatch, "outcome tuples must have one entry per grid time");
    }
    return make_evaluator(scenario, grid, options.substeps).trace_formula(outcome);
}

Complex eval_biprob_rank_one(const QuantumScenario& scenario, const TimeGrid& grid, const BiOutcome& outcome,
                             const EvalOptions& options) {
    const ObservablePVM& pvm = scenario.pvm();
    if (!pvm.rank_one()) {
        throw Error(Errc::InvalidArgument, "amplitude route needs a PVM of d rank-1 projectors");
    }
    grid.require_within(scenario.horizon());
    const std::size_t n = grid.size();
    TupleLattice lattice(std::vector<std::size_t>(n, pvm.size()));
    check_outcome(lattice, outcome);
    if (n > 0 && outcome.plus.front() != outcome.minus.front()) {
        return 0.0;
    }
    const Eigen::Index d = scenario.dimension();
    Matrix basis(d, d); // columns |f⟩ in declared order
    for (Eigen::Index k = 0; k < d; ++k) {
        basis.col(k) = projector_range(pvm.projectors[static_cast<std::size_t>(k)]).col(0);
    }
    const Matrix rho = basis.adjoint() * scenario.state().matrix * basis;
    // transitions[j](a, b) = ⟨f_a|Û_{t_{j+1}, t_j}|f_b⟩
    std::vector<Matrix> transitions;
    double previous = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        transitions.push_back(basis.adjoint() *
                              propagator(scenario.schedule(), previous, grid[j], options.substeps).matrix * basis);
        previous = grid[j];
    }
    auto amplitudes = [&](const OutcomeTuple& tuple) {
        // row vector over f₀ of Π_j ⟨f_{j+1}|U|f_j⟩
        Eigen::RowVectorXcd a = Eigen::RowVectorXcd::Zero(d);
        a(static_cast<Eigen::Index>(tuple.front())) = 1.0;
        for (std::size_t j = n; j >= 1; --j) {
            const Eigen::RowVectorXcd next = a * transitions[j - 1];
            a = next;
            if (j > 1) {
                const std::size_t keep = tuple[n - (j - 1)];
                const Complex v = a(static_cast<Eigen::Index>(keep));
                a.setZero();
                a(static_cast<Eigen::Index>(keep)) = v;
            }
        }
        return a;
    };
    if (n == 0) {
        return rho.trace();
    }
    const Eigen::RowVectorXcd ap = amplitudes(outcome.plus);
    const Eigen::RowVectorXcd am = amplitudes(outcome.minus);
    return (ap * rho * am.adjoint())(0, 0);
}

BiDistribution full_distribution(const QuantumScenario& scenario, const TimeGrid& grid,
                                 const EvalOptions& options) {
    const ChainEvaluator ev = make_evaluator(scenario, grid, options.substeps);
    BiDistribution dist(grid, repeated_outcomes(scenario.pvm(), grid.size()), ev.table(options.enumeration_cap),
                        scenario.fingerprint());
    const double dev = std::abs(dist.total() - Complex(1.0));
    if (dev > options.normalization_tol) {
        std::ostringstream os;
        os << "bi-probabilities sum to 1 within " << dev << ", tolerance " << options.normalization_tol;
        throw Error(Errc::NormalizationError, os.str());
    }
    return dist;
}

double diagonal_probability(const QuantumScenario& scenario, const TimeGrid& grid, const OutcomeTuple& tuple,
                            const EvalOptions& options) {
    return eval_biprob(scenario, grid, BiOutcome{tuple, tuple}, options).real();
}

BiDistribution marginalize(const BiDistribution& dist, std::size_t j) {
    const std::size_t n = dist.slots();
    if (j < 1 || j > n) {
        throw Error(Errc::BadPosition, "position " + std::to_string(j) + " outside 1.." + std::to_string(n));
    }
    const std::size_t slot = j - 1;
    const TupleLattice& lat = dist.lattice();
    const TupleLattice reduced = lat.without(slot);
    const std::size_t count = lat.count();
    const std::size_t rcount = reduced.count();
    std::vector<Complex> table(rcount * rcount, Complex(0.0));
    for (std::size_t a = 0; a < count; ++a) {
        const std::size_t ra = lat.drop(a, slot);
        for (std::size_t b = 0; b < count; ++b) {
            table[ra * rcount + lat.drop(b, slot)] += dist.at(a, b);
        }
    }
    auto outcomes = dist.slot_outcomes();
    outcomes.erase(outcomes.begin() + static_cast<std::ptrdiff_t>(slot));
    return BiDistribution(dist.grid().without(slot), std::move(outcomes), std::move(table), dist.fingerprint());
}

// --- TupleFunction / average -------------------------------------------------------------

TupleFunction::TupleFunction(std::vector<double> times, TupleLattice lattice, std::vector<Complex> values)
    : times_(std::move(times)), lattice_(std::move(lattice)), values_(std::move(values)) {
    if (values_.size() != lattice_.count() * lattice_.count() || times_.size() != lattice_.slots()) {
        throw Error(Errc::DomainMismatch, "tuple function must cover the full outcome lattice");
    }
}

TupleFunction TupleFunction::tabulate(const std::vector<double>& times, const TupleLattice& lattice,
                                      const std::function<Complex(const BiOutcome&)>& fn) {
    const std::size_t count = lattice.count();
    std::vector<Complex> values(count * count);
    for (std::size_t a = 0; a < count; ++a) {
        const OutcomeTuple plus = lattice.decode(a);
        for (std::size_t b = 0; b < count; ++b) {
            values[a * count + b] = fn(BiOutcome{plus, lattice.decode(b)});
        }
    }
    return TupleFunction(times, lattice, std::move(values));
}

TupleFunction TupleFunction::tabulate(const BiDistribution& like, const std::function<Complex(const BiOutcome&)>& fn) {
    return tabulate(like.grid().times(), like.lattice(), fn);
}

Complex TupleFunction::operator()(const BiOutcome& o) const {
    return at(lattice_.encode(o.plus), lattice_.encode(o.minus));
}

Complex average(const BiDistribution& dist, const TupleFunction& x) {
    if (x.times() != dist.grid().times() || !(x.lattice() == dist.lattice())) {
        throw Error(Errc::DomainMismatch, "test function is defined on a different grid or outcome lattice");
    }
    const std::size_t count = dist.tuple_count();
    Complex sum = 0.0;
    for (std::size_t a = 0; a < count; ++a) {
        for (std::size_t b = 0; b < count; ++b) {
            sum += dist.at(a, b) * x.at(a, b);
        }
    }
    return sum;
}

} // namespace bitraj
