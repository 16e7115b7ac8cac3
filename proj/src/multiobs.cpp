#include "bitraj/multiobs.hpp"

#include "bitraj/parallel.hpp"
#include "bitraj/propagate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace bitraj {

// --- ObservableSequence -----------------------------------------------------------

ObservableSequence::ObservableSequence(std::vector<ObservablePVM> slots, Eigen::Index d, const Tolerances& tol)
    : slots_(std::move(slots)) {
    std::vector<Violation> all;
    for (std::size_t j = 0; j < slots_.size(); ++j) {
        auto v = check_pvm(slots_[j], d, "observables[" + std::to_string(j) + "]", tol);
        all.insert(all.end(), v.begin(), v.end());
    }
    if (!all.empty()) {
        throw ValidationError(std::move(all));
    }
}

TupleLattice ObservableSequence::lattice() const {
    std::vector<std::size_t> r;
    for (const auto& p : slots_) {
        r.push_back(p.size());
    }
    return TupleLattice(std::move(r));
}

ObservableSequence ObservableSequence::without(std::size_t slot) const {
    ObservableSequence s = *this;
    s.slots_.erase(s.slots_.begin() + static_cast<std::ptrdiff_t>(slot));
    return s;
}

namespace {

void require_lengths(const TimeGrid& grid, const ObservableSequence& seq) {
    if (grid.size() != seq.size()) {
        throw Error(Errc::LengthMismatch, "observable sequence has " + std::to_string(seq.size()) +
                                              " slots, grid has " + std::to_string(grid.size()));
    }
}

void require_slot_outcomes(const ObservableSequence& seq, const BiOutcome& o) {
    const std::size_t n = seq.size();
    if (o.plus.size() != n || o.minus.size() != n) {
        throw Error(Errc::LengthMismatch, "outcome tuples must have one entry per slot");
    }
    for (std::size_t j = 1; j <= n; ++j) {
        const std::size_t m = seq[j - 1].size();
        if (o.plus_at(j) >= m || o.minus_at(j) >= m) {
            throw Error(Errc::SlotOutcomeMismatch,
                        "outcome index out of range for the observable at slot " + std::to_string(j));
        }
    }
}

ChainEvaluator multiobs_evaluator(const QuantumScenario& scenario, const TimeGrid& grid,
                                  const ObservableSequence& seq, int substeps) {
    require_lengths(grid, seq);
    grid.require_within(scenario.horizon());
    std::vector<const ObservablePVM*> pvms;
    for (const auto& p : seq.slots()) {
        if (p.dimension() != scenario.dimension()) {
            throw Error(Errc::DimensionMismatch, "observable dimension differs from the scenario");
        }
        pvms.push_back(&p);
    }
    return ChainEvaluator(scenario.state().matrix,
                          heisenberg_projectors(scenario.schedule(), grid.times(), pvms, substeps));
}

} // namespace

BiOutcome multiobs_outcome(const ObservableSequence& seq, const std::vector<double>& plus,
                           const std::vector<double>& minus) {
    const std::size_t n = seq.size();
    if (plus.size() != n || minus.size() != n) {
        throw Error(Errc::LengthMismatch, "outcome tuples must have one entry per slot");
    }
    BiOutcome o{OutcomeTuple(n), OutcomeTuple(n)};
    for (std::size_t p = 0; p < n; ++p) {
        const ObservablePVM& pvm = seq[n - 1 - p];
        try {
            o.plus[p] = pvm.index_of(plus[p]);
            o.minus[p] = pvm.index_of(minus[p]);
        } catch (const Error&) {
            throw Error(Errc::SlotOutcomeMismatch,
                        "outcome not in the observable at slot " + std::to_string(n - p));
        }
    }
    return o;
}

Complex eval_multiobs(const QuantumScenario& scenario, const TimeGrid& grid, const ObservableSequence& seq,
                      const BiOutcome& outcome, const EvalOptions& options) {
    require_lengths(grid, seq);
    require_slot_outcomes(seq, outcome);
    return multiobs_evaluator(scenario, grid, seq, options.substeps).trace_formula(outcome);
}

BiDistribution multiobs_distribution(const QuantumScenario& scenario, const TimeGrid& grid,
                                     const ObservableSequence& seq, const EvalOptions& options) {
    const ChainEvaluator ev = multiobs_evaluator(scenario, grid, seq, options.substeps);
    std::vector<std::vector<double>> outcomes;
    for (const auto& p : seq.slots()) {
        outcomes.push_back(p.outcomes);
    }
    BiDistribution dist(grid, std::move(outcomes), ev.table(options.enumeration_cap), scenario.fingerprint());
    const double dev = std::abs(dist.total() - Complex(1.0));
    if (dev > options.normalization_tol) {
        std::ostringstream os;
        os << "multi-observable bi-probabilities sum to 1 within " << dev;
        throw Error(Errc::NormalizationError, os.str());
    }
    return dist;
}

// --- generic bi-probabilities ------------------------------------------------------

namespace {

void require_unitaries(const std::vector<Matrix>& us) {
    for (const auto& u : us) {
        if (u.rows() != u.cols() || u.rows() != us.front().rows()) {
            throw Error(Errc::DimensionMismatch, "generic unitaries must share one square dimension");
        }
    }
}

// gram[j](a, b) = ⟨a|Û_{j+1}†Û_j|b⟩ for consecutive slots.
std::vector<Matrix> overlaps(const std::vector<Matrix>& us) {
    std::vector<Matrix> g;
    for (std::size_t j = 0; j + 1 < us.size(); ++j) {
        g.push_back(us[j + 1].adjoint() * us[j]);
    }
    return g;
}

// c(k) = Π_{j=1}^{n−1} ⟨k_{j+1}|Û_{j+1}†Û_j|k_j⟩ over a uniform lattice index.
Complex chain_amplitude(const std::vector<Matrix>& gram, const TupleLattice& lat, std::size_t index) {
    Complex c = 1.0;
    for (std::size_t j = 0; j < gram.size(); ++j) {
        c *= gram[j](static_cast<Eigen::Index>(lat.digit(index, j + 1)), static_cast<Eigen::Index>(lat.digit(index, j)));
    }
    return c;
}

TupleLattice generic_lattice(const std::vector<Matrix>& us) {
    return TupleLattice(std::vector<std::size_t>(us.size(), static_cast<std::size_t>(us.front().rows())));
}

void require_cap(std::size_t count, std::size_t cap) {
    if (count > cap || count * count > cap) {
        std::ostringstream os;
        os << count << "^2 entries exceed the enumeration cap " << cap;
        throw Error(Errc::EnumerationTooLarge, os.str());
    }
}

} // namespace

Complex eval_generic(const GenericTuple& g) {
    const std::size_t n = g.unitaries.size();
    if (n == 0 || g.plus.size() != n || g.minus.size() != n) {
        throw Error(Errc::LengthMismatch, "generic tuple needs one index per unitary");
    }
    require_unitaries(g.unitaries);
    const auto d = static_cast<std::size_t>(g.unitaries.front().rows());
    for (std::size_t p = 0; p < n; ++p) {
        if (g.plus[p] >= d || g.minus[p] >= d) {
            throw Error(Errc::IndexOutOfRange, "basis index " + std::to_string(std::max(g.plus[p], g.minus[p])) +
                                                   " outside 0.." + std::to_string(d - 1));
        }
    }
    // latest first: position p holds slot n − p
    if (g.plus.front() != g.minus.front() || g.plus.back() != g.minus.back()) {
        return 0.0;
    }
    auto ket = [&](std::size_t slot, std::size_t k) { return g.unitaries[slot].col(static_cast<Eigen::Index>(k)); };
    Complex q = 1.0;
    for (std::size_t slot = 0; slot + 1 < n; ++slot) {
        const std::size_t pos = n - 1 - slot;
        q *= ket(slot + 1, g.plus[pos - 1]).dot(ket(slot, g.plus[pos]));
        q *= ket(slot, g.minus[pos]).dot(ket(slot + 1, g.minus[pos - 1]));
    }
    return q;
}

std::vector<Complex> generic_table(const std::vector<Matrix>& unitaries, std::size_t cap) {
    if (unitaries.empty()) {
        throw Error(Errc::LengthMismatch, "generic family needs at least one slot");
    }
    require_unitaries(unitaries);
    const TupleLattice lat = generic_lattice(unitaries);
    const std::size_t count = lat.count();
    require_cap(count, cap);
    const std::vector<Matrix> gram = overlaps(unitaries);
    std::vector<Complex> amp(count);
    for (std::size_t a = 0; a < count; ++a) {
        amp[a] = chain_amplitude(gram, lat, a);
    }
    const std::size_t last = lat.slots() - 1;
    std::vector<Complex> out(count * count, Complex(0.0));
    parallel_for(count, [&](std::size_t a) {
        for (std::size_t b = 0; b < count; ++b) {
            if (lat.digit(a, 0) == lat.digit(b, 0) && lat.digit(a, last) == lat.digit(b, last)) {
                out[a * count + b] = amp[a] * std::conj(amp[b]);
            }
        }
    });
    return out;
}

double generic_l1_norm(const std::vector<Matrix>& unitaries, std::size_t cap) {
    if (unitaries.empty()) {
        throw Error(Errc::LengthMismatch, "generic family needs at least one slot");
    }
    require_unitaries(unitaries);
    const TupleLattice lat = generic_lattice(unitaries);
    require_cap(lat.count(), cap);
    const std::vector<Matrix> gram = overlaps(unitaries);
    const std::size_t d = lat.radix(0);
    const std::size_t last = lat.slots() - 1;
    // Σ_{a,b} δδ |c(a)||c(b)| = Σ_{k₁,k_n} (Σ_{a ∈ (k₁,k_n)} |c(a)|)²
    std::vector<double> block(d * d, 0.0);
    for (std::size_t a = 0; a < lat.count(); ++a) {
        block[lat.digit(a, 0) * d + lat.digit(a, last)] += std::abs(chain_amplitude(gram, lat, a));
    }
    double s = 0.0;
    for (double b : block) {
        s += b * b;
    }
    return s;
}

// --- decomposition ---------------------------------------------------------------------

EigenFrame pvm_frame(const ObservablePVM& pvm) {
    const Eigen::Index d = pvm.dimension();
    EigenFrame f{Matrix(d, d), {}};
    Eigen::Index col = 0;
    for (std::size_t i = 0; i < pvm.size(); ++i) {
        const Matrix range = projector_range(pvm.projectors[i]);
        for (Eigen::Index c = 0; c < range.cols(); ++c) {
            if (col >= d) {
                throw Error(Errc::NotAProjector, "projector ranks exceed the dimension");
            }
            f.basis.col(col++) = range.col(c);
            f.outcome_of.push_back(i);
        }
    }
    if (col != d) {
        throw Error(Errc::IncompletePVM, "projector ranks do not add up to the dimension");
    }
    return f;
}

StateFrame state_frame(const Matrix& rho) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()));
    const Eigen::Index d = rho.rows();
    std::vector<Vector> vecs;
    for (Eigen::Index k = 0; k < d; ++k) {
        Vector v = es.eigenvectors().col(k);
        // fix the phase: first non-negligible entry real positive
        for (Eigen::Index i = 0; i < d; ++i) {
            if (std::abs(v(i)) > 1e-12) {
                v *= std::conj(v(i)) / std::abs(v(i));
                break;
            }
        }
        vecs.push_back(v);
    }
    std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    const auto& ev = es.eigenvalues();
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        if (std::abs(ev(a) - ev(b)) > 1e-12) {
            return ev(a) > ev(b);
        }
        for (Eigen::Index i = 0; i < d; ++i) {
            const Complex x = vecs[static_cast<std::size_t>(a)](i);
            const Complex y = vecs[static_cast<std::size_t>(b)](i);
            if (x.real() != y.real()) {
                return x.real() < y.real();
            }
            if (x.imag() != y.imag()) {
                return x.imag() < y.imag();
            }
        }
        return false;
    });
    StateFrame f{Matrix(d, d), {}};
    for (Eigen::Index k = 0; k < d; ++k) {
        const Eigen::Index src = order[static_cast<std::size_t>(k)];
        f.basis.col(k) = vecs[static_cast<std::size_t>(src)];
        f.weights.push_back(std::max(0.0, ev(src)));
    }
    return f;
}

DecompositionRecord decompose_multiobs(const QuantumScenario& scenario, const TimeGrid& grid,
                                       const ObservableSequence& seq, const BiOutcome& outcome,
                                       const EvalOptions& options) {
    DecompositionRecord rec;
    rec.direct = eval_multiobs(scenario, grid, seq, outcome, options);

    const std::size_t n = grid.size();
    const Eigen::Index d = scenario.dimension();
    std::size_t total = 1;
    for (std::size_t i = 0; i < 2 * (n + 1); ++i) {
        total *= static_cast<std::size_t>(d);
        if (total > options.enumeration_cap) {
            throw Error(Errc::EnumerationTooLarge, "decomposition sum exceeds the enumeration cap " +
                                                       std::to_string(options.enumeration_cap));
        }
    }

    const StateFrame rho = state_frame(scenario.state().matrix);
    std::vector<Matrix> us{rho.basis};
    std::vector<std::vector<std::size_t>> outcome_of(1);
    for (std::size_t j = 0; j < n; ++j) {
        const EigenFrame f = pvm_frame(seq[j]);
        us.push_back(propagator(scenario.schedule(), 0.0, grid[j], options.substeps).matrix.adjoint() * f.basis);
        outcome_of.push_back(f.outcome_of);
    }

    const TupleLattice lat(std::vector<std::size_t>(n + 1, static_cast<std::size_t>(d)));
    // Only index tuples whose eigenvalue labels match the outcomes survive the deltas.
    std::vector<OutcomeTuple> plus_ok, minus_ok;
    for (std::size_t a = 0; a < lat.count(); ++a) {
        bool p = true, m = true;
        for (std::size_t j = 1; j <= n; ++j) {
            const std::size_t label = outcome_of[j][lat.digit(a, j)];
            p = p && label == outcome.plus_at(j);
            m = m && label == outcome.minus_at(j);
        }
        if (p) {
            plus_ok.push_back(lat.decode(a));
        }
        if (m) {
            minus_ok.push_back(lat.decode(a));
        }
    }
    for (const auto& kp : plus_ok) {
        const double wp = rho.weights[kp.back()];
        for (const auto& km : minus_ok) {
            const double w = std::sqrt(wp * rho.weights[km.back()]);
            if (w == 0.0) {
                continue;
            }
            rec.reconstructed += w * eval_generic(GenericTuple{us, kp, km});
        }
    }
    return rec;
}

// --- paths -------------------------------------------------------------------------------

UnitaryPath::UnitaryPath(std::vector<PathSegment> segments, Matrix anchor)
    : segments_(std::move(segments)), anchor_(std::move(anchor)) {
    const Eigen::Index d = anchor_.rows();
    if (anchor_.cols() != d || (anchor_.adjoint() * anchor_ - Matrix::Identity(d, d)).norm() > 1e-9) {
        throw Error(Errc::InvalidArgument, "path anchor must be unitary");
    }
    double total = 0.0;
    std::vector<Violation> bad;
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        const auto& s = segments_[i];
        if (!(s.duration > 0.0)) {
            throw Error(Errc::InvalidArgument, "path segment durations must be positive");
        }
        if (s.generator.rows() != d || s.generator.cols() != d) {
            throw Error(Errc::DimensionMismatch, "path generator dimension differs from the anchor");
        }
        auto v = check_hermitian(s.generator, "path.segments[" + std::to_string(i) + "]", 1e-10);
        bad.insert(bad.end(), v.begin(), v.end());
        total += s.duration;
    }
    if (!bad.empty()) {
        throw ValidationError(std::move(bad));
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw Error(Errc::InvalidArgument, "path segment durations must sum to 1");
    }
}

Matrix path_unitary(const UnitaryPath& path, double tau) {
    if (!(tau >= 0.0) || tau > 1.0 + 1e-12) {
        throw Error(Errc::OutOfHorizon, "path parameter outside [0, 1]");
    }
    Matrix u = path.anchor();
    double start = 0.0;
    for (const auto& s : path.segments()) {
        const double span = std::min(tau, start + s.duration) - start;
        if (span > 0.0) {
            u = expm_hermitian(s.generator, span) * u;
        }
        start += s.duration;
        if (start >= tau) {
            break;
        }
    }
    return u;
}

double path_length(const UnitaryPath& path) {
    double len = 0.0;
    for (const auto& s : path.segments()) {
        len += s.duration * spectral_norm(s.generator);
    }
    return len;
}

UnitaryPath concatenate(const UnitaryPath& first, const UnitaryPath& second, double weight) {
    if (!(weight > 0.0 && weight < 1.0)) {
        throw Error(Errc::InvalidArgument, "concatenation weight must lie in (0, 1)");
    }
    if ((path_unitary(first, 1.0) - second.anchor()).norm() > 1e-9) {
        throw Error(Errc::InvalidArgument, "second path must start where the first ends");
    }
    std::vector<PathSegment> segs;
    for (const auto& s : first.segments()) {
        segs.push_back({s.duration * weight, s.generator / weight});
    }
    for (const auto& s : second.segments()) {
        segs.push_back({s.duration * (1.0 - weight), s.generator / (1.0 - weight)});
    }
    // rounding in the rescaled durations
    double total = 0.0;
    for (const auto& s : segs) {
        total += s.duration;
    }
    segs.back().duration += 1.0 - total;
    return UnitaryPath(std::move(segs), first.anchor());
}

UnitaryPath hamiltonian_path(const Matrix& h, double horizon, double sign) {
    return UnitaryPath({{1.0, sign * horizon * h}}, Matrix::Identity(h.rows(), h.cols()));
}

PathBoundRecord path_bound_check(const UnitaryPath& path, const std::vector<std::vector<double>>& samples,
                                 std::size_t cap) {
    PathBoundRecord r;
    const double d = static_cast<double>(path.dimension());
    r.bound = d * d * std::exp(2.0 * (d - 1.0) * path_length(path));
    for (const auto& taus : samples) {
        if (taus.empty()) {
            throw Error(Errc::BadGrid, "empty path sample");
        }
        std::vector<Matrix> us;
        for (std::size_t j = 0; j < taus.size(); ++j) {
            if (j > 0 && !(taus[j] > taus[j - 1])) {
                throw Error(Errc::BadGrid, "path parameters must be strictly increasing");
            }
            us.push_back(path_unitary(path, taus[j]));
        }
        r.max_l1 = std::max(r.max_l1, generic_l1_norm(us, cap));
    }
    return r;
}

} // namespace bitraj
