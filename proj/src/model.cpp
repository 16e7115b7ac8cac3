#include "bitraj/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <random>
#include <sstream>

namespace bitraj {

// --- HamiltonianSchedule -----------------------------------------------------

HamiltonianSchedule::HamiltonianSchedule(std::vector<HamiltonianSegment> segments)
    : segments_(std::move(segments)) {}

HamiltonianSchedule HamiltonianSchedule::constant(Matrix h, double horizon) {
    return HamiltonianSchedule({HamiltonianSegment{0.0, horizon, std::move(h)}});
}

double HamiltonianSchedule::horizon() const noexcept {
    return segments_.empty() ? 0.0 : segments_.back().t_end;
}

Eigen::Index HamiltonianSchedule::dimension() const noexcept {
    return segments_.empty() ? 0 : segments_.front().h.rows();
}

HamiltonianSchedule sample_smooth(const std::function<Matrix(double)>& h, double horizon,
                                  int segments_per_unit_time) {
    if (!(horizon > 0.0) || segments_per_unit_time < 1) {
        throw Error(Errc::InvalidArgument, "sample_smooth needs horizon > 0 and at least one segment per unit time");
    }
    const int count = std::max(1, static_cast<int>(std::ceil(horizon * segments_per_unit_time)));
    std::vector<HamiltonianSegment> segments;
    segments.reserve(count);
    for (int k = 0; k < count; ++k) {
        const double a = horizon * k / count;
        const double b = (k + 1 == count) ? horizon : horizon * (k + 1) / count;
        segments.push_back({a, b, h(0.5 * (a + b))});
    }
    return HamiltonianSchedule(std::move(segments));
}

// --- ObservablePVM -------------------------------------------------------------

std::size_t ObservablePVM::index_of(double outcome) const {
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        if (outcomes[i] == outcome) {
            return i;
        }
    }
    std::ostringstream os;
    os << "outcome " << outcome << " is not in the PVM";
    throw Error(Errc::UnknownOutcome, os.str());
}

Matrix ObservablePVM::observable() const {
    const Eigen::Index d = dimension();
    Matrix f = Matrix::Zero(d, d);
    for (std::size_t i = 0; i < size(); ++i) {
        f += outcomes[i] * projectors[i];
    }
    return f;
}

bool ObservablePVM::rank_one() const {
    if (static_cast<Eigen::Index>(size()) != dimension()) {
        return false;
    }
    return std::all_of(projectors.begin(), projectors.end(),
                       [](const Matrix& p) { return std::abs(p.trace().real() - 1.0) < 1e-8; });
}

ObservablePVM pauli_z_pvm() {
    return ObservablePVM{{1.0, -1.0}, {basis_projector(2, 0), basis_projector(2, 1)}};
}

ObservablePVM pauli_x_pvm() {
    Matrix plus(2, 2);
    plus << 0.5, 0.5, 0.5, 0.5;
    Matrix minus(2, 2);
    minus << 0.5, -0.5, -0.5, 0.5;
    return ObservablePVM{{1.0, -1.0}, {plus, minus}};
}

// --- validation ------------------------------------------------------------------

namespace {

bool finite(const Matrix& m) {
    return m.allFinite();
}

std::string indexed(const std::string& field, std::size_t i) {
    return field + "[" + std::to_string(i) + "]";
}

} // namespace

std::vector<Violation> check_hermitian(const Matrix& m, const std::string& field, double tol) {
    if (m.rows() != m.cols()) {
        return {{Errc::DimensionMismatch, field, static_cast<double>(std::abs(m.rows() - m.cols())), 0.0}};
    }
    if (!finite(m)) {
        return {{Errc::NonHermitian, field, std::numeric_limits<double>::infinity(), tol}};
    }
    const double dev = hermiticity_defect(m);
    if (dev > tol) {
        return {{Errc::NonHermitian, field, dev, tol}};
    }
    return {};
}

std::vector<Violation> check_pvm(const ObservablePVM& pvm, Eigen::Index dim, const std::string& field,
                                 const Tolerances& tol) {
    std::vector<Violation> out;
    if (pvm.outcomes.size() != pvm.projectors.size() || pvm.outcomes.empty()) {
        out.push_back({Errc::DimensionMismatch, field + ".outcomes",
                       std::abs(static_cast<double>(pvm.outcomes.size()) - static_cast<double>(pvm.projectors.size())),
                       0.0});
        return out;
    }
    if (static_cast<Eigen::Index>(pvm.size()) > dim) {
        out.push_back({Errc::DimensionMismatch, field + ".outcomes", static_cast<double>(pvm.size()),
                       static_cast<double>(dim)});
    }
    for (std::size_t i = 0; i < pvm.size(); ++i) {
        for (std::size_t j = i + 1; j < pvm.size(); ++j) {
            if (pvm.outcomes[i] == pvm.outcomes[j]) {
                out.push_back({Errc::IncompletePVM, indexed(field + ".outcomes", j), 0.0, 0.0});
            }
        }
    }
    bool shapes_ok = true;
    for (std::size_t i = 0; i < pvm.size(); ++i) {
        const Matrix& p = pvm.projectors[i];
        if (p.rows() != dim || p.cols() != dim) {
            out.push_back({Errc::DimensionMismatch, indexed(field + ".projectors", i), static_cast<double>(p.rows()),
                           static_cast<double>(dim)});
            shapes_ok = false;
        }
    }
    if (!shapes_ok) {
        return out;
    }
    Matrix sum = Matrix::Zero(dim, dim);
    for (std::size_t i = 0; i < pvm.size(); ++i) {
        const Matrix& p = pvm.projectors[i];
        const std::string name = indexed(field + ".projectors", i);
        auto herm = check_hermitian(p, name, tol.hermitian);
        out.insert(out.end(), herm.begin(), herm.end());
        const double idem = spectral_norm(p * p - p);
        if (idem > tol.projector) {
            out.push_back({Errc::NotAProjector, name, idem, tol.projector});
        }
        for (std::size_t j = i + 1; j < pvm.size(); ++j) {
            const double overlap = spectral_norm(p * pvm.projectors[j]);
            if (overlap > tol.projector) {
                out.push_back({Errc::NonOrthogonal, name + "," + indexed(field + ".projectors", j), overlap,
                               tol.projector});
            }
        }
        sum += p;
    }
    const double completeness = spectral_norm(sum - Matrix::Identity(dim, dim));
    if (completeness > tol.projector) {
        out.push_back({Errc::IncompletePVM, field + ".projectors", completeness, tol.projector});
    }
    return out;
}

std::vector<Violation> check_density(const Matrix& rho, Eigen::Index dim, const std::string& field,
                                     const Tolerances& tol) {
    if (rho.rows() != dim || rho.cols() != dim) {
        return {{Errc::DimensionMismatch, field, static_cast<double>(rho.rows()), static_cast<double>(dim)}};
    }
    std::vector<Violation> out = check_hermitian(rho, field, tol.hermitian);
    if (!out.empty()) {
        return out;
    }
    const double trace_dev = std::abs(rho.trace() - Complex(1.0));
    if (trace_dev > tol.trace) {
        out.push_back({Errc::BadTrace, field, trace_dev, tol.trace});
    }
    const double lowest = min_hermitian_eigenvalue(rho);
    if (lowest < -tol.trace) {
        out.push_back({Errc::NotPositive, field, -lowest, tol.trace});
    }
    return out;
}

std::vector<Violation> check_schedule(const HamiltonianSchedule& schedule, Eigen::Index dim,
                                      const std::string& field, const Tolerances& tol) {
    std::vector<Violation> out;
    const auto& segs = schedule.segments();
    if (segs.empty()) {
        out.push_back({Errc::BadSchedule, field, 0.0, 0.0});
        return out;
    }
    if (segs.front().t_start != 0.0) {
        out.push_back({Errc::BadSchedule, indexed(field, 0) + ".t_start", std::abs(segs.front().t_start), 0.0});
    }
    for (std::size_t k = 0; k < segs.size(); ++k) {
        const auto& s = segs[k];
        const std::string name = indexed(field, k);
        if (!(s.t_end > s.t_start)) {
            out.push_back({Errc::BadSchedule, name + ".t_end", s.t_start - s.t_end, 0.0});
        }
        if (k + 1 < segs.size() && segs[k + 1].t_start != s.t_end) {
            out.push_back({Errc::BadSchedule, indexed(field, k + 1) + ".t_start",
                           std::abs(segs[k + 1].t_start - s.t_end), 0.0});
        }
        if (s.h.rows() != dim || s.h.cols() != dim) {
            out.push_back({Errc::DimensionMismatch, name + ".h", static_cast<double>(s.h.rows()),
                           static_cast<double>(dim)});
            continue;
        }
        auto herm = check_hermitian(s.h, name + ".h", tol.hermitian);
        out.insert(out.end(), herm.begin(), herm.end());
    }
    return out;
}

namespace {

void hash_bytes(std::uint64_t& h, const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
}

void hash_matrix(std::uint64_t& h, const Matrix& m) {
    const Eigen::Index dims[2] = {m.rows(), m.cols()};
    hash_bytes(h, dims, sizeof(dims));
    hash_bytes(h, m.data(), sizeof(Complex) * static_cast<std::size_t>(m.size()));
}

std::string fingerprint_of(const RawScenario& raw) {
    std::uint64_t h = 14695981039346656037ull;
    hash_bytes(h, &raw.dimension, sizeof(raw.dimension));
    for (const auto& s : raw.schedule.segments()) {
        hash_bytes(h, &s.t_start, sizeof(double));
        hash_bytes(h, &s.t_end, sizeof(double));
        hash_matrix(h, s.h);
    }
    hash_matrix(h, raw.state);
    hash_bytes(h, raw.pvm.outcomes.data(), sizeof(double) * raw.pvm.outcomes.size());
    for (const auto& p : raw.pvm.projectors) {
        hash_matrix(h, p);
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

} // namespace

QuantumScenario validate_scenario(const RawScenario& raw, const Tolerances& tol) {
    std::vector<Violation> out;
    const Eigen::Index d = raw.dimension;
    if (d < 1) {
        out.push_back({Errc::DimensionMismatch, "dimension", static_cast<double>(d), 1.0});
        throw ValidationError(std::move(out));
    }
    auto add = [&out](std::vector<Violation> v) { out.insert(out.end(), v.begin(), v.end()); };
    add(check_schedule(raw.schedule, d, "hamiltonian", tol));
    add(check_density(raw.state, d, "initial_state", tol));
    add(check_pvm(raw.pvm, d, "observable", tol));
    if (!out.empty()) {
        throw ValidationError(std::move(out));
    }
    QuantumScenario s;
    s.dimension_ = d;
    s.schedule_ = raw.schedule;
    s.state_ = DensityOperator{raw.state};
    s.pvm_ = raw.pvm;
    s.fingerprint_ = fingerprint_of(raw);
    return s;
}

RawScenario QuantumScenario::raw() const {
    return RawScenario{dimension_, schedule_, state_.matrix, pvm_};
}

// --- TimeGrid -----------------------------------------------------------------------

TimeGrid::TimeGrid(std::vector<double> times) : times_(std::move(times)) {
    for (std::size_t i = 0; i < times_.size(); ++i) {
        if (!std::isfinite(times_[i]) || !(times_[i] > 0.0)) {
            throw Error(Errc::BadGrid, "time " + std::to_string(i) + " must be finite and > 0");
        }
        if (i > 0 && !(times_[i] > times_[i - 1])) {
            throw Error(Errc::BadGrid, "times must be strictly increasing (position " + std::to_string(i) + ")");
        }
    }
}

TimeGrid TimeGrid::without(std::size_t index) const {
    std::vector<double> t = times_;
    t.erase(t.begin() + static_cast<std::ptrdiff_t>(index));
    TimeGrid g;
    g.times_ = std::move(t);
    return g;
}

bool TimeGrid::contains(double t) const noexcept {
    return std::find(times_.begin(), times_.end(), t) != times_.end();
}

void TimeGrid::require_within(double horizon) const {
    if (!times_.empty() && times_.back() > horizon) {
        std::ostringstream os;
        os << "grid time " << times_.back() << " exceeds horizon " << horizon;
        throw Error(Errc::OutOfHorizon, os.str());
    }
}

// --- coarse graining ----------------------------------------------------------------

ObservablePVM coarse_grain_pvm(const ObservablePVM& pvm, const std::vector<OutcomeGroup>& groups) {
    std::vector<int> owner(pvm.size(), -1);
    ObservablePVM out;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (groups[g].members.empty()) {
            throw Error(Errc::EmptyGroup, "group " + std::to_string(g) + " has no members");
        }
        const Eigen::Index d = pvm.dimension();
        Matrix sum = Matrix::Zero(d, d);
        for (double f : groups[g].members) {
            const std::size_t i = pvm.index_of(f);
            if (owner[i] >= 0) {
                throw Error(Errc::InvalidArgument, "outcome assigned to two groups");
            }
            owner[i] = static_cast<int>(g);
            sum += pvm.projectors[i];
        }
        out.outcomes.push_back(groups[g].label);
        out.projectors.push_back(std::move(sum));
    }
    for (std::size_t i = 0; i < pvm.size(); ++i) {
        if (owner[i] < 0) {
            std::ostringstream os;
            os << "outcome " << pvm.outcomes[i] << " is not covered by any group";
            throw Error(Errc::UncoveredOutcome, os.str());
        }
    }
    return out;
}

ObservablePVM coarse_grain_pvm(const ObservablePVM& pvm, const std::map<double, double>& grouping) {
    std::vector<OutcomeGroup> groups;
    for (double f : pvm.outcomes) {
        auto it = grouping.find(f);
        if (it == grouping.end()) {
            std::ostringstream os;
            os << "outcome " << f << " is not covered by the grouping";
            throw Error(Errc::UncoveredOutcome, os.str());
        }
        auto g = std::find_if(groups.begin(), groups.end(),
                              [&](const OutcomeGroup& x) { return x.label == it->second; });
        if (g == groups.end()) {
            groups.push_back({it->second, {f}});
        } else {
            g->members.push_back(f);
        }
    }
    for (const auto& [f, label] : grouping) {
        (void)label;
        pvm.index_of(f);
    }
    return coarse_grain_pvm(pvm, groups);
}

// --- random instances ---------------------------------------------------------------

namespace {

Matrix ginibre(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix g(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            g(i, j) = Complex(re, im);
        }
    }
    return g;
}

Matrix unitary_from(std::mt19937_64& rng, Eigen::Index d) {
    const Matrix g = ginibre(d, d, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(d, d);
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index k = 0; k < d; ++k) {
        const Complex diag = r(k, k);
        const double mag = std::abs(diag);
        if (mag > 0.0) {
            q.col(k) *= diag / mag;
        }
    }
    return q;
}

Matrix hermitian_from(std::mt19937_64& rng, Eigen::Index d, double norm) {
    const Matrix g = ginibre(d, d, rng);
    Matrix h = 0.5 * (g + g.adjoint());
    const double current = spectral_norm(h);
    if (current > 0.0) {
        h *= norm / current;
    }
    return 0.5 * (h + h.adjoint());
}

} // namespace

Matrix random_unitary(Eigen::Index d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return unitary_from(rng, d);
}

Matrix random_hermitian(Eigen::Index d, std::uint64_t seed, double norm) {
    std::mt19937_64 rng(seed);
    return hermitian_from(rng, d, norm);
}

QuantumScenario random_scenario(Eigen::Index d, std::uint64_t seed, const RandomScenarioOptions& options) {
    if (d < 2) {
        throw Error(Errc::InvalidArgument, "random_scenario needs d >= 2");
    }
    if (!(options.norm_cap >= 0.0) || options.segments < 1 || !(options.horizon > 0.0) ||
        options.pvm_groups > static_cast<std::size_t>(d)) {
        throw Error(Errc::InvalidArgument, "invalid random scenario options");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> scale(0.5, 0.95);

    std::vector<HamiltonianSegment> segments;
    for (int k = 0; k < options.segments; ++k) {
        const double a = options.horizon * k / options.segments;
        const double b = (k + 1 == options.segments) ? options.horizon : options.horizon * (k + 1) / options.segments;
        const double norm = options.norm_cap * scale(rng);
        segments.push_back({a, b, hermitian_from(rng, d, norm)});
    }

    Matrix rho;
    if (options.pure) {
        Vector psi = ginibre(d, 1, rng).col(0);
        psi.normalize();
        rho = psi * psi.adjoint();
    } else {
        const Matrix g = ginibre(d, d, rng);
        rho = g * g.adjoint();
        rho /= rho.trace();
    }
    rho = 0.5 * (rho + rho.adjoint());

    const Matrix u = unitary_from(rng, d);
    ObservablePVM pvm;
    for (Eigen::Index k = 0; k < d; ++k) {
        pvm.outcomes.push_back(static_cast<double>(k));
        Matrix p = u.col(k) * u.col(k).adjoint();
        pvm.projectors.push_back(0.5 * (p + p.adjoint()));
    }
    if (options.pvm_groups > 0 && options.pvm_groups < static_cast<std::size_t>(d)) {
        std::vector<OutcomeGroup> groups(options.pvm_groups);
        for (std::size_t g = 0; g < groups.size(); ++g) {
            groups[g].label = static_cast<double>(g);
        }
        for (Eigen::Index k = 0; k < d; ++k) {
            groups[static_cast<std::size_t>(k) % options.pvm_groups].members.push_back(static_cast<double>(k));
        }
        pvm = coarse_grain_pvm(pvm, groups);
    }

    return validate_scenario(RawScenario{d, HamiltonianSchedule(std::move(segments)), rho, pvm});
}

} // namespace bitraj
