#include "bitraj/propagate.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

namespace bitraj {

namespace {

void require_in_horizon(const HamiltonianSchedule& schedule, double t) {
    if (!(t >= 0.0) || t > schedule.horizon()) {
        std::ostringstream os;
        os << "time " << t << " outside [0, " << schedule.horizon() << "]";
        throw Error(Errc::OutOfHorizon, os.str());
    }
}

Matrix forward(const HamiltonianSchedule& schedule, double a, double b, int substeps) {
    const Eigen::Index d = schedule.dimension();
    Matrix u = Matrix::Identity(d, d);
    for (const auto& seg : schedule.segments()) {
        const double lo = std::max(a, seg.t_start);
        const double hi = std::min(b, seg.t_end);
        if (!(hi > lo)) {
            continue;
        }
        const double dt = (hi - lo) / substeps;
        const Matrix step = expm_hermitian(seg.h, dt);
        for (int k = 0; k < substeps; ++k) {
            u = step * u;
        }
    }
    return u;
}

} // namespace

UnitaryMatrix propagator(const HamiltonianSchedule& schedule, double t_from, double t_to, int substeps) {
    if (substeps < 1) {
        throw Error(Errc::InvalidArgument, "substeps must be >= 1");
    }
    require_in_horizon(schedule, t_from);
    require_in_horizon(schedule, t_to);
    const Eigen::Index d = schedule.dimension();
    if (t_from == t_to) {
        return {Matrix::Identity(d, d), t_from, t_to};
    }
    if (t_from < t_to) {
        return {forward(schedule, t_from, t_to, substeps), t_from, t_to};
    }
    return {forward(schedule, t_to, t_from, substeps).adjoint(), t_from, t_to};
}

Matrix heisenberg_projector(const QuantumScenario& scenario, double outcome, double t, int substeps) {
    const std::size_t i = scenario.pvm().index_of(outcome);
    const Matrix u = propagator(scenario.schedule(), 0.0, t, substeps).matrix;
    return u.adjoint() * scenario.pvm().projectors[i] * u;
}

std::vector<std::vector<Matrix>> heisenberg_projectors(const HamiltonianSchedule& schedule,
                                                       const std::vector<double>& times,
                                                       const std::vector<const ObservablePVM*>& slot_pvms,
                                                       int substeps) {
    if (times.size() != slot_pvms.size()) {
        throw Error(Errc::LengthMismatch, "one PVM per grid slot required");
    }
    std::vector<std::vector<Matrix>> out(times.size());
    const Eigen::Index d = schedule.dimension();
    Matrix u = Matrix::Identity(d, d); // Û_{t_j, 0}
    double previous = 0.0;
    for (std::size_t j = 0; j < times.size(); ++j) {
        u = propagator(schedule, previous, times[j], substeps).matrix * u;
        previous = times[j];
        const ObservablePVM& pvm = *slot_pvms[j];
        out[j].reserve(pvm.size());
        for (const Matrix& p : pvm.projectors) {
            out[j].push_back(u.adjoint() * p * u);
        }
    }
    return out;
}

double operator_norm(const Matrix& m) {
    if (m.rows() != m.cols()) {
        throw Error(Errc::NonSquare, "operator norm needs a square matrix");
    }
    return spectral_norm(m);
}

double integrated_norm(const HamiltonianSchedule& schedule, double horizon) {
    if (horizon > schedule.horizon() || horizon < 0.0) {
        std::ostringstream os;
        os << "horizon " << horizon << " outside schedule [0, " << schedule.horizon() << "]";
        throw Error(Errc::OutOfHorizon, os.str());
    }
    double total = 0.0;
    for (const auto& seg : schedule.segments()) {
        const double hi = std::min(horizon, seg.t_end);
        if (hi > seg.t_start) {
            total += (hi - seg.t_start) * operator_norm(seg.h);
        }
    }
    return total;
}

Matrix PropagatorCache::get(double t_from, double t_to, int substeps) {
    const Key key{std::bit_cast<std::uint64_t>(t_from), std::bit_cast<std::uint64_t>(t_to), substeps};
    {
        std::lock_guard lock(mutex_);
        if (auto it = entries_.find(key); it != entries_.end()) {
            return it->second;
        }
    }
    Matrix u = propagator(schedule_, t_from, t_to, substeps).matrix;
    std::lock_guard lock(mutex_);
    return entries_.emplace(key, std::move(u)).first->second;
}

std::size_t PropagatorCache::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

} // namespace bitraj
