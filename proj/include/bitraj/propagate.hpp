#pragma once

#include "bitraj/model.hpp"

#include <map>
#include <mutex>
#include <tuple>

namespace bitraj {

// Û_{t_to, t_from}: evolves states from t_from to t_to.
struct UnitaryMatrix {
    Matrix matrix;
    double t_from = 0.0;
    double t_to = 0.0;
};

// Ordered product of exact segment exponentials e^{−iHΔ}, each overlapped
// segment split into `substeps` equal pieces. t_from > t_to yields the
// adjoint of the forward propagator; t_from == t_to yields the identity.
UnitaryMatrix propagator(const HamiltonianSchedule& schedule, double t_from, double t_to, int substeps = 1);

// P̂_t(f) = Û_{0,t} P̂(f) Û_{t,0}.
Matrix heisenberg_projector(const QuantumScenario& scenario, double outcome, double t, int substeps = 1);

// Heisenberg projectors for every slot of a grid, indexed [slot][outcome]
// with slots in ascending time order. Propagators are chained across the grid.
std::vector<std::vector<Matrix>> heisenberg_projectors(const HamiltonianSchedule& schedule,
                                                       const std::vector<double>& times,
                                                       const std::vector<const ObservablePVM*>& slot_pvms,
                                                       int substeps = 1);

// Largest singular value; NonSquare for rectangular input.
double operator_norm(const Matrix& m);

// ∫_0^T ‖H(s)‖_op ds, exact for piecewise-constant schedules.
double integrated_norm(const HamiltonianSchedule& schedule, double horizon);

// Memoizes propagators for one schedule. Keys compare times bitwise.
// Safe for concurrent use.
class PropagatorCache {
public:
    explicit PropagatorCache(HamiltonianSchedule schedule) : schedule_(std::move(schedule)) {}

    Matrix get(double t_from, double t_to, int substeps = 1);
    std::size_t size() const;

private:
    using Key = std::tuple<std::uint64_t, std::uint64_t, int>;
    HamiltonianSchedule schedule_;
    mutable std::mutex mutex_;
    std::map<Key, Matrix> entries_;
};

} // namespace bitraj
