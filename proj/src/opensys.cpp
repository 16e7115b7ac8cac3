#include "bitraj/opensys.hpp"

#include "bitraj/parallel.hpp"
#include "bitraj/propagate.hpp"

#include <cmath>

namespace bitraj {

OpenModel::OpenModel(Matrix h_sys, Matrix v_sys, double coupling, QuantumScenario environment)
    : h_sys_(std::move(h_sys)), v_sys_(std::move(v_sys)), coupling_(coupling), env_(std::move(environment)) {
    if (h_sys_.rows() == 0 || h_sys_.rows() != h_sys_.cols() || v_sys_.rows() != h_sys_.rows() ||
        v_sys_.cols() != h_sys_.cols()) {
        throw Error(Errc::DimensionMismatch, "system.h_o and system.v_o must be square of equal size");
    }
    std::vector<Violation> bad = check_hermitian(h_sys_, "system.h_o", Tolerances{}.hermitian);
    auto v = check_hermitian(v_sys_, "system.v_o", Tolerances{}.hermitian);
    bad.insert(bad.end(), v.begin(), v.end());
    if (!bad.empty()) {
        throw ValidationError(std::move(bad));
    }
    if (!std::isfinite(coupling_)) {
        throw Error(Errc::InvalidArgument, "system.lambda must be finite");
    }
    f_ = env_.pvm().observable();
}

Matrix OpenModel::system_step(double f, double dt) const {
    return expm_hermitian(h_sys_ + coupling_ * f * v_sys_, dt);
}

namespace {

void require_time(const OpenModel& model, double t, std::size_t n_steps) {
    if (n_steps == 0) {
        throw Error(Errc::InvalidArgument, "n_steps must be at least 1");
    }
    if (!(t > 0.0) || t > model.environment().horizon()) {
        throw Error(Errc::OutOfHorizon, "time must lie in (0, horizon]");
    }
}

double step_time(double t, std::size_t j, std::size_t n) {
    return j == n ? t : t * static_cast<double>(j) / static_cast<double>(n);
}

// Λ(A) = tr_E[B (A⊗ρ_E) B†] for every basis operator A = E_ab.
Superoperator reduce_joint(const Matrix& joint, const Matrix& rho_env, Eigen::Index d_sys) {
    const Eigen::Index d_env = rho_env.rows();
    Matrix s(d_sys * d_sys, d_sys * d_sys);
    for (Eigen::Index a = 0; a < d_sys; ++a) {
        for (Eigen::Index b = 0; b < d_sys; ++b) {
            Matrix e = Matrix::Zero(d_sys, d_sys);
            e(a, b) = 1.0;
            const Matrix out = partial_trace_env(joint * kron(e, rho_env) * joint.adjoint(), d_sys, d_env);
            s.col(a + b * d_sys) = vectorize(out);
        }
    }
    return Superoperator(std::move(s));
}

} // namespace

Superoperator bitrajectory_map(const OpenModel& model, double t, std::size_t n_steps, const OpenOptions& options) {
    require_time(model, t, n_steps);
    const QuantumScenario& env = model.environment();
    const ObservablePVM& pvm = env.pvm();
    const Eigen::Index d_sys = model.system_dimension();
    const Eigen::Index d_env = env.dimension();
    const double dt = t / static_cast<double>(n_steps);

    std::vector<Matrix> steps;
    for (double f : pvm.outcomes) {
        steps.push_back(model.system_step(f, dt));
    }
    // Σ_{f⁺,f⁻} (W_{f⁺}⊗P(f⁺)U)·X·(W_{f⁻}⊗P(f⁻)U)† = B X B† with B = Σ_f W_f⊗P(f)U
    Matrix joint = Matrix::Identity(d_sys * d_env, d_sys * d_env);
    double prev = 0.0;
    for (std::size_t j = 1; j <= n_steps; ++j) {
        const double now = step_time(t, j, n_steps);
        const Matrix u = propagator(env.schedule(), prev, now, options.substeps).matrix;
        Matrix b = Matrix::Zero(d_sys * d_env, d_sys * d_env);
        for (std::size_t i = 0; i < pvm.size(); ++i) {
            b += kron(steps[i], pvm.projectors[i] * u);
        }
        joint = b * joint;
        prev = now;
    }
    return reduce_joint(joint, env.state().matrix, d_sys);
}

Superoperator bitrajectory_map_enumerated(const OpenModel& model, double t, std::size_t n_steps,
                                          const OpenOptions& options) {
    require_time(model, t, n_steps);
    const QuantumScenario& env = model.environment();
    const ObservablePVM& pvm = env.pvm();
    const Eigen::Index d_sys = model.system_dimension();
    const double dt = t / static_cast<double>(n_steps);

    std::vector<double> times;
    for (std::size_t j = 1; j <= n_steps; ++j) {
        times.push_back(step_time(t, j, n_steps));
    }
    EvalOptions eval;
    eval.substeps = options.substeps;
    eval.enumeration_cap = options.enumeration_cap;
    const BiDistribution dist = full_distribution(env, TimeGrid(times), eval);
    const TupleLattice& lat = dist.lattice();
    const std::size_t count = lat.count();

    std::vector<Matrix> steps;
    for (double f : pvm.outcomes) {
        steps.push_back(model.system_step(f, dt));
    }
    // W(f) = Π_{j=n..1} e^{−iΔ(H_O + λ f_j V_O)}
    std::vector<Matrix> path(count);
    for (std::size_t a = 0; a < count; ++a) {
        Matrix w = Matrix::Identity(d_sys, d_sys);
        for (std::size_t slot = 0; slot < n_steps; ++slot) {
            w = steps[lat.digit(a, slot)] * w;
        }
        path[a] = std::move(w);
    }
    std::vector<Matrix> rows(count);
    parallel_for(count, [&](std::size_t a) {
        Matrix acc = Matrix::Zero(d_sys * d_sys, d_sys * d_sys);
        for (std::size_t b = 0; b < count; ++b) {
            const Complex q = dist.at(a, b);
            if (q != Complex(0.0)) {
                acc += q * kron(path[b].conjugate(), path[a]);
            }
        }
        rows[a] = std::move(acc);
    });
    Matrix s = Matrix::Zero(d_sys * d_sys, d_sys * d_sys);
    for (const auto& r : rows) {
        s += r;
    }
    return Superoperator(std::move(s));
}

Superoperator exact_joint_map(const OpenModel& model, double t, int substeps) {
    const QuantumScenario& env = model.environment();
    const Eigen::Index d_sys = model.system_dimension();
    const Eigen::Index d_env = env.dimension();
    if (d_sys * d_env > 64) {
        throw Error(Errc::DimensionTooLarge,
                    "joint dimension " + std::to_string(d_sys * d_env) + " exceeds 64 for the exact map");
    }
    if (!(t >= 0.0) || t > env.horizon()) {
        throw Error(Errc::OutOfHorizon, "time must lie in [0, horizon]");
    }
    const Matrix id_sys = Matrix::Identity(d_sys, d_sys);
    const Matrix id_env = Matrix::Identity(d_env, d_env);
    const Matrix fixed =
        kron(model.h_sys(), id_env) + model.coupling() * kron(model.v_sys(), model.env_observable());
    std::vector<HamiltonianSegment> joint;
    for (const auto& seg : env.schedule().segments()) {
        joint.push_back({seg.t_start, seg.t_end, fixed + kron(id_sys, seg.h)});
    }
    const Matrix u = propagator(HamiltonianSchedule(std::move(joint)), 0.0, t, substeps).matrix;
    return reduce_joint(u, env.state().matrix, d_sys);
}

std::vector<ConvergenceRow> convergence_study(const OpenModel& model, double t, const std::vector<std::size_t>& n_steps,
                                              const OpenOptions& options) {
    for (std::size_t i = 0; i < n_steps.size(); ++i) {
        if (n_steps[i] == 0 || (i > 0 && n_steps[i] <= n_steps[i - 1])) {
            throw Error(Errc::InvalidArgument, "n_steps must be positive and strictly ascending");
        }
    }
    const Superoperator exact = exact_joint_map(model, t, options.substeps);
    std::vector<ConvergenceRow> rows;
    for (std::size_t n : n_steps) {
        rows.push_back({n, distance(bitrajectory_map(model, t, n, options), exact)});
    }
    return rows;
}

double hermiticity_preservation_defect(const Superoperator& map) {
    const Eigen::Index d = map.dimension();
    double worst = 0.0;
    auto probe = [&](const Matrix& x) {
        const Matrix y = map.apply(x);
        worst = std::max(worst, spectral_norm(y - y.adjoint()));
    };
    for (Eigen::Index a = 0; a < d; ++a) {
        for (Eigen::Index b = a; b < d; ++b) {
            Matrix x = Matrix::Zero(d, d);
            x(a, b) = 1.0;
            x(b, a) = 1.0;
            probe(x);
            if (a != b) {
                Matrix y = Matrix::Zero(d, d);
                y(a, b) = kI;
                y(b, a) = -kI;
                probe(y);
            }
        }
    }
    return worst;
}

} // namespace bitraj
