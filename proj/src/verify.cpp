#include "bitraj/verify.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>

namespace bitraj {

bool PropertyReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const PropertyCheck& c) { return c.pass; });
}

const PropertyCheck& PropertyReport::get(const std::string& name) const {
    for (const auto& c : checks) {
        if (c.name == name) {
            return c;
        }
    }
    throw Error(Errc::InvalidArgument, "no property named " + name);
}

namespace {

// Running argmax over entries.
struct Worst {
    double value = 0.0;
    std::size_t plus = 0;
    std::size_t minus = 0;
    std::size_t slot = 0;
    bool seen = false;

    void offer(double v, std::size_t a, std::size_t b, std::size_t j = 0) {
        if (!seen || v > value) {
            value = v;
            plus = a;
            minus = b;
            slot = j;
            seen = true;
        }
    }
};

PropertyCheck finish(std::string name, const Worst& w, double tol, const TupleLattice* lattice) {
    PropertyCheck c;
    c.name = std::move(name);
    c.max_deviation = w.value;
    c.tolerance = tol;
    c.pass = w.value <= tol;
    c.slot = w.slot;
    if (lattice != nullptr && w.seen) {
        c.witness = BiOutcome{lattice->decode(w.plus), lattice->decode(w.minus)};
    }
    return c;
}

Matrix table_matrix(const BiDistribution& dist) {
    const auto n = static_cast<Eigen::Index>(dist.tuple_count());
    Matrix m(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b < n; ++b) {
            m(a, b) = dist.at(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
        }
    }
    return m;
}

} // namespace

PropertyReport check_properties(const BiDistribution& dist, const ReducedFamily& reduced, double tol) {
    PropertyReport report;
    const TupleLattice& lat = dist.lattice();
    const std::size_t count = lat.count();
    const std::size_t n = dist.slots();

    {
        Worst w;
        w.offer(std::abs(dist.total() - Complex(1.0)), 0, 0);
        report.checks.push_back(finish("Q1", w, tol, nullptr));
    }
    {
        Worst w;
        if (n > 0) {
            for (std::size_t a = 0; a < count; ++a) {
                for (std::size_t b = 0; b < count; ++b) {
                    if (lat.digit(a, n - 1) != lat.digit(b, n - 1)) {
                        w.offer(std::abs(dist.at(a, b)), a, b, n);
                    }
                }
            }
        }
        report.checks.push_back(finish("Q2", w, tol, &lat));
    }
    {
        const Matrix m = table_matrix(dist);
        const Matrix herm = 0.5 * (m + m.adjoint());
        Eigen::SelfAdjointEigenSolver<Matrix> es(herm);
        const double lambda = es.eigenvalues()(0);
        Eigen::Index top = 0;
        es.eigenvectors().col(0).cwiseAbs().maxCoeff(&top);
        Worst w;
        w.offer(std::max(0.0, -lambda), static_cast<std::size_t>(top), static_cast<std::size_t>(top));
        report.checks.push_back(finish("Q3", w, tol * std::max(spectral_norm(m), 1.0e-300), &lat));
    }

    std::vector<BiDistribution> shorter(n + 1);
    for (std::size_t j = 1; j <= n; ++j) {
        shorter[j] = reduced(j);
    }
    {
        Worst w;
        const TupleLattice* witness_lattice = nullptr;
        for (std::size_t j = 1; j <= n; ++j) {
            const BiDistribution m = marginalize(dist, j);
            if (m.table().size() != shorter[j].table().size()) {
                throw Error(Errc::DomainMismatch, "reduced family has the wrong outcome lattice");
            }
            const std::size_t rc = m.tuple_count();
            for (std::size_t a = 0; a < rc; ++a) {
                for (std::size_t b = 0; b < rc; ++b) {
                    const double dev = std::abs(m.at(a, b) - shorter[j].at(a, b));
                    if (!w.seen || dev > w.value) {
                        w.offer(dev, a, b, j);
                        witness_lattice = &shorter[j].lattice();
                    }
                }
            }
        }
        report.checks.push_back(finish("Q4", w, tol, witness_lattice));
    }
    {
        Worst w;
        Complex sum = 0.0;
        for (std::size_t a = 0; a < count; ++a) {
            const Complex p = dist.diagonal(a);
            sum += p;
            w.offer(std::max(std::abs(p.imag()), -p.real()), a, a);
        }
        const double norm_dev = std::abs(sum - Complex(1.0));
        if (norm_dev > w.value) {
            w.value = norm_dev;
        }
        report.checks.push_back(finish("P1", w, tol, &lat));
    }
    {
        Worst w;
        for (std::size_t a = 0; a < count; ++a) {
            const double pa = std::max(dist.diagonal(a).real(), 0.0);
            for (std::size_t b = 0; b < count; ++b) {
                const double pb = std::max(dist.diagonal(b).real(), 0.0);
                w.offer(std::max(0.0, std::abs(dist.at(a, b)) - std::sqrt(pa * pb)), a, b);
            }
        }
        report.checks.push_back(finish("P2", w, tol, &lat));
    }
    {
        Worst w;
        if (n > 0) {
            const BiDistribution& prev = shorter[n];
            std::vector<Complex> summed(prev.tuple_count(), Complex(0.0));
            for (std::size_t a = 0; a < count; ++a) {
                summed[lat.drop(a, n - 1)] += dist.diagonal(a);
            }
            for (std::size_t r = 0; r < summed.size(); ++r) {
                w.offer(std::abs(summed[r] - prev.diagonal(r)), r, r, n);
            }
        }
        report.checks.push_back(finish("P3", w, tol, n > 0 ? &shorter[n].lattice() : nullptr));
    }
    {
        Worst w;
        const TupleLattice* witness_lattice = nullptr;
        for (std::size_t j = 1; j <= n; ++j) {
            const std::size_t slot = j - 1;
            const std::size_t rc = shorter[j].tuple_count();
            std::vector<Complex> diag_sum(rc, Complex(0.0));
            std::vector<Complex> offdiag(rc, Complex(0.0));
            // Enumerate entries whose legs agree everywhere except possibly slot j.
            for (std::size_t a = 0; a < count; ++a) {
                const std::size_t r = lat.drop(a, slot);
                const std::size_t base = a - lat.digit(a, slot) * lat.stride(slot);
                for (std::size_t k = 0; k < lat.radix(slot); ++k) {
                    const std::size_t b = base + k * lat.stride(slot);
                    if (b == a) {
                        diag_sum[r] += dist.at(a, a);
                    } else {
                        offdiag[r] += dist.at(a, b);
                    }
                }
            }
            for (std::size_t r = 0; r < rc; ++r) {
                const Complex lhs = shorter[j].diagonal(r) - diag_sum[r];
                const double dev = std::max(std::abs(lhs - offdiag[r]), std::abs(offdiag[r].imag()));
                if (!w.seen || dev > w.value) {
                    w.offer(dev, r, r, j);
                    witness_lattice = &shorter[j].lattice();
                }
            }
        }
        report.checks.push_back(finish("P4", w, tol, witness_lattice));
    }
    {
        Worst w;
        for (std::size_t a = 0; a < count; ++a) {
            for (std::size_t b = a; b < count; ++b) {
                w.offer(std::abs(dist.at(a, b) - std::conj(dist.at(b, a))), a, b);
            }
        }
        report.checks.push_back(finish("hermitian", w, tol, &lat));
    }
    return report;
}

PropertyReport check_properties(const BiDistribution& dist, const QuantumScenario& scenario, double tol,
                                const EvalOptions& options) {
    const TimeGrid grid = dist.grid();
    return check_properties(
        dist, [&](std::size_t j) { return full_distribution(scenario, grid.without(j - 1), options); }, tol);
}

InconsistencyRecord inconsistency_decomposition(const QuantumScenario& scenario, const TimeGrid& grid,
                                                const OutcomeTuple& tuple, std::size_t j,
                                                const EvalOptions& options) {
    const std::size_t n = grid.size();
    if (j < 1 || j > n) {
        throw Error(Errc::BadPosition, "position " + std::to_string(j) + " outside 1.." + std::to_string(n));
    }
    const std::size_t pos = n - j; // latest-first position of slot j
    OutcomeTuple reduced_tuple;
    if (tuple.size() == n) {
        reduced_tuple = tuple;
        reduced_tuple.erase(reduced_tuple.begin() + static_cast<std::ptrdiff_t>(pos));
    } else if (tuple.size() + 1 == n) {
        reduced_tuple = tuple;
    } else {
        throw Error(Errc::LengthMismatch, "tuple must have n or n-1 entries");
    }
    const ChainEvaluator full = make_evaluator(scenario, grid, options.substeps);
    const ChainEvaluator reduced = make_evaluator(scenario, grid.without(j - 1), options.substeps);

    auto with = [&](std::size_t f) {
        OutcomeTuple t = reduced_tuple;
        t.insert(t.begin() + static_cast<std::ptrdiff_t>(pos), f);
        return t;
    };
    InconsistencyRecord rec;
    double diag = 0.0;
    const std::size_t m = scenario.pvm().size();
    for (std::size_t fp = 0; fp < m; ++fp) {
        for (std::size_t fm = 0; fm < m; ++fm) {
            const Complex q = full.trace_formula(BiOutcome{with(fp), with(fm)});
            if (fp == fm) {
                diag += q.real();
            } else {
                rec.offdiag_sum += q;
            }
        }
    }
    rec.lhs = reduced.trace_formula(BiOutcome{reduced_tuple, reduced_tuple}).real() - diag;
    return rec;
}

ClassicalityRecord classicality_report(const BiDistribution& dist) {
    ClassicalityRecord rec;
    const TupleLattice& lat = dist.lattice();
    const std::size_t count = lat.count();
    for (std::size_t a = 0; a < count; ++a) {
        for (std::size_t b = 0; b < count; ++b) {
            if (a != b) {
                rec.offdiagonal_mass += std::abs(dist.at(a, b));
            }
        }
    }
    for (std::size_t j = 1; j <= dist.slots(); ++j) {
        const BiDistribution m = marginalize(dist, j);
        std::vector<double> summed(m.tuple_count(), 0.0);
        for (std::size_t a = 0; a < count; ++a) {
            summed[lat.drop(a, j - 1)] += dist.diagonal(a).real();
        }
        for (std::size_t r = 0; r < summed.size(); ++r) {
            rec.consistency_deviation =
                std::max(rec.consistency_deviation, std::abs(summed[r] - m.diagonal(r).real()));
        }
    }
    return rec;
}

Complex event_measure(const BiDistribution& dist, const std::vector<OutcomeTuple>& event) {
    std::set<std::size_t> idx;
    for (const auto& t : event) {
        idx.insert(dist.lattice().encode(t));
    }
    Complex mu = 0.0;
    for (std::size_t a : idx) {
        for (std::size_t b : idx) {
            mu += dist.at(a, b);
        }
    }
    return mu;
}

double grade2_check(const BiDistribution& dist, const std::vector<OutcomeTuple>& a1,
                    const std::vector<OutcomeTuple>& a2, const std::vector<OutcomeTuple>& a3) {
    const std::vector<const std::vector<OutcomeTuple>*> events{&a1, &a2, &a3};
    std::vector<std::set<std::size_t>> sets;
    for (const auto* e : events) {
        std::set<std::size_t> s;
        for (const auto& t : *e) {
            s.insert(dist.lattice().encode(t));
        }
        sets.push_back(std::move(s));
    }
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t k = i + 1; k < 3; ++k) {
            for (std::size_t x : sets[i]) {
                if (sets[k].count(x) != 0) {
                    throw Error(Errc::OverlappingEvents, "events " + std::to_string(i + 1) + " and " +
                                                             std::to_string(k + 1) + " share a tuple");
                }
            }
        }
    }
    auto join = [](const std::vector<OutcomeTuple>& x, const std::vector<OutcomeTuple>& y) {
        std::vector<OutcomeTuple> u = x;
        u.insert(u.end(), y.begin(), y.end());
        return u;
    };
    const Complex all = event_measure(dist, join(join(a1, a2), a3));
    const Complex dev = all - event_measure(dist, join(a1, a2)) - event_measure(dist, join(a2, a3)) -
                        event_measure(dist, join(a1, a3)) + event_measure(dist, a1) + event_measure(dist, a2) +
                        event_measure(dist, a3);
    return std::abs(dev);
}

TupleFunction lift(const TupleFunction& x, const TimeGrid& coarse, const TimeGrid& fine,
                   const TupleLattice& fine_lattice) {
    // slot_of[s] = fine slot holding coarse slot s
    std::vector<std::size_t> slot_of;
    for (double t : coarse.times()) {
        const auto it = std::find_if(fine.times().begin(), fine.times().end(),
                                     [t](double u) { return std::bit_cast<std::uint64_t>(u) == std::bit_cast<std::uint64_t>(t); });
        if (it == fine.times().end()) {
            throw Error(Errc::NotNested, "grid is not contained in its successor");
        }
        slot_of.push_back(static_cast<std::size_t>(it - fine.times().begin()));
    }
    const TupleLattice& cl = x.lattice();
    auto project = [&](std::size_t index) {
        std::size_t c = 0;
        for (std::size_t s = 0; s < slot_of.size(); ++s) {
            c += fine_lattice.digit(index, slot_of[s]) * cl.stride(s);
        }
        return c;
    };
    const std::size_t count = fine_lattice.count();
    std::vector<std::size_t> proj(count);
    for (std::size_t a = 0; a < count; ++a) {
        proj[a] = project(a);
    }
    std::vector<Complex> values(count * count);
    for (std::size_t a = 0; a < count; ++a) {
        for (std::size_t b = 0; b < count; ++b) {
            values[a * count + b] = x.at(proj[a], proj[b]);
        }
    }
    return TupleFunction(fine.times(), fine_lattice, std::move(values));
}

std::vector<Complex> cauchy_stabilization(const QuantumScenario& scenario, const std::vector<TimeGrid>& grids,
                                          const TupleFunction& x, const EvalOptions& options) {
    if (grids.empty()) {
        return {};
    }
    if (x.times() != grids.front().times()) {
        throw Error(Errc::DomainMismatch, "test function must live on the first grid");
    }
    for (std::size_t k = 1; k < grids.size(); ++k) {
        for (double t : grids[k - 1].times()) {
            if (!grids[k].contains(t)) {
                throw Error(Errc::NotNested, "grid " + std::to_string(k) + " is not contained in grid " +
                                                 std::to_string(k + 1));
            }
        }
    }
    std::vector<Complex> out;
    for (const TimeGrid& g : grids) {
        const BiDistribution d = full_distribution(scenario, g, options);
        out.push_back(average(d, lift(x, grids.front(), g, d.lattice())));
    }
    return out;
}

} // namespace bitraj
