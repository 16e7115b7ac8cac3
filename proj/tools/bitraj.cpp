#include "bitraj/comb.hpp"
#include "bitraj/io.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>

using namespace bitraj;

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kInputError = 2;

struct Source {
    std::string config;
    int random_dim = 0;
    std::uint64_t seed = 1;
    bool pure = false;
    std::string times;
    std::string out;
    int substeps = 1;
    std::size_t cap = std::size_t{1} << 20;
};

void add_source(CLI::App* sub, Source& s, bool needs_times = true) {
    auto* cfg = sub->add_option("--config", s.config, "scenario JSON file");
    auto* rnd = sub->add_option("--random", s.random_dim, "random scenario of this dimension instead of a file")
                    ->check(CLI::Range(2, 16));
    cfg->excludes(rnd);
    sub->add_option("--seed", s.seed, "seed for --random");
    sub->add_flag("--pure", s.pure, "pure initial state for --random");
    if (needs_times) {
        sub->add_option("--times", s.times, "measurement times, e.g. 0.5,1.0")->required();
    }
    sub->add_option("--out", s.out, "write the result here (plus <out>.manifest.json)");
    sub->add_option("--substeps", s.substeps, "propagator substeps per segment")->check(CLI::PositiveNumber);
    sub->add_option("--cap", s.cap, "enumeration cap on table entries");
}

LoadedConfig load(const Source& s) {
    if (!s.config.empty()) {
        return load_config(s.config);
    }
    if (s.random_dim == 0) {
        throw Error(Errc::InvalidArgument, "one of --config or --random is required");
    }
    double horizon = 1.0;
    if (!s.times.empty()) {
        horizon = std::max(horizon, parse_times(s.times).back());
    }
    RandomScenarioOptions opts;
    opts.pure = s.pure;
    opts.horizon = horizon;
    return LoadedConfig{random_scenario(s.random_dim, s.seed, opts), std::nullopt, std::nullopt};
}

EvalOptions eval_options(const Source& s) {
    EvalOptions o;
    o.substeps = s.substeps;
    o.enumeration_cap = s.cap;
    return o;
}

void emit(const std::string& command, const Source& s, const std::string& body) {
    if (s.out.empty()) {
        std::cout << body;
        return;
    }
    std::ofstream f(s.out);
    if (!f) {
        throw Error(Errc::InvalidArgument, "cannot write '" + s.out + "'");
    }
    f << body;
    RunManifest m;
    m.command = command;
    m.config_path = s.config;
    if (s.random_dim != 0) {
        m.seed = s.seed;
    }
    m.timestamp = utc_timestamp();
    m.outputs = {s.out};
    std::ofstream mf(s.out + ".manifest.json");
    mf << dump_json(manifest_json(m));
}

BiOutcome outcome_arg(const ObservablePVM& pvm, const std::string& plus, const std::string& minus) {
    return outcome_from_values(pvm, parse_values(plus, "--plus"), parse_values(minus, "--minus"));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-time bi-probabilities: evaluation, checks, bounds, open-system maps"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    Source src;
    std::string plus, minus, format = "json";
    double tol = 1e-9;
    double horizon = -1.0;
    std::size_t points = 0;
    int doublings = 1;
    bool cross_check = false;
    bool decompose = false;
    bool run_checks = false;
    double time = -1.0;
    std::size_t steps = 0;
    std::string study;
    double omega = 1.0, tmax = std::numbers::pi;
    std::size_t demo_points = 8;
    std::string command;
    std::vector<std::string> args(argv, argv + argc);
    for (const auto& a : args) {
        command += (command.empty() ? "" : " ") + a;
    }

    auto* eval = app.add_subcommand("eval", "one bi-probability Q(plus, minus)");
    add_source(eval, src);
    eval->add_option("--plus", plus, "outcome values, latest first")->required();
    eval->add_option("--minus", minus, "outcome values, latest first")->required();

    auto* dist = app.add_subcommand("dist", "full bi-distribution table");
    add_source(dist, src);
    dist->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

    auto* verify = app.add_subcommand("verify", "check Q1-Q4, P1-P4 and Hermitian symmetry");
    add_source(verify, src);
    verify->add_option("--tol", tol, "absolute tolerance");

    auto* bound = app.add_subcommand("bound", "l1 norm against the nonuniform and uniform bounds");
    add_source(bound, src);
    bound->add_option("--horizon", horizon, "T for the uniform bound (default: scenario horizon)");

    auto* refine = app.add_subcommand("refine", "l1 norm along a refinement chain N, 2N, ...");
    add_source(refine, src);
    refine->add_option("--points", points, "first refinement size (default: smallest separating N)");
    refine->add_option("--doublings", doublings, "number of doublings after the first mesh")->check(CLI::Range(0, 20));

    auto* multi = app.add_subcommand("multiobs", "bi-probabilities with one observable per slot");
    add_source(multi, src);
    multi->add_option("--plus", plus, "outcome values, latest first");
    multi->add_option("--minus", minus, "outcome values, latest first");
    multi->add_flag("--decompose", decompose, "rebuild the entry from generic bi-probabilities");
    multi->add_flag("--verify", run_checks, "run the property checks on the full table");
    multi->add_option("--tol", tol, "tolerance for --verify");

    auto* open = app.add_subcommand("opensys", "bi-average map against the exact joint evolution");
    add_source(open, src, false);
    open->add_option("--time", time, "final time (default: horizon)");
    open->add_option("--steps", steps, "a single step count");
    open->add_option("--study", study, "ascending step counts, e.g. 8,16,32,64,128");

    auto* comb = app.add_subcommand("comb", "bi-probability through sequential bi-instruments");
    add_source(comb, src);
    comb->add_option("--plus", plus, "outcome values, latest first")->required();
    comb->add_option("--minus", minus, "outcome values, latest first")->required();
    comb->add_flag("--cross-check", cross_check, "also evaluate the trace formula and report the difference");

    auto* demo = app.add_subcommand("demo", "built-in examples");
    demo->require_subcommand(1);
    auto* rabi = demo->add_subcommand("rabi", "single-time table Q_T(±1,±1) over T_k = tmax·k/points");
    rabi->add_option("--omega", omega, "Rabi frequency");
    rabi->add_option("--tmax", tmax, "last T")->check(CLI::PositiveNumber);
    rabi->add_option("--points", demo_points, "number of T values")->check(CLI::Range(1, 100000));
    rabi->add_option("--out", src.out, "write the CSV here (plus <out>.manifest.json)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInputError;
    }

    try {
        if (rabi->parsed()) {
            const QuantumScenario s = validate_scenario(
                {2, HamiltonianSchedule::constant(omega * pauli_x() / 2.0, tmax), basis_projector(2, 0), pauli_z_pvm()});
            std::string csv = "T,q_plus,q_minus,exact_plus,exact_minus\n";
            double worst = 0.0;
            for (std::size_t k = 1; k <= demo_points; ++k) {
                const double t = k == demo_points ? tmax : tmax * static_cast<double>(k) / static_cast<double>(demo_points);
                const TimeGrid g({t});
                const double qp = eval_biprob(s, g, {{0}, {0}}).real();
                const double qm = eval_biprob(s, g, {{1}, {1}}).real();
                const double ep = (1.0 + std::cos(omega * t)) / 2.0;
                const double em = (1.0 - std::cos(omega * t)) / 2.0;
                worst = std::max({worst, std::abs(qp - ep), std::abs(qm - em)});
                csv += format_double(t) + "," + format_double(qp) + "," + format_double(qm) + "," + format_double(ep) +
                       "," + format_double(em) + "\n";
            }
            emit(command, src, csv);
            return worst <= 1e-10 ? kOk : kCheckFailed;
        }

        const LoadedConfig cfg = load(src);
        const QuantumScenario& s = cfg.scenario;
        const EvalOptions opts = eval_options(src);
        auto grid = [&] { return TimeGrid(parse_times(src.times)); };

        if (eval->parsed()) {
            const TimeGrid g = grid();
            const BiOutcome o = outcome_arg(s.pvm(), plus, minus);
            Json j{{"times", g.times()}, {"plus", parse_values(plus, "--plus")}, {"minus", parse_values(minus, "--minus")}};
            j["value"] = complex_json(eval_biprob(s, g, o, opts));
            emit(command, src, dump_json(j));
            return kOk;
        }
        if (dist->parsed()) {
            const BiDistribution d = full_distribution(s, grid(), opts);
            emit(command, src, format == "csv" ? distribution_csv(d) : dump_json(distribution_json(d)));
            return kOk;
        }
        if (verify->parsed()) {
            const BiDistribution d = full_distribution(s, grid(), opts);
            const PropertyReport r = check_properties(d, s, tol, opts);
            emit(command, src, dump_json(report_json(r)));
            return r.all_pass() ? kOk : kCheckFailed;
        }
        if (bound->parsed()) {
            const BiDistribution d = full_distribution(s, grid(), opts);
            const BoundReport r = bound_report(s, d, horizon < 0.0 ? s.horizon() : horizon);
            emit(command, src, dump_json(bound_json(r)));
            return r.margin >= -1e-9 && r.l1_norm >= 1.0 - 1e-9 ? kOk : kCheckFailed;
        }
        if (refine->parsed()) {
            const TimeGrid g = grid();
            const std::size_t n0 = refinement_start(g);
            const std::size_t first = points == 0 ? n0 : points;
            double previous = l1_norm(full_distribution(s, g, opts));
            bool monotone = true;
            Json chain = Json::array();
            for (int k = 0; k <= doublings; ++k) {
                const RefinementMesh mesh = build_refinement(g, first << k, s.horizon());
                const double norm = l1_norm(full_distribution(s, mesh.refined, opts));
                monotone = monotone && norm >= previous - 1e-9;
                previous = norm;
                chain.push_back({{"points", first << k}, {"l1_norm", norm}, {"max_gap", mesh.max_gap()}});
            }
            Json j{{"n0", n0}, {"base_l1_norm", l1_norm(full_distribution(s, g, opts))}, {"chain", std::move(chain)},
                   {"monotone", monotone}};
            emit(command, src, dump_json(j));
            return monotone ? kOk : kCheckFailed;
        }
        if (multi->parsed()) {
            if (!cfg.observables) {
                throw Error(Errc::InvalidArgument, "multiobs needs an `observables` array in the config");
            }
            const ObservableSequence& seq = *cfg.observables;
            const TimeGrid g = grid();
            Json j{{"times", g.times()}};
            bool ok = true;
            if (!plus.empty() || !minus.empty()) {
                const BiOutcome o = multiobs_outcome(seq, parse_values(plus, "--plus"), parse_values(minus, "--minus"));
                if (decompose) {
                    const DecompositionRecord r = decompose_multiobs(s, g, seq, o, opts);
                    j["value"] = complex_json(r.direct);
                    j["reconstructed"] = complex_json(r.reconstructed);
                    j["difference"] = std::abs(r.direct - r.reconstructed);
                    ok = std::abs(r.direct - r.reconstructed) <= 1e-9;
                } else {
                    j["value"] = complex_json(eval_multiobs(s, g, seq, o, opts));
                }
            } else {
                const BiDistribution d = multiobs_distribution(s, g, seq, opts);
                j["l1_norm"] = l1_norm(d);
                if (run_checks) {
                    const PropertyReport r = check_properties(
                        d,
                        [&](std::size_t k) { return multiobs_distribution(s, g.without(k - 1), seq.without(k - 1), opts); },
                        tol);
                    j["report"] = report_json(r);
                    ok = r.all_pass();
                }
                j["distribution"] = distribution_json(d);
            }
            emit(command, src, dump_json(j));
            return ok ? kOk : kCheckFailed;
        }
        if (open->parsed()) {
            if (!cfg.open) {
                throw Error(Errc::InvalidArgument, "opensys needs a `system` block in the config");
            }
            std::vector<std::size_t> counts;
            if (steps != 0) {
                counts.push_back(steps);
            }
            if (!study.empty()) {
                for (double v : parse_values(study, "--study")) {
                    if (v < 1.0 || v != std::floor(v)) {
                        throw Error(Errc::InvalidArgument, "--study entries must be positive integers");
                    }
                    counts.push_back(static_cast<std::size_t>(v));
                }
            }
            if (counts.empty()) {
                counts = {8, 16, 32, 64, 128};
            }
            OpenOptions oo;
            oo.substeps = src.substeps;
            oo.enumeration_cap = src.cap;
            const double t = time < 0.0 ? s.horizon() : time;
            std::string csv = "n_steps,error\n";
            for (const auto& row : convergence_study(*cfg.open, t, counts, oo)) {
                csv += std::to_string(row.n_steps) + "," + format_double(row.error) + "\n";
            }
            emit(command, src, csv);
            return kOk;
        }
        if (comb->parsed()) {
            const TimeGrid g = grid();
            const BiOutcome o = outcome_arg(s.pvm(), plus, minus);
            const Complex c = comb_biprob(s, g, o, opts);
            Json j{{"times", g.times()}, {"comb", complex_json(c)}};
            bool ok = true;
            if (cross_check) {
                const Complex t = eval_biprob(s, g, o, opts);
                j["trace"] = complex_json(t);
                j["difference"] = std::abs(c - t);
                ok = std::abs(c - t) <= 1e-10;
            }
            emit(command, src, dump_json(j));
            return ok ? kOk : kCheckFailed;
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: invalid input\n";
        for (const auto& v : e.violations()) {
            std::cerr << "  " << v.field << ": " << to_string(v.kind) << " (deviation " << v.deviation << ", tolerance "
                      << v.tolerance << ")\n";
        }
        return kInputError;
    } catch (const Error& e) {
        std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
        return kInputError;
    }
    return kInputError;
}
