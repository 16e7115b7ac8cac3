#include "bitraj/io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

namespace bitraj {

namespace {

[[noreturn]] void shape_error(const std::string& field, const std::string& what) {
    throw Error(Errc::ParseError, field + ": " + what);
}

const Json& member(const Json& obj, const char* key, const std::string& path) {
    if (!obj.is_object()) {
        shape_error(path, "expected an object");
    }
    auto it = obj.find(key);
    if (it == obj.end()) {
        shape_error(path + "." + key, "missing");
    }
    return *it;
}

double number(const Json& v, const std::string& field) {
    if (!v.is_number()) {
        shape_error(field, "expected a number");
    }
    return v.get<double>();
}

std::string text(const Json& v, const std::string& field) {
    if (!v.is_string()) {
        shape_error(field, "expected a string");
    }
    return v.get<std::string>();
}

Complex parse_complex(const Json& v, const std::string& field) {
    if (v.is_number()) {
        return v.get<double>();
    }
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
        return {v[0].get<double>(), v[1].get<double>()};
    }
    shape_error(field, "expected a number or an [re, im] pair");
}

Vector parse_vector(const Json& v, const std::string& field) {
    if (!v.is_array() || v.empty()) {
        shape_error(field, "expected a nonempty array");
    }
    Vector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        out(static_cast<Eigen::Index>(i)) = parse_complex(v[i], field + "[" + std::to_string(i) + "]");
    }
    return out;
}

void require_square(const Matrix& m, Eigen::Index d, const std::string& field) {
    if (m.rows() != d || m.cols() != d) {
        std::ostringstream os;
        os << "expected " << d << "x" << d << ", got " << m.rows() << "x" << m.cols();
        shape_error(field, os.str());
    }
}

HamiltonianSchedule parse_hamiltonian(const Json& h, Eigen::Index d, const std::string& path) {
    const std::string type = text(member(h, "type", path), path + ".type");
    if (type == "static") {
        Matrix m = parse_matrix(member(h, "matrix", path), path + ".matrix");
        require_square(m, d, path + ".matrix");
        return HamiltonianSchedule::constant(std::move(m), number(member(h, "horizon", path), path + ".horizon"));
    }
    if (type == "piecewise") {
        const Json& segs = member(h, "segments", path);
        if (!segs.is_array() || segs.empty()) {
            shape_error(path + ".segments", "expected a nonempty array");
        }
        std::vector<HamiltonianSegment> out;
        for (std::size_t i = 0; i < segs.size(); ++i) {
            const std::string sp = path + ".segments[" + std::to_string(i) + "]";
            Matrix m = parse_matrix(member(segs[i], "matrix", sp), sp + ".matrix");
            require_square(m, d, sp + ".matrix");
            out.push_back({number(member(segs[i], "start", sp), sp + ".start"),
                           number(member(segs[i], "end", sp), sp + ".end"), std::move(m)});
        }
        return HamiltonianSchedule(std::move(out));
    }
    if (type == "preset") {
        const std::string name = text(member(h, "name", path), path + ".name");
        if (name != "rabi") {
            shape_error(path + ".name", "unknown preset '" + name + "'");
        }
        if (d != 2) {
            shape_error(path, "preset rabi needs dimension 2");
        }
        const double omega = number(member(h, "omega", path), path + ".omega");
        return HamiltonianSchedule::constant(omega * pauli_x() / 2.0, number(member(h, "horizon", path), path + ".horizon"));
    }
    shape_error(path + ".type", "expected \"static\", \"piecewise\" or \"preset\"");
}

Matrix parse_state(const Json& s, Eigen::Index d, const std::string& path) {
    if (s.contains("vector")) {
        Vector v = parse_vector(s["vector"], path + ".vector");
        if (v.size() != d) {
            shape_error(path + ".vector", "expected " + std::to_string(d) + " entries");
        }
        if (v.norm() == 0.0) {
            shape_error(path + ".vector", "zero vector");
        }
        // normalization is checked through the trace, not silently fixed
        return v * v.adjoint();
    }
    Matrix m = parse_matrix(member(s, "matrix", path), path + ".matrix");
    require_square(m, d, path + ".matrix");
    return m;
}

OpenModel parse_system(const Json& s, const QuantumScenario& env, const std::string& path) {
    return OpenModel(parse_matrix(member(s, "h_o", path), path + ".h_o"),
                     parse_matrix(member(s, "v_o", path), path + ".v_o"),
                     number(member(s, "lambda", path), path + ".lambda"), env);
}

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

void dump(const Json& v, std::string& out, int depth) {
    const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
    const std::string close(static_cast<std::size_t>(2 * depth), ' ');
    switch (v.type()) {
    case Json::value_t::object: {
        if (v.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (auto it = v.begin(); it != v.end(); ++it) {
            out += first ? "" : ",\n";
            first = false;
            out += pad + Json(it.key()).dump() + ": ";
            dump(it.value(), out, depth + 1);
        }
        out += "\n" + close + "}";
        return;
    }
    case Json::value_t::array: {
        // arrays of scalars stay on one line
        const bool flat = std::all_of(v.begin(), v.end(), [](const Json& e) { return e.is_primitive(); });
        if (v.empty()) {
            out += "[]";
            return;
        }
        out += flat ? "[" : "[\n";
        bool first = true;
        for (const auto& e : v) {
            out += first ? "" : (flat ? ", " : ",\n");
            first = false;
            if (!flat) {
                out += pad;
            }
            dump(e, out, depth + 1);
        }
        out += flat ? "]" : "\n" + close + "]";
        return;
    }
    case Json::value_t::number_float:
        out += std::isfinite(v.get<double>()) ? format_double(v.get<double>()) : "null";
        return;
    default:
        out += v.dump();
    }
}

Json tuple_values(const BiDistribution& dist, const OutcomeTuple& t) {
    const std::size_t n = dist.slots();
    Json out = Json::array();
    for (std::size_t p = 0; p < n; ++p) {
        out.push_back(dist.slot_outcomes()[n - 1 - p][t[p]]);
    }
    return out;
}

} // namespace

Matrix parse_matrix(const Json& value, const std::string& field) {
    if (!value.is_array() || value.empty()) {
        shape_error(field, "expected a nonempty array of rows");
    }
    const std::size_t rows = value.size();
    if (!value[0].is_array()) {
        shape_error(field + "[0]", "expected a row array");
    }
    const std::size_t cols = value[0].size();
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
        const std::string rp = field + "[" + std::to_string(r) + "]";
        if (!value[r].is_array()) {
            shape_error(rp, "expected a row array");
        }
        if (value[r].size() != cols) {
            shape_error(rp, "row " + std::to_string(r) + " has " + std::to_string(value[r].size()) +
                                " entries, row 0 has " + std::to_string(cols));
        }
        for (std::size_t c = 0; c < cols; ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                parse_complex(value[r][c], rp + "[" + std::to_string(c) + "]");
        }
    }
    return m;
}

ObservablePVM parse_observable(const Json& value, Eigen::Index d, const std::string& field) {
    if (value.contains("type")) {
        const std::string type = text(value["type"], field + ".type");
        if (d != 2 && (type == "pauli_z" || type == "pauli_x")) {
            shape_error(field, "preset " + type + " needs dimension 2");
        }
        if (type == "pauli_z") {
            return pauli_z_pvm();
        }
        if (type == "pauli_x") {
            return pauli_x_pvm();
        }
        if (type != "pvm") {
            shape_error(field + ".type", "unknown observable preset '" + type + "'");
        }
    }
    const Json& values = member(value, "values", field);
    const Json& projectors = member(value, "projectors", field);
    if (!values.is_array() || !projectors.is_array() || values.size() != projectors.size() || values.empty()) {
        shape_error(field, "values and projectors must be nonempty arrays of equal length");
    }
    ObservablePVM pvm;
    for (std::size_t i = 0; i < values.size(); ++i) {
        pvm.outcomes.push_back(number(values[i], field + ".values[" + std::to_string(i) + "]"));
        const std::string pp = field + ".projectors[" + std::to_string(i) + "]";
        Matrix p = parse_matrix(projectors[i], pp);
        require_square(p, d, pp);
        pvm.projectors.push_back(std::move(p));
    }
    return pvm;
}

LoadedConfig parse_config(const std::string& source, const std::string& origin) {
    Json doc;
    try {
        doc = Json::parse(source);
    } catch (const Json::parse_error& e) {
        const auto [line, col] = line_column(source, e.byte);
        std::ostringstream os;
        os << origin << ":" << line << ":" << col << ": malformed JSON (" << e.what() << ")";
        throw Error(Errc::ParseError, os.str());
    }
    if (!doc.is_object()) {
        shape_error(origin, "top level must be an object");
    }
    const Json& dim = member(doc, "dimension", "config");
    if (!dim.is_number_integer() || dim.get<long long>() < 1) {
        shape_error("config.dimension", "expected a positive integer");
    }
    const auto d = static_cast<Eigen::Index>(dim.get<long long>());
    RawScenario raw;
    raw.dimension = d;
    raw.schedule = parse_hamiltonian(member(doc, "hamiltonian", "config"), d, "hamiltonian");
    raw.state = parse_state(member(doc, "initial_state", "config"), d, "initial_state");
    raw.pvm = parse_observable(member(doc, "observable", "config"), d, "observable");

    LoadedConfig cfg{validate_scenario(raw), std::nullopt, std::nullopt};
    if (doc.contains("system")) {
        cfg.open.emplace(parse_system(doc["system"], cfg.scenario, "system"));
    }
    if (doc.contains("observables")) {
        const Json& obs = doc["observables"];
        if (!obs.is_array() || obs.empty()) {
            shape_error("observables", "expected a nonempty array");
        }
        std::vector<ObservablePVM> slots;
        for (std::size_t i = 0; i < obs.size(); ++i) {
            slots.push_back(parse_observable(obs[i], d, "observables[" + std::to_string(i) + "]"));
        }
        cfg.observables.emplace(std::move(slots), d);
    }
    return cfg;
}

LoadedConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(Errc::ParseError, "cannot open config file '" + path + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path);
}

std::vector<double> parse_values(const std::string& list, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto first = item.find_first_not_of(" \t");
        const auto last = item.find_last_not_of(" \t");
        if (first == std::string::npos) {
            throw Error(Errc::ParseError, what + ": empty entry in '" + list + "'");
        }
        item = item.substr(first, last - first + 1);
        double x = 0.0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), x);
        if (ec != std::errc() || ptr != item.data() + item.size()) {
            throw Error(Errc::ParseError, what + ": '" + item + "' is not a number");
        }
        out.push_back(x);
    }
    if (out.empty()) {
        throw Error(Errc::ParseError, what + ": empty list");
    }
    return out;
}

std::vector<double> parse_times(const std::string& list) {
    std::vector<double> t = parse_values(list, "--times");
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(t[i] > 0.0) || (i > 0 && !(t[i] > t[i - 1]))) {
            throw Error(Errc::BadGrid, "--times must be positive and strictly increasing; entry " + std::to_string(i + 1) +
                                           " violates this");
        }
    }
    return t;
}

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    std::string s = buf;
    // keep a JSON/CSV reader from taking 1 for an integer
    if (s.find_first_of(".eEni") == std::string::npos) {
        s += ".0";
    }
    return s;
}

std::string dump_json(const Json& value) {
    std::string out;
    dump(value, out, 0);
    return out + "\n";
}

Json complex_json(Complex z) {
    return Json::array({z.real(), z.imag()});
}

Json distribution_json(const BiDistribution& dist) {
    Json j;
    j["times"] = dist.grid().times();
    j["outcomes"] = dist.slot_outcomes();
    Json entries = Json::array();
    const TupleLattice& lat = dist.lattice();
    for (std::size_t a = 0; a < lat.count(); ++a) {
        const Json plus = tuple_values(dist, lat.decode(a));
        for (std::size_t b = 0; b < lat.count(); ++b) {
            const Complex q = dist.at(a, b);
            entries.push_back({{"plus", plus}, {"minus", tuple_values(dist, lat.decode(b))}, {"re", q.real()},
                               {"im", q.imag()}});
        }
    }
    j["entries"] = std::move(entries);
    return j;
}

std::string distribution_csv(const BiDistribution& dist) {
    const std::size_t n = dist.slots();
    std::ostringstream os;
    for (std::size_t p = 0; p < n; ++p) {
        os << "plus_" << (n - p) << ",";
    }
    for (std::size_t p = 0; p < n; ++p) {
        os << "minus_" << (n - p) << ",";
    }
    os << "re,im\n";
    const TupleLattice& lat = dist.lattice();
    for (std::size_t a = 0; a < lat.count(); ++a) {
        const OutcomeTuple plus = lat.decode(a);
        for (std::size_t b = 0; b < lat.count(); ++b) {
            const OutcomeTuple minus = lat.decode(b);
            for (std::size_t p = 0; p < n; ++p) {
                os << format_double(dist.slot_outcomes()[n - 1 - p][plus[p]]) << ",";
            }
            for (std::size_t p = 0; p < n; ++p) {
                os << format_double(dist.slot_outcomes()[n - 1 - p][minus[p]]) << ",";
            }
            const Complex q = dist.at(a, b);
            os << format_double(q.real()) << "," << format_double(q.imag()) << "\n";
        }
    }
    return os.str();
}

Json report_json(const PropertyReport& report) {
    Json checks = Json::array();
    for (const auto& c : report.checks) {
        Json e{{"name", c.name}, {"pass", c.pass}, {"max_deviation", c.max_deviation}, {"tolerance", c.tolerance}};
        if (c.witness) {
            e["witness"] = {{"plus", c.witness->plus}, {"minus", c.witness->minus}};
        }
        if (c.slot != 0) {
            e["slot"] = c.slot;
        }
        checks.push_back(std::move(e));
    }
    return Json{{"all_pass", report.all_pass()}, {"checks", std::move(checks)}};
}

Json bound_json(const BoundReport& r) {
    return Json{{"l1_norm", r.l1_norm},
                {"nonuniform_bound", r.nonuniform_bound},
                {"uniform_bound", r.uniform_bound},
                {"margin", r.margin}};
}

Json manifest_json(const RunManifest& m) {
    Json j{{"command", m.command}, {"config", m.config_path}};
    j["seed"] = m.seed ? Json(*m.seed) : Json(nullptr);
    j["version"] = m.version;
    j["timestamp"] = m.timestamp;
    j["outputs"] = m.outputs;
    return j;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace bitraj
