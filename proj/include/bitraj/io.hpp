#pragma once

#include "bitraj/bounds.hpp"
#include "bitraj/multiobs.hpp"
#include "bitraj/opensys.hpp"
#include "bitraj/verify.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace bitraj {

inline constexpr const char* kVersion = "0.1.0";

using Json = nlohmann::ordered_json;

// A scenario file, plus the optional `system` block (open model) and
// `observables` array (one PVM per slot).
struct LoadedConfig {
    QuantumScenario scenario;
    std::optional<OpenModel> open;
    std::optional<ObservableSequence> observables;
};

// ParseError carries line and column for malformed JSON and the field path
// for shape errors; ValidationError lists every violated invariant.
LoadedConfig parse_config(const std::string& text, const std::string& origin = "<string>");
LoadedConfig load_config(const std::string& path);

// Entries are numbers or [re, im] pairs; rows must have equal length.
Matrix parse_matrix(const Json& value, const std::string& field);
ObservablePVM parse_observable(const Json& value, Eigen::Index d, const std::string& field);

// "0.5,1.0" → {0.5, 1.0}; BadGrid unless strictly increasing and positive.
std::vector<double> parse_times(const std::string& list);
std::vector<double> parse_values(const std::string& list, const std::string& what);

// Doubles are written with 17 significant digits.
std::string dump_json(const Json& value);
std::string format_double(double x);

Json complex_json(Complex z);
Json distribution_json(const BiDistribution& dist);
std::string distribution_csv(const BiDistribution& dist);
Json report_json(const PropertyReport& report);
Json bound_json(const BoundReport& report);

struct RunManifest {
    std::string command;
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string version = kVersion;
    std::string timestamp; // UTC, ISO 8601
    std::vector<std::string> outputs;
};

Json manifest_json(const RunManifest& manifest);
std::string utc_timestamp();

} // namespace bitraj
