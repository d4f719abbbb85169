#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "subfrac/quadrature.hpp"

namespace subfrac {

inline constexpr const char* kToolVersion = "0.1.0";

// Raised on invalid configuration; the CLI maps it to exit code 1.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    std::string experiment = "ms";  // bbm | ms | props | constants
    std::string group = "r1";
    std::string gauge = "euclidean";
    std::string orlicz = "power:2";   // family:p
    std::string field = "bump:1";     // name:radius
    QuadratureSpec quad;
    std::vector<double> sGrid;        // empty -> per-experiment default
    std::string outputDir = "out";
    void validate() const;            // throws ConfigError
    std::vector<double> effectiveGrid() const;
};

// Executes the experiment, writes sweep.csv / verdicts.json / manifest.json
// under outputDir. Returns 0 when every verdict passes or is inconclusive,
// 2 on any hard fail. Configuration problems throw ConfigError.
int runExperiment(const ExperimentConfig& cfg);

// Applies a flat TOML table (key = value) to cfg. Keys already present in
// cliProvided are skipped, so command-line flags override the file. Unknown
// keys and malformed values throw ConfigError.
void applyConfigFile(ExperimentConfig& cfg, const std::string& path,
                     const std::vector<std::string>& cliProvided);

}  // namespace subfrac
