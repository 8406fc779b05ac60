#ifndef CVLAB_EXPERIMENTS_HPP
#define CVLAB_EXPERIMENTS_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "cvlab/checks.hpp"

namespace cvlab {

/// One parameter sweep: a numeric table plus self-contained verdicts.
/// Serialized forms are byte-deterministic for a fixed invocation and seed
/// (wall-clock time is reported on the console only, never in the files).
struct ExperimentReport {
    std::string name;
    nlohmann::json parameters;
    std::vector<std::string> columns;
    std::vector<std::string> row_labels;  // empty when rows are purely numeric
    std::vector<std::vector<double>> rows;
    std::vector<CheckItem> verdicts;
    std::uint64_t seed = 0;
    double seconds = 0.0;

    bool passed() const;
    nlohmann::json to_json() const;
    std::string to_csv() const;
    /// Static log-log or linear polyline plot of the first two numeric columns.
    std::string to_svg() const;
    bool log_plot = false;
};

const std::vector<std::string>& experiment_names();

/// "fock", "coherent:2.0", "cat:1.2", "gkp:0.35"; truncation picked by caller.
EncodingSpec encoding_from_cli(const std::string& text, int truncation);

ExperimentReport run_experiment(const std::string& name, const nlohmann::json& params);

}  // namespace cvlab

#endif
