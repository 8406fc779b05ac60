#ifndef CVLAB_CHECKS_HPP
#define CVLAB_CHECKS_HPP

#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "cvlab/compiler.hpp"
#include "cvlab/encodings.hpp"

namespace cvlab {

struct CheckItem {
    std::string name;
    double value = 0.0;      // measured deviation / statistic
    double threshold = 0.0;  // pass iff value <= threshold
    bool passed = false;
    std::string detail;
};

struct CheckSuite {
    std::string name;
    std::vector<CheckItem> items;
    double seconds = 0.0;

    bool passed() const;
    nlohmann::json to_json() const;
};

struct VerifyOptions {
    int d = -1;  // override the default truncation set
    std::optional<EncodingSpec> encoding;
    std::optional<double> tolerance;  // override the base numeric tolerance
};

CheckSuite check_fock_core(const VerifyOptions& opts = {});
CheckSuite check_encodings(const VerifyOptions& opts = {});
CheckSuite check_logical(const VerifyOptions& opts = {});
CheckSuite check_circuits(const VerifyOptions& opts = {});
CheckSuite check_compiler(const VerifyOptions& opts = {});

const std::vector<std::string>& verify_scopes();
CheckSuite run_scope(const std::string& scope, const VerifyOptions& opts = {});

/// Numbered acceptance checks with pinned parameters and thresholds.
int num_acceptance_criteria();
CheckSuite acceptance_criterion(int n);

// Reusable verification kernels (shared by the suites and the experiments).

/// Trace distance between the repeated-ancilla phase channel and the ideal
/// phase gate on |+_D>.
double phase_channel_trace_distance(const EncodingSpec& spec, double phi, double epsilon);

/// Outcome distributions of a fixed compiled two-qubit program without and
/// with a collective unitary on the initial state.
std::pair<std::map<std::string, double>, std::map<std::string, double>> dfs_distributions(
    const EncodingSpec& spec, const NoiseSpec& noise, double epsilon);

/// Max outcome-probability deviation between the two distributions above.
double dfs_deviation(const EncodingSpec& spec, const NoiseSpec& noise, double epsilon);

/// Entrywise upper bound on |[exp(i theta S (x) S), P_1 (x) P_2]| for the
/// computational-subspace projectors of two dual-rail encodings.
double mixed_encoding_commutator_bound(const EncodingSpec& e1, const EncodingSpec& e2,
                                       double theta);

/// Random circuit over the scheme's native gate set (N <= 2, <= 5 gates,
/// fock encoding, epsilon 0.01).
LogicalCircuit random_native_circuit(Scheme scheme, std::mt19937_64& rng);

struct OracleComparison {
    double deviation = 0.0;
    double tolerance = 0.0;  // 1e-8 plus slack per dual phase channel
    int phase_channels = 0;
};

OracleComparison compare_with_oracle(const LogicalCircuit& circuit);

}  // namespace cvlab

#endif
