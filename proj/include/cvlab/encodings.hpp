#ifndef CVLAB_ENCODINGS_HPP
#define CVLAB_ENCODINGS_HPP

#include <string>
#include <utility>

#include <json.hpp>

#include "cvlab/fock.hpp"

namespace cvlab {

/// Thrown when the requested truncation captures too little of the ideal
/// state (leakage above 0.2).
struct encoding_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class EncodingKind { Fock, Coherent, Cat, Gkp };

std::string to_string(EncodingKind kind);
EncodingKind encoding_kind_from_string(const std::string& name);

int default_truncation(EncodingKind kind);

/// Recipe for the single-mode basis kets |0_L>, |1_L> at finite truncation.
struct EncodingSpec {
    EncodingKind kind = EncodingKind::Fock;
    Complex alpha = 0.0;  // coherent / cat amplitude
    double delta = 0.35;  // gkp envelope width
    int truncation = 4;

    static EncodingSpec fock(int d = 4);
    static EncodingSpec coherent(Complex alpha, int d = 12);
    static EncodingSpec cat(Complex alpha, int d = 12);
    static EncodingSpec gkp(double delta, int d = 12);

    void validate() const;

    nlohmann::json to_json() const;
    static EncodingSpec from_json(const nlohmann::json& j);

    bool operator==(const EncodingSpec&) const = default;
};

enum class EncodingStatus { Pass, Warn };

struct EncodingReport {
    Complex overlap;        // <0_L|1_L> of the truncated, normalized kets
    double norm0 = 0.0;     // pre-normalization norms
    double norm1 = 0.0;
    double leakage0 = 0.0;  // 1 - captured probability of the untruncated state
    double leakage1 = 0.0;
    EncodingStatus status = EncodingStatus::Pass;

    double leakage() const { return std::max(leakage0, leakage1); }
};

/// Normalized single-mode kets |0_L>, |1_L>.  Hard error if leakage > 0.2.
std::pair<StateVector, StateVector> basis_states(const EncodingSpec& spec);

Complex overlap(const EncodingSpec& spec);

/// Diagnostic: pass iff |overlap| < tol and leakage < tol.
EncodingReport validate_encoding(const EncodingSpec& spec, double tol);

/// Status/leakage diagnostics without the pass threshold.
EncodingReport encoding_report(const EncodingSpec& spec);

}  // namespace cvlab

#endif
