#ifndef CVLAB_COMPILER_HPP
#define CVLAB_COMPILER_HPP

#include <map>
#include <variant>

#include "cvlab/circuits.hpp"
#include "cvlab/logical.hpp"

namespace cvlab {

struct unsupported_gate_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class GateKind { Rx, Rz, XX, ZZ, U3, Measure };

std::string to_string(GateKind kind);

struct LogicalGate {
    GateKind kind = GateKind::Rx;
    double theta = 0.0;                      // rx/rz/xx/zz angle
    Eigen::Matrix2cd matrix;                 // u3 only
    std::vector<int> qubits;

    static LogicalGate rx(double theta, int q) { return {GateKind::Rx, theta, {}, {q}}; }
    static LogicalGate rz(double phi, int q) { return {GateKind::Rz, phi, {}, {q}}; }
    static LogicalGate xx(double theta, int q0, int q1) {
        return {GateKind::XX, theta, {}, {q0, q1}};
    }
    static LogicalGate zz(double phi, int q0, int q1) { return {GateKind::ZZ, phi, {}, {q0, q1}}; }
    static LogicalGate u3(const Eigen::Matrix2cd& u, int q) { return {GateKind::U3, 0.0, u, {q}}; }
    static LogicalGate measure(int q) { return {GateKind::Measure, 0.0, {}, {q}}; }
};

struct LogicalCircuit {
    Scheme scheme = Scheme::Dual;
    std::vector<EncodingSpec> encodings;  // one per qubit
    std::vector<LogicalGate> gates;
    double epsilon = 0.01;  // dual phase-channel step

    int num_qubits() const { return static_cast<int>(encodings.size()); }
    LogicalLayout layout() const { return {scheme, encodings}; }
    void validate() const;

    nlohmann::json to_json() const;
    static LogicalCircuit from_json(const nlohmann::json& j);
};

/// Z-X-Z Euler sequence of native rotations reproducing U up to global
/// phase; zero angles are elided.
std::vector<LogicalGate> synthesize_single_qubit(const Eigen::Matrix2cd& u, int qubit);

struct PhysicalOp {
    enum class Kind { PrepareBasis, Eswap2, Eswap4, PhaseChannel, SwapTest, NoiseLayer };
    Kind kind = Kind::PrepareBasis;
    double theta = 0.0;     // eswap angle / phase-channel target phase
    double epsilon = 0.0;   // phase-channel step
    std::array<int, 4> modes{-1, -1, -1, -1};
    int which = 0;          // PrepareBasis: 0 -> |0_L>, 1 -> |1_L>
    int qubit = -1;
    bool init_role = false; // SwapTest used for quad-register initialization
    int record_slot = -1;   // SwapTest: classical record index, -1 for init tests
};

enum class NoisePoint { BeforeProgram, AfterProgram };

struct PhysicalProgram {
    LogicalLayout layout;
    std::vector<PhysicalOp> ops;
    int phase_gate_reps = 0;
    int ancilla_mode_budget = 0;  // logically counted phase-channel ancillae
    int num_records = 0;
    double epsilon = 0.01;
    NoiseSpec noise = NoiseSpec::none();
    NoisePoint noise_point = NoisePoint::BeforeProgram;

    bool needs_density_path() const;
};

/// Lowers the logical IR onto swap-based physical operations.  In strict
/// mode, gates without a coherent native lowering in the scheme (zz on
/// dual, xx on quad) are rejected instead of auto-synthesized.
PhysicalProgram compile(const LogicalCircuit& circuit, bool strict = false);

struct ShotResults {
    std::map<std::string, double> frequencies;  // outcome bitstring -> fraction
    std::map<std::string, std::size_t> counts;
    int shots = 0;
    std::uint64_t seed = 0;
    int phase_gate_reps = 0;

    nlohmann::json to_json() const;
};

/// Exact joint outcome distribution (bitstring -> probability) by branch
/// enumeration; no sampling involved.
std::map<std::string, double> execute_distribution(const PhysicalProgram& program);

ShotResults execute(const PhysicalProgram& program, int shots, std::uint64_t seed);

/// State after every non-measurement op (measure ops must come last);
/// density path is used when the program contains phase channels.
std::variant<StateVector, DensityMatrix> pre_measurement_state(const PhysicalProgram& program);

/// Logical content of the register state: 2^N amplitudes (pure path) or a
/// 2^N x 2^N density matrix, in the orthonormalized logical basis.
std::variant<Vec, Mat> extract_logical_state(const PhysicalProgram& program);

/// Independent 2^N-dimensional qubit-algebra simulation of the circuit.
struct OracleResult {
    Vec state;                                  // pre-measurement amplitudes
    std::map<std::string, double> distribution; // over the measured qubits
};

OracleResult logical_oracle(const LogicalCircuit& circuit);

}  // namespace cvlab

#endif
