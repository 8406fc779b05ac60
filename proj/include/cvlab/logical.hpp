#ifndef CVLAB_LOGICAL_HPP
#define CVLAB_LOGICAL_HPP

#include <functional>
#include <optional>
#include <random>
#include <unordered_map>

#include "cvlab/encodings.hpp"
#include "cvlab/fock.hpp"

namespace cvlab {

enum class Scheme { Dual, Quad };

std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

/// Maps logical qubits onto contiguous blocks of qumodes: two modes per
/// qubit (dual) or four (quad).  Encodings may differ between qubits but
/// share one truncation.
struct LogicalLayout {
    Scheme scheme = Scheme::Dual;
    std::vector<EncodingSpec> encodings;  // one per logical qubit

    int num_qubits() const { return static_cast<int>(encodings.size()); }
    int modes_per_qubit() const { return scheme == Scheme::Dual ? 2 : 4; }
    int num_modes() const { return num_qubits() * modes_per_qubit(); }
    int truncation() const;
    std::vector<int> qubit_modes(int qubit) const;

    /// All qumodes of the register (no ancillas).
    ModeSystem system() const;

    void validate() const;
};

struct MeasurementRecord {
    int qubit = -1;
    char basis = 'X';      // X for dual readout, Z for quad readout
    int outcome = +1;      // +1 <-> symmetric subspace
    double probability = 0.0;
};

/// |0_D> = |0_L 1_L>, |1_D> = |1_L 0_L> over two modes.
StateVector prepare_dual(const EncodingSpec& spec, int bit);

/// |+_D> or |-_D> = (|0_L 1_L> +/- |1_L 0_L>) normalized, over two modes.
StateVector prepare_dual_plusminus(const EncodingSpec& spec, int sign);

/// |0_Q> = |+_D -_D>, |1_Q> = |-_D +_D> over four modes.
StateVector prepare_quad(const EncodingSpec& spec, int bit);

/// exp(i theta S_ij) = cos(theta) I + i sin(theta) S_ij (closed form).
void eswap2_inplace(StateVector& state, double theta, int i, int j);
StateVector eswap2(const StateVector& state, double theta, int i, int j);
void eswap2_inplace(DensityMatrix& rho, double theta, int i, int j);

/// exp(i theta S_ij S_kl) = cos(theta) I + i sin(theta) S_ij S_kl.
void eswap4_inplace(StateVector& state, double theta, int i, int j, int k, int l);
StateVector eswap4(const StateVector& state, double theta, int i, int j, int k, int l);
void eswap4_inplace(DensityMatrix& rho, double theta, int i, int j, int k, int l);

/// Plain swap of two subsystems (the permutation itself, no phase).
void apply_mode_swap(StateVector& state, int i, int j);
void apply_mode_swap(DensityMatrix& rho, int i, int j);

/// Approximate D-logical phase-shift channel: repeatedly entangles a fresh
/// |0_L> ancilla mode with the qubit's second mode via a small-angle E-swap
/// and discards it.  rho must live on exactly the qubit's two modes.
/// Returns the output state and the number of steps used.
std::pair<DensityMatrix, int> dual_phase_gate(const DensityMatrix& rho, double phi,
                                              double epsilon, const EncodingSpec& spec);

/// Number of channel steps for a target phase (0 when phi vanishes).
int dual_phase_steps(double phi, double epsilon);

/// Optional noise hook: ancilla modes are prepared in U|0_L> when set.
std::pair<DensityMatrix, int> dual_phase_gate(const DensityMatrix& rho, double phi,
                                              double epsilon, const EncodingSpec& spec,
                                              const std::optional<Mat>& ancilla_frame);

/// Both branches of a swap test on modes (i, j): probabilities and the
/// collapsed, renormalized states (collapsed states empty when p == 0).
struct SwapTestBranches {
    double p_plus = 0.0;
    double p_minus = 0.0;
    std::optional<StateVector> plus;
    std::optional<StateVector> minus;
};

SwapTestBranches swap_test_branches(const StateVector& state, int i, int j);

/// Samples one outcome; the ancilla qubit is adjoined and removed internally.
std::pair<MeasurementRecord, StateVector> swap_test(const StateVector& state, int i, int j,
                                                    std::mt19937_64& rng);

struct QuadInitReport {
    int plus_count = 0;
    int minus_count = 0;
    int attempts = 0;   // swap-tested pairs, including retries
    bool formed = false;
};

/// Probabilistic quad-rail register initialization: prepares pairs
/// |0_L 1_L>, swap-tests each, pairs one +1 with one -1 outcome per qubit
/// (first come, first served in mode order).  Retries unpaired slots up to
/// 20*N extra attempts.
std::pair<StateVector, QuadInitReport> init_quad_register(
    int num_qubits, const std::vector<EncodingSpec>& specs, std::uint64_t seed);

struct ill_conditioned_basis_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Operator applied to a state over a subsystem of the register.  The map
/// gives the local slot of each global mode present in the subsystem.
using OpApplier =
    std::function<void(StateVector&, const std::unordered_map<int, int>& global_to_local)>;

struct LogicalMatrixResult {
    Mat matrix;            // 2^k x 2^k in the Loewdin-orthonormalized logical basis
    double leakage = 0.0;  // max over basis columns of the out-of-subspace norm
};

/// Matrix of a physical operator projected onto the logical subspace of the
/// listed qubits.  `touched_modes` are the global mode indices the operator
/// acts on; modes of spectator half-blocks never enter the simulated space,
/// their Gram factors are accounted for analytically.
LogicalMatrixResult logical_matrix(const LogicalLayout& layout, std::span<const int> qubits,
                                   std::span<const int> touched_modes, const OpApplier& op);

/// Orthonormalized logical basis over the full register, as columns of a
/// (total dim) x 2^N matrix, plus the Gram condition number.
struct LogicalBasis {
    ModeSystem system;
    Mat columns;
    double gram_condition = 1.0;
};

LogicalBasis build_logical_basis(const LogicalLayout& layout);

}  // namespace cvlab

#endif
