#ifndef CVLAB_CIRCUITS_HPP
#define CVLAB_CIRCUITS_HPP

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "cvlab/fock.hpp"

namespace cvlab {

struct ancilla_disentangle_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Two-mode beam splitter exp(xi (a_i a_j^dag - a_i^dag a_j)).
LocalOperator beam_splitter(double xi, int d);

/// Ideal Fredkin permutation over (ancilla qubit, mode i, mode j):
/// |0><0| (x) I + |1><1| (x) S.
LocalOperator controlled_swap_ideal(int d);

/// Controlled swap composed from its primitive factors,
/// BS(-pi/4) . exp(i (pi/2)(I_A - Z_A) n_i) . BS(pi/4).
/// The factors are built at an enlarged cutoff (2d - 1) and the product is
/// restricted to the d-truncated block, where the splitter conserves total
/// photon number without clipping.
LocalOperator controlled_swap_circuit(int d);

/// Ancilla rotation on the Y-Z plane, exp(i theta X).
LocalOperator ancilla_rotation(double theta);

/// E-swap through the ancilla circuit: C R_A(theta) C |+>_A |Psi>
/// (two-mode) or C_ij C_kl R_A(theta) C_ij C_kl |+>_A |Psi> (four-mode).
/// The ancilla is verified to return to |+> and removed.
StateVector eswap_via_circuit(const StateVector& state, double theta, int i, int j,
                              bool use_circuit_cswap = false);
StateVector eswap_via_circuit(const StateVector& state, double theta, int i, int j, int k, int l,
                              bool use_circuit_cswap = false);

enum class NoiseGenerator { NumberPhase, RandomHermitian };

/// Collective unitary noise: the same single-mode U on every listed mode.
struct NoiseSpec {
    bool enabled = false;
    NoiseGenerator generator = NoiseGenerator::NumberPhase;
    double theta = 0.0;
    std::uint64_t seed = 0;

    static NoiseSpec none() { return {}; }
    static NoiseSpec number_phase(double theta);
    static NoiseSpec random_hermitian(double theta, std::uint64_t seed);

    /// The single-mode unitary at truncation d.
    Mat unitary(int d) const;

    nlohmann::json to_json() const;
    static NoiseSpec from_json(const nlohmann::json& j);
};

/// Applies U to every listed mode (ancilla qubits excluded when the list is
/// empty, in which case all Mode-role subsystems are hit).
StateVector apply_collective_noise(const StateVector& state, const Mat& u,
                                   std::span<const int> modes = {});
StateVector apply_collective_noise(const StateVector& state, const NoiseSpec& noise,
                                   std::span<const int> modes = {});

}  // namespace cvlab

#endif
