#ifndef CVLAB_FOCK_HPP
#define CVLAB_FOCK_HPP

#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cvlab {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

inline constexpr double kUnitaryTol = 1e-10;
inline constexpr double kNormTol = 1e-10;

/// Thrown when a requested tensor-product space would exceed the
/// configured amplitude cap (default 2^20, override with CVLAB_DIM_CAP).
struct dimension_cap_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct invalid_dimension_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Amplitude budget for a single state vector.
std::size_t dimension_cap();
void set_dimension_cap(std::size_t cap);

enum class SubsystemRole { Mode, AncillaQubit };

/// An ordered list of subsystems (bosonic modes truncated to d levels and
/// two-level ancilla qubits).  Index convention is row-major with slot 0
/// slowest-varying.
class ModeSystem {
  public:
    ModeSystem() = default;
    ModeSystem(std::vector<int> dims, std::vector<SubsystemRole> roles);

    static ModeSystem modes(int count, int d);

    int num_subsystems() const { return static_cast<int>(dims_.size()); }
    int dim(int slot) const { return dims_.at(static_cast<std::size_t>(slot)); }
    SubsystemRole role(int slot) const { return roles_.at(static_cast<std::size_t>(slot)); }
    std::size_t total_dimension() const { return total_; }
    std::size_t stride(int slot) const { return strides_.at(static_cast<std::size_t>(slot)); }
    const std::vector<int>& dims() const { return dims_; }

    /// New system with one extra subsystem appended as the last (fastest) slot.
    ModeSystem appended(int dim, SubsystemRole role) const;
    /// New system containing only the listed slots, in the order given.
    ModeSystem subset(std::span<const int> keep) const;

    bool operator==(const ModeSystem& other) const {
        return dims_ == other.dims_ && roles_ == other.roles_;
    }

  private:
    std::vector<int> dims_;
    std::vector<SubsystemRole> roles_;
    std::vector<std::size_t> strides_;
    std::size_t total_ = 1;
};

struct StateVector {
    ModeSystem system;
    Vec amplitudes;

    double norm() const { return amplitudes.norm(); }
    void normalize() { amplitudes /= amplitudes.norm(); }
};

struct DensityMatrix {
    ModeSystem system;
    Mat matrix;

    double trace_real() const { return matrix.trace().real(); }
};

/// A dense operator acting on an ordered tuple of subsystems.
struct LocalOperator {
    std::vector<int> dims;
    Mat matrix;

    std::size_t dimension() const { return static_cast<std::size_t>(matrix.rows()); }
    LocalOperator adjoint() const { return {dims, matrix.adjoint()}; }
};

bool is_unitary(const Mat& u, double tol = kUnitaryTol);

/// Truncated ladder operator: <n-1|a|n> = sqrt(n).
LocalOperator annihilation_matrix(int d);
LocalOperator creation_matrix(int d);
LocalOperator number_matrix(int d);

/// Two-mode permutation |m>|n> -> |n>|m>.  Hermitian, unitary, involutory.
LocalOperator swap_operator(int d);

/// exp(scale * H) for a dense operator, via scaling-and-squaring.
LocalOperator matrix_exponential(const LocalOperator& h, Complex scale = 1.0);

/// Applies op to the named subsystem slots (identity elsewhere) by
/// index-block contraction; the full-dimension matrix is never formed.
void apply_local_inplace(StateVector& state, const LocalOperator& op,
                         std::span<const int> slots, bool require_unitary = true);
StateVector apply_local(const StateVector& state, const LocalOperator& op,
                        std::span<const int> slots, bool require_unitary = true);
/// rho -> U rho U^dag on the named slots.
void apply_local_inplace(DensityMatrix& rho, const LocalOperator& op,
                         std::span<const int> slots, bool require_unitary = true);

/// Reduced density matrix over the kept subsystems (order preserved).
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep);

DensityMatrix to_density(const StateVector& psi);

Complex inner_product(const StateVector& a, const StateVector& b);
/// <psi| rho |psi>
double fidelity(const DensityMatrix& rho, const StateVector& psi);

/// 0.5 * ||a - b||_1 via eigenvalues of the difference.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

StateVector kron(const StateVector& a, const StateVector& b);

/// Product state from per-slot kets (ket i must match dim of slot i).
StateVector product_state(const ModeSystem& system, const std::vector<Vec>& kets);

/// Fock basis ket |n> in a d-dimensional mode.
Vec fock_ket(int d, int n);

}  // namespace cvlab

#endif
