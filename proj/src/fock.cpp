#include "cvlab/fock.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>

#include <unsupported/Eigen/MatrixFunctions>

namespace cvlab {

namespace {

std::size_t initial_cap() {
    if (const char* env = std::getenv("CVLAB_DIM_CAP")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && v >= 2) return static_cast<std::size_t>(v);
    }
    return std::size_t{1} << 20;
}

std::atomic<std::size_t> g_dimension_cap{initial_cap()};

}  // namespace

std::size_t dimension_cap() { return g_dimension_cap.load(); }
void set_dimension_cap(std::size_t cap) { g_dimension_cap.store(cap); }

ModeSystem::ModeSystem(std::vector<int> dims, std::vector<SubsystemRole> roles)
    : dims_(std::move(dims)), roles_(std::move(roles)) {
    if (dims_.size() != roles_.size())
        throw std::invalid_argument("ModeSystem: dims/roles length mismatch");
    total_ = 1;
    for (int d : dims_) {
        if (d < 2) throw invalid_dimension_error("ModeSystem: subsystem dimension must be >= 2");
        if (total_ > dimension_cap() / static_cast<std::size_t>(d))
            throw dimension_cap_error("ModeSystem: total dimension exceeds cap " +
                                      std::to_string(dimension_cap()));
        total_ *= static_cast<std::size_t>(d);
    }
    strides_.assign(dims_.size(), 1);
    for (int i = static_cast<int>(dims_.size()) - 2; i >= 0; --i)
        strides_[i] = strides_[i + 1] * static_cast<std::size_t>(dims_[i + 1]);
}

ModeSystem ModeSystem::modes(int count, int d) {
    return ModeSystem(std::vector<int>(static_cast<std::size_t>(count), d),
                      std::vector<SubsystemRole>(static_cast<std::size_t>(count),
                                                 SubsystemRole::Mode));
}

ModeSystem ModeSystem::appended(int dim, SubsystemRole role) const {
    auto dims = dims_;
    auto roles = roles_;
    dims.push_back(dim);
    roles.push_back(role);
    return ModeSystem(std::move(dims), std::move(roles));
}

ModeSystem ModeSystem::subset(std::span<const int> keep) const {
    std::vector<int> dims;
    std::vector<SubsystemRole> roles;
    for (int s : keep) {
        dims.push_back(dim(s));
        roles.push_back(role(s));
    }
    return ModeSystem(std::move(dims), std::move(roles));
}

bool is_unitary(const Mat& u, double tol) {
    if (u.rows() != u.cols()) return false;
    Mat residual = u.adjoint() * u - Mat::Identity(u.rows(), u.cols());
    return residual.cwiseAbs().maxCoeff() < tol;
}

LocalOperator annihilation_matrix(int d) {
    if (d < 2) throw invalid_dimension_error("annihilation_matrix: d must be >= 2");
    Mat a = Mat::Zero(d, d);
    for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return {{d}, std::move(a)};
}

LocalOperator creation_matrix(int d) { return annihilation_matrix(d).adjoint(); }

LocalOperator number_matrix(int d) {
    if (d < 2) throw invalid_dimension_error("number_matrix: d must be >= 2");
    Mat n = Mat::Zero(d, d);
    for (int k = 0; k < d; ++k) n(k, k) = static_cast<double>(k);
    return {{d}, std::move(n)};
}

LocalOperator swap_operator(int d) {
    if (d < 2) throw invalid_dimension_error("swap_operator: d must be >= 2");
    Mat s = Mat::Zero(d * d, d * d);
    for (int m = 0; m < d; ++m)
        for (int n = 0; n < d; ++n) s(n * d + m, m * d + n) = 1.0;
    return {{d, d}, std::move(s)};
}

LocalOperator matrix_exponential(const LocalOperator& h, Complex scale) {
    if (!h.matrix.allFinite())
        throw std::invalid_argument("matrix_exponential: non-finite entries");
    Mat scaled = scale * h.matrix;
    return {h.dims, scaled.exp()};
}

namespace {

struct Contraction {
    std::vector<std::size_t> gather;  // offsets of the op's composite index
    std::vector<std::size_t> bases;   // base offsets over the untouched slots
};

Contraction plan_contraction(const ModeSystem& sys, const LocalOperator& op,
                             std::span<const int> slots) {
    if (slots.size() != op.dims.size())
        throw std::invalid_argument("apply_local: slot count does not match operator arity");
    std::vector<bool> touched(static_cast<std::size_t>(sys.num_subsystems()), false);
    for (std::size_t m = 0; m < slots.size(); ++m) {
        int s = slots[m];
        if (s < 0 || s >= sys.num_subsystems())
            throw std::invalid_argument("apply_local: slot out of range");
        if (touched[static_cast<std::size_t>(s)])
            throw std::invalid_argument("apply_local: repeated slot");
        touched[static_cast<std::size_t>(s)] = true;
        if (sys.dim(s) != op.dims[m])
            throw std::invalid_argument("apply_local: slot dimension mismatch");
    }

    Contraction plan;
    std::size_t block = 1;
    for (int d : op.dims) block *= static_cast<std::size_t>(d);
    plan.gather.assign(block, 0);
    for (std::size_t r = 0; r < block; ++r) {
        std::size_t rem = r, off = 0;
        for (std::size_t m = slots.size(); m-- > 0;) {
            std::size_t dm = static_cast<std::size_t>(op.dims[m]);
            off += (rem % dm) * sys.stride(slots[m]);
            rem /= dm;
        }
        plan.gather[r] = off;
    }

    plan.bases.assign(1, 0);
    for (int s = 0; s < sys.num_subsystems(); ++s) {
        if (touched[static_cast<std::size_t>(s)]) continue;
        std::vector<std::size_t> next;
        next.reserve(plan.bases.size() * static_cast<std::size_t>(sys.dim(s)));
        for (std::size_t b : plan.bases)
            for (int k = 0; k < sys.dim(s); ++k)
                next.push_back(b + static_cast<std::size_t>(k) * sys.stride(s));
        plan.bases = std::move(next);
    }
    return plan;
}

}  // namespace

void apply_local_inplace(StateVector& state, const LocalOperator& op,
                         std::span<const int> slots, bool require_unitary) {
    if (require_unitary && !is_unitary(op.matrix))
        throw std::invalid_argument("apply_local: operator is not unitary");
    const Contraction plan = plan_contraction(state.system, op, slots);
    const std::size_t block = plan.gather.size();
    Vec x(block), y(block);
    for (std::size_t base : plan.bases) {
        for (std::size_t r = 0; r < block; ++r) x(static_cast<Eigen::Index>(r)) = state.amplitudes(static_cast<Eigen::Index>(base + plan.gather[r]));
        y.noalias() = op.matrix * x;
        for (std::size_t r = 0; r < block; ++r) state.amplitudes(static_cast<Eigen::Index>(base + plan.gather[r])) = y(static_cast<Eigen::Index>(r));
    }
}

StateVector apply_local(const StateVector& state, const LocalOperator& op,
                        std::span<const int> slots, bool require_unitary) {
    StateVector out = state;
    apply_local_inplace(out, op, slots, require_unitary);
    return out;
}

void apply_local_inplace(DensityMatrix& rho, const LocalOperator& op,
                         std::span<const int> slots, bool require_unitary) {
    if (require_unitary && !is_unitary(op.matrix))
        throw std::invalid_argument("apply_local: operator is not unitary");
    const Contraction plan = plan_contraction(rho.system, op, slots);
    const std::size_t block = plan.gather.size();
    Vec x(block), y(block);
    // Left multiply on every column, then right multiply via the adjoint trick.
    for (int pass = 0; pass < 2; ++pass) {
        const Mat u = (pass == 0) ? op.matrix : op.matrix.conjugate();
        for (Eigen::Index col = 0; col < rho.matrix.cols(); ++col) {
            for (std::size_t base : plan.bases) {
                for (std::size_t r = 0; r < block; ++r) {
                    const auto idx = static_cast<Eigen::Index>(base + plan.gather[r]);
                    x(static_cast<Eigen::Index>(r)) =
                        (pass == 0) ? rho.matrix(idx, col) : rho.matrix(col, idx);
                }
                y.noalias() = u * x;
                for (std::size_t r = 0; r < block; ++r) {
                    const auto idx = static_cast<Eigen::Index>(base + plan.gather[r]);
                    if (pass == 0)
                        rho.matrix(idx, col) = y(static_cast<Eigen::Index>(r));
                    else
                        rho.matrix(col, idx) = y(static_cast<Eigen::Index>(r));
                }
            }
        }
    }
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep) {
    if (keep.empty()) throw std::invalid_argument("partial_trace: keep list is empty");
    const ModeSystem& sys = rho.system;
    std::vector<bool> kept(static_cast<std::size_t>(sys.num_subsystems()), false);
    for (int s : keep) {
        if (s < 0 || s >= sys.num_subsystems())
            throw std::invalid_argument("partial_trace: slot out of range");
        if (kept[static_cast<std::size_t>(s)])
            throw std::invalid_argument("partial_trace: repeated slot");
        kept[static_cast<std::size_t>(s)] = true;
    }

    std::vector<std::size_t> keep_offsets{0};
    for (int s : keep) {
        std::vector<std::size_t> next;
        next.reserve(keep_offsets.size() * static_cast<std::size_t>(sys.dim(s)));
        for (std::size_t b : keep_offsets)
            for (int k = 0; k < sys.dim(s); ++k)
                next.push_back(b + static_cast<std::size_t>(k) * sys.stride(s));
        keep_offsets = std::move(next);
    }
    std::vector<std::size_t> traced_offsets{0};
    for (int s = 0; s < sys.num_subsystems(); ++s) {
        if (kept[static_cast<std::size_t>(s)]) continue;
        std::vector<std::size_t> next;
        next.reserve(traced_offsets.size() * static_cast<std::size_t>(sys.dim(s)));
        for (std::size_t b : traced_offsets)
            for (int k = 0; k < sys.dim(s); ++k)
                next.push_back(b + static_cast<std::size_t>(k) * sys.stride(s));
        traced_offsets = std::move(next);
    }

    const auto K = static_cast<Eigen::Index>(keep_offsets.size());
    Mat out = Mat::Zero(K, K);
    for (Eigen::Index r = 0; r < K; ++r)
        for (Eigen::Index c = 0; c < K; ++c) {
            Complex acc = 0.0;
            for (std::size_t t : traced_offsets)
                acc += rho.matrix(static_cast<Eigen::Index>(keep_offsets[static_cast<std::size_t>(r)] + t),
                                  static_cast<Eigen::Index>(keep_offsets[static_cast<std::size_t>(c)] + t));
            out(r, c) = acc;
        }
    return {sys.subset(keep), std::move(out)};
}

DensityMatrix to_density(const StateVector& psi) {
    return {psi.system, psi.amplitudes * psi.amplitudes.adjoint()};
}

Complex inner_product(const StateVector& a, const StateVector& b) {
    if (!(a.system == b.system))
        throw std::invalid_argument("inner_product: mode systems differ");
    return a.amplitudes.adjoint() * b.amplitudes;
}

double fidelity(const DensityMatrix& rho, const StateVector& psi) {
    if (!(rho.system == psi.system))
        throw std::invalid_argument("fidelity: mode systems differ");
    Complex f = psi.amplitudes.adjoint() * rho.matrix * psi.amplitudes;
    return std::clamp(f.real(), 0.0, 1.0);
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    if (!(a.system == b.system))
        throw std::invalid_argument("trace_distance: mode systems differ");
    Mat diff = a.matrix - b.matrix;
    Eigen::SelfAdjointEigenSolver<Mat> es((diff + diff.adjoint()) / 2.0);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

StateVector kron(const StateVector& a, const StateVector& b) {
    std::vector<int> dims = a.system.dims();
    std::vector<SubsystemRole> roles;
    for (int s = 0; s < a.system.num_subsystems(); ++s) roles.push_back(a.system.role(s));
    for (int s = 0; s < b.system.num_subsystems(); ++s) {
        dims.push_back(b.system.dim(s));
        roles.push_back(b.system.role(s));
    }
    ModeSystem sys(std::move(dims), std::move(roles));
    Vec amps(static_cast<Eigen::Index>(sys.total_dimension()));
    const auto nb = b.amplitudes.size();
    for (Eigen::Index i = 0; i < a.amplitudes.size(); ++i)
        amps.segment(i * nb, nb) = a.amplitudes(i) * b.amplitudes;
    return {std::move(sys), std::move(amps)};
}

StateVector product_state(const ModeSystem& system, const std::vector<Vec>& kets) {
    if (static_cast<int>(kets.size()) != system.num_subsystems())
        throw std::invalid_argument("product_state: ket count mismatch");
    Vec amps = Vec::Ones(1);
    for (int s = 0; s < system.num_subsystems(); ++s) {
        if (kets[static_cast<std::size_t>(s)].size() != system.dim(s))
            throw std::invalid_argument("product_state: ket dimension mismatch");
        Vec next(amps.size() * system.dim(s));
        for (Eigen::Index i = 0; i < amps.size(); ++i)
            next.segment(i * system.dim(s), system.dim(s)) =
                amps(i) * kets[static_cast<std::size_t>(s)];
        amps = std::move(next);
    }
    return {system, std::move(amps)};
}

Vec fock_ket(int d, int n) {
    if (n < 0 || n >= d) throw std::invalid_argument("fock_ket: level out of range");
    Vec v = Vec::Zero(d);
    v(n) = 1.0;
    return v;
}

}  // namespace cvlab
