#include "cvlab/logical.hpp"

#include <algorithm>
#include <cmath>

namespace cvlab {

std::string to_string(Scheme scheme) { return scheme == Scheme::Dual ? "dual" : "quad"; }

Scheme scheme_from_string(const std::string& name) {
    if (name == "dual") return Scheme::Dual;
    if (name == "quad") return Scheme::Quad;
    throw std::invalid_argument("unknown scheme: " + name);
}

int LogicalLayout::truncation() const {
    if (encodings.empty()) throw std::invalid_argument("LogicalLayout: no qubits");
    return encodings.front().truncation;
}

std::vector<int> LogicalLayout::qubit_modes(int qubit) const {
    const int w = modes_per_qubit();
    std::vector<int> modes(static_cast<std::size_t>(w));
    for (int k = 0; k < w; ++k) modes[static_cast<std::size_t>(k)] = qubit * w + k;
    return modes;
}

ModeSystem LogicalLayout::system() const {
    validate();
    return ModeSystem::modes(num_modes(), truncation());
}

void LogicalLayout::validate() const {
    if (encodings.empty()) throw std::invalid_argument("LogicalLayout: no qubits");
    for (const auto& spec : encodings) {
        spec.validate();
        if (spec.truncation != truncation())
            throw std::invalid_argument("LogicalLayout: all encodings must share one truncation");
    }
}

StateVector prepare_dual(const EncodingSpec& spec, int bit) {
    if (bit != 0 && bit != 1) throw std::invalid_argument("prepare_dual: bit must be 0 or 1");
    auto [ket0, ket1] = basis_states(spec);
    return bit == 0 ? kron(ket0, ket1) : kron(ket1, ket0);
}

StateVector prepare_dual_plusminus(const EncodingSpec& spec, int sign) {
    if (sign != 1 && sign != -1)
        throw std::invalid_argument("prepare_dual_plusminus: sign must be +1 or -1");
    StateVector a = prepare_dual(spec, 0);
    StateVector b = prepare_dual(spec, 1);
    StateVector out = a;
    out.amplitudes += static_cast<double>(sign) * b.amplitudes;
    out.normalize();
    return out;
}

StateVector prepare_quad(const EncodingSpec& spec, int bit) {
    if (bit != 0 && bit != 1) throw std::invalid_argument("prepare_quad: bit must be 0 or 1");
    const int first = bit == 0 ? 1 : -1;
    return kron(prepare_dual_plusminus(spec, first), prepare_dual_plusminus(spec, -first));
}

namespace {

/// Index permutation exchanging the digits of slots i and j (equal dims).
std::vector<std::size_t> swap_permutation(const ModeSystem& sys, int i, int j) {
    if (i == j) throw std::invalid_argument("swap: identical modes");
    if (i < 0 || j < 0 || i >= sys.num_subsystems() || j >= sys.num_subsystems())
        throw std::invalid_argument("swap: mode out of range");
    if (sys.dim(i) != sys.dim(j)) throw std::invalid_argument("swap: dimension mismatch");
    const std::size_t total = sys.total_dimension();
    const std::size_t si = sys.stride(i), sj = sys.stride(j);
    const std::size_t di = static_cast<std::size_t>(sys.dim(i));
    std::vector<std::size_t> perm(total);
    for (std::size_t x = 0; x < total; ++x) {
        const std::size_t a = (x / si) % di;
        const std::size_t b = (x / sj) % di;
        perm[x] = x + (b - a) * si + (a - b) * sj;
    }
    return perm;
}

Vec permuted(const Vec& v, const std::vector<std::size_t>& perm) {
    Vec out(v.size());
    for (std::size_t x = 0; x < perm.size(); ++x)
        out(static_cast<Eigen::Index>(x)) = v(static_cast<Eigen::Index>(perm[x]));
    return out;
}

/// rho -> P rho P^T for an involutory index permutation P.
Mat permuted_both(const Mat& m, const std::vector<std::size_t>& perm) {
    Mat out(m.rows(), m.cols());
    for (std::size_t r = 0; r < perm.size(); ++r)
        for (std::size_t c = 0; c < perm.size(); ++c)
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                m(static_cast<Eigen::Index>(perm[r]), static_cast<Eigen::Index>(perm[c]));
    return out;
}

std::vector<std::size_t> compose(const std::vector<std::size_t>& p,
                                 const std::vector<std::size_t>& q) {
    std::vector<std::size_t> out(p.size());
    for (std::size_t x = 0; x < p.size(); ++x) out[x] = p[q[x]];
    return out;
}

void eswap_perm_inplace(StateVector& state, double theta, const std::vector<std::size_t>& perm) {
    const Complex is(0.0, std::sin(theta));
    const double c = std::cos(theta);
    Vec swapped = permuted(state.amplitudes, perm);
    state.amplitudes = c * state.amplitudes + is * swapped;
}

void eswap_perm_inplace(DensityMatrix& rho, double theta, const std::vector<std::size_t>& perm) {
    // (cI + isS) rho (cI - isS), S rho S by double permutation.
    const double c = std::cos(theta), s = std::sin(theta);
    const Complex i(0.0, 1.0);
    Mat srho(rho.matrix.rows(), rho.matrix.cols());
    for (std::size_t r = 0; r < perm.size(); ++r)
        srho.row(static_cast<Eigen::Index>(r)) = rho.matrix.row(static_cast<Eigen::Index>(perm[r]));
    Mat rhos(rho.matrix.rows(), rho.matrix.cols());
    for (std::size_t col = 0; col < perm.size(); ++col)
        rhos.col(static_cast<Eigen::Index>(col)) = rho.matrix.col(static_cast<Eigen::Index>(perm[col]));
    rho.matrix = c * c * rho.matrix + s * s * permuted_both(rho.matrix, perm) +
                 i * s * c * (srho - rhos);
}

}  // namespace

void eswap2_inplace(StateVector& state, double theta, int i, int j) {
    eswap_perm_inplace(state, theta, swap_permutation(state.system, i, j));
}

StateVector eswap2(const StateVector& state, double theta, int i, int j) {
    StateVector out = state;
    eswap2_inplace(out, theta, i, j);
    return out;
}

void eswap2_inplace(DensityMatrix& rho, double theta, int i, int j) {
    eswap_perm_inplace(rho, theta, swap_permutation(rho.system, i, j));
}

void eswap4_inplace(StateVector& state, double theta, int i, int j, int k, int l) {
    std::vector<int> all{i, j, k, l};
    std::sort(all.begin(), all.end());
    if (std::adjacent_find(all.begin(), all.end()) != all.end())
        throw std::invalid_argument("eswap4: modes must be distinct");
    auto perm = compose(swap_permutation(state.system, i, j), swap_permutation(state.system, k, l));
    eswap_perm_inplace(state, theta, perm);
}

StateVector eswap4(const StateVector& state, double theta, int i, int j, int k, int l) {
    StateVector out = state;
    eswap4_inplace(out, theta, i, j, k, l);
    return out;
}

void eswap4_inplace(DensityMatrix& rho, double theta, int i, int j, int k, int l) {
    auto perm = compose(swap_permutation(rho.system, i, j), swap_permutation(rho.system, k, l));
    eswap_perm_inplace(rho, theta, perm);
}

void apply_mode_swap(StateVector& state, int i, int j) {
    state.amplitudes = permuted(state.amplitudes, swap_permutation(state.system, i, j));
}

void apply_mode_swap(DensityMatrix& rho, int i, int j) {
    rho.matrix = permuted_both(rho.matrix, swap_permutation(rho.system, i, j));
}

int dual_phase_steps(double phi, double epsilon) {
    if (epsilon <= 0.0 || epsilon > 0.5)
        throw std::invalid_argument("dual_phase_steps: epsilon must be in (0, 0.5]");
    if (phi == 0.0) return 0;
    return std::max(1, static_cast<int>(std::lround(2.0 / epsilon)));
}

std::pair<DensityMatrix, int> dual_phase_gate(const DensityMatrix& rho, double phi,
                                              double epsilon, const EncodingSpec& spec) {
    return dual_phase_gate(rho, phi, epsilon, spec, std::nullopt);
}

std::pair<DensityMatrix, int> dual_phase_gate(const DensityMatrix& rho, double phi,
                                              double epsilon, const EncodingSpec& spec,
                                              const std::optional<Mat>& ancilla_frame) {
    if (rho.system.num_subsystems() != 2)
        throw std::invalid_argument("dual_phase_gate: rho must live on the qubit's two modes");
    if (std::abs(rho.trace_real() - 1.0) > 1e-8)
        throw std::invalid_argument("dual_phase_gate: rho is not normalized");
    const int steps = dual_phase_steps(phi, epsilon);
    if (steps == 0) return {rho, 0};

    auto [ket0, ket1] = basis_states(spec);
    Vec ancilla = ket0.amplitudes;
    if (ancilla_frame) ancilla = (*ancilla_frame) * ancilla;
    const Mat anc_rho = ancilla * ancilla.adjoint();
    const int d = spec.truncation;
    const ModeSystem full = rho.system.appended(d, SubsystemRole::Mode);
    const std::vector<int> keep{0, 1};

    DensityMatrix out = rho;
    const double base_angle = epsilon * phi;
    for (int step = 0; step < steps; ++step) {
        const double angle =
            (step == steps - 1) ? 2.0 * phi - base_angle * (steps - 1) : base_angle;
        Mat joint(out.matrix.rows() * d, out.matrix.cols() * d);
        for (Eigen::Index r = 0; r < out.matrix.rows(); ++r)
            for (Eigen::Index c = 0; c < out.matrix.cols(); ++c)
                joint.block(r * d, c * d, d, d) = out.matrix(r, c) * anc_rho;
        DensityMatrix big{full, std::move(joint)};
        eswap2_inplace(big, -angle, 2, 1);
        out = partial_trace(big, keep);
    }
    return {out, steps};
}

SwapTestBranches swap_test_branches(const StateVector& state, int i, int j) {
    auto perm = swap_permutation(state.system, i, j);
    Vec swapped = permuted(state.amplitudes, perm);
    Vec plus = 0.5 * (state.amplitudes + swapped);
    Vec minus = 0.5 * (state.amplitudes - swapped);
    SwapTestBranches out;
    out.p_plus = plus.squaredNorm();
    out.p_minus = minus.squaredNorm();
    if (out.p_plus > 1e-300)
        out.plus = StateVector{state.system, plus / std::sqrt(out.p_plus)};
    if (out.p_minus > 1e-300)
        out.minus = StateVector{state.system, minus / std::sqrt(out.p_minus)};
    return out;
}

std::pair<MeasurementRecord, StateVector> swap_test(const StateVector& state, int i, int j,
                                                    std::mt19937_64& rng) {
    SwapTestBranches branches = swap_test_branches(state, i, j);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double u = unit(rng);
    MeasurementRecord record;
    if (u < branches.p_plus || !branches.minus) {
        record.outcome = +1;
        record.probability = branches.p_plus;
        if (!branches.plus) throw std::logic_error("swap_test: sampled an empty branch");
        return {record, *branches.plus};
    }
    record.outcome = -1;
    record.probability = branches.p_minus;
    return {record, *branches.minus};
}

std::pair<StateVector, QuadInitReport> init_quad_register(
    int num_qubits, const std::vector<EncodingSpec>& specs, std::uint64_t seed) {
    if (num_qubits < 1) throw std::invalid_argument("init_quad_register: N must be >= 1");
    if (static_cast<int>(specs.size()) != num_qubits)
        throw std::invalid_argument("init_quad_register: one encoding per qubit required");

    std::mt19937_64 rng(seed);
    QuadInitReport report;
    const int cap = 24 * num_qubits;

    std::vector<StateVector> qubit_states;
    for (int n = 0; n < num_qubits; ++n) {
        const EncodingSpec& spec = specs[static_cast<std::size_t>(n)];
        std::optional<StateVector> plus_pair, minus_pair;
        while ((!plus_pair || !minus_pair) && report.attempts < cap) {
            StateVector pair = prepare_dual(spec, 0);
            auto [record, collapsed] = swap_test(pair, 0, 1, rng);
            ++report.attempts;
            if (record.outcome == +1) {
                ++report.plus_count;
                if (!plus_pair) plus_pair = std::move(collapsed);
            } else {
                ++report.minus_count;
                if (!minus_pair) minus_pair = std::move(collapsed);
            }
        }
        if (!plus_pair || !minus_pair) {
            report.formed = false;
            throw std::runtime_error("init_quad_register: retry cap exceeded");
        }
        qubit_states.push_back(kron(*plus_pair, *minus_pair));
    }
    report.formed = true;

    StateVector out = qubit_states.front();
    for (std::size_t n = 1; n < qubit_states.size(); ++n) out = kron(out, qubit_states[n]);
    return {std::move(out), report};
}

namespace {

struct Block {
    int qubit;       // position within the listed qubits
    int half;        // 0 or 1 (quad), always 0 for dual
    std::vector<int> modes;  // global mode indices, contiguous
    bool touched = false;
};

StateVector block_state(const LogicalLayout& layout, int qubit_index, int half, int bit) {
    const EncodingSpec& spec = layout.encodings.at(static_cast<std::size_t>(qubit_index));
    if (layout.scheme == Scheme::Dual) return prepare_dual(spec, bit);
    const int sign = (half == 0) == (bit == 0) ? 1 : -1;
    return prepare_dual_plusminus(spec, sign);
}

Mat inverse_sqrt(const Mat& gram, double cond_limit) {
    Eigen::SelfAdjointEigenSolver<Mat> es(gram);
    const auto& ev = es.eigenvalues();
    if (ev.minCoeff() <= 0.0 || ev.maxCoeff() / ev.minCoeff() > cond_limit)
        throw ill_conditioned_basis_error(
            "logical basis Gram matrix ill-conditioned (encoding overlap too large)");
    Eigen::VectorXd inv = ev.cwiseSqrt().cwiseInverse();
    return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

LogicalMatrixResult logical_matrix(const LogicalLayout& layout, std::span<const int> qubits,
                                   std::span<const int> touched_modes, const OpApplier& op) {
    layout.validate();
    const int k = static_cast<int>(qubits.size());
    const int halves = layout.scheme == Scheme::Dual ? 1 : 2;

    std::vector<Block> blocks;
    for (int qi = 0; qi < k; ++qi) {
        auto modes = layout.qubit_modes(qubits[static_cast<std::size_t>(qi)]);
        for (int h = 0; h < halves; ++h) {
            Block b;
            b.qubit = qi;
            b.half = h;
            b.modes.assign(modes.begin() + h * 2, modes.begin() + h * 2 + 2);
            blocks.push_back(std::move(b));
        }
    }
    for (int m : touched_modes) {
        bool found = false;
        for (auto& b : blocks)
            if (std::find(b.modes.begin(), b.modes.end(), m) != b.modes.end()) {
                b.touched = true;
                found = true;
            }
        if (!found)
            throw std::invalid_argument("logical_matrix: op touches a mode outside the qubits");
    }

    std::vector<const Block*> touched;
    for (const auto& b : blocks)
        if (b.touched) touched.push_back(&b);
    if (touched.empty()) throw std::invalid_argument("logical_matrix: no touched modes");

    std::unordered_map<int, int> global_to_local;
    int local = 0;
    for (const Block* b : touched)
        for (int m : b->modes) global_to_local[m] = local++;
    const ModeSystem sub = ModeSystem::modes(local, layout.truncation());

    const int labels = 1 << k;
    auto bit_of = [&](int label, int qi) { return (label >> (k - 1 - qi)) & 1; };

    // f vectors over the touched subsystem; spectator Gram factors analytic.
    std::vector<Vec> f(static_cast<std::size_t>(labels));
    for (int m = 0; m < labels; ++m) {
        Vec acc = Vec::Ones(1);
        for (const Block* b : touched) {
            StateVector s = block_state(layout, qubits[static_cast<std::size_t>(b->qubit)],
                                        b->half, bit_of(m, b->qubit));
            Vec next(acc.size() * s.amplitudes.size());
            for (Eigen::Index i = 0; i < acc.size(); ++i)
                next.segment(i * s.amplitudes.size(), s.amplitudes.size()) =
                    acc(i) * s.amplitudes;
            acc = std::move(next);
        }
        f[static_cast<std::size_t>(m)] = std::move(acc);
    }

    Mat spectator = Mat::Ones(labels, labels);
    for (const auto& b : blocks) {
        if (b.touched) continue;
        StateVector s0 = block_state(layout, qubits[static_cast<std::size_t>(b.qubit)], b.half, 0);
        StateVector s1 = block_state(layout, qubits[static_cast<std::size_t>(b.qubit)], b.half, 1);
        const Complex cross = inner_product(s0, s1);
        for (int r = 0; r < labels; ++r)
            for (int c = 0; c < labels; ++c) {
                const int br = bit_of(r, b.qubit), bc = bit_of(c, b.qubit);
                if (br == bc) continue;
                spectator(r, c) *= br == 0 ? cross : std::conj(cross);
            }
    }

    std::vector<Vec> opf(static_cast<std::size_t>(labels));
    for (int m = 0; m < labels; ++m) {
        StateVector s{sub, f[static_cast<std::size_t>(m)]};
        op(s, global_to_local);
        opf[static_cast<std::size_t>(m)] = std::move(s.amplitudes);
    }

    Mat gram(labels, labels), overlap_op(labels, labels);
    for (int r = 0; r < labels; ++r)
        for (int c = 0; c < labels; ++c) {
            gram(r, c) = (f[static_cast<std::size_t>(r)].adjoint() *
                          f[static_cast<std::size_t>(c)])(0) * spectator(r, c);
            overlap_op(r, c) = (f[static_cast<std::size_t>(r)].adjoint() *
                                opf[static_cast<std::size_t>(c)])(0) * spectator(r, c);
        }

    const Mat gram_inv_sqrt = inverse_sqrt(gram, 1e6);
    LogicalMatrixResult result;
    result.matrix = gram_inv_sqrt * overlap_op * gram_inv_sqrt;
    result.leakage = 0.0;
    for (int m = 0; m < labels; ++m) {
        const double total = opf[static_cast<std::size_t>(m)].squaredNorm();
        const double inside = (gram_inv_sqrt * overlap_op.col(m)).squaredNorm();
        result.leakage = std::max(result.leakage, std::sqrt(std::max(0.0, total - inside)));
    }
    return result;
}

LogicalBasis build_logical_basis(const LogicalLayout& layout) {
    layout.validate();
    const int n = layout.num_qubits();
    const int halves = layout.scheme == Scheme::Dual ? 1 : 2;
    LogicalBasis basis;
    basis.system = layout.system();
    const auto dim = static_cast<Eigen::Index>(basis.system.total_dimension());
    const int labels = 1 << n;
    Mat cols(dim, labels);
    for (int m = 0; m < labels; ++m) {
        Vec acc = Vec::Ones(1);
        for (int q = 0; q < n; ++q) {
            const int bit = (m >> (n - 1 - q)) & 1;
            for (int h = 0; h < halves; ++h) {
                StateVector s = block_state(layout, q, h, bit);
                Vec next(acc.size() * s.amplitudes.size());
                for (Eigen::Index i = 0; i < acc.size(); ++i)
                    next.segment(i * s.amplitudes.size(), s.amplitudes.size()) =
                        acc(i) * s.amplitudes;
                acc = std::move(next);
            }
        }
        cols.col(m) = acc;
    }
    Mat gram = cols.adjoint() * cols;
    Eigen::SelfAdjointEigenSolver<Mat> es(gram);
    basis.gram_condition = es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff();
    basis.columns = cols * inverse_sqrt(gram, 1e6);
    return basis;
}

}  // namespace cvlab
