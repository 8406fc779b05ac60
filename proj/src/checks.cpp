#include "cvlab/checks.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include "cvlab/circuits.hpp"
#include "cvlab/compiler.hpp"
#include "cvlab/logical.hpp"

namespace cvlab {

bool CheckSuite::passed() const {
    for (const auto& item : items)
        if (!item.passed) return false;
    return !items.empty();
}

nlohmann::json CheckSuite::to_json() const {
    nlohmann::json j;
    j["suite"] = name;
    j["passed"] = passed();
    j["seconds"] = seconds;
    j["items"] = nlohmann::json::array();
    for (const auto& item : items) {
        nlohmann::json i;
        i["name"] = item.name;
        i["value"] = item.value;
        i["threshold"] = item.threshold;
        i["passed"] = item.passed;
        if (!item.detail.empty()) i["detail"] = item.detail;
        j["items"].push_back(std::move(i));
    }
    return j;
}

namespace {

using Clock = std::chrono::steady_clock;

void add(CheckSuite& suite, std::string name, double value, double threshold,
         std::string detail = {}) {
    suite.items.push_back(
        {std::move(name), value, threshold, value <= threshold, std::move(detail)});
}

void add_flag(CheckSuite& suite, std::string name, bool ok, std::string detail = {}) {
    suite.items.push_back({std::move(name), ok ? 0.0 : 1.0, 0.0, ok, std::move(detail)});
}

double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

Mat random_unitary(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Mat g(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) g(r, c) = Complex(gauss(rng), gauss(rng));
    Eigen::HouseholderQR<Mat> qr(g);
    Mat q = qr.householderQ();
    Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int c = 0; c < d; ++c) {
        const Complex diag = r(c, c);
        q.col(c) *= diag / std::abs(diag);
    }
    return q;
}

Vec random_ket(Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(gauss(rng), gauss(rng));
    return v / v.norm();
}

Mat kron_mat(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index r = 0; r < a.rows(); ++r)
        for (Eigen::Index c = 0; c < a.cols(); ++c)
            out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
    return out;
}

Mat pauli_x() {
    Mat x(2, 2);
    x << 0, 1, 1, 0;
    return x;
}

Mat pauli_z() {
    Mat z(2, 2);
    z << 1, 0, 0, -1;
    return z;
}

Mat pauli_exp(double theta, const Mat& pauli) {
    return std::cos(theta) * Mat::Identity(pauli.rows(), pauli.cols()) +
           Complex(0.0, std::sin(theta)) * pauli;
}

/// Full-dimension matrix of op embedded on the named slots, by digit matching.
Mat embedded_operator(const ModeSystem& sys, const LocalOperator& op,
                      const std::vector<int>& slots) {
    const auto total = static_cast<Eigen::Index>(sys.total_dimension());
    Mat full = Mat::Zero(total, total);
    auto digit = [&](Eigen::Index x, int s) {
        return static_cast<int>((static_cast<std::size_t>(x) / sys.stride(s)) %
                                static_cast<std::size_t>(sys.dim(s)));
    };
    auto op_index = [&](Eigen::Index x) {
        Eigen::Index idx = 0;
        for (int s : slots) idx = idx * sys.dim(s) + digit(x, s);
        return idx;
    };
    for (Eigen::Index x = 0; x < total; ++x)
        for (Eigen::Index y = 0; y < total; ++y) {
            bool match = true;
            for (int s = 0; s < sys.num_subsystems(); ++s) {
                if (std::find(slots.begin(), slots.end(), s) != slots.end()) continue;
                if (digit(x, s) != digit(y, s)) match = false;
            }
            if (match) full(x, y) = op.matrix(op_index(x), op_index(y));
        }
    return full;
}

// ---- shared verification kernels ------------------------------------------

double swap_involution_deviation(const std::vector<int>& dims) {
    double worst = 0.0;
    for (int d : dims) {
        const Mat s = swap_operator(d).matrix;
        const Mat id = Mat::Identity(s.rows(), s.cols());
        worst = std::max(worst, max_abs(s * s - id));
    }
    return worst;
}

double eswap_closed_form_deviation(const std::vector<int>& dims, double theta) {
    double worst = 0.0;
    for (int d : dims) {
        const LocalOperator s = swap_operator(d);
        const Mat expm = matrix_exponential(s, Complex(0.0, theta)).matrix;
        const Mat closed = std::cos(theta) * Mat::Identity(s.matrix.rows(), s.matrix.cols()) +
                           Complex(0.0, std::sin(theta)) * s.matrix;
        worst = std::max(worst, max_abs(expm - closed));
    }
    return worst;
}

double swap_commutation_deviation(const std::vector<int>& dims, int trials,
                                  std::mt19937_64& rng) {
    double worst = 0.0;
    for (int d : dims) {
        const Mat s = swap_operator(d).matrix;
        for (int t = 0; t < trials; ++t) {
            const Mat u = random_unitary(d, rng);
            const Mat uu = kron_mat(u, u);
            worst = std::max(worst, max_abs(uu * s - s * uu));
        }
    }
    return worst;
}

/// Logical matrix of a swap-based operation on one or two qubits, against the
/// target qubit-algebra unitary.  Returns the max-entry deviation.
struct IdentityCase {
    Scheme scheme;
    int qubits;                 // 1 or 2
    std::vector<int> touched;   // local-qubit mode offsets, resolved below
    enum class Op { Eswap2, Eswap4 } op;
    std::array<int, 4> op_modes;  // global mode indices
    Mat target;                   // 2^qubits square
    const char* name;
};

double identity_deviation(const EncodingSpec& spec, double theta, const IdentityCase& c) {
    std::vector<EncodingSpec> encs(static_cast<std::size_t>(c.qubits), spec);
    LogicalLayout layout{c.scheme, encs};
    std::vector<int> qubits(static_cast<std::size_t>(c.qubits));
    for (int q = 0; q < c.qubits; ++q) qubits[static_cast<std::size_t>(q)] = q;

    OpApplier op = [&](StateVector& s, const std::unordered_map<int, int>& g2l) {
        if (c.op == IdentityCase::Op::Eswap2)
            eswap2_inplace(s, theta, g2l.at(c.op_modes[0]), g2l.at(c.op_modes[1]));
        else
            eswap4_inplace(s, theta, g2l.at(c.op_modes[0]), g2l.at(c.op_modes[1]),
                           g2l.at(c.op_modes[2]), g2l.at(c.op_modes[3]));
    };
    LogicalMatrixResult result = logical_matrix(layout, qubits, c.touched, op);
    return max_abs(result.matrix - pauli_exp(theta, c.target));
}

std::vector<IdentityCase> identity_cases() {
    Mat xx = Mat::Zero(4, 4);
    xx << 0, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0, 0;
    Mat zz = Mat::Zero(4, 4);
    zz.diagonal() << 1, -1, -1, 1;
    return {
        {Scheme::Dual, 1, {0, 1}, IdentityCase::Op::Eswap2, {0, 1, -1, -1}, pauli_x(),
         "dual eswap2 acts as X"},
        {Scheme::Dual, 2, {0, 1, 2, 3}, IdentityCase::Op::Eswap4, {0, 1, 2, 3}, xx,
         "dual eswap4 acts as XX"},
        {Scheme::Quad, 1, {0, 1}, IdentityCase::Op::Eswap2, {0, 1, -1, -1}, pauli_z(),
         "quad eswap2 on first pair acts as Z"},
        {Scheme::Quad, 2, {0, 1, 4, 5}, IdentityCase::Op::Eswap4, {0, 1, 4, 5}, zz,
         "quad eswap4 on first pairs acts as ZZ"},
        {Scheme::Quad, 1, {0, 1, 2, 3}, IdentityCase::Op::Eswap4, {0, 2, 1, 3}, pauli_x(),
         "quad eswap4 across pairs acts as X"},
    };
}

const std::vector<double>& identity_thetas() {
    static const std::vector<double> thetas{0.3, std::numbers::pi / 4.0, 1.2};
    return thetas;
}

void add_gate_identity_items(CheckSuite& suite, const EncodingSpec& spec, double base_tol) {
    const double ov = std::abs(overlap(spec));
    const double tol = base_tol + 10.0 * ov;
    const std::string suffix = " [" + to_string(spec.kind) + "]";
    for (const auto& c : identity_cases()) {
        double worst = 0.0;
        for (double theta : identity_thetas())
            worst = std::max(worst, identity_deviation(spec, theta, c));
        add(suite, c.name + suffix, worst, tol,
            "overlap " + std::to_string(ov) + ", theta in {0.3, pi/4, 1.2}");
    }
}

StateVector dual_phase_ideal_state(const EncodingSpec& spec, double phi) {
    StateVector out = prepare_dual(spec, 0);
    StateVector one = prepare_dual(spec, 1);
    out.amplitudes = (std::exp(Complex(0.0, phi)) * out.amplitudes +
                      std::exp(Complex(0.0, -phi)) * one.amplitudes) /
                     std::numbers::sqrt2;
    return out;
}

struct SlopeFit {
    double slope = 0.0;
    bool monotone = false;
    std::vector<double> distances;
};

SlopeFit phase_scaling_fit(const std::vector<double>& epsilons, double phi,
                           const EncodingSpec& spec) {
    SlopeFit fit;
    for (double eps : epsilons) fit.distances.push_back(phase_channel_trace_distance(spec, phi, eps));
    fit.monotone = true;
    for (std::size_t i = 1; i < fit.distances.size(); ++i)
        if (fit.distances[i] >= fit.distances[i - 1]) fit.monotone = false;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const auto n = static_cast<double>(epsilons.size());
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        const double x = std::log(epsilons[i]);
        const double y = std::log(fit.distances[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return fit;
}

double distribution_deviation(const std::map<std::string, double>& a,
                              const std::map<std::string, double>& b) {
    double worst = 0.0;
    for (const auto& [key, p] : a) {
        const auto it = b.find(key);
        worst = std::max(worst, std::abs(p - (it == b.end() ? 0.0 : it->second)));
    }
    for (const auto& [key, p] : b)
        if (!a.count(key)) worst = std::max(worst, p);
    return worst;
}

LogicalCircuit dfs_probe_circuit(const EncodingSpec& spec, double epsilon) {
    LogicalCircuit circuit;
    circuit.scheme = Scheme::Dual;
    circuit.encodings = {spec, spec};
    circuit.epsilon = epsilon;
    circuit.gates = {LogicalGate::rx(0.7, 0), LogicalGate::xx(0.4, 0, 1),
                     LogicalGate::measure(0), LogicalGate::measure(1)};
    return circuit;
}

Mat dual_span_projector(const EncodingSpec& spec) {
    StateVector b0 = prepare_dual(spec, 0);
    StateVector b1 = prepare_dual(spec, 1);
    Mat basis(b0.amplitudes.size(), 2);
    basis.col(0) = b0.amplitudes;
    basis.col(1) = b1.amplitudes;
    const Mat gram = basis.adjoint() * basis;
    return basis * gram.inverse() * basis.adjoint();
}

template <typename F>
CheckSuite timed_suite(std::string name, F&& fill) {
    CheckSuite suite;
    suite.name = std::move(name);
    const auto start = Clock::now();
    fill(suite);
    suite.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return suite;
}

}  // namespace

// ---- reusable kernels -------------------------------------------------------

double phase_channel_trace_distance(const EncodingSpec& spec, double phi, double epsilon) {
    DensityMatrix rho = to_density(prepare_dual_plusminus(spec, +1));
    auto [out, steps] = dual_phase_gate(rho, phi, epsilon, spec);
    (void)steps;
    return trace_distance(out, to_density(dual_phase_ideal_state(spec, phi)));
}

std::pair<std::map<std::string, double>, std::map<std::string, double>> dfs_distributions(
    const EncodingSpec& spec, const NoiseSpec& noise, double epsilon) {
    const LogicalCircuit circuit = dfs_probe_circuit(spec, epsilon);
    const auto base = execute_distribution(compile(circuit));
    PhysicalProgram noisy = compile(circuit);
    noisy.noise = noise;
    noisy.noise_point = NoisePoint::BeforeProgram;
    return {base, execute_distribution(noisy)};
}

double dfs_deviation(const EncodingSpec& spec, const NoiseSpec& noise, double epsilon) {
    const auto [base, noisy] = dfs_distributions(spec, noise, epsilon);
    return distribution_deviation(base, noisy);
}

// [exp(i t S1 S2), P1 (x) P2] = i sin t (S P1 (x) S P2 - P1 S (x) P2 S); the
// kron-factorized entrywise bound keeps large truncations tractable.
double mixed_encoding_commutator_bound(const EncodingSpec& e1, const EncodingSpec& e2,
                                       double theta) {
    if (e1.truncation != e2.truncation)
        throw std::invalid_argument("mixed_encoding_commutator_bound: truncations differ");
    const Mat s = swap_operator(e1.truncation).matrix;
    const Mat p1 = dual_span_projector(e1);
    const Mat p2 = dual_span_projector(e2);
    const double d1 = max_abs(s * p1 - p1 * s);
    const double d2 = max_abs(s * p2 - p2 * s);
    return std::abs(std::sin(theta)) * (d1 * max_abs(s * p2) + max_abs(p1 * s) * d2);
}

LogicalCircuit random_native_circuit(Scheme scheme, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> qubit_count(1, 2);
    std::uniform_real_distribution<double> angle(-1.5, 1.5);
    LogicalCircuit circuit;
    circuit.scheme = scheme;
    const int n = qubit_count(rng);
    circuit.encodings.assign(static_cast<std::size_t>(n), EncodingSpec::fock(4));
    circuit.epsilon = 0.01;
    std::uniform_int_distribution<int> gate_count(1, 5);
    const int gates = gate_count(rng);
    std::uniform_int_distribution<int> kind_pick(0, n == 2 ? 2 : 1);
    std::uniform_int_distribution<int> qubit_pick(0, n - 1);
    for (int g = 0; g < gates; ++g) {
        const int kind = kind_pick(rng);
        if (kind == 0) {
            circuit.gates.push_back(LogicalGate::rx(angle(rng), qubit_pick(rng)));
        } else if (kind == 1) {
            circuit.gates.push_back(LogicalGate::rz(angle(rng), qubit_pick(rng)));
        } else {
            circuit.gates.push_back(scheme == Scheme::Dual
                                        ? LogicalGate::xx(angle(rng), 0, 1)
                                        : LogicalGate::zz(angle(rng), 0, 1));
        }
    }
    return circuit;
}

namespace {

/// Pinned slack per dual phase channel, in units of epsilon (the channel's
/// trace-distance error is linear in epsilon with a small constant).
constexpr double kPhaseChannelSlack = 3.0;

}  // namespace

OracleComparison compare_with_oracle(const LogicalCircuit& circuit) {
    const PhysicalProgram program = compile(circuit);
    OracleComparison cmp;
    for (const auto& op : program.ops)
        if (op.kind == PhysicalOp::Kind::PhaseChannel) ++cmp.phase_channels;
    cmp.tolerance = 1e-8 + kPhaseChannelSlack * circuit.epsilon * cmp.phase_channels;

    const OracleResult oracle = logical_oracle(circuit);
    const auto logical = extract_logical_state(program);
    if (std::holds_alternative<Vec>(logical)) {
        Vec v = std::get<Vec>(logical);
        const Complex c = (oracle.state.adjoint() * v)(0);
        if (std::abs(c) > 1e-300) v *= std::conj(c) / std::abs(c);
        cmp.deviation = (v - oracle.state).cwiseAbs().maxCoeff();
    } else {
        const Mat rho = std::get<Mat>(logical);
        const ModeSystem qsys = ModeSystem::modes(circuit.num_qubits(), 2);
        const Mat pure = oracle.state * oracle.state.adjoint();
        cmp.deviation = trace_distance(DensityMatrix{qsys, rho}, DensityMatrix{qsys, pure});
    }
    return cmp;
}

// ---- module suites ---------------------------------------------------------

CheckSuite check_fock_core(const VerifyOptions& opts) {
    return timed_suite("fock-core", [&](CheckSuite& suite) {
        const std::vector<int> dims =
            opts.d > 0 ? std::vector<int>{opts.d} : std::vector<int>{2, 3, 4, 6};
        const double tol = opts.tolerance.value_or(1e-12);

        add(suite, "swap involution S^2 = I", swap_involution_deviation(dims), 0.0);
        add(suite, "eswap closed form matches matrix exponential",
            eswap_closed_form_deviation({2, 3, 4}, 0.7), tol);

        std::mt19937_64 rng(11);
        add(suite, "collective U (x) U commutes with swap",
            swap_commutation_deviation(dims, 20, rng), tol);

        const ModeSystem sys({2, 3, 4}, std::vector<SubsystemRole>(3, SubsystemRole::Mode));
        double kernel_worst = 0.0, norm_worst = 0.0;
        for (int k = 1; k <= 3; ++k) {
            std::vector<int> slots(static_cast<std::size_t>(sys.num_subsystems()));
            for (int s = 0; s < sys.num_subsystems(); ++s) slots[static_cast<std::size_t>(s)] = s;
            std::sort(slots.begin(), slots.end());
            std::vector<std::vector<int>> arrangements;
            // every ordered arrangement of k distinct slots
            std::vector<int> pick;
            std::function<void()> build = [&] {
                if (static_cast<int>(pick.size()) == k) {
                    arrangements.push_back(pick);
                    return;
                }
                for (int s = 0; s < sys.num_subsystems(); ++s) {
                    if (std::find(pick.begin(), pick.end(), s) != pick.end()) continue;
                    pick.push_back(s);
                    build();
                    pick.pop_back();
                }
            };
            build();
            for (const auto& arr : arrangements) {
                int dim = 1;
                std::vector<int> opdims;
                for (int s : arr) {
                    dim *= sys.dim(s);
                    opdims.push_back(sys.dim(s));
                }
                LocalOperator op{opdims, random_unitary(dim, rng)};
                StateVector psi{sys, random_ket(static_cast<Eigen::Index>(sys.total_dimension()), rng)};
                StateVector got = apply_local(psi, op, arr);
                const Mat full = embedded_operator(sys, op, arr);
                const Vec want = full * psi.amplitudes;
                kernel_worst = std::max(kernel_worst, (got.amplitudes - want).cwiseAbs().maxCoeff());
                norm_worst = std::max(norm_worst, std::abs(got.norm() - 1.0));
            }
        }
        add(suite, "local kernel matches embedded full matrix", kernel_worst, tol);
        add(suite, "unitary application preserves norm", norm_worst, 1e-10);

        const ModeSystem dsys({2, 3, 2}, std::vector<SubsystemRole>(3, SubsystemRole::Mode));
        Mat a(dsys.total_dimension(), dsys.total_dimension());
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (Eigen::Index r = 0; r < a.rows(); ++r)
            for (Eigen::Index c = 0; c < a.cols(); ++c) a(r, c) = Complex(gauss(rng), gauss(rng));
        Mat rho = a * a.adjoint();
        rho /= rho.trace().real();
        const std::vector<int> keep{0, 2};
        DensityMatrix reduced = partial_trace(DensityMatrix{dsys, rho}, keep);
        add(suite, "partial trace keeps hermiticity",
            max_abs(reduced.matrix - reduced.matrix.adjoint()), tol);
        add(suite, "partial trace keeps unit trace",
            std::abs(reduced.trace_real() - 1.0), tol);

        StateVector pa{ModeSystem::modes(1, 3), random_ket(3, rng)};
        StateVector pb{ModeSystem::modes(1, 4), random_ket(4, rng)};
        const std::vector<int> keep_b{1};
        DensityMatrix rb = partial_trace(to_density(kron(pa, pb)), keep_b);
        add(suite, "partial trace of product state recovers the factor",
            max_abs(rb.matrix - pb.amplitudes * pb.amplitudes.adjoint()), tol);
    });
}

CheckSuite check_encodings(const VerifyOptions& opts) {
    return timed_suite("encodings", [&](CheckSuite& suite) {
        const double tol = opts.tolerance.value_or(1e-12);
        std::vector<EncodingSpec> grid{
            EncodingSpec::fock(4),          EncodingSpec::coherent(2.0, 14),
            EncodingSpec::cat(2.0, 14),     EncodingSpec::gkp(0.35, 14),
            EncodingSpec::coherent(1.0, 8), EncodingSpec::cat(1.2, 10),
            EncodingSpec::gkp(0.5, 12),
        };
        if (opts.encoding) grid.push_back(*opts.encoding);

        double norm_worst = 0.0;
        bool json_ok = true;
        for (const auto& spec : grid) {
            auto [k0, k1] = basis_states(spec);
            norm_worst = std::max({norm_worst, std::abs(k0.norm() - 1.0),
                                   std::abs(k1.norm() - 1.0)});
            json_ok = json_ok && EncodingSpec::from_json(spec.to_json()) == spec;
        }
        add(suite, "basis kets normalized", norm_worst, tol);
        add_flag(suite, "encoding spec JSON round trip", json_ok);

        const double alpha = 1.5;
        const Complex got = overlap(EncodingSpec::coherent(alpha, 30));
        const double want = std::exp(-2.0 * alpha * alpha);
        add(suite, "coherent overlap matches exp(-2|alpha|^2)", std::abs(got - want), 1e-6);

        auto [c0, c1] = basis_states(EncodingSpec::cat(2.0, 16));
        double odd_support = 0.0;
        for (int n = 1; n < 16; n += 2)
            odd_support = std::max({odd_support, std::abs(c0.amplitudes(n)),
                                    std::abs(c1.amplitudes(n))});
        add(suite, "cat kets occupy only even photon numbers", odd_support, tol);

        const double g05 = std::abs(overlap(EncodingSpec::gkp(0.5, 20)));
        const double g04 = std::abs(overlap(EncodingSpec::gkp(0.4, 20)));
        const double g03 = std::abs(overlap(EncodingSpec::gkp(0.3, 20)));
        add_flag(suite, "gkp overlap decreases with delta", g05 > g04 && g04 > g03,
                 "|<0|1>| at delta 0.5/0.4/0.3: " + std::to_string(g05) + " " +
                     std::to_string(g04) + " " + std::to_string(g03));

        bool leak_monotone = true;
        for (auto kind : {EncodingKind::Coherent, EncodingKind::Gkp}) {
            double prev = 1.0;
            for (int d : {10, 12, 14, 16}) {
                EncodingSpec spec = kind == EncodingKind::Coherent
                                        ? EncodingSpec::coherent(2.0, d)
                                        : EncodingSpec::gkp(0.35, d);
                const double leak = encoding_report(spec).leakage();
                if (leak > prev + 1e-15) leak_monotone = false;
                prev = leak;
            }
        }
        add_flag(suite, "leakage never grows with truncation", leak_monotone);

        add_flag(suite, "coherent alpha=2 passes the 1e-3 orthogonality gate",
                 validate_encoding(EncodingSpec::coherent(2.0, 14), 1e-3).status ==
                     EncodingStatus::Pass);
        add_flag(suite, "coherent alpha=0.5 fails the 1e-3 orthogonality gate",
                 validate_encoding(EncodingSpec::coherent(0.5, 14), 1e-3).status ==
                     EncodingStatus::Warn);
    });
}

CheckSuite check_logical(const VerifyOptions& opts) {
    return timed_suite("logical", [&](CheckSuite& suite) {
        EncodingSpec spec = opts.encoding.value_or(EncodingSpec::fock(4));
        if (opts.d > 0) spec.truncation = opts.d;
        const double base_tol = opts.tolerance.value_or(1e-8);

        const double ov = std::abs(overlap(spec));
        add(suite, "encoding quasi-orthogonality |<0_L|1_L>| < 1e-3", ov, 1e-3,
            "gate identities below hold only up to the overlap-scaled tolerance");
        add_gate_identity_items(suite, spec, base_tol);

        std::mt19937_64 rng(17);
        StateVector psi{ModeSystem::modes(2, spec.truncation),
                        random_ket(static_cast<Eigen::Index>(
                                       static_cast<std::size_t>(spec.truncation) *
                                       static_cast<std::size_t>(spec.truncation)),
                                   rng)};
        auto [rec, collapsed] = swap_test(psi, 0, 1, rng);
        SwapTestBranches again = swap_test_branches(collapsed, 0, 1);
        const double repeat_p = rec.outcome == +1 ? again.p_plus : again.p_minus;
        add(suite, "swap test is projective (repeat probability 1)",
            std::abs(repeat_p - 1.0), 1e-10);

        DensityMatrix rho = to_density(prepare_dual_plusminus(spec, +1));
        auto [out, steps] = dual_phase_gate(rho, std::numbers::pi / 4.0, 0.1, spec);
        add(suite, "phase channel preserves trace", std::abs(out.trace_real() - 1.0), 1e-10,
            std::to_string(steps) + " steps");
        Eigen::SelfAdjointEigenSolver<Mat> es(out.matrix);
        add(suite, "phase channel preserves positivity",
            std::max(0.0, -es.eigenvalues().minCoeff()), 1e-10);

        const EncodingSpec fock = EncodingSpec::fock(4);
        StateVector q0 = prepare_quad(fock, 0);
        StateVector q1 = prepare_quad(fock, 1);
        StateVector mix = q0;
        mix.amplitudes = 0.6 * q0.amplitudes + 0.8 * q1.amplitudes;
        SwapTestBranches readout = swap_test_branches(mix, 0, 1);
        add(suite, "quad Z readout returns |amplitude|^2",
            std::abs(readout.p_plus - 0.36), 1e-10);
    });
}

CheckSuite check_circuits(const VerifyOptions& opts) {
    return timed_suite("circuits", [&](CheckSuite& suite) {
        const std::vector<int> dims =
            opts.d > 0 ? std::vector<int>{opts.d} : std::vector<int>{2, 3, 4, 6};
        double worst = 0.0;
        for (int d : dims)
            worst = std::max(worst, max_abs(controlled_swap_circuit(d).matrix -
                                            controlled_swap_ideal(d).matrix));
        add(suite, "controlled-swap circuit matches ideal permutation", worst, 1e-10);

        std::mt19937_64 rng(23);
        double two_worst = 0.0, four_worst = 0.0, variant_worst = 0.0;
        for (int trial = 0; trial < 3; ++trial) {
            StateVector psi{ModeSystem::modes(2, 5), random_ket(25, rng)};
            StateVector via = eswap_via_circuit(psi, 0.8, 0, 1);
            StateVector closed = eswap2(psi, 0.8, 0, 1);
            two_worst = std::max(two_worst,
                                 (via.amplitudes - closed.amplitudes).cwiseAbs().maxCoeff());
            StateVector via_c = eswap_via_circuit(psi, 0.8, 0, 1, true);
            variant_worst = std::max(
                variant_worst, (via_c.amplitudes - via.amplitudes).cwiseAbs().maxCoeff());

            StateVector phi{ModeSystem::modes(4, 3), random_ket(81, rng)};
            StateVector via4 = eswap_via_circuit(phi, 0.6, 0, 1, 2, 3);
            StateVector closed4 = eswap4(phi, 0.6, 0, 1, 2, 3);
            four_worst = std::max(four_worst,
                                  (via4.amplitudes - closed4.amplitudes).cwiseAbs().maxCoeff());
        }
        add(suite, "two-mode eswap circuit matches closed form", two_worst, 1e-10);
        add(suite, "four-mode eswap circuit matches closed form", four_worst, 1e-10);
        add(suite, "ideal and composed controlled-swap variants agree", variant_worst, 1e-10);

        const int d = 3;
        const Mat u = random_unitary(d, rng);
        const Mat s = swap_operator(d).matrix;
        const Mat uu = kron_mat(u, u);
        double dfs_worst = max_abs(uu * s - s * uu);
        const Mat u4 = kron_mat(uu, uu);
        const Mat ss = kron_mat(s, s);
        dfs_worst = std::max(dfs_worst, max_abs(u4 * ss - ss * u4));
        const Mat c = controlled_swap_ideal(d).matrix;
        const Mat ext = kron_mat(Mat::Identity(2, 2), uu);
        dfs_worst = std::max(dfs_worst, max_abs(ext * c - c * ext));
        add(suite, "collective unitaries commute with swap-based operations", dfs_worst, 1e-12);

        bool json_ok = true, unitary_ok = true;
        for (const NoiseSpec& n : {NoiseSpec::none(), NoiseSpec::number_phase(0.9),
                                   NoiseSpec::random_hermitian(0.35, 21)}) {
            const nlohmann::json j = n.to_json();
            const NoiseSpec back = NoiseSpec::from_json(j);
            json_ok = json_ok && back.to_json() == j;
            unitary_ok = unitary_ok && is_unitary(back.unitary(5));
        }
        add_flag(suite, "noise spec JSON round trip", json_ok);
        add_flag(suite, "noise unitaries are unitary", unitary_ok);
    });
}

CheckSuite check_compiler(const VerifyOptions& opts) {
    return timed_suite("compiler", [&](CheckSuite& suite) {
        (void)opts;
        std::mt19937_64 rng(31);
        double synth_worst = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            const Mat u2 = random_unitary(2, rng);
            Eigen::Matrix2cd u = u2;
            Mat m = Mat::Identity(2, 2);
            for (const auto& gate : synthesize_single_qubit(u, 0)) {
                const Mat g = pauli_exp(gate.theta,
                                        gate.kind == GateKind::Rx ? pauli_x() : pauli_z());
                m = g * m;
            }
            const Complex tr = (m.adjoint() * u).trace();
            const Mat aligned = m * (tr / std::abs(tr));
            synth_worst = std::max(synth_worst, max_abs(u - aligned));
        }
        add(suite, "single-qubit synthesis reproduces the unitary", synth_worst, 1e-10);

        double dev_margin = 0.0;
        for (int trial = 0; trial < 6; ++trial) {
            const LogicalCircuit circuit =
                random_native_circuit(trial % 2 == 0 ? Scheme::Dual : Scheme::Quad, rng);
            const OracleComparison cmp = compare_with_oracle(circuit);
            dev_margin = std::max(dev_margin, cmp.deviation - cmp.tolerance);
        }
        add(suite, "compiled state matches the qubit-algebra oracle", dev_margin, 0.0,
            "margin over the per-circuit tolerance (1e-8 plus phase-channel slack)");

        LogicalCircuit det;
        det.scheme = Scheme::Dual;
        det.encodings = {EncodingSpec::fock(4)};
        det.epsilon = 0.05;
        det.gates = {LogicalGate::rx(0.4, 0), LogicalGate::rz(0.3, 0),
                     LogicalGate::measure(0)};
        const PhysicalProgram program = compile(det);
        const std::string once = execute(program, 200, 7).to_json().dump();
        const std::string twice = execute(program, 200, 7).to_json().dump();
        add_flag(suite, "identical program and seed give identical results", once == twice);

        LogicalCircuit acc;
        acc.scheme = Scheme::Dual;
        acc.encodings = {EncodingSpec::fock(4)};
        acc.epsilon = 0.01;
        acc.gates = {LogicalGate::rz(0.3, 0), LogicalGate::rz(0.7, 0)};
        add(suite, "phase-gate repetitions equal the step-count sum",
            std::abs(compile(acc).phase_gate_reps - 2.0 * std::lround(2.0 / 0.01)), 0.0);

        LogicalCircuit both;
        both.scheme = Scheme::Dual;
        both.encodings = {EncodingSpec::fock(4), EncodingSpec::fock(4)};
        both.epsilon = 0.01;
        both.gates = {LogicalGate::rx(0.5, 0), LogicalGate::xx(0.3, 0, 1),
                      LogicalGate::measure(0), LogicalGate::measure(1)};
        const auto oracle_dist = logical_oracle(both).distribution;
        const auto dual_dist = execute_distribution(compile(both));
        both.scheme = Scheme::Quad;
        const auto quad_dist = execute_distribution(compile(both));
        add(suite, "quad scheme reproduces the oracle distribution",
            distribution_deviation(quad_dist, oracle_dist), 1e-8);
        add(suite, "dual scheme reproduces the oracle distribution",
            distribution_deviation(dual_dist, oracle_dist), 0.05,
            "dual Z readout rides on approximate phase channels (epsilon 0.01)");
    });
}

const std::vector<std::string>& verify_scopes() {
    static const std::vector<std::string> scopes{"fock-core", "encodings", "logical",
                                                 "circuits", "compiler"};
    return scopes;
}

CheckSuite run_scope(const std::string& scope, const VerifyOptions& opts) {
    if (scope == "fock-core") return check_fock_core(opts);
    if (scope == "encodings") return check_encodings(opts);
    if (scope == "logical") return check_logical(opts);
    if (scope == "circuits") return check_circuits(opts);
    if (scope == "compiler") return check_compiler(opts);
    throw std::invalid_argument("unknown verify scope: " + scope);
}

// ---- acceptance criteria ---------------------------------------------------

int num_acceptance_criteria() { return 10; }

namespace {

CheckSuite criterion_operator_algebra() {
    return timed_suite("criterion-1 operator algebra", [](CheckSuite& suite) {
        const std::vector<int> dims{2, 3, 4, 6};
        add(suite, "S^2 = I exactly", swap_involution_deviation(dims), 0.0);
        add(suite, "exp(i theta S) = cos I + i sin S",
            eswap_closed_form_deviation({2, 3, 4, 6}, 0.7), 1e-12);
        std::mt19937_64 rng(41);
        add(suite, "max |[U (x) U, S]| over 20 random U",
            swap_commutation_deviation(dims, 20, rng), 1e-12);
    });
}

CheckSuite criterion_gate_identities() {
    return timed_suite("criterion-2 gate identities", [](CheckSuite& suite) {
        add_gate_identity_items(suite, EncodingSpec::fock(4), 1e-8);
        for (const EncodingSpec& spec :
             {EncodingSpec::coherent(2.0, 14), EncodingSpec::cat(2.0, 14),
              EncodingSpec::gkp(0.35, 14)})
            add_gate_identity_items(suite, spec, 1e-8);
    });
}

CheckSuite criterion_controlled_swap() {
    return timed_suite("criterion-3 controlled-swap decomposition", [](CheckSuite& suite) {
        for (int d : {2, 3, 4, 6})
            add(suite, "circuit equals ideal at d=" + std::to_string(d),
                max_abs(controlled_swap_circuit(d).matrix - controlled_swap_ideal(d).matrix),
                1e-10);
    });
}

CheckSuite criterion_eswap_circuit() {
    return timed_suite("criterion-4 eswap ancilla circuit", [](CheckSuite& suite) {
        double two = 0.0, four = 0.0;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            std::mt19937_64 rng(seed);
            std::uniform_real_distribution<double> angle(-1.4, 1.4);
            const double theta = angle(rng);
            StateVector psi{ModeSystem::modes(2, 6), random_ket(36, rng)};
            for (bool composed : {false, true}) {
                StateVector via = eswap_via_circuit(psi, theta, 0, 1, composed);
                two = std::max(two, (via.amplitudes - eswap2(psi, theta, 0, 1).amplitudes)
                                        .cwiseAbs()
                                        .maxCoeff());
            }
            StateVector phi{ModeSystem::modes(4, 4), random_ket(256, rng)};
            for (bool composed : {false, true}) {
                StateVector via = eswap_via_circuit(phi, theta, 0, 1, 2, 3, composed);
                four = std::max(four,
                                (via.amplitudes - eswap4(phi, theta, 0, 1, 2, 3).amplitudes)
                                    .cwiseAbs()
                                    .maxCoeff());
            }
        }
        add(suite, "two-mode circuit matches closed form (10 seeds)", two, 1e-10,
            "ancilla return to |+> asserted inside the circuit at 1e-10");
        add(suite, "four-mode circuit matches closed form (10 seeds)", four, 1e-10);
    });
}

CheckSuite criterion_phase_scaling() {
    return timed_suite("criterion-5 phase-gate error scaling", [](CheckSuite& suite) {
        const std::vector<double> eps{0.16, 0.08, 0.04, 0.02, 0.01};
        const SlopeFit fit =
            phase_scaling_fit(eps, std::numbers::pi / 4.0, EncodingSpec::fock(4));
        std::string detail = "trace distances:";
        for (double dist : fit.distances) detail += " " + std::to_string(dist);
        add(suite, "log-log slope within [0.85, 1.15]", std::abs(fit.slope - 1.0), 0.15,
            "slope " + std::to_string(fit.slope));
        add_flag(suite, "error decreases monotonically with epsilon", fit.monotone, detail);
    });
}

CheckSuite criterion_swap_test_statistics() {
    return timed_suite("criterion-6 swap-test statistics", [](CheckSuite& suite) {
        std::mt19937_64 rng(47);
        StateVector psi{ModeSystem::modes(2, 5), random_ket(25, rng)};
        SwapTestBranches branches = swap_test_branches(psi, 0, 1);

        // Born-rule oracle through the dense projector (I +- S)/2.
        const Mat s = swap_operator(5).matrix;
        const Mat id = Mat::Identity(25, 25);
        const double p_plus_oracle =
            ((0.5 * (id + s)) * psi.amplitudes).squaredNorm();
        const double p_minus_oracle =
            ((0.5 * (id - s)) * psi.amplitudes).squaredNorm();
        add(suite, "p+ matches the Born-rule oracle",
            std::abs(branches.p_plus - p_plus_oracle), 1e-10);
        add(suite, "p- matches the Born-rule oracle",
            std::abs(branches.p_minus - p_minus_oracle), 1e-10);

        const int shots = 4000;
        int plus = 0;
        for (int t = 0; t < shots; ++t)
            if (swap_test(psi, 0, 1, rng).first.outcome == +1) ++plus;
        const double freq = static_cast<double>(plus) / shots;
        const double sigma =
            std::sqrt(branches.p_plus * (1.0 - branches.p_plus) / shots);
        add(suite, "sampled frequency within 3 sigma of p+",
            std::abs(freq - branches.p_plus), 3.0 * sigma,
            "freq " + std::to_string(freq) + ", p+ " + std::to_string(branches.p_plus));

        auto [rec, collapsed] = swap_test(psi, 0, 1, rng);
        SwapTestBranches again = swap_test_branches(collapsed, 0, 1);
        const double repeat = rec.outcome == +1 ? again.p_plus : again.p_minus;
        add(suite, "repeated test repeats the outcome", std::abs(repeat - 1.0), 1e-10);
    });
}

CheckSuite criterion_quad_init() {
    return timed_suite("criterion-7 quad-rail initialization", [](CheckSuite& suite) {
        const EncodingSpec fock = EncodingSpec::fock(4);
        std::mt19937_64 rng(53);
        const int trials = 2000;
        int plus = 0;
        for (int t = 0; t < trials; ++t) {
            StateVector pair = prepare_dual(fock, 0);
            if (swap_test(pair, 0, 1, rng).first.outcome == +1) ++plus;
        }
        const double freq = static_cast<double>(plus) / trials;
        add(suite, "swap-test +1 fraction is 0.5", std::abs(freq - 0.5),
            3.0 * std::sqrt(0.25 / trials), "fraction " + std::to_string(freq));

        auto [state, report] = init_quad_register(1, {fock}, 59);
        const Complex ip = inner_product(state, prepare_quad(fock, 0));
        add(suite, "formed register matches |0_Q> exactly",
            1.0 - std::norm(ip), 1e-10,
            "attempts " + std::to_string(report.attempts));
    });
}

CheckSuite criterion_mixed_encoding() {
    return timed_suite("criterion-8 mixed-encoding preservation", [](CheckSuite& suite) {
        const double theta = std::numbers::pi / 4.0;

        add(suite, "commutator bound for fock with coherent(2) at d=14",
            mixed_encoding_commutator_bound(EncodingSpec::fock(14),
                                            EncodingSpec::coherent(2.0, 14), theta),
            1e-8 + 10.0 * std::exp(-8.0));

        // Dense cross-check of the factorized bound at a small truncation.
        const EncodingSpec e1 = EncodingSpec::fock(3);
        const EncodingSpec e2 = EncodingSpec::coherent(1.0, 3);
        const Mat s3 = swap_operator(3).matrix;
        const Mat big_s = kron_mat(s3, s3);
        const Mat eswap =
            std::cos(theta) * Mat::Identity(81, 81) + Complex(0.0, std::sin(theta)) * big_s;
        const Mat proj = kron_mat(dual_span_projector(e1), dual_span_projector(e2));
        const double dense = max_abs(eswap * proj - proj * eswap);
        const double bound = mixed_encoding_commutator_bound(e1, e2, theta);
        add(suite, "dense commutator at d=3 under the same threshold", dense,
            1e-8 + 10.0 * std::exp(-8.0));
        add_flag(suite, "factorized bound dominates the dense norm", bound + 1e-14 >= dense,
                 "bound " + std::to_string(bound) + ", dense " + std::to_string(dense));
    });
}

CheckSuite criterion_dfs() {
    return timed_suite("criterion-9 end-to-end decoherence-free execution",
                       [](CheckSuite& suite) {
        const double epsilon = 0.2;
        const std::vector<std::pair<std::string, EncodingSpec>> encodings{
            {"fock", EncodingSpec::fock(4)},
            {"coherent", EncodingSpec::coherent(1.2, 6)},
            {"cat", EncodingSpec::cat(1.2, 6)},
            {"gkp", EncodingSpec::gkp(0.6, 6)},
        };
        for (const auto& [name, spec] : encodings) {
            const double dev_phase =
                dfs_deviation(spec, NoiseSpec::number_phase(0.9), epsilon);
            const double dev_random =
                dfs_deviation(spec, NoiseSpec::random_hermitian(0.35, 21), epsilon);
            add(suite, "collective exp(i 0.9 n) leaves probabilities unchanged [" + name + "]",
                dev_phase, 1e-8);
            add(suite, "collective random-hermitian unitary leaves probabilities unchanged [" +
                           name + "]",
                dev_random, 1e-8);
        }
    });
}

CheckSuite criterion_compiler_equivalence() {
    return timed_suite("criterion-10 compiler equivalence", [](CheckSuite& suite) {
        std::mt19937_64 rng(61);
        double margin = -1.0;
        int dual_count = 0, quad_count = 0;
        for (int trial = 0; trial < 25; ++trial) {
            const Scheme scheme = trial % 2 == 0 ? Scheme::Dual : Scheme::Quad;
            (scheme == Scheme::Dual ? dual_count : quad_count)++;
            const LogicalCircuit circuit = random_native_circuit(scheme, rng);
            const OracleComparison cmp = compare_with_oracle(circuit);
            margin = std::max(margin, cmp.deviation - cmp.tolerance);
        }
        add(suite, "25 random circuits match the qubit-algebra oracle", margin, 0.0,
            std::to_string(dual_count) + " dual / " + std::to_string(quad_count) +
                " quad; margin over per-circuit tolerance "
                "(1e-8, plus 3*epsilon per dual phase channel)");
    });
}

}  // namespace

CheckSuite acceptance_criterion(int n) {
    switch (n) {
        case 1: return criterion_operator_algebra();
        case 2: return criterion_gate_identities();
        case 3: return criterion_controlled_swap();
        case 4: return criterion_eswap_circuit();
        case 5: return criterion_phase_scaling();
        case 6: return criterion_swap_test_statistics();
        case 7: return criterion_quad_init();
        case 8: return criterion_mixed_encoding();
        case 9: return criterion_dfs();
        case 10: return criterion_compiler_equivalence();
        default: throw std::invalid_argument("acceptance criterion out of range");
    }
}

}  // namespace cvlab
