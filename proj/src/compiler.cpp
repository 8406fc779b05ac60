#include "cvlab/compiler.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cvlab {

std::string to_string(GateKind kind) {
    switch (kind) {
        case GateKind::Rx: return "rx";
        case GateKind::Rz: return "rz";
        case GateKind::XX: return "xx";
        case GateKind::ZZ: return "zz";
        case GateKind::U3: return "u3";
        case GateKind::Measure: return "measure";
    }
    return "?";
}

namespace {

GateKind gate_kind_from_string(const std::string& name) {
    if (name == "rx") return GateKind::Rx;
    if (name == "rz") return GateKind::Rz;
    if (name == "xx") return GateKind::XX;
    if (name == "zz") return GateKind::ZZ;
    if (name == "u3") return GateKind::U3;
    if (name == "measure") return GateKind::Measure;
    throw std::invalid_argument("unknown gate kind: " + name);
}

int gate_arity(GateKind kind) {
    return (kind == GateKind::XX || kind == GateKind::ZZ) ? 2 : 1;
}

}  // namespace

void LogicalCircuit::validate() const {
    layout().validate();
    for (const auto& gate : gates) {
        if (static_cast<int>(gate.qubits.size()) != gate_arity(gate.kind))
            throw std::invalid_argument("LogicalCircuit: wrong operand count for " +
                                        to_string(gate.kind));
        for (int q : gate.qubits)
            if (q < 0 || q >= num_qubits())
                throw std::invalid_argument("LogicalCircuit: qubit operand out of range");
        if (gate.qubits.size() == 2 && gate.qubits[0] == gate.qubits[1])
            throw std::invalid_argument("LogicalCircuit: operands must be distinct");
        if (!std::isfinite(gate.theta))
            throw std::invalid_argument("LogicalCircuit: non-finite angle");
        if (gate.kind == GateKind::U3 && !is_unitary(gate.matrix))
            throw std::invalid_argument("LogicalCircuit: u3 matrix is not unitary");
    }
    if (!(epsilon > 0.0 && epsilon <= 0.5))
        throw std::invalid_argument("LogicalCircuit: epsilon must be in (0, 0.5]");
}

nlohmann::json LogicalCircuit::to_json() const {
    nlohmann::json j;
    j["scheme"] = to_string(scheme);
    j["qubits"] = num_qubits();
    j["encodings"] = nlohmann::json::array();
    for (const auto& spec : encodings) j["encodings"].push_back(spec.to_json());
    j["epsilon"] = epsilon;
    j["gates"] = nlohmann::json::array();
    for (const auto& gate : gates) {
        nlohmann::json g;
        g["kind"] = to_string(gate.kind);
        g["q"] = gate.qubits;
        if (gate.kind != GateKind::Measure && gate.kind != GateKind::U3)
            g["theta"] = gate.theta;
        if (gate.kind == GateKind::U3) {
            g["matrix"] = nlohmann::json::array();
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c)
                    g["matrix"].push_back({gate.matrix(r, c).real(), gate.matrix(r, c).imag()});
        }
        j["gates"].push_back(std::move(g));
    }
    return j;
}

LogicalCircuit LogicalCircuit::from_json(const nlohmann::json& j) {
    LogicalCircuit circuit;
    circuit.scheme = scheme_from_string(j.at("scheme").get<std::string>());
    const int n = j.at("qubits").get<int>();
    if (j.contains("encodings")) {
        for (const auto& e : j.at("encodings"))
            circuit.encodings.push_back(EncodingSpec::from_json(e));
    } else {
        circuit.encodings.assign(static_cast<std::size_t>(n), EncodingSpec::fock());
    }
    if (static_cast<int>(circuit.encodings.size()) != n)
        throw std::invalid_argument("LogicalCircuit: encodings count does not match qubits");
    circuit.epsilon = j.value("epsilon", 0.01);
    for (const auto& g : j.at("gates")) {
        LogicalGate gate;
        gate.kind = gate_kind_from_string(g.at("kind").get<std::string>());
        gate.qubits = g.at("q").get<std::vector<int>>();
        if (gate.kind == GateKind::U3) {
            const auto& m = g.at("matrix");
            if (m.size() != 4) throw std::invalid_argument("u3 matrix must have 4 entries");
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c)
                    gate.matrix(r, c) = Complex(m.at(2 * r + c).at(0).get<double>(),
                                                m.at(2 * r + c).at(1).get<double>());
        } else if (gate.kind != GateKind::Measure) {
            gate.theta = g.at("theta").get<double>();
        }
        circuit.gates.push_back(std::move(gate));
    }
    circuit.validate();
    return circuit;
}

namespace {

/// Reduce an angle modulo pi into (-pi/2, pi/2]; the dropped multiples of
/// pi only contribute a global phase for exp(i theta X/Z).
double reduce_angle(double angle) {
    double a = std::remainder(angle, std::numbers::pi);
    if (a <= -std::numbers::pi / 2.0) a += std::numbers::pi;
    return a;
}

constexpr double kAngleEps = 1e-12;

}  // namespace

std::vector<LogicalGate> synthesize_single_qubit(const Eigen::Matrix2cd& u, int qubit) {
    if (!is_unitary(u)) throw std::invalid_argument("synthesize_single_qubit: not unitary");
    const Complex det = u(0, 0) * u(1, 1) - u(0, 1) * u(1, 0);
    const Eigen::Matrix2cd v = u / std::sqrt(det);

    const double mag00 = std::abs(v(0, 0));
    const double mag01 = std::abs(v(0, 1));
    const double b = std::atan2(mag01, mag00);
    double a = 0.0, c = 0.0;
    if (mag01 < 1e-14) {
        a = std::arg(v(0, 0));
        c = 0.0;
    } else if (mag00 < 1e-14) {
        a = (std::arg(v(0, 1)) - std::numbers::pi / 2.0) / 2.0;
        c = -a;
    } else {
        const double sum = std::arg(v(0, 0));
        const double diff = std::arg(v(0, 1)) - std::numbers::pi / 2.0;
        a = (sum + diff) / 2.0;
        c = (sum - diff) / 2.0;
    }

    std::vector<LogicalGate> out;
    if (const double rc = reduce_angle(c); std::abs(rc) > kAngleEps)
        out.push_back(LogicalGate::rz(rc, qubit));
    if (const double rb = reduce_angle(b); std::abs(rb) > kAngleEps)
        out.push_back(LogicalGate::rx(rb, qubit));
    if (const double ra = reduce_angle(a); std::abs(ra) > kAngleEps)
        out.push_back(LogicalGate::rz(ra, qubit));
    return out;
}

namespace {

Eigen::Matrix2cd hadamard() {
    Eigen::Matrix2cd h;
    h << 1.0, 1.0, 1.0, -1.0;
    return h / std::numbers::sqrt2;
}

struct Lowering {
    const LogicalCircuit& circuit;
    bool strict;
    PhysicalProgram& program;

    void emit_eswap2(double theta, int i, int j) {
        if (std::abs(theta) < kAngleEps) return;
        PhysicalOp op;
        op.kind = PhysicalOp::Kind::Eswap2;
        op.theta = theta;
        op.modes = {i, j, -1, -1};
        program.ops.push_back(op);
    }

    void emit_eswap4(double theta, int i, int j, int k, int l) {
        if (std::abs(theta) < kAngleEps) return;
        PhysicalOp op;
        op.kind = PhysicalOp::Kind::Eswap4;
        op.theta = theta;
        op.modes = {i, j, k, l};
        program.ops.push_back(op);
    }

    void lower(const LogicalGate& gate) {
        const Scheme scheme = circuit.scheme;
        switch (gate.kind) {
            case GateKind::Rx: {
                const int q = gate.qubits[0];
                if (scheme == Scheme::Dual) {
                    emit_eswap2(gate.theta, 2 * q, 2 * q + 1);
                } else {
                    emit_eswap4(gate.theta, 4 * q, 4 * q + 2, 4 * q + 1, 4 * q + 3);
                }
                return;
            }
            case GateKind::Rz: {
                const int q = gate.qubits[0];
                if (scheme == Scheme::Quad) {
                    emit_eswap2(gate.theta, 4 * q, 4 * q + 1);
                    return;
                }
                if (std::abs(gate.theta) < kAngleEps) return;
                PhysicalOp op;
                op.kind = PhysicalOp::Kind::PhaseChannel;
                op.theta = gate.theta;
                op.epsilon = circuit.epsilon;
                op.qubit = q;
                op.modes = {2 * q, 2 * q + 1, -1, -1};
                program.ops.push_back(op);
                program.phase_gate_reps += dual_phase_steps(gate.theta, circuit.epsilon);
                return;
            }
            case GateKind::XX: {
                const int q0 = gate.qubits[0], q1 = gate.qubits[1];
                if (scheme == Scheme::Dual) {
                    emit_eswap4(gate.theta, 2 * q0, 2 * q0 + 1, 2 * q1, 2 * q1 + 1);
                    return;
                }
                if (strict)
                    throw unsupported_gate_error("xx has no coherent native lowering on quad; "
                                                 "disable strict mode to auto-synthesize");
                conjugate_by_hadamard(LogicalGate::zz(gate.theta, q0, q1));
                return;
            }
            case GateKind::ZZ: {
                const int q0 = gate.qubits[0], q1 = gate.qubits[1];
                if (scheme == Scheme::Quad) {
                    emit_eswap4(gate.theta, 4 * q0, 4 * q0 + 1, 4 * q1, 4 * q1 + 1);
                    return;
                }
                if (strict)
                    throw unsupported_gate_error("zz has no coherent native lowering on dual; "
                                                 "disable strict mode to auto-synthesize");
                conjugate_by_hadamard(LogicalGate::xx(gate.theta, q0, q1));
                return;
            }
            case GateKind::U3: {
                for (const auto& native : synthesize_single_qubit(gate.matrix, gate.qubits[0]))
                    lower(native);
                return;
            }
            case GateKind::Measure: {
                const int q = gate.qubits[0];
                if (scheme == Scheme::Dual) {
                    // Z-basis IR semantics; the native swap-test reads X.
                    for (const auto& native : synthesize_single_qubit(hadamard(), q))
                        lower(native);
                }
                PhysicalOp op;
                op.kind = PhysicalOp::Kind::SwapTest;
                op.qubit = q;
                const int base = scheme == Scheme::Dual ? 2 * q : 4 * q;
                op.modes = {base, base + 1, -1, -1};
                op.record_slot = program.num_records++;
                program.ops.push_back(op);
                return;
            }
        }
    }

    void conjugate_by_hadamard(const LogicalGate& inner) {
        for (int q : inner.qubits)
            for (const auto& native : synthesize_single_qubit(hadamard(), q)) lower(native);
        lower(inner);
        for (int q : inner.qubits)
            for (const auto& native : synthesize_single_qubit(hadamard(), q)) lower(native);
    }
};

}  // namespace

bool PhysicalProgram::needs_density_path() const {
    return std::any_of(ops.begin(), ops.end(), [](const PhysicalOp& op) {
        return op.kind == PhysicalOp::Kind::PhaseChannel;
    });
}

PhysicalProgram compile(const LogicalCircuit& circuit, bool strict) {
    circuit.validate();
    PhysicalProgram program;
    program.layout = circuit.layout();
    program.epsilon = circuit.epsilon;

    for (int q = 0; q < circuit.num_qubits(); ++q) {
        const int base = q * program.layout.modes_per_qubit();
        const int pairs = circuit.scheme == Scheme::Dual ? 1 : 2;
        for (int p = 0; p < pairs; ++p)
            for (int which = 0; which < 2; ++which) {
                PhysicalOp op;
                op.kind = PhysicalOp::Kind::PrepareBasis;
                op.modes = {base + 2 * p + which, -1, -1, -1};
                op.which = which;
                op.qubit = q;
                program.ops.push_back(op);
            }
    }
    if (circuit.scheme == Scheme::Quad) {
        for (int q = 0; q < circuit.num_qubits(); ++q) {
            const int base = q * 4;
            for (int p = 0; p < 2; ++p) {
                PhysicalOp op;
                op.kind = PhysicalOp::Kind::SwapTest;
                op.qubit = q;
                op.init_role = true;
                op.modes = {base + 2 * p, base + 2 * p + 1, -1, -1};
                program.ops.push_back(op);
            }
        }
    }

    Lowering lowering{circuit, strict, program};
    for (const auto& gate : circuit.gates) lowering.lower(gate);
    program.ancilla_mode_budget = program.phase_gate_reps;
    return program;
}

namespace {

struct Branch {
    double weight = 1.0;
    StateVector sv;
    DensityMatrix dm;
    std::string outcomes;
};

class Executor {
  public:
    Executor(const PhysicalProgram& program, bool stop_before_measurement)
        : program_(program),
          density_(program.needs_density_path()),
          stop_before_measurement_(stop_before_measurement) {}

    void run() {
        build_initial_state();
        std::size_t i = first_gate_index_;
        bool noise_after_pending =
            program_.noise.enabled && program_.noise_point == NoisePoint::AfterProgram;
        while (i < program_.ops.size()) {
            const PhysicalOp& op = program_.ops[i];
            if (op.kind == PhysicalOp::Kind::SwapTest && op.init_role) {
                process_init_pair(i);
                i += 2;
                continue;
            }
            if (op.kind == PhysicalOp::Kind::SwapTest) {
                if (noise_after_pending) {
                    apply_noise_layer();
                    noise_after_pending = false;
                }
                if (stop_before_measurement_) return;
                process_measurement(op);
                ++i;
                continue;
            }
            apply_unitary_or_channel(op);
            ++i;
        }
        if (noise_after_pending) apply_noise_layer();
    }

    std::map<std::string, double> distribution() const {
        std::map<std::string, double> dist;
        for (const auto& b : branches_) dist[b.outcomes] += b.weight;
        return dist;
    }

    const std::vector<Branch>& branches() const { return branches_; }

  private:
    void build_initial_state() {
        const ModeSystem sys = program_.layout.system();
        std::vector<Vec> kets(static_cast<std::size_t>(sys.num_subsystems()));
        const bool noise_before =
            program_.noise.enabled && program_.noise_point == NoisePoint::BeforeProgram;
        if (noise_before) noise_u_ = program_.noise.unitary(program_.layout.truncation());

        std::size_t i = 0;
        for (; i < program_.ops.size(); ++i) {
            const PhysicalOp& op = program_.ops[i];
            if (op.kind != PhysicalOp::Kind::PrepareBasis) break;
            const EncodingSpec& spec =
                program_.layout.encodings.at(static_cast<std::size_t>(op.qubit));
            auto [ket0, ket1] = basis_states(spec);
            Vec ket = op.which == 0 ? ket0.amplitudes : ket1.amplitudes;
            if (noise_u_) ket = (*noise_u_) * ket;
            kets.at(static_cast<std::size_t>(op.modes[0])) = std::move(ket);
        }
        first_gate_index_ = i;
        for (const auto& ket : kets)
            if (ket.size() == 0)
                throw std::invalid_argument("execute: program leaves a mode unprepared");

        Branch branch;
        branch.sv = product_state(sys, kets);
        if (density_) {
            branch.dm = to_density(branch.sv);
            branch.sv.amplitudes.resize(0);
        }
        branches_.push_back(std::move(branch));
    }

    void apply_noise_layer() {
        const Mat u = program_.noise.unitary(program_.layout.truncation());
        for (auto& b : branches_) {
            if (density_) {
                LocalOperator op{{program_.layout.truncation()}, u};
                for (int s = 0; s < b.dm.system.num_subsystems(); ++s) {
                    const int slots[1] = {s};
                    apply_local_inplace(b.dm, op, slots);
                }
            } else {
                b.sv = apply_collective_noise(b.sv, u);
            }
        }
    }

    void apply_unitary_or_channel(const PhysicalOp& op) {
        switch (op.kind) {
            case PhysicalOp::Kind::Eswap2:
                for (auto& b : branches_) {
                    if (density_) eswap2_inplace(b.dm, op.theta, op.modes[0], op.modes[1]);
                    else eswap2_inplace(b.sv, op.theta, op.modes[0], op.modes[1]);
                }
                return;
            case PhysicalOp::Kind::Eswap4:
                for (auto& b : branches_) {
                    if (density_)
                        eswap4_inplace(b.dm, op.theta, op.modes[0], op.modes[1], op.modes[2],
                                       op.modes[3]);
                    else
                        eswap4_inplace(b.sv, op.theta, op.modes[0], op.modes[1], op.modes[2],
                                       op.modes[3]);
                }
                return;
            case PhysicalOp::Kind::PhaseChannel:
                apply_phase_channel(op);
                return;
            case PhysicalOp::Kind::NoiseLayer:
                apply_noise_layer();
                return;
            default:
                throw std::logic_error("executor: unexpected op");
        }
    }

    void apply_phase_channel(const PhysicalOp& op) {
        const EncodingSpec& spec =
            program_.layout.encodings.at(static_cast<std::size_t>(op.qubit));
        const int d = spec.truncation;
        auto [ket0, ket1] = basis_states(spec);
        Vec ancilla = ket0.amplitudes;
        if (noise_u_) ancilla = (*noise_u_) * ancilla;
        const Mat anc_rho = ancilla * ancilla.adjoint();

        const int steps = dual_phase_steps(op.theta, op.epsilon);
        const double base_angle = op.epsilon * op.theta;
        const int target_mode = op.modes[1];  // second mode of the qubit

        for (auto& b : branches_) {
            const ModeSystem& sys = b.dm.system;
            const std::size_t st = sys.stride(target_mode);
            // Offsets of all index combinations with the target digit zeroed.
            std::vector<std::size_t> bases{0};
            for (int s = 0; s < sys.num_subsystems(); ++s) {
                if (s == target_mode) continue;
                std::vector<std::size_t> next;
                next.reserve(bases.size() * static_cast<std::size_t>(sys.dim(s)));
                for (std::size_t base : bases)
                    for (int k = 0; k < sys.dim(s); ++k)
                        next.push_back(base + static_cast<std::size_t>(k) * sys.stride(s));
                bases = std::move(next);
            }

            // One step is rho -> Tr_anc[e^{-iaS}(rho (x) sigma)e^{iaS}] with S
            // swapping the target mode and the ancilla.  In the target-digit
            // block decomposition this never leaves register size:
            // B' = c^2 B + s^2 tr(B) sigma + i s c (B sigma - sigma B).
            Mat block(d, d), upd(d, d);
            for (int step = 0; step < steps; ++step) {
                const double angle = (step == steps - 1)
                                         ? 2.0 * op.theta - base_angle * (steps - 1)
                                         : base_angle;
                const double c = std::cos(angle), s = std::sin(angle);
                const Complex isc(0.0, s * c);
                for (std::size_t bx : bases)
                    for (std::size_t by : bases) {
                        for (int a = 0; a < d; ++a)
                            for (int bcol = 0; bcol < d; ++bcol)
                                block(a, bcol) = b.dm.matrix(
                                    static_cast<Eigen::Index>(bx + static_cast<std::size_t>(a) * st),
                                    static_cast<Eigen::Index>(by + static_cast<std::size_t>(bcol) * st));
                        upd = c * c * block + (s * s) * block.trace() * anc_rho +
                              isc * (block * anc_rho - anc_rho * block);
                        for (int a = 0; a < d; ++a)
                            for (int bcol = 0; bcol < d; ++bcol)
                                b.dm.matrix(
                                    static_cast<Eigen::Index>(bx + static_cast<std::size_t>(a) * st),
                                    static_cast<Eigen::Index>(by + static_cast<std::size_t>(bcol) * st)) =
                                    upd(a, bcol);
                    }
            }
        }
    }

    struct DmSplit {
        double p_plus, p_minus;
        std::optional<DensityMatrix> plus, minus;
    };

    /// m . S: the swap permutes the columns; each row transforms like a ket.
    static Mat right_swapped(const Mat& m, const ModeSystem& sys, int i, int j) {
        Mat out(m.rows(), m.cols());
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            StateVector row{sys, m.row(r).transpose()};
            apply_mode_swap(row, i, j);
            out.row(r) = row.amplitudes.transpose();
        }
        return out;
    }

    DmSplit split_dm(const DensityMatrix& rho, int i, int j) {
        // P_pm rho P_pm with P_pm = (I +- S)/2 expands to
        // (rho + S rho S +- S rho +- rho S)/4.
        DensityMatrix conj = rho;
        apply_mode_swap(conj, i, j);  // S rho S
        const Mat rho_s = right_swapped(rho.matrix, rho.system, i, j);
        const Mat s_rho = right_swapped(conj.matrix, rho.system, i, j);  // (S rho S) S
        const Mat even = 0.25 * (rho.matrix + conj.matrix);
        const Mat odd = 0.25 * (s_rho + rho_s);
        Mat plus = even + odd;
        Mat minus = even - odd;
        DmSplit out;
        out.p_plus = std::max(0.0, plus.trace().real());
        out.p_minus = std::max(0.0, minus.trace().real());
        if (out.p_plus > 1e-14) out.plus = DensityMatrix{rho.system, plus / out.p_plus};
        if (out.p_minus > 1e-14) out.minus = DensityMatrix{rho.system, minus / out.p_minus};
        return out;
    }

    void process_measurement(const PhysicalOp& op) {
        std::vector<Branch> next;
        for (auto& b : branches_) {
            if (density_) {
                DmSplit split = split_dm(b.dm, op.modes[0], op.modes[1]);
                if (split.plus) {
                    Branch nb;
                    nb.weight = b.weight * split.p_plus;
                    nb.dm = std::move(*split.plus);
                    nb.outcomes = b.outcomes + '0';
                    if (nb.weight > 1e-15) next.push_back(std::move(nb));
                }
                if (split.minus) {
                    Branch nb;
                    nb.weight = b.weight * split.p_minus;
                    nb.dm = std::move(*split.minus);
                    nb.outcomes = b.outcomes + '1';
                    if (nb.weight > 1e-15) next.push_back(std::move(nb));
                }
            } else {
                SwapTestBranches split = swap_test_branches(b.sv, op.modes[0], op.modes[1]);
                if (split.plus) {
                    Branch nb;
                    nb.weight = b.weight * split.p_plus;
                    nb.sv = std::move(*split.plus);
                    nb.outcomes = b.outcomes + '0';
                    if (nb.weight > 1e-15) next.push_back(std::move(nb));
                }
                if (split.minus) {
                    Branch nb;
                    nb.weight = b.weight * split.p_minus;
                    nb.sv = std::move(*split.minus);
                    nb.outcomes = b.outcomes + '1';
                    if (nb.weight > 1e-15) next.push_back(std::move(nb));
                }
            }
        }
        branches_ = std::move(next);
    }

    /// Two consecutive init swap-tests of one quad qubit: keep (+,-) as is,
    /// correct (-,+) by the X_Q mode swaps, discard same-sign outcomes and
    /// renormalize (retry-until-success semantics).
    void process_init_pair(std::size_t index) {
        const PhysicalOp& first = program_.ops[index];
        if (index + 1 >= program_.ops.size() ||
            !program_.ops[index + 1].init_role ||
            program_.ops[index + 1].qubit != first.qubit)
            throw std::logic_error("executor: init swap-tests must come in per-qubit pairs");
        const PhysicalOp& second = program_.ops[index + 1];

        std::vector<Branch> next;
        for (auto& b : branches_) {
            if (density_) throw std::logic_error("executor: quad init on the density path");
            SwapTestBranches s1 = swap_test_branches(b.sv, first.modes[0], first.modes[1]);
            for (int o1 = 0; o1 < 2; ++o1) {
                const auto& c1 = o1 == 0 ? s1.plus : s1.minus;
                const double p1 = o1 == 0 ? s1.p_plus : s1.p_minus;
                if (!c1) continue;
                SwapTestBranches s2 = swap_test_branches(*c1, second.modes[0], second.modes[1]);
                for (int o2 = 0; o2 < 2; ++o2) {
                    if (o1 == o2) continue;  // discarded, re-prepared on retry
                    const auto& c2 = o2 == 0 ? s2.plus : s2.minus;
                    const double p2 = o2 == 0 ? s2.p_plus : s2.p_minus;
                    if (!c2) continue;
                    Branch nb;
                    nb.weight = b.weight * p1 * p2;
                    nb.sv = *c2;
                    nb.outcomes = b.outcomes;
                    if (o1 == 1) {  // (-,+): swap the two pairs to form |+_D -_D>
                        apply_mode_swap(nb.sv, first.modes[0], second.modes[0]);
                        apply_mode_swap(nb.sv, first.modes[1], second.modes[1]);
                    }
                    if (nb.weight > 1e-15) next.push_back(std::move(nb));
                }
            }
        }
        // Renormalize the surviving weight and merge identical branches.
        double total = 0.0;
        for (const auto& b : next) total += b.weight;
        if (total <= 0.0) throw std::logic_error("executor: quad init produced no valid branch");
        init_yield_ *= total;
        std::vector<Branch> merged;
        for (auto& b : next) {
            b.weight /= total;
            bool absorbed = false;
            for (auto& m : merged) {
                if (m.outcomes != b.outcomes) continue;
                if ((m.sv.amplitudes - b.sv.amplitudes).norm() < 1e-9) {
                    m.weight += b.weight;
                    absorbed = true;
                    break;
                }
            }
            if (!absorbed) merged.push_back(std::move(b));
        }
        branches_ = std::move(merged);
    }

    const PhysicalProgram& program_;
    bool density_;
    bool stop_before_measurement_;
    std::vector<Branch> branches_;
    std::optional<Mat> noise_u_;
    std::size_t first_gate_index_ = 0;
    double init_yield_ = 1.0;
};

}  // namespace

std::map<std::string, double> execute_distribution(const PhysicalProgram& program) {
    Executor exec(program, false);
    exec.run();
    return exec.distribution();
}

ShotResults execute(const PhysicalProgram& program, int shots, std::uint64_t seed) {
    const auto dist = execute_distribution(program);
    ShotResults results;
    results.shots = shots;
    results.seed = seed;
    results.phase_gate_reps = program.phase_gate_reps;

    std::vector<std::pair<std::string, double>> cumulative(dist.begin(), dist.end());
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int s = 0; s < shots; ++s) {
        double u = unit(rng);
        const std::string* chosen = &cumulative.back().first;
        for (const auto& [key, p] : cumulative) {
            if (u < p) {
                chosen = &key;
                break;
            }
            u -= p;
        }
        ++results.counts[*chosen];
    }
    for (const auto& [key, count] : results.counts)
        results.frequencies[key] = static_cast<double>(count) / static_cast<double>(shots);
    return results;
}

nlohmann::json ShotResults::to_json() const {
    nlohmann::json j;
    j["frequencies"] = nlohmann::json::object();
    for (const auto& [key, f] : frequencies) j["frequencies"][key] = f;
    j["counts"] = nlohmann::json::object();
    for (const auto& [key, c] : counts) j["counts"][key] = c;
    j["shots"] = shots;
    j["seed"] = seed;
    j["phase_gate_reps"] = phase_gate_reps;
    return j;
}

std::variant<StateVector, DensityMatrix> pre_measurement_state(const PhysicalProgram& program) {
    Executor exec(program, true);
    exec.run();
    const auto& branches = exec.branches();
    if (branches.size() != 1)
        throw std::logic_error("pre_measurement_state: register state is not unique");
    if (program.needs_density_path()) return branches.front().dm;
    return branches.front().sv;
}

std::variant<Vec, Mat> extract_logical_state(const PhysicalProgram& program) {
    const LogicalBasis basis = build_logical_basis(program.layout);
    auto state = pre_measurement_state(program);
    if (std::holds_alternative<StateVector>(state)) {
        const auto& sv = std::get<StateVector>(state);
        return Vec(basis.columns.adjoint() * sv.amplitudes);
    }
    const auto& dm = std::get<DensityMatrix>(state);
    return Mat(basis.columns.adjoint() * dm.matrix * basis.columns);
}

namespace {

void apply_qubit_op(Vec& state, int num_qubits, const Mat& u, const std::vector<int>& qubits) {
    const int k = static_cast<int>(qubits.size());
    const int block = 1 << k;
    std::vector<std::size_t> strides(static_cast<std::size_t>(k));
    for (int m = 0; m < k; ++m)
        strides[static_cast<std::size_t>(m)] =
            std::size_t{1} << (num_qubits - 1 - qubits[static_cast<std::size_t>(m)]);

    std::vector<std::size_t> offsets(static_cast<std::size_t>(block));
    for (int r = 0; r < block; ++r) {
        std::size_t off = 0;
        for (int m = 0; m < k; ++m)
            if ((r >> (k - 1 - m)) & 1) off += strides[static_cast<std::size_t>(m)];
        offsets[static_cast<std::size_t>(r)] = off;
    }

    const std::size_t total = std::size_t{1} << num_qubits;
    std::vector<bool> touched(total, false);
    Vec x(block), y(block);
    for (std::size_t base = 0; base < total; ++base) {
        bool on_target = false;
        for (std::size_t s : strides)
            if (base & s) on_target = true;
        if (on_target) continue;
        for (int r = 0; r < block; ++r)
            x(r) = state(static_cast<Eigen::Index>(base + offsets[static_cast<std::size_t>(r)]));
        y.noalias() = u * x;
        for (int r = 0; r < block; ++r)
            state(static_cast<Eigen::Index>(base + offsets[static_cast<std::size_t>(r)])) = y(r);
    }
}

Mat pauli_exp(double theta, const Mat& pauli) {
    const Eigen::Index n = pauli.rows();
    return std::cos(theta) * Mat::Identity(n, n) +
           Complex(0.0, std::sin(theta)) * pauli;
}

}  // namespace

OracleResult logical_oracle(const LogicalCircuit& circuit) {
    circuit.validate();
    const int n = circuit.num_qubits();
    if (n > 10) throw std::invalid_argument("logical_oracle: too many qubits");
    Mat x(2, 2), z(2, 2);
    x << 0, 1, 1, 0;
    z << 1, 0, 0, -1;

    Vec state = Vec::Zero(Eigen::Index{1} << n);
    state(0) = 1.0;
    std::vector<int> measured;
    for (const auto& gate : circuit.gates) {
        switch (gate.kind) {
            case GateKind::Rx:
                apply_qubit_op(state, n, pauli_exp(gate.theta, x), gate.qubits);
                break;
            case GateKind::Rz:
                apply_qubit_op(state, n, pauli_exp(gate.theta, z), gate.qubits);
                break;
            case GateKind::XX: {
                Mat xx = Mat::Zero(4, 4);
                xx << 0, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0, 0;
                apply_qubit_op(state, n, pauli_exp(gate.theta, xx), gate.qubits);
                break;
            }
            case GateKind::ZZ: {
                Mat zz = Mat::Zero(4, 4);
                zz.diagonal() << 1, -1, -1, 1;
                apply_qubit_op(state, n, pauli_exp(gate.theta, zz), gate.qubits);
                break;
            }
            case GateKind::U3:
                apply_qubit_op(state, n, gate.matrix, gate.qubits);
                break;
            case GateKind::Measure:
                measured.push_back(gate.qubits[0]);
                break;
        }
    }

    OracleResult result;
    result.state = state;
    const int k = static_cast<int>(measured.size());
    for (int label = 0; label < (1 << k); ++label) {
        double p = 0.0;
        for (Eigen::Index idx = 0; idx < state.size(); ++idx) {
            bool match = true;
            for (int m = 0; m < k; ++m) {
                const int qbit =
                    static_cast<int>((idx >> (n - 1 - measured[static_cast<std::size_t>(m)])) & 1);
                if (qbit != ((label >> (k - 1 - m)) & 1)) match = false;
            }
            if (match) p += std::norm(state(idx));
        }
        if (k == 0) break;
        std::string key(static_cast<std::size_t>(k), '0');
        for (int m = 0; m < k; ++m)
            if ((label >> (k - 1 - m)) & 1) key[static_cast<std::size_t>(m)] = '1';
        result.distribution[key] = p;
    }
    if (k == 0) result.distribution[""] = 1.0;
    return result;
}

}  // namespace cvlab
