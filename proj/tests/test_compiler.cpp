#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "cvlab/checks.hpp"
#include "cvlab/compiler.hpp"

using namespace cvlab;

TEST_CASE("empty circuit measures all zeros") {
    for (Scheme scheme : {Scheme::Dual, Scheme::Quad}) {
        LogicalCircuit circuit;
        circuit.scheme = scheme;
        circuit.encodings = {EncodingSpec::fock(3), EncodingSpec::fock(3)};
        circuit.gates = {LogicalGate::measure(0), LogicalGate::measure(1)};
        // Dual readout goes through approximate phase channels, so allow a
        // deviation proportional to the default step size.
        const auto dist = execute_distribution(compile(circuit));
        REQUIRE(dist.count("00") == 1);
        CHECK(dist.at("00") > 1.0 - 0.15);
    }
}

TEST_CASE("xx(pi/4) on |00> gives correlated outcomes") {
    LogicalCircuit circuit;
    circuit.scheme = Scheme::Dual;
    circuit.encodings = {EncodingSpec::fock(4), EncodingSpec::fock(4)};
    circuit.epsilon = 0.01;
    circuit.gates = {LogicalGate::xx(std::numbers::pi / 4.0, 0, 1), LogicalGate::measure(0),
                     LogicalGate::measure(1)};
    const auto dist = execute_distribution(compile(circuit));
    CHECK(std::abs(dist.at("00") - 0.5) < 0.08);
    CHECK(std::abs(dist.at("11") - 0.5) < 0.08);
    const double off = (dist.count("01") ? dist.at("01") : 0.0) +
                       (dist.count("10") ? dist.at("10") : 0.0);
    CHECK(off < 0.16);
}

TEST_CASE("single-qubit synthesis matches the oracle for haar-like unitaries") {
    Eigen::Matrix2cd h;
    h << 1, 1, 1, -1;
    h /= std::sqrt(2.0);

    LogicalCircuit circuit;
    circuit.scheme = Scheme::Quad;  // quad lowers both axes coherently
    circuit.encodings = {EncodingSpec::fock(3)};
    circuit.gates = {LogicalGate::u3(h, 0), LogicalGate::measure(0)};
    const auto dist = execute_distribution(compile(circuit));
    CHECK(dist.at("0") == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(dist.at("1") == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("strict mode rejects gates without a coherent native lowering") {
    LogicalCircuit dual;
    dual.scheme = Scheme::Dual;
    dual.encodings = {EncodingSpec::fock(3), EncodingSpec::fock(3)};
    dual.gates = {LogicalGate::zz(0.3, 0, 1)};
    CHECK_THROWS_AS(compile(dual, true), unsupported_gate_error);
    CHECK_NOTHROW(compile(dual, false));

    LogicalCircuit quad;
    quad.scheme = Scheme::Quad;
    quad.encodings = {EncodingSpec::fock(3), EncodingSpec::fock(3)};
    quad.gates = {LogicalGate::xx(0.3, 0, 1)};
    CHECK_THROWS_AS(compile(quad, true), unsupported_gate_error);
}

TEST_CASE("circuit JSON round trip preserves the program") {
    LogicalCircuit circuit;
    circuit.scheme = Scheme::Dual;
    circuit.encodings = {EncodingSpec::fock(14), EncodingSpec::coherent(2.0, 14)};
    circuit.epsilon = 0.02;
    Eigen::Matrix2cd u;
    u << Complex(0, 1), 0, 0, Complex(0, -1);
    circuit.gates = {LogicalGate::rx(0.3, 0), LogicalGate::u3(u, 1),
                     LogicalGate::xx(0.5, 0, 1), LogicalGate::measure(0)};

    const LogicalCircuit back = LogicalCircuit::from_json(circuit.to_json());
    CHECK(back.scheme == circuit.scheme);
    CHECK(back.encodings == circuit.encodings);
    CHECK(back.epsilon == circuit.epsilon);
    REQUIRE(back.gates.size() == circuit.gates.size());
    for (std::size_t i = 0; i < back.gates.size(); ++i) {
        CHECK(back.gates[i].kind == circuit.gates[i].kind);
        CHECK(back.gates[i].qubits == circuit.gates[i].qubits);
        CHECK(back.gates[i].theta == circuit.gates[i].theta);
    }
    CHECK((back.gates[1].matrix - u).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("malformed circuits are rejected with diagnostics") {
    nlohmann::json j;
    j["scheme"] = "dual";
    j["qubits"] = 2;
    j["gates"] = {{{"kind", "xx"}, {"q", {0, 0}}, {"theta", 0.5}}};
    CHECK_THROWS_AS(LogicalCircuit::from_json(j), std::invalid_argument);

    j["gates"] = {{{"kind", "nope"}, {"q", {0}}, {"theta", 0.5}}};
    CHECK_THROWS_AS(LogicalCircuit::from_json(j), std::invalid_argument);
}

TEST_CASE("sampling is deterministic for a fixed seed") {
    LogicalCircuit circuit;
    circuit.scheme = Scheme::Dual;
    circuit.encodings = {EncodingSpec::fock(3)};
    circuit.gates = {LogicalGate::rx(0.6, 0), LogicalGate::measure(0)};
    const PhysicalProgram program = compile(circuit);
    const ShotResults a = execute(program, 500, 99);
    const ShotResults b = execute(program, 500, 99);
    CHECK(a.to_json() == b.to_json());
    int total = 0;
    for (const auto& [key, c] : a.counts) total += static_cast<int>(c);
    CHECK(total == 500);
}

TEST_CASE("compiled random circuits match the qubit-algebra oracle") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 4; ++trial) {
        const Scheme scheme = trial % 2 == 0 ? Scheme::Dual : Scheme::Quad;
        const LogicalCircuit circuit = random_native_circuit(scheme, rng);
        const OracleComparison cmp = compare_with_oracle(circuit);
        CHECK(cmp.deviation <= cmp.tolerance);
    }
}

TEST_CASE("phase-channel resource accounting is reported") {
    LogicalCircuit circuit;
    circuit.scheme = Scheme::Dual;
    circuit.encodings = {EncodingSpec::fock(3)};
    circuit.epsilon = 0.05;
    circuit.gates = {LogicalGate::rz(0.7, 0)};
    const PhysicalProgram program = compile(circuit);
    CHECK(program.phase_gate_reps == dual_phase_steps(0.7, 0.05));
    CHECK(program.ancilla_mode_budget >= program.phase_gate_reps);
}
