#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cvlab/logical.hpp"

using namespace cvlab;

namespace {

double state_distance(const StateVector& a, const StateVector& b) {
    // Global-phase-aligned max amplitude difference.
    Eigen::Index idx;
    a.amplitudes.cwiseAbs().maxCoeff(&idx);
    const Complex phase = b.amplitudes(idx) / a.amplitudes(idx);
    return (a.amplitudes * (phase / std::abs(phase)) - b.amplitudes).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("dual basis states are orthonormal for fock encoding") {
    const EncodingSpec spec = EncodingSpec::fock(4);
    const StateVector zero = prepare_dual(spec, 0);
    const StateVector one = prepare_dual(spec, 1);
    CHECK(zero.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(inner_product(zero, one)) < 1e-12);
}

TEST_CASE("within-pair e-swap acts as exp(i theta X) on the dual qubit") {
    const EncodingSpec spec = EncodingSpec::fock(4);
    const double theta = 0.6;
    const StateVector zero = prepare_dual(spec, 0);
    const StateVector one = prepare_dual(spec, 1);

    const StateVector rotated = eswap2(zero, theta, 0, 1);
    const Complex a0 = inner_product(zero, rotated);
    const Complex a1 = inner_product(one, rotated);
    CHECK(std::abs(a0 - std::cos(theta)) < 1e-12);
    CHECK(std::abs(a1 - Complex(0, std::sin(theta))) < 1e-12);
}

TEST_CASE("four-mode e-swap equals the product form on a quad qubit") {
    const EncodingSpec spec = EncodingSpec::fock(3);
    const StateVector zero = prepare_quad(spec, 0);
    const StateVector one = prepare_quad(spec, 1);
    // Pairing (0,2)(1,3) exchanges the two inner dual pairs: exp(i theta X_Q).
    const double theta = 0.9;
    const StateVector rotated = eswap4(zero, theta, 0, 2, 1, 3);
    CHECK(std::abs(inner_product(zero, rotated) - std::cos(theta)) < 1e-10);
    CHECK(std::abs(inner_product(one, rotated) - Complex(0, std::sin(theta))) < 1e-10);
}

TEST_CASE("density e-swap matches the pure-state path") {
    const EncodingSpec spec = EncodingSpec::fock(3);
    StateVector psi = prepare_dual(spec, 0);
    psi = eswap2(psi, 0.4, 0, 1);

    DensityMatrix rho = to_density(prepare_dual(spec, 0));
    eswap2_inplace(rho, 0.4, 0, 1);
    CHECK((rho.matrix - to_density(psi).matrix).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("swap test branches are projective and sum to identity") {
    const EncodingSpec spec = EncodingSpec::fock(4);
    const StateVector plus = prepare_dual_plusminus(spec, +1);
    const auto symmetric = swap_test_branches(plus, 0, 1);
    CHECK(symmetric.p_plus == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(symmetric.p_minus == doctest::Approx(0.0).epsilon(1e-12));

    const StateVector zero = prepare_dual(spec, 0);
    const auto mixed = swap_test_branches(zero, 0, 1);
    CHECK(mixed.p_plus == doctest::Approx(0.5).epsilon(1e-12));
    REQUIRE(mixed.plus.has_value());
    // Collapsed branches are eigenstates: re-testing them is deterministic.
    CHECK(swap_test_branches(*mixed.plus, 0, 1).p_plus == doctest::Approx(1.0));
    CHECK(swap_test_branches(*mixed.minus, 0, 1).p_minus == doctest::Approx(1.0));
}

TEST_CASE("phase channel approximates exp(i phi Z) on the dual qubit") {
    const EncodingSpec spec = EncodingSpec::fock(4);
    const double phi = std::numbers::pi / 4.0;
    const double epsilon = 0.02;

    const StateVector zero = prepare_dual(spec, 0);
    const StateVector one = prepare_dual(spec, 1);
    StateVector plus = zero;
    plus.amplitudes = (zero.amplitudes + one.amplitudes) / std::sqrt(2.0);

    const auto [out, steps] = dual_phase_gate(to_density(plus), phi, epsilon, spec);
    CHECK(steps == dual_phase_steps(phi, epsilon));
    CHECK(out.trace_real() == doctest::Approx(1.0).epsilon(1e-10));

    StateVector ideal = zero;
    ideal.amplitudes = (std::polar(1.0, phi) * zero.amplitudes +
                        std::polar(1.0, -phi) * one.amplitudes) / std::sqrt(2.0);
    CHECK(trace_distance(out, to_density(ideal)) < 3.0 * epsilon);
}

TEST_CASE("phase-channel step count follows the step size") {
    CHECK(dual_phase_steps(0.0, 0.1) == 0);
    CHECK(dual_phase_steps(0.3, 0.1) == 20);
    CHECK(dual_phase_steps(0.3, 0.01) == 200);
}

TEST_CASE("quad register initialization forms and reports its attempts") {
    const std::vector<EncodingSpec> specs(2, EncodingSpec::fock(3));
    const auto [state, report] = init_quad_register(2, specs, 42);
    CHECK(report.formed);
    CHECK(report.plus_count + report.minus_count == report.attempts);
    CHECK(report.attempts >= 4);
    CHECK(state.norm() == doctest::Approx(1.0).epsilon(1e-10));

    // First-come-first-served pairing always yields |0...0> in the quad basis.
    const StateVector expect = kron(prepare_quad(specs[0], 0), prepare_quad(specs[1], 0));
    CHECK(state_distance(expect, state) < 1e-10);
}

TEST_CASE("logical matrix of a within-pair e-swap reproduces the X rotation") {
    const LogicalLayout layout{Scheme::Dual, {EncodingSpec::fock(3), EncodingSpec::fock(3)}};
    const double theta = 0.7;
    const std::vector<int> qubits{1};
    const std::vector<int> touched{2, 3};
    const auto result = logical_matrix(layout, qubits, touched,
                                       [&](StateVector& psi,
                                           const std::unordered_map<int, int>& local) {
                                           eswap2_inplace(psi, theta, local.at(2), local.at(3));
                                       });
    Mat expect(2, 2);
    expect << std::cos(theta), Complex(0, std::sin(theta)),
        Complex(0, std::sin(theta)), std::cos(theta);
    CHECK((result.matrix - expect).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(result.leakage < 1e-10);
}

TEST_CASE("logical basis is orthonormal and well conditioned for fock") {
    const LogicalLayout layout{Scheme::Dual, {EncodingSpec::fock(3), EncodingSpec::fock(3)}};
    const LogicalBasis basis = build_logical_basis(layout);
    CHECK(basis.columns.cols() == 4);
    CHECK((basis.columns.adjoint() * basis.columns - Mat::Identity(4, 4))
              .cwiseAbs()
              .maxCoeff() < 1e-10);
    CHECK(basis.gram_condition == doctest::Approx(1.0).epsilon(1e-8));
}
