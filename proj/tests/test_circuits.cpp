#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "cvlab/circuits.hpp"
#include "cvlab/logical.hpp"

using namespace cvlab;

namespace {

StateVector random_two_mode_state(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    StateVector psi{ModeSystem::modes(2, d), Vec(d * d)};
    for (Eigen::Index i = 0; i < psi.amplitudes.size(); ++i)
        psi.amplitudes(i) = Complex(g(rng), g(rng));
    psi.normalize();
    return psi;
}

}  // namespace

TEST_CASE("beam splitter is unitary and conserves photon number") {
    for (int d : {3, 5}) {
        const LocalOperator bs = beam_splitter(0.6, d);
        CHECK(is_unitary(bs.matrix));
        // Total-photon-number blocks must not mix below the cutoff diagonal.
        for (int m = 0; m < d; ++m)
            for (int n = 0; n < d; ++n)
                for (int mp = 0; mp < d; ++mp)
                    for (int np = 0; np < d; ++np)
                        if (m + n != mp + np && m + n < d && mp + np < d)
                            CHECK(std::abs(bs.matrix(m * d + n, mp * d + np)) < 1e-12);
    }
}

TEST_CASE("composed controlled swap matches the ideal permutation") {
    for (int d : {2, 3, 4}) {
        const LocalOperator ideal = controlled_swap_ideal(d);
        const LocalOperator circuit = controlled_swap_circuit(d);
        CHECK((ideal.matrix - circuit.matrix).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("ancilla-mediated e-swap equals the closed form") {
    std::mt19937_64 rng(5);
    for (bool use_circuit : {false, true}) {
        const StateVector psi = random_two_mode_state(4, rng);
        const double theta = 0.45;
        const StateVector via = eswap_via_circuit(psi, theta, 0, 1, use_circuit);
        const StateVector direct = eswap2(psi, theta, 0, 1);
        CHECK((via.amplitudes - direct.amplitudes).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("four-mode ancilla-mediated e-swap equals the closed form") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g;
    StateVector psi{ModeSystem::modes(4, 3), Vec(81)};
    for (Eigen::Index i = 0; i < 81; ++i) psi.amplitudes(i) = Complex(g(rng), g(rng));
    psi.normalize();

    const double theta = 0.8;
    const StateVector via = eswap_via_circuit(psi, theta, 0, 1, 2, 3);
    const StateVector direct = eswap4(psi, theta, 0, 1, 2, 3);
    CHECK((via.amplitudes - direct.amplitudes).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("noise generators produce unitaries and round-trip through JSON") {
    for (const NoiseSpec& noise :
         {NoiseSpec::number_phase(0.9), NoiseSpec::random_hermitian(0.35, 21)}) {
        CHECK(noise.enabled);
        CHECK(is_unitary(noise.unitary(6)));
        const NoiseSpec back = NoiseSpec::from_json(noise.to_json());
        CHECK((back.unitary(6) - noise.unitary(6)).cwiseAbs().maxCoeff() < 1e-14);
    }
    CHECK_FALSE(NoiseSpec::none().enabled);
}

TEST_CASE("collective noise applies the same unitary to every mode") {
    std::mt19937_64 rng(3);
    const StateVector psi = random_two_mode_state(3, rng);
    const NoiseSpec noise = NoiseSpec::number_phase(0.5);
    const StateVector noisy = apply_collective_noise(psi, noise);

    const Mat u = noise.unitary(3);
    StateVector expect = psi;
    for (int m = 0; m < 2; ++m) {
        const std::vector<int> slot{m};
        apply_local_inplace(expect, LocalOperator{{3}, u}, slot);
    }
    CHECK((noisy.amplitudes - expect.amplitudes).cwiseAbs().maxCoeff() < 1e-12);
}
