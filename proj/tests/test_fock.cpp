#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "cvlab/fock.hpp"

using namespace cvlab;

namespace {

Mat random_unitary(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Mat a(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) a(r, c) = Complex(g(rng), g(rng));
    Eigen::HouseholderQR<Mat> qr(a);
    Mat q = qr.householderQ();
    Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int c = 0; c < n; ++c) q.col(c) *= r(c, c) / std::abs(r(c, c));
    return q;
}

Vec random_ket(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Vec v(n);
    for (int r = 0; r < n; ++r) v(r) = Complex(g(rng), g(rng));
    return v / v.norm();
}

}  // namespace

TEST_CASE("mode system strides are row-major with slot 0 slowest") {
    const ModeSystem sys({3, 4, 2}, {SubsystemRole::Mode, SubsystemRole::Mode,
                                     SubsystemRole::AncillaQubit});
    CHECK(sys.total_dimension() == 24);
    CHECK(sys.stride(0) == 8);
    CHECK(sys.stride(1) == 2);
    CHECK(sys.stride(2) == 1);
    CHECK(sys.role(2) == SubsystemRole::AncillaQubit);

    const ModeSystem grown = sys.appended(5, SubsystemRole::Mode);
    CHECK(grown.total_dimension() == 120);
    CHECK(grown.stride(3) == 1);
    CHECK(grown.stride(0) == 40);

    const std::vector<int> keep{2, 0};
    const ModeSystem sub = sys.subset(keep);
    CHECK(sub.dims() == std::vector<int>{2, 3});
}

TEST_CASE("swap operator is hermitian, unitary and involutory") {
    for (int d : {2, 3, 5}) {
        const LocalOperator s = swap_operator(d);
        const auto n = static_cast<Eigen::Index>(s.dimension());
        CHECK((s.matrix - s.matrix.adjoint()).cwiseAbs().maxCoeff() == 0.0);
        CHECK((s.matrix * s.matrix - Mat::Identity(n, n)).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("apply_local agrees with the dense kron oracle") {
    std::mt19937_64 rng(7);
    const ModeSystem sys({3, 2, 3}, {SubsystemRole::Mode, SubsystemRole::Mode,
                                     SubsystemRole::Mode});
    StateVector psi{sys, random_ket(18, rng)};

    // Operator on slots (2, 0): oracle permutes to slot order and krons.
    const Mat u = random_unitary(9, rng);
    const LocalOperator op{{3, 3}, u};
    const std::vector<int> slots{2, 0};
    const StateVector got = apply_local(psi, op, slots);

    Vec expect = Vec::Zero(18);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 3; ++c) {
                const int row = a * 6 + b * 3 + c;
                for (int ap = 0; ap < 3; ++ap)
                    for (int cp = 0; cp < 3; ++cp)
                        expect(row) += u(c * 3 + a, cp * 3 + ap) *
                                       psi.amplitudes(ap * 6 + b * 3 + cp);
            }
    CHECK((got.amplitudes - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("density apply matches pure-state apply") {
    std::mt19937_64 rng(11);
    const ModeSystem sys = ModeSystem::modes(2, 3);
    StateVector psi{sys, random_ket(9, rng)};
    const Mat u = random_unitary(3, rng);
    const LocalOperator op{{3}, u};
    const std::vector<int> slot{1};

    DensityMatrix rho = to_density(psi);
    apply_local_inplace(rho, op, slot);
    const DensityMatrix expect = to_density(apply_local(psi, op, slot));
    CHECK((rho.matrix - expect.matrix).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("partial trace of a product state recovers the factors") {
    std::mt19937_64 rng(13);
    const ModeSystem sys = ModeSystem::modes(3, 3);
    const Vec a = random_ket(3, rng), b = random_ket(3, rng), c = random_ket(3, rng);
    const StateVector psi = product_state(sys, {a, b, c});

    const std::vector<int> keep{1};
    const DensityMatrix red = partial_trace(to_density(psi), keep);
    CHECK((red.matrix - b * b.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(red.trace_real() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("trace distance separates orthogonal states and vanishes on equals") {
    const ModeSystem sys = ModeSystem::modes(1, 4);
    const StateVector zero{sys, fock_ket(4, 0)};
    const StateVector two{sys, fock_ket(4, 2)};
    CHECK(trace_distance(to_density(zero), to_density(two)) == doctest::Approx(1.0));
    CHECK(trace_distance(to_density(zero), to_density(zero)) < 1e-12);
}

TEST_CASE("matrix exponential of the swap matches the closed form") {
    const int d = 4;
    const LocalOperator s = swap_operator(d);
    const double theta = 0.83;
    const LocalOperator expm = matrix_exponential(s, Complex(0, theta));
    const Mat closed = std::cos(theta) * Mat::Identity(16, 16) +
                       Complex(0, std::sin(theta)) * s.matrix;
    CHECK((expm.matrix - closed).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("dimension cap rejects oversized registers") {
    const std::size_t saved = dimension_cap();
    set_dimension_cap(100);
    CHECK_THROWS_AS(ModeSystem::modes(4, 4), dimension_cap_error);
    set_dimension_cap(saved);
    CHECK_NOTHROW(ModeSystem::modes(4, 4));
}

TEST_CASE("ladder operators satisfy the truncated commutator") {
    const int d = 6;
    const Mat a = annihilation_matrix(d).matrix;
    const Mat comm = a * a.adjoint() - a.adjoint() * a;
    // [a, a^dag] = I except the top corner, which absorbs the truncation.
    for (int n = 0; n < d - 1; ++n) CHECK(comm(n, n).real() == doctest::Approx(1.0));
    CHECK(comm(d - 1, d - 1).real() == doctest::Approx(1.0 - d));
    CHECK((number_matrix(d).matrix - a.adjoint() * a).cwiseAbs().maxCoeff() < 1e-12);
}
