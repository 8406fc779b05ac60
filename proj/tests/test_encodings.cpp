#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cvlab/encodings.hpp"

using namespace cvlab;

TEST_CASE("fock encoding is exactly orthonormal") {
    const auto [zero, one] = basis_states(EncodingSpec::fock(4));
    CHECK(zero.norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(one.norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(overlap(EncodingSpec::fock(4))) == 0.0);
    CHECK(std::abs(zero.amplitudes(0)) == doctest::Approx(1.0));
    CHECK(std::abs(one.amplitudes(1)) == doctest::Approx(1.0));
}

TEST_CASE("coherent overlap matches exp(-2|alpha|^2)") {
    // Large truncation so the finite-cutoff correction is negligible.
    struct Case {
        double alpha;
        int d;
        double expect;
    };
    for (const auto& c : {Case{0.5, 20, std::exp(-0.5)}, Case{0.75, 20, std::exp(-1.125)},
                          Case{1.5, 30, std::exp(-4.5)}, Case{2.0, 40, std::exp(-8.0)}}) {
        const double got = std::abs(overlap(EncodingSpec::coherent(c.alpha, c.d)));
        CHECK(got == doctest::Approx(c.expect).epsilon(1e-6));
    }
}

TEST_CASE("cat overlap matches the coherent-state inner-product formula") {
    // |0_L> is the even cat along alpha, |1_L> the even cat along i*alpha.
    const double a = 1.2;
    auto coh = [](Complex x, Complex y) {
        return std::exp(-0.5 * std::norm(x) - 0.5 * std::norm(y) + std::conj(x) * y);
    };
    const Complex i(0, 1);
    const double norm2 = 2.0 * (1.0 + std::exp(-2.0 * a * a));
    const Complex expect = (coh(a, i * a) + coh(a, -i * a) + coh(-a, i * a) +
                            coh(-a, -i * a)) / norm2;
    const double got = std::abs(overlap(EncodingSpec::cat(a, 24)));
    CHECK(got == doctest::Approx(std::abs(expect)).epsilon(1e-6));
}

TEST_CASE("gkp overlap shrinks with the envelope width") {
    const double wide = std::abs(overlap(EncodingSpec::gkp(0.6, 14)));
    const double narrow = std::abs(overlap(EncodingSpec::gkp(0.35, 24)));
    CHECK(narrow < wide);
    CHECK(wide < 0.5);
}

TEST_CASE("leakage hard limit rejects truncations that clip the state") {
    CHECK_THROWS_AS(basis_states(EncodingSpec::coherent(4.0, 4)), encoding_error);
    CHECK_NOTHROW(basis_states(EncodingSpec::coherent(1.0, 12)));
}

TEST_CASE("validation verdicts follow overlap and leakage") {
    const EncodingReport pass = validate_encoding(EncodingSpec::fock(4), 1e-10);
    CHECK(pass.status == EncodingStatus::Pass);
    const EncodingReport warn = validate_encoding(EncodingSpec::coherent(0.5, 20), 1e-10);
    CHECK(warn.status == EncodingStatus::Warn);
    CHECK(std::abs(warn.overlap) == doctest::Approx(std::exp(-0.5)).epsilon(1e-6));
}

TEST_CASE("spec JSON round trip") {
    for (const EncodingSpec& spec :
         {EncodingSpec::fock(6), EncodingSpec::coherent(Complex(1.5, 0.25), 18),
          EncodingSpec::cat(1.2, 16), EncodingSpec::gkp(0.4, 14)}) {
        CHECK(EncodingSpec::from_json(spec.to_json()) == spec);
    }
}

TEST_CASE("truncation captures nearly all of a modest coherent state") {
    const EncodingReport report = encoding_report(EncodingSpec::coherent(1.0, 14));
    CHECK(report.leakage() < 1e-8);
}
