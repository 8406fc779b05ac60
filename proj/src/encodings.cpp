#include "cvlab/encodings.hpp"

#include <cmath>
#include <numbers>

namespace cvlab {

std::string to_string(EncodingKind kind) {
    switch (kind) {
        case EncodingKind::Fock: return "fock";
        case EncodingKind::Coherent: return "coherent";
        case EncodingKind::Cat: return "cat";
        case EncodingKind::Gkp: return "gkp";
    }
    return "?";
}

EncodingKind encoding_kind_from_string(const std::string& name) {
    if (name == "fock") return EncodingKind::Fock;
    if (name == "coherent") return EncodingKind::Coherent;
    if (name == "cat") return EncodingKind::Cat;
    if (name == "gkp") return EncodingKind::Gkp;
    throw std::invalid_argument("unknown encoding kind: " + name);
}

int default_truncation(EncodingKind kind) {
    return kind == EncodingKind::Fock ? 4 : 12;
}

EncodingSpec EncodingSpec::fock(int d) { return {EncodingKind::Fock, 0.0, 0.35, d}; }
EncodingSpec EncodingSpec::coherent(Complex alpha, int d) {
    return {EncodingKind::Coherent, alpha, 0.35, d};
}
EncodingSpec EncodingSpec::cat(Complex alpha, int d) {
    return {EncodingKind::Cat, alpha, 0.35, d};
}
EncodingSpec EncodingSpec::gkp(double delta, int d) {
    return {EncodingKind::Gkp, 0.0, delta, d};
}

void EncodingSpec::validate() const {
    if (truncation < 2) throw invalid_dimension_error("EncodingSpec: truncation must be >= 2");
    if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag()))
        throw std::invalid_argument("EncodingSpec: alpha must be finite");
    if (kind == EncodingKind::Gkp && !(delta > 0.0))
        throw std::invalid_argument("EncodingSpec: delta must be positive");
}

nlohmann::json EncodingSpec::to_json() const {
    nlohmann::json j;
    j["kind"] = to_string(kind);
    j["truncation"] = truncation;
    if (kind == EncodingKind::Coherent || kind == EncodingKind::Cat)
        j["alpha"] = {alpha.real(), alpha.imag()};
    if (kind == EncodingKind::Gkp) j["delta"] = delta;
    return j;
}

EncodingSpec EncodingSpec::from_json(const nlohmann::json& j) {
    EncodingSpec spec;
    spec.kind = encoding_kind_from_string(j.at("kind").get<std::string>());
    spec.truncation = j.value("truncation", default_truncation(spec.kind));
    if (spec.kind == EncodingKind::Coherent || spec.kind == EncodingKind::Cat) {
        const auto& a = j.at("alpha");
        spec.alpha = Complex(a.at(0).get<double>(), a.size() > 1 ? a.at(1).get<double>() : 0.0);
    }
    if (spec.kind == EncodingKind::Gkp) spec.delta = j.at("delta").get<double>();
    spec.validate();
    return spec;
}

namespace {

struct RawKet {
    Vec coeffs;               // unnormalized Fock coefficients of the ideal state
    double untruncated_norm2; // analytic norm^2 of the ideal (untruncated) state
};

Vec coherent_coeffs(Complex alpha, int d) {
    Vec c(d);
    c(0) = std::exp(-0.5 * std::norm(alpha));
    for (int n = 1; n < d; ++n) c(n) = c(n - 1) * alpha / std::sqrt(static_cast<double>(n));
    return c;
}

/// Fock coefficients of the normalized squeezed-displaced Gaussian whose
/// position wavefunction is centered at q0 with width parameter w0
/// (vacuum has w0 = 1 in the q = (a + a^dag)/sqrt(2) convention).
Vec gaussian_peak_coeffs(double q0, double w0, int d) {
    const double r = -std::log(w0);
    const double beta = q0 / std::numbers::sqrt2;
    const double ch = std::cosh(r), sh = std::sinh(r), th = std::tanh(r);
    Vec c = Vec::Zero(d);
    c(0) = std::sqrt(1.0 / ch) * std::exp(-0.5 * beta * beta * (1.0 + th));
    if (d > 1) c(1) = beta * (ch + sh) * c(0) / ch;
    for (int n = 1; n + 1 < d; ++n)
        c(n + 1) = (beta * (ch + sh) * c(n) - std::sqrt(static_cast<double>(n)) * sh * c(n - 1)) /
                   (std::sqrt(static_cast<double>(n + 1)) * ch);
    return c;
}

/// Grid comb: sum of Gaussian peaks at q = k*sqrt(pi) with the damping
/// envelope of exp(-delta^2 n): peak k carries weight exp(-pi delta^2 k^2 / 2).
RawKet gkp_comb(const EncodingSpec& spec, bool odd) {
    const int d = spec.truncation;
    const double delta = spec.delta;
    const double root_pi = std::sqrt(std::numbers::pi);
    std::vector<double> ks, ws;
    for (int s = -4096; s <= 4096; ++s) {
        const double k = odd ? 2.0 * s + 1.0 : 2.0 * s;
        const double w = std::exp(-0.5 * std::numbers::pi * delta * delta * k * k);
        if (w < 1e-8) continue;
        ks.push_back(k);
        ws.push_back(w);
    }
    RawKet out;
    out.coeffs = Vec::Zero(d);
    for (std::size_t i = 0; i < ks.size(); ++i)
        out.coeffs += ws[i] * gaussian_peak_coeffs(ks[i] * root_pi, delta, d);
    out.untruncated_norm2 = 0.0;
    for (std::size_t i = 0; i < ks.size(); ++i)
        for (std::size_t j = 0; j < ks.size(); ++j) {
            const double dq = (ks[i] - ks[j]) * root_pi;
            out.untruncated_norm2 += ws[i] * ws[j] * std::exp(-dq * dq / (2.0 * delta * delta));
        }
    return out;
}

std::pair<RawKet, RawKet> raw_kets(const EncodingSpec& spec) {
    spec.validate();
    const int d = spec.truncation;
    switch (spec.kind) {
        case EncodingKind::Fock:
            return {{fock_ket(d, 0), 1.0}, {fock_ket(d, 1), 1.0}};
        case EncodingKind::Coherent:
            return {{coherent_coeffs(spec.alpha, d), 1.0},
                    {coherent_coeffs(-spec.alpha, d), 1.0}};
        case EncodingKind::Cat: {
            const double cross = std::exp(-2.0 * std::norm(spec.alpha));
            const double norm2 = 2.0 * (1.0 + cross);
            const Complex i(0.0, 1.0);
            Vec even = coherent_coeffs(spec.alpha, d) + coherent_coeffs(-spec.alpha, d);
            Vec rotated = coherent_coeffs(i * spec.alpha, d) + coherent_coeffs(-i * spec.alpha, d);
            return {{std::move(even), norm2}, {std::move(rotated), norm2}};
        }
        case EncodingKind::Gkp:
            return {gkp_comb(spec, false), gkp_comb(spec, true)};
    }
    throw std::logic_error("raw_kets: unreachable");
}

}  // namespace

EncodingReport encoding_report(const EncodingSpec& spec) {
    auto [raw0, raw1] = raw_kets(spec);
    EncodingReport report;
    report.norm0 = raw0.coeffs.norm();
    report.norm1 = raw1.coeffs.norm();
    report.leakage0 = std::clamp(1.0 - report.norm0 * report.norm0 / raw0.untruncated_norm2, 0.0, 1.0);
    report.leakage1 = std::clamp(1.0 - report.norm1 * report.norm1 / raw1.untruncated_norm2, 0.0, 1.0);
    Vec k0 = raw0.coeffs / report.norm0;
    Vec k1 = raw1.coeffs / report.norm1;
    report.overlap = k0.adjoint() * k1;
    report.status = report.leakage() < 0.01 ? EncodingStatus::Pass : EncodingStatus::Warn;
    return report;
}

std::pair<StateVector, StateVector> basis_states(const EncodingSpec& spec) {
    auto [raw0, raw1] = raw_kets(spec);
    const double leak0 = 1.0 - raw0.coeffs.squaredNorm() / raw0.untruncated_norm2;
    const double leak1 = 1.0 - raw1.coeffs.squaredNorm() / raw1.untruncated_norm2;
    if (std::max(leak0, leak1) > 0.2)
        throw encoding_error("basis_states: truncation too small for " + to_string(spec.kind) +
                             " (leakage " + std::to_string(std::max(leak0, leak1)) + ")");
    ModeSystem mode = ModeSystem::modes(1, spec.truncation);
    StateVector ket0{mode, raw0.coeffs / raw0.coeffs.norm()};
    StateVector ket1{mode, raw1.coeffs / raw1.coeffs.norm()};
    return {std::move(ket0), std::move(ket1)};
}

Complex overlap(const EncodingSpec& spec) {
    auto [ket0, ket1] = basis_states(spec);
    return inner_product(ket0, ket1);
}

EncodingReport validate_encoding(const EncodingSpec& spec, double tol) {
    EncodingReport report = encoding_report(spec);
    const bool pass = std::abs(report.overlap) < tol && report.leakage() < tol;
    report.status = pass ? EncodingStatus::Pass : EncodingStatus::Warn;
    return report;
}

}  // namespace cvlab
