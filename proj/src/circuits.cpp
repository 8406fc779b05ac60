#include "cvlab/circuits.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace cvlab {

namespace {

Mat kron_mat(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index r = 0; r < a.rows(); ++r)
        for (Eigen::Index c = 0; c < a.cols(); ++c)
            out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
    return out;
}

Mat beam_splitter_generator(int d) {
    const Mat a = annihilation_matrix(d).matrix;
    const Mat id = Mat::Identity(d, d);
    // slot i slowest: a_i a_j^dag - a_i^dag a_j
    return kron_mat(a, a.adjoint().eval()) - kron_mat(a.adjoint().eval(), a);
}

}  // namespace

LocalOperator beam_splitter(double xi, int d) {
    LocalOperator gen{{d, d}, beam_splitter_generator(d)};
    return {{d, d}, matrix_exponential(gen, xi).matrix};
}

LocalOperator controlled_swap_ideal(int d) {
    const Mat s = swap_operator(d).matrix;
    const Eigen::Index dd = s.rows();
    Mat c = Mat::Zero(2 * dd, 2 * dd);
    c.topLeftCorner(dd, dd) = Mat::Identity(dd, dd);
    c.bottomRightCorner(dd, dd) = s;
    return {{2, d, d}, std::move(c)};
}

LocalOperator controlled_swap_circuit(int d) {
    if (d < 2) throw invalid_dimension_error("controlled_swap_circuit: d must be >= 2");
    const int big = 2 * d - 1;  // covers every photon-number sector of the d-block
    const Mat bs_fwd = beam_splitter(std::numbers::pi / 4.0, big).matrix;
    const Mat bs_bwd = beam_splitter(-std::numbers::pi / 4.0, big).matrix;

    // exp(i (pi/2)(I_A - Z_A) n_i): identity for ancilla 0, (-1)^{n_i} for 1.
    const Eigen::Index bb = static_cast<Eigen::Index>(big) * big;
    Vec phase(2 * bb);
    for (int anc = 0; anc < 2; ++anc)
        for (int ni = 0; ni < big; ++ni)
            for (int nj = 0; nj < big; ++nj)
                phase(anc * bb + ni * big + nj) = anc == 0 ? 1.0 : (ni % 2 == 0 ? 1.0 : -1.0);

    Mat composed = kron_mat(Mat::Identity(2, 2), bs_bwd);
    composed = composed * phase.asDiagonal();
    composed = composed * kron_mat(Mat::Identity(2, 2), bs_fwd);

    // Restrict to the d-truncated block.
    std::vector<Eigen::Index> idx;
    for (int anc = 0; anc < 2; ++anc)
        for (int ni = 0; ni < d; ++ni)
            for (int nj = 0; nj < d; ++nj) idx.push_back(anc * bb + ni * big + nj);
    Mat out(idx.size(), idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r)
        for (std::size_t c = 0; c < idx.size(); ++c)
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                composed(idx[r], idx[c]);
    return {{2, d, d}, std::move(out)};
}

LocalOperator ancilla_rotation(double theta) {
    Mat r(2, 2);
    const Complex is(0.0, std::sin(theta));
    r << std::cos(theta), is, is, std::cos(theta);
    return {{2}, std::move(r)};
}

namespace {

StateVector eswap_circuit_impl(const StateVector& state, double theta,
                               const std::vector<std::pair<int, int>>& pairs,
                               bool use_circuit_cswap) {
    const int d = state.system.dim(pairs.front().first);
    for (auto [i, j] : pairs)
        if (state.system.dim(i) != d || state.system.dim(j) != d)
            throw std::invalid_argument("eswap_via_circuit: pair dimensions differ");

    const int anc = state.system.num_subsystems();
    StateVector full = kron(state, StateVector{ModeSystem({2}, {SubsystemRole::AncillaQubit}),
                                               (Vec(2) << 1.0 / std::numbers::sqrt2,
                                                1.0 / std::numbers::sqrt2).finished()});

    const LocalOperator cswap =
        use_circuit_cswap ? controlled_swap_circuit(d) : controlled_swap_ideal(d);
    auto apply_cswaps = [&] {
        for (auto [i, j] : pairs) {
            const int slots[3] = {anc, i, j};
            apply_local_inplace(full, cswap, slots);
        }
    };
    apply_cswaps();
    {
        const int slots[1] = {anc};
        apply_local_inplace(full, ancilla_rotation(theta), slots);
    }
    apply_cswaps();

    // Project the ancilla back onto |+> and drop it.
    const std::size_t half = state.system.total_dimension();
    Vec out(static_cast<Eigen::Index>(half));
    for (std::size_t x = 0; x < half; ++x)
        out(static_cast<Eigen::Index>(x)) =
            (full.amplitudes(static_cast<Eigen::Index>(2 * x)) +
             full.amplitudes(static_cast<Eigen::Index>(2 * x + 1))) /
            std::numbers::sqrt2;
    const double fid = out.squaredNorm();
    if (fid < 1.0 - 1e-10)
        throw ancilla_disentangle_error("eswap_via_circuit: ancilla failed to return to |+> "
                                        "(fidelity " + std::to_string(fid) + ")");
    return {state.system, out / out.norm()};
}

}  // namespace

StateVector eswap_via_circuit(const StateVector& state, double theta, int i, int j,
                              bool use_circuit_cswap) {
    return eswap_circuit_impl(state, theta, {{i, j}}, use_circuit_cswap);
}

StateVector eswap_via_circuit(const StateVector& state, double theta, int i, int j, int k, int l,
                              bool use_circuit_cswap) {
    return eswap_circuit_impl(state, theta, {{i, j}, {k, l}}, use_circuit_cswap);
}

NoiseSpec NoiseSpec::number_phase(double theta) {
    NoiseSpec n;
    n.enabled = true;
    n.generator = NoiseGenerator::NumberPhase;
    n.theta = theta;
    return n;
}

NoiseSpec NoiseSpec::random_hermitian(double theta, std::uint64_t seed) {
    NoiseSpec n;
    n.enabled = true;
    n.generator = NoiseGenerator::RandomHermitian;
    n.theta = theta;
    n.seed = seed;
    return n;
}

Mat NoiseSpec::unitary(int d) const {
    if (!enabled) return Mat::Identity(d, d);
    if (generator == NoiseGenerator::NumberPhase) {
        Vec diag(d);
        for (int n = 0; n < d; ++n) diag(n) = std::exp(Complex(0.0, theta * n));
        return diag.asDiagonal();
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Mat h(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) h(r, c) = Complex(gauss(rng), gauss(rng));
    h = ((h + h.adjoint()) / 2.0).eval();
    LocalOperator gen{{d}, std::move(h)};
    return matrix_exponential(gen, Complex(0.0, theta)).matrix;
}

nlohmann::json NoiseSpec::to_json() const {
    if (!enabled) return {{"kind", "none"}};
    nlohmann::json j;
    j["kind"] = "collective_unitary";
    j["generator"] =
        generator == NoiseGenerator::NumberPhase ? "number_phase" : "random_hermitian";
    j["theta"] = theta;
    if (generator == NoiseGenerator::RandomHermitian) j["seed"] = seed;
    return j;
}

NoiseSpec NoiseSpec::from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "none") return NoiseSpec::none();
    if (kind != "collective_unitary")
        throw std::invalid_argument("NoiseSpec: unknown kind " + kind);
    const std::string gen = j.at("generator").get<std::string>();
    const double theta = j.at("theta").get<double>();
    if (gen == "number_phase") return NoiseSpec::number_phase(theta);
    if (gen == "random_hermitian")
        return NoiseSpec::random_hermitian(theta, j.value("seed", std::uint64_t{0}));
    throw std::invalid_argument("NoiseSpec: unknown generator " + gen);
}

StateVector apply_collective_noise(const StateVector& state, const Mat& u,
                                   std::span<const int> modes) {
    if (!is_unitary(u)) throw std::invalid_argument("apply_collective_noise: U is not unitary");
    std::vector<int> targets(modes.begin(), modes.end());
    if (targets.empty())
        for (int s = 0; s < state.system.num_subsystems(); ++s)
            if (state.system.role(s) == SubsystemRole::Mode) targets.push_back(s);
    StateVector out = state;
    for (int m : targets) {
        LocalOperator op{{state.system.dim(m)}, u};
        const int slots[1] = {m};
        apply_local_inplace(out, op, slots);
    }
    return out;
}

StateVector apply_collective_noise(const StateVector& state, const NoiseSpec& noise,
                                   std::span<const int> modes) {
    if (!noise.enabled) return state;
    int d = -1;
    if (modes.empty()) {
        for (int s = 0; s < state.system.num_subsystems(); ++s)
            if (state.system.role(s) == SubsystemRole::Mode) d = state.system.dim(s);
    } else {
        d = state.system.dim(modes.front());
    }
    if (d < 0) return state;
    return apply_collective_noise(state, noise.unitary(d), modes);
}

}  // namespace cvlab
