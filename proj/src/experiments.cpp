#include "cvlab/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "cvlab/logical.hpp"

namespace cvlab {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string fmt6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

void verdict(ExperimentReport& report, std::string name, double value, double threshold,
             std::string detail = {}) {
    report.verdicts.push_back(
        {std::move(name), value, threshold, value <= threshold, std::move(detail)});
}

EncodingSpec encoding_param(const nlohmann::json& params, const char* key,
                            const EncodingSpec& fallback) {
    if (!params.contains(key)) return fallback;
    return EncodingSpec::from_json(params.at(key));
}

}  // namespace

bool ExperimentReport::passed() const {
    for (const auto& v : verdicts)
        if (!v.passed) return false;
    return !verdicts.empty();
}

nlohmann::json ExperimentReport::to_json() const {
    nlohmann::json j;
    j["schema"] = "cvlab-report-1";
    j["experiment"] = name;
    j["parameters"] = parameters;
    j["seed"] = seed;
    j["columns"] = columns;
    if (!row_labels.empty()) j["row_labels"] = row_labels;
    j["rows"] = rows;
    j["verdicts"] = nlohmann::json::array();
    for (const auto& v : verdicts) {
        nlohmann::json item;
        item["name"] = v.name;
        item["value"] = v.value;
        item["threshold"] = v.threshold;
        item["passed"] = v.passed;
        if (!v.detail.empty()) item["detail"] = v.detail;
        j["verdicts"].push_back(std::move(item));
    }
    j["passed"] = passed();
    return j;
}

std::string ExperimentReport::to_csv() const {
    std::string out = "# cvlab-csv-1\n# experiment: " + name + "\n# parameters: " +
                      parameters.dump() + "\n";
    if (!row_labels.empty()) out += "label,";
    for (std::size_t c = 0; c < columns.size(); ++c)
        out += columns[c] + (c + 1 < columns.size() ? "," : "\n");
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (!row_labels.empty()) out += row_labels[r] + ",";
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            out += fmt(rows[r][c]) + (c + 1 < rows[r].size() ? "," : "\n");
    }
    return out;
}

std::string ExperimentReport::to_svg() const {
    const double width = 640, height = 480, margin = 70;
    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" "
                      "height=\"480\" viewBox=\"0 0 640 480\">\n"
                      "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
    if (columns.size() >= 2 && rows.size() >= 2) {
        auto value = [&](std::size_t r, std::size_t c) {
            const double v = rows[r][c];
            return log_plot ? std::log10(std::max(v, 1e-300)) : v;
        };
        double xmin = value(0, 0), xmax = xmin, ymin = value(0, 1), ymax = ymin;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            xmin = std::min(xmin, value(r, 0));
            xmax = std::max(xmax, value(r, 0));
            ymin = std::min(ymin, value(r, 1));
            ymax = std::max(ymax, value(r, 1));
        }
        if (xmax - xmin < 1e-12) xmax = xmin + 1.0;
        if (ymax - ymin < 1e-12) ymax = ymin + 1.0;
        auto px = [&](double v) {
            return margin + (v - xmin) / (xmax - xmin) * (width - 2 * margin);
        };
        auto py = [&](double v) {
            return height - margin - (v - ymin) / (ymax - ymin) * (height - 2 * margin);
        };
        svg += "<line x1=\"" + fmt6(margin) + "\" y1=\"" + fmt6(height - margin) +
               "\" x2=\"" + fmt6(width - margin) + "\" y2=\"" + fmt6(height - margin) +
               "\" stroke=\"black\"/>\n";
        svg += "<line x1=\"" + fmt6(margin) + "\" y1=\"" + fmt6(height - margin) +
               "\" x2=\"" + fmt6(margin) + "\" y2=\"" + fmt6(margin) +
               "\" stroke=\"black\"/>\n";
        std::string points;
        for (std::size_t r = 0; r < rows.size(); ++r)
            points += fmt6(px(value(r, 0))) + "," + fmt6(py(value(r, 1))) + " ";
        svg += "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"" +
               points + "\"/>\n";
        for (std::size_t r = 0; r < rows.size(); ++r)
            svg += "<circle cx=\"" + fmt6(px(value(r, 0))) + "\" cy=\"" +
                   fmt6(py(value(r, 1))) + "\" r=\"3\" fill=\"steelblue\"/>\n";
        const std::string scale = log_plot ? " (log10)" : "";
        svg += "<text x=\"" + fmt6(width / 2) + "\" y=\"" + fmt6(height - 20) +
               "\" text-anchor=\"middle\" font-size=\"14\">" + columns[0] + scale +
               "</text>\n";
        svg += "<text x=\"20\" y=\"" + fmt6(height / 2) +
               "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 20 " +
               fmt6(height / 2) + ")\">" + columns[1] + scale + "</text>\n";
        svg += "<text x=\"" + fmt6(width / 2) +
               "\" y=\"30\" text-anchor=\"middle\" font-size=\"16\">" + name + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names{"phase-scaling", "dfs", "mixed-encoding",
                                               "init-yield", "circuit-equivalence"};
    return names;
}

EncodingSpec encoding_from_cli(const std::string& text, int truncation) {
    const auto colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    double param = 0.0;
    if (colon != std::string::npos) param = std::stod(text.substr(colon + 1));
    if (kind == "fock") return EncodingSpec::fock(truncation);
    if (kind == "coherent")
        return EncodingSpec::coherent(colon == std::string::npos ? 2.0 : param, truncation);
    if (kind == "cat")
        return EncodingSpec::cat(colon == std::string::npos ? 2.0 : param, truncation);
    if (kind == "gkp")
        return EncodingSpec::gkp(colon == std::string::npos ? 0.35 : param, truncation);
    throw std::invalid_argument("unknown encoding: " + text);
}

namespace {

ExperimentReport run_phase_scaling(const nlohmann::json& params) {
    ExperimentReport report;
    report.name = "phase-scaling";
    report.log_plot = true;
    std::vector<double> eps{0.16, 0.08, 0.04, 0.02, 0.01};
    if (params.contains("eps")) eps = params.at("eps").get<std::vector<double>>();
    const double phi = params.value("phi", std::numbers::pi / 4.0);
    const EncodingSpec spec = encoding_param(params, "encoding", EncodingSpec::fock(4));
    report.parameters = {{"eps", eps}, {"phi", phi}, {"encoding", spec.to_json()}};
    report.columns = {"epsilon", "trace_distance"};

    std::sort(eps.begin(), eps.end(), std::greater<double>());
    for (double e : eps)
        report.rows.push_back({e, phase_channel_trace_distance(spec, phi, e)});

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const auto n = static_cast<double>(report.rows.size());
    bool monotone = true;
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const double x = std::log(report.rows[i][0]);
        const double y = std::log(report.rows[i][1]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        if (i > 0 && report.rows[i][1] >= report.rows[i - 1][1]) monotone = false;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    verdict(report, "log-log slope within [0.85, 1.15]", std::abs(slope - 1.0), 0.15,
            "slope " + fmt(slope));
    verdict(report, "error decreases monotonically with epsilon", monotone ? 0.0 : 1.0, 0.0);
    return report;
}

ExperimentReport run_dfs(const nlohmann::json& params) {
    ExperimentReport report;
    report.name = "dfs";
    const EncodingSpec spec = encoding_param(params, "encoding", EncodingSpec::fock(4));
    NoiseSpec noise = NoiseSpec::number_phase(0.9);
    if (params.contains("noise")) noise = NoiseSpec::from_json(params.at("noise"));
    const double epsilon = params.value("epsilon", 0.2);
    report.parameters = {{"encoding", spec.to_json()},
                         {"noise", noise.to_json()},
                         {"epsilon", epsilon}};
    report.columns = {"p_noiseless", "p_noisy", "abs_deviation"};

    const auto [base, noisy] = dfs_distributions(spec, noise, epsilon);
    double worst = 0.0;
    for (const auto& [key, p] : base) {
        const auto it = noisy.find(key);
        const double q = it == noisy.end() ? 0.0 : it->second;
        report.row_labels.push_back(key);
        report.rows.push_back({p, q, std::abs(p - q)});
        worst = std::max(worst, std::abs(p - q));
    }
    verdict(report, "max outcome-probability deviation under collective noise", worst, 1e-8);
    return report;
}

ExperimentReport run_mixed_encoding(const nlohmann::json& params) {
    ExperimentReport report;
    report.name = "mixed-encoding";
    const int d = params.value("d", 14);
    const EncodingSpec e1 = params.contains("enc1")
                                ? encoding_from_cli(params.at("enc1").get<std::string>(), d)
                                : EncodingSpec::fock(d);
    const EncodingSpec e2 = params.contains("enc2")
                                ? encoding_from_cli(params.at("enc2").get<std::string>(), d)
                                : EncodingSpec::coherent(2.0, d);
    report.parameters = {{"enc1", e1.to_json()}, {"enc2", e2.to_json()}, {"d", d}};
    report.columns = {"theta", "commutator_bound"};

    const double threshold =
        1e-8 + 10.0 * (std::abs(overlap(e1)) + std::abs(overlap(e2)));
    double worst = 0.0;
    for (double theta : {0.3, std::numbers::pi / 4.0, 1.2}) {
        const double bound = mixed_encoding_commutator_bound(e1, e2, theta);
        report.rows.push_back({theta, bound});
        worst = std::max(worst, bound);
    }
    verdict(report, "eswap4 commutes with the joint computational-subspace projector",
            worst, threshold);
    return report;
}

ExperimentReport run_init_yield(const nlohmann::json& params) {
    ExperimentReport report;
    report.name = "init-yield";
    const int qubits = params.value("qubits", 2);
    const int seeds = params.value("seeds", 50);
    report.seed = params.value("seed", std::uint64_t{101});
    const EncodingSpec spec = encoding_param(params, "encoding", EncodingSpec::fock(4));
    report.parameters = {{"qubits", qubits},
                         {"seeds", seeds},
                         {"seed", report.seed},
                         {"encoding", spec.to_json()}};
    report.columns = {"seed", "attempts", "plus_count", "minus_count", "formed"};

    const std::vector<EncodingSpec> specs(static_cast<std::size_t>(qubits), spec);
    long total_plus = 0, total_attempts = 0;
    bool all_formed = true;
    for (int s = 0; s < seeds; ++s) {
        const std::uint64_t seed = report.seed + static_cast<std::uint64_t>(s);
        auto [state, run] = init_quad_register(qubits, specs, seed);
        (void)state;
        report.rows.push_back({static_cast<double>(seed), static_cast<double>(run.attempts),
                               static_cast<double>(run.plus_count),
                               static_cast<double>(run.minus_count),
                               run.formed ? 1.0 : 0.0});
        total_plus += run.plus_count;
        total_attempts += run.attempts;
        all_formed = all_formed && run.formed;
    }
    const double frac = static_cast<double>(total_plus) / static_cast<double>(total_attempts);
    verdict(report, "pooled +1 fraction is 0.5 within 3 sigma", std::abs(frac - 0.5),
            3.0 * std::sqrt(0.25 / static_cast<double>(total_attempts)),
            fmt(frac) + " over " + std::to_string(total_attempts) + " swap tests");
    verdict(report, "every register formed within the retry cap", all_formed ? 0.0 : 1.0, 0.0);
    return report;
}

ExperimentReport run_circuit_equivalence(const nlohmann::json& params) {
    ExperimentReport report;
    report.name = "circuit-equivalence";
    const int count = params.value("count", 25);
    report.seed = params.value("seed", std::uint64_t{61});
    report.parameters = {{"count", count}, {"seed", report.seed}};
    report.columns = {"trial", "quad_scheme", "deviation", "tolerance"};

    std::mt19937_64 rng(report.seed);
    double margin = -1.0;
    for (int trial = 0; trial < count; ++trial) {
        const Scheme scheme = trial % 2 == 0 ? Scheme::Dual : Scheme::Quad;
        const LogicalCircuit circuit = random_native_circuit(scheme, rng);
        const OracleComparison cmp = compare_with_oracle(circuit);
        report.rows.push_back({static_cast<double>(trial),
                               scheme == Scheme::Quad ? 1.0 : 0.0, cmp.deviation,
                               cmp.tolerance});
        margin = std::max(margin, cmp.deviation - cmp.tolerance);
    }
    verdict(report, "compiled states match the qubit-algebra oracle", margin, 0.0,
            "max deviation minus per-circuit tolerance");
    return report;
}

}  // namespace

ExperimentReport run_experiment(const std::string& name, const nlohmann::json& params) {
    const auto start = std::chrono::steady_clock::now();
    ExperimentReport report;
    if (name == "phase-scaling") report = run_phase_scaling(params);
    else if (name == "dfs") report = run_dfs(params);
    else if (name == "mixed-encoding") report = run_mixed_encoding(params);
    else if (name == "init-yield") report = run_init_yield(params);
    else if (name == "circuit-equivalence") report = run_circuit_equivalence(params);
    else throw std::invalid_argument("unknown experiment: " + name);
    report.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

}  // namespace cvlab
