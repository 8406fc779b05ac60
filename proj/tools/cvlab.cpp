// Command-line front end: verify / experiment / run.
// Exit codes: 0 pass, 1 verification failure, 2 usage/schema, 3 resource, 4 unsupported.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cvlab/checks.hpp"
#include "cvlab/experiments.hpp"

namespace {

int write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot write " << path << "\n";
        return 3;
    }
    out << content;
    return 0;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> values;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t next = text.find(',', pos);
        if (next == std::string::npos) next = text.size();
        values.push_back(std::stod(text.substr(pos, next - pos)));
        pos = next + 1;
    }
    return values;
}

int cmd_verify(const std::string& scope, int d, const std::string& encoding, double alpha,
               double tolerance, const std::string& out_path) {
    cvlab::VerifyOptions opts;
    opts.d = d;
    if (tolerance > 0) opts.tolerance = tolerance;
    if (!encoding.empty()) {
        const int trunc = d > 0 ? d : 14;
        if (encoding == "fock") {
            opts.encoding = cvlab::EncodingSpec::fock(trunc);
        } else if (encoding == "coherent") {
            opts.encoding = cvlab::EncodingSpec::coherent(alpha, trunc);
        } else if (encoding == "cat") {
            opts.encoding = cvlab::EncodingSpec::cat(alpha, trunc);
        } else if (encoding == "gkp") {
            opts.encoding = cvlab::EncodingSpec::gkp(alpha, trunc);
        } else {
            std::cerr << "error: unknown encoding '" << encoding << "'\n";
            return 2;
        }
    }

    std::vector<cvlab::CheckSuite> suites;
    if (scope == "all") {
        for (const auto& s : cvlab::verify_scopes()) suites.push_back(cvlab::run_scope(s, opts));
    } else {
        suites.push_back(cvlab::run_scope(scope, opts));
    }

    bool all_passed = true;
    nlohmann::json report;
    report["schema"] = "cvlab-verify-1";
    report["scope"] = scope;
    report["suites"] = nlohmann::json::array();
    for (const auto& suite : suites) {
        all_passed = all_passed && suite.passed();
        report["suites"].push_back(suite.to_json());
        std::printf("%s %s (%d/%zu checks, %.2fs)\n", suite.passed() ? "PASS" : "FAIL",
                    suite.name.c_str(),
                    static_cast<int>(std::count_if(suite.items.begin(), suite.items.end(),
                                                   [](const auto& i) { return i.passed; })),
                    suite.items.size(), suite.seconds);
        for (const auto& item : suite.items)
            if (!item.passed)
                std::printf("  FAIL %s: value %.3e > threshold %.3e%s%s\n", item.name.c_str(),
                            item.value, item.threshold, item.detail.empty() ? "" : "  -- ",
                            item.detail.c_str());
    }
    report["passed"] = all_passed;
    if (!out_path.empty())
        if (int rc = write_file(out_path, report.dump(2) + "\n")) return rc;
    return all_passed ? 0 : 1;
}

int cmd_experiment(const std::string& name, const nlohmann::json& params,
                   const std::string& out_base) {
    const cvlab::ExperimentReport report = cvlab::run_experiment(name, params);
    const std::string base = out_base.empty() ? name : out_base;
    if (int rc = write_file(base + ".csv", report.to_csv())) return rc;
    if (int rc = write_file(base + ".json", report.to_json().dump(2) + "\n")) return rc;
    if (int rc = write_file(base + ".svg", report.to_svg())) return rc;

    std::printf("%s %s (%.2fs, %zu points)\n", report.passed() ? "PASS" : "FAIL", name.c_str(),
                report.seconds, report.rows.size());
    for (const auto& v : report.verdicts)
        std::printf("  %s %s: value %.3e, threshold %.3e%s%s\n", v.passed ? "pass" : "FAIL",
                    v.name.c_str(), v.value, v.threshold, v.detail.empty() ? "" : "  -- ",
                    v.detail.c_str());
    return report.passed() ? 0 : 1;
}

int cmd_run(const std::string& path, int shots, std::uint64_t seed, bool strict,
            const std::string& out_path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::cerr << "error: cannot open " << path << "\n";
        return 2;
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        std::cerr << "error: " << path << ": " << e.what() << "\n";
        return 2;
    }
    cvlab::LogicalCircuit circuit;
    try {
        circuit = cvlab::LogicalCircuit::from_json(j);
        circuit.validate();
    } catch (const std::exception& e) {
        std::cerr << "error: " << path << ": " << e.what() << "\n";
        return 2;
    }
    const cvlab::PhysicalProgram program = cvlab::compile(circuit, strict);
    const cvlab::ShotResults results = cvlab::execute(program, shots, seed);

    std::printf("outcome  frequency  count   (shots %d, seed %llu)\n", results.shots,
                static_cast<unsigned long long>(results.seed));
    for (const auto& [outcome, freq] : results.frequencies)
        std::printf("%-8s %.6f   %zu\n", outcome.empty() ? "-" : outcome.c_str(), freq,
                    results.counts.at(outcome));
    if (!out_path.empty())
        if (int rc = write_file(out_path, results.to_json().dump(2) + "\n")) return rc;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"swap-based continuous-variable logic simulator"};
    app.require_subcommand(1);

    // verify
    auto* verify = app.add_subcommand("verify", "run invariant suites");
    std::string scope = "all";
    int d = -1;
    std::string encoding;
    double alpha = 2.0;
    double tolerance = -1.0;
    std::string verify_out;
    verify->add_option("--scope", scope, "all or a module scope")
        ->check(CLI::IsMember([] {
            std::vector<std::string> v{"all"};
            for (const auto& s : cvlab::verify_scopes()) v.push_back(s);
            return v;
        }()));
    verify->add_option("--d", d, "truncation override");
    verify->add_option("--encoding", encoding, "fock|coherent|cat|gkp");
    verify->add_option("--alpha", alpha, "encoding amplitude / delta parameter");
    verify->add_option("--tolerance", tolerance, "base tolerance override");
    verify->add_option("--out", verify_out, "JSON report path");

    // experiment
    auto* experiment = app.add_subcommand("experiment", "run a parameter sweep");
    std::string exp_name;
    std::string eps_list, enc, enc1, enc2, noise_kind;
    double phi = -1.0, noise_theta = -1.0, exp_eps = -1.0;
    int exp_d = -1, qubits = -1, seeds = -1, count = -1;
    std::uint64_t exp_seed = 0;
    bool exp_seed_set = false;
    std::string exp_out;
    experiment->add_option("name", exp_name, "experiment name")
        ->required()
        ->check(CLI::IsMember(cvlab::experiment_names()));
    experiment->add_option("--eps", eps_list, "comma-separated epsilon sweep");
    experiment->add_option("--phi", phi, "target phase");
    experiment->add_option("--epsilon", exp_eps, "phase-channel step");
    experiment->add_option("--encoding", enc, "e.g. fock, coherent:2.0");
    experiment->add_option("--enc1", enc1, "first encoding");
    experiment->add_option("--enc2", enc2, "second encoding");
    experiment->add_option("--d", exp_d, "truncation");
    experiment->add_option("--noise", noise_kind, "number_phase|random_hermitian");
    experiment->add_option("--theta", noise_theta, "noise strength");
    experiment->add_option("--qubits", qubits, "register size");
    experiment->add_option("--seeds", seeds, "number of initialization seeds");
    experiment->add_option("--count", count, "number of random circuits");
    experiment->add_option("--seed", exp_seed, "base RNG seed");
    experiment->add_option("--out", exp_out, "output basename (.csv/.json/.svg)");

    // run
    auto* run = app.add_subcommand("run", "compile and execute a circuit file");
    std::string circuit_path, run_out;
    int shots = 1000;
    std::uint64_t run_seed = 1;
    bool strict = false;
    run->add_option("circuit", circuit_path, "circuit JSON file")->required();
    run->add_option("--shots", shots, "number of samples");
    run->add_option("--seed", run_seed, "RNG seed");
    run->add_flag("--strict", strict, "reject gates without a coherent native lowering");
    run->add_option("--out", run_out, "results JSON path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (verify->parsed()) return cmd_verify(scope, d, encoding, alpha, tolerance, verify_out);
        if (experiment->parsed()) {
            nlohmann::json params = nlohmann::json::object();
            const int trunc = exp_d > 0 ? exp_d : (exp_name == "mixed-encoding" ? 14 : 4);
            if (exp_d > 0) params["d"] = exp_d;
            if (!eps_list.empty()) params["eps"] = parse_double_list(eps_list);
            if (phi >= 0) params["phi"] = phi;
            if (exp_eps > 0) params["epsilon"] = exp_eps;
            if (!enc.empty())
                params["encoding"] = cvlab::encoding_from_cli(enc, trunc).to_json();
            if (!enc1.empty()) params["enc1"] = enc1;
            if (!enc2.empty()) params["enc2"] = enc2;
            if (!noise_kind.empty()) {
                const double strength = noise_theta > 0 ? noise_theta : 0.9;
                if (noise_kind == "number_phase")
                    params["noise"] = cvlab::NoiseSpec::number_phase(strength).to_json();
                else if (noise_kind == "random_hermitian")
                    params["noise"] =
                        cvlab::NoiseSpec::random_hermitian(strength, 21).to_json();
                else {
                    std::cerr << "error: unknown noise kind '" << noise_kind << "'\n";
                    return 2;
                }
            }
            if (qubits > 0) params["qubits"] = qubits;
            if (seeds > 0) params["seeds"] = seeds;
            if (count > 0) params["count"] = count;
            if (experiment->count("--seed") > 0) params["seed"] = exp_seed;
            (void)exp_seed_set;
            return cmd_experiment(exp_name, params, exp_out);
        }
        if (run->parsed()) return cmd_run(circuit_path, shots, run_seed, strict, run_out);
    } catch (const cvlab::dimension_cap_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const cvlab::unsupported_gate_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const cvlab::invalid_dimension_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
