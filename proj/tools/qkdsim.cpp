#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qkdsim/errors.hpp"
#include "qkdsim/security.hpp"
#include "qkdsim/session.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitDetected = 2;
constexpr int kExitInternal = 3;

void emit(const std::string& payload, const std::string& outPath, bool quiet) {
    if (!outPath.empty()) {
        std::ofstream out(outPath, std::ios::binary);
        if (!out) throw qkdsim::ConfigError("cannot open output file '" + outPath + "'");
        out << payload;
    }
    if (outPath.empty() || !quiet) std::cout << payload;
}

std::vector<double> parse_grid(const std::string& spec) {
    // "start:stop:count", inclusive endpoints
    double start = 0.0, stop = 0.0;
    int count = 0;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%d", &start, &stop, &count) != 3)
        throw qkdsim::ConfigError("grid spec must be 'start:stop:count'");
    if (count < 1 || stop < start)
        throw qkdsim::ConfigError("grid spec needs count >= 1 and stop >= start");
    std::vector<double> grid;
    for (int i = 0; i < count; ++i)
        grid.push_back(count == 1 ? start
                                  : start + (stop - start) * i / (count - 1));
    return grid;
}

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

int cmd_simulate(const std::string& configPath, bool seedGiven, uint64_t seedOverride,
                 const std::string& outPath, bool quiet) {
    qkdsim::SessionConfig cfg = qkdsim::load_session_config(configPath);
    if (seedGiven) cfg.seed = seedOverride;
    const qkdsim::SessionStats stats = qkdsim::run_session(cfg);
    const std::string where = !outPath.empty() ? outPath : cfg.outputPath;
    emit(qkdsim::result_json(cfg, stats).dump(2) + "\n", where, quiet);
    return stats.detected ? kExitDetected : kExitOk;
}

int cmd_verify_proof(int samples, int ancillaDim, uint64_t seed,
                     const std::string& outPath, bool quiet) {
    const qkdsim::ProofReport report =
        qkdsim::run_proof_sampling(samples, ancillaDim, seed);
    nlohmann::ordered_json doc;
    doc["samples"] = report.samples;
    doc["ancillaDim"] = ancillaDim;
    doc["seed"] = seed;
    doc["filtered"] = report.filtered;
    doc["maxFilteredPhiSpread"] = report.maxFilteredPhiSpread;
    doc["maxFilteredHolevoBits"] = report.maxFilteredHolevoBits;
    doc["allVerdictsPass"] = report.allVerdictsPass;
    doc["pass"] = report.pass;
    emit(doc.dump(2) + "\n", outPath, quiet);
    return report.pass ? kExitOk : kExitDetected;
}

int cmd_scan(const std::string& family, const std::string& gridSpec,
             const std::string& configPath, const std::string& outPath, bool quiet) {
    if (family != "controlled-phase")
        throw qkdsim::ConfigError("unknown family '" + family +
                                  "'; available families: controlled-phase");
    qkdsim::TimingConfig timing;
    if (!configPath.empty()) {
        timing = qkdsim::load_session_config(configPath).timing;
    } else {
        timing.eveDomainLength = timing.loop_delay();
    }
    const auto rows = qkdsim::tradeoff_scan(parse_grid(gridSpec), timing);
    std::string csv = "family,theta,detection_probability,eve_information_bits\n";
    for (const auto& row : rows) {
        csv += family + "," + format_double(row.theta) + "," +
               format_double(row.detectionProbability) + "," +
               format_double(row.eveInformationBits) + "\n";
    }
    emit(csv, outPath, quiet);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Relativistic orthogonal-states QKD protocol simulator"};
    app.require_subcommand(1);

    std::string configPath, outPath, family = "controlled-phase";
    std::string gridSpec = "0:3.141592653589793:11";
    uint64_t seed = 1;
    bool quiet = false;
    int samples = 1000, ancillaDim = 4;

    auto* simulate = app.add_subcommand("simulate", "Run a protocol session");
    simulate->add_option("--config", configPath, "Session config JSON")->required();
    auto* seedOpt = simulate->add_option("--seed", seed, "Override the config seed");
    simulate->add_option("--out", outPath, "Result file (JSON)");
    simulate->add_flag("--quiet", quiet, "Suppress stdout copy when --out is given");

    auto* verify = app.add_subcommand("verify-proof",
                                      "Sample causal attacks and check the security argument");
    verify->add_option("--samples", samples, "Number of sampled attacks")
        ->check(CLI::PositiveNumber);
    verify->add_option("--ancilla-dim", ancillaDim, "Eve ancilla dimension")
        ->check(CLI::Range(2, 16));
    verify->add_option("--seed", seed, "Sampling seed");
    verify->add_option("--out", outPath, "Report file (JSON)");
    verify->add_flag("--quiet", quiet, "Suppress stdout copy when --out is given");

    auto* scan = app.add_subcommand("scan", "Information-disturbance tradeoff scan");
    scan->add_option("--family", family, "Attack family");
    scan->add_option("--grid", gridSpec, "Parameter grid 'start:stop:count'");
    scan->add_option("--config", configPath, "Session config JSON (timing section used)");
    scan->add_option("--out", outPath, "Table file (CSV)");
    scan->add_flag("--quiet", quiet, "Suppress stdout copy when --out is given");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (simulate->parsed())
            return cmd_simulate(configPath, seedOpt->count() > 0, seed, outPath, quiet);
        if (verify->parsed())
            return cmd_verify_proof(samples, ancillaDim, seed, outPath, quiet);
        return cmd_scan(family, gridSpec, configPath, outPath, quiet);
    } catch (const qkdsim::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}
