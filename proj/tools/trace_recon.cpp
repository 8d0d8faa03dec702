// trace-recon: reconstruct past action instances from file-system timestamps.
//
//   trace-recon scan <metadata> [signatures...] [--format table|csv|records] [--utc-display]
//   trace-recon calibrate [samples] [--k 2]
//   trace-recon simulate <scenario> --out <prefix> [--seed N] [--check]

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "tracerecon/bodyfile.hpp"
#include "tracerecon/calibration.hpp"
#include "tracerecon/engine.hpp"
#include "tracerecon/report.hpp"
#include "tracerecon/signatures.hpp"
#include "tracerecon/simulator.hpp"

namespace fs = std::filesystem;
using namespace trace_recon;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitParse = 3;
constexpr int kExitOracle = 4;

#ifndef TRACE_RECON_DEFAULT_SIG_DIR
#define TRACE_RECON_DEFAULT_SIG_DIR "signatures"
#endif

std::string signature_dir() {
    if (const char* env = std::getenv("TRACE_RECON_SIG_DIR"); env && *env) return env;
    return TRACE_RECON_DEFAULT_SIG_DIR;
}

std::vector<std::string> default_signature_files() {
    const fs::path dir = signature_dir();
    std::error_code ec;
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
        if (entry.is_regular_file() && entry.path().extension() == ".sig") files.push_back(entry.path().string());
    }
    if (ec) throw IoError(dir.string(), "cannot read signature directory");
    std::sort(files.begin(), files.end());
    return files;
}

struct ScanOptions {
    std::string metadata;
    std::vector<std::string> signatures;
    std::string format = "table";
    bool utc_display = false;
    std::string label;
};

int run_scan(const ScanOptions& opt) {
    ReportFormat format = ReportFormat::Table;
    if (opt.format == "csv") {
        format = ReportFormat::Csv;
    } else if (opt.format == "records") {
        format = ReportFormat::Records;
    }

    std::vector<SignaturePack> packs;
    try {
        const auto files = opt.signatures.empty() ? default_signature_files() : opt.signatures;
        if (files.empty()) throw IoError(signature_dir(), "no .sig files found");
        for (const auto& file : files) {
            try {
                packs.push_back(load_signature_pack(file));
            } catch (const SignatureError& e) {
                std::cerr << "trace-recon: " << file << ":" << e.line() << ": " << e.what() << '\n';
                return kExitParse;
            }
        }
    } catch (const IoError& e) {
        std::cerr << "trace-recon: " << e.what() << '\n';
        return kExitIo;
    }

    SignaturePack pack;
    try {
        pack = merge_packs(packs);
    } catch (const std::invalid_argument& e) {
        std::cerr << "trace-recon: " << e.what() << '\n';
        return kExitParse;
    }

    std::vector<ParseDiagnostic> diagnostics;
    std::vector<ObjectRecord> objects;
    try {
        objects = load_metadata(opt.metadata, MetadataFormat::Bodyfile, &diagnostics);
    } catch (const IoError& e) {
        std::cerr << "trace-recon: " << e.what() << '\n';
        return kExitIo;
    }
    for (const auto& d : diagnostics) {
        std::cerr << "trace-recon: " << opt.metadata << ":" << d.line << ": " << d.message << '\n';
    }

    std::string label = opt.label;
    if (label.empty()) label = opt.metadata == "-" ? "stdin" : fs::path(opt.metadata).stem().string();

    const Reconstruction result = reconstruct_detailed(objects, pack);
    render_report(std::cout, build_report_rows(label, result), format,
                  opt.utc_display ? TimeDisplay::Iso8601 : TimeDisplay::Epoch);
    return kExitOk;
}

int run_calibrate(const std::string& source, double k) {
    std::vector<DurationSample> samples;
    try {
        if (source == "-") {
            samples = read_duration_samples(std::cin);
        } else {
            std::ifstream in(source);
            if (!in) {
                std::cerr << "trace-recon: " << source << ": cannot open samples file\n";
                return kExitIo;
            }
            samples = read_duration_samples(in);
        }
        const ThresholdEstimate est = estimate_threshold(samples, k);
        std::cout << std::fixed << std::setprecision(4);
        std::cout << "n: " << est.n << '\n'
                  << "mean: " << est.mean << '\n'
                  << "sigma: " << est.sigma << '\n'
                  << "k: " << est.k << '\n'
                  << "theta: " << est.theta << '\n';
    } catch (const std::invalid_argument& e) {
        std::cerr << "trace-recon: " << source << ": " << e.what() << '\n';
        return kExitParse;
    }
    return kExitOk;
}

struct SimulateOptions {
    std::string scenario;
    std::string out;
    std::uint64_t seed = 0;
    bool check = false;
};

bool write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) return false;
    out << content;
    return static_cast<bool>(out);
}

int run_simulate(const SimulateOptions& opt) {
    Scenario scenario;
    try {
        scenario = load_scenario(opt.scenario);
    } catch (const IoError& e) {
        std::cerr << "trace-recon: " << e.what() << '\n';
        return kExitIo;
    } catch (const ScenarioError& e) {
        std::cerr << "trace-recon: " << opt.scenario << ":" << e.line() << ": " << e.what() << '\n';
        return kExitParse;
    }

    SimulationResult sim;
    SignaturePack pack;
    try {
        sim = simulate({}, scenario.specs, scenario.schedule, opt.seed);
        pack = derive_signature_pack(scenario.specs);
    } catch (const std::exception& e) {
        std::cerr << "trace-recon: " << e.what() << '\n';
        return kExitParse;
    }

    std::ostringstream body;
    std::ostringstream truth;
    std::ostringstream sig;
    const auto records = to_object_records(sim.final_state);
    try {
        write_bodyfile(body, records);
    } catch (const std::invalid_argument& e) {
        std::cerr << "trace-recon: " << e.what() << '\n';
        return kExitParse;
    }
    write_ground_truth(truth, sim.truth);
    write_signature_pack(sig, pack);

    for (const auto& [suffix, text] : {std::pair{".body", body.str()}, std::pair{".truth.tsv", truth.str()},
                                       std::pair{".sig", sig.str()}}) {
        if (!write_file(opt.out + suffix, text)) {
            std::cerr << "trace-recon: " << opt.out << suffix << ": cannot write\n";
            return kExitIo;
        }
    }

    if (!opt.check) return kExitOk;

    // Check what a scan of the exported body file would see.
    std::istringstream reread(body.str());
    const auto objects = parse_bodyfile(reread).records;
    const auto results = reconstruct(objects, pack);
    const OracleReport report = oracle_check(sim.truth, scenario.specs, results);
    std::cout << "soundness: " << (report.soundness ? "pass" : "FAIL") << '\n'
              << "count-bound: " << (report.count_bound ? "pass" : "FAIL") << '\n'
              << "most-recent: " << (report.most_recent ? "pass" : "FAIL") << '\n'
              << "false-positives: " << (report.no_false_positives ? "pass" : "FAIL") << '\n';
    for (const auto& v : report.violations) {
        std::cout << "  " << v.property << " [" << v.action << "] " << v.detail << '\n';
    }
    return report.passed() ? kExitOk : kExitOracle;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reconstruct past action instances from file-system timestamp metadata"};
    app.require_subcommand(1);

    ScanOptions scan;
    auto* scan_cmd = app.add_subcommand("scan", "Match signatures against a body file and print a timeline");
    scan_cmd->add_option("metadata", scan.metadata, "Body file, or - for stdin")->required();
    scan_cmd->add_option("signatures", scan.signatures,
                         "Signature files (default: every .sig in $TRACE_RECON_SIG_DIR)");
    scan_cmd->add_option("--format", scan.format, "Output format")
        ->check(CLI::IsMember({"table", "csv", "records"}));
    scan_cmd->add_flag("--utc-display", scan.utc_display, "Render times as ISO-8601 UTC");
    scan_cmd->add_option("--label", scan.label, "Computer label for the report (default: metadata file name)");

    std::string samples = "-";
    double k = kDefaultSigmaMultiplier;
    auto* cal_cmd = app.add_subcommand("calibrate", "Estimate an update threshold from measured delays");
    cal_cmd->add_option("samples", samples, "One duration in seconds per line, or - for stdin");
    cal_cmd->add_option("--k", k, "Sigma multiplier")->check(CLI::PositiveNumber);

    SimulateOptions sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Run a scenario and export a body file plus ground truth");
    sim_cmd->add_option("scenario", sim.scenario, "Scenario file")->required();
    sim_cmd->add_option("--out", sim.out, "Output prefix for .body, .truth.tsv and .sig")->required();
    sim_cmd->add_option("--seed", sim.seed, "Random seed");
    sim_cmd->add_flag("--check", sim.check, "Reconstruct the export and verify it against the ground truth");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (*scan_cmd) return run_scan(scan);
    if (*cal_cmd) return run_calibrate(samples, k);
    return run_simulate(sim);
}
