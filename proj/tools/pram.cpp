// pram: run, validate, compile and cross-check redistribution scenarios.

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pram/compiler.hpp"
#include "pram/engine.hpp"
#include "pram/error.hpp"
#include "pram/io.hpp"
#include "pram/oracle.hpp"
#include "pram/scenario.hpp"

namespace fs = std::filesystem;

namespace {

fs::path executable_path() {
    char buffer[4096];
    ssize_t n = ::readlink("/proc/self/exe", buffer, sizeof buffer - 1);
    if (n <= 0) return {};
    buffer[n] = '\0';
    return fs::path(buffer);
}

// A scenario argument is a literal path, or a name looked up in
// $PRAM_SCENARIOS, then in the scenario directories next to the installed
// binary (share/pram/scenarios for an install tree).
std::string resolve_scenario(const std::string& arg) {
    std::error_code ec;
    if (fs::exists(arg, ec)) return arg;

    std::vector<fs::path> roots;
    if (const char* env = std::getenv("PRAM_SCENARIOS")) roots.emplace_back(env);
    fs::path exe = executable_path();
    if (!exe.empty()) {
        fs::path bin_dir = exe.parent_path();
        roots.push_back(bin_dir.parent_path() / "share" / "pram" / "scenarios");
        roots.push_back(bin_dir.parent_path() / "scenarios");
        roots.push_back(bin_dir / "scenarios");
        // build-tree layout: <root>/build/tools/pram next to <root>/scenarios
        roots.push_back(bin_dir.parent_path().parent_path() / "scenarios");
    }
    for (const fs::path& root : roots) {
        for (const fs::path candidate : {root / arg, root / (arg + ".json")}) {
            if (fs::exists(candidate, ec)) return candidate.string();
        }
    }
    std::string searched;
    for (const fs::path& root : roots) {
        searched += "\n  " + root.string();
    }
    throw pram::Error::runtime("scenario not found: " + arg +
                               (searched.empty() ? "" : " (searched:" + searched + ")"));
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const std::string& w : warnings) std::cerr << "warning: " << w << '\n';
}

int cmd_run(const std::string& scenario_arg, int iterations, const std::string& out_dir,
            int threads) {
    pram::Scenario scenario = pram::load_scenario(resolve_scenario(scenario_arg));
    pram::RunOutputs outputs = pram::run_scenario(scenario, iterations, threads);
    print_warnings(outputs.warnings);
    if (!out_dir.empty()) {
        pram::write_run_outputs(outputs, out_dir);
        std::cout << "wrote " << (fs::path(out_dir) / "trajectory.csv").string() << ", "
                  << (fs::path(out_dir) / "probes.csv").string() << ", "
                  << (fs::path(out_dir) / "summary.txt").string() << '\n';
    }
    std::cout << outputs.summary_text;
    return 0;
}

int cmd_validate(const std::string& scenario_arg) {
    pram::Scenario scenario = pram::load_scenario(resolve_scenario(scenario_arg));
    std::cout << "ok: " << scenario.name << " (" << scenario.initial.size() << " groups, "
              << scenario.rules.size() << " rules, " << scenario.probes.size() << " probes)\n";
    return 0;
}

int cmd_compile(const std::string& records_path, const std::string& scenario_arg,
                const std::string& out_path) {
    pram::Scenario scenario = pram::load_scenario(resolve_scenario(scenario_arg));
    std::vector<pram::IndividualRecord> records = pram::read_records_file(records_path);

    // keep whatever the probes need on top of what the rules touch
    std::set<std::string> keep;
    for (const pram::Probe& p : scenario.probes) {
        keep.insert(p.relation);
        for (const auto& [name, value] : p.predicate.tests()) keep.insert(name);
    }
    pram::Population compiled = pram::compile(records, scenario.rules, keep);

    // declared sites survive even when no record points at them (rules may
    // move groups there)
    for (const auto& [id, site] : scenario.initial.sites()) compiled.add_site(site);
    scenario.initial = std::move(compiled);

    // round-trip through the validator so the emitted file is known good
    std::string text = pram::serialize_scenario(scenario);
    pram::parse_scenario(text);

    std::cerr << "compiled " << records.size() << " records into " << scenario.initial.size()
              << " groups\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        pram::write_file(out_path, text);
        std::cout << "wrote " << out_path << '\n';
    }
    return 0;
}

int cmd_oracle(const std::string& scenario_arg, long long agents, int replicates,
               unsigned long long seed, int iterations, int threads) {
    pram::Scenario scenario = pram::load_scenario(resolve_scenario(scenario_arg));
    int t = iterations >= 0 ? iterations : scenario.iterations;
    pram::AgentSimResult result =
        pram::simulate_agents(scenario.initial, scenario.rules, t, seed, replicates, agents,
                              scenario.options, threads >= 1 ? threads : 1);
    std::cerr << "simulated " << result.total_agents << " agents x " << result.replicates
              << " replicates for " << t << " iterations\n";
    std::cout << "iter,signature,mean,se\n";
    for (std::size_t it = 0; it < result.mean.size(); ++it) {
        for (std::size_t k = 0; k < result.keys.size(); ++k) {
            if (result.mean[it][k] == 0.0 && result.se[it][k] == 0.0) continue;
            std::cout << it << ',' << pram::csv_field(result.keys[k], true) << ','
                      << pram::format_real(result.mean[it][k]) << ','
                      << pram::format_real(result.se[it][k]) << '\n';
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pram: lifted redistribution simulator"};
    app.set_version_flag("--version", "0.1.0");
    app.require_subcommand(1);

    std::string scenario_arg, out_dir, out_path, records_path;
    int iterations = -1;
    int threads = -1;
    long long agents = 10000;
    int replicates = 20;
    unsigned long long seed = 42;

    CLI::App* run = app.add_subcommand("run", "Run a scenario and report its trajectory");
    run->add_option("scenario", scenario_arg, "Scenario file or built-in name")->required();
    run->add_option("--iterations,-n", iterations, "Override the scenario's iteration count");
    run->add_option("--out,-o", out_dir,
                    "Directory for trajectory.csv, probes.csv and summary.txt");
    run->add_option("--threads,-t", threads, "Worker threads for group evaluation");

    CLI::App* validate = app.add_subcommand("validate", "Check a scenario without running it");
    validate->add_option("scenario", scenario_arg, "Scenario file or built-in name")->required();

    CLI::App* compile =
        app.add_subcommand("compile", "Group individual records into a minimal population");
    compile->add_option("--records,-r", records_path, "Record file (CSV or TSV with header)")
        ->required();
    compile->add_option("--scenario,-s", scenario_arg, "Scenario supplying the rules")
        ->required();
    compile->add_option("--out,-o", out_path, "Output scenario path (stdout when omitted)");

    CLI::App* oracle = app.add_subcommand(
        "oracle", "Agent-level Monte Carlo cross-check of a scenario (CSV on stdout)");
    oracle->add_option("scenario", scenario_arg, "Scenario file or built-in name")->required();
    oracle->add_option("--agents,-a", agents, "Approximate total agent count");
    oracle->add_option("--replicates,-r", replicates, "Independent replicates");
    oracle->add_option("--seed", seed, "Base RNG seed");
    oracle->add_option("--iterations,-n", iterations, "Override the scenario's iteration count");
    oracle->add_option("--threads,-t", threads, "Replicate-level worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;  // bad usage is a validation failure
    }

    try {
        if (*run) return cmd_run(scenario_arg, iterations, out_dir, threads);
        if (*validate) return cmd_validate(scenario_arg);
        if (*compile) return cmd_compile(records_path, scenario_arg, out_path);
        if (*oracle) return cmd_oracle(scenario_arg, agents, replicates, seed, iterations,
                                       threads);
    } catch (const pram::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.kind() == pram::Error::Kind::validation ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
