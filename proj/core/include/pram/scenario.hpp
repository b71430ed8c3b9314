#pragma once
// Scenario files: a complete simulation setup as one JSON document.
//
// {
//   "name": "flu-two-rules",
//   "description": "...",                         optional
//   "iterations": 2,                              optional, default 10
//   "options": {                                  optional
//     "normalization": "strict" | "fill",
//     "conflict_policy": "error" | "last_writer_wins",
//     "compaction_threshold": 0.0
//   },
//   "sites": ["adams", {"id": "berry", "name": "Berry Elementary"}],
//   "groups": [
//     {"name": "g1", "mass": 900,
//      "features": {"flu": "s", "income": "m"},
//      "relations": {"has_location": "adams"}}
//   ],
//   "rules": <DSL text> | [<DSL lines>] | [<structured rule>],
//   "probes": [
//     {"name": "exposed_adams", "site": "adams", "relation": "has_school",
//      "kind": "proportion", "where": {"flu": "i"}}
//   ],
//   "domains": {"flu": ["s", "i", "r"]}           optional extra values
// }
//
// A structured rule is {"name", "clauses": [{"when": {attr: value, ...} or
// a DSL condition string, "distribution": [{"p": number or expression
// string, "actions": [DSL action statements]}]}]}. Structured rules are
// compiled to DSL text and parsed through the one grammar, so both forms
// obey identical static checks.
//
// Loading validates everything it can and reports all problems at once.

#include <iosfwd>
#include <string>
#include <vector>

#include "pram/engine.hpp"
#include "pram/model.hpp"
#include "pram/rule.hpp"

namespace pram {

struct Scenario {
    std::string name;
    std::string description;
    int iterations = 10;
    EngineOptions options;
    Population initial;            // groups and sites
    std::string rules_source;      // canonical DSL text
    std::vector<Rule> rules;
    std::vector<Probe> probes;
    AttributeDomains domains;      // scenario-wide, for exclusivity checks
};

Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);

// Structured JSON rendering (rules as structured trees). parse_scenario on
// the output reproduces the scenario.
std::string serialize_scenario(const Scenario& scenario);
void save_scenario(const Scenario& scenario, const std::string& path);

struct RunOutputs {
    std::string trajectory_csv;
    std::string probes_csv;
    std::string summary_text;
    Trajectory trajectory;
    std::vector<std::string> warnings;  // query anomalies, deduplicated
};

// Runs the scenario and renders the three output documents. Overrides win
// over the scenario's own iteration count / thread setting when >= 0.
RunOutputs run_scenario(const Scenario& scenario, int iterations_override = -1,
                        int threads_override = -1);

// Writes trajectory.csv, probes.csv and summary.txt under `directory`
// (created if needed).
void write_run_outputs(const RunOutputs& outputs, const std::string& directory);

}  // namespace pram
