#pragma once
// One iteration of mass redistribution.
//
// Every group is evaluated against the same frozen snapshot of the
// population, so results cannot depend on processing order. Per group, the
// distributions of all firing rules are composed into joint outcomes (the
// cartesian product; probabilities multiply). Each outcome is a potential
// group: the parent's signature with the merged action bundle applied and a
// contribution of parent mass x joint probability. Groups that spawned
// anything are zeroed, then contributions are folded back in: into the
// extant group with the same signature when there is one, otherwise into a
// freshly created group.
//
// Bit-exact order independence: rules compose in name order regardless of
// how the caller lists them, and contributions are summed in a canonical
// sort order (parent key, target key, contribution value), so permuting the
// rule list, the group iteration order, or bundle order inside a clause
// reproduces the identical float stream. The parallel path only splits the
// evaluation loop; accumulation stays sequential and canonical, so thread
// count never changes output.

#include <string>
#include <vector>

#include "pram/model.hpp"
#include "pram/rule.hpp"
#include "pram/snapshot.hpp"

namespace pram {

// What to do when two different rules write the same attribute in one joint
// outcome: refuse (default), or let the later rule (in composition order) win.
enum class ConflictPolicy { error, last_writer_wins };

struct EngineOptions {
    NormalizationMode normalization = NormalizationMode::strict;
    ConflictPolicy conflict_policy = ConflictPolicy::error;
    // Groups below this mass are dropped after each iteration; <= 0 keeps
    // everything (the default: zero-mass groups stay extant). Dropping mass
    // breaks exact conservation, which is why this is opt-in.
    double compaction_threshold = 0.0;
    int threads = 1;
};

// One joint outcome of composing several rule distributions.
struct ComposedOutcome {
    double probability = 1.0;
    std::vector<const Action*> actions;        // concatenated in rule order
    std::vector<std::size_t> bundle_indices;   // chosen bundle per composed rule
};

// Cartesian composition. `parts` are the firing rules' distributions in
// canonical (name-sorted) rule order; `rule_names` label errors. The first
// part varies slowest. Probabilities of each outcome multiply in part order.
std::vector<ComposedOutcome> compose(const std::vector<const BundleDistribution*>& parts,
                                     const std::vector<std::string>& rule_names,
                                     ConflictPolicy policy);

struct PotentialGroup {
    Signature signature;
    std::string key;                 // canonical key of signature
    double contribution = 0.0;       // parent mass x joint probability
    // provenance
    std::string parent_key;
    std::vector<std::size_t> bundle_indices;
    std::size_t outcome_index = 0;   // position in the parent's joint enumeration
};

// All potential groups one parent spawns this iteration, in joint-enumeration
// order. Empty when no rule fires (the group then keeps its mass). Rules are
// taken in the given order and must already be canonically sorted; use
// redistribute()/run() unless composing the pipeline by hand.
std::vector<PotentialGroup> generate_potential_groups(const Group& group,
                                                      const std::vector<const Rule*>& rules,
                                                      const Snapshot& snapshot,
                                                      const EngineOptions& options = {},
                                                      QueryLog* log = nullptr);

// One full iteration. Mass is conserved up to float rounding; signatures stay
// unique by construction.
Population redistribute(const Population& population, const std::vector<Rule>& rules,
                        const EngineOptions& options = {}, QueryLog* log = nullptr);

// A named aggregate recorded after every iteration.
struct Probe {
    enum class Kind { mass, proportion };

    std::string name;
    std::string site;
    std::string relation;
    Predicate predicate;
    Kind kind = Kind::proportion;
};

struct Trajectory {
    struct Row {
        int iteration;
        std::string signature;  // canonical serialized form
        double mass;
    };
    struct ProbeValue {
        int iteration;
        std::string probe;
        double value;
    };
    struct IterationStats {
        int iteration;
        std::size_t group_count;
        double total_mass;
    };
    struct FinalGroup {
        std::string display_name;
        std::string signature;
        double mass;
    };

    std::vector<Row> rows;                 // iteration-major, canonical key order
    std::vector<ProbeValue> probe_values;  // evaluated on each end-of-iteration population
    std::vector<IterationStats> stats;
    std::vector<FinalGroup> final_groups;
};

// Applies redistribute `iterations` times. Iteration 0 in the trajectory is
// the initial population; probes are evaluated at every recorded point.
Trajectory run(Population initial, const std::vector<Rule>& rules, int iterations,
               const std::vector<Probe>& probes = {}, const EngineOptions& options = {},
               QueryLog* log = nullptr);

}  // namespace pram
