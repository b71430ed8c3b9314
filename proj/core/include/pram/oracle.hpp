#pragma once
// Independent reference computations the engine is checked against.
//
// When every probability in every rule is a constant, group dynamics are a
// Markov chain on signature space: expected masses after t iterations are
// init x P^t. That linear-algebra path shares no code with the engine's
// potential-group machinery, which is the point.
//
// The Monte Carlo oracle goes the other way: it explodes groups into
// individual agents and samples each agent's joint outcome per iteration,
// with aggregates recomputed from the agent population at iteration start.
// Engine masses should sit within sampling error of the replicate means.

#include <cstdint>
#include <vector>

#include "pram/engine.hpp"
#include "pram/model.hpp"
#include "pram/rule.hpp"

namespace pram {

// Signatures reachable from `initial` under the rules' action structure
// (clause selection by condition, every bundle of the selected clauses,
// probabilities ignored). Result is in canonical key order. Throws when the
// closure exceeds `cap`.
std::vector<Signature> reachable_signatures(const std::vector<Signature>& initial,
                                            const std::vector<Rule>& rules,
                                            std::size_t cap = 10000);

struct TransitionMatrix {
    std::vector<Signature> states;   // canonical key order
    std::vector<std::string> keys;
    std::vector<std::vector<double>> rows;  // rows[i][j] = P(state i -> state j)

    std::size_t index_of(std::string_view key) const;  // throws if unknown
};

// Requires constant probabilities everywhere (the stationarity check) and a
// state list closed under the rules. Rows of the result sum to 1 within
// 1e-12; states without a firing rule get an identity row.
TransitionMatrix build_transition_matrix(const std::vector<Rule>& rules,
                                         const std::vector<Signature>& states,
                                         const EngineOptions& options = {});

// init x P^t, computed with compensated summation.
std::vector<double> markov_expected_counts(const TransitionMatrix& tm, std::vector<double> init,
                                           int t);

struct AgentSimResult {
    std::vector<std::string> keys;          // union of signatures seen, sorted
    // mean[t][k] / se[t][k]: replicate mean and standard error of the agent
    // count with signature keys[k] after iteration t (t = 0 is the initial
    // state). se uses the sample standard deviation over replicates.
    std::vector<std::vector<double>> mean;
    std::vector<std::vector<double>> se;
    long long total_agents = 0;
    int replicates = 0;
};

// Discretizes the population into agents (per-group llround of mass, scaled
// so they total ~agent_total when that is > 0) and runs `replicates`
// independent simulations of t iterations. Replicate r draws from a stream
// seeded by (seed, r), so results are reproducible and replicate-parallelism
// cannot change them.
AgentSimResult simulate_agents(const Population& population, const std::vector<Rule>& rules,
                               int t, std::uint64_t seed, int replicates,
                               long long agent_total = 0, const EngineOptions& options = {},
                               int threads = 1);

}  // namespace pram
