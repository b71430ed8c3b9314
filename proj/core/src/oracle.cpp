#include "pram/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <thread>

namespace pram {

namespace {

std::vector<const Rule*> name_sorted(const std::vector<Rule>& rules) {
    std::vector<const Rule*> out;
    out.reserve(rules.size());
    for (const Rule& r : rules) out.push_back(&r);
    std::sort(out.begin(), out.end(), [](const Rule* a, const Rule* b) { return a->name < b->name; });
    return out;
}

// Neumaier's variant of Kahan summation: the oracle should be as close to
// exact as doubles allow, so divergence in a comparison points at the engine.
struct CompensatedSum {
    double sum = 0.0;
    double compensation = 0.0;

    void add(double value) {
        double t = sum + value;
        if (std::fabs(sum) >= std::fabs(value)) {
            compensation += (sum - t) + value;
        } else {
            compensation += (value - t) + sum;
        }
        sum = t;
    }

    double result() const { return sum + compensation; }
};

}  // namespace

std::vector<Signature> reachable_signatures(const std::vector<Signature>& initial,
                                            const std::vector<Rule>& rules, std::size_t cap) {
    std::vector<const Rule*> ordered = name_sorted(rules);
    std::map<std::string, Signature> seen;
    std::deque<Signature> frontier;
    for (const Signature& sig : initial) {
        if (seen.emplace(sig.canonical(), sig).second) frontier.push_back(sig);
    }
    while (!frontier.empty()) {
        Signature sig = std::move(frontier.front());
        frontier.pop_front();

        // first matching clause per rule, every bundle of those clauses
        std::vector<const Clause*> firing;
        for (const Rule* rule : ordered) {
            for (const Clause& c : rule->clauses) {
                if (c.condition.matches(sig)) {
                    firing.push_back(&c);
                    break;
                }
            }
        }
        if (firing.empty()) continue;

        std::size_t total = 1;
        for (const Clause* c : firing) total *= c->bundles.size();
        std::vector<std::size_t> pick(firing.size(), 0);
        for (std::size_t n = 0; n < total; ++n) {
            Signature out = sig;
            for (std::size_t k = 0; k < firing.size(); ++k) {
                for (const Action& a : firing[k]->bundles[pick[k]].actions) a.apply(out);
            }
            std::string key = out.canonical();
            if (seen.emplace(key, out).second) {
                if (seen.size() > cap) {
                    throw Error::validation("reachable signature space exceeds cap of " +
                                            std::to_string(cap));
                }
                frontier.push_back(std::move(out));
            }
            for (std::size_t k = firing.size(); k-- > 0;) {
                if (++pick[k] < firing[k]->bundles.size()) break;
                pick[k] = 0;
            }
        }
    }
    std::vector<Signature> out;
    out.reserve(seen.size());
    for (auto& [key, sig] : seen) out.push_back(std::move(sig));
    return out;
}

std::size_t TransitionMatrix::index_of(std::string_view key) const {
    auto it = std::lower_bound(keys.begin(), keys.end(), key);
    if (it == keys.end() || *it != key) {
        throw Error::runtime("signature '" + std::string(key) + "' is not in the state space");
    }
    return static_cast<std::size_t>(it - keys.begin());
}

TransitionMatrix build_transition_matrix(const std::vector<Rule>& rules,
                                         const std::vector<Signature>& states,
                                         const EngineOptions& options) {
    for (const Rule& rule : rules) {
        for (const Clause& c : rule.clauses) {
            for (const ActionBundle& b : c.bundles) {
                if (!b.probability.is_constant()) {
                    throw Error::validation("rule '" + rule.name +
                                            "' has a non-constant probability; the chain oracle "
                                            "requires stationary rules");
                }
            }
        }
    }

    TransitionMatrix tm;
    tm.states = states;
    std::sort(tm.states.begin(), tm.states.end(),
              [](const Signature& a, const Signature& b) { return a.canonical() < b.canonical(); });
    tm.keys.reserve(tm.states.size());
    for (const Signature& s : tm.states) tm.keys.push_back(s.canonical());
    for (std::size_t i = 1; i < tm.keys.size(); ++i) {
        if (tm.keys[i] == tm.keys[i - 1]) {
            throw Error::validation("duplicate signature in state space: " + tm.keys[i]);
        }
    }

    std::vector<const Rule*> ordered = name_sorted(rules);
    Population empty;
    Snapshot dummy(empty);

    tm.rows.assign(tm.states.size(), std::vector<double>(tm.states.size(), 0.0));
    for (std::size_t i = 0; i < tm.states.size(); ++i) {
        Group probe(tm.states[i], 1.0, "state_" + std::to_string(i));

        std::vector<BundleDistribution> dists;
        std::vector<std::string> names;
        for (const Rule* rule : ordered) {
            if (auto d = evaluate(*rule, probe, dummy, options.normalization)) {
                dists.push_back(std::move(*d));
                names.push_back(rule->name);
            }
        }
        if (dists.empty()) {
            tm.rows[i][i] = 1.0;
            continue;
        }
        std::vector<const BundleDistribution*> parts;
        for (const BundleDistribution& d : dists) parts.push_back(&d);
        for (const ComposedOutcome& out : compose(parts, names, options.conflict_policy)) {
            Signature sig = tm.states[i];
            for (const Action* a : out.actions) a->apply(sig);
            std::size_t j;
            try {
                j = tm.index_of(sig.canonical());
            } catch (const Error&) {
                throw Error::validation("state space is not closed: " + tm.keys[i] +
                                        " can reach " + sig.canonical());
            }
            tm.rows[i][j] += out.probability;
        }
    }

    for (std::size_t i = 0; i < tm.rows.size(); ++i) {
        CompensatedSum sum;
        for (double p : tm.rows[i]) sum.add(p);
        if (std::fabs(sum.result() - 1.0) > 1e-12) {
            throw Error::validation("transition row for " + tm.keys[i] + " sums to " +
                                    std::to_string(sum.result()));
        }
    }
    return tm;
}

std::vector<double> markov_expected_counts(const TransitionMatrix& tm, std::vector<double> init,
                                           int t) {
    if (init.size() != tm.states.size()) {
        throw Error::validation("initial vector length does not match the state space");
    }
    if (t < 0) throw Error::validation("t must be >= 0");
    std::vector<double> current = std::move(init);
    std::vector<double> next(current.size());
    for (int step = 0; step < t; ++step) {
        for (std::size_t j = 0; j < next.size(); ++j) {
            CompensatedSum sum;
            for (std::size_t i = 0; i < current.size(); ++i) {
                sum.add(current[i] * tm.rows[i][j]);
            }
            next[j] = sum.result();
        }
        current.swap(next);
    }
    return current;
}

namespace {

double next_unit_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct ReplicateCounts {
    // per iteration: signature key -> agent count
    std::vector<std::map<std::string, long long>> by_iteration;
};

ReplicateCounts run_replicate(const Population& population, const std::vector<const Rule*>& rules,
                              int t, std::uint64_t seed, std::uint32_t replicate, double scale,
                              const EngineOptions& options) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      replicate};
    std::mt19937_64 rng(seq);

    // signature registry: agents carry indices, not strings
    std::vector<Signature> signatures;
    std::vector<std::string> keys;
    std::map<std::string, std::size_t, std::less<>> by_key;
    auto intern = [&](const Signature& sig) {
        std::string key = sig.canonical();
        auto it = by_key.find(key);
        if (it != by_key.end()) return it->second;
        std::size_t id = signatures.size();
        signatures.push_back(sig);
        by_key.emplace(std::move(key), id);
        keys.push_back(signatures.back().canonical());
        return id;
    };

    std::vector<std::size_t> agents;
    for (const auto& [key, group] : population.groups()) {
        long long n = std::llround(group.mass() * scale);
        if (n <= 0) continue;
        std::size_t id = intern(group.signature());
        agents.insert(agents.end(), static_cast<std::size_t>(n), id);
    }

    ReplicateCounts counts;
    counts.by_iteration.resize(static_cast<std::size_t>(t) + 1);
    auto record = [&](int iteration) {
        auto& slot = counts.by_iteration[static_cast<std::size_t>(iteration)];
        for (std::size_t id : agents) ++slot[keys[id]];
    };
    record(0);

    struct OutcomeTable {
        std::vector<double> cumulative;
        std::vector<std::size_t> target;
    };

    for (int iteration = 0; iteration < t; ++iteration) {
        // aggregates come from the agent population as of iteration start
        Population agent_population;
        for (const auto& [id, site] : population.sites()) agent_population.add_site(site);
        {
            std::map<std::size_t, long long> tally;
            for (std::size_t id : agents) ++tally[id];
            for (const auto& [id, n] : tally) {
                agent_population.upsert(Group(signatures[id], static_cast<double>(n)));
            }
        }
        Snapshot snapshot(agent_population);

        // Every id an agent holds here was interned before this iteration
        // began; interning during the loop only mints target ids, which are
        // never looked up until the next iteration.
        std::vector<OutcomeTable> tables(signatures.size());
        std::vector<bool> computed(signatures.size(), false);

        for (std::size_t& agent : agents) {
            std::size_t id = agent;
            if (!computed[id]) {
                Group group(signatures[id], 1.0);
                std::vector<BundleDistribution> dists;
                std::vector<std::string> names;
                for (const Rule* rule : rules) {
                    if (auto d = evaluate(*rule, group, snapshot, options.normalization)) {
                        dists.push_back(std::move(*d));
                        names.push_back(rule->name);
                    }
                }
                OutcomeTable table;
                if (!dists.empty()) {
                    std::vector<const BundleDistribution*> parts;
                    for (const BundleDistribution& d : dists) parts.push_back(&d);
                    double acc = 0.0;
                    for (const ComposedOutcome& out :
                         compose(parts, names, options.conflict_policy)) {
                        Signature sig = signatures[id];
                        for (const Action* a : out.actions) a->apply(sig);
                        acc += out.probability;
                        table.cumulative.push_back(acc);
                        table.target.push_back(intern(sig));
                    }
                }
                tables[id] = std::move(table);
                computed[id] = true;
            }
            OutcomeTable& table = tables[id];
            if (table.target.empty()) continue;  // no rule fires, agent stays
            double u = next_unit_double(rng);
            std::size_t pick = table.target.size() - 1;
            for (std::size_t k = 0; k < table.cumulative.size(); ++k) {
                if (u < table.cumulative[k]) {
                    pick = k;
                    break;
                }
            }
            agent = table.target[pick];
        }
        record(iteration + 1);
    }
    return counts;
}

}  // namespace

AgentSimResult simulate_agents(const Population& population, const std::vector<Rule>& rules, int t,
                               std::uint64_t seed, int replicates, long long agent_total,
                               const EngineOptions& options, int threads) {
    if (t < 0) throw Error::validation("t must be >= 0");
    if (replicates < 1) throw Error::validation("need at least one replicate");
    double total_mass = population.total_mass();
    double scale = 1.0;
    if (agent_total > 0) {
        if (total_mass <= 0.0) throw Error::validation("cannot scale an empty population");
        scale = static_cast<double>(agent_total) / total_mass;
    }
    std::vector<const Rule*> ordered = name_sorted(rules);

    std::vector<ReplicateCounts> all(static_cast<std::size_t>(replicates));
    int workers = std::clamp(threads, 1, replicates);
    if (workers == 1) {
        for (int r = 0; r < replicates; ++r) {
            all[static_cast<std::size_t>(r)] =
                run_replicate(population, ordered, t, seed, static_cast<std::uint32_t>(r), scale,
                              options);
        }
    } else {
        std::atomic<int> cursor{0};
        std::mutex error_mutex;
        std::exception_ptr first_error;
        auto worker = [&]() {
            for (;;) {
                int r = cursor.fetch_add(1);
                if (r >= replicates) return;
                try {
                    all[static_cast<std::size_t>(r)] =
                        run_replicate(population, ordered, t, seed,
                                      static_cast<std::uint32_t>(r), scale, options);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        };
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    std::set<std::string> key_union;
    for (const ReplicateCounts& rc : all) {
        for (const auto& slot : rc.by_iteration) {
            for (const auto& [key, n] : slot) key_union.insert(key);
        }
    }

    AgentSimResult result;
    result.keys.assign(key_union.begin(), key_union.end());
    result.replicates = replicates;
    if (!all.empty() && !all[0].by_iteration.empty()) {
        for (const auto& [key, n] : all[0].by_iteration[0]) result.total_agents += n;
    }
    std::map<std::string, std::size_t> key_index;
    for (std::size_t k = 0; k < result.keys.size(); ++k) key_index[result.keys[k]] = k;

    result.mean.assign(static_cast<std::size_t>(t) + 1,
                       std::vector<double>(result.keys.size(), 0.0));
    result.se = result.mean;
    for (std::size_t it = 0; it <= static_cast<std::size_t>(t); ++it) {
        for (std::size_t k = 0; k < result.keys.size(); ++k) {
            double sum = 0.0, sum_sq = 0.0;
            for (const ReplicateCounts& rc : all) {
                auto found = rc.by_iteration[it].find(result.keys[k]);
                double v = found == rc.by_iteration[it].end()
                               ? 0.0
                               : static_cast<double>(found->second);
                sum += v;
                sum_sq += v * v;
            }
            double n = static_cast<double>(replicates);
            double mean = sum / n;
            result.mean[it][k] = mean;
            if (replicates > 1) {
                double variance = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
                result.se[it][k] = std::sqrt(variance / n);
            }
        }
    }
    return result;
}

}  // namespace pram
