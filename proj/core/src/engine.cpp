#include "pram/engine.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <tuple>

namespace pram {

namespace {

// Rules apply as an unordered set; name order is the canonical composition
// order so that permuting the input list cannot change anything, not even
// float rounding.
std::vector<const Rule*> canonical_rule_order(const std::vector<Rule>& rules) {
    std::vector<const Rule*> ordered;
    ordered.reserve(rules.size());
    for (const Rule& r : rules) ordered.push_back(&r);
    std::sort(ordered.begin(), ordered.end(),
              [](const Rule* a, const Rule* b) { return a->name < b->name; });
    for (std::size_t i = 1; i < ordered.size(); ++i) {
        if (ordered[i]->name == ordered[i - 1]->name) {
            throw Error::validation("duplicate rule name '" + ordered[i]->name + "'");
        }
    }
    return ordered;
}

std::string group_label(const Group& g) {
    return g.display_name().empty() ? g.key() : g.display_name();
}

}  // namespace

std::vector<ComposedOutcome> compose(const std::vector<const BundleDistribution*>& parts,
                                     const std::vector<std::string>& rule_names,
                                     ConflictPolicy policy) {
    if (parts.empty()) return {};
    std::size_t total = 1;
    for (const BundleDistribution* part : parts) {
        if (part->empty()) return {};  // cannot happen for evaluated clauses
        total *= part->size();
    }

    std::vector<ComposedOutcome> outcomes;
    outcomes.reserve(total);
    std::vector<std::size_t> pick(parts.size(), 0);
    for (std::size_t n = 0; n < total; ++n) {
        ComposedOutcome out;
        out.bundle_indices = pick;
        for (std::size_t k = 0; k < parts.size(); ++k) {
            const WeightedBundle& wb = (*parts[k])[pick[k]];
            out.probability *= wb.probability;
            for (const Action& a : wb.bundle->actions) out.actions.push_back(&a);
        }
        if (policy == ConflictPolicy::error && parts.size() > 1) {
            // attr -> part that wrote it first in this outcome
            std::vector<std::pair<std::string_view, std::size_t>> writers;
            for (std::size_t k = 0; k < parts.size(); ++k) {
                for (const Action& a : (*parts[k])[pick[k]].bundle->actions) {
                    for (const auto& [attr, part] : writers) {
                        if (attr == a.attr && part != k) {
                            throw Error::runtime("composition conflict: rules '" +
                                                 rule_names[part] + "' and '" + rule_names[k] +
                                                 "' both change '" + a.attr + "'");
                        }
                    }
                    writers.emplace_back(a.attr, k);
                }
            }
        }
        outcomes.push_back(std::move(out));
        // odometer, last part fastest: the first rule's bundles vary slowest
        for (std::size_t k = parts.size(); k-- > 0;) {
            if (++pick[k] < parts[k]->size()) break;
            pick[k] = 0;
        }
    }
    return outcomes;
}

std::vector<PotentialGroup> generate_potential_groups(const Group& group,
                                                      const std::vector<const Rule*>& rules,
                                                      const Snapshot& snapshot,
                                                      const EngineOptions& options, QueryLog* log) {
    std::vector<BundleDistribution> distributions;
    std::vector<std::string> firing_names;
    for (const Rule* rule : rules) {
        if (auto dist = evaluate(*rule, group, snapshot, options.normalization, log)) {
            distributions.push_back(std::move(*dist));
            firing_names.push_back(rule->name);
        }
    }
    if (distributions.empty()) return {};

    std::vector<const BundleDistribution*> parts;
    parts.reserve(distributions.size());
    for (const BundleDistribution& d : distributions) parts.push_back(&d);

    std::vector<ComposedOutcome> outcomes;
    try {
        outcomes = compose(parts, firing_names, options.conflict_policy);
    } catch (const Error& e) {
        throw Error(e.kind(), "group '" + group_label(group) + "': " + e.what());
    }

    std::vector<PotentialGroup> potentials;
    potentials.reserve(outcomes.size());
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        Signature sig = group.signature();
        try {
            for (const Action* a : outcomes[i].actions) a->apply(sig);
        } catch (const Error& e) {
            throw Error(e.kind(), "group '" + group_label(group) + "': " + e.what());
        }
        PotentialGroup p;
        p.key = sig.canonical();
        p.signature = std::move(sig);
        p.contribution = group.mass() * outcomes[i].probability;
        p.parent_key = group.key();
        p.bundle_indices = std::move(outcomes[i].bundle_indices);
        p.outcome_index = i;
        potentials.push_back(std::move(p));
    }
    return potentials;
}

namespace {

// Evaluation may fan out over threads; everything after it is sequential.
std::vector<std::vector<PotentialGroup>> generate_all(std::span<const Group> groups,
                                                      const std::vector<const Rule*>& rules,
                                                      const Snapshot& snapshot,
                                                      const EngineOptions& options,
                                                      QueryLog* log) {
    std::vector<std::vector<PotentialGroup>> per_group(groups.size());
    int threads = std::max(1, options.threads);
    if (threads == 1 || groups.size() < 2) {
        for (std::size_t i = 0; i < groups.size(); ++i) {
            per_group[i] = generate_potential_groups(groups[i], rules, snapshot, options, log);
        }
        return per_group;
    }

    threads = static_cast<int>(std::min<std::size_t>(threads, groups.size()));
    std::atomic<std::size_t> cursor{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    auto worker = [&]() {
        for (;;) {
            std::size_t i = cursor.fetch_add(1);
            if (i >= groups.size()) return;
            try {
                per_group[i] = generate_potential_groups(groups[i], rules, snapshot, options, log);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
    return per_group;
}

Population redistribute_snapshot(const Snapshot& snapshot, const std::vector<const Rule*>& rules,
                                 const EngineOptions& options, QueryLog* log) {
    std::span<const Group> groups = snapshot.groups();
    std::vector<std::vector<PotentialGroup>> per_group =
        generate_all(groups, rules, snapshot, options, log);

    Population next;
    for (const auto& [id, site] : snapshot.sites()) next.add_site(site);

    // carry every extant group; spawning parents are zeroed first
    for (std::size_t i = 0; i < groups.size(); ++i) {
        Group carried = groups[i];
        if (!per_group[i].empty()) carried.set_mass(0.0);
        next.upsert(std::move(carried));
    }

    // name novel signatures by provenance, in joint-enumeration order
    std::map<std::string, std::string, std::less<>> novel_names;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        for (const PotentialGroup& p : per_group[i]) {
            if (next.find(p.key) || novel_names.count(p.key)) continue;
            Group* parent = next.find(p.parent_key);
            novel_names.emplace(p.key, parent->display_name() + "_" +
                                           std::to_string(parent->next_child_ordinal++));
        }
    }

    // canonical accumulation order: (parent key, target key, contribution).
    // Sorting by value as the last component is what keeps the sum bit-exact
    // under bundle reordering: equal multisets of addends fold identically.
    std::vector<const PotentialGroup*> ordered;
    for (const auto& list : per_group) {
        for (const PotentialGroup& p : list) ordered.push_back(&p);
    }
    std::sort(ordered.begin(), ordered.end(), [](const PotentialGroup* a, const PotentialGroup* b) {
        return std::tie(a->parent_key, a->key, a->contribution) <
               std::tie(b->parent_key, b->key, b->contribution);
    });
    for (const PotentialGroup* p : ordered) {
        if (Group* target = next.find(p->key)) {
            target->add_mass(p->contribution);
        } else {
            next.upsert(Group(p->signature, p->contribution, novel_names.at(p->key)));
        }
    }

    if (options.compaction_threshold > 0.0) {
        std::vector<std::string> doomed;
        for (const auto& [key, g] : next.groups()) {
            if (g.mass() < options.compaction_threshold) doomed.push_back(key);
        }
        for (const std::string& key : doomed) next.erase(key);
    }
    return next;
}

}  // namespace

Population redistribute(const Population& population, const std::vector<Rule>& rules,
                        const EngineOptions& options, QueryLog* log) {
    std::vector<const Rule*> ordered = canonical_rule_order(rules);
    Snapshot snapshot(population);
    return redistribute_snapshot(snapshot, ordered, options, log);
}

Trajectory run(Population initial, const std::vector<Rule>& rules, int iterations,
               const std::vector<Probe>& probes, const EngineOptions& options, QueryLog* log) {
    if (iterations < 0) throw Error::validation("iterations must be >= 0");
    std::vector<const Rule*> ordered = canonical_rule_order(rules);

    Trajectory trajectory;
    Population current = std::move(initial);
    for (int t = 0;; ++t) {
        Snapshot snapshot(current);
        for (const auto& [key, g] : current.groups()) {
            trajectory.rows.push_back({t, key, g.mass()});
        }
        trajectory.stats.push_back({t, current.size(), current.total_mass()});
        for (const Probe& probe : probes) {
            double value = probe.kind == Probe::Kind::mass
                               ? snapshot.mass_at(probe.site, probe.relation, probe.predicate)
                               : snapshot.proportion_at(probe.site, probe.relation,
                                                        probe.predicate, log);
            trajectory.probe_values.push_back({t, probe.name, value});
        }
        if (t == iterations) {
            for (const auto& [key, g] : current.groups()) {
                trajectory.final_groups.push_back({group_label(g), key, g.mass()});
            }
            break;
        }
        try {
            current = redistribute_snapshot(snapshot, ordered, options, log);
        } catch (const Error& e) {
            throw Error(e.kind(), "iteration " + std::to_string(t + 1) + ": " + e.what());
        }
    }
    return trajectory;
}

}  // namespace pram
