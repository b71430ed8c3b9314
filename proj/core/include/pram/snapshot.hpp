#pragma once
// Read-only view of a population taken at the start of an iteration.
//
// Every aggregate a rule can ask for during iteration t is answered from the
// population as it stood at the end of iteration t-1. The snapshot copies the
// groups once, builds an inverse (relation, site) -> groups index, and is
// immutable afterwards, so concurrent readers need no locking.

#include <map>
#include <mutex>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pram/model.hpp"

namespace pram {

// Conjunction of feature equality tests. The empty predicate matches every
// group. Tests referencing a feature a group lacks do not match it.
class Predicate {
public:
    Predicate() = default;

    Predicate& require(const std::string& feature, AttrValue value);

    bool matches(const Signature& sig) const;
    bool empty() const { return tests_.empty(); }
    const std::vector<std::pair<std::string, AttrValue>>& tests() const { return tests_; }

private:
    std::vector<std::pair<std::string, AttrValue>> tests_;  // sorted by name
};

// Collects query anomalies without spamming: a zero-denominator proportion is
// reported once per (site, relation). Thread safe.
class QueryLog {
public:
    void zero_denominator(std::string_view site, std::string_view relation);

    std::size_t zero_denominator_count() const;
    std::vector<std::string> messages() const;

private:
    mutable std::mutex mutex_;
    std::set<std::pair<std::string, std::string>> seen_;
    std::size_t count_ = 0;
};

class Snapshot {
public:
    explicit Snapshot(const Population& population);

    std::span<const Group> groups() const { return groups_; }
    const Group* find(std::string_view key) const;
    const SiteRef* site(std::string_view id) const;
    const std::map<std::string, SiteRef, std::less<>>& sites() const { return sites_; }
    double total_mass() const { return total_mass_; }

    // The site a group's relation points to. Unknown relation on the group is
    // a rule-evaluation error naming both.
    SiteRef relation_target(const Group& group, std::string_view relation) const;

    // Groups whose `relation` points at `site_id`, in canonical key order.
    std::vector<const Group*> groups_at(std::string_view site_id, std::string_view relation) const;

    // Total mass of matching groups at a site; empty predicate = everyone.
    double mass_at(std::string_view site_id, std::string_view relation, const Predicate& pred) const;

    // mass_at(pred) / mass_at(everyone); 0 when nothing is at the site (the
    // zero denominator is reported to `log` when given).
    double proportion_at(std::string_view site_id, std::string_view relation, const Predicate& pred,
                         QueryLog* log = nullptr) const;

private:
    std::vector<Group> groups_;  // sorted by canonical key
    std::map<std::string, SiteRef, std::less<>> sites_;
    // (relation, site id) -> indices into groups_, ascending
    std::map<std::pair<std::string, std::string>, std::vector<std::size_t>, std::less<>> index_;
    double total_mass_ = 0.0;
};

}  // namespace pram
