#include "pram/snapshot.hpp"

#include <algorithm>

namespace pram {

Predicate& Predicate::require(const std::string& feature, AttrValue value) {
    if (!is_identifier(feature)) {
        throw Error::validation("predicate feature name '" + feature + "' is not an identifier");
    }
    auto it = std::lower_bound(tests_.begin(), tests_.end(), feature,
                               [](const auto& t, const std::string& n) { return t.first < n; });
    if (it != tests_.end() && it->first == feature) {
        it->second = std::move(value);
    } else {
        tests_.emplace(it, feature, std::move(value));
    }
    return *this;
}

bool Predicate::matches(const Signature& sig) const {
    for (const auto& [name, value] : tests_) {
        const AttrValue* have = sig.feature(name);
        if (!have || !(*have == value)) return false;
    }
    return true;
}

void QueryLog::zero_denominator(std::string_view site, std::string_view relation) {
    std::lock_guard<std::mutex> lock(mutex_);
    ++count_;
    seen_.emplace(std::string(site), std::string(relation));
}

std::size_t QueryLog::zero_denominator_count() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return count_;
}

std::vector<std::string> QueryLog::messages() const {
    std::lock_guard<std::mutex> lock(mutex_);
    std::vector<std::string> out;
    for (const auto& [site, rel] : seen_) {
        out.push_back("proportion with zero denominator at site '" + site + "' via relation '" +
                      rel + "' (returned 0)");
    }
    return out;
}

Snapshot::Snapshot(const Population& population) {
    groups_.reserve(population.size());
    for (const auto& [key, group] : population.groups()) {
        groups_.push_back(group);  // map order == canonical key order
        total_mass_ += group.mass();
    }
    for (const auto& [id, site] : population.sites()) sites_.emplace(id, site);
    for (std::size_t i = 0; i < groups_.size(); ++i) {
        for (const auto& [rel, site_id] : groups_[i].signature().relations()) {
            index_[{rel, site_id}].push_back(i);
        }
    }
}

const Group* Snapshot::find(std::string_view key) const {
    auto it = std::lower_bound(groups_.begin(), groups_.end(), key,
                               [](const Group& g, std::string_view k) { return g.key() < k; });
    if (it != groups_.end() && it->key() == key) return &*it;
    return nullptr;
}

const SiteRef* Snapshot::site(std::string_view id) const {
    auto it = sites_.find(id);
    return it == sites_.end() ? nullptr : &it->second;
}

SiteRef Snapshot::relation_target(const Group& group, std::string_view relation) const {
    const std::string* site_id = group.signature().relation(relation);
    if (!site_id) {
        throw Error::runtime("group '" +
                             (group.display_name().empty() ? group.key() : group.display_name()) +
                             "' has no relation '" + std::string(relation) + "'");
    }
    if (const SiteRef* known = site(*site_id)) return *known;
    return SiteRef{*site_id, *site_id};
}

std::vector<const Group*> Snapshot::groups_at(std::string_view site_id,
                                              std::string_view relation) const {
    std::vector<const Group*> out;
    auto it = index_.find(std::make_pair(std::string(relation), std::string(site_id)));
    if (it == index_.end()) return out;
    out.reserve(it->second.size());
    for (std::size_t i : it->second) out.push_back(&groups_[i]);
    return out;
}

double Snapshot::mass_at(std::string_view site_id, std::string_view relation,
                         const Predicate& pred) const {
    auto it = index_.find(std::make_pair(std::string(relation), std::string(site_id)));
    if (it == index_.end()) return 0.0;
    double total = 0.0;
    // ascending index order: the sum is reproducible run to run
    for (std::size_t i : it->second) {
        if (pred.matches(groups_[i].signature())) total += groups_[i].mass();
    }
    return total;
}

double Snapshot::proportion_at(std::string_view site_id, std::string_view relation,
                               const Predicate& pred, QueryLog* log) const {
    double denom = mass_at(site_id, relation, Predicate());
    if (denom == 0.0) {
        if (log) log->zero_denominator(site_id, relation);
        return 0.0;
    }
    return mass_at(site_id, relation, pred) / denom;
}

}  // namespace pram
