#include "pram/model.hpp"

#include <algorithm>
#include <cctype>

namespace pram {

bool is_identifier(std::string_view s) {
    if (s.empty()) return false;
    if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s.substr(1)) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    }
    return true;
}

AttrValue AttrValue::token(std::string t) {
    if (!is_identifier(t)) {
        throw Error::validation("attribute token '" + t + "' is not an identifier");
    }
    AttrValue v;
    v.value_ = std::move(t);
    return v;
}

std::string AttrValue::to_string() const {
    if (is_integer()) return std::to_string(integer());
    return token();
}

namespace {

template <typename T>
void sorted_assign(std::vector<std::pair<std::string, T>>& entries, const std::string& name,
                   T value) {
    auto it = std::lower_bound(entries.begin(), entries.end(), name,
                               [](const auto& e, const std::string& n) { return e.first < n; });
    if (it != entries.end() && it->first == name) {
        it->second = std::move(value);
    } else {
        entries.emplace(it, name, std::move(value));
    }
}

template <typename T>
const T* sorted_find(const std::vector<std::pair<std::string, T>>& entries,
                     std::string_view name) {
    auto it = std::lower_bound(entries.begin(), entries.end(), name,
                               [](const auto& e, std::string_view n) { return e.first < n; });
    if (it != entries.end() && it->first == name) return &it->second;
    return nullptr;
}

}  // namespace

Signature& Signature::set_feature(const std::string& name, AttrValue value) {
    if (!is_identifier(name)) {
        throw Error::validation("feature name '" + name + "' is not an identifier");
    }
    sorted_assign(features_, name, std::move(value));
    return *this;
}

Signature& Signature::set_relation(const std::string& name, const std::string& site_id) {
    if (!is_identifier(name)) {
        throw Error::validation("relation name '" + name + "' is not an identifier");
    }
    if (!is_identifier(site_id)) {
        throw Error::validation("site id '" + site_id + "' is not an identifier");
    }
    sorted_assign(relations_, name, site_id);
    return *this;
}

const AttrValue* Signature::feature(std::string_view name) const {
    return sorted_find(features_, name);
}

const std::string* Signature::relation(std::string_view name) const {
    return sorted_find(relations_, name);
}

std::string Signature::canonical() const {
    std::string out;
    bool first = true;
    for (const auto& [name, value] : features_) {
        if (!first) out += ',';
        first = false;
        out += name;
        out += '=';
        out += value.to_string();
    }
    out += ';';
    first = true;
    for (const auto& [name, site] : relations_) {
        if (!first) out += ',';
        first = false;
        out += name;
        out += '=';
        out += site;
    }
    return out;
}

Group::Group(Signature sig, double mass, std::string display_name)
    : signature_(std::move(sig)), key_(signature_.canonical()), display_name_(std::move(display_name)) {
    set_mass(mass);
}

void Group::set_mass(double m) {
    if (!(m >= 0.0)) {
        throw Error::validation("group '" + (display_name_.empty() ? key_ : display_name_) +
                                "' would get negative mass");
    }
    mass_ = m;
}

void Group::add_mass(double delta) {
    if (!(delta >= 0.0)) {
        throw Error::validation("negative mass contribution to group '" +
                                (display_name_.empty() ? key_ : display_name_) + "'");
    }
    mass_ += delta;
}

void Population::add_site(SiteRef site) {
    if (!is_identifier(site.id)) {
        throw Error::validation("site id '" + site.id + "' is not an identifier");
    }
    if (site.name.empty()) site.name = site.id;
    auto it = sites_.find(site.id);
    if (it != sites_.end()) {
        if (it->second.name != site.name) {
            throw Error::validation("site '" + site.id + "' declared twice with different names");
        }
        return;
    }
    sites_.emplace(site.id, std::move(site));
}

const SiteRef* Population::site(std::string_view id) const {
    auto it = sites_.find(id);
    return it == sites_.end() ? nullptr : &it->second;
}

void Population::upsert(Group group) {
    auto it = groups_.find(group.key());
    if (it != groups_.end()) {
        it->second.add_mass(group.mass());
        return;
    }
    std::string key = group.key();
    groups_.emplace(std::move(key), std::move(group));
}

const Group* Population::find(std::string_view key) const {
    auto it = groups_.find(key);
    return it == groups_.end() ? nullptr : &it->second;
}

Group* Population::find(std::string_view key) {
    auto it = groups_.find(key);
    return it == groups_.end() ? nullptr : &it->second;
}

void Population::erase(std::string_view key) {
    auto it = groups_.find(key);
    if (it != groups_.end()) groups_.erase(it);
}

double Population::total_mass() const {
    double total = 0.0;
    for (const auto& [key, g] : groups_) total += g.mass();
    return total;
}

}  // namespace pram
