#pragma once
// Groups, sites, attribute signatures and the population container.
//
// A group is a bag of identical individuals described by discrete features
// (name -> symbol) and relations (name -> site). Identity is the signature
// alone: its canonical serialization doubles as the lookup key, so two groups
// built from the same attributes in any insertion order are the same group.
// Populations enforce that by merging mass on insert.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "pram/error.hpp"

namespace pram {

// Attribute names, symbolic values and site ids all share one lexical rule.
// Keeping them identifier-shaped is what makes the canonical serialization
// collision-free: none of the separator characters can appear inside a part.
bool is_identifier(std::string_view s);

// Discrete attribute value: a symbolic token or a bounded integer. The two
// forms never compare equal. Tokens must be identifiers, which also keeps
// them visually distinct from integers (identifiers cannot start with a
// digit or '-').
class AttrValue {
public:
    AttrValue() : value_(std::string()) {}

    static AttrValue token(std::string t);
    static AttrValue integer(std::int64_t i) {
        AttrValue v;
        v.value_ = i;
        return v;
    }

    bool is_integer() const { return std::holds_alternative<std::int64_t>(value_); }
    const std::string& token() const { return std::get<std::string>(value_); }
    std::int64_t integer() const { return std::get<std::int64_t>(value_); }

    std::string to_string() const;

    bool operator==(const AttrValue& other) const = default;
    bool operator<(const AttrValue& other) const { return value_ < other.value_; }

private:
    std::variant<std::string, std::int64_t> value_;
};

// A place groups can be related to. Identity is the id; name is display only.
struct SiteRef {
    std::string id;
    std::string name;

    friend bool operator==(const SiteRef& a, const SiteRef& b) { return a.id == b.id; }
};

// Feature and relation assignment of a group. Kept sorted by attribute name,
// so the serialized form is independent of construction order.
class Signature {
public:
    Signature& set_feature(const std::string& name, AttrValue value);
    Signature& set_relation(const std::string& name, const std::string& site_id);

    const AttrValue* feature(std::string_view name) const;
    const std::string* relation(std::string_view name) const;

    const std::vector<std::pair<std::string, AttrValue>>& features() const { return features_; }
    const std::vector<std::pair<std::string, std::string>>& relations() const { return relations_; }

    // Canonical form: "f1=v1,f2=v2;r1=s1,r2=s2", names sorted within each
    // section, ';' always present. This string is also the identity key.
    std::string canonical() const;

    bool operator==(const Signature& other) const = default;

private:
    std::vector<std::pair<std::string, AttrValue>> features_;
    std::vector<std::pair<std::string, std::string>> relations_;
};

inline std::string canonical_key(const Signature& sig) { return sig.canonical(); }

// Signature plus nonnegative mass. display_name is provenance bookkeeping for
// humans; it never participates in identity or comparisons.
class Group {
public:
    Group(Signature sig, double mass, std::string display_name = "");

    const Signature& signature() const { return signature_; }
    const std::string& key() const { return key_; }
    double mass() const { return mass_; }
    const std::string& display_name() const { return display_name_; }

    void set_mass(double m);
    void add_mass(double delta);
    void set_display_name(std::string name) { display_name_ = std::move(name); }

    // Ordinal of the next novel group this one spawns, used only to build
    // provenance display names like "g2_1". Carried across iterations.
    int next_child_ordinal = 1;

private:
    Signature signature_;
    std::string key_;
    double mass_ = 0.0;
    std::string display_name_;
};

// The set of extant groups, keyed by canonical signature, plus the site
// table. Iteration order over groups is canonical-key order, which is what
// makes downstream floating-point accumulation reproducible.
class Population {
public:
    void add_site(SiteRef site);
    const SiteRef* site(std::string_view id) const;
    const std::map<std::string, SiteRef, std::less<>>& sites() const { return sites_; }

    // Inserts the group or, when one with the same signature exists, adds the
    // incoming mass to it (the existing display name wins).
    void upsert(Group group);

    const Group* find(std::string_view key) const;
    Group* find(std::string_view key);
    void erase(std::string_view key);

    const std::map<std::string, Group, std::less<>>& groups() const { return groups_; }
    std::size_t size() const { return groups_.size(); }
    double total_mass() const;

private:
    std::map<std::string, Group, std::less<>> groups_;
    std::map<std::string, SiteRef, std::less<>> sites_;
};

}  // namespace pram
