#pragma once
// Rules: guarded probability distributions over action bundles.
//
// A rule is an ordered list of clauses. For a given group the first clause
// whose condition holds supplies the distribution; clause conditions within
// one rule must be mutually exclusive (validated by enumeration), so "first"
// is just a tiebreak formality. Probabilities are expressions evaluated
// against the group and the iteration snapshot and may read population
// aggregates, which is how group behavior couples to everyone else.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pram/model.hpp"
#include "pram/snapshot.hpp"

namespace pram {

class Expression {
public:
    enum class Kind { constant, feature_ref, proportion, add, sub, mul, div, neg };

    static Expression constant(double value);
    static Expression feature_ref(std::string name);
    // proportion(relation, pred): resolve this group's `relation` to a site,
    // then the share of mass at that site (via the same relation) matching
    // pred. The "how infectious is my location" query.
    static Expression proportion(std::string relation, Predicate pred);
    static Expression binary(Kind op, Expression lhs, Expression rhs);
    static Expression negate(Expression operand);

    Kind kind() const { return kind_; }
    double constant_value() const { return value_; }
    const std::string& name() const { return name_; }
    const Predicate& predicate() const { return predicate_; }
    const Expression& lhs() const { return children_[0]; }
    const Expression& rhs() const { return children_[1]; }
    const Expression& operand() const { return children_[0]; }

    double evaluate(const Group& group, const Snapshot& snapshot, QueryLog* log = nullptr) const;
    bool is_constant() const;
    std::string to_string() const;

private:
    Kind kind_ = Kind::constant;
    double value_ = 0.0;
    std::string name_;
    Predicate predicate_;
    std::vector<Expression> children_;
};

// One equality test. The name resolves against the group's features first,
// then its relations (for relations the value must be the site id as a
// token). A name the group does not carry simply does not match.
struct ConditionAtom {
    std::string name;
    AttrValue value;

    bool operator==(const ConditionAtom&) const = default;
};

struct Condition {
    std::vector<ConditionAtom> atoms;  // conjunction, in source order

    bool matches(const Signature& sig) const;
    // Sorted rendering used for duplicate detection and error messages.
    std::string normalized() const;
};

struct Action {
    enum class Kind { set_feature, move_relation };
    enum class MoveTarget { site, current, relation_ref };

    Kind kind = Kind::set_feature;
    std::string attr;           // feature or relation being written
    AttrValue value;            // set_feature payload
    MoveTarget target = MoveTarget::site;
    std::string target_name;    // site id (site) or relation name (relation_ref)

    // Applies in place. Absent features/relations are created; `current` on an
    // absent relation is a no-op. A relation_ref target resolves against the
    // signature as already modified by earlier actions in the same bundle.
    void apply(Signature& sig) const;

    std::string to_string() const;
};

struct ActionBundle {
    Expression probability = Expression::constant(0.0);
    std::vector<Action> actions;
};

struct Clause {
    Condition condition;
    std::vector<ActionBundle> bundles;
};

struct Rule {
    std::string name;
    std::vector<Clause> clauses;
};

// strict: evaluated clause probabilities must sum to 1 (within 1e-9).
// fill: a shortfall is topped up with a do-nothing bundle carrying the rest.
enum class NormalizationMode { strict, fill };

struct WeightedBundle {
    double probability;
    const ActionBundle* bundle;  // owned by the rule (or identity_bundle())
};
using BundleDistribution = std::vector<WeightedBundle>;

// The shared do-nothing bundle used by fill mode.
const ActionBundle& identity_bundle();

// Distribution of the first matching clause, probabilities evaluated against
// the snapshot; std::nullopt when no clause matches (the rule does not fire).
// Throws on probabilities outside [0,1] or strict-mode sums off by > 1e-9.
std::optional<BundleDistribution> evaluate(const Rule& rule, const Group& group,
                                           const Snapshot& snapshot,
                                           NormalizationMode mode = NormalizationMode::strict,
                                           QueryLog* log = nullptr);

Signature apply_bundle(const Signature& sig, const ActionBundle& bundle);

// Finite value domain per attribute name, for exhaustive condition checks.
struct AttributeDomains {
    std::map<std::string, std::set<AttrValue>> values;

    void add(const std::string& name, AttrValue value) { values[name].insert(std::move(value)); }
};

// Proves no two clause conditions of the rule can hold at once by enumerating
// the product of the mentioned attributes' domains (domains are augmented
// with every value the conditions themselves mention). Throws a validation
// error naming the clauses and a witness assignment on overlap, or when the
// product exceeds `enumeration_cap`.
void validate_mutual_exclusivity(const Rule& rule, const AttributeDomains& domains,
                                 std::size_t enumeration_cap = std::size_t(1) << 20);

}  // namespace pram
