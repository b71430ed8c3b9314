#include "pram/rule.hpp"

#include <cmath>
#include <cstdio>

namespace pram {

namespace {

constexpr double kSumTolerance = 1e-9;
// Probability values this close outside [0,1] are rounding noise from
// aggregate arithmetic and get clamped instead of rejected.
constexpr double kClampTolerance = 1e-9;

std::string group_label(const Group& g) {
    return g.display_name().empty() ? g.key() : g.display_name();
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

Expression Expression::constant(double value) {
    Expression e;
    e.kind_ = Kind::constant;
    e.value_ = value;
    return e;
}

Expression Expression::feature_ref(std::string name) {
    Expression e;
    e.kind_ = Kind::feature_ref;
    e.name_ = std::move(name);
    return e;
}

Expression Expression::proportion(std::string relation, Predicate pred) {
    Expression e;
    e.kind_ = Kind::proportion;
    e.name_ = std::move(relation);
    e.predicate_ = std::move(pred);
    return e;
}

Expression Expression::binary(Kind op, Expression lhs, Expression rhs) {
    Expression e;
    e.kind_ = op;
    e.children_.push_back(std::move(lhs));
    e.children_.push_back(std::move(rhs));
    return e;
}

Expression Expression::negate(Expression operand) {
    Expression e;
    e.kind_ = Kind::neg;
    e.children_.push_back(std::move(operand));
    return e;
}

double Expression::evaluate(const Group& group, const Snapshot& snapshot, QueryLog* log) const {
    switch (kind_) {
        case Kind::constant:
            return value_;
        case Kind::feature_ref: {
            const AttrValue* v = group.signature().feature(name_);
            if (!v) {
                throw Error::runtime("expression references feature '" + name_ +
                                     "' missing on group '" + group_label(group) + "'");
            }
            if (!v->is_integer()) {
                throw Error::runtime("feature '" + name_ + "' of group '" + group_label(group) +
                                     "' is not numeric");
            }
            return static_cast<double>(v->integer());
        }
        case Kind::proportion: {
            SiteRef site = snapshot.relation_target(group, name_);
            return snapshot.proportion_at(site.id, name_, predicate_, log);
        }
        case Kind::add:
            return children_[0].evaluate(group, snapshot, log) +
                   children_[1].evaluate(group, snapshot, log);
        case Kind::sub:
            return children_[0].evaluate(group, snapshot, log) -
                   children_[1].evaluate(group, snapshot, log);
        case Kind::mul:
            return children_[0].evaluate(group, snapshot, log) *
                   children_[1].evaluate(group, snapshot, log);
        case Kind::div: {
            double denom = children_[1].evaluate(group, snapshot, log);
            if (denom == 0.0) throw Error::runtime("division by zero in rule expression");
            return children_[0].evaluate(group, snapshot, log) / denom;
        }
        case Kind::neg:
            return -children_[0].evaluate(group, snapshot, log);
    }
    throw Error::runtime("corrupt expression");
}

bool Expression::is_constant() const {
    switch (kind_) {
        case Kind::constant:
            return true;
        case Kind::feature_ref:
        case Kind::proportion:
            return false;
        default:
            for (const Expression& c : children_) {
                if (!c.is_constant()) return false;
            }
            return true;
    }
}

std::string Expression::to_string() const {
    switch (kind_) {
        case Kind::constant:
            return format_number(value_);
        case Kind::feature_ref:
            return name_;
        case Kind::proportion: {
            std::string out = "proportion(" + name_ + ", ";
            bool first = true;
            for (const auto& [n, v] : predicate_.tests()) {
                if (!first) out += " and ";
                first = false;
                out += n + " == " + v.to_string();
            }
            return out + ")";
        }
        case Kind::add:
            return "(" + children_[0].to_string() + " + " + children_[1].to_string() + ")";
        case Kind::sub:
            return "(" + children_[0].to_string() + " - " + children_[1].to_string() + ")";
        case Kind::mul:
            return "(" + children_[0].to_string() + " * " + children_[1].to_string() + ")";
        case Kind::div:
            return "(" + children_[0].to_string() + " / " + children_[1].to_string() + ")";
        case Kind::neg:
            return "-" + children_[0].to_string();
    }
    return "?";
}

bool Condition::matches(const Signature& sig) const {
    for (const ConditionAtom& atom : atoms) {
        if (const AttrValue* f = sig.feature(atom.name)) {
            if (!(*f == atom.value)) return false;
            continue;
        }
        if (const std::string* site = sig.relation(atom.name)) {
            if (atom.value.is_integer() || atom.value.token() != *site) return false;
            continue;
        }
        return false;  // group does not carry the attribute at all
    }
    return true;
}

std::string Condition::normalized() const {
    std::vector<std::pair<std::string, std::string>> parts;
    parts.reserve(atoms.size());
    for (const ConditionAtom& a : atoms) parts.emplace_back(a.name, a.value.to_string());
    std::sort(parts.begin(), parts.end());
    std::string out;
    for (const auto& [n, v] : parts) {
        if (!out.empty()) out += " and ";
        out += n + " == " + v;
    }
    return out.empty() ? "<always>" : out;
}

void Action::apply(Signature& sig) const {
    switch (kind) {
        case Kind::set_feature:
            sig.set_feature(attr, value);
            return;
        case Kind::move_relation:
            switch (target) {
                case MoveTarget::site:
                    sig.set_relation(attr, target_name);
                    return;
                case MoveTarget::current:
                    return;  // keep whatever is there (possibly nothing)
                case MoveTarget::relation_ref: {
                    const std::string* site = sig.relation(target_name);
                    if (!site) {
                        throw Error::runtime("move target '@" + target_name +
                                             "' references a relation missing on signature '" +
                                             sig.canonical() + "'");
                    }
                    sig.set_relation(attr, *site);
                    return;
                }
            }
    }
}

std::string Action::to_string() const {
    if (kind == Kind::set_feature) return "set " + attr + " = " + value.to_string();
    switch (target) {
        case MoveTarget::site:
            return "move " + attr + " -> " + target_name;
        case MoveTarget::current:
            return "move " + attr + " -> current";
        case MoveTarget::relation_ref:
            return "move " + attr + " -> @" + target_name;
    }
    return "?";
}

const ActionBundle& identity_bundle() {
    static const ActionBundle bundle{Expression::constant(0.0), {}};
    return bundle;
}

std::optional<BundleDistribution> evaluate(const Rule& rule, const Group& group,
                                           const Snapshot& snapshot, NormalizationMode mode,
                                           QueryLog* log) {
    const Clause* clause = nullptr;
    std::size_t clause_index = 0;
    for (std::size_t i = 0; i < rule.clauses.size(); ++i) {
        if (rule.clauses[i].condition.matches(group.signature())) {
            clause = &rule.clauses[i];
            clause_index = i;
            break;
        }
    }
    if (!clause) return std::nullopt;

    BundleDistribution dist;
    dist.reserve(clause->bundles.size() + 1);
    double sum = 0.0;
    for (std::size_t b = 0; b < clause->bundles.size(); ++b) {
        double p = clause->bundles[b].probability.evaluate(group, snapshot, log);
        if (p < 0.0 && p >= -kClampTolerance) p = 0.0;
        if (p > 1.0 && p <= 1.0 + kClampTolerance) p = 1.0;
        if (p < 0.0 || p > 1.0 || !std::isfinite(p)) {
            throw Error::runtime("rule '" + rule.name + "' clause " + std::to_string(clause_index + 1) +
                                 " bundle " + std::to_string(b + 1) + ": probability " +
                                 format_number(p) + " outside [0,1] for group '" +
                                 group_label(group) + "'");
        }
        dist.push_back({p, &clause->bundles[b]});
        sum += p;
    }
    if (mode == NormalizationMode::strict) {
        if (std::fabs(sum - 1.0) > kSumTolerance) {
            throw Error::runtime("rule '" + rule.name + "' clause " + std::to_string(clause_index + 1) +
                                 ": probabilities sum to " + format_number(sum) + " for group '" +
                                 group_label(group) + "' (strict mode requires 1)");
        }
    } else {
        if (sum > 1.0 + kSumTolerance) {
            throw Error::runtime("rule '" + rule.name + "' clause " + std::to_string(clause_index + 1) +
                                 ": probabilities sum to " + format_number(sum) + " for group '" +
                                 group_label(group) + "' (more than 1)");
        }
        double residual = 1.0 - sum;
        if (residual > 0.0) dist.push_back({residual, &identity_bundle()});
    }
    return dist;
}

Signature apply_bundle(const Signature& sig, const ActionBundle& bundle) {
    Signature out = sig;
    for (const Action& action : bundle.actions) action.apply(out);
    return out;
}

void validate_mutual_exclusivity(const Rule& rule, const AttributeDomains& domains,
                                 std::size_t enumeration_cap) {
    if (rule.clauses.size() < 2) return;

    // Every attribute mentioned by any condition, with the domain augmented by
    // the mentioned values themselves so callers need not be exhaustive.
    std::map<std::string, std::set<AttrValue>> space;
    for (const Clause& c : rule.clauses) {
        for (const ConditionAtom& a : c.condition.atoms) space[a.name].insert(a.value);
    }
    for (auto& [name, values] : space) {
        auto it = domains.values.find(name);
        if (it != domains.values.end()) values.insert(it->second.begin(), it->second.end());
    }

    std::vector<std::string> names;
    std::vector<std::vector<AttrValue>> value_lists;
    std::size_t product = 1;
    for (auto& [name, values] : space) {
        names.push_back(name);
        value_lists.emplace_back(values.begin(), values.end());
        if (product > enumeration_cap / values.size()) {
            throw Error::validation("rule '" + rule.name +
                                    "': condition domain product too large to enumerate");
        }
        product *= values.size();
    }

    std::vector<std::size_t> pick(names.size(), 0);
    for (std::size_t n = 0; n < product; ++n) {
        // decode n into one assignment
        std::size_t rest = n;
        for (std::size_t k = 0; k < pick.size(); ++k) {
            pick[k] = rest % value_lists[k].size();
            rest /= value_lists[k].size();
        }
        auto holds = [&](const Condition& cond) {
            for (const ConditionAtom& a : cond.atoms) {
                for (std::size_t k = 0; k < names.size(); ++k) {
                    if (names[k] == a.name) {
                        if (!(value_lists[k][pick[k]] == a.value)) return false;
                        break;
                    }
                }
            }
            return true;
        };
        int first_match = -1;
        for (std::size_t c = 0; c < rule.clauses.size(); ++c) {
            if (!holds(rule.clauses[c].condition)) continue;
            if (first_match >= 0) {
                std::string witness;
                for (std::size_t k = 0; k < names.size(); ++k) {
                    if (!witness.empty()) witness += ", ";
                    witness += names[k] + "=" + value_lists[k][pick[k]].to_string();
                }
                throw Error::validation("rule '" + rule.name + "': clauses " +
                                        std::to_string(first_match + 1) + " and " +
                                        std::to_string(c + 1) + " both match (" + witness + ")");
            }
            first_match = static_cast<int>(c);
        }
    }
}

}  // namespace pram
