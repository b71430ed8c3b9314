#include "pram/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include "json.hpp"
#include "pram/error.hpp"
#include "pram/io.hpp"
#include "pram/rule_parser.hpp"

namespace pram {

namespace {

using ordered_json = nlohmann::ordered_json;

// Everything below collects problems instead of throwing on first sight, so
// a bad file produces one complete report.
struct Collector {
    std::vector<std::string> problems;

    void add(std::string problem) { problems.push_back(std::move(problem)); }
    bool ok() const { return problems.empty(); }
};

void check_keys(const ordered_json& obj, const std::set<std::string>& known,
                const std::string& context, Collector& c) {
    for (const auto& [key, value] : obj.items()) {
        if (!known.count(key)) c.add(context + ": unknown key '" + key + "'");
    }
}

bool want_string(const ordered_json& v, const std::string& context, Collector& c,
                 std::string& out) {
    if (!v.is_string()) {
        c.add(context + " must be a string");
        return false;
    }
    out = v.get<std::string>();
    return true;
}

// token | integer; anything else is reported and nullopt returned
std::optional<AttrValue> want_attr_value(const ordered_json& v, const std::string& context,
                                         Collector& c) {
    if (v.is_string()) {
        try {
            return AttrValue::token(v.get<std::string>());
        } catch (const Error& e) {
            c.add(context + ": " + e.what());
            return std::nullopt;
        }
    }
    if (v.is_number_integer()) return AttrValue::integer(v.get<std::int64_t>());
    c.add(context + " must be an identifier string or an integer");
    return std::nullopt;
}

std::string attr_value_text(const AttrValue& v) { return v.to_string(); }

// --- structured rules -> DSL text ---------------------------------------

std::string condition_text(const ordered_json& when, const std::string& context, Collector& c) {
    if (when.is_string()) return when.get<std::string>();
    if (!when.is_object()) {
        c.add(context + ": 'when' must be a condition string or an object of equality tests");
        return {};
    }
    if (when.empty()) {
        c.add(context + ": 'when' must contain at least one test");
        return {};
    }
    std::string text;
    for (const auto& [name, value] : when.items()) {
        auto v = want_attr_value(value, context + ": test '" + name + "'", c);
        if (!v) continue;
        if (!text.empty()) text += " and ";
        text += name + " == " + attr_value_text(*v);
    }
    return text;
}

std::string structured_rule_text(const ordered_json& r, std::size_t index, Collector& c) {
    std::string context = "rules[" + std::to_string(index) + "]";
    if (!r.is_object()) {
        c.add(context + " must be an object");
        return {};
    }
    check_keys(r, {"name", "clauses"}, context, c);
    std::string name;
    if (!r.contains("name") || !want_string(r["name"], context + ".name", c, name)) return {};
    context += " ('" + name + "')";
    if (!r.contains("clauses") || !r["clauses"].is_array() || r["clauses"].empty()) {
        c.add(context + " needs a non-empty 'clauses' array");
        return {};
    }

    std::string text = "rule " + name + " {\n";
    std::size_t ci = 0;
    for (const ordered_json& clause : r["clauses"]) {
        std::string cctx = context + ".clauses[" + std::to_string(ci++) + "]";
        if (!clause.is_object()) {
            c.add(cctx + " must be an object");
            return {};
        }
        check_keys(clause, {"when", "distribution"}, cctx, c);
        if (!clause.contains("when") || !clause.contains("distribution")) {
            c.add(cctx + " needs 'when' and 'distribution'");
            return {};
        }
        std::string cond = condition_text(clause["when"], cctx, c);
        if (cond.empty()) return {};
        const ordered_json& dist = clause["distribution"];
        if (!dist.is_array() || dist.empty()) {
            c.add(cctx + ".distribution must be a non-empty array");
            return {};
        }
        text += "  when " + cond + " => {\n";
        std::size_t bi = 0;
        bool first = true;
        for (const ordered_json& bundle : dist) {
            std::string bctx = cctx + ".distribution[" + std::to_string(bi++) + "]";
            if (!bundle.is_object() || !bundle.contains("p") || !bundle.contains("actions")) {
                c.add(bctx + " needs 'p' and 'actions'");
                return {};
            }
            check_keys(bundle, {"p", "actions"}, bctx, c);
            std::string p;
            if (bundle["p"].is_number()) {
                p = format_real(bundle["p"].get<double>());
            } else if (bundle["p"].is_string()) {
                p = bundle["p"].get<std::string>();
            } else {
                c.add(bctx + ".p must be a number or an expression string");
                return {};
            }
            const ordered_json& actions = bundle["actions"];
            if (!actions.is_array() || actions.empty()) {
                c.add(bctx + ".actions must be a non-empty array of action statements");
                return {};
            }
            std::string joined;
            for (const ordered_json& a : actions) {
                if (!a.is_string()) {
                    c.add(bctx + ".actions entries must be strings");
                    return {};
                }
                if (!joined.empty()) joined += ", ";
                joined += a.get<std::string>();
            }
            text += first ? "    " : "    ; ";
            first = false;
            text += p + " : " + joined + "\n";
        }
        text += "  }\n";
    }
    text += "}\n";
    return text;
}

// --- rendering back to structured JSON -----------------------------------

ordered_json attr_value_json(const AttrValue& v) {
    if (v.is_integer()) return ordered_json(v.integer());
    return ordered_json(v.token());
}

std::string condition_source(const Condition& cond) {
    std::string out;
    for (const ConditionAtom& a : cond.atoms) {
        if (!out.empty()) out += " and ";
        out += a.name + " == " + a.value.to_string();
    }
    return out;
}

ordered_json rule_json(const Rule& rule) {
    ordered_json clauses = ordered_json::array();
    for (const Clause& clause : rule.clauses) {
        ordered_json bundles = ordered_json::array();
        for (const ActionBundle& b : clause.bundles) {
            ordered_json actions = ordered_json::array();
            for (const Action& a : b.actions) actions.push_back(a.to_string());
            bundles.push_back(ordered_json{{"p", b.probability.to_string()},
                                           {"actions", std::move(actions)}});
        }
        clauses.push_back(ordered_json{{"when", condition_source(clause.condition)},
                                       {"distribution", std::move(bundles)}});
    }
    return ordered_json{{"name", rule.name}, {"clauses", std::move(clauses)}};
}

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(json_text);
    } catch (const std::exception& e) {
        throw ValidationError({std::string("invalid JSON: ") + e.what()});
    }

    Collector c;
    Scenario scenario;
    if (!doc.is_object()) throw ValidationError({"scenario must be a JSON object"});
    check_keys(doc,
               {"name", "description", "iterations", "options", "sites", "groups", "rules",
                "probes", "domains"},
               "scenario", c);

    if (doc.contains("name")) {
        want_string(doc["name"], "name", c, scenario.name);
        if (scenario.name.empty()) c.add("name must not be empty");
    } else {
        c.add("scenario needs a 'name'");
    }
    if (doc.contains("description")) {
        want_string(doc["description"], "description", c, scenario.description);
    }
    if (doc.contains("iterations")) {
        if (!doc["iterations"].is_number_integer() || doc["iterations"].get<std::int64_t>() < 0) {
            c.add("iterations must be a non-negative integer");
        } else {
            scenario.iterations = static_cast<int>(doc["iterations"].get<std::int64_t>());
        }
    }

    if (doc.contains("options")) {
        const ordered_json& o = doc["options"];
        if (!o.is_object()) {
            c.add("options must be an object");
        } else {
            check_keys(o, {"normalization", "conflict_policy", "compaction_threshold"}, "options",
                       c);
            if (o.contains("normalization")) {
                std::string m;
                if (want_string(o["normalization"], "options.normalization", c, m)) {
                    if (m == "strict") {
                        scenario.options.normalization = NormalizationMode::strict;
                    } else if (m == "fill") {
                        scenario.options.normalization = NormalizationMode::fill;
                    } else {
                        c.add("options.normalization must be 'strict' or 'fill'");
                    }
                }
            }
            if (o.contains("conflict_policy")) {
                std::string m;
                if (want_string(o["conflict_policy"], "options.conflict_policy", c, m)) {
                    if (m == "error") {
                        scenario.options.conflict_policy = ConflictPolicy::error;
                    } else if (m == "last_writer_wins") {
                        scenario.options.conflict_policy = ConflictPolicy::last_writer_wins;
                    } else {
                        c.add("options.conflict_policy must be 'error' or 'last_writer_wins'");
                    }
                }
            }
            if (o.contains("compaction_threshold")) {
                if (!o["compaction_threshold"].is_number()) {
                    c.add("options.compaction_threshold must be a number");
                } else {
                    scenario.options.compaction_threshold =
                        o["compaction_threshold"].get<double>();
                }
            }
        }
    }

    // sites: declared list is authoritative when present
    bool sites_declared = doc.contains("sites");
    std::set<std::string> site_ids;
    if (sites_declared) {
        if (!doc["sites"].is_array()) {
            c.add("sites must be an array");
        } else {
            std::size_t i = 0;
            for (const ordered_json& s : doc["sites"]) {
                std::string context = "sites[" + std::to_string(i++) + "]";
                std::string id, display;
                if (s.is_string()) {
                    id = s.get<std::string>();
                    display = id;
                } else if (s.is_object()) {
                    check_keys(s, {"id", "name"}, context, c);
                    if (!s.contains("id") || !want_string(s["id"], context + ".id", c, id)) {
                        continue;
                    }
                    display = id;
                    if (s.contains("name")) want_string(s["name"], context + ".name", c, display);
                } else {
                    c.add(context + " must be a site id string or {id, name}");
                    continue;
                }
                if (!is_identifier(id)) {
                    c.add(context + ": site id '" + id + "' is not a valid identifier");
                    continue;
                }
                if (id == "current") {
                    c.add(context + ": 'current' is reserved and cannot be a site id");
                    continue;
                }
                if (!site_ids.insert(id).second) {
                    c.add(context + ": duplicate site id '" + id + "'");
                    continue;
                }
                try {
                    scenario.initial.add_site(SiteRef{id, display});
                } catch (const Error& e) {
                    c.add(context + ": " + e.what());
                }
            }
        }
    }

    // groups
    struct PendingGroup {
        std::string name;
        Signature signature;
        double mass = 0.0;
    };
    std::vector<PendingGroup> pending;
    std::set<std::string> group_names;
    if (!doc.contains("groups") || !doc["groups"].is_array() || doc["groups"].empty()) {
        c.add("scenario needs a non-empty 'groups' array");
    } else {
        std::size_t i = 0;
        for (const ordered_json& g : doc["groups"]) {
            std::string context = "groups[" + std::to_string(i++) + "]";
            if (!g.is_object()) {
                c.add(context + " must be an object");
                continue;
            }
            check_keys(g, {"name", "mass", "features", "relations"}, context, c);
            PendingGroup p;
            p.name = "g" + std::to_string(i);
            if (g.contains("name")) {
                if (want_string(g["name"], context + ".name", c, p.name) &&
                    !group_names.insert(p.name).second) {
                    c.add(context + ": duplicate group name '" + p.name + "'");
                }
            }
            if (!g.contains("mass") || !g["mass"].is_number()) {
                c.add(context + " needs a numeric 'mass'");
                continue;
            }
            p.mass = g["mass"].get<double>();
            if (p.mass < 0.0) {
                c.add(context + ": mass must be >= 0");
                continue;
            }
            bool bad = false;
            if (g.contains("features")) {
                if (!g["features"].is_object()) {
                    c.add(context + ".features must be an object");
                    bad = true;
                } else {
                    for (const auto& [name, value] : g["features"].items()) {
                        auto v = want_attr_value(value, context + ".features." + name, c);
                        if (!v) {
                            bad = true;
                            continue;
                        }
                        try {
                            p.signature.set_feature(name, *v);
                            scenario.domains.add(name, *v);
                        } catch (const Error& e) {
                            c.add(context + ": " + e.what());
                            bad = true;
                        }
                    }
                }
            }
            if (g.contains("relations")) {
                if (!g["relations"].is_object()) {
                    c.add(context + ".relations must be an object");
                    bad = true;
                } else {
                    for (const auto& [name, value] : g["relations"].items()) {
                        std::string site;
                        if (!want_string(value, context + ".relations." + name, c, site)) {
                            bad = true;
                            continue;
                        }
                        try {
                            p.signature.set_relation(name, site);
                        } catch (const Error& e) {
                            c.add(context + ": " + e.what());
                            bad = true;
                            continue;
                        }
                        if (sites_declared && !site_ids.count(site)) {
                            c.add(context + ".relations." + name + ": site '" + site +
                                  "' is not declared in 'sites'");
                            bad = true;
                        }
                    }
                }
            }
            if (!bad) pending.push_back(std::move(p));
        }
    }

    // rules: DSL text, array of lines, or structured objects
    std::string rules_text;
    bool rules_compiled = true;  // false when structured -> DSL already failed
    if (!doc.contains("rules")) {
        c.add("scenario needs 'rules'");
        rules_compiled = false;
    } else if (doc["rules"].is_string()) {
        rules_text = doc["rules"].get<std::string>();
    } else if (doc["rules"].is_array()) {
        const ordered_json& arr = doc["rules"];
        bool all_strings = true, all_objects = true;
        for (const ordered_json& e : arr) {
            all_strings = all_strings && e.is_string();
            all_objects = all_objects && e.is_object();
        }
        if (arr.empty()) {
            c.add("rules must not be empty");
            rules_compiled = false;
        } else if (all_strings) {
            for (const ordered_json& e : arr) {
                rules_text += e.get<std::string>();
                rules_text += '\n';
            }
        } else if (all_objects) {
            std::size_t i = 0;
            for (const ordered_json& e : arr) {
                std::string one = structured_rule_text(e, i++, c);
                if (one.empty()) rules_compiled = false;
                rules_text += one;
            }
        } else {
            c.add("rules array must be all DSL lines or all structured rule objects");
            rules_compiled = false;
        }
    } else {
        c.add("rules must be DSL text, an array of lines, or an array of rule objects");
        rules_compiled = false;
    }

    if (rules_compiled) {
        scenario.rules_source = rules_text;
        try {
            scenario.rules = parse_rules(rules_text, scenario.options.normalization);
        } catch (const ParseError& e) {
            c.add(std::string("rules: ") + e.what());
        }
    }

    std::set<std::string> rule_names;
    for (const Rule& r : scenario.rules) {
        if (!rule_names.insert(r.name).second) c.add("duplicate rule name '" + r.name + "'");
    }

    // attribute values the rules themselves introduce
    std::set<std::string> relation_names;
    for (const auto& p : pending) {
        for (const auto& [name, site] : p.signature.relations()) relation_names.insert(name);
    }
    for (const Rule& r : scenario.rules) {
        for (const Clause& clause : r.clauses) {
            for (const ActionBundle& b : clause.bundles) {
                for (const Action& a : b.actions) {
                    if (a.kind == Action::Kind::set_feature) {
                        scenario.domains.add(a.attr, a.value);
                    } else {
                        relation_names.insert(a.attr);
                        if (a.target == Action::MoveTarget::site) {
                            if (sites_declared && !site_ids.count(a.target_name)) {
                                c.add("rule '" + r.name + "' moves '" + a.attr + "' to site '" +
                                      a.target_name + "', which is not declared in 'sites'");
                            } else if (!sites_declared) {
                                site_ids.insert(a.target_name);
                            }
                        }
                    }
                }
            }
        }
    }

    // undeclared sites are auto-registered only when no 'sites' key was given
    if (!sites_declared) {
        for (const auto& p : pending) {
            for (const auto& [name, site] : p.signature.relations()) site_ids.insert(site);
        }
        for (const std::string& id : site_ids) {
            if (id == "current") {
                c.add("'current' is reserved and cannot be a site id");
                continue;
            }
            scenario.initial.add_site(SiteRef{id, id});
        }
    }

    // extra enumeration domains
    if (doc.contains("domains")) {
        if (!doc["domains"].is_object()) {
            c.add("domains must be an object mapping attribute -> value array");
        } else {
            for (const auto& [name, values] : doc["domains"].items()) {
                if (!values.is_array()) {
                    c.add("domains." + name + " must be an array");
                    continue;
                }
                for (const ordered_json& v : values) {
                    auto value = want_attr_value(v, "domains." + name, c);
                    if (value) scenario.domains.add(name, *value);
                }
            }
        }
    }
    // a relation can point at any declared site
    for (const std::string& rel : relation_names) {
        for (const std::string& id : site_ids) {
            scenario.domains.add(rel, AttrValue::token(id));
        }
    }

    // conditions must reference attributes that exist somewhere
    {
        std::set<std::string> known;
        for (const auto& [name, values] : scenario.domains.values) known.insert(name);
        known.insert(relation_names.begin(), relation_names.end());
        for (const auto& p : pending) {
            for (const auto& [name, v] : p.signature.features()) known.insert(name);
        }
        auto check_condition = [&](const Condition& cond, const std::string& context) {
            for (const ConditionAtom& a : cond.atoms) {
                if (!known.count(a.name)) {
                    c.add(context + " tests attribute '" + a.name +
                          "', which no group, action, or domain declares");
                }
            }
        };
        for (const Rule& r : scenario.rules) {
            std::size_t ci = 0;
            for (const Clause& clause : r.clauses) {
                check_condition(clause.condition,
                                "rule '" + r.name + "' clause " + std::to_string(++ci));
            }
        }
    }

    for (const Rule& r : scenario.rules) {
        try {
            validate_mutual_exclusivity(r, scenario.domains);
        } catch (const Error& e) {
            c.add(e.what());
        }
    }

    // probes
    if (doc.contains("probes")) {
        if (!doc["probes"].is_array()) {
            c.add("probes must be an array");
        } else {
            std::set<std::string> probe_names;
            std::size_t i = 0;
            for (const ordered_json& p : doc["probes"]) {
                std::string context = "probes[" + std::to_string(i++) + "]";
                if (!p.is_object()) {
                    c.add(context + " must be an object");
                    continue;
                }
                check_keys(p, {"name", "site", "relation", "kind", "where"}, context, c);
                Probe probe;
                bool bad = false;
                auto required = [&](const char* key, std::string& out) {
                    if (!p.contains(key)) {
                        c.add(context + " needs '" + key + "'");
                        return false;
                    }
                    return want_string(p[key], context + "." + key, c, out);
                };
                if (!required("name", probe.name)) {
                    bad = true;
                } else if (!probe_names.insert(probe.name).second) {
                    c.add(context + ": duplicate probe name '" + probe.name + "'");
                    bad = true;
                }
                if (!required("site", probe.site)) {
                    bad = true;
                } else if (!site_ids.count(probe.site)) {
                    c.add(context + ": site '" + probe.site + "' is not declared");
                    bad = true;
                }
                if (!required("relation", probe.relation)) {
                    bad = true;
                } else if (!is_identifier(probe.relation)) {
                    c.add(context + ": relation '" + probe.relation +
                          "' is not a valid identifier");
                    bad = true;
                }
                if (p.contains("kind")) {
                    std::string kind;
                    if (want_string(p["kind"], context + ".kind", c, kind)) {
                        if (kind == "mass") {
                            probe.kind = Probe::Kind::mass;
                        } else if (kind == "proportion") {
                            probe.kind = Probe::Kind::proportion;
                        } else {
                            c.add(context + ".kind must be 'mass' or 'proportion'");
                            bad = true;
                        }
                    } else {
                        bad = true;
                    }
                }
                if (p.contains("where")) {
                    if (!p["where"].is_object()) {
                        c.add(context + ".where must be an object of equality tests");
                        bad = true;
                    } else {
                        for (const auto& [name, value] : p["where"].items()) {
                            auto v = want_attr_value(value, context + ".where." + name, c);
                            if (v) {
                                probe.predicate.require(name, *v);
                            } else {
                                bad = true;
                            }
                        }
                    }
                }
                if (!bad) scenario.probes.push_back(std::move(probe));
            }
        }
    }

    // materialize groups; duplicate signatures are author mistakes, not merges
    {
        std::set<std::string> keys;
        for (PendingGroup& p : pending) {
            std::string key = p.signature.canonical();
            if (!keys.insert(key).second) {
                c.add("group '" + p.name + "' duplicates the signature \"" + key +
                      "\" of an earlier group");
                continue;
            }
            scenario.initial.upsert(Group(std::move(p.signature), p.mass, std::move(p.name)));
        }
    }

    if (!c.ok()) throw ValidationError(std::move(c.problems));
    return scenario;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error::runtime("cannot open scenario file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_scenario(buffer.str());
    } catch (const ValidationError& e) {
        std::vector<std::string> problems = e.problems();
        for (std::string& p : problems) p = path + ": " + p;
        throw ValidationError(std::move(problems));
    }
}

std::string serialize_scenario(const Scenario& scenario) {
    ordered_json doc;
    doc["name"] = scenario.name;
    if (!scenario.description.empty()) doc["description"] = scenario.description;
    doc["iterations"] = scenario.iterations;

    ordered_json options;
    options["normalization"] =
        scenario.options.normalization == NormalizationMode::strict ? "strict" : "fill";
    options["conflict_policy"] =
        scenario.options.conflict_policy == ConflictPolicy::error ? "error" : "last_writer_wins";
    if (scenario.options.compaction_threshold > 0.0) {
        options["compaction_threshold"] = scenario.options.compaction_threshold;
    }
    doc["options"] = std::move(options);

    ordered_json sites = ordered_json::array();
    for (const auto& [id, site] : scenario.initial.sites()) {
        if (site.name == site.id) {
            sites.push_back(site.id);
        } else {
            sites.push_back(ordered_json{{"id", site.id}, {"name", site.name}});
        }
    }
    doc["sites"] = std::move(sites);

    ordered_json groups = ordered_json::array();
    for (const auto& [key, group] : scenario.initial.groups()) {
        ordered_json g;
        if (!group.display_name().empty()) g["name"] = group.display_name();
        g["mass"] = group.mass();
        ordered_json features;
        for (const auto& [name, value] : group.signature().features()) {
            features[name] = attr_value_json(value);
        }
        if (!features.empty()) g["features"] = std::move(features);
        ordered_json relations;
        for (const auto& [name, site] : group.signature().relations()) relations[name] = site;
        if (!relations.empty()) g["relations"] = std::move(relations);
        groups.push_back(std::move(g));
    }
    doc["groups"] = std::move(groups);

    ordered_json rules = ordered_json::array();
    for (const Rule& r : scenario.rules) rules.push_back(rule_json(r));
    doc["rules"] = std::move(rules);

    if (!scenario.probes.empty()) {
        ordered_json probes = ordered_json::array();
        for (const Probe& p : scenario.probes) {
            ordered_json probe;
            probe["name"] = p.name;
            probe["site"] = p.site;
            probe["relation"] = p.relation;
            probe["kind"] = p.kind == Probe::Kind::mass ? "mass" : "proportion";
            if (!p.predicate.empty()) {
                ordered_json where;
                for (const auto& [name, value] : p.predicate.tests()) {
                    where[name] = attr_value_json(value);
                }
                probe["where"] = std::move(where);
            }
            probes.push_back(std::move(probe));
        }
        doc["probes"] = std::move(probes);
    }

    if (!scenario.domains.values.empty()) {
        ordered_json domains;
        for (const auto& [name, values] : scenario.domains.values) {
            ordered_json list = ordered_json::array();
            for (const AttrValue& v : values) list.push_back(attr_value_json(v));
            domains[name] = std::move(list);
        }
        doc["domains"] = std::move(domains);
    }

    return doc.dump(2) + "\n";
}

void save_scenario(const Scenario& scenario, const std::string& path) {
    write_file(path, serialize_scenario(scenario));
}

RunOutputs run_scenario(const Scenario& scenario, int iterations_override,
                        int threads_override) {
    EngineOptions options = scenario.options;
    if (threads_override >= 1) options.threads = threads_override;
    int iterations = iterations_override >= 0 ? iterations_override : scenario.iterations;

    QueryLog log;
    RunOutputs out;
    out.trajectory = run(scenario.initial, scenario.rules, iterations, scenario.probes, options,
                         &log);
    out.warnings = log.messages();

    std::ostringstream t, p, s;
    write_trajectory_csv(t, out.trajectory);
    write_probes_csv(p, out.trajectory);
    write_summary(s, out.trajectory);
    out.trajectory_csv = t.str();
    out.probes_csv = p.str();
    out.summary_text = s.str();
    return out;
}

void write_run_outputs(const RunOutputs& outputs, const std::string& directory) {
    std::filesystem::create_directories(directory);
    std::filesystem::path dir(directory);
    write_file((dir / "trajectory.csv").string(), outputs.trajectory_csv);
    write_file((dir / "probes.csv").string(), outputs.probes_csv);
    write_file((dir / "summary.txt").string(), outputs.summary_text);
}

}  // namespace pram
