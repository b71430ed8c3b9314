#pragma once
// Shared fixtures: the two-rule flu model whose one- and two-iteration
// redistributions are known exactly, plus small lookup helpers.

#include <cstdlib>
#include <map>
#include <string>

#include "pram/engine.hpp"
#include "pram/model.hpp"
#include "pram/rule_parser.hpp"

namespace testutil {

inline std::string scenario_dir() {
    if (const char* env = std::getenv("PRAM_SCENARIO_DIR")) return env;
#ifdef PRAM_SCENARIO_DIR
    return PRAM_SCENARIO_DIR;
#else
    return "scenarios";
#endif
}

// Two rules over flu stage, mood, income and location. Susceptibles catch
// flu in proportion to the exposed share at their location; exposed
// middle-income groups go home with probability 0.6; recovered groups drift
// back to the school site.
inline const char* flu_rules_text() {
    return R"(
rule flu_progression {
  when flu == s => {
    proportion(has_location, flu == e) : set flu = e, set mood = annoyed ;
    1 - proportion(has_location, flu == e) : set flu = s
  }
  when flu == e => {
    0.2 : set flu = r, set mood = happy ;
    0.5 : set flu = e, set mood = bored ;
    0.3 : set flu = e, set mood = annoyed
  }
  when flu == r => {
    0.9 : set flu = r ;
    0.1 : set flu = s
  }
}
rule flu_relocation {
  when flu == e and income == l => {
    0.1 : move has_location -> home ;
    0.9 : move has_location -> current
  }
  when flu == e and income == m => {
    0.6 : move has_location -> home ;
    0.4 : move has_location -> current
  }
  when flu == r => {
    0.8 : move has_location -> adams ;
    0.2 : move has_location -> current
  }
}
)";
}

inline std::vector<pram::Rule> flu_rules() { return pram::parse_rules(flu_rules_text()); }

// 900 susceptible + 100 exposed, all middle income, all at adams.
inline pram::Population flu_initial() {
    pram::Population p;
    p.add_site({"adams", "adams"});
    p.add_site({"home", "home"});
    pram::Signature s1;
    s1.set_feature("flu", pram::AttrValue::token("s"))
        .set_feature("mood", pram::AttrValue::token("happy"))
        .set_feature("income", pram::AttrValue::token("m"))
        .set_relation("has_location", "adams");
    pram::Signature s2;
    s2.set_feature("flu", pram::AttrValue::token("e"))
        .set_feature("mood", pram::AttrValue::token("annoyed"))
        .set_feature("income", pram::AttrValue::token("m"))
        .set_relation("has_location", "adams");
    p.upsert(pram::Group(std::move(s1), 900.0, "g1"));
    p.upsert(pram::Group(std::move(s2), 100.0, "g2"));
    return p;
}

// mass per signature key at one iteration of a trajectory
inline std::map<std::string, double> masses_at(const pram::Trajectory& t, int iteration) {
    std::map<std::string, double> out;
    for (const auto& row : t.rows) {
        if (row.iteration == iteration) out[row.signature] = row.mass;
    }
    return out;
}

inline std::map<std::string, double> masses_of(const pram::Population& p) {
    std::map<std::string, double> out;
    for (const auto& [key, group] : p.groups()) out[key] = group.mass();
    return out;
}

}  // namespace testutil
