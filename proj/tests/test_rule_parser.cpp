#include "doctest.h"
#include "helpers.hpp"
#include "pram/rule_parser.hpp"

using namespace pram;

TEST_CASE("the two-rule flu model parses") {
    auto rules = parse_rules(testutil::flu_rules_text());
    REQUIRE(rules.size() == 2);
    CHECK(rules[0].name == "flu_progression");
    CHECK(rules[0].clauses.size() == 3);
    CHECK(rules[0].clauses[0].bundles.size() == 2);
    CHECK(rules[0].clauses[1].bundles.size() == 3);
    CHECK(rules[1].name == "flu_relocation");
    CHECK(rules[1].clauses.size() == 3);

    // first clause's first probability is an aggregate, not a constant
    CHECK_FALSE(rules[0].clauses[0].bundles[0].probability.is_constant());
    CHECK(rules[0].clauses[1].bundles[0].probability.is_constant());
}

TEST_CASE("actions parse into their three target forms") {
    Rule r = parse_rule(
        "rule moves { when flu == r => {"
        " 0.5 : move at -> adams ;"
        " 0.3 : move at -> current ;"
        " 0.2 : move at -> @school } }");
    const auto& bundles = r.clauses[0].bundles;
    REQUIRE(bundles.size() == 3);
    CHECK(bundles[0].actions[0].target == Action::MoveTarget::site);
    CHECK(bundles[0].actions[0].target_name == "adams");
    CHECK(bundles[1].actions[0].target == Action::MoveTarget::current);
    CHECK(bundles[2].actions[0].target == Action::MoveTarget::relation_ref);
    CHECK(bundles[2].actions[0].target_name == "school");
}

TEST_CASE("symbols may be integers") {
    Rule r = parse_rule("rule ages { when age == 7 => { 1 : set age = 8 } }");
    CHECK(r.clauses[0].condition.atoms[0].value == AttrValue::integer(7));
    CHECK(r.clauses[0].bundles[0].actions[0].value == AttrValue::integer(8));
    Rule n = parse_rule("rule neg { when delta == -2 => { 1 : set delta = 0 } }");
    CHECK(n.clauses[0].condition.atoms[0].value == AttrValue::integer(-2));
}

TEST_CASE("probability expressions follow arithmetic precedence") {
    Rule r = parse_rule(
        "rule calc { when f == a => {"
        " 0.5 + 0.25 * 2 : set f = b }}",
        NormalizationMode::fill);
    const Expression& p = r.clauses[0].bundles[0].probability;
    CHECK(p.is_constant());
    Population empty;
    Snapshot snap(empty);
    Group probe(Signature{}, 1.0);
    CHECK(p.evaluate(probe, snap) == doctest::Approx(1.0).epsilon(1e-15));

    Rule r2 = parse_rule(
        "rule calc2 { when f == a => {"
        " (1 - 0.25) / 3 : set f = b }}",
        NormalizationMode::fill);
    CHECK(r2.clauses[0].bundles[0].probability.evaluate(probe, snap) ==
          doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("number forms: decimals, leading dot, exponents") {
    CHECK_NOTHROW(parse_rule("rule n { when f == a => { .5 : set f = b ; 5e-1 : set f = a } }"));
}

TEST_CASE("bare identifiers in probability position read integer features") {
    Rule r = parse_rule("rule fr { when f == a => { w / 4 : set f = b } }",
                        NormalizationMode::fill);
    Population empty;
    Snapshot snap(empty);
    Group probe(Signature{}.set_feature("w", AttrValue::integer(2))
                    .set_feature("f", AttrValue::token("a")),
                1.0);
    CHECK(r.clauses[0].bundles[0].probability.evaluate(probe, snap) == 0.5);
}

TEST_CASE("parse errors carry 1-based positions") {
    try {
        parse_rule("rule broken {\n  when flu = s => { 1 : set flu = e }\n}");
        FAIL("should have thrown");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(e.col() > 10);
    }
}

TEST_CASE("static rejections") {
    // probability constant outside [0, 1]
    CHECK_THROWS_AS(parse_rule("rule p { when f == a => { 1.5 : set f = b } }"), ParseError);
    CHECK_THROWS_AS(parse_rule("rule p { when f == a => { 0 - 0.2 : set f = b } }"), ParseError);
    // strict: constant clause must sum to 1
    CHECK_THROWS_AS(parse_rule("rule p { when f == a => { 0.5 : set f = b } }"), ParseError);
    // fill: sums above 1 are still wrong
    CHECK_THROWS_AS(
        parse_rule("rule p { when f == a => { 0.8 : set f = b ; 0.9 : set f = a } }",
                   NormalizationMode::fill),
        ParseError);
    // fill accepts a shortfall
    CHECK_NOTHROW(parse_rule("rule p { when f == a => { 0.5 : set f = b } }",
                             NormalizationMode::fill));
    // duplicate clause conditions within a rule
    CHECK_THROWS_AS(parse_rule("rule p { when f == a => { 1 : set f = b }"
                               "         when f == a => { 1 : set f = c } }"),
                    ParseError);
    // a condition contradicting itself can never fire
    CHECK_THROWS_AS(
        parse_rule("rule p { when f == a and f == b => { 1 : set f = c } }"),
        ParseError);
    // unknown action verb
    CHECK_THROWS_WITH_AS(
        parse_rule("rule p { when f == a => { 1 : paint f = b } }"),
        doctest::Contains("unknown action"), ParseError);
    // trailing garbage after the rule block
    CHECK_THROWS_AS(parse_rule("rule p { when f == a => { 1 : set f = b } } extra"),
                    ParseError);
}

TEST_CASE("aggregate-bearing clauses skip the static sum check") {
    // cannot be summed statically; accepted and checked at evaluation time
    CHECK_NOTHROW(parse_rule(
        "rule p { when f == a => {"
        " proportion(at, f == b) : set f = b ;"
        " 1 - proportion(at, f == b) : set f = a } }"));
}
