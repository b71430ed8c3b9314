#include <string>

#include "doctest.h"
#include "helpers.hpp"
#include "pram/scenario.hpp"

using namespace pram;

namespace {

std::string builtin(const std::string& stem) {
    return testutil::scenario_dir() + "/" + stem + ".json";
}

}  // namespace

TEST_CASE("the bundled scenarios load and have the advertised shape") {
    Scenario flu = load_scenario(builtin("flu-two-rules"));
    CHECK(flu.name == "flu-two-rules");
    CHECK(flu.iterations == 2);
    CHECK(flu.initial.size() == 2);
    CHECK(flu.initial.total_mass() == 1000.0);
    CHECK(flu.rules.size() == 2);
    CHECK(flu.probes.size() == 2);
    CHECK(flu.initial.site("adams") != nullptr);
    CHECK(flu.initial.site("home") != nullptr);

    Scenario sir = load_scenario(builtin("sir-minimal"));
    CHECK(sir.iterations == 100);
    CHECK(sir.initial.size() == 2);
    CHECK(sir.rules.size() == 1);
    CHECK(sir.probes.empty());

    Scenario schools = load_scenario(builtin("adams-berry"));
    CHECK(schools.initial.size() == 4);
    CHECK(schools.rules.size() == 2);
    CHECK(schools.probes.size() == 2);
    CHECK(schools.initial.site("berry")->name == "Berry Elementary");

    Scenario city = load_scenario(builtin("pittsburgh-23"));
    CHECK(city.initial.size() == 46);
    CHECK(city.probes.size() == 23);
    CHECK(city.initial.sites().size() == 24);  // 23 schools and home
}

TEST_CASE("every problem in a broken scenario is reported at once") {
    const char* text = R"({
        "name": "",
        "iterations": -3,
        "mystery": true,
        "groups": [{"mass": -1, "features": {"f": "a"}}],
        "rules": "rule t { when f == a => { 1 : set f = b } }"
    })";
    try {
        parse_scenario(text);
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(e.problems().size() >= 4);
        std::string all = e.what();
        CHECK(all.find("unknown key 'mystery'") != std::string::npos);
        CHECK(all.find("name") != std::string::npos);
        CHECK(all.find("iterations") != std::string::npos);
        CHECK(all.find("mass") != std::string::npos);
    }
}

TEST_CASE("structured rules behave exactly like their DSL equivalent") {
    const char* dsl_form = R"({
        "name": "t", "iterations": 5,
        "groups": [{"mass": 100, "features": {"stage": "s"}},
                   {"mass": 10, "features": {"stage": "e"}}],
        "rules": "rule step { when stage == s => { 0.25 : set stage = e ; 0.75 : set stage = s } when stage == e => { 0.5 : set stage = r ; 0.5 : set stage = e } }"
    })";
    const char* structured_form = R"({
        "name": "t", "iterations": 5,
        "groups": [{"mass": 100, "features": {"stage": "s"}},
                   {"mass": 10, "features": {"stage": "e"}}],
        "rules": [{
            "name": "step",
            "clauses": [
                {"when": {"stage": "s"},
                 "distribution": [{"p": 0.25, "actions": ["set stage = e"]},
                                  {"p": 0.75, "actions": ["set stage = s"]}]},
                {"when": "stage == e",
                 "distribution": [{"p": "0.5", "actions": ["set stage = r"]},
                                  {"p": 0.5, "actions": ["set stage = e"]}]}
            ]
        }]
    })";
    Scenario a = parse_scenario(dsl_form);
    Scenario b = parse_scenario(structured_form);
    RunOutputs ra = run_scenario(a);
    RunOutputs rb = run_scenario(b);
    CHECK(ra.trajectory_csv == rb.trajectory_csv);
}

TEST_CASE("serialization round-trips to the identical run") {
    for (const char* stem : {"flu-two-rules", "sir-minimal", "adams-berry"}) {
        CAPTURE(stem);
        Scenario original = load_scenario(builtin(stem));
        Scenario reloaded = parse_scenario(serialize_scenario(original));
        CHECK(original.name == reloaded.name);
        CHECK(original.iterations == reloaded.iterations);
        RunOutputs a = run_scenario(original, 5);
        RunOutputs b = run_scenario(reloaded, 5);
        CHECK(a.trajectory_csv == b.trajectory_csv);
        CHECK(a.probes_csv == b.probes_csv);
    }
}

TEST_CASE("the thread override cannot change the rendered output") {
    Scenario flu = load_scenario(builtin("flu-two-rules"));
    RunOutputs serial = run_scenario(flu, 6, 1);
    RunOutputs parallel = run_scenario(flu, 6, 4);
    CHECK(serial.trajectory_csv == parallel.trajectory_csv);
    CHECK(serial.probes_csv == parallel.probes_csv);
    CHECK(serial.summary_text == parallel.summary_text);
}

TEST_CASE("running the flu scenario emits the frozen trajectory head") {
    Scenario flu = load_scenario(builtin("flu-two-rules"));
    RunOutputs out = run_scenario(flu);
    CHECK(out.trajectory_csv.rfind("iter,signature,mass\n", 0) == 0);
    CHECK(out.trajectory_csv.find(
              "0,\"flu=s,income=m,mood=happy;has_location=adams\",900\n") != std::string::npos);
    CHECK(out.trajectory_csv.find(
              "1,\"flu=r,income=m,mood=happy;has_location=adams\",8.0000000000000018\n") !=
          std::string::npos);
    CHECK(out.probes_csv.rfind("iter,probe_name,value\n", 0) == 0);
    // the home site is empty before the first iteration, which the run flags
    REQUIRE(out.warnings.size() == 1);
    CHECK(out.warnings[0].find("home") != std::string::npos);
    CHECK(out.summary_text.find("g2_1_1") != std::string::npos);
}

TEST_CASE("declared sites are authoritative") {
    const char* undeclared_group_site = R"({
        "name": "t", "sites": ["adams"],
        "groups": [{"mass": 1, "features": {"f": "a"}, "relations": {"at": "berry"}}],
        "rules": "rule t { when f == a => { 1 : set f = b } }"
    })";
    CHECK_THROWS_WITH_AS(parse_scenario(undeclared_group_site),
                         doctest::Contains("not declared"), ValidationError);

    const char* undeclared_move_target = R"({
        "name": "t", "sites": ["adams"],
        "groups": [{"mass": 1, "features": {"f": "a"}, "relations": {"at": "adams"}}],
        "rules": "rule t { when f == a => { 1 : move at -> berry } }"
    })";
    CHECK_THROWS_WITH_AS(parse_scenario(undeclared_move_target),
                         doctest::Contains("not declared"), ValidationError);

    // with no sites block both spellings infer their sites instead
    const char* inferred = R"({
        "name": "t",
        "groups": [{"mass": 1, "features": {"f": "a"}, "relations": {"at": "berry"}}],
        "rules": "rule t { when f == a => { 1 : move at -> adams } }"
    })";
    Scenario s = parse_scenario(inferred);
    CHECK(s.initial.site("adams") != nullptr);
    CHECK(s.initial.site("berry") != nullptr);
}

TEST_CASE("current cannot be used as a site id") {
    const char* text = R"({
        "name": "t", "sites": ["current"],
        "groups": [{"mass": 1, "features": {"f": "a"}}],
        "rules": "rule t { when f == a => { 1 : set f = b } }"
    })";
    CHECK_THROWS_WITH_AS(parse_scenario(text), doctest::Contains("reserved"), ValidationError);
}

TEST_CASE("two groups with one signature are an authoring error") {
    const char* text = R"({
        "name": "t",
        "groups": [{"name": "a", "mass": 1, "features": {"f": "a"}},
                   {"name": "b", "mass": 2, "features": {"f": "a"}}],
        "rules": "rule t { when f == a => { 1 : set f = b } }"
    })";
    CHECK_THROWS_WITH_AS(parse_scenario(text), doctest::Contains("duplicates the signature"),
                         ValidationError);
}

TEST_CASE("overlapping clause conditions are caught at load time") {
    const char* text = R"({
        "name": "t",
        "groups": [{"mass": 1, "features": {"f": "a", "g": "x"}}],
        "rules": "rule t { when f == a => { 1 : set f = b } when g == x => { 1 : set g = y } }"
    })";
    CHECK_THROWS_WITH_AS(parse_scenario(text), doctest::Contains("both match"), ValidationError);
}

TEST_CASE("a condition on an attribute nothing declares is flagged") {
    const char* text = R"({
        "name": "t",
        "groups": [{"mass": 1, "features": {"f": "a"}}],
        "rules": "rule t { when ghost == a => { 1 : set f = b } }"
    })";
    CHECK_THROWS_WITH_AS(parse_scenario(text),
                         doctest::Contains("no group, action, or domain declares"),
                         ValidationError);

    // an explicit domain legitimizes the attribute
    const char* with_domain = R"({
        "name": "t",
        "groups": [{"mass": 1, "features": {"f": "a"}}],
        "rules": "rule t { when ghost == a => { 1 : set f = b } }",
        "domains": {"ghost": ["a", "b"]}
    })";
    CHECK_NOTHROW(parse_scenario(with_domain));
}

TEST_CASE("probe declarations are validated") {
    const char* missing_bits = R"({
        "name": "t", "sites": ["adams"],
        "groups": [{"mass": 1, "features": {"f": "a"}, "relations": {"at": "adams"}}],
        "rules": "rule t { when f == a => { 1 : set f = b } }",
        "probes": [{"name": "p"}]
    })";
    try {
        parse_scenario(missing_bits);
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        std::string all = e.what();
        CHECK(all.find("probes[0] needs 'site'") != std::string::npos);
        CHECK(all.find("probes[0] needs 'relation'") != std::string::npos);
    }

    const char* bad_site_and_dup = R"({
        "name": "t", "sites": ["adams"],
        "groups": [{"mass": 1, "features": {"f": "a"}, "relations": {"at": "adams"}}],
        "rules": "rule t { when f == a => { 1 : set f = b } }",
        "probes": [{"name": "p", "site": "nowhere", "relation": "at"},
                   {"name": "p", "site": "adams", "relation": "at", "kind": "mass"}]
    })";
    try {
        parse_scenario(bad_site_and_dup);
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        std::string all = e.what();
        CHECK(all.find("site 'nowhere' is not declared") != std::string::npos);
        CHECK(all.find("duplicate probe name") != std::string::npos);
    }
}

TEST_CASE("mass probes report masses, proportion probes report shares") {
    const char* text = R"({
        "name": "t", "iterations": 1, "sites": ["s0"],
        "groups": [{"mass": 80, "features": {"f": "a"}, "relations": {"at": "s0"}},
                   {"mass": 20, "features": {"f": "b"}, "relations": {"at": "s0"}}],
        "rules": "rule t { when f == a => { 1 : set f = a } }",
        "probes": [{"name": "share_b", "site": "s0", "relation": "at", "where": {"f": "b"}},
                   {"name": "mass_b", "site": "s0", "relation": "at", "kind": "mass",
                    "where": {"f": "b"}}]
    })";
    Scenario s = parse_scenario(text);
    RunOutputs out = run_scenario(s);
    REQUIRE(out.trajectory.probe_values.size() == 4);
    for (const auto& pv : out.trajectory.probe_values) {
        if (pv.probe == "share_b") CHECK(pv.value == 0.2);
        if (pv.probe == "mass_b") CHECK(pv.value == 20.0);
    }
}
