#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "pram/oracle.hpp"
#include "pram/rule_parser.hpp"

using namespace pram;

namespace {

std::vector<Rule> sir_rules() {
    return parse_rules(
        "rule sir_stage {"
        " when stage == s => { 0.1 : set stage = e ; 0.9 : set stage = s }"
        " when stage == e => { 0.2 : set stage = r ; 0.8 : set stage = e } }");
}

Signature stage(const char* v) {
    Signature sig;
    sig.set_feature("stage", AttrValue::token(v));
    return sig;
}

}  // namespace

TEST_CASE("signature closure of the three-stage chain") {
    auto reach = reachable_signatures({stage("s")}, sir_rules());
    REQUIRE(reach.size() == 3);
    CHECK(reach[0].canonical() == "stage=e;");
    CHECK(reach[1].canonical() == "stage=r;");
    CHECK(reach[2].canonical() == "stage=s;");
}

TEST_CASE("signature closure of the flu fixture is eight groups") {
    std::vector<Signature> seeds;
    Population initial = testutil::flu_initial();
    for (const auto& [key, g] : initial.groups()) seeds.push_back(g.signature());
    auto reach = reachable_signatures(seeds, testutil::flu_rules());
    CHECK(reach.size() == 8);
    // the one signature absent from the two-iteration table is never reachable
    bool has_recovered_home = false;
    for (const Signature& s : reach) {
        if (s.canonical() == "flu=r,income=m,mood=happy;has_location=home") {
            has_recovered_home = true;
        }
    }
    CHECK(has_recovered_home);
}

TEST_CASE("closure enumeration refuses to run away") {
    std::vector<Signature> seeds;
    Population initial = testutil::flu_initial();
    for (const auto& [key, g] : initial.groups()) seeds.push_back(g.signature());
    CHECK_THROWS_AS(reachable_signatures(seeds, testutil::flu_rules(), 4), Error);
}

TEST_CASE("transition matrix of the three-stage chain") {
    auto states = reachable_signatures({stage("s")}, sir_rules());
    TransitionMatrix tm = build_transition_matrix(sir_rules(), states);
    REQUIRE(tm.keys.size() == 3);
    // canonical state order is e, r, s
    std::size_t e = tm.index_of("stage=e;");
    std::size_t r = tm.index_of("stage=r;");
    std::size_t s = tm.index_of("stage=s;");
    CHECK(e == 0);
    CHECK(r == 1);
    CHECK(s == 2);

    CHECK(tm.rows[s][e] == 0.1);
    CHECK(tm.rows[s][s] == 0.9);
    CHECK(tm.rows[s][r] == 0.0);
    CHECK(tm.rows[e][r] == 0.2);
    CHECK(tm.rows[e][e] == 0.8);
    CHECK(tm.rows[e][s] == 0.0);
    // nothing fires for the recovered state, so it holds still
    CHECK(tm.rows[r][r] == 1.0);
    CHECK(tm.rows[r][e] == 0.0);
    CHECK(tm.rows[r][s] == 0.0);

    CHECK_THROWS_AS(tm.index_of("stage=zzz;"), Error);
}

TEST_CASE("state-dependent probabilities cannot form a transition matrix") {
    std::vector<Signature> seeds;
    Population initial = testutil::flu_initial();
    for (const auto& [key, g] : initial.groups()) seeds.push_back(g.signature());
    auto states = reachable_signatures(seeds, testutil::flu_rules());
    CHECK_THROWS_WITH_AS(build_transition_matrix(testutil::flu_rules(), states),
                         doctest::Contains("flu_progression"), Error);
}

TEST_CASE("a state list missing a reachable target is rejected") {
    std::vector<Signature> only_s{stage("s")};
    CHECK_THROWS_AS(build_transition_matrix(sir_rules(), only_s), Error);
}

TEST_CASE("expected counts follow init times matrix powers") {
    auto states = reachable_signatures({stage("s")}, sir_rules());
    TransitionMatrix tm = build_transition_matrix(sir_rules(), states);
    // order e, r, s
    std::vector<double> init{100.0, 0.0, 900.0};

    auto t0 = markov_expected_counts(tm, init, 0);
    CHECK(t0 == init);

    auto t1 = markov_expected_counts(tm, init, 1);
    CHECK(t1[tm.index_of("stage=e;")] == doctest::Approx(170.0).epsilon(1e-12));
    CHECK(t1[tm.index_of("stage=r;")] == doctest::Approx(20.0).epsilon(1e-12));
    CHECK(t1[tm.index_of("stage=s;")] == doctest::Approx(810.0).epsilon(1e-12));

    // total count is preserved by a stochastic matrix
    auto t50 = markov_expected_counts(tm, init, 50);
    double total = 0.0;
    for (double v : t50) total += v;
    CHECK(total == doctest::Approx(1000.0).epsilon(1e-12));
    // everything drains into the absorbing state
    CHECK(t50[tm.index_of("stage=r;")] > 900.0);
}

TEST_CASE("agent simulation is reproducible and thread-count invariant") {
    Population pop;
    pop.upsert(Group(stage("s"), 900.0));
    pop.upsert(Group(stage("e"), 100.0));

    AgentSimResult a = simulate_agents(pop, sir_rules(), 3, 42, 6, 2000);
    AgentSimResult b = simulate_agents(pop, sir_rules(), 3, 42, 6, 2000);
    AgentSimResult c = simulate_agents(pop, sir_rules(), 3, 42, 6, 2000, {}, 4);

    CHECK(a.total_agents == 2000);
    CHECK(a.replicates == 6);
    REQUIRE(a.keys == b.keys);
    REQUIRE(a.keys == c.keys);
    for (std::size_t t = 0; t < a.mean.size(); ++t) {
        for (std::size_t k = 0; k < a.keys.size(); ++k) {
            CHECK(a.mean[t][k] == b.mean[t][k]);
            CHECK(a.se[t][k] == b.se[t][k]);
            CHECK(a.mean[t][k] == c.mean[t][k]);
            CHECK(a.se[t][k] == c.se[t][k]);
        }
    }

    // a different seed gives a genuinely different draw
    AgentSimResult d = simulate_agents(pop, sir_rules(), 3, 43, 6, 2000);
    bool any_differs = false;
    for (std::size_t t = 1; t < a.mean.size() && !any_differs; ++t) {
        for (std::size_t k = 0; k < a.keys.size(); ++k) {
            if (a.mean[t][k] != d.mean[t][k]) any_differs = true;
        }
    }
    CHECK(any_differs);
}

TEST_CASE("agent means sit near the exact chain expectations") {
    Population pop;
    pop.upsert(Group(stage("s"), 900.0));
    pop.upsert(Group(stage("e"), 100.0));

    const int t = 4;
    const long long agents = 20000;
    AgentSimResult sim = simulate_agents(pop, sir_rules(), t, 7, 10, agents);

    auto states = reachable_signatures({stage("s"), stage("e")}, sir_rules());
    TransitionMatrix tm = build_transition_matrix(sir_rules(), states);
    std::vector<double> init(3, 0.0);
    init[tm.index_of("stage=s;")] = 900.0 * (agents / 1000.0);
    init[tm.index_of("stage=e;")] = 100.0 * (agents / 1000.0);
    auto expect = markov_expected_counts(tm, init, t);

    for (std::size_t k = 0; k < sim.keys.size(); ++k) {
        double want = expect[tm.index_of(sim.keys[k])];
        double got = sim.mean[t][k];
        double slack = 5.0 * std::max(sim.se[t][k], 1.0);
        INFO("key ", sim.keys[k], " mean ", got, " expected ", want, " se ", sim.se[t][k]);
        CHECK(std::fabs(got - want) <= slack);
    }
}
