#include "doctest.h"
#include "helpers.hpp"
#include "pram/snapshot.hpp"

using namespace pram;

namespace {

Population two_site_population() {
    Population p;
    p.add_site({"adams", "adams"});
    p.add_site({"berry", "berry"});
    auto group = [](const char* flu, const char* site, double mass) {
        Signature sig;
        sig.set_feature("flu", AttrValue::token(flu)).set_relation("at", site);
        return Group(std::move(sig), mass);
    };
    p.upsert(group("s", "adams", 900));
    p.upsert(group("e", "adams", 100));
    p.upsert(group("s", "berry", 60));
    return p;
}

}  // namespace

TEST_CASE("aggregates answer from the frozen population") {
    Population p = two_site_population();
    Snapshot snap(p);
    CHECK(snap.total_mass() == doctest::Approx(1060).epsilon(1e-12));

    Predicate exposed;
    exposed.require("flu", AttrValue::token("e"));
    CHECK(snap.mass_at("adams", "at", exposed) == 100.0);
    CHECK(snap.mass_at("adams", "at", Predicate{}) == 1000.0);
    CHECK(snap.proportion_at("adams", "at", exposed) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(snap.mass_at("berry", "at", exposed) == 0.0);
    CHECK(snap.proportion_at("berry", "at", exposed) == 0.0);

    CHECK(snap.groups_at("adams", "at").size() == 2);
    CHECK(snap.groups_at("berry", "at").size() == 1);
    CHECK(snap.groups_at("adams", "elsewhere").empty());
}

TEST_CASE("a predicate referencing a missing feature matches nothing") {
    Population p = two_site_population();
    Snapshot snap(p);
    Predicate q;
    q.require("mood", AttrValue::token("happy"));
    CHECK(snap.mass_at("adams", "at", q) == 0.0);
}

TEST_CASE("zero-denominator proportions answer 0 and are logged once per site") {
    Population p = two_site_population();
    p.add_site({"home", "home"});
    Snapshot snap(p);
    QueryLog log;
    Predicate any;
    CHECK(snap.proportion_at("home", "at", any, &log) == 0.0);
    CHECK(snap.proportion_at("home", "at", any, &log) == 0.0);
    CHECK(log.zero_denominator_count() == 2);
    CHECK(log.messages().size() == 1);  // deduplicated per (site, relation)
}

TEST_CASE("relation targets resolve through the site table") {
    Population p = two_site_population();
    Snapshot snap(p);
    const Group* g = snap.find("flu=s;at=adams");
    REQUIRE(g != nullptr);
    CHECK(snap.relation_target(*g, "at").id == "adams");
    CHECK_THROWS_WITH_AS(snap.relation_target(*g, "has_school"),
                         doctest::Contains("has_school"), Error);
}

TEST_CASE("snapshot group order is canonical") {
    Population p = two_site_population();
    Snapshot snap(p);
    std::string previous;
    for (const Group& g : snap.groups()) {
        CHECK(previous < g.key());
        previous = g.key();
    }
}
