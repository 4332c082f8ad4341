#include <catch2/catch_amalgamated.hpp>

#include "subdyn/interact.hpp"

using namespace subdyn;

namespace {

// One object, one instant; a state is alive under a parameter when its
// identity image keeps it.
OpenDynamics point_component(const std::set<StateId>& states,
                             const std::map<ParamId, std::set<StateId>>& alive) {
    MultiDynamics dyn;
    dyn.motor = build_interval_poset(0);
    dyn.states["0"] = states;
    for (const auto& [p, live] : alive) {
        dyn.params.insert(p);
        for (const auto& s : live) set_image(dyn, "0->0", p, s, {s});
    }
    OpenDynamics od{dyn, build_essential_clock_singleton(dyn.motor), {}};
    for (const auto& s : states) od.scansion[s] = "0";
    return od;
}

ExternalPart ep(const StateId& s) { return {{"0", s}}; }

InteractionTuple tup(const std::vector<std::tuple<ComponentId, ParamId, StateId>>& entries) {
    InteractionTuple t;
    for (const auto& [i, p, s] : entries) t[i] = TupleEntry{p, ep(s)};
    return t;
}

std::map<ComponentId, OpenDynamics> fixture_pq() {
    return {{"P", point_component({"p1", "p2"}, {{"x", {"p1"}}, {"y", {"p1", "p2"}}})},
            {"Q", point_component({"q1"}, {{"z", {"q1"}}})}};
}

} // namespace

TEST_CASE("contexts collect nonempty realization parts per parameter") {
    auto ctx = compute_contexts(fixture_pq());
    CHECK(ctx.star.at("P").at("x") == std::set<ExternalPart>{ep("p1")});
    CHECK(ctx.star.at("P").at("y") == std::set<ExternalPart>{ep("p1"), ep("p2")});
    CHECK(ctx.star_all.at("P") == std::set<ExternalPart>{ep("p1"), ep("p2")});
    CHECK(ctx.star_all.at("Q") == std::set<ExternalPart>{ep("q1")});
    CHECK(ctx.params.at("P") == std::set<ParamId>{"x", "y"});

    CHECK_THROWS_AS(compute_contexts(fixture_pq(), 2), Error);
}

TEST_CASE("tuple coherence and the coherent part") {
    auto ctx = compute_contexts(fixture_pq());
    InteractionTuple good = tup({{"P", "x", "p1"}, {"Q", "z", "q1"}});
    InteractionTuple bad = tup({{"P", "x", "p2"}, {"Q", "z", "q1"}});
    CHECK(is_coherent_tuple(good, ctx));
    CHECK_FALSE(is_coherent_tuple(bad, ctx));

    RelationRP mixed{{"P", "Q"}, {good, bad}};
    auto part = coherent_part(mixed, ctx);
    REQUIRE(part.has_value());
    CHECK(part->tuples == std::set<InteractionTuple>{good});
    CHECK(is_interaction(*part, ctx));
    CHECK_FALSE(is_interaction(mixed, ctx));

    SECTION("idempotent") {
        auto again = coherent_part(*part, ctx);
        REQUIRE(again.has_value());
        CHECK(*again == *part);
    }
    SECTION("empty coherent part") {
        RelationRP all_bad{{"P", "Q"}, {bad}};
        CHECK_FALSE(coherent_part(all_bad, ctx).has_value());
    }
    SECTION("validation flags foreign parts and params") {
        RelationRP rel{{"P", "Q"}, {good}};
        CHECK(validate_relation(rel, ctx).ok());
        RelationRP unsorted{{"Q", "P"}, {good}};
        CHECK_FALSE(validate_relation(unsorted, ctx).ok());
        InteractionTuple foreign = tup({{"P", "w", "p1"}, {"Q", "z", "q1"}});
        CHECK_FALSE(validate_relation({{"P", "Q"}, {foreign}}, ctx).ok());
        InteractionTuple ghost = tup({{"P", "x", "p9"}, {"Q", "z", "q1"}});
        CHECK_FALSE(validate_relation({{"P", "Q"}, {ghost}}, ctx).ok());
    }
}

TEST_CASE("null interaction pairs every coherent entry") {
    auto ctx = compute_contexts(fixture_pq());
    RelationRP omega = null_interaction(ctx);
    CHECK(omega.index == std::vector<ComponentId>{"P", "Q"});
    CHECK(omega.tuples.size() == 3); // (x,p1),(y,p1),(y,p2) against (z,q1)
    CHECK(is_interaction(omega, ctx));

    CHECK_FALSE(is_filtering(omega, ctx));
    CHECK_FALSE(is_operant(omega, ctx));
    CHECK(is_normal(omega, ctx));
    CHECK(is_normal_bruteforce(omega, ctx));
    CHECK_FALSE(is_determining(omega)); // (p1,q1) pairs with both (x,z) and (y,z)

    SECTION("discrete realization structure") {
        auto structure = connectivity_structure(realization_relation(omega),
                                                {ctx.star.begin()->first, "Q"});
        std::set<std::set<ComponentId>> expect{{}, {"P"}, {"Q"}};
        CHECK(structure == expect);
    }
    SECTION("a dead component is rejected") {
        auto comps = fixture_pq();
        comps["R"] = point_component({"r"}, {{"w", {}}});
        CHECK_THROWS_AS(null_interaction(compute_contexts(comps)), Error);
    }
    SECTION("tuple limit") {
        CHECK_THROWS_AS(null_interaction(ctx, 2), Error);
    }
}

TEST_CASE("a filtering interaction with excusable gaps is normal and concrete") {
    auto ctx = compute_contexts(fixture_pq());
    RelationRP rel{{"P", "Q"}, {tup({{"P", "x", "p1"}, {"Q", "z", "q1"}})}};
    REQUIRE(is_interaction(rel, ctx));

    CHECK(is_filtering(rel, ctx)); // (p2, q1) is never paired
    CHECK(is_operant(rel, ctx));
    // the missing (p2, q1) is excused: p2 is incoherent with parameter x
    CHECK(is_normal(rel, ctx));
    CHECK(is_normal_bruteforce(rel, ctx));
    CHECK(is_determining(rel));
    CHECK(is_concrete(rel, ctx));
}

TEST_CASE("a gap that no parameter can excuse breaks normality") {
    std::map<ComponentId, OpenDynamics> comps{
        {"Q2", point_component({"q1", "q2"}, {{"z", {"q1", "q2"}}})}};
    auto ctx = compute_contexts(comps);
    RelationRP rel{{"Q2"}, {tup({{"Q2", "z", "q1"}})}};

    CHECK(is_filtering(rel, ctx));
    CHECK_FALSE(is_normal(rel, ctx));
    CHECK_FALSE(is_normal_bruteforce(rel, ctx));
    CHECK(is_determining(rel));
    CHECK_FALSE(is_concrete(rel, ctx));
}

TEST_CASE("the diagonal relation is determining but not normal") {
    std::map<ComponentId, OpenDynamics> comps{
        {"1", point_component({"s", "t"}, {{"u", {"s", "t"}}})},
        {"2", point_component({"s2", "t2"}, {{"u", {"s2", "t2"}}})}};
    auto ctx = compute_contexts(comps);
    RelationRP diag{{"1", "2"},
                    {tup({{"1", "u", "s"}, {"2", "u", "s2"}}),
                     tup({{"1", "u", "t"}, {"2", "u", "t2"}})}};
    REQUIRE(is_interaction(diag, ctx));

    CHECK(is_filtering(diag, ctx));
    CHECK_FALSE(is_normal(diag, ctx));
    CHECK_FALSE(is_normal_bruteforce(diag, ctx));
    CHECK(is_determining(diag));
    CHECK_FALSE(is_concrete(diag, ctx));

    SECTION("the two coordinates are connected by the diagonal") {
        auto structure = connectivity_structure(realization_relation(diag), {"1", "2"});
        CHECK(structure.count({"1", "2"}) == 1);
        CHECK(structure.count({"1"}) == 1);
        CHECK(structure.count({"2"}) == 1);
        CHECK(structure.count({}) == 1);
    }
    SECTION("the full product on the same coordinates is discrete") {
        RelationRP total = diag;
        total.tuples.insert(tup({{"1", "u", "s"}, {"2", "u", "t2"}}));
        total.tuples.insert(tup({{"1", "u", "t"}, {"2", "u", "s2"}}));
        auto structure = connectivity_structure(realization_relation(total), {"1", "2"});
        std::set<std::set<ComponentId>> expect{{}, {"1"}, {"2"}};
        CHECK(structure == expect);
    }
    SECTION("brute force respects its cap") {
        CHECK_THROWS_AS(is_normal_bruteforce(diag, ctx, 3), Error);
    }
}

TEST_CASE("a fully synchronized triple is connected only as a whole") {
    // all three coordinates move in step; fixing any one of them pins the
    // other two, so no proper pair is connected, yet the full triple is
    std::set<std::map<ComponentId, std::string>> rel{
        {{"1", "a"}, {"2", "a"}, {"3", "a"}},
        {{"1", "b"}, {"2", "b"}, {"3", "b"}},
    };
    auto structure = connectivity_structure(rel, {"1", "2", "3"});
    std::set<std::set<ComponentId>> expect{{}, {"1"}, {"2"}, {"3"}, {"1", "2", "3"}};
    CHECK(structure == expect);

    // every pair with a common point has its union inside
    for (const auto& a : structure)
        for (const auto& b : structure) {
            std::set<ComponentId> meet;
            std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                                  std::inserter(meet, meet.begin()));
            if (meet.empty()) continue;
            std::set<ComponentId> join;
            std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                           std::inserter(join, join.begin()));
            CHECK(structure.count(join) == 1);
        }
}

TEST_CASE("dispositions restrict tuples slotwise") {
    auto ctx = compute_contexts(fixture_pq());
    RelationRP rel{{"P", "Q"},
                   {tup({{"P", "x", "p1"}, {"Q", "z", "q1"}}),
                    tup({{"P", "y", "p2"}, {"Q", "z", "q1"}})}};

    CHECK(is_compatible(Disposition{}, rel));
    CHECK(is_compatible(Disposition{{{"P", ep("p1")}}, {}}, rel));
    CHECK(is_compatible(Disposition{{}, {{"P", "y"}}}, rel));
    CHECK_FALSE(is_compatible(Disposition{{{"P", ep("p2")}}, {{"P", "x"}}}, rel));
    CHECK(is_compatible(Disposition{{{"P", ep("p2")}, {"Q", ep("q1")}}, {{"P", "y"}, {"Q", "z"}}},
                        rel));
    CHECK_FALSE(is_compatible(Disposition{{{"P", ep("p1")}}, {{"Q", "z"}, {"P", "y"}}}, rel));

    SECTION("slots outside the index are ill typed") {
        CHECK_THROWS_AS(is_compatible(Disposition{{{"W", ep("p1")}}, {}}, rel), Error);
        CHECK_THROWS_AS(is_compatible(Disposition{{}, {{"W", "x"}}}, rel), Error);
    }
}

TEST_CASE("joining dispositions") {
    Disposition a{{{"P", ep("p1")}}, {}};
    Disposition b{{}, {{"Q", "z"}}};
    Disposition ab = join_dispositions(a, b);
    CHECK(ab.realization_slots == a.realization_slots);
    CHECK(ab.param_slots == b.param_slots);

    CHECK(join_dispositions(a, Disposition{}) == a);
    CHECK(join_dispositions(a, a) == a);

    Disposition conflict{{{"P", ep("p2")}}, {}};
    CHECK_THROWS_AS(join_dispositions(a, conflict), Error);
    try {
        join_dispositions(a, conflict);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::IncompatibleDispositions);
    }
}
