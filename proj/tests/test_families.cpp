#include <catch2/catch_amalgamated.hpp>

#include "subdyn/families.hpp"

using namespace subdyn;

namespace {

OpenDynamics line_component() {
    MultiDynamics dyn;
    dyn.motor = build_interval_poset(1);
    dyn.params = {"lam"};
    dyn.states["0"] = {"a", "b"};
    dyn.states["1"] = {"c"};
    set_image(dyn, "0->0", "lam", "a", {"a"});
    set_image(dyn, "0->0", "lam", "b", {"b"});
    set_image(dyn, "1->1", "lam", "c", {"c"});
    set_image(dyn, "0->1", "lam", "a", {"c"});
    return OpenDynamics{dyn, build_essential_clock_singleton(dyn.motor),
                        {{"a", "0"}, {"b", "0"}, {"c", "1"}}};
}

OpenDynamics point_component() {
    MultiDynamics dyn;
    dyn.motor = build_interval_poset(0);
    dyn.params = {"mu"};
    dyn.states["0"] = {"p"};
    set_image(dyn, "0->0", "mu", "p", {"p"});
    return OpenDynamics{dyn, build_essential_clock_singleton(dyn.motor), {{"p", "0"}}};
}

Synchronization collapse_to_point() {
    Synchronization sync;
    sync.obj_map = {{"0", "0"}, {"1", "0"}};
    sync.instant_map = {{"0", "0"}, {"1", "0"}};
    sync.arrow_map = std::map<ArrowId, ArrowId>{
        {"0->0", "0->0"}, {"1->1", "0->0"}, {"0->1", "0->0"}};
    return sync;
}

InteractiveFamily make_family() {
    InteractiveFamily fam;
    fam.index = {"C0", "C1"};
    fam.components = {{"C0", line_component()}, {"C1", point_component()}};
    fam.chief = "C0";
    fam.syncs = {{"C1", collapse_to_point()}};
    fam.interaction.index = fam.index;
    for (const ExternalPart& part :
         {ExternalPart{{"0", "a"}}, ExternalPart{{"0", "b"}}, ExternalPart{{"0", "a"}, {"1", "c"}}}) {
        InteractionTuple t;
        t["C0"] = TupleEntry{"lam", part};
        t["C1"] = TupleEntry{"mu", {{"0", "p"}}};
        fam.interaction.tuples.insert(t);
    }
    return fam;
}

} // namespace

TEST_CASE("identity synchronization on a shared clock is valid and rigid") {
    Clock clock = build_essential_clock_singleton(build_interval_poset(2));
    Synchronization sync;
    std::map<ArrowId, ArrowId> amap;
    for (const auto& obj : clock.dyn.motor.objects) {
        sync.obj_map[obj] = obj;
        sync.instant_map[obj] = obj;
    }
    for (const auto& [id, a] : clock.dyn.motor.arrows) {
        amap[id] = id;
        (void)a;
    }
    sync.arrow_map = amap;

    CHECK(validate_synchronization(clock, clock, sync).ok());
    CHECK(is_rigid(clock, clock, sync).ok);

    SECTION("dropping the arrow map makes rigidity undecidable") {
        sync.arrow_map.reset();
        CHECK(validate_synchronization(clock, clock, sync).ok());
        CHECK_THROWS_AS(is_rigid(clock, clock, sync), Error);
        try {
            is_rigid(clock, clock, sync);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::MissingArrowMap);
        }
    }
}

TEST_CASE("order reversal is a legal synchronization") {
    Clock clock = build_essential_clock_singleton(build_interval_poset(1));
    Synchronization flip;
    flip.obj_map = {{"0", "1"}, {"1", "0"}};
    flip.instant_map = {{"0", "1"}, {"1", "0"}};
    CHECK(validate_synchronization(clock, clock, flip).ok());

    SECTION("scrambled maps are rejected") {
        Clock longer = build_essential_clock_singleton(build_interval_poset(2));
        Synchronization mixed;
        mixed.obj_map = {{"0", "0"}, {"1", "2"}, {"2", "1"}};
        mixed.instant_map = {{"0", "0"}, {"1", "2"}, {"2", "1"}};
        auto report = validate_synchronization(longer, longer, mixed);
        REQUIRE_FALSE(report.ok());
        CHECK(report.issues[0].rule == "monotone");
    }
    SECTION("instants must land on the mapped object") {
        flip.instant_map = {{"0", "0"}, {"1", "1"}};
        CHECK_FALSE(validate_synchronization(clock, clock, flip).ok());
    }
    SECTION("unmapped instants are reported") {
        flip.instant_map = {{"0", "1"}};
        CHECK_FALSE(validate_synchronization(clock, clock, flip).ok());
    }
}

TEST_CASE("rigidity catches non functorial motor maps") {
    Clock src = build_essential_clock_singleton(build_interval_poset(2));
    Clock dst = build_essential_clock_singleton(build_diamond_category());
    Synchronization sync;
    sync.obj_map = {{"0", "S"}, {"1", "U"}, {"2", "T"}};
    sync.instant_map = {{"0", "S"}, {"1", "U"}, {"2", "T"}};
    sync.arrow_map = std::map<ArrowId, ArrowId>{
        {"0->0", "Id_S"}, {"1->1", "Id_U"}, {"2->2", "Id_T"},
        {"0->1", "SU"},   {"1->2", "UT"},   {"0->2", "SUT"}};
    REQUIRE(validate_synchronization(src, dst, sync).ok());
    CHECK(is_rigid(src, dst, sync).ok);

    SECTION("the wrong parallel composite breaks functoriality") {
        (*sync.arrow_map)["0->2"] = "SVT";
        CheckResult r = is_rigid(src, dst, sync);
        REQUIRE_FALSE(r.ok);
        CHECK(r.witness->rule == "functor");
    }
    SECTION("a mistyped arrow image breaks functoriality") {
        (*sync.arrow_map)["0->1"] = "SV";
        CheckResult r = is_rigid(src, dst, sync);
        REQUIRE_FALSE(r.ok);
        CHECK(r.witness->rule == "functor");
    }
}

TEST_CASE("rigidity can fail on instants even with a genuine functor") {
    // existential clocks distinguish the two diagonals of the diamond
    FiniteCategory diamond = build_diamond_category();
    Clock src = build_existential_clock(build_interval_poset(1));
    Clock dst = build_existential_clock(diamond);

    Synchronization sync;
    sync.obj_map = {{"0", "S"}, {"1", "T"}};
    sync.arrow_map = std::map<ArrowId, ArrowId>{
        {"0->0", "Id_S"}, {"1->1", "Id_T"}, {"0->1", "SUT"}};
    sync.instant_map = {{"0->0", "Id_S"}, {"0->1", "SUT"}, {"1->1", "Id_T"}};
    REQUIRE(validate_synchronization(src, dst, sync).ok());
    REQUIRE(is_rigid(src, dst, sync).ok);

    sync.instant_map["0->1"] = "SVT";
    CHECK(validate_synchronization(src, dst, sync).ok());
    CheckResult r = is_rigid(src, dst, sync);
    REQUIRE_FALSE(r.ok);
    CHECK(r.witness->rule == "equivariance");
}

TEST_CASE("family validation") {
    InteractiveFamily fam = make_family();
    REQUIRE(validate_family(fam).ok());

    SECTION("chief must be indexed") {
        fam.chief = "C9";
        CHECK_FALSE(validate_family(fam).ok());
    }
    SECTION("every non-chief component needs a synchronization") {
        fam.syncs.clear();
        CHECK_FALSE(validate_family(fam).ok());
    }
    SECTION("the chief carries no synchronization") {
        fam.syncs["C0"] = collapse_to_point();
        CHECK_FALSE(validate_family(fam).ok());
    }
    SECTION("interaction index must match") {
        fam.interaction.index = {"C0"};
        CHECK_FALSE(validate_family(fam).ok());
    }
    SECTION("incoherent tuples are rejected") {
        InteractionTuple t;
        t["C0"] = TupleEntry{"lam", {{"0", "b"}, {"1", "c"}}}; // b never reaches c
        t["C1"] = TupleEntry{"mu", {{"0", "p"}}};
        fam.interaction.tuples.insert(t);
        auto report = validate_family(fam);
        REQUIRE_FALSE(report.ok());
    }
    SECTION("inefficient components are rejected") {
        set_image(fam.components.at("C1").dyn, "0->0", "mu", "p", {});
        CHECK_FALSE(validate_family(fam).ok());
    }
    SECTION("non sub-functorial components are rejected") {
        set_image(fam.components.at("C0").dyn, "0->0", "lam", "a", {"b"});
        auto report = validate_family(fam);
        REQUIRE_FALSE(report.ok());
    }
    SECTION("a singleton family needs no synchronizations") {
        InteractiveFamily solo;
        solo.index = {"C0"};
        solo.components = {{"C0", line_component()}};
        solo.chief = "C0";
        solo.interaction.index = solo.index;
        InteractionTuple t;
        t["C0"] = TupleEntry{"lam", {{"0", "a"}}};
        solo.interaction.tuples.insert(t);
        CHECK(validate_family(solo).ok());
    }
}
