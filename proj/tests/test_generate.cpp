#include <catch2/catch_amalgamated.hpp>

#include "subdyn/generate.hpp"

using namespace subdyn;

namespace {

std::string tid(const StateId& s) { return tuple_id({{"0", s}}); }

// The two-path diamond with a pinch at V: deterministic, functorial, and
// famously not regular.
OpenDynamics diamond_dynamics() {
    MultiDynamics dyn;
    dyn.motor = build_diamond_category();
    dyn.params = {"*"};
    dyn.states["S"] = {"s", "s'"};
    dyn.states["U"] = {"u", "u'"};
    dyn.states["V"] = {"v"};
    dyn.states["T"] = {"t", "t'"};
    for (const auto& [obj, sts] : dyn.states)
        for (const auto& x : sts) set_image(dyn, dyn.motor.identities.at(obj), "*", x, {x});
    set_image(dyn, "SU", "*", "s", {"u"});
    set_image(dyn, "SU", "*", "s'", {"u'"});
    set_image(dyn, "SV", "*", "s", {"v"});
    set_image(dyn, "SV", "*", "s'", {"v"});
    set_image(dyn, "UT", "*", "u", {"t"});
    set_image(dyn, "UT", "*", "u'", {"t'"});
    set_image(dyn, "VT", "*", "v", {"t"});
    set_image(dyn, "SUT", "*", "s", {"t"});
    set_image(dyn, "SUT", "*", "s'", {"t'"});
    set_image(dyn, "SVT", "*", "s", {"t"});
    set_image(dyn, "SVT", "*", "s'", {"t"});
    OpenDynamics od{dyn, build_essential_clock_singleton(dyn.motor), {}};
    for (const auto& [obj, sts] : dyn.states)
        for (const auto& x : sts) od.scansion[x] = obj;
    return od;
}

// Interval chain with a parameter that admits no nonempty realization.
OpenDynamics dead_param_line() {
    MultiDynamics dyn;
    dyn.motor = build_interval_poset(1);
    dyn.params = {"p", "r"};
    dyn.states["0"] = {"a"};
    dyn.states["1"] = {"b"};
    set_image(dyn, "0->0", "p", "a", {"a"});
    set_image(dyn, "1->1", "p", "b", {"b"});
    set_image(dyn, "0->1", "p", "a", {"b"});
    return OpenDynamics{dyn, build_essential_clock_singleton(dyn.motor),
                        {{"a", "0"}, {"b", "1"}}};
}

OpenDynamics total_chain() {
    MultiDynamics dyn;
    dyn.motor = build_interval_poset(1);
    dyn.params = {"p"};
    dyn.states["0"] = {"a"};
    dyn.states["1"] = {"b"};
    set_image(dyn, "0->0", "p", "a", {"a"});
    set_image(dyn, "1->1", "p", "b", {"b"});
    set_image(dyn, "0->1", "p", "a", {"b"});
    return OpenDynamics{dyn, build_essential_clock_singleton(dyn.motor),
                        {{"a", "0"}, {"b", "1"}}};
}

// Two components: a chain chief with two parameters and a timeless witness
// point, coupled by four tuples that pair a0 with x and a1 with y.
InteractiveFamily coupled_family() {
    MultiDynamics c;
    c.motor = build_interval_poset(1);
    c.params = {"p", "p2"};
    c.states["0"] = {"a0", "a1"};
    c.states["1"] = {"b0"};
    for (const auto& mu : c.params) {
        set_image(c, "0->0", mu, "a0", {"a0"});
        set_image(c, "0->0", mu, "a1", {"a1"});
        set_image(c, "1->1", mu, "b0", {"b0"});
        set_image(c, "0->1", mu, "a0", {"b0"});
    }
    OpenDynamics chief{c, build_essential_clock_singleton(c.motor),
                       {{"a0", "0"}, {"a1", "0"}, {"b0", "1"}}};

    MultiDynamics d;
    d.motor = build_interval_poset(0);
    d.params = {"q"};
    d.states["0"] = {"x", "y"};
    set_image(d, "0->0", "q", "x", {"x"});
    set_image(d, "0->0", "q", "y", {"y"});
    OpenDynamics point{d, build_essential_clock_singleton(d.motor), {{"x", "0"}, {"y", "0"}}};

    Synchronization sync;
    sync.obj_map = {{"0", "0"}, {"1", "0"}};
    sync.instant_map = {{"0", "0"}, {"1", "0"}};

    InteractiveFamily fam;
    fam.index = {"c", "d"};
    fam.chief = "c";
    fam.components.emplace("c", chief);
    fam.components.emplace("d", point);
    fam.syncs.emplace("d", sync);
    fam.interaction.index = {"c", "d"};
    fam.interaction.tuples.insert(
        {{"c", {"p", {{"0", "a0"}, {"1", "b0"}}}}, {"d", {"q", {{"0", "x"}}}}});
    fam.interaction.tuples.insert({{"c", {"p", {{"0", "a1"}}}}, {"d", {"q", {{"0", "y"}}}}});
    fam.interaction.tuples.insert({{"c", {"p2", {{"0", "a0"}}}}, {"d", {"q", {{"0", "x"}}}}});
    fam.interaction.tuples.insert({{"c", {"p2", {{"0", "a1"}}}}, {"d", {"q", {{"0", "y"}}}}});
    return fam;
}

void check_generated_scansion(const GeneratedDynamics& gen) {
    for (const auto& [key, per_state] : gen.result.dyn.transitions) {
        for (const auto& [s, imgs] : per_state) {
            auto u = gen.result.clock.action(key.first, gen.result.scansion.at(s));
            REQUIRE(u.has_value());
            for (const auto& b : imgs) REQUIRE(gen.result.scansion.at(b) == *u);
        }
    }
}

// Independent transcription of the one-component generation law: b lies in
// the image iff the clock dates agree and some nonempty realization passes
// through both states.
void check_closed_form(const OpenDynamics& od) {
    GeneratedDynamics gen = generate_primary(canonical_family(od));
    for (const auto& mu : od.dyn.params) {
        std::vector<Realization> live;
        for (auto& r : enumerate_realizations(od, mu))
            if (!r.assignment.empty()) live.push_back(std::move(r));
        ParamId pid = tuple_id({{"0", mu}});
        REQUIRE(gen.param_tuples.count(pid) == !live.empty());
        if (live.empty()) continue;
        for (const auto& [eid, e] : od.dyn.motor.arrows) {
            for (const auto& a : od.dyn.states.at(e.dom)) {
                std::set<StateId> expect;
                for (const auto& b : od.dyn.states.at(e.cod)) {
                    if (od.clock.action(eid, od.scansion.at(a)) !=
                        std::optional<InstantId>(od.scansion.at(b)))
                        continue;
                    for (const auto& r : live)
                        if (passes_through(od, r, a) && passes_through(od, r, b)) {
                            expect.insert(b);
                            break;
                        }
                }
                std::set<StateId> got;
                for (const auto& b : image(gen.result.dyn, eid, pid, tid(a)))
                    got.insert(gen.state_tuples.at(b).at("0"));
                REQUIRE(got == expect);
            }
        }
    }
}

} // namespace

TEST_CASE("diamond canonical family reproduces the pinched images") {
    OpenDynamics od = diamond_dynamics();
    REQUIRE(validate_open_dynamics(od).ok());
    REQUIRE(is_functorial(od.dyn).ok);
    REQUIRE(enumerate_realizations(od, std::optional<ParamId>("*")).size() == 10);

    GeneratedDynamics gen = generate_primary(canonical_family(od));
    REQUIRE(gen.mode == "p");
    REQUIRE(gen.result.clock == od.clock);
    REQUIRE(gen.param_tuples.size() == 1);
    ParamId pid = gen.param_tuples.begin()->first;
    REQUIRE(pid == tuple_id({{"0", "*"}}));
    REQUIRE(gen.state_tuples.size() == 7);

    REQUIRE(image(gen.result.dyn, "SVT", pid, tid("s'")).empty());
    REQUIRE(image(gen.result.dyn, "SVT", pid, tid("s")) == std::set<StateId>{tid("t")});
    REQUIRE(image(gen.result.dyn, "SV", pid, tid("s'")) == std::set<StateId>{tid("v")});
    REQUIRE(image(gen.result.dyn, "VT", pid, tid("v")) == std::set<StateId>{tid("t")});
    REQUIRE(image(gen.result.dyn, "SUT", pid, tid("s'")).empty());
    REQUIRE(image(gen.result.dyn, "UT", pid, tid("u'")).empty());
    REQUIRE(image(gen.result.dyn, "SU", pid, tid("s'")) == std::set<StateId>{tid("u'")});

    // The composite through V keeps {t} even though the named arrow loses it.
    std::set<StateId> through_v;
    for (const auto& mid : image(gen.result.dyn, "SV", pid, tid("s'"))) {
        const auto& img = image(gen.result.dyn, "VT", pid, mid);
        through_v.insert(img.begin(), img.end());
    }
    REQUIRE(through_v == std::set<StateId>{tid("t")});

    REQUIRE(validate_open_dynamics(gen.result).ok());
    REQUIRE(is_subfunctorial(gen.result.dyn).ok);
    REQUIRE_FALSE(is_functorial(gen.result.dyn).ok);
    REQUIRE(out_of_play_states(gen.result.dyn) == std::set<StateId>{tid("t'")});
    check_generated_scansion(gen);
    check_closed_form(od);

    CheckResult reg = is_regular(od);
    REQUIRE_FALSE(reg.ok);
    REQUIRE(reg.witness);
    REQUIRE(reg.witness->rule == "transition");
}

TEST_CASE("diamond generation modes collapse onto the primary") {
    OpenDynamics od = diamond_dynamics();
    InteractiveFamily fam = canonical_family(od);

    GeneratedDynamics p = generate_primary(fam);
    GeneratedDynamics f = generate_functional(fam);
    GeneratedDynamics s = generate_souple(fam);
    GeneratedDynamics m = generate_mono(fam);

    REQUIRE(functional_heaps(fam) ==
            std::map<ComponentId, std::set<ParamId>>{{"0", {"*"}}});
    REQUIRE(souple_heaps(fam) == std::map<ComponentId, std::set<ParamId>>{{"0", {}}});

    REQUIRE(f.mode == "f");
    REQUIRE(s.mode == "s");
    REQUIRE(m.mode == "m");
    REQUIRE(f.result.dyn == p.result.dyn);
    REQUIRE(s.result.dyn == p.result.dyn);
    REQUIRE(m.result.dyn == p.result.dyn);
    REQUIRE(is_subfunctorial(m.result.dyn).ok);
}

TEST_CASE("a parameter without nonempty realizations breaks regularity") {
    OpenDynamics od = dead_param_line();
    REQUIRE(is_subfunctorial(od.dyn).ok);

    GeneratedDynamics gen = generate_primary(canonical_family(od));
    REQUIRE(gen.param_tuples.size() == 1);
    REQUIRE(gen.param_tuples.count(tuple_id({{"0", "p"}})) == 1);

    CheckResult reg = is_regular(od);
    REQUIRE_FALSE(reg.ok);
    REQUIRE(reg.witness);
    REQUIRE(reg.witness->rule == "parameter");
    REQUIRE(reg.witness->detail.find("'r'") != std::string::npos);

    check_closed_form(od);
}

TEST_CASE("a fully realized deterministic chain is regular") {
    REQUIRE(is_regular(total_chain()).ok);
}

TEST_CASE("two-component generation couples the coordinates") {
    InteractiveFamily fam = coupled_family();
    REQUIRE(validate_family(fam).ok());

    GeneratedDynamics gen = generate_primary(fam);
    ParamId pid1 = tuple_id({{"c", "p"}, {"d", "q"}});
    ParamId pid2 = tuple_id({{"c", "p2"}, {"d", "q"}});
    REQUIRE(gen.param_tuples.size() == 2);
    REQUIRE(gen.param_tuples.count(pid1) == 1);
    REQUIRE(gen.param_tuples.count(pid2) == 1);
    REQUIRE(gen.state_tuples.size() == 6);

    auto st = [](const StateId& cs, const StateId& ds) {
        return tuple_id({{"c", cs}, {"d", ds}});
    };
    REQUIRE(image(gen.result.dyn, "0->1", pid1, st("a0", "x")) ==
            std::set<StateId>{st("b0", "x")});
    REQUIRE(image(gen.result.dyn, "0->1", pid1, st("a0", "y")).empty());
    REQUIRE(image(gen.result.dyn, "0->0", pid1, st("a1", "y")) ==
            std::set<StateId>{st("a1", "y")});
    REQUIRE(image(gen.result.dyn, "0->0", pid1, st("a1", "x")).empty());
    REQUIRE(image(gen.result.dyn, "0->0", pid1, st("a0", "y")).empty());
    REQUIRE(image(gen.result.dyn, "1->1", pid1, st("b0", "x")) ==
            std::set<StateId>{st("b0", "x")});
    REQUIRE(image(gen.result.dyn, "0->1", pid2, st("a0", "x")).empty());
    REQUIRE(image(gen.result.dyn, "0->0", pid2, st("a0", "x")) ==
            std::set<StateId>{st("a0", "x")});

    REQUIRE(validate_open_dynamics(gen.result).ok());
    REQUIRE(is_subfunctorial(gen.result.dyn).ok);
    check_generated_scansion(gen);

    REQUIRE(functional_heaps(fam) ==
            std::map<ComponentId, std::set<ParamId>>{{"c", {}}, {"d", {"q"}}});
    GeneratedDynamics f = generate_functional(fam);
    REQUIRE(f.result.dyn == gen.result.dyn);

    REQUIRE(souple_heaps(fam) ==
            std::map<ComponentId, std::set<ParamId>>{{"c", {"p", "p2"}}, {"d", {"q"}}});
    GeneratedDynamics s = generate_souple(fam);
    REQUIRE(s.result.dyn.params.size() == 1);
    ParamId merged = partition_block_name({pid1, pid2});
    REQUIRE(s.result.dyn.params.count(merged) == 1);
    REQUIRE(s.param_blocks.at(merged) == std::set<ParamId>{pid1, pid2});
    REQUIRE(image(s.result.dyn, "0->1", merged, st("a0", "x")) ==
            std::set<StateId>{st("b0", "x")});
    REQUIRE(image(s.result.dyn, "0->0", merged, st("a0", "x")) ==
            std::set<StateId>{st("a0", "x")});

    GeneratedDynamics m = generate_mono(fam);
    REQUIRE(m.result.dyn == s.result.dyn);
    REQUIRE(is_subfunctorial(m.result.dyn).ok);

    // Pooling only ever grows images.
    REQUIRE(m.param_blocks.size() == 1);
    for (const auto& [pid, lam] : gen.param_tuples) {
        (void)lam;
        for (const auto& [eid, e] : gen.result.dyn.motor.arrows)
            for (const auto& a : gen.result.dyn.states.at(e.dom))
                for (const auto& b : image(gen.result.dyn, eid, pid, a))
                    REQUIRE(image(m.result.dyn, eid, merged, a).count(b) == 1);
    }
}

TEST_CASE("heap equivalence pools exactly the listed parameters") {
    std::map<ParamId, std::map<ComponentId, ParamId>> tuples{
        {"m1", {{"i", "x"}, {"j", "u"}}},
        {"m2", {{"i", "y"}, {"j", "u"}}},
        {"m3", {{"i", "x"}, {"j", "v"}}},
        {"m4", {{"i", "y"}, {"j", "v"}}},
    };

    REQUIRE(heap_equivalence(tuples, {}).size() == 4);
    REQUIRE(heap_equivalence(tuples, {{"i", {"x", "y"}}, {"j", {"u", "v"}}}) ==
            std::vector<std::set<ParamId>>{{"m1", "m2", "m3", "m4"}});

    auto partial = heap_equivalence(tuples, {{"i", {"x", "y"}}});
    REQUIRE(partial == std::vector<std::set<ParamId>>{{"m1", "m2"}, {"m3", "m4"}});
}

TEST_CASE("generation error paths") {
    auto code_of = [](auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            return e.code();
        }
        FAIL("expected an error");
        return ErrorCode::BadDocument;
    };

    InteractiveFamily broken = coupled_family();
    broken.chief = "nope";
    REQUIRE(code_of([&] { generate_primary(broken); }) == ErrorCode::FamilyInvalid);

    REQUIRE(code_of([&] { generate_primary(coupled_family(), 5); }) ==
            ErrorCode::LimitExceeded);

    MultiDynamics dead;
    dead.motor = build_interval_poset(0);
    dead.params = {"p"};
    dead.states["0"] = {"z"};
    OpenDynamics od{dead, build_essential_clock_singleton(dead.motor), {{"z", "0"}}};
    REQUIRE(code_of([&] { canonical_family(od); }) == ErrorCode::Inefficient);
}
