#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "subdyn/corpus.hpp"
#include "subdyn/generate.hpp"
#include "subdyn/serialize.hpp"

using namespace subdyn;

namespace {

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::BadDocument;
}

} // namespace

TEST_CASE("open dynamics document round trips byte for byte") {
    OpenDynamics od = build_diamond_open_dynamics();
    FamilySpecDocument doc;
    add_open_dynamics(doc, "diamond", od);

    std::string bytes = emit_document(doc);
    REQUIRE(!bytes.empty());
    CHECK(bytes.back() == '\n');
    CHECK(emit_document(doc) == bytes);

    FamilySpecDocument parsed = parse_document(bytes);
    CHECK(parsed == doc);
    CHECK(emit_document(parsed) == bytes);

    CHECK(document_open_dynamics(parsed, "diamond") == od);
    CHECK(document_dynamics(parsed, "diamond") == od.dyn);
    CHECK(document_clock(parsed, "diamond.clock") == od.clock);

    // The clock shares the motor, so the document carries one category.
    CHECK(parsed.categories.size() == 1);
    CHECK(parsed.dynamics.size() == 2);
}

TEST_CASE("family document round trips byte for byte") {
    InteractiveFamily fam = build_grid_why_family({1, 1});
    REQUIRE(fam.interaction.tuples.size() == 54);

    FamilySpecDocument doc;
    add_family(doc, "why", fam);
    std::string bytes = emit_document(doc);
    FamilySpecDocument parsed = parse_document(bytes);
    CHECK(parsed == doc);
    CHECK(emit_document(parsed) == bytes);
    CHECK(document_family(parsed, "why") == fam);
}

TEST_CASE("provenance and realizations are carried through") {
    OpenDynamics od = build_two_branch_line(1);
    FamilySpecDocument doc;
    add_open_dynamics(doc, "line", od);
    for (const auto& r : enumerate_realizations(od)) add_realization(doc, "line", r);
    doc.provenance = {{"family", "line"}, {"heaps", nlohmann::json::object()}, {"mode", "p"}};

    std::string bytes = emit_document(doc);
    FamilySpecDocument parsed = parse_document(bytes);
    CHECK(parsed == doc);
    CHECK(emit_document(parsed) == bytes);
    CHECK(parsed.realizations.size() == 4);
    CHECK(parsed.provenance.at("mode") == "p");
}

TEST_CASE("parsing rejects malformed documents") {
    auto bad = [&](const std::string& text) {
        return code_of([&] { parse_document(text); }) == ErrorCode::BadDocument;
    };

    CHECK(bad("not json at all"));
    CHECK(bad(R"({"surprise":[]})"));
    CHECK(bad(R"({"categories":[{"name":"A","objects":["x","x"],"arrows":[],)"
              R"("identities":{},"compose":[]}]})"));
    CHECK(bad(R"({"categories":[{"name":"A","objects":["x"],)"
              R"("arrows":[["f","x","y"]],"identities":{},"compose":[]}]})"));
    CHECK(bad(R"({"dynamics":[{"name":"d","motor":"missing","params":["p"],)"
              R"("states":{},"transitions":[]}]})"));
    CHECK(bad(R"({"interactions":[{"name":"R","index":["b","a"],"tuples":[]}]})"));
    CHECK(bad(R"({"clocks":[{"name":"k","dynamic":"missing"}]})"));

    std::string cat = R"({"name":"A","objects":["x"],"arrows":[["i","x","x"]],)"
                      R"("identities":{"x":"i"},"compose":[["i","i","i"]]})";
    std::string dyn = R"({"name":"d","motor":"A","params":["p"],"states":{"x":["s"]},)"
                      R"("transitions":[["i","p","s",["s"]]]})";

    // Transition referencing an unknown state.
    CHECK(bad(R"({"categories":[)" + cat + R"(],"dynamics":[{"name":"d","motor":"A",)" +
              R"("params":["p"],"states":{"x":["s"]},"transitions":[["i","p","zz",["s"]]]}]})"));
    // Empty image lists carry no information and are rejected.
    CHECK(bad(R"({"categories":[)" + cat + R"(],"dynamics":[{"name":"d","motor":"A",)" +
              R"("params":["p"],"states":{"x":["s"]},"transitions":[["i","p","s",[]]]}]})"));

    std::string good = R"({"categories":[)" + cat + R"(],"dynamics":[)" + dyn + R"(]})";
    FamilySpecDocument doc = parse_document(good);
    CHECK(document_dynamics(doc, "d").params == std::set<ParamId>{"p"});
    CHECK(image(document_dynamics(doc, "d"), "i", "p", "s") == std::set<StateId>{"s"});

    // A family whose chief is not a component of its index.
    std::string clock_dyn = R"({"name":"k.dyn","motor":"A","params":["*"],)"
                            R"("states":{"x":["x"]},"transitions":[["i","*","x",["x"]]]})";
    std::string family_doc = R"({"categories":[)" + cat + R"(],"dynamics":[)" + dyn + "," +
                             clock_dyn +
                             R"(],"clocks":[{"name":"k","dynamic":"k.dyn"}],)"
                             R"("open_dynamics":[{"name":"od","dynamic":"d","clock":"k",)"
                             R"("scansion":{"s":"x"}}],)"
                             R"("interactions":[{"name":"R","index":["a"],"tuples":[]}],)"
                             R"("families":[{"name":"F","index":["a"],"chief":"zz",)"
                             R"("components":{"a":"od"},"interaction":"R","syncs":{}}]})";
    CHECK(bad(family_doc));
}

TEST_CASE("fingerprint distinguishes families") {
    InteractiveFamily fam = build_grid_why_family({1, 1});
    std::string fp = family_fingerprint(fam);
    CHECK(fp.size() == 16);
    CHECK(fp == family_fingerprint(fam));

    InteractiveFamily trimmed = fam;
    trimmed.interaction.tuples.erase(trimmed.interaction.tuples.begin());
    CHECK(family_fingerprint(trimmed) != fp);
}
