#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"

#include "subdyn/dynamics.hpp"
#include "subdyn/errors.hpp"
#include "subdyn/families.hpp"
#include "subdyn/realize.hpp"

// One JSON document holds every kind of object, cross referenced by name.
// Emission is canonical: object keys sorted, no insignificant whitespace,
// one trailing newline, empty sections omitted, empty transition images
// dropped. Parsing a canonical emission and emitting again reproduces the
// bytes exactly.

namespace subdyn {

struct DocDynamics {
    std::string motor;
    MultiDynamics value;

    bool operator==(const DocDynamics&) const = default;
};

struct DocClock {
    std::string dynamic;

    bool operator==(const DocClock&) const = default;
};

struct DocOpenDynamics {
    std::string dynamic;
    std::string clock;
    std::map<StateId, InstantId> scansion;

    bool operator==(const DocOpenDynamics&) const = default;
};

struct DocRealization {
    std::string open_dynamic;
    ParamId param;
    std::map<InstantId, StateId> assignment;

    bool operator==(const DocRealization&) const = default;
};

inline bool operator<(const DocRealization& a, const DocRealization& b) {
    return std::tie(a.open_dynamic, a.param, a.assignment) <
           std::tie(b.open_dynamic, b.param, b.assignment);
}

struct DocFamily {
    std::vector<ComponentId> index;
    std::map<ComponentId, std::string> components;
    ComponentId chief;
    std::string interaction;
    std::map<ComponentId, Synchronization> syncs;

    bool operator==(const DocFamily&) const = default;
};

struct FamilySpecDocument {
    std::map<std::string, FiniteCategory> categories;
    std::map<std::string, DocDynamics> dynamics;
    std::map<std::string, DocClock> clocks;
    std::map<std::string, DocOpenDynamics> open_dynamics;
    std::set<DocRealization> realizations;
    std::map<std::string, RelationRP> interactions;
    std::map<std::string, DocFamily> families;
    nlohmann::json provenance; // null when absent

    bool operator==(const FamilySpecDocument& o) const {
        return categories == o.categories && dynamics == o.dynamics && clocks == o.clocks &&
               open_dynamics == o.open_dynamics && realizations == o.realizations &&
               interactions == o.interactions && families == o.families &&
               provenance == o.provenance;
    }
};

// ---- assembly ----

inline void add_category(FamilySpecDocument& doc, const FiniteCategory& cat) {
    if (cat.name.empty()) raise(ErrorCode::BadDocument, "category without a name");
    auto [it, inserted] = doc.categories.insert({cat.name, cat});
    if (!inserted && !(it->second == cat))
        raise(ErrorCode::BadDocument, "category '" + cat.name + "' added twice with different data");
}

inline void add_dynamics(FamilySpecDocument& doc, const std::string& name,
                         const MultiDynamics& dyn) {
    add_category(doc, dyn.motor);
    DocDynamics entry{dyn.motor.name, dyn};
    auto [it, inserted] = doc.dynamics.insert({name, entry});
    if (!inserted && !(it->second == entry))
        raise(ErrorCode::BadDocument, "dynamics '" + name + "' added twice with different data");
}

inline void add_clock(FamilySpecDocument& doc, const std::string& name, const Clock& clock) {
    add_dynamics(doc, name, clock.dyn);
    auto [it, inserted] = doc.clocks.insert({name, DocClock{name}});
    if (!inserted && it->second.dynamic != name)
        raise(ErrorCode::BadDocument, "clock '" + name + "' added twice with different data");
}

inline void add_open_dynamics(FamilySpecDocument& doc, const std::string& name,
                              const OpenDynamics& od) {
    add_dynamics(doc, name, od.dyn);
    add_clock(doc, name + ".clock", od.clock);
    DocOpenDynamics entry{name, name + ".clock", od.scansion};
    auto [it, inserted] = doc.open_dynamics.insert({name, entry});
    if (!inserted && !(it->second == entry))
        raise(ErrorCode::BadDocument,
              "open dynamics '" + name + "' added twice with different data");
}

inline void add_realization(FamilySpecDocument& doc, const std::string& od_name,
                            const Realization& r) {
    doc.realizations.insert({od_name, r.param, r.assignment});
}

inline void add_interaction(FamilySpecDocument& doc, const std::string& name,
                            const RelationRP& rel) {
    auto [it, inserted] = doc.interactions.insert({name, rel});
    if (!inserted && !(it->second == rel))
        raise(ErrorCode::BadDocument, "interaction '" + name + "' added twice with different data");
}

inline void add_family(FamilySpecDocument& doc, const std::string& name,
                       const InteractiveFamily& fam) {
    DocFamily entry;
    entry.index = fam.index;
    entry.chief = fam.chief;
    entry.syncs = fam.syncs;
    for (const auto& [comp, od] : fam.components) {
        add_open_dynamics(doc, name + "." + comp, od);
        entry.components[comp] = name + "." + comp;
    }
    add_interaction(doc, name + ".interaction", fam.interaction);
    entry.interaction = name + ".interaction";
    auto [it, inserted] = doc.families.insert({name, entry});
    if (!inserted && !(it->second == entry))
        raise(ErrorCode::BadDocument, "family '" + name + "' added twice with different data");
}

// ---- extraction ----

inline const MultiDynamics& document_dynamics(const FamilySpecDocument& doc,
                                              const std::string& name) {
    auto it = doc.dynamics.find(name);
    if (it == doc.dynamics.end())
        raise(ErrorCode::BadDocument, "no dynamics named '" + name + "'");
    return it->second.value;
}

inline Clock document_clock(const FamilySpecDocument& doc, const std::string& name) {
    auto it = doc.clocks.find(name);
    if (it == doc.clocks.end()) raise(ErrorCode::BadDocument, "no clock named '" + name + "'");
    return Clock{document_dynamics(doc, it->second.dynamic)};
}

inline OpenDynamics document_open_dynamics(const FamilySpecDocument& doc,
                                           const std::string& name) {
    auto it = doc.open_dynamics.find(name);
    if (it == doc.open_dynamics.end())
        raise(ErrorCode::BadDocument, "no open dynamics named '" + name + "'");
    return OpenDynamics{document_dynamics(doc, it->second.dynamic),
                        document_clock(doc, it->second.clock), it->second.scansion};
}

inline InteractiveFamily document_family(const FamilySpecDocument& doc, const std::string& name) {
    auto it = doc.families.find(name);
    if (it == doc.families.end()) raise(ErrorCode::BadDocument, "no family named '" + name + "'");
    const DocFamily& entry = it->second;
    InteractiveFamily fam;
    fam.index = entry.index;
    fam.chief = entry.chief;
    fam.syncs = entry.syncs;
    auto rel = doc.interactions.find(entry.interaction);
    if (rel == doc.interactions.end())
        raise(ErrorCode::BadDocument, "no interaction named '" + entry.interaction + "'");
    fam.interaction = rel->second;
    for (const auto& [comp, od_name] : entry.components)
        fam.components.emplace(comp, document_open_dynamics(doc, od_name));
    return fam;
}

// ---- emission ----

namespace detail {

inline nlohmann::json sorted_array(const std::set<std::string>& xs) {
    return nlohmann::json(std::vector<std::string>(xs.begin(), xs.end()));
}

inline nlohmann::json category_json(const std::string& name, const FiniteCategory& cat) {
    nlohmann::json c;
    nlohmann::json arrows = nlohmann::json::array();
    for (const auto& [id, a] : cat.arrows) arrows.push_back({id, a.dom, a.cod});
    c["arrows"] = std::move(arrows);
    nlohmann::json compose = nlohmann::json::array();
    for (const auto& [pair, gf] : cat.compose_table)
        compose.push_back({pair.first, pair.second, gf});
    c["compose"] = std::move(compose);
    c["identities"] = cat.identities;
    c["name"] = name;
    c["objects"] = sorted_array(cat.objects);
    return c;
}

inline nlohmann::json dynamics_json(const std::string& name, const DocDynamics& entry) {
    nlohmann::json d;
    if (entry.value.motor_is_graph) d["graph"] = true;
    d["motor"] = entry.motor;
    d["name"] = name;
    d["params"] = sorted_array(entry.value.params);
    nlohmann::json states = nlohmann::json::object();
    for (const auto& obj : entry.value.motor.objects) {
        auto it = entry.value.states.find(obj);
        states[obj] = it == entry.value.states.end() ? nlohmann::json::array()
                                                     : sorted_array(it->second);
    }
    d["states"] = std::move(states);
    nlohmann::json transitions = nlohmann::json::array();
    for (const auto& [key, per_state] : entry.value.transitions)
        for (const auto& [s, img] : per_state)
            if (!img.empty())
                transitions.push_back({key.first, key.second, s, sorted_array(img)});
    d["transitions"] = std::move(transitions);
    return d;
}

inline nlohmann::json sync_json(const Synchronization& sync) {
    nlohmann::json s;
    if (sync.arrow_map) s["arrows"] = *sync.arrow_map;
    s["instants"] = sync.instant_map;
    s["objects"] = sync.obj_map;
    return s;
}

inline nlohmann::json tuple_json(const RelationRP& rel, const InteractionTuple& t) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& comp : rel.index) {
        const TupleEntry& entry = t.at(comp);
        arr.push_back({entry.param, nlohmann::json(entry.real)});
    }
    return arr;
}

} // namespace detail

inline std::string emit_document(const FamilySpecDocument& doc) {
    nlohmann::json j = nlohmann::json::object();
    if (!doc.categories.empty()) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& [name, cat] : doc.categories)
            arr.push_back(detail::category_json(name, cat));
        j["categories"] = std::move(arr);
    }
    if (!doc.dynamics.empty()) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& [name, entry] : doc.dynamics)
            arr.push_back(detail::dynamics_json(name, entry));
        j["dynamics"] = std::move(arr);
    }
    if (!doc.clocks.empty()) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& [name, entry] : doc.clocks)
            arr.push_back({{"dynamic", entry.dynamic}, {"name", name}});
        j["clocks"] = std::move(arr);
    }
    if (!doc.open_dynamics.empty()) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& [name, entry] : doc.open_dynamics) {
            nlohmann::json o;
            o["clock"] = entry.clock;
            o["dynamic"] = entry.dynamic;
            o["name"] = name;
            o["scansion"] = entry.scansion;
            arr.push_back(std::move(o));
        }
        j["open_dynamics"] = std::move(arr);
    }
    if (!doc.realizations.empty()) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : doc.realizations) {
            nlohmann::json o;
            o["assignment"] = r.assignment;
            o["open_dynamic"] = r.open_dynamic;
            o["param"] = r.param;
            arr.push_back(std::move(o));
        }
        j["realizations"] = std::move(arr);
    }
    if (!doc.interactions.empty()) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& [name, rel] : doc.interactions) {
            nlohmann::json o;
            o["index"] = rel.index;
            o["name"] = name;
            nlohmann::json tuples = nlohmann::json::array();
            for (const auto& t : rel.tuples) tuples.push_back(detail::tuple_json(rel, t));
            o["tuples"] = std::move(tuples);
            arr.push_back(std::move(o));
        }
        j["interactions"] = std::move(arr);
    }
    if (!doc.families.empty()) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& [name, entry] : doc.families) {
            nlohmann::json o;
            o["chief"] = entry.chief;
            o["components"] = entry.components;
            o["index"] = entry.index;
            o["interaction"] = entry.interaction;
            o["name"] = name;
            nlohmann::json syncs = nlohmann::json::object();
            for (const auto& [comp, sync] : entry.syncs) syncs[comp] = detail::sync_json(sync);
            o["syncs"] = std::move(syncs);
            arr.push_back(std::move(o));
        }
        j["families"] = std::move(arr);
    }
    if (!doc.provenance.is_null()) j["provenance"] = doc.provenance;
    return j.dump() + "\n";
}

// ---- parsing ----

namespace detail {

inline const nlohmann::json& expect(const nlohmann::json& obj, const std::string& key,
                                    const char* where) {
    auto it = obj.find(key);
    if (it == obj.end())
        raise(ErrorCode::BadDocument, std::string(where) + ": missing key '" + key + "'");
    return *it;
}

inline std::string expect_string(const nlohmann::json& v, const char* where) {
    if (!v.is_string()) raise(ErrorCode::BadDocument, std::string(where) + ": expected a string");
    return v.get<std::string>();
}

inline void expect_keys(const nlohmann::json& obj, const std::set<std::string>& allowed,
                        const char* where) {
    if (!obj.is_object())
        raise(ErrorCode::BadDocument, std::string(where) + ": expected an object");
    for (const auto& [k, v] : obj.items())
        if (!allowed.count(k))
            raise(ErrorCode::BadDocument, std::string(where) + ": unknown key '" + k + "'");
}

inline std::map<std::string, std::string> string_map(const nlohmann::json& v, const char* where) {
    if (!v.is_object()) raise(ErrorCode::BadDocument, std::string(where) + ": expected an object");
    std::map<std::string, std::string> out;
    for (const auto& [k, val] : v.items()) out[k] = expect_string(val, where);
    return out;
}

inline std::vector<std::string> string_array(const nlohmann::json& v, const char* where) {
    if (!v.is_array()) raise(ErrorCode::BadDocument, std::string(where) + ": expected an array");
    std::vector<std::string> out;
    for (const auto& x : v) out.push_back(expect_string(x, where));
    return out;
}

inline std::set<StateId> all_states(const MultiDynamics& dyn) {
    std::set<StateId> out;
    for (const auto& [obj, sts] : dyn.states) out.insert(sts.begin(), sts.end());
    return out;
}

} // namespace detail

inline FamilySpecDocument parse_document(const std::string& text) {
    using detail::expect;
    using detail::expect_keys;
    using detail::expect_string;
    using detail::string_array;
    using detail::string_map;

    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorCode::BadDocument, std::string("not valid JSON: ") + e.what());
    }
    expect_keys(j,
                {"categories", "dynamics", "clocks", "open_dynamics", "realizations",
                 "interactions", "families", "provenance"},
                "document");

    FamilySpecDocument doc;

    if (j.count("categories")) {
        if (!j["categories"].is_array())
            raise(ErrorCode::BadDocument, "categories: expected an array");
        for (const auto& c : j["categories"]) {
            expect_keys(c, {"arrows", "compose", "identities", "name", "objects"}, "category");
            FiniteCategory cat;
            cat.name = expect_string(expect(c, "name", "category"), "category name");
            for (const auto& obj : string_array(expect(c, "objects", "category"), "objects"))
                if (!cat.objects.insert(obj).second)
                    raise(ErrorCode::BadDocument,
                          "category '" + cat.name + "': duplicate object '" + obj + "'");
            const auto& arrows = expect(c, "arrows", "category");
            if (!arrows.is_array()) raise(ErrorCode::BadDocument, "arrows: expected an array");
            for (const auto& a : arrows) {
                auto triple = string_array(a, "arrow");
                if (triple.size() != 3)
                    raise(ErrorCode::BadDocument,
                          "category '" + cat.name + "': an arrow is [id, dom, cod]");
                if (!cat.objects.count(triple[1]) || !cat.objects.count(triple[2]))
                    raise(ErrorCode::BadDocument, "category '" + cat.name + "': arrow '" +
                                                      triple[0] + "' uses an unknown object");
                if (!cat.arrows.insert({triple[0], {triple[0], triple[1], triple[2]}}).second)
                    raise(ErrorCode::BadDocument,
                          "category '" + cat.name + "': duplicate arrow '" + triple[0] + "'");
            }
            for (const auto& [obj, id] :
                 string_map(expect(c, "identities", "category"), "identities")) {
                if (!cat.objects.count(obj) || !cat.arrows.count(id))
                    raise(ErrorCode::BadDocument,
                          "category '" + cat.name + "': identity of unknown object or arrow");
                cat.identities[obj] = id;
            }
            const auto& compose = expect(c, "compose", "category");
            if (!compose.is_array()) raise(ErrorCode::BadDocument, "compose: expected an array");
            for (const auto& e : compose) {
                auto triple = string_array(e, "compose entry");
                if (triple.size() != 3)
                    raise(ErrorCode::BadDocument,
                          "category '" + cat.name + "': a compose entry is [g, f, gf]");
                for (const auto& id : triple)
                    if (!cat.arrows.count(id))
                        raise(ErrorCode::BadDocument, "category '" + cat.name +
                                                          "': compose uses unknown arrow '" + id +
                                                          "'");
                cat.compose_table[{triple[0], triple[1]}] = triple[2];
            }
            if (!doc.categories.insert({cat.name, cat}).second)
                raise(ErrorCode::BadDocument, "duplicate category '" + cat.name + "'");
        }
    }

    if (j.count("dynamics")) {
        if (!j["dynamics"].is_array()) raise(ErrorCode::BadDocument, "dynamics: expected an array");
        for (const auto& d : j["dynamics"]) {
            expect_keys(d, {"graph", "motor", "name", "params", "states", "transitions"},
                        "dynamics");
            std::string name = expect_string(expect(d, "name", "dynamics"), "dynamics name");
            std::string motor = expect_string(expect(d, "motor", "dynamics"), "motor");
            auto cat = doc.categories.find(motor);
            if (cat == doc.categories.end())
                raise(ErrorCode::BadDocument,
                      "dynamics '" + name + "': unknown category '" + motor + "'");
            DocDynamics entry;
            entry.motor = motor;
            entry.value.motor = cat->second;
            if (d.count("graph")) {
                if (!d["graph"].is_boolean())
                    raise(ErrorCode::BadDocument, "dynamics '" + name + "': graph must be a bool");
                entry.value.motor_is_graph = d["graph"].get<bool>();
            }
            for (const auto& p : string_array(expect(d, "params", "dynamics"), "params"))
                if (!entry.value.params.insert(p).second)
                    raise(ErrorCode::BadDocument,
                          "dynamics '" + name + "': duplicate parameter '" + p + "'");
            for (const auto& obj : entry.value.motor.objects) entry.value.states[obj];
            const auto& states = expect(d, "states", "dynamics");
            if (!states.is_object()) raise(ErrorCode::BadDocument, "states: expected an object");
            std::set<StateId> seen;
            for (const auto& [obj, arr] : states.items()) {
                if (!entry.value.motor.objects.count(obj))
                    raise(ErrorCode::BadDocument,
                          "dynamics '" + name + "': states of unknown object '" + obj + "'");
                for (const auto& s : string_array(arr, "states")) {
                    if (!seen.insert(s).second)
                        raise(ErrorCode::BadDocument,
                              "dynamics '" + name + "': state '" + s + "' listed twice");
                    entry.value.states[obj].insert(s);
                }
            }
            const auto& transitions = expect(d, "transitions", "dynamics");
            if (!transitions.is_array())
                raise(ErrorCode::BadDocument, "transitions: expected an array");
            for (const auto& t : transitions) {
                if (!t.is_array() || t.size() != 4)
                    raise(ErrorCode::BadDocument,
                          "dynamics '" + name + "': a transition is [arrow, param, state, images]");
                std::string arrow = expect_string(t[0], "transition arrow");
                std::string param = expect_string(t[1], "transition param");
                std::string state = expect_string(t[2], "transition state");
                if (!entry.value.motor.arrows.count(arrow))
                    raise(ErrorCode::BadDocument,
                          "dynamics '" + name + "': unknown arrow '" + arrow + "'");
                if (!entry.value.params.count(param))
                    raise(ErrorCode::BadDocument,
                          "dynamics '" + name + "': unknown parameter '" + param + "'");
                if (!seen.count(state))
                    raise(ErrorCode::BadDocument,
                          "dynamics '" + name + "': unknown state '" + state + "'");
                auto images = string_array(t[3], "transition images");
                if (images.empty())
                    raise(ErrorCode::BadDocument,
                          "dynamics '" + name + "': empty image list for '" + arrow + "'");
                auto& slot = entry.value.transitions[{arrow, param}];
                if (slot.count(state))
                    raise(ErrorCode::BadDocument, "dynamics '" + name +
                                                      "': duplicate transition for '" + arrow +
                                                      "', '" + param + "', '" + state + "'");
                for (const auto& img : images) {
                    if (!seen.count(img))
                        raise(ErrorCode::BadDocument,
                              "dynamics '" + name + "': unknown image state '" + img + "'");
                    slot[state].insert(img);
                }
            }
            if (!doc.dynamics.insert({name, std::move(entry)}).second)
                raise(ErrorCode::BadDocument, "duplicate dynamics '" + name + "'");
        }
    }

    if (j.count("clocks")) {
        if (!j["clocks"].is_array()) raise(ErrorCode::BadDocument, "clocks: expected an array");
        for (const auto& c : j["clocks"]) {
            expect_keys(c, {"dynamic", "name"}, "clock");
            std::string name = expect_string(expect(c, "name", "clock"), "clock name");
            std::string ref = expect_string(expect(c, "dynamic", "clock"), "clock dynamic");
            if (!doc.dynamics.count(ref))
                raise(ErrorCode::BadDocument, "clock '" + name + "': unknown dynamics '" + ref + "'");
            if (!doc.clocks.insert({name, DocClock{ref}}).second)
                raise(ErrorCode::BadDocument, "duplicate clock '" + name + "'");
        }
    }

    if (j.count("open_dynamics")) {
        if (!j["open_dynamics"].is_array())
            raise(ErrorCode::BadDocument, "open_dynamics: expected an array");
        for (const auto& o : j["open_dynamics"]) {
            expect_keys(o, {"clock", "dynamic", "name", "scansion"}, "open dynamics");
            std::string name = expect_string(expect(o, "name", "open dynamics"), "name");
            DocOpenDynamics entry;
            entry.dynamic = expect_string(expect(o, "dynamic", "open dynamics"), "dynamic");
            entry.clock = expect_string(expect(o, "clock", "open dynamics"), "clock");
            if (!doc.dynamics.count(entry.dynamic))
                raise(ErrorCode::BadDocument,
                      "open dynamics '" + name + "': unknown dynamics '" + entry.dynamic + "'");
            auto clock = doc.clocks.find(entry.clock);
            if (clock == doc.clocks.end())
                raise(ErrorCode::BadDocument,
                      "open dynamics '" + name + "': unknown clock '" + entry.clock + "'");
            auto own_states = detail::all_states(doc.dynamics.at(entry.dynamic).value);
            auto instants = detail::all_states(doc.dynamics.at(clock->second.dynamic).value);
            for (const auto& [s, inst] :
                 string_map(expect(o, "scansion", "open dynamics"), "scansion")) {
                if (!own_states.count(s))
                    raise(ErrorCode::BadDocument,
                          "open dynamics '" + name + "': scansion of unknown state '" + s + "'");
                if (!instants.count(inst))
                    raise(ErrorCode::BadDocument,
                          "open dynamics '" + name + "': unknown instant '" + inst + "'");
                entry.scansion[s] = inst;
            }
            if (!doc.open_dynamics.insert({name, std::move(entry)}).second)
                raise(ErrorCode::BadDocument, "duplicate open dynamics '" + name + "'");
        }
    }

    if (j.count("realizations")) {
        if (!j["realizations"].is_array())
            raise(ErrorCode::BadDocument, "realizations: expected an array");
        for (const auto& r : j["realizations"]) {
            expect_keys(r, {"assignment", "open_dynamic", "param"}, "realization");
            DocRealization entry;
            entry.open_dynamic =
                expect_string(expect(r, "open_dynamic", "realization"), "open_dynamic");
            entry.param = expect_string(expect(r, "param", "realization"), "param");
            auto od = doc.open_dynamics.find(entry.open_dynamic);
            if (od == doc.open_dynamics.end())
                raise(ErrorCode::BadDocument,
                      "realization: unknown open dynamics '" + entry.open_dynamic + "'");
            const auto& dyn = doc.dynamics.at(od->second.dynamic).value;
            if (!dyn.params.count(entry.param))
                raise(ErrorCode::BadDocument,
                      "realization: unknown parameter '" + entry.param + "'");
            auto own_states = detail::all_states(dyn);
            auto instants = detail::all_states(
                doc.dynamics.at(doc.clocks.at(od->second.clock).dynamic).value);
            for (const auto& [inst, s] :
                 string_map(expect(r, "assignment", "realization"), "assignment")) {
                if (!instants.count(inst))
                    raise(ErrorCode::BadDocument, "realization: unknown instant '" + inst + "'");
                if (!own_states.count(s))
                    raise(ErrorCode::BadDocument, "realization: unknown state '" + s + "'");
                entry.assignment[inst] = s;
            }
            doc.realizations.insert(std::move(entry));
        }
    }

    if (j.count("interactions")) {
        if (!j["interactions"].is_array())
            raise(ErrorCode::BadDocument, "interactions: expected an array");
        for (const auto& r : j["interactions"]) {
            expect_keys(r, {"index", "name", "tuples"}, "interaction");
            std::string name = expect_string(expect(r, "name", "interaction"), "name");
            RelationRP rel;
            rel.index = string_array(expect(r, "index", "interaction"), "index");
            if (rel.index.empty() ||
                !std::is_sorted(rel.index.begin(), rel.index.end()) ||
                std::adjacent_find(rel.index.begin(), rel.index.end()) != rel.index.end())
                raise(ErrorCode::BadDocument,
                      "interaction '" + name + "': index must be sorted, unique and nonempty");
            const auto& tuples = expect(r, "tuples", "interaction");
            if (!tuples.is_array()) raise(ErrorCode::BadDocument, "tuples: expected an array");
            for (const auto& t : tuples) {
                if (!t.is_array() || t.size() != rel.index.size())
                    raise(ErrorCode::BadDocument,
                          "interaction '" + name + "': a tuple has one entry per component");
                InteractionTuple tuple;
                for (size_t k = 0; k < rel.index.size(); ++k) {
                    const auto& entry = t[k];
                    if (!entry.is_array() || entry.size() != 2)
                        raise(ErrorCode::BadDocument,
                              "interaction '" + name + "': an entry is [param, assignment]");
                    TupleEntry te;
                    te.param = expect_string(entry[0], "tuple param");
                    for (const auto& [inst, s] : string_map(entry[1], "tuple assignment"))
                        te.real[inst] = s;
                    tuple[rel.index[k]] = std::move(te);
                }
                rel.tuples.insert(std::move(tuple));
            }
            if (!doc.interactions.insert({name, std::move(rel)}).second)
                raise(ErrorCode::BadDocument, "duplicate interaction '" + name + "'");
        }
    }

    if (j.count("families")) {
        if (!j["families"].is_array()) raise(ErrorCode::BadDocument, "families: expected an array");
        for (const auto& f : j["families"]) {
            expect_keys(f, {"chief", "components", "index", "interaction", "name", "syncs"},
                        "family");
            std::string name = expect_string(expect(f, "name", "family"), "name");
            DocFamily entry;
            entry.index = string_array(expect(f, "index", "family"), "index");
            if (entry.index.empty() ||
                !std::is_sorted(entry.index.begin(), entry.index.end()) ||
                std::adjacent_find(entry.index.begin(), entry.index.end()) != entry.index.end())
                raise(ErrorCode::BadDocument,
                      "family '" + name + "': index must be sorted, unique and nonempty");
            std::set<std::string> index_set(entry.index.begin(), entry.index.end());
            entry.chief = expect_string(expect(f, "chief", "family"), "chief");
            if (!index_set.count(entry.chief))
                raise(ErrorCode::BadDocument,
                      "family '" + name + "': chief '" + entry.chief + "' is not indexed");
            for (const auto& [comp, od_name] :
                 string_map(expect(f, "components", "family"), "components")) {
                if (!index_set.count(comp))
                    raise(ErrorCode::BadDocument,
                          "family '" + name + "': component '" + comp + "' is not indexed");
                if (!doc.open_dynamics.count(od_name))
                    raise(ErrorCode::BadDocument, "family '" + name +
                                                      "': unknown open dynamics '" + od_name + "'");
                entry.components[comp] = od_name;
            }
            if (entry.components.size() != entry.index.size())
                raise(ErrorCode::BadDocument,
                      "family '" + name + "': every indexed component needs a dynamics");
            entry.interaction = expect_string(expect(f, "interaction", "family"), "interaction");
            auto rel = doc.interactions.find(entry.interaction);
            if (rel == doc.interactions.end())
                raise(ErrorCode::BadDocument,
                      "family '" + name + "': unknown interaction '" + entry.interaction + "'");
            if (rel->second.index != entry.index)
                raise(ErrorCode::BadDocument,
                      "family '" + name + "': interaction index differs from the family index");
            const auto& syncs = expect(f, "syncs", "family");
            if (!syncs.is_object()) raise(ErrorCode::BadDocument, "syncs: expected an object");
            for (const auto& [comp, s] : syncs.items()) {
                if (!index_set.count(comp) || comp == entry.chief)
                    raise(ErrorCode::BadDocument,
                          "family '" + name + "': sync for '" + comp + "' is out of place");
                expect_keys(s, {"arrows", "instants", "objects"}, "sync");
                Synchronization sync;
                sync.obj_map = string_map(expect(s, "objects", "sync"), "sync objects");
                sync.instant_map = string_map(expect(s, "instants", "sync"), "sync instants");
                if (s.count("arrows")) sync.arrow_map = string_map(s["arrows"], "sync arrows");
                entry.syncs[comp] = std::move(sync);
            }
            for (const auto& comp : entry.index)
                if (comp != entry.chief && !entry.syncs.count(comp))
                    raise(ErrorCode::BadDocument,
                          "family '" + name + "': missing sync for '" + comp + "'");
            if (!doc.families.insert({name, std::move(entry)}).second)
                raise(ErrorCode::BadDocument, "duplicate family '" + name + "'");
        }
    }

    if (j.count("provenance")) doc.provenance = j["provenance"];
    return doc;
}

// Short stable digest of a family, for marking generated documents with
// their origin.
inline std::string family_fingerprint(const InteractiveFamily& fam) {
    FamilySpecDocument tmp;
    add_family(tmp, "family", fam);
    std::string bytes = emit_document(tmp);
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace subdyn
