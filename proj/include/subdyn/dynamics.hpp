#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "subdyn/errors.hpp"
#include "subdyn/fincat.hpp"

namespace subdyn {

using StateId = std::string;
using ParamId = std::string;
using InstantId = std::string;

// Set-valued transition system over a motor. The motor is either a genuine
// category or, when motor_is_graph is set, a bare directed graph (identities
// and the compose table are then ignored, and checks that need them refuse
// to run). Transition storage is sparse: a missing key means the empty image.
struct MultiDynamics {
    FiniteCategory motor;
    bool motor_is_graph = false;
    std::set<ParamId> params;
    std::map<ObjectId, std::set<StateId>> states;
    std::map<std::pair<ArrowId, ParamId>, std::map<StateId, std::set<StateId>>> transitions;

    bool operator==(const MultiDynamics&) const = default;
};

inline const std::set<StateId>& image(const MultiDynamics& dyn, const ArrowId& e,
                                      const ParamId& mu, const StateId& s) {
    static const std::set<StateId> empty;
    auto it = dyn.transitions.find({e, mu});
    if (it == dyn.transitions.end()) return empty;
    auto jt = it->second.find(s);
    return jt == it->second.end() ? empty : jt->second;
}

inline void set_image(MultiDynamics& dyn, const ArrowId& e, const ParamId& mu,
                      const StateId& s, std::set<StateId> targets) {
    if (targets.empty()) {
        auto it = dyn.transitions.find({e, mu});
        if (it != dyn.transitions.end()) {
            it->second.erase(s);
            if (it->second.empty()) dyn.transitions.erase(it);
        }
        return;
    }
    dyn.transitions[{e, mu}][s] = std::move(targets);
}

inline std::map<StateId, ObjectId> state_objects(const MultiDynamics& dyn) {
    std::map<StateId, ObjectId> out;
    for (const auto& [obj, sts] : dyn.states)
        for (const auto& s : sts) out[s] = obj;
    return out;
}

struct CheckWitness {
    std::string rule;
    std::string detail;

    bool operator==(const CheckWitness&) const = default;
};

struct CheckResult {
    bool ok = true;
    std::optional<CheckWitness> witness;
};

inline ValidationReport validate_multidynamics(const MultiDynamics& dyn) {
    ValidationReport report;
    if (dyn.motor_is_graph) {
        for (const auto& [id, a] : dyn.motor.arrows) {
            if (a.id != id || !dyn.motor.objects.count(a.dom) || !dyn.motor.objects.count(a.cod))
                report.add("motor", "edge '" + id + "' is not well typed");
        }
    } else {
        ValidationReport motor = validate_category(dyn.motor);
        for (auto& issue : motor.issues)
            report.add("motor", issue.rule + ": " + issue.detail);
    }

    if (dyn.params.empty()) report.add("params", "parameter set is empty");

    std::map<StateId, ObjectId> seen;
    for (const auto& [obj, sts] : dyn.states) {
        if (!dyn.motor.objects.count(obj))
            report.add("states", "state set given for unknown object '" + obj + "'");
        for (const auto& s : sts) {
            auto [it, inserted] = seen.insert({s, obj});
            if (!inserted)
                report.add("states", "state '" + s + "' appears under objects '" + it->second +
                                         "' and '" + obj + "'");
        }
    }
    for (const auto& obj : dyn.motor.objects)
        if (!dyn.states.count(obj))
            report.add("states", "object '" + obj + "' has no state set entry");

    for (const auto& [key, table] : dyn.transitions) {
        const auto& [e, mu] = key;
        auto ar = dyn.motor.arrows.find(e);
        if (ar == dyn.motor.arrows.end()) {
            report.add("transitions", "unknown arrow '" + e + "'");
            continue;
        }
        if (!dyn.params.count(mu)) {
            report.add("transitions", "unknown parameter '" + mu + "'");
            continue;
        }
        auto dom = dyn.states.find(ar->second.dom);
        auto cod = dyn.states.find(ar->second.cod);
        for (const auto& [s, targets] : table) {
            if (dom == dyn.states.end() || !dom->second.count(s)) {
                report.add("transitions", "arrow '" + e + "' maps unknown source state '" + s + "'");
                continue;
            }
            for (const auto& t : targets)
                if (cod == dyn.states.end() || !cod->second.count(t))
                    report.add("transitions",
                               "arrow '" + e + "' sends '" + s + "' to unknown target '" + t + "'");
        }
    }
    return report;
}

inline CheckResult is_subfunctorial(const MultiDynamics& dyn) {
    if (dyn.motor_is_graph)
        raise(ErrorCode::MotorIsGraph, "sub-functoriality needs identities and composition");

    for (const auto& [obj, id_arrow] : dyn.motor.identities) {
        for (const auto& mu : dyn.params) {
            for (const auto& s : dyn.states.at(obj)) {
                const auto& img = image(dyn, id_arrow, mu, s);
                for (const auto& t : img)
                    if (t != s)
                        return {false,
                                CheckWitness{"identity", "identity on '" + obj + "' sends '" + s +
                                                             "' to '" + t + "' under '" + mu + "'"}};
            }
        }
    }

    for (const auto& [pair, gf] : dyn.motor.compose_table) {
        const auto& [g, f] = pair;
        const ObjectId& src = dyn.motor.arrow(f).dom;
        for (const auto& mu : dyn.params) {
            for (const auto& s : dyn.states.at(src)) {
                const auto& direct = image(dyn, gf, mu, s);
                if (direct.empty()) continue;
                std::set<StateId> through;
                for (const auto& x : image(dyn, f, mu, s)) {
                    const auto& step = image(dyn, g, mu, x);
                    through.insert(step.begin(), step.end());
                }
                for (const auto& t : direct)
                    if (!through.count(t))
                        return {false, CheckWitness{"composition",
                                                    "'" + gf + "' reaches '" + t + "' from '" + s +
                                                        "' under '" + mu + "' but '" + g +
                                                        "' after '" + f + "' does not"}};
            }
        }
    }
    return {true, std::nullopt};
}

inline CheckResult is_functorial(const MultiDynamics& dyn) {
    if (dyn.motor_is_graph)
        raise(ErrorCode::MotorIsGraph, "functoriality needs identities and composition");

    for (const auto& [obj, id_arrow] : dyn.motor.identities) {
        for (const auto& mu : dyn.params) {
            for (const auto& s : dyn.states.at(obj)) {
                const auto& img = image(dyn, id_arrow, mu, s);
                if (img.size() != 1 || *img.begin() != s)
                    return {false, CheckWitness{"identity", "identity on '" + obj +
                                                                "' is not the singleton {" + s +
                                                                "} under '" + mu + "'"}};
            }
        }
    }

    for (const auto& [pair, gf] : dyn.motor.compose_table) {
        const auto& [g, f] = pair;
        const ObjectId& src = dyn.motor.arrow(f).dom;
        for (const auto& mu : dyn.params) {
            for (const auto& s : dyn.states.at(src)) {
                const auto& direct = image(dyn, gf, mu, s);
                std::set<StateId> through;
                for (const auto& x : image(dyn, f, mu, s)) {
                    const auto& step = image(dyn, g, mu, x);
                    through.insert(step.begin(), step.end());
                }
                if (direct != through)
                    return {false, CheckWitness{"composition",
                                                "'" + gf + "' and '" + g + "' after '" + f +
                                                    "' disagree at '" + s + "' under '" + mu + "'"}};
            }
        }
    }
    return {true, std::nullopt};
}

enum class DeterminismClass { Deterministic, WellQuasiDeterministic, Pluralist };

inline const char* to_string(DeterminismClass c) {
    switch (c) {
        case DeterminismClass::Deterministic: return "deterministic";
        case DeterminismClass::WellQuasiDeterministic: return "well-quasi-deterministic";
        case DeterminismClass::Pluralist: return "pluralist";
    }
    return "?";
}

// Every image has exactly one element: deterministic. At most one with a
// gap somewhere: well-quasi-deterministic. Otherwise pluralist.
inline DeterminismClass determinism_class(const MultiDynamics& dyn) {
    bool some_empty = false;
    for (const auto& [id, a] : dyn.motor.arrows) {
        for (const auto& mu : dyn.params) {
            for (const auto& s : dyn.states.at(a.dom)) {
                size_t n = image(dyn, id, mu, s).size();
                if (n >= 2) return DeterminismClass::Pluralist;
                if (n == 0) some_empty = true;
            }
        }
    }
    return some_empty ? DeterminismClass::WellQuasiDeterministic
                      : DeterminismClass::Deterministic;
}

struct ClassificationTag {
    std::string plurality;    // one parameter or several
    std::string determinism;  // image cardinality regime
    std::string functoriality; // empty when the determinism slot settles it
    std::string motor_name;

    bool operator==(const ClassificationTag&) const = default;

    std::string to_string() const {
        std::string out = "[" + plurality + " " + determinism;
        if (!functoriality.empty()) out += " " + functoriality;
        out += " " + motor_name + "]";
        return out;
    }
};

inline ClassificationTag classify(const MultiDynamics& dyn) {
    CheckResult sub = is_subfunctorial(dyn);
    if (!sub.ok)
        raise(ErrorCode::NotSubfunctorial,
              sub.witness ? sub.witness->detail : "dynamics is not sub-functorial");

    ClassificationTag tag;
    tag.plurality = dyn.params.size() == 1 ? "π̇" : "π̄";
    DeterminismClass d = determinism_class(dyn);
    switch (d) {
        case DeterminismClass::Deterministic: tag.determinism = "δ"; break;
        case DeterminismClass::WellQuasiDeterministic: tag.determinism = "δ̣"; break;
        case DeterminismClass::Pluralist: tag.determinism = "δ̄"; break;
    }
    if (d != DeterminismClass::Deterministic)
        tag.functoriality = is_functorial(dyn).ok ? "φ" : "φ̲";
    tag.motor_name = dyn.motor.name;
    return tag;
}

// Name of a partition block: singletons keep their member's name, larger
// blocks get a braced pipe-joined one.
inline ParamId partition_block_name(const std::set<ParamId>& block) {
    if (block.size() == 1) return *block.begin();
    std::string out = "{";
    for (const auto& mu : block) {
        if (out.size() > 1) out += "|";
        out += mu;
    }
    return out + "}";
}

// Coarsen the parameter set along a partition; images of a block are the
// unions over its members. Blocks with several members get a braced name.
inline MultiDynamics quotient_parameters(const MultiDynamics& dyn,
                                         const std::vector<std::set<ParamId>>& partition) {
    std::set<ParamId> covered;
    for (const auto& block : partition) {
        if (block.empty()) raise(ErrorCode::InvalidPartition, "empty block");
        for (const auto& mu : block) {
            if (!dyn.params.count(mu))
                raise(ErrorCode::InvalidPartition, "unknown parameter '" + mu + "'");
            if (!covered.insert(mu).second)
                raise(ErrorCode::InvalidPartition, "parameter '" + mu + "' in two blocks");
        }
    }
    if (covered != dyn.params)
        raise(ErrorCode::InvalidPartition, "blocks do not cover the parameter set");

    MultiDynamics q;
    q.motor = dyn.motor;
    q.motor_is_graph = dyn.motor_is_graph;
    q.states = dyn.states;
    for (const auto& block : partition) {
        ParamId name = partition_block_name(block);
        q.params.insert(name);
        for (const auto& [id, a] : dyn.motor.arrows) {
            for (const auto& s : dyn.states.at(a.dom)) {
                std::set<StateId> merged;
                for (const auto& mu : block) {
                    const auto& img = image(dyn, id, mu, s);
                    merged.insert(img.begin(), img.end());
                }
                set_image(q, id, name, s, std::move(merged));
            }
        }
    }
    return q;
}

// Motor functor data for morphisms between dynamics on different motors.
struct MotorFunctor {
    std::map<ObjectId, ObjectId> objects;
    std::map<ArrowId, ArrowId> arrows;
};

inline MotorFunctor identity_motor_functor(const FiniteCategory& cat) {
    MotorFunctor f;
    for (const auto& obj : cat.objects) f.objects[obj] = obj;
    for (const auto& [id, a] : cat.arrows) {
        f.arrows[id] = id;
        (void)a;
    }
    return f;
}

// delta is a state relation: delta[s] lists the target states s maps to.
// The morphism condition is inclusion of delta-then-target inside
// source-then-delta images, arrow by arrow.
inline CheckResult is_dynamorphism(const MultiDynamics& src, const MultiDynamics& dst,
                                   const std::map<ParamId, ParamId>& theta,
                                   const MotorFunctor& functor_map,
                                   const std::map<StateId, std::set<StateId>>& delta) {
    for (const auto& mu : src.params) {
        auto it = theta.find(mu);
        if (it == theta.end() || !dst.params.count(it->second))
            raise(ErrorCode::IllTypedDelta, "parameter map undefined or ill typed at '" + mu + "'");
    }
    for (const auto& obj : src.motor.objects) {
        auto it = functor_map.objects.find(obj);
        if (it == functor_map.objects.end() || !dst.motor.objects.count(it->second))
            raise(ErrorCode::IllTypedDelta, "object map undefined or ill typed at '" + obj + "'");
    }
    for (const auto& [id, a] : src.motor.arrows) {
        auto it = functor_map.arrows.find(id);
        if (it == functor_map.arrows.end() || !dst.motor.has_arrow(it->second))
            raise(ErrorCode::IllTypedDelta, "arrow map undefined or ill typed at '" + id + "'");
        const Arrow& im = dst.motor.arrow(it->second);
        if (im.dom != functor_map.objects.at(a.dom) || im.cod != functor_map.objects.at(a.cod))
            raise(ErrorCode::IllTypedDelta, "arrow map breaks typing at '" + id + "'");
    }
    if (!src.motor_is_graph && !dst.motor_is_graph) {
        for (const auto& [obj, id_arrow] : src.motor.identities)
            if (functor_map.arrows.at(id_arrow) !=
                dst.motor.identities.at(functor_map.objects.at(obj)))
                raise(ErrorCode::IllTypedDelta, "motor map does not preserve the identity on '" +
                                                    obj + "'");
        for (const auto& [pair, gf] : src.motor.compose_table) {
            const ArrowId& lhs = functor_map.arrows.at(gf);
            const ArrowId& rhs = dst.motor.compose(functor_map.arrows.at(pair.first),
                                                   functor_map.arrows.at(pair.second));
            if (lhs != rhs)
                raise(ErrorCode::IllTypedDelta, "motor map does not preserve composition at ('" +
                                                    pair.first + "', '" + pair.second + "')");
        }
    }

    std::map<StateId, ObjectId> src_obj = state_objects(src);
    for (const auto& [obj, sts] : src.states) {
        const ObjectId& target_obj = functor_map.objects.at(obj);
        for (const auto& s : sts) {
            auto it = delta.find(s);
            if (it == delta.end())
                raise(ErrorCode::IllTypedDelta, "state map undefined at '" + s + "'");
            for (const auto& t : it->second)
                if (!dst.states.at(target_obj).count(t))
                    raise(ErrorCode::IllTypedDelta,
                          "state map sends '" + s + "' outside the states of '" + target_obj + "'");
        }
    }

    for (const auto& [id, a] : src.motor.arrows) {
        const ArrowId& target_arrow = functor_map.arrows.at(id);
        for (const auto& mu : src.params) {
            const ParamId& nu = theta.at(mu);
            for (const auto& s : src.states.at(a.dom)) {
                std::set<StateId> lhs;
                for (const auto& x : image(src, id, mu, s)) {
                    const auto& dx = delta.at(x);
                    lhs.insert(dx.begin(), dx.end());
                }
                std::set<StateId> rhs;
                for (const auto& y : delta.at(s)) {
                    const auto& img = image(dst, target_arrow, nu, y);
                    rhs.insert(img.begin(), img.end());
                }
                for (const auto& t : lhs)
                    if (!rhs.count(t))
                        return {false, CheckWitness{"dynamorphism",
                                                    "arrow '" + id + "' under '" + mu +
                                                        "' at state '" + s +
                                                        "' reaches '" + t +
                                                        "' outside the permitted image"}};
            }
        }
    }
    return {true, std::nullopt};
}

// A clock is a deterministic functorial mono-dynamics; its states are the
// instants. The single parameter is conventionally "*".
struct Clock {
    MultiDynamics dyn;

    bool operator==(const Clock&) const = default;

    const ParamId& param() const { return *dyn.params.begin(); }

    const std::set<InstantId>& instants_at(const ObjectId& obj) const {
        return dyn.states.at(obj);
    }

    // Total by clock validity; empty optional signals a broken clock.
    std::optional<InstantId> action(const ArrowId& e, const InstantId& t) const {
        const auto& img = image(dyn, e, param(), t);
        if (img.size() != 1) return std::nullopt;
        return *img.begin();
    }

    std::optional<ObjectId> object_of(const InstantId& t) const {
        for (const auto& [obj, sts] : dyn.states)
            if (sts.count(t)) return obj;
        return std::nullopt;
    }
};

inline ValidationReport validate_clock(const Clock& clock) {
    ValidationReport report = validate_multidynamics(clock.dyn);
    if (clock.dyn.params.size() != 1)
        report.add("clock", "a clock carries exactly one parameter");
    if (!report.ok()) return report;
    if (determinism_class(clock.dyn) != DeterminismClass::Deterministic)
        report.add("clock", "clock transitions must be single valued and total");
    if (!clock.dyn.motor_is_graph) {
        CheckResult fun = is_functorial(clock.dyn);
        if (!fun.ok)
            report.add("clock", "clock is not functorial: " +
                                    (fun.witness ? fun.witness->detail : std::string()));
    }
    return report;
}

// Reflexive-transitive reachability between instants: result[s] holds every
// instant reachable from s by chains of arrow actions.
inline std::map<InstantId, std::set<InstantId>> anteriority(const Clock& clock) {
    std::map<InstantId, std::set<InstantId>> after;
    for (const auto& [obj, sts] : clock.dyn.states)
        for (const auto& t : sts) after[t].insert(t);
    for (const auto& [id, a] : clock.dyn.motor.arrows)
        for (const auto& t : clock.dyn.states.at(a.dom))
            if (auto u = clock.action(id, t)) after[t].insert(*u);

    bool changed = true;
    while (changed) {
        changed = false;
        for (auto& [s, reach] : after) {
            std::set<InstantId> grown = reach;
            for (const auto& mid : reach) {
                const auto& next = after[mid];
                grown.insert(next.begin(), next.end());
            }
            if (grown.size() != reach.size()) {
                reach = std::move(grown);
                changed = true;
            }
        }
    }
    return after;
}

// Clock whose instants over an object are the arrows landing there; an
// arrow acts by post-composition.
inline Clock build_existential_clock(const FiniteCategory& cat) {
    Clock clock;
    clock.dyn.motor = cat;
    clock.dyn.params = {"*"};
    for (const auto& obj : cat.objects) clock.dyn.states[obj] = {};
    for (const auto& [id, a] : cat.arrows) clock.dyn.states[a.cod].insert(id);
    for (const auto& [id, e] : cat.arrows)
        for (const auto& t : clock.dyn.states[e.dom])
            set_image(clock.dyn, id, "*", t, {cat.compose(id, t)});
    return clock;
}

// Clock with exactly one instant per object, named after it; an arrow
// S -> T sends the instant S to the instant T. Works over bare graphs too.
inline Clock build_essential_clock_singleton(const FiniteCategory& cat, bool motor_is_graph = false) {
    Clock clock;
    clock.dyn.motor = cat;
    clock.dyn.motor_is_graph = motor_is_graph;
    clock.dyn.params = {"*"};
    for (const auto& obj : cat.objects) clock.dyn.states[obj] = {obj};
    for (const auto& [id, e] : cat.arrows) set_image(clock.dyn, id, "*", e.dom, {e.cod});
    return clock;
}

// States whose identity image is empty: they cannot persist through the
// trivial step. With a parameter the test is for that parameter, without
// one it must hold for every parameter.
inline std::set<StateId> out_of_play_states(const MultiDynamics& dyn,
                                            const std::optional<ParamId>& mu = std::nullopt) {
    if (dyn.motor_is_graph)
        raise(ErrorCode::MotorIsGraph, "out-of-play states need identity arrows");
    if (mu && !dyn.params.count(*mu))
        raise(ErrorCode::UnknownParam, "parameter '" + *mu + "'");

    std::set<StateId> out;
    for (const auto& [obj, id_arrow] : dyn.motor.identities) {
        for (const auto& s : dyn.states.at(obj)) {
            bool dead;
            if (mu) {
                dead = image(dyn, id_arrow, *mu, s).empty();
            } else {
                dead = true;
                for (const auto& p : dyn.params)
                    if (!image(dyn, id_arrow, p, s).empty()) {
                        dead = false;
                        break;
                    }
            }
            if (dead) out.insert(s);
        }
    }
    return out;
}

// A dynamics opened onto a clock over the same motor: the scansion dates
// every state, compatibly with both actions.
struct OpenDynamics {
    MultiDynamics dyn;
    Clock clock;
    std::map<StateId, InstantId> scansion;

    bool operator==(const OpenDynamics&) const = default;
};

inline ValidationReport validate_open_dynamics(const OpenDynamics& od) {
    ValidationReport report = validate_multidynamics(od.dyn);
    {
        ValidationReport clock_report = validate_clock(od.clock);
        for (auto& issue : clock_report.issues) report.add("clock", issue.detail);
    }
    if (!(od.dyn.motor == od.clock.dyn.motor) || od.dyn.motor_is_graph != od.clock.dyn.motor_is_graph)
        report.add("scansion", "dynamics and clock run over different motors");
    if (!report.ok()) return report;

    for (const auto& [obj, sts] : od.dyn.states) {
        for (const auto& s : sts) {
            auto it = od.scansion.find(s);
            if (it == od.scansion.end()) {
                report.add("scansion", "state '" + s + "' is not dated");
            } else if (!od.clock.instants_at(obj).count(it->second)) {
                report.add("scansion", "state '" + s + "' is dated outside its object's instants");
            }
        }
    }
    for (const auto& [s, t] : od.scansion) {
        bool known = false;
        for (const auto& [obj, sts] : od.dyn.states)
            if (sts.count(s)) known = true;
        if (!known) report.add("scansion", "scansion dates unknown state '" + s + "'");
        (void)t;
    }
    if (!report.ok()) return report;

    for (const auto& [key, table] : od.dyn.transitions) {
        const auto& [e, mu] = key;
        for (const auto& [s, targets] : table) {
            auto expected = od.clock.action(e, od.scansion.at(s));
            for (const auto& b : targets) {
                if (!expected || od.scansion.at(b) != *expected) {
                    report.add("scansion", "arrow '" + e + "' under '" + mu + "' moves '" + s +
                                               "' to '" + b + "' against the clock");
                }
            }
        }
    }
    return report;
}

} // namespace subdyn
