#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "subdyn/dynamics.hpp"
#include "subdyn/errors.hpp"
#include "subdyn/families.hpp"
#include "subdyn/interact.hpp"
#include "subdyn/realize.hpp"

namespace subdyn {

// Canonical id for a component-indexed tuple: a compact JSON object dump.
// std::map keeps the keys sorted, so equal tuples share one spelling.
inline std::string tuple_id(const std::map<ComponentId, std::string>& parts) {
    return nlohmann::json(parts).dump();
}

// A dynamics generated from an interactive family, together with the tuple
// structure behind its synthetic state and parameter ids.
struct GeneratedDynamics {
    OpenDynamics result;
    std::map<ParamId, std::map<ComponentId, ParamId>> param_tuples;
    std::map<StateId, std::map<ComponentId, StateId>> state_tuples;
    std::map<ParamId, std::set<ParamId>> param_blocks;
    std::map<ComponentId, std::set<ParamId>> heaps;
    std::string mode;
    InteractiveFamily family;

    bool operator==(const GeneratedDynamics&) const = default;
};

// Transitions b in e^beta(a) hold when some interaction tuple carrying the
// parameter tuple passes through every coordinate of a and of b, where the
// coordinates are dated through the synchronizations.
inline GeneratedDynamics generate_primary(const InteractiveFamily& fam, size_t limit = 100000) {
    ValidationReport rep = validate_family(fam, limit);
    if (!rep.ok())
        raise(ErrorCode::FamilyInvalid, rep.issues.front().rule + ": " + rep.issues.front().detail);

    const OpenDynamics& chief = fam.components.at(fam.chief);

    GeneratedDynamics gen;
    gen.mode = "p";
    gen.family = fam;
    gen.result.clock = chief.clock;

    MultiDynamics& dyn = gen.result.dyn;
    dyn.motor = chief.dyn.motor;
    dyn.motor_is_graph = chief.dyn.motor_is_graph;
    for (const auto& obj : dyn.motor.objects) dyn.states[obj];

    auto dated = [&](const ComponentId& i, const InstantId& t) -> const InstantId& {
        return i == fam.chief ? t : fam.syncs.at(i).instant_map.at(t);
    };

    std::vector<ComponentId> others;
    for (const auto& i : fam.index)
        if (i != fam.chief) others.push_back(i);

    std::map<ComponentId, std::map<InstantId, std::vector<StateId>>> at_instant;
    for (const auto& [cid, od] : fam.components)
        for (const auto& [s, t] : od.scansion) at_instant[cid][t].push_back(s);

    // States are the typed tuples over each chief state: every non-chief
    // coordinate is dated at the synchronized image of the chief instant.
    size_t count = 0;
    for (const auto& [obj, sts] : chief.dyn.states) {
        for (const auto& a0 : sts) {
            const InstantId& t = chief.scansion.at(a0);
            std::vector<std::map<ComponentId, StateId>> tuples{{{fam.chief, a0}}};
            for (const auto& i : others) {
                const auto& fiber = at_instant[i][dated(i, t)];
                std::vector<std::map<ComponentId, StateId>> grown;
                grown.reserve(tuples.size() * fiber.size());
                for (const auto& base : tuples)
                    for (const auto& s : fiber) {
                        auto next = base;
                        next.emplace(i, s);
                        grown.push_back(std::move(next));
                    }
                tuples = std::move(grown);
                if (tuples.empty()) break;
            }
            for (auto& tup : tuples) {
                if (++count > limit)
                    raise(ErrorCode::LimitExceeded,
                          "generated state count exceeds " + std::to_string(limit));
                StateId sid = tuple_id(tup);
                dyn.states[obj].insert(sid);
                gen.result.scansion[sid] = t;
                gen.state_tuples.emplace(std::move(sid), std::move(tup));
            }
        }
    }

    for (const auto& tup : fam.interaction.tuples) {
        std::map<ComponentId, ParamId> lam;
        for (const auto& [cid, entry] : tup) lam[cid] = entry.param;
        ParamId pid = tuple_id(lam);
        dyn.params.insert(pid);
        gen.param_tuples.emplace(std::move(pid), std::move(lam));
    }
    for (const auto& [pid, lam] : gen.param_tuples) {
        gen.param_blocks[pid] = {pid};
        (void)lam;
    }

    for (const auto& tup : fam.interaction.tuples) {
        std::map<ComponentId, ParamId> lam;
        for (const auto& [cid, entry] : tup) lam[cid] = entry.param;
        ParamId pid = tuple_id(lam);
        for (const auto& [eid, e] : dyn.motor.arrows) {
            for (const auto& t : chief.clock.instants_at(e.dom)) {
                auto u = chief.clock.action(eid, t);
                if (!u) continue;
                std::map<ComponentId, StateId> a, b;
                bool covered = true;
                for (const auto& i : fam.index) {
                    const ExternalPart& sig = tup.at(i).real;
                    auto at = sig.find(dated(i, t));
                    auto bt = sig.find(dated(i, *u));
                    if (at == sig.end() || bt == sig.end()) {
                        covered = false;
                        break;
                    }
                    a[i] = at->second;
                    b[i] = bt->second;
                }
                if (!covered) continue;
                dyn.transitions[{eid, pid}][tuple_id(a)].insert(tuple_id(b));
            }
        }
    }
    return gen;
}

// Partition of the parameter tuples under the heap relation: tuples are
// equivalent when every coordinate either matches or falls in that heap.
inline std::vector<std::set<ParamId>> heap_equivalence(
    const std::map<ParamId, std::map<ComponentId, ParamId>>& param_tuples,
    const std::map<ComponentId, std::set<ParamId>>& heaps) {
    std::map<std::map<ComponentId, std::string>, std::set<ParamId>> groups;
    for (const auto& [pid, lam] : param_tuples) {
        std::map<ComponentId, std::string> signature;
        for (const auto& [cid, mu] : lam) {
            auto it = heaps.find(cid);
            bool pooled = it != heaps.end() && it->second.count(mu);
            signature[cid] = pooled ? std::string(1, '\x01') : '\x02' + mu;
        }
        groups[signature].insert(pid);
    }
    std::vector<std::set<ParamId>> partition;
    partition.reserve(groups.size());
    for (auto& [signature, block] : groups) {
        partition.push_back(std::move(block));
        (void)signature;
    }
    return partition;
}

inline std::map<ComponentId, std::set<ParamId>> used_params(const RelationRP& rel) {
    std::map<ComponentId, std::set<ParamId>> used;
    for (const auto& i : rel.index) used[i];
    for (const auto& tup : rel.tuples)
        for (const auto& [cid, entry] : tup) used[cid].insert(entry.param);
    return used;
}

// A slot falls in the functional heap only when the interaction leaves no
// choice there at all: one parameter serves every tuple.
inline std::map<ComponentId, std::set<ParamId>> functional_heaps(const InteractiveFamily& fam) {
    std::map<ComponentId, std::set<ParamId>> heaps = used_params(fam.interaction);
    for (auto& [cid, mus] : heaps) {
        if (mus.size() != 1) mus.clear();
        (void)cid;
    }
    return heaps;
}

// A parameter is blocked at a slot when some parameter tuple using it has a
// realization-tuple fiber that is not the product of its two projections;
// the loose heap collects the blocked parameters.
inline std::map<ComponentId, std::set<ParamId>> souple_heaps(const InteractiveFamily& fam) {
    std::map<std::map<ComponentId, ParamId>, std::set<std::map<ComponentId, ExternalPart>>> fibers;
    for (const auto& tup : fam.interaction.tuples) {
        std::map<ComponentId, ParamId> lam;
        std::map<ComponentId, ExternalPart> sigma;
        for (const auto& [cid, entry] : tup) {
            lam[cid] = entry.param;
            sigma[cid] = entry.real;
        }
        fibers[std::move(lam)].insert(std::move(sigma));
    }

    std::map<ComponentId, std::set<ParamId>> heaps;
    for (const auto& i : fam.index) heaps[i];
    for (const auto& [lam, fiber] : fibers) {
        for (const auto& i : fam.index) {
            std::set<ExternalPart> own;
            std::set<std::map<ComponentId, ExternalPart>> rest;
            for (const auto& sigma : fiber) {
                own.insert(sigma.at(i));
                auto reduced = sigma;
                reduced.erase(i);
                rest.insert(std::move(reduced));
            }
            if (fiber.size() != own.size() * rest.size()) heaps[i].insert(lam.at(i));
        }
    }
    return heaps;
}

inline GeneratedDynamics generate_with_heaps(const InteractiveFamily& fam,
                                             const std::map<ComponentId, std::set<ParamId>>& heaps,
                                             size_t limit = 100000) {
    GeneratedDynamics gen = generate_primary(fam, limit);
    std::vector<std::set<ParamId>> partition = heap_equivalence(gen.param_tuples, heaps);
    gen.result.dyn = quotient_parameters(gen.result.dyn, partition);
    gen.param_blocks.clear();
    for (const auto& block : partition) gen.param_blocks[partition_block_name(block)] = block;
    gen.heaps = heaps;
    gen.mode = "heaps";
    return gen;
}

inline GeneratedDynamics generate_functional(const InteractiveFamily& fam, size_t limit = 100000) {
    GeneratedDynamics gen = generate_with_heaps(fam, functional_heaps(fam), limit);
    gen.mode = "f";
    return gen;
}

inline GeneratedDynamics generate_souple(const InteractiveFamily& fam, size_t limit = 100000) {
    GeneratedDynamics gen = generate_with_heaps(fam, souple_heaps(fam), limit);
    gen.mode = "s";
    return gen;
}

// Maximal pooling: every declared parameter of every component is merged,
// so all parameter tuples collapse to a single class.
inline GeneratedDynamics generate_mono(const InteractiveFamily& fam, size_t limit = 100000) {
    std::map<ComponentId, std::set<ParamId>> heaps;
    for (const auto& [cid, od] : fam.components) heaps[cid] = od.dyn.params;
    GeneratedDynamics gen = generate_with_heaps(fam, heaps, limit);
    gen.mode = "m";
    return gen;
}

// The one-component family over a dynamics, tied together by its null
// interaction.
inline InteractiveFamily canonical_family(const OpenDynamics& a, size_t limit = 100000) {
    if (!is_efficient(a))
        raise(ErrorCode::Inefficient, "dynamics admits no nonempty realization");
    InteractiveFamily fam;
    fam.index = {"0"};
    fam.chief = "0";
    fam.components.emplace("0", a);
    ComponentContexts ctx = compute_contexts(fam.components, limit);
    fam.interaction = null_interaction(ctx, limit);
    return fam;
}

// A dynamics is regular when regenerating it through its canonical family
// reproduces it: every parameter keeps a nonempty realization and every
// transition image survives unchanged.
inline CheckResult is_regular(const OpenDynamics& a, size_t limit = 100000) {
    GeneratedDynamics gen = generate_primary(canonical_family(a, limit), limit);

    std::map<ParamId, ParamId> generated_id;
    for (const auto& [pid, lam] : gen.param_tuples) generated_id[lam.at("0")] = pid;
    for (const auto& mu : a.dyn.params)
        if (!generated_id.count(mu))
            return {false,
                    CheckWitness{"parameter",
                                 "parameter '" + mu + "' admits no nonempty realization"}};

    for (const auto& [eid, e] : a.dyn.motor.arrows) {
        for (const auto& mu : a.dyn.params) {
            const ParamId& pid = generated_id.at(mu);
            for (const auto& s : a.dyn.states.at(e.dom)) {
                const auto& original = image(a.dyn, eid, mu, s);
                const auto& generated = image(gen.result.dyn, eid, pid, tuple_id({{"0", s}}));
                std::set<StateId> unwrapped;
                for (const auto& b : generated) unwrapped.insert(gen.state_tuples.at(b).at("0"));
                if (unwrapped != original)
                    return {false,
                            CheckWitness{"transition", "arrow '" + eid + "', parameter '" + mu +
                                                           "', state '" + s + "'"}};
            }
        }
    }
    return {true, std::nullopt};
}

} // namespace subdyn
