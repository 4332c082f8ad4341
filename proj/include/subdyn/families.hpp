#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "subdyn/errors.hpp"
#include "subdyn/interact.hpp"

namespace subdyn {

// Change of clock: objects and instants of the source clock are mapped into
// the target clock. The arrow map is only needed for rigidity.
struct Synchronization {
    std::map<ObjectId, ObjectId> obj_map;
    std::map<InstantId, InstantId> instant_map;
    std::optional<std::map<ArrowId, ArrowId>> arrow_map;

    bool operator==(const Synchronization&) const = default;
};

inline ValidationReport validate_synchronization(const Clock& src, const Clock& dst,
                                                 const Synchronization& sync) {
    ValidationReport report;
    for (const auto& obj : src.dyn.motor.objects) {
        auto it = sync.obj_map.find(obj);
        if (it == sync.obj_map.end())
            report.add("objects", "object '" + obj + "' is unmapped");
        else if (!dst.dyn.motor.objects.count(it->second))
            report.add("objects", "object '" + obj + "' maps to unknown '" + it->second + "'");
    }
    if (!report.ok()) return report;

    for (const auto& [obj, insts] : src.dyn.states) {
        const ObjectId& target_obj = sync.obj_map.at(obj);
        for (const auto& t : insts) {
            auto it = sync.instant_map.find(t);
            if (it == sync.instant_map.end()) {
                report.add("instants", "instant '" + t + "' is unmapped");
            } else if (!dst.dyn.states.at(target_obj).count(it->second)) {
                report.add("instants", "instant '" + t + "' maps outside the instants of '" +
                                           target_obj + "'");
            }
        }
    }
    if (!report.ok()) return report;

    // the instant map must not scramble anteriority: it either preserves the
    // order everywhere or reverses it everywhere
    auto src_after = anteriority(src);
    auto dst_after = anteriority(dst);
    bool preserves = true, reverses = true;
    for (const auto& [s, reach] : src_after) {
        for (const auto& t : reach) {
            const InstantId& ds = sync.instant_map.at(s);
            const InstantId& dt = sync.instant_map.at(t);
            if (!dst_after.at(ds).count(dt)) preserves = false;
            if (!dst_after.at(dt).count(ds)) reverses = false;
        }
    }
    if (!preserves && !reverses) report.add("monotone", "instant map scrambles anteriority");
    return report;
}

// A synchronization is rigid when it also carries a functor on motors that
// the instant map commutes with, arrow by arrow.
inline CheckResult is_rigid(const Clock& src, const Clock& dst, const Synchronization& sync) {
    if (!sync.arrow_map)
        raise(ErrorCode::MissingArrowMap, "rigidity needs an arrow map");
    const auto& amap = *sync.arrow_map;

    for (const auto& [id, a] : src.dyn.motor.arrows) {
        auto it = amap.find(id);
        if (it == amap.end())
            return {false, CheckWitness{"functor", "arrow '" + id + "' is unmapped"}};
        if (!dst.dyn.motor.has_arrow(it->second))
            return {false, CheckWitness{"functor", "arrow '" + id + "' maps to unknown '" +
                                                       it->second + "'"}};
        const Arrow& im = dst.dyn.motor.arrow(it->second);
        if (im.dom != sync.obj_map.at(a.dom) || im.cod != sync.obj_map.at(a.cod))
            return {false, CheckWitness{"functor", "arrow '" + id + "' maps to mistyped '" +
                                                       it->second + "'"}};
    }
    if (!src.dyn.motor_is_graph && !dst.dyn.motor_is_graph) {
        for (const auto& [obj, id_arrow] : src.dyn.motor.identities)
            if (amap.at(id_arrow) != dst.dyn.motor.identities.at(sync.obj_map.at(obj)))
                return {false, CheckWitness{"functor", "identity on '" + obj + "' is not preserved"}};
        for (const auto& [pair, gf] : src.dyn.motor.compose_table) {
            if (amap.at(gf) != dst.dyn.motor.compose(amap.at(pair.first), amap.at(pair.second)))
                return {false, CheckWitness{"functor", "composition at ('" + pair.first + "', '" +
                                                           pair.second + "') is not preserved"}};
        }
    }

    for (const auto& [id, a] : src.dyn.motor.arrows) {
        for (const auto& t : src.instants_at(a.dom)) {
            auto moved = src.action(id, t);
            if (!moved) continue;
            auto expected = dst.action(amap.at(id), sync.instant_map.at(t));
            if (!expected || sync.instant_map.at(*moved) != *expected)
                return {false, CheckWitness{"equivariance",
                                            "instant '" + t + "' along '" + id +
                                                "' lands on '" + sync.instant_map.at(*moved) +
                                                "', clock expects '" +
                                                (expected ? *expected : std::string("?")) + "'"}};
        }
    }
    return {true, std::nullopt};
}

// An indexed family of open dynamics tied together by an interaction, with
// one chief component every other component synchronizes on.
struct InteractiveFamily {
    std::vector<ComponentId> index;
    std::map<ComponentId, OpenDynamics> components;
    RelationRP interaction;
    ComponentId chief;
    std::map<ComponentId, Synchronization> syncs;

    bool operator==(const InteractiveFamily&) const = default;
};

inline ValidationReport validate_family(const InteractiveFamily& fam, size_t limit = 100000) {
    ValidationReport report;
    if (fam.index.empty()) report.add("family", "empty index");
    if (!std::is_sorted(fam.index.begin(), fam.index.end()) ||
        std::adjacent_find(fam.index.begin(), fam.index.end()) != fam.index.end())
        report.add("family", "index must be sorted and duplicate free");
    {
        std::vector<ComponentId> keys;
        for (const auto& [i, od] : fam.components) {
            keys.push_back(i);
            (void)od;
        }
        if (keys != fam.index) report.add("family", "components do not match the index");
    }
    if (!std::binary_search(fam.index.begin(), fam.index.end(), fam.chief))
        report.add("family", "chief '" + fam.chief + "' is not indexed");
    if (!report.ok()) return report;

    for (const auto& [i, od] : fam.components) {
        ValidationReport comp = validate_open_dynamics(od);
        for (auto& issue : comp.issues)
            report.add("component", "'" + i + "': " + issue.rule + ": " + issue.detail);
        if (!comp.ok()) continue;
        if (!od.dyn.motor_is_graph) {
            CheckResult sub = is_subfunctorial(od.dyn);
            if (!sub.ok)
                report.add("component",
                           "'" + i + "' is not sub-functorial: " +
                               (sub.witness ? sub.witness->detail : std::string()));
        }
        if (!is_efficient(od))
            report.add("component", "'" + i + "' has no nonempty realization");
    }
    if (!report.ok()) return report;

    for (const auto& i : fam.index) {
        if (i == fam.chief) {
            if (fam.syncs.count(i))
                report.add("sync", "chief '" + i + "' must not carry a synchronization");
            continue;
        }
        auto it = fam.syncs.find(i);
        if (it == fam.syncs.end()) {
            report.add("sync", "component '" + i + "' has no synchronization");
            continue;
        }
        ValidationReport sync_report = validate_synchronization(
            fam.components.at(fam.chief).clock, fam.components.at(i).clock, it->second);
        for (auto& issue : sync_report.issues)
            report.add("sync", "'" + i + "': " + issue.rule + ": " + issue.detail);
    }
    for (const auto& [i, sync] : fam.syncs) {
        if (!std::binary_search(fam.index.begin(), fam.index.end(), i))
            report.add("sync", "synchronization for unknown component '" + i + "'");
        (void)sync;
    }

    if (fam.interaction.index != fam.index) {
        report.add("interaction", "interaction index differs from the family index");
        return report;
    }
    ComponentContexts ctx = compute_contexts(fam.components, limit);
    ValidationReport rel_report = validate_relation(fam.interaction, ctx);
    for (auto& issue : rel_report.issues)
        report.add("interaction", issue.rule + ": " + issue.detail);
    if (rel_report.ok() && !is_interaction(fam.interaction, ctx))
        report.add("interaction", "relation has an incoherent tuple");
    return report;
}

} // namespace subdyn
