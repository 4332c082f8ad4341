#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "subdyn/dynamics.hpp"
#include "subdyn/errors.hpp"

namespace subdyn {

// A partial run of an open dynamics: a choice of parameter and a partial
// section of the scansion over the instants.
struct Realization {
    ParamId param;
    std::map<InstantId, StateId> assignment;

    bool operator==(const Realization&) const = default;
};

inline bool operator<(const Realization& a, const Realization& b) {
    return std::tie(a.param, a.assignment) < std::tie(b.param, b.assignment);
}

inline CheckResult is_realization(const OpenDynamics& od, const Realization& r) {
    if (!od.dyn.params.count(r.param))
        raise(ErrorCode::UnknownParam, "parameter '" + r.param + "'");

    for (const auto& [t, s] : r.assignment) {
        auto obj = od.clock.object_of(t);
        if (!obj)
            return {false, CheckWitness{"typing", "unknown instant '" + t + "'"}};
        auto it = od.scansion.find(s);
        if (it == od.scansion.end() || !od.dyn.states.at(*obj).count(s))
            return {false, CheckWitness{"typing", "'" + s + "' is not a state at instant '" + t + "'"}};
        if (it->second != t)
            return {false,
                    CheckWitness{"section", "state '" + s + "' is dated '" + it->second +
                                                "', not '" + t + "'"}};
    }

    // Whenever the target instant of an arrow is covered, the source instant
    // must be covered too and the two chosen states must be linked by the
    // arrow's transition.
    for (const auto& [id, a] : od.dyn.motor.arrows) {
        for (const auto& t : od.clock.instants_at(a.dom)) {
            auto u = od.clock.action(id, t);
            if (!u) continue;
            auto target = r.assignment.find(*u);
            if (target == r.assignment.end()) continue;
            auto source = r.assignment.find(t);
            if (source == r.assignment.end())
                return {false, CheckWitness{"closure", "instant '" + *u +
                                                           "' is covered but its source '" + t +
                                                           "' along '" + id + "' is not"}};
            if (!image(od.dyn, id, r.param, source->second).count(target->second))
                return {false, CheckWitness{"closure", "arrow '" + id + "' does not send '" +
                                                           source->second + "' to '" +
                                                           target->second + "'"}};
        }
    }
    return {true, std::nullopt};
}

namespace detail {

struct RealizationSpace {
    std::vector<std::vector<InstantId>> blocks; // topologically ordered
    std::vector<std::vector<size_t>> preds;
    std::map<InstantId, std::vector<StateId>> candidates;
    std::vector<std::tuple<ArrowId, InstantId, InstantId>> steps;
    std::map<InstantId, size_t> block_of;
};

inline RealizationSpace build_realization_space(const OpenDynamics& od) {
    RealizationSpace space;
    auto after = anteriority(od.clock);

    // Mutual-reachability classes of instants; the class representative is
    // its least member so the ordering below is reproducible.
    std::map<InstantId, InstantId> rep;
    for (const auto& [t, reach] : after) {
        InstantId best = t;
        for (const auto& u : reach)
            if (after.at(u).count(t) && u < best) best = u;
        rep[t] = best;
    }
    std::map<InstantId, std::vector<InstantId>> grouped;
    for (const auto& [t, r] : rep) grouped[r].push_back(t);

    std::map<InstantId, std::set<InstantId>> dag_preds;
    for (const auto& [r, members] : grouped) dag_preds[r] = {};
    for (const auto& [t, reach] : after)
        for (const auto& u : reach)
            if (rep.at(t) != rep.at(u)) dag_preds[rep.at(u)].insert(rep.at(t));

    std::map<InstantId, size_t> indegree;
    for (const auto& [r, ps] : dag_preds) indegree[r] = ps.size();
    std::set<InstantId> ready;
    for (const auto& [r, d] : indegree)
        if (d == 0) ready.insert(r);
    std::map<InstantId, size_t> order;
    while (!ready.empty()) {
        InstantId r = *ready.begin();
        ready.erase(ready.begin());
        order[r] = space.blocks.size();
        space.blocks.push_back(grouped.at(r));
        for (auto& [s, ps] : dag_preds)
            if (ps.erase(r) && ps.empty() && !order.count(s)) ready.insert(s);
    }
    space.preds.resize(space.blocks.size());
    for (size_t i = 0; i < space.blocks.size(); ++i)
        for (const auto& t : space.blocks[i]) space.block_of[t] = i;
    // recompute predecessor lists from the ordered blocks
    for (const auto& [t, reach] : after)
        for (const auto& u : reach) {
            size_t bt = space.block_of.at(t), bu = space.block_of.at(u);
            if (bt != bu) {
                auto& ps = space.preds[bu];
                if (std::find(ps.begin(), ps.end(), bt) == ps.end()) ps.push_back(bt);
            }
        }

    for (const auto& [t, b] : space.block_of) space.candidates[t] = {};
    for (const auto& [s, t] : od.scansion) space.candidates[t].push_back(s);
    for (auto& [t, cands] : space.candidates) std::sort(cands.begin(), cands.end());

    for (const auto& [id, a] : od.dyn.motor.arrows)
        for (const auto& t : od.clock.instants_at(a.dom))
            if (auto u = od.clock.action(id, t)) space.steps.emplace_back(id, t, *u);
    return space;
}

} // namespace detail

// Depth-first walk over every realization for the given parameter (or all
// parameters when none is given). The visitor returns false to stop early;
// the function reports whether the walk ran to completion.
inline bool walk_realizations(const OpenDynamics& od, const std::optional<ParamId>& lam,
                              const std::function<bool(const Realization&)>& visit) {
    if (lam && !od.dyn.params.count(*lam))
        raise(ErrorCode::UnknownParam, "parameter '" + *lam + "'");

    detail::RealizationSpace space = detail::build_realization_space(od);
    const size_t nblocks = space.blocks.size();

    std::vector<ParamId> params;
    if (lam) {
        params.push_back(*lam);
    } else {
        params.assign(od.dyn.params.begin(), od.dyn.params.end());
    }

    std::map<InstantId, StateId> current;
    std::vector<bool> defined(nblocks, false);

    for (const auto& p : params) {
        auto consistent_with_block = [&](size_t b) {
            for (const auto& [id, t, u] : space.steps) {
                auto ti = current.find(t);
                auto ui = current.find(u);
                if (ti == current.end() || ui == current.end()) continue;
                if (space.block_of.at(t) != b && space.block_of.at(u) != b) continue;
                if (!image(od.dyn, id, p, ti->second).count(ui->second)) return false;
            }
            return true;
        };

        std::function<bool(size_t)> rec = [&](size_t i) -> bool {
            if (i == nblocks) return visit(Realization{p, current});

            // always legal: leave the whole block uncovered
            defined[i] = false;
            if (!rec(i + 1)) return false;

            for (size_t pb : space.preds[i])
                if (!defined[pb]) return true; // covering it would break closure

            const auto& members = space.blocks[i];
            std::function<bool(size_t)> assign = [&](size_t k) -> bool {
                if (k == members.size()) {
                    if (!consistent_with_block(i)) return true;
                    defined[i] = true;
                    bool go = rec(i + 1);
                    defined[i] = false;
                    return go;
                }
                for (const auto& s : space.candidates.at(members[k])) {
                    current[members[k]] = s;
                    bool go = assign(k + 1);
                    current.erase(members[k]);
                    if (!go) return false;
                }
                return true;
            };
            return assign(0);
        };
        if (!rec(0)) return false;
    }
    return true;
}

inline std::vector<Realization> enumerate_realizations(const OpenDynamics& od,
                                                       const std::optional<ParamId>& lam,
                                                       size_t limit = 100000) {
    std::vector<Realization> out;
    walk_realizations(od, lam, [&](const Realization& r) {
        if (out.size() >= limit)
            raise(ErrorCode::LimitExceeded,
                  "more than " + std::to_string(limit) + " realizations");
        out.push_back(r);
        return true;
    });
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<Realization> enumerate_realizations(const OpenDynamics& od,
                                                       size_t limit = 100000) {
    return enumerate_realizations(od, std::nullopt, limit);
}

// Some realization covers at least one instant.
inline bool is_efficient(const OpenDynamics& od) {
    bool found = false;
    walk_realizations(od, std::nullopt, [&](const Realization& r) {
        if (!r.assignment.empty()) {
            found = true;
            return false;
        }
        return true;
    });
    return found;
}

inline bool passes_through(const OpenDynamics& od, const Realization& r, const StateId& a) {
    auto it = od.scansion.find(a);
    if (it == od.scansion.end()) return false;
    auto jt = r.assignment.find(it->second);
    return jt != r.assignment.end() && jt->second == a;
}

inline bool passes_through(const OpenDynamics& od, const Realization& r,
                           const std::set<StateId>& states) {
    for (const auto& a : states)
        if (!passes_through(od, r, a)) return false;
    return true;
}

} // namespace subdyn
