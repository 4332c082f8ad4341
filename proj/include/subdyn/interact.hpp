#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "subdyn/errors.hpp"
#include "subdyn/realize.hpp"

namespace subdyn {

using ComponentId = std::string;

// A realization is referenced by its external part: the bare assignment of
// states to instants, independent of the parameter it ran under.
using ExternalPart = std::map<InstantId, StateId>;

struct TupleEntry {
    ParamId param;
    ExternalPart real;

    bool operator==(const TupleEntry&) const = default;
};

inline bool operator<(const TupleEntry& a, const TupleEntry& b) {
    return std::tie(a.param, a.real) < std::tie(b.param, b.real);
}

using InteractionTuple = std::map<ComponentId, TupleEntry>;

// Relation between realizations and parameters over an indexed family of
// components. Coherence of tuples is not part of the type; an interaction
// is a relation all of whose tuples are coherent.
struct RelationRP {
    std::vector<ComponentId> index;
    std::set<InteractionTuple> tuples;

    bool operator==(const RelationRP&) const = default;
};

// Per component: every nonempty realization external part, keyed by the
// parameter it runs under, plus the flattened views.
struct ComponentContexts {
    std::map<ComponentId, std::map<ParamId, std::set<ExternalPart>>> star;
    std::map<ComponentId, std::set<ExternalPart>> star_all;
    std::map<ComponentId, std::set<ParamId>> params;
};

inline ComponentContexts compute_contexts(const std::map<ComponentId, OpenDynamics>& components,
                                          size_t limit = 100000) {
    ComponentContexts ctx;
    for (const auto& [name, od] : components) {
        auto& per_param = ctx.star[name];
        for (const auto& p : od.dyn.params) per_param[p] = {};
        ctx.star_all[name] = {};
        ctx.params[name] = od.dyn.params;
        size_t seen = 0;
        walk_realizations(od, std::nullopt, [&](const Realization& r) {
            if (++seen > limit)
                raise(ErrorCode::LimitExceeded,
                      "component '" + name + "' exceeds " + std::to_string(limit) +
                          " realizations");
            if (!r.assignment.empty()) {
                per_param[r.param].insert(r.assignment);
                ctx.star_all[name].insert(r.assignment);
            }
            return true;
        });
    }
    return ctx;
}

inline ValidationReport validate_relation(const RelationRP& rel, const ComponentContexts& ctx) {
    ValidationReport report;
    if (rel.index.empty()) report.add("relation", "empty index");
    if (!std::is_sorted(rel.index.begin(), rel.index.end()) ||
        std::adjacent_find(rel.index.begin(), rel.index.end()) != rel.index.end())
        report.add("relation", "index must be sorted and duplicate free");
    for (const auto& i : rel.index)
        if (!ctx.star.count(i)) report.add("relation", "unknown component '" + i + "'");
    if (rel.tuples.empty()) report.add("relation", "empty tuple set");
    if (!report.ok()) return report;

    for (const auto& t : rel.tuples) {
        if (t.size() != rel.index.size()) {
            report.add("tuple", "tuple arity differs from the index");
            continue;
        }
        for (const auto& [i, entry] : t) {
            if (!std::binary_search(rel.index.begin(), rel.index.end(), i)) {
                report.add("tuple", "tuple names component '" + i + "' outside the index");
                continue;
            }
            if (!ctx.params.at(i).count(entry.param))
                report.add("tuple", "unknown parameter '" + entry.param + "' for '" + i + "'");
            if (!ctx.star_all.at(i).count(entry.real))
                report.add("tuple",
                           "component '" + i + "' entry is not a nonempty realization part");
        }
    }
    return report;
}

inline bool is_coherent_tuple(const InteractionTuple& t, const ComponentContexts& ctx) {
    for (const auto& [i, entry] : t) {
        auto comp = ctx.star.find(i);
        if (comp == ctx.star.end()) return false;
        auto per_param = comp->second.find(entry.param);
        if (per_param == comp->second.end() || !per_param->second.count(entry.real)) return false;
    }
    return true;
}

// Keep only the coherent tuples; an empty result is not an interaction, so
// it comes back as an empty optional.
inline std::optional<RelationRP> coherent_part(const RelationRP& rel,
                                               const ComponentContexts& ctx) {
    RelationRP out;
    out.index = rel.index;
    for (const auto& t : rel.tuples)
        if (is_coherent_tuple(t, ctx)) out.tuples.insert(t);
    if (out.tuples.empty()) return std::nullopt;
    return out;
}

inline bool is_interaction(const RelationRP& rel, const ComponentContexts& ctx) {
    if (rel.tuples.empty()) return false;
    for (const auto& t : rel.tuples)
        if (!is_coherent_tuple(t, ctx)) return false;
    return true;
}

// Every coherent tuple at once: the loosest interaction the family admits.
inline RelationRP null_interaction(const ComponentContexts& ctx, size_t limit = 100000) {
    RelationRP rel;
    for (const auto& [name, per_param] : ctx.star) rel.index.push_back(name);
    std::sort(rel.index.begin(), rel.index.end());

    std::vector<std::vector<TupleEntry>> choices;
    for (const auto& i : rel.index) {
        std::vector<TupleEntry> entries;
        for (const auto& [p, parts] : ctx.star.at(i))
            for (const auto& part : parts) entries.push_back({p, part});
        if (entries.empty())
            raise(ErrorCode::InefficientComponent,
                  "component '" + i + "' has no nonempty realization");
        choices.push_back(std::move(entries));
    }

    InteractionTuple current;
    std::function<void(size_t)> rec = [&](size_t k) {
        if (k == choices.size()) {
            if (rel.tuples.size() >= limit)
                raise(ErrorCode::LimitExceeded,
                      "null interaction exceeds " + std::to_string(limit) + " tuples");
            rel.tuples.insert(current);
            return;
        }
        for (const auto& entry : choices[k]) {
            current[rel.index[k]] = entry;
            rec(k + 1);
        }
        current.erase(rel.index[k]);
    };
    rec(0);
    return rel;
}

// Projection onto the realization coordinates.
inline std::set<std::map<ComponentId, ExternalPart>> realization_relation(const RelationRP& rel) {
    std::set<std::map<ComponentId, ExternalPart>> out;
    for (const auto& t : rel.tuples) {
        std::map<ComponentId, ExternalPart> sigma;
        for (const auto& [i, entry] : t) sigma[i] = entry.real;
        out.insert(std::move(sigma));
    }
    return out;
}

// Projection onto the parameter coordinates.
inline std::set<std::map<ComponentId, ParamId>> parameter_relation(const RelationRP& rel) {
    std::set<std::map<ComponentId, ParamId>> out;
    for (const auto& t : rel.tuples) {
        std::map<ComponentId, ParamId> lam;
        for (const auto& [i, entry] : t) lam[i] = entry.param;
        out.insert(std::move(lam));
    }
    return out;
}

// Some tuple of realizations never occurs together in the relation.
inline bool is_filtering(const RelationRP& rel, const ComponentContexts& ctx) {
    unsigned long long full = 1;
    for (const auto& i : rel.index) {
        full *= ctx.star_all.at(i).size();
        if (full > (1ull << 62)) raise(ErrorCode::LimitExceeded, "realization space too large");
    }
    return realization_relation(rel).size() < full;
}

inline bool is_operant(const RelationRP& rel, const ComponentContexts& ctx) {
    return is_filtering(rel, ctx);
}

// Decision form: the relation is normal when every realization tuple it
// misses can be excused by an incoherent parameter pairing. A realization
// part that is coherent with every parameter of its component can never be
// excused, so the tuples made of such parts must all be present.
inline bool is_normal(const RelationRP& rel, const ComponentContexts& ctx) {
    std::map<ComponentId, std::set<ExternalPart>> full_cover;
    unsigned long long expected = 1;
    for (const auto& i : rel.index) {
        auto& cover = full_cover[i];
        for (const auto& part : ctx.star_all.at(i)) {
            bool everywhere = true;
            for (const auto& p : ctx.params.at(i))
                if (!ctx.star.at(i).at(p).count(part)) {
                    everywhere = false;
                    break;
                }
            if (everywhere) cover.insert(part);
        }
        expected *= cover.size();
        if (expected > (1ull << 62)) raise(ErrorCode::LimitExceeded, "cover space too large");
    }

    std::set<std::map<ComponentId, ExternalPart>> covered;
    for (const auto& sigma : realization_relation(rel)) {
        bool inside = true;
        for (const auto& [i, part] : sigma)
            if (!full_cover.at(i).count(part)) {
                inside = false;
                break;
            }
        if (inside) covered.insert(sigma);
    }
    return covered.size() == expected;
}

// Definition-level search: the relation is normal when some relation with
// the same coherent part misses no realization tuple. Candidates add only
// incoherent tuples, so the search walks every subset of those.
inline bool is_normal_bruteforce(const RelationRP& rel, const ComponentContexts& ctx,
                                 size_t cap = 4096) {
    unsigned long long space = 1;
    for (const auto& i : rel.index) {
        space *= ctx.star_all.at(i).size() * ctx.params.at(i).size();
        if (space > cap)
            raise(ErrorCode::CapExceeded,
                  "entry space exceeds the cap of " + std::to_string(cap));
    }

    std::vector<InteractionTuple> incoherent;
    {
        std::vector<std::vector<TupleEntry>> choices;
        for (const auto& i : rel.index) {
            std::vector<TupleEntry> entries;
            for (const auto& p : ctx.params.at(i))
                for (const auto& part : ctx.star_all.at(i)) entries.push_back({p, part});
            choices.push_back(std::move(entries));
        }
        InteractionTuple current;
        std::function<void(size_t)> rec = [&](size_t k) {
            if (k == choices.size()) {
                if (!is_coherent_tuple(current, ctx)) incoherent.push_back(current);
                return;
            }
            for (const auto& entry : choices[k]) {
                current[rel.index[k]] = entry;
                rec(k + 1);
            }
            current.erase(rel.index[k]);
        };
        rec(0);
    }

    unsigned long long full = 1;
    for (const auto& i : rel.index) full *= ctx.star_all.at(i).size();

    const size_t n = incoherent.size();
    if (n >= 8 * sizeof(unsigned long long))
        raise(ErrorCode::CapExceeded, "too many incoherent tuples to search");
    for (unsigned long long mask = 0; mask < (1ull << n); ++mask) {
        RelationRP candidate = rel;
        for (size_t k = 0; k < n; ++k)
            if (mask & (1ull << k)) candidate.tuples.insert(incoherent[k]);
        if (realization_relation(candidate).size() == full) return true;
    }
    return false;
}

// No realization tuple is paired with two different parameter tuples.
inline bool is_determining(const RelationRP& rel) {
    std::map<std::map<ComponentId, ExternalPart>, std::map<ComponentId, ParamId>> seen;
    for (const auto& t : rel.tuples) {
        std::map<ComponentId, ExternalPart> sigma;
        std::map<ComponentId, ParamId> lam;
        for (const auto& [i, entry] : t) {
            sigma[i] = entry.real;
            lam[i] = entry.param;
        }
        auto [it, inserted] = seen.insert({std::move(sigma), lam});
        if (!inserted && it->second != lam) return false;
    }
    return true;
}

inline bool is_concrete(const RelationRP& rel, const ComponentContexts& ctx) {
    return is_normal(rel, ctx) && is_determining(rel);
}

// Partial assignment over the doubled index: realization slots and
// parameter slots are filled independently.
struct Disposition {
    std::map<ComponentId, ExternalPart> realization_slots;
    std::map<ComponentId, ParamId> param_slots;

    bool operator==(const Disposition&) const = default;
};

inline bool is_compatible(const Disposition& q, const RelationRP& rel) {
    auto known = [&](const ComponentId& i) {
        return std::binary_search(rel.index.begin(), rel.index.end(), i);
    };
    for (const auto& [i, part] : q.realization_slots) {
        if (!known(i))
            raise(ErrorCode::IllTypedDisposition, "realization slot '" + i + "' is not indexed");
        (void)part;
    }
    for (const auto& [i, p] : q.param_slots) {
        if (!known(i))
            raise(ErrorCode::IllTypedDisposition, "parameter slot '" + i + "' is not indexed");
        (void)p;
    }

    for (const auto& t : rel.tuples) {
        bool fits = true;
        for (const auto& [i, part] : q.realization_slots)
            if (t.at(i).real != part) {
                fits = false;
                break;
            }
        if (!fits) continue;
        for (const auto& [i, p] : q.param_slots)
            if (t.at(i).param != p) {
                fits = false;
                break;
            }
        if (fits) return true;
    }
    return false;
}

inline Disposition join_dispositions(const Disposition& q, const Disposition& r) {
    Disposition out = q;
    for (const auto& [i, part] : r.realization_slots) {
        auto [it, inserted] = out.realization_slots.insert({i, part});
        if (!inserted && it->second != part)
            raise(ErrorCode::IncompatibleDispositions,
                  "realization slot '" + i + "' holds two different parts");
    }
    for (const auto& [i, p] : r.param_slots) {
        auto [it, inserted] = out.param_slots.insert({i, p});
        if (!inserted && it->second != p)
            raise(ErrorCode::IncompatibleDispositions,
                  "parameter slot '" + i + "' holds two different parameters");
    }
    return out;
}

// Connected subsets of the index under the relation: the base holds the
// subsets none of whose binary splits factors every section, and the
// structure is its closure under unions of overlapping members.
template <typename V>
std::set<std::set<ComponentId>> connectivity_structure(
    const std::set<std::map<ComponentId, V>>& rel, const std::set<ComponentId>& index) {
    std::vector<ComponentId> order(index.begin(), index.end());
    const size_t n = order.size();

    auto restrict_to = [](const std::map<ComponentId, V>& t,
                          const std::set<ComponentId>& keys) {
        std::map<ComponentId, V> out;
        for (const auto& k : keys) {
            auto it = t.find(k);
            if (it != t.end()) out[k] = it->second;
        }
        return out;
    };

    std::set<std::set<ComponentId>> structure;
    for (unsigned long long mask = 0; mask < (1ull << n); ++mask) {
        std::set<ComponentId> K;
        for (size_t b = 0; b < n; ++b)
            if (mask & (1ull << b)) K.insert(order[b]);

        if (K.size() <= 1) {
            structure.insert(K);
            continue;
        }

        std::set<ComponentId> rest;
        for (const auto& i : index)
            if (!K.count(i)) rest.insert(i);

        std::map<std::map<ComponentId, V>, std::set<std::map<ComponentId, V>>> sections;
        for (const auto& t : rel) sections[restrict_to(t, rest)].insert(restrict_to(t, K));

        std::vector<ComponentId> kvec(K.begin(), K.end());
        bool splits = false;
        // unordered binary splits: the first member of K stays on the U side
        for (unsigned long long sub = 0; sub < (1ull << (kvec.size() - 1)); ++sub) {
            std::set<ComponentId> U{kvec[0]}, W;
            for (size_t b = 1; b < kvec.size(); ++b)
                ((sub >> (b - 1)) & 1 ? U : W).insert(kvec[b]);
            if (W.empty()) continue;

            bool all_factor = true;
            for (const auto& [fixed, sec] : sections) {
                std::set<std::map<ComponentId, V>> pu, pw;
                for (const auto& row : sec) {
                    pu.insert(restrict_to(row, U));
                    pw.insert(restrict_to(row, W));
                }
                if (sec.size() != pu.size() * pw.size()) {
                    all_factor = false;
                    break;
                }
                (void)fixed;
            }
            if (all_factor) {
                splits = true;
                break;
            }
        }
        if (!splits) structure.insert(K);
    }

    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<std::set<ComponentId>> members(structure.begin(), structure.end());
        for (size_t a = 0; a < members.size(); ++a) {
            for (size_t b = a + 1; b < members.size(); ++b) {
                std::set<ComponentId> meet;
                std::set_intersection(members[a].begin(), members[a].end(), members[b].begin(),
                                      members[b].end(), std::inserter(meet, meet.begin()));
                if (meet.empty()) continue;
                std::set<ComponentId> join;
                std::set_union(members[a].begin(), members[a].end(), members[b].begin(),
                               members[b].end(), std::inserter(join, join.begin()));
                if (structure.insert(join).second) changed = true;
            }
        }
    }
    return structure;
}

} // namespace subdyn
