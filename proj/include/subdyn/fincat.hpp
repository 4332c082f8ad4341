#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "subdyn/errors.hpp"

namespace subdyn {

using ObjectId = std::string;
using ArrowId = std::string;

struct Arrow {
    ArrowId id;
    ObjectId dom;
    ObjectId cod;

    bool operator==(const Arrow&) const = default;
};

struct DirectedGraph {
    std::set<ObjectId> vertices;
    std::map<ArrowId, Arrow> edges;

    bool operator==(const DirectedGraph&) const = default;
};

// A finite category presented by explicit data: the compose table is keyed
// (g, f) for composites g after f and must be defined exactly on the
// composable pairs.
struct FiniteCategory {
    std::string name;
    std::set<ObjectId> objects;
    std::map<ArrowId, Arrow> arrows;
    std::map<ObjectId, ArrowId> identities;
    std::map<std::pair<ArrowId, ArrowId>, ArrowId> compose_table;

    bool operator==(const FiniteCategory&) const = default;

    bool has_arrow(const ArrowId& a) const { return arrows.count(a) != 0; }

    const Arrow& arrow(const ArrowId& a) const { return arrows.at(a); }

    bool is_identity(const ArrowId& a) const {
        auto it = arrows.find(a);
        if (it == arrows.end()) return false;
        auto id = identities.find(it->second.dom);
        return id != identities.end() && id->second == a;
    }

    bool composable(const ArrowId& g, const ArrowId& f) const {
        return has_arrow(g) && has_arrow(f) && arrow(g).dom == arrow(f).cod;
    }

    const ArrowId& compose(const ArrowId& g, const ArrowId& f) const {
        return compose_table.at({g, f});
    }
};

struct ValidationIssue {
    std::string rule;
    std::string detail;

    bool operator==(const ValidationIssue&) const = default;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;

    bool ok() const { return issues.empty(); }

    void add(std::string rule, std::string detail) {
        issues.push_back({std::move(rule), std::move(detail)});
    }
};

inline ValidationReport validate_category(const FiniteCategory& cat) {
    ValidationReport report;

    for (const auto& [id, a] : cat.arrows) {
        if (a.id != id)
            report.add("arrow-typing", "arrow keyed '" + id + "' carries id '" + a.id + "'");
        if (!cat.objects.count(a.dom))
            report.add("arrow-typing", "arrow '" + id + "' has unknown domain '" + a.dom + "'");
        if (!cat.objects.count(a.cod))
            report.add("arrow-typing", "arrow '" + id + "' has unknown codomain '" + a.cod + "'");
    }

    for (const auto& obj : cat.objects) {
        auto it = cat.identities.find(obj);
        if (it == cat.identities.end()) {
            report.add("identity-missing", "object '" + obj + "' has no identity arrow");
            continue;
        }
        auto ar = cat.arrows.find(it->second);
        if (ar == cat.arrows.end()) {
            report.add("identity-typing",
                       "identity of '" + obj + "' names unknown arrow '" + it->second + "'");
        } else if (ar->second.dom != obj || ar->second.cod != obj) {
            report.add("identity-typing",
                       "identity of '" + obj + "' is not an endo-arrow on it");
        }
    }
    for (const auto& [obj, id] : cat.identities) {
        if (!cat.objects.count(obj))
            report.add("identity-typing", "identity table names unknown object '" + obj + "'");
        (void)id;
    }

    // The compose table must cover the composable pairs, nothing else, with
    // correctly typed composites.
    for (const auto& [gid, g] : cat.arrows) {
        for (const auto& [fid, f] : cat.arrows) {
            bool comp = g.dom == f.cod;
            auto it = cat.compose_table.find({gid, fid});
            if (comp && it == cat.compose_table.end()) {
                report.add("compose-domain",
                           "no composite for '" + gid + "' after '" + fid + "'");
            } else if (!comp && it != cat.compose_table.end()) {
                report.add("compose-domain",
                           "composite given for non-composable pair ('" + gid + "', '" + fid + "')");
            } else if (comp) {
                auto gf = cat.arrows.find(it->second);
                if (gf == cat.arrows.end()) {
                    report.add("compose-typing",
                               "composite of ('" + gid + "', '" + fid + "') names unknown arrow '" +
                                   it->second + "'");
                } else if (gf->second.dom != f.dom || gf->second.cod != g.cod) {
                    report.add("compose-typing",
                               "composite '" + it->second + "' of ('" + gid + "', '" + fid +
                                   "') is not typed " + f.dom + " -> " + g.cod);
                }
            }
        }
    }
    for (const auto& [pair, res] : cat.compose_table) {
        if (!cat.has_arrow(pair.first) || !cat.has_arrow(pair.second))
            report.add("compose-domain",
                       "compose table names unknown arrow in pair ('" + pair.first + "', '" +
                           pair.second + "')");
        (void)res;
    }
    if (!report.ok()) return report; // laws below assume well-typed data

    for (const auto& [fid, f] : cat.arrows) {
        const ArrowId& idd = cat.identities.at(f.dom);
        const ArrowId& idc = cat.identities.at(f.cod);
        if (cat.compose(fid, idd) != fid)
            report.add("identity-law", "'" + fid + "' after identity is '" +
                                           cat.compose(fid, idd) + "'");
        if (cat.compose(idc, fid) != fid)
            report.add("identity-law", "identity after '" + fid + "' is '" +
                                           cat.compose(idc, fid) + "'");
    }

    for (const auto& [hid, h] : cat.arrows) {
        for (const auto& [gid, g] : cat.arrows) {
            if (h.dom != g.cod) continue;
            for (const auto& [fid, f] : cat.arrows) {
                if (g.dom != f.cod) continue;
                const ArrowId& left = cat.compose(cat.compose(hid, gid), fid);
                const ArrowId& right = cat.compose(hid, cat.compose(gid, fid));
                if (left != right)
                    report.add("associativity",
                               "('" + hid + "' o '" + gid + "') o '" + fid + "' = '" + left +
                                   "' but '" + hid + "' o ('" + gid + "' o '" + fid + "') = '" +
                                   right + "'");
            }
        }
    }

    return report;
}

inline DirectedGraph underlying_graph(const FiniteCategory& cat) {
    return DirectedGraph{cat.objects, cat.arrows};
}

// Total order on {0, ..., n} viewed as a category: one arrow i -> j per
// pair i <= j.
inline FiniteCategory build_interval_poset(int n) {
    FiniteCategory cat;
    cat.name = n == 0 ? "1" : "T_" + std::to_string(n);
    for (int i = 0; i <= n; ++i) {
        ObjectId oi = std::to_string(i);
        cat.objects.insert(oi);
        for (int j = i; j <= n; ++j) {
            ArrowId a = oi + "->" + std::to_string(j);
            cat.arrows[a] = {a, oi, std::to_string(j)};
        }
        cat.identities[oi] = oi + "->" + oi;
    }
    for (int i = 0; i <= n; ++i)
        for (int j = i; j <= n; ++j)
            for (int k = j; k <= n; ++k) {
                ArrowId f = std::to_string(i) + "->" + std::to_string(j);
                ArrowId g = std::to_string(j) + "->" + std::to_string(k);
                cat.compose_table[{g, f}] = std::to_string(i) + "->" + std::to_string(k);
            }
    return cat;
}

// Commutative-square shape with the square deliberately NOT commuting:
// two distinct composites S -> T, one through U and one through V.
inline FiniteCategory build_diamond_category() {
    FiniteCategory cat;
    cat.name = "C";
    cat.objects = {"S", "U", "V", "T"};
    auto add = [&](const ArrowId& id, const ObjectId& d, const ObjectId& c) {
        cat.arrows[id] = {id, d, c};
    };
    add("Id_S", "S", "S");
    add("Id_U", "U", "U");
    add("Id_V", "V", "V");
    add("Id_T", "T", "T");
    add("SU", "S", "U");
    add("SV", "S", "V");
    add("UT", "U", "T");
    add("VT", "V", "T");
    add("SUT", "S", "T");
    add("SVT", "S", "T");
    cat.identities = {{"S", "Id_S"}, {"U", "Id_U"}, {"V", "Id_V"}, {"T", "Id_T"}};

    cat.compose_table[{"UT", "SU"}] = "SUT";
    cat.compose_table[{"VT", "SV"}] = "SVT";
    for (const auto& [id, a] : cat.arrows) {
        cat.compose_table[{id, cat.identities[a.dom]}] = id;
        cat.compose_table[{cat.identities[a.cod], id}] = id;
    }
    return cat;
}

} // namespace subdyn
