#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "subdyn/dynamics.hpp"
#include "subdyn/errors.hpp"
#include "subdyn/families.hpp"
#include "subdyn/realize.hpp"

namespace subdyn {

// Finite grid bounds: instants 0..horizon, integer values in [-band, band].
struct GridParams {
    int horizon = 1;
    int band = 1;
};

inline StateId grid_point_id(int t, int a) {
    return nlohmann::json{{"a", a}, {"t", t}}.dump();
}

inline std::pair<int, int> parse_grid_point(const StateId& id) {
    auto j = nlohmann::json::parse(id);
    return {j.at("t").get<int>(), j.at("a").get<int>()};
}

inline StateId history_state_id(int t, const std::vector<int>& f) {
    nlohmann::json j;
    j["f"] = f;
    j["t"] = t;
    return j.dump();
}

inline std::pair<int, std::vector<int>> parse_history_state(const StateId& id) {
    auto j = nlohmann::json::parse(id);
    return {j.at("t").get<int>(), j.at("f").get<std::vector<int>>()};
}

inline ParamId history_param_id(const std::vector<int>& gamma) {
    return nlohmann::json(gamma).dump();
}

inline std::string partial_fn_id(const std::map<int, int>& fn) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : fn) j[std::to_string(k)] = v;
    return j.dump();
}

inline std::vector<std::vector<int>> value_sequences(int length, int band) {
    std::vector<std::vector<int>> out{{}};
    for (int step = 0; step < length; ++step) {
        std::vector<std::vector<int>> grown;
        grown.reserve(out.size() * (2 * band + 1));
        for (const auto& seq : out)
            for (int v = -band; v <= band; ++v) {
                auto next = seq;
                next.push_back(v);
                grown.push_back(std::move(next));
            }
        out = std::move(grown);
    }
    return out;
}

// Every partial function from {0..horizon-1} into the band.
inline std::set<std::map<int, int>> all_partial_grid_functions(const GridParams& g) {
    std::set<std::map<int, int>> out{{}};
    for (int t = 0; t < g.horizon; ++t) {
        std::set<std::map<int, int>> grown;
        for (const auto& fn : out) {
            grown.insert(fn);
            for (int v = -g.band; v <= g.band; ++v) {
                auto next = fn;
                next[t] = v;
                grown.insert(std::move(next));
            }
        }
        out = std::move(grown);
    }
    return out;
}

inline FiniteCategory build_integer_interval_poset(int lo, int hi) {
    FiniteCategory cat;
    cat.name = "T_" + std::to_string(lo) + ".." + std::to_string(hi);
    auto arrow_id = [](int i, int j) { return std::to_string(i) + "->" + std::to_string(j); };
    for (int i = lo; i <= hi; ++i) {
        cat.objects.insert(std::to_string(i));
        cat.identities[std::to_string(i)] = arrow_id(i, i);
        for (int j = i; j <= hi; ++j)
            cat.arrows[arrow_id(i, j)] = {arrow_id(i, j), std::to_string(i), std::to_string(j)};
    }
    for (int i = lo; i <= hi; ++i)
        for (int j = i; j <= hi; ++j)
            for (int k = j; k <= hi; ++k)
                cat.compose_table[{arrow_id(j, k), arrow_id(i, j)}] = arrow_id(i, k);
    return cat;
}

// The two-path diamond with a pinch at V: both paths S -> T commute on s,
// but the V path forgets which start it came from.
inline OpenDynamics build_diamond_open_dynamics() {
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

// A main line over instants -n..n plus a branch copy over 0..n that nothing
// feeds into: deterministic, yet the branch admits no realization.
inline OpenDynamics build_two_branch_line(int n) {
    MultiDynamics dyn;
    dyn.motor = build_integer_interval_poset(-n, n);
    dyn.params = {"*"};
    auto main_state = [](int i) { return "m(" + std::to_string(i) + ")"; };
    auto branch_state = [](int i) { return "b(" + std::to_string(i) + ")"; };
    for (int i = -n; i <= n; ++i) {
        dyn.states[std::to_string(i)].insert(main_state(i));
        if (i >= 0) dyn.states[std::to_string(i)].insert(branch_state(i));
    }
    for (int i = -n; i <= n; ++i)
        for (int j = i; j <= n; ++j) {
            ArrowId e = std::to_string(i) + "->" + std::to_string(j);
            set_image(dyn, e, "*", main_state(i), {main_state(j)});
            if (i >= 0) set_image(dyn, e, "*", branch_state(i), {branch_state(j)});
        }

    OpenDynamics od{dyn, build_essential_clock_singleton(dyn.motor), {}};
    for (const auto& [obj, sts] : dyn.states)
        for (const auto& x : sts) od.scansion[x] = obj;
    return od;
}

// Band walk: one step of duration d moves the value by at most d.
inline OpenDynamics build_grid_source(const GridParams& g) {
    MultiDynamics dyn;
    dyn.motor = build_interval_poset(g.horizon);
    dyn.params = {"*"};
    for (int t = 0; t <= g.horizon; ++t)
        for (int a = -g.band; a <= g.band; ++a)
            dyn.states[std::to_string(t)].insert(grid_point_id(t, a));
    for (int i = 0; i <= g.horizon; ++i)
        for (int j = i; j <= g.horizon; ++j) {
            ArrowId e = std::to_string(i) + "->" + std::to_string(j);
            int d = j - i;
            for (int a = -g.band; a <= g.band; ++a) {
                std::set<StateId> img;
                for (int b = std::max(a - d, -g.band); b <= std::min(a + d, g.band); ++b)
                    img.insert(grid_point_id(j, b));
                set_image(dyn, e, "*", grid_point_id(i, a), std::move(img));
            }
        }

    OpenDynamics od{dyn, build_essential_clock_singleton(dyn.motor), {}};
    for (int t = 0; t <= g.horizon; ++t)
        for (int a = -g.band; a <= g.band; ++a) od.scansion[grid_point_id(t, a)] = std::to_string(t);
    return od;
}

// Recording walk: a state carries the full value sequence below its instant
// and a step appends the parameter's values over the crossed span. The
// parameter must reach far enough, or the step is out of play.
inline OpenDynamics build_grid_history(const GridParams& g) {
    MultiDynamics dyn;
    dyn.motor = build_interval_poset(g.horizon);

    std::vector<std::vector<std::vector<int>>> seqs(g.horizon + 1);
    for (int len = 0; len <= g.horizon; ++len) {
        seqs[len] = value_sequences(len, g.band);
        for (const auto& gamma : seqs[len]) dyn.params.insert(history_param_id(gamma));
    }
    for (int t = 0; t <= g.horizon; ++t)
        for (const auto& f : seqs[t]) dyn.states[std::to_string(t)].insert(history_state_id(t, f));

    for (int len = 0; len <= g.horizon; ++len) {
        for (const auto& gamma : seqs[len]) {
            ParamId mu = history_param_id(gamma);
            for (int i = 0; i <= g.horizon; ++i)
                for (int j = i; j <= g.horizon; ++j) {
                    ArrowId e = std::to_string(i) + "->" + std::to_string(j);
                    if (i == j) {
                        for (const auto& f : seqs[i])
                            set_image(dyn, e, mu, history_state_id(i, f), {history_state_id(i, f)});
                        continue;
                    }
                    if (len < j) continue;
                    for (const auto& f : seqs[i]) {
                        auto extended = f;
                        for (int t = i; t < j; ++t) extended.push_back(gamma[t]);
                        set_image(dyn, e, mu, history_state_id(i, f),
                                  {history_state_id(j, extended)});
                    }
                }
        }
    }

    OpenDynamics od{dyn, build_essential_clock_singleton(dyn.motor), {}};
    for (int t = 0; t <= g.horizon; ++t)
        for (const auto& f : seqs[t]) od.scansion[history_state_id(t, f)] = std::to_string(t);
    return od;
}

// Timeless filter: over the one-object motor, the parameter keeps exactly
// the functions that agree with it wherever both are defined.
inline OpenDynamics build_grid_timeless(const std::set<std::map<int, int>>& fn_set) {
    MultiDynamics dyn;
    dyn.motor = build_interval_poset(0);
    for (const auto& fn : fn_set) {
        dyn.params.insert(partial_fn_id(fn));
        dyn.states["0"].insert(partial_fn_id(fn));
    }
    auto compatible = [](const std::map<int, int>& f, const std::map<int, int>& w) {
        for (const auto& [k, v] : f) {
            auto it = w.find(k);
            if (it != w.end() && it->second != v) return false;
        }
        return true;
    };
    for (const auto& omega : fn_set)
        for (const auto& fn : fn_set)
            if (compatible(fn, omega))
                set_image(dyn, "0->0", partial_fn_id(omega), partial_fn_id(fn),
                          {partial_fn_id(fn)});

    OpenDynamics od{dyn, build_essential_clock_singleton(dyn.motor), {}};
    for (const auto& s : dyn.states["0"]) od.scansion[s] = "0";
    return od;
}

// Three coupled views of one walk: the walk itself (Y), its running record
// (H, the chief), and a timeless constraint holder (W). A tuple pairs a walk
// with the record of all but its last value and any function compatible
// with that record.
inline InteractiveFamily build_grid_why_family(const GridParams& g, size_t limit = 100000) {
    InteractiveFamily fam;
    fam.index = {"H", "W", "Y"};
    fam.chief = "H";

    OpenDynamics source = build_grid_source(g);
    OpenDynamics history = build_grid_history(g);
    std::set<std::map<int, int>> fns = all_partial_grid_functions(g);
    OpenDynamics timeless = build_grid_timeless(fns);
    fam.components.emplace("H", history);
    fam.components.emplace("W", timeless);
    fam.components.emplace("Y", source);

    Synchronization to_source;
    Synchronization to_timeless;
    for (int t = 0; t <= g.horizon; ++t) {
        to_source.obj_map[std::to_string(t)] = std::to_string(t);
        to_source.instant_map[std::to_string(t)] = std::to_string(t);
        to_timeless.obj_map[std::to_string(t)] = "0";
        to_timeless.instant_map[std::to_string(t)] = "0";
    }
    fam.syncs.emplace("Y", to_source);
    fam.syncs.emplace("W", to_timeless);

    fam.interaction.index = fam.index;
    auto compatible = [](const std::map<int, int>& f, const std::map<int, int>& w) {
        for (const auto& [k, v] : f) {
            auto it = w.find(k);
            if (it != w.end() && it->second != v) return false;
        }
        return true;
    };

    size_t count = 0;
    for (const auto& walk : enumerate_realizations(source, std::optional<ParamId>("*"), limit)) {
        if (walk.assignment.empty()) continue;
        int top = 0;
        std::vector<int> values(walk.assignment.size());
        for (const auto& [inst, sid] : walk.assignment) {
            auto [t, a] = parse_grid_point(sid);
            values[t] = a;
            top = std::max(top, t);
        }
        std::vector<int> gamma(values.begin(), values.begin() + top);
        ParamId gamma_id = history_param_id(gamma);

        for (int m = 0; m <= top; ++m) {
            TupleEntry h_entry;
            h_entry.param = gamma_id;
            std::map<int, int> omega;
            for (int t = 0; t <= m; ++t) {
                std::vector<int> prefix(gamma.begin(), gamma.begin() + t);
                h_entry.real[std::to_string(t)] = history_state_id(t, prefix);
                if (t < m) omega[t] = gamma[t];
            }
            TupleEntry w_entry;
            w_entry.param = partial_fn_id(omega);
            for (const auto& fn : fns) {
                if (!compatible(fn, omega)) continue;
                w_entry.real = {{"0", partial_fn_id(fn)}};
                if (++count > limit)
                    raise(ErrorCode::LimitExceeded,
                          "interaction tuple count exceeds " + std::to_string(limit));
                fam.interaction.tuples.insert({{"H", h_entry},
                                               {"W", w_entry},
                                               {"Y", {"*", walk.assignment}}});
            }
        }
    }
    return fam;
}

} // namespace subdyn
