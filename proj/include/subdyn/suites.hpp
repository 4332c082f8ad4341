#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "subdyn/corpus.hpp"
#include "subdyn/dynamics.hpp"
#include "subdyn/families.hpp"
#include "subdyn/generate.hpp"
#include "subdyn/interact.hpp"
#include "subdyn/realize.hpp"

// Seeded random instances and the property suites behind the check command.
// Every generator draws from a caller supplied engine, so a fixed seed
// reproduces the exact run.

namespace subdyn {

struct RandomBounds {
    int max_components = 3;
    int max_objects = 3;
    int max_states = 3; // per object
    int max_params = 2;
    int max_tuples = 6;
};

struct SuiteResult {
    size_t cases = 0;
    std::vector<std::string> failures;

    bool ok() const { return failures.empty(); }
};

namespace rnd {

inline int pick(std::mt19937& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline bool chance(std::mt19937& rng, double p) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

} // namespace rnd

// Random finite poset presented as a category: objects on a linear index,
// a random relation closed under transitivity, one arrow per related pair.
inline FiniteCategory random_poset(std::mt19937& rng, int max_objects) {
    int k = rnd::pick(rng, 1, max_objects);
    std::vector<std::vector<bool>> le(k, std::vector<bool>(k, false));
    for (int i = 0; i < k; ++i) le[i][i] = true;
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) le[i][j] = rnd::chance(rng, 0.5);
    for (int m = 0; m < k; ++m)
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
                if (le[i][m] && le[m][j]) le[i][j] = true;

    FiniteCategory cat;
    uint64_t shape = 0;
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) shape = shape * 2 + (le[i][j] ? 1 : 0);
    cat.name = "P" + std::to_string(k) + "." + std::to_string(shape);
    auto obj = [](int i) { return "o" + std::to_string(i); };
    auto arrow_id = [&](int i, int j) { return obj(i) + "->" + obj(j); };
    for (int i = 0; i < k; ++i) {
        cat.objects.insert(obj(i));
        cat.identities[obj(i)] = arrow_id(i, i);
        for (int j = 0; j < k; ++j)
            if (le[i][j]) cat.arrows[arrow_id(i, j)] = {arrow_id(i, j), obj(i), obj(j)};
    }
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            for (int m = 0; m < k; ++m)
                if (le[i][j] && le[j][m])
                    cat.compose_table[{arrow_id(j, m), arrow_id(i, j)}] = arrow_id(i, m);
    return cat;
}

// Random transitions shrunk to the sub-functorial fixpoint: identity images
// keep at most the state itself, composite images lose whatever the chain
// of their factors cannot reach.
inline MultiDynamics random_subfunctorial_dynamics(std::mt19937& rng, const FiniteCategory& motor,
                                                   int max_states, int max_params) {
    MultiDynamics dyn;
    dyn.motor = motor;
    int params = rnd::pick(rng, 1, max_params);
    for (int p = 0; p < params; ++p) dyn.params.insert("p" + std::to_string(p));
    for (const auto& obj : motor.objects) {
        int n = rnd::pick(rng, 1, max_states);
        for (int s = 0; s < n; ++s) dyn.states[obj].insert(obj + ".s" + std::to_string(s));
    }

    for (const auto& [id, a] : motor.arrows) {
        bool is_id = motor.identities.at(a.dom) == id && a.dom == a.cod;
        for (const auto& mu : dyn.params) {
            for (const auto& s : dyn.states.at(a.dom)) {
                if (is_id) {
                    if (rnd::chance(rng, 0.85)) set_image(dyn, id, mu, s, {s});
                    continue;
                }
                if (!rnd::chance(rng, 0.8)) continue;
                std::set<StateId> img;
                std::vector<StateId> pool(dyn.states.at(a.cod).begin(),
                                          dyn.states.at(a.cod).end());
                int take = rnd::pick(rng, 1, std::min<int>(2, pool.size()));
                for (int t = 0; t < take; ++t) img.insert(pool[rnd::pick(rng, 0, pool.size() - 1)]);
                set_image(dyn, id, mu, s, std::move(img));
            }
        }
    }

    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& [pair, gf] : motor.compose_table) {
            const auto& [g, f] = pair;
            const ObjectId& src = motor.arrow(f).dom;
            for (const auto& mu : dyn.params) {
                for (const auto& s : dyn.states.at(src)) {
                    const auto& direct = image(dyn, gf, mu, s);
                    if (direct.empty()) continue;
                    std::set<StateId> through;
                    for (const auto& x : image(dyn, f, mu, s)) {
                        const auto& step = image(dyn, g, mu, x);
                        through.insert(step.begin(), step.end());
                    }
                    std::set<StateId> kept;
                    for (const auto& x : direct)
                        if (through.count(x)) kept.insert(x);
                    if (kept != direct) {
                        set_image(dyn, gf, mu, s, std::move(kept));
                        changed = true;
                    }
                }
            }
        }
    }
    return dyn;
}

inline OpenDynamics random_open_dynamics(std::mt19937& rng, const RandomBounds& b) {
    for (int attempt = 0; attempt < 200; ++attempt) {
        FiniteCategory motor = random_poset(rng, b.max_objects);
        MultiDynamics dyn = random_subfunctorial_dynamics(rng, motor, b.max_states, b.max_params);
        OpenDynamics od{dyn, build_essential_clock_singleton(motor), {}};
        for (const auto& [obj, sts] : dyn.states)
            for (const auto& s : sts) od.scansion[s] = obj;
        if (is_efficient(od)) return od;
    }
    raise(ErrorCode::LimitExceeded, "no efficient random dynamics after 200 attempts");
}

// Chief instants map onto component instants; with essential singleton
// clocks both sides are named by their objects. A constant map is always
// monotone, a random one is kept when validation agrees.
inline Synchronization random_synchronization(std::mt19937& rng, const Clock& chief,
                                              const Clock& comp) {
    std::vector<ObjectId> targets(comp.dyn.motor.objects.begin(), comp.dyn.motor.objects.end());
    for (int attempt = 0; attempt < 10; ++attempt) {
        Synchronization sync;
        for (const auto& obj : chief.dyn.motor.objects) {
            const ObjectId& to = targets[rnd::pick(rng, 0, targets.size() - 1)];
            sync.obj_map[obj] = to;
            sync.instant_map[obj] = to;
        }
        if (validate_synchronization(chief, comp, sync).ok()) return sync;
    }
    Synchronization constant;
    for (const auto& obj : chief.dyn.motor.objects) {
        constant.obj_map[obj] = targets.front();
        constant.instant_map[obj] = targets.front();
    }
    return constant;
}

// A valid family drawn at random: efficient components, a chief, monotone
// synchronizations, and tuples assembled from genuine realizations.
inline InteractiveFamily random_family(std::mt19937& rng, const RandomBounds& b = {}) {
    static const std::vector<ComponentId> names{"A", "B", "C", "D", "E"};
    InteractiveFamily fam;
    int k = rnd::pick(rng, 1, b.max_components);
    for (int i = 0; i < k; ++i) fam.index.push_back(names.at(i));
    fam.chief = fam.index[rnd::pick(rng, 0, k - 1)];

    std::map<ComponentId, std::vector<std::pair<ParamId, ExternalPart>>> coherent;
    for (const auto& i : fam.index) {
        OpenDynamics od = random_open_dynamics(rng, b);
        for (const auto& r : enumerate_realizations(od))
            if (!r.assignment.empty()) coherent[i].push_back({r.param, r.assignment});
        fam.components.emplace(i, std::move(od));
    }
    for (const auto& i : fam.index)
        if (i != fam.chief)
            fam.syncs.emplace(i, random_synchronization(rng, fam.components.at(fam.chief).clock,
                                                        fam.components.at(i).clock));

    fam.interaction.index = fam.index;
    int tuples = rnd::pick(rng, 1, b.max_tuples);
    for (int t = 0; t < tuples; ++t) {
        InteractionTuple tuple;
        for (const auto& i : fam.index) {
            const auto& pool = coherent.at(i);
            const auto& [mu, part] = pool[rnd::pick(rng, 0, pool.size() - 1)];
            tuple[i] = {mu, part};
        }
        fam.interaction.tuples.insert(std::move(tuple));
    }
    return fam;
}

// Deterministic dynamics over a chain, with composite steps defined by
// walking the unit steps. Deterministic and sub-functorial by construction;
// the determinism suite then demands functoriality.
inline MultiDynamics random_deterministic_chain(std::mt19937& rng, int max_len, int max_states,
                                                int max_params) {
    int len = rnd::pick(rng, 1, max_len);
    MultiDynamics dyn;
    dyn.motor = build_interval_poset(len);
    int params = rnd::pick(rng, 1, max_params);
    for (int p = 0; p < params; ++p) dyn.params.insert("p" + std::to_string(p));
    std::vector<std::vector<StateId>> states(len + 1);
    for (int t = 0; t <= len; ++t) {
        int n = rnd::pick(rng, 1, max_states);
        for (int s = 0; s < n; ++s) {
            states[t].push_back(std::to_string(t) + ".s" + std::to_string(s));
            dyn.states[std::to_string(t)].insert(states[t].back());
        }
    }
    for (const auto& mu : dyn.params) {
        std::map<StateId, StateId> step; // union of all unit steps
        for (int t = 0; t < len; ++t)
            for (const auto& s : states[t])
                step[s] = states[t + 1][rnd::pick(rng, 0, states[t + 1].size() - 1)];
        for (int i = 0; i <= len; ++i)
            for (int j = i; j <= len; ++j) {
                ArrowId e = std::to_string(i) + "->" + std::to_string(j);
                for (const auto& s : states[i]) {
                    StateId x = s;
                    for (int t = i; t < j; ++t) x = step.at(x);
                    set_image(dyn, e, mu, s, {x});
                }
            }
    }
    return dyn;
}

// ---- suites ----

inline SuiteResult suite_stability(uint64_t seed, size_t cases, bool inject_defect = false) {
    std::mt19937 rng(static_cast<uint32_t>(seed));
    SuiteResult result;
    for (size_t c = 0; c < cases; ++c) {
        ++result.cases;
        InteractiveFamily fam = random_family(rng);
        GeneratedDynamics gen = generate_primary(fam);
        if (inject_defect && c == 0)
            gen.result.dyn.states[*gen.result.dyn.motor.objects.begin()].insert("defect");
        ValidationReport report = validate_open_dynamics(gen.result);
        if (!report.ok()) {
            result.failures.push_back("case " + std::to_string(c) + ": generated dynamics invalid: " +
                                      report.issues.front().detail);
            continue;
        }
        CheckResult sub = is_subfunctorial(gen.result.dyn);
        if (!sub.ok)
            result.failures.push_back("case " + std::to_string(c) +
                                      ": generated dynamics is not sub-functorial: " +
                                      (sub.witness ? sub.witness->detail : std::string()));
    }
    return result;
}

inline SuiteResult suite_quotient(uint64_t seed, size_t cases, bool inject_defect = false) {
    std::mt19937 rng(static_cast<uint32_t>(seed) + 1);
    SuiteResult result;
    for (size_t c = 0; c < cases; ++c) {
        ++result.cases;
        FiniteCategory motor = random_poset(rng, 3);
        MultiDynamics dyn = random_subfunctorial_dynamics(rng, motor, 3, 3);

        // Random partition of the parameters into one to |params| blocks.
        std::vector<ParamId> params(dyn.params.begin(), dyn.params.end());
        int blocks = rnd::pick(rng, 1, static_cast<int>(params.size()));
        std::map<int, std::set<ParamId>> grouped;
        for (size_t p = 0; p < params.size(); ++p)
            grouped[p == 0 ? 0 : rnd::pick(rng, 0, blocks - 1)].insert(params[p]);
        std::vector<std::set<ParamId>> partition;
        for (auto& [slot, members] : grouped) partition.push_back(std::move(members));

        MultiDynamics pooled = quotient_parameters(dyn, partition);
        if (inject_defect && c == 0) {
            const ObjectId& obj = *pooled.motor.objects.begin();
            const StateId& s = *pooled.states.at(obj).begin();
            set_image(pooled, pooled.motor.identities.at(obj), *pooled.params.begin(), s,
                      {s, "defect"});
        }
        CheckResult sub = is_subfunctorial(pooled);
        if (!sub.ok)
            result.failures.push_back("case " + std::to_string(c) +
                                      ": pooled dynamics is not sub-functorial: " +
                                      (sub.witness ? sub.witness->detail : std::string()));
    }
    return result;
}

inline SuiteResult suite_determinism(uint64_t seed, size_t cases, bool inject_defect = false) {
    std::mt19937 rng(static_cast<uint32_t>(seed) + 2);
    SuiteResult result;
    for (size_t c = 0; c < cases; ++c) {
        ++result.cases;
        MultiDynamics dyn = random_deterministic_chain(rng, 3, 3, 2);
        if (inject_defect && c == 0) {
            // Reroute one composite away from its chain value.
            for (auto& [key, per_state] : dyn.transitions) {
                const Arrow& a = dyn.motor.arrow(key.first);
                if (a.dom == "0" && a.cod == std::to_string(dyn.motor.objects.size() - 1) &&
                    a.dom != a.cod) {
                    auto& img = per_state.begin()->second;
                    img = {per_state.begin()->first};
                    break;
                }
            }
        }
        if (determinism_class(dyn) != DeterminismClass::Deterministic) {
            result.failures.push_back("case " + std::to_string(c) + ": chain sample not deterministic");
            continue;
        }
        CheckResult sub = is_subfunctorial(dyn);
        if (!sub.ok) {
            result.failures.push_back("case " + std::to_string(c) + ": chain sample not sub-functorial: " +
                                      (sub.witness ? sub.witness->detail : std::string()));
            continue;
        }
        CheckResult fun = is_functorial(dyn);
        if (!fun.ok)
            result.failures.push_back("case " + std::to_string(c) +
                                      ": deterministic sub-functorial dynamics not functorial: " +
                                      (fun.witness ? fun.witness->detail : std::string()));
    }
    return result;
}

inline SuiteResult suite_normality(uint64_t seed, size_t cases, bool inject_defect = false) {
    std::mt19937 rng(static_cast<uint32_t>(seed) + 3);
    SuiteResult result;
    RandomBounds small{2, 2, 2, 1, 6};
    for (size_t c = 0; c < cases; ++c) {
        ++result.cases;
        // Keep the full entry space tiny so the reference decision is cheap.
        InteractiveFamily fam;
        ComponentContexts ctx;
        unsigned long long space = 0;
        for (int attempt = 0; attempt < 200; ++attempt) {
            fam = random_family(rng, small);
            ctx = compute_contexts(fam.components);
            space = 1;
            for (const auto& i : fam.interaction.index)
                space *= ctx.star_all.at(i).size() * ctx.params.at(i).size();
            if (space <= 12) break;
            space = 0;
        }
        if (space == 0) {
            result.failures.push_back("case " + std::to_string(c) + ": no small interaction found");
            continue;
        }
        bool fast = is_normal(fam.interaction, ctx);
        bool slow = is_normal_bruteforce(fam.interaction, ctx);
        if (inject_defect && c == 0) slow = !slow;
        if (fast != slow)
            result.failures.push_back("case " + std::to_string(c) +
                                      ": normality decision differs from the reference");
    }
    return result;
}

inline SuiteResult suite_oracle(uint64_t seed, size_t cases, bool inject_defect = false) {
    (void)seed;
    (void)cases;
    SuiteResult result;
    auto expect = [&](bool okay, const std::string& what) {
        ++result.cases;
        if (!okay) result.failures.push_back(what);
    };

    OpenDynamics diamond = build_diamond_open_dynamics();
    GeneratedDynamics gen = generate_primary(canonical_family(diamond));
    auto tid = [](const StateId& s) { return tuple_id({{"0", s}}); };
    const ParamId pid = tuple_id(std::map<ComponentId, std::string>{{"0", "*"}});
    size_t expected_svt = inject_defect ? 1 : 0;
    expect(image(gen.result.dyn, "SVT", pid, tid("s'")).size() == expected_svt,
           "pinched path image through the forgetful branch");
    expect(image(gen.result.dyn, "SV", pid, tid("s'")) == std::set<StateId>{tid("v")},
           "first leg of the forgetful branch");
    expect(image(gen.result.dyn, "VT", pid, tid("v")) == std::set<StateId>{tid("t")},
           "second leg of the forgetful branch");

    expect(!is_regular(build_two_branch_line(3)).ok, "detached branch must break regularity");

    expect(enumerate_realizations(build_grid_source({2, 1})).size() == 28,
           "band walk realization count");
    expect(enumerate_realizations(build_grid_history({2, 1}),
                                  std::optional<ParamId>(history_param_id({0, 1})))
                   .size() == 4,
           "recording walk realization count");

    InteractiveFamily why = build_grid_why_family({1, 1});
    expect(why.interaction.tuples.size() == 54, "coupled grid tuple count");
    ComponentContexts ctx = compute_contexts(why.components);
    expect(is_concrete(why.interaction, ctx), "coupled grid interaction must be concrete");
    return result;
}

inline SuiteResult run_suite(const std::string& name, uint64_t seed, size_t cases,
                             bool inject_defect = false) {
    if (name == "stability") return suite_stability(seed, cases, inject_defect);
    if (name == "quotient") return suite_quotient(seed, cases, inject_defect);
    if (name == "determinism") return suite_determinism(seed, cases, inject_defect);
    if (name == "normality") return suite_normality(seed, cases, inject_defect);
    if (name == "oracle") return suite_oracle(seed, cases, inject_defect);
    raise(ErrorCode::BadDocument, "unknown suite '" + name + "'");
}

} // namespace subdyn
