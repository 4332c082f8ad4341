#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "subdyn/corpus.hpp"
#include "subdyn/generate.hpp"
#include "subdyn/serialize.hpp"
#include "subdyn/suites.hpp"

using namespace subdyn;

namespace {

// 0 success, 1 input or validation error, 2 property or budget failure.
int exit_code_for(ErrorCode c) {
    return c == ErrorCode::LimitExceeded || c == ErrorCode::CapExceeded ? 2 : 1;
}

size_t default_limit() {
    if (const char* s = std::getenv("SUBDYN_LIMIT")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(s, &end, 10);
        if (end && *end == '\0' && v > 0) return static_cast<size_t>(v);
    }
    return 100000;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::BadDocument, "cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_output(const std::string& out_path, const std::string& bytes) {
    if (out_path.empty()) {
        std::cout << bytes;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) raise(ErrorCode::BadDocument, "cannot write '" + out_path + "'");
    out << bytes;
}

std::string structure_line(const std::set<std::set<ComponentId>>& structure) {
    std::string out;
    for (const auto& K : structure) {
        out += "{";
        bool first = true;
        for (const auto& i : K) {
            if (!first) out += "|";
            out += i;
            first = false;
        }
        out += "}";
    }
    return out;
}

FamilySpecDocument example_document(const std::string& name) {
    FamilySpecDocument doc;
    if (name == "diamond") {
        OpenDynamics od = build_diamond_open_dynamics();
        add_open_dynamics(doc, "diamond", od);
        for (const auto& r : enumerate_realizations(od)) add_realization(doc, "diamond", r);
    } else if (name == "two-branch-3") {
        add_open_dynamics(doc, "two-branch-3", build_two_branch_line(3));
    } else if (name == "grid-source-2-1") {
        add_open_dynamics(doc, "grid-source-2-1", build_grid_source({2, 1}));
    } else if (name == "grid-history-2-1") {
        add_open_dynamics(doc, "grid-history-2-1", build_grid_history({2, 1}));
    } else if (name == "grid-timeless-2-1") {
        add_open_dynamics(doc, "grid-timeless-2-1",
                          build_grid_timeless(all_partial_grid_functions({2, 1})));
    } else if (name == "grid-why-2-1") {
        add_family(doc, "grid-why-2-1", build_grid_why_family({2, 1}));
    } else {
        raise(ErrorCode::BadDocument, "unknown example '" + name + "'");
    }
    return doc;
}

const std::vector<std::string> kExampleNames{"diamond",          "two-branch-3",
                                             "grid-source-2-1",  "grid-history-2-1",
                                             "grid-timeless-2-1", "grid-why-2-1"};

int cmd_validate(const std::string& path) {
    FamilySpecDocument doc = parse_document(read_file(path));
    size_t limit = default_limit();
    std::vector<std::string> issues;
    auto collect = [&](const std::string& kind, const std::string& name,
                       const ValidationReport& report) {
        for (const auto& issue : report.issues)
            issues.push_back(kind + " '" + name + "': " + issue.rule + ": " + issue.detail);
    };

    for (const auto& [name, entry] : doc.dynamics)
        collect("dynamics", name, validate_multidynamics(entry.value));
    for (const auto& [name, entry] : doc.clocks)
        collect("clock", name, validate_clock(document_clock(doc, name)));
    for (const auto& [name, entry] : doc.open_dynamics)
        collect("open dynamics", name, validate_open_dynamics(document_open_dynamics(doc, name)));
    for (const auto& r : doc.realizations) {
        OpenDynamics od = document_open_dynamics(doc, r.open_dynamic);
        CheckResult check = is_realization(od, Realization{r.param, r.assignment});
        if (!check.ok)
            issues.push_back("realization of '" + r.open_dynamic + "': " +
                             (check.witness ? check.witness->rule + ": " + check.witness->detail
                                            : std::string("invalid")));
    }
    for (const auto& [name, entry] : doc.families)
        collect("family", name, validate_family(document_family(doc, name), limit));

    for (const auto& line : issues) std::cout << line << "\n";
    if (issues.empty()) {
        std::cout << "ok\n";
        return 0;
    }
    return 1;
}

int cmd_classify(const std::string& path, const std::string& dynamic) {
    FamilySpecDocument doc = parse_document(read_file(path));
    std::cout << classify(document_dynamics(doc, dynamic)).to_string() << "\n";
    return 0;
}

int cmd_realizations(const std::string& path, const std::string& dynamic,
                     const std::string& param, size_t limit) {
    FamilySpecDocument doc = parse_document(read_file(path));
    OpenDynamics od = document_open_dynamics(doc, dynamic);
    std::optional<ParamId> mu;
    if (!param.empty()) {
        if (!od.dyn.params.count(param))
            raise(ErrorCode::UnknownParam, "parameter '" + param + "'");
        mu = param;
    }
    auto rs = enumerate_realizations(od, mu, limit);
    std::sort(rs.begin(), rs.end());
    for (const auto& r : rs) {
        if (r.assignment.empty()) {
            std::cout << r.param << "\t(empty)\n";
        } else {
            std::cout << r.param << "\t" << nlohmann::json(r.assignment).dump() << "\n";
        }
    }
    std::cout << "total " << rs.size() << "\n";
    return 0;
}

int cmd_interaction_report(const std::string& path, const std::string& family) {
    FamilySpecDocument doc = parse_document(read_file(path));
    InteractiveFamily fam = document_family(doc, family);
    size_t limit = default_limit();
    ComponentContexts ctx = compute_contexts(fam.components, limit);
    const RelationRP& rel = fam.interaction;

    auto flag = [](bool b) { return b ? "true" : "false"; };
    std::cout << "tuples " << rel.tuples.size() << "\n";
    auto coherent = coherent_part(rel, ctx);
    std::cout << "coherent " << (coherent ? coherent->tuples.size() : 0) << "\n";
    std::cout << "interaction " << flag(is_interaction(rel, ctx)) << "\n";
    std::cout << "filtering " << flag(is_filtering(rel, ctx)) << "\n";
    std::cout << "operant " << flag(is_operant(rel, ctx)) << "\n";
    std::cout << "normal " << flag(is_normal(rel, ctx)) << "\n";
    std::cout << "determining " << flag(is_determining(rel)) << "\n";
    std::cout << "concrete " << flag(is_concrete(rel, ctx)) << "\n";

    std::set<ComponentId> index(rel.index.begin(), rel.index.end());
    std::cout << "connectivity_realizations "
              << structure_line(connectivity_structure(realization_relation(rel), index)) << "\n";
    std::cout << "connectivity_tuples "
              << structure_line(connectivity_structure(rel.tuples, index)) << "\n";
    return 0;
}

int cmd_generate(const std::string& path, const std::string& family, const std::string& mode,
                 const std::string& heaps_path, const std::string& out_path) {
    FamilySpecDocument doc = parse_document(read_file(path));
    InteractiveFamily fam = document_family(doc, family);
    size_t limit = default_limit();

    GeneratedDynamics gen;
    if (mode == "p") {
        gen = generate_primary(fam, limit);
    } else if (mode == "f") {
        gen = generate_functional(fam, limit);
    } else if (mode == "s") {
        gen = generate_souple(fam, limit);
    } else if (mode == "m") {
        gen = generate_mono(fam, limit);
    } else if (mode == "heaps") {
        if (heaps_path.empty())
            raise(ErrorCode::BadDocument, "mode heaps needs --heaps with a JSON file");
        nlohmann::json parsed;
        try {
            parsed = nlohmann::json::parse(read_file(heaps_path));
        } catch (const nlohmann::json::exception& e) {
            raise(ErrorCode::BadDocument, std::string("heaps file is not valid JSON: ") + e.what());
        }
        if (!parsed.is_object()) raise(ErrorCode::BadDocument, "heaps file must hold an object");
        std::map<ComponentId, std::set<ParamId>> heaps;
        for (const auto& [comp, arr] : parsed.items()) {
            if (!std::binary_search(fam.index.begin(), fam.index.end(), comp))
                raise(ErrorCode::BadDocument, "heap for unknown component '" + comp + "'");
            if (!arr.is_array()) raise(ErrorCode::BadDocument, "heap of '" + comp + "' must be an array");
            for (const auto& mu : arr) {
                if (!mu.is_string())
                    raise(ErrorCode::BadDocument, "heap of '" + comp + "' must hold strings");
                heaps[comp].insert(mu.get<std::string>());
            }
        }
        gen = generate_with_heaps(fam, heaps, limit);
    } else {
        raise(ErrorCode::BadDocument, "unknown mode '" + mode + "'");
    }

    FamilySpecDocument out;
    add_open_dynamics(out, family + ".generated", gen.result);
    nlohmann::json heaps_json = nlohmann::json::object();
    for (const auto& [comp, mus] : gen.heaps)
        heaps_json[comp] = std::vector<ParamId>(mus.begin(), mus.end());
    out.provenance = {{"family", family},
                      {"hash", family_fingerprint(fam)},
                      {"heaps", heaps_json},
                      {"mode", gen.mode}};
    write_output(out_path, emit_document(out));
    return 0;
}

int cmd_check(const std::string& path, const std::string& suite, uint64_t seed, size_t cases,
              bool inject_defect) {
    if (!path.empty()) {
        FamilySpecDocument doc = parse_document(read_file(path));
        (void)doc;
    }
    SuiteResult result = run_suite(suite, seed, cases, inject_defect);
    for (const auto& f : result.failures) std::cout << "failure: " << f << "\n";
    std::cout << "suite " << suite << ": " << result.cases << " cases, "
              << result.failures.size() << " failures\n";
    return result.ok() ? 0 : 2;
}

int cmd_reserialize(const std::string& path, const std::string& out_path) {
    write_output(out_path, emit_document(parse_document(read_file(path))));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite engine for open sub-functorial dynamics"};
    app.require_subcommand(1);

    std::string path, dynamic, param, family, mode = "p", heaps_path, out_path, suite, name;
    size_t limit = default_limit();
    uint64_t seed = 0;
    size_t cases = 100;
    bool inject_defect = false;

    CLI::App* validate = app.add_subcommand("validate", "run every structural validator on a document");
    validate->add_option("file", path)->required();

    CLI::App* classify_cmd = app.add_subcommand("classify", "print the classification tag of a dynamics");
    classify_cmd->add_option("file", path)->required();
    classify_cmd->add_option("--dynamic", dynamic, "dynamics name")->required();

    CLI::App* realizations = app.add_subcommand("realizations", "list realizations of an open dynamics");
    realizations->add_option("file", path)->required();
    realizations->add_option("--dynamic", dynamic, "open dynamics name")->required();
    realizations->add_option("--param", param, "restrict to one parameter");
    realizations->add_option("--limit", limit, "enumeration budget");

    CLI::App* report = app.add_subcommand("interaction_report", "print interaction properties of a family");
    report->add_option("file", path)->required();
    report->add_option("--family", family, "family name")->required();

    CLI::App* generate = app.add_subcommand("generate", "write the dynamics a family generates");
    generate->add_option("file", path)->required();
    generate->add_option("--family", family, "family name")->required();
    generate->add_option("--mode", mode, "p, f, s, m or heaps");
    generate->add_option("--heaps", heaps_path, "JSON file with per-component heaps");
    generate->add_option("--out", out_path, "output file (default stdout)");

    CLI::App* check = app.add_subcommand("check", "run a property suite");
    check->add_option("file", path);
    check->add_option("--suite", suite, "stability, quotient, determinism, normality or oracle")
        ->required();
    check->add_option("--seed", seed, "random seed");
    check->add_option("--cases", cases, "number of cases");
    check->add_flag("--inject-defect", inject_defect)->group(""); // hidden self-test

    CLI::App* examples = app.add_subcommand("examples", "bundled example documents");
    examples->require_subcommand(1);
    CLI::App* emit = examples->add_subcommand("emit", "write an example document");
    emit->add_option("name", name)->required();
    emit->add_option("--out", out_path, "output file (default stdout)");
    CLI::App* list = examples->add_subcommand("list", "list example names");

    CLI::App* reserialize = app.add_subcommand("reserialize", "parse a document and emit it canonically");
    reserialize->add_option("file", path)->required();
    reserialize->add_option("--out", out_path, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(validate)) return cmd_validate(path);
        if (app.got_subcommand(classify_cmd)) return cmd_classify(path, dynamic);
        if (app.got_subcommand(realizations)) return cmd_realizations(path, dynamic, param, limit);
        if (app.got_subcommand(report)) return cmd_interaction_report(path, family);
        if (app.got_subcommand(generate))
            return cmd_generate(path, family, mode, heaps_path, out_path);
        if (app.got_subcommand(check)) return cmd_check(path, suite, seed, cases, inject_defect);
        if (app.got_subcommand(examples)) {
            if (examples->got_subcommand(list)) {
                for (const auto& n : kExampleNames) std::cout << n << "\n";
                return 0;
            }
            write_output(out_path, emit_document(example_document(name)));
            return 0;
        }
        if (app.got_subcommand(reserialize)) return cmd_reserialize(path, out_path);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
