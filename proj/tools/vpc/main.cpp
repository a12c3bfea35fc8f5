#include <algorithm>
#include <csignal>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "pecr/evaluator.hpp"
#include "pecr/foundry.hpp"
#include "pecr/kernel.hpp"
#include "pecr/maps.hpp"
#include "pecr/service.hpp"

using namespace pecr;
namespace fs = std::filesystem;

namespace {

enum Exit { Ok = 0, ParseFail = 2, VerifyFail = 3, EvalFail = 4, Internal = 5 };

struct Opts {
    std::string theory_dir = PECR_SOURCE_DIR "/theories";
    std::string theory;
    MachParams mach;
    uint64_t seed = 1;
    std::string format = "text";
};

std::string read_file(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("IoError", "cannot read " + p);
    std::stringstream b;
    b << in.rdbuf();
    return b.str();
}

// argument given inline or as a file path
std::string text_arg(const std::string& a) {
    std::error_code ec;
    if (fs::is_regular_file(a, ec)) return read_file(a);
    return a;
}

// `a=70,b=50` or `a = 70; b = 50` becomes one binding per line
std::string env_lines(const std::string& s) {
    std::string out;
    int depth = 0;
    bool quoted = false;
    for (char c : s) {
        if (c == '"') quoted = !quoted;
        if (!quoted && c == '[') ++depth;
        if (!quoted && c == ']') --depth;
        out += (!quoted && depth == 0 && (c == ',' || c == ';')) ? '\n' : c;
    }
    return out;
}

std::string program_lines(const std::string& s) {
    std::string out = s;
    std::replace(out.begin(), out.end(), ';', '\n');
    return out;
}

std::string theory_for(const Opts& o, const std::string& path) {
    if (!o.theory.empty()) return o.theory;
    std::string dir = fs::path(path).parent_path().filename().string();
    auto names = list_theories(o.theory_dir);
    if (std::find(names.begin(), names.end(), dir) == names.end())
        throw Error("UnknownTheory", "cannot infer the theory of " + path + "; pass --theory");
    return dir;
}

int exit_for(const Error& e) {
    const std::string& k = e.kind();
    if (k == "ParseError" || k == "IoError" || k == "UnknownTheory" || k == "InvalidMach") return ParseFail;
    if (k == "VerificationFailure" || k == "NotAProof" || k == "RedundancyRefusal" || k == "UnknownLabel" ||
        k == "InvalidPremise")
        return VerifyFail;
    if (k == "NotEnclosed" || k == "NotElement" || k == "CapExceeded" || k == "NoEvaluatorHook") return EvalFail;
    return Internal;
}

struct Loaded {
    std::string path, theory;
    std::vector<ProofScript> scripts;
};

// files parsed in parallel, grouped per theory, sorted by path
std::map<std::string, std::vector<Loaded>> load_files(const Opts& o, std::vector<std::string> paths) {
    std::sort(paths.begin(), paths.end());
    std::vector<std::future<Loaded>> jobs;
    for (auto& p : paths)
        jobs.push_back(std::async(std::launch::async, [&o, p] {
            Loaded l{p, theory_for(o, p), {}};
            try {
                l.scripts = parse_scripts(read_file(p), o.mach.nstr);
            } catch (const Error& e) {
                throw Error(e.kind(), p + ": " + e.detail());
            }
            return l;
        }));
    std::map<std::string, std::vector<Loaded>> out;
    for (auto& j : jobs) {
        Loaded l = j.get();
        out[l.theory].push_back(std::move(l));
    }
    return out;
}

struct Checked {
    std::string path;
    ProofScript script;
    VerificationReport report;
};

std::vector<Checked> check_all(const Opts& o, const std::vector<std::string>& paths) {
    auto groups = load_files(o, paths);
    std::vector<std::future<std::vector<Checked>>> jobs;
    for (auto& [name, files] : groups) {
        auto th = std::make_shared<Theory>(load_theory(o.theory_dir, name, o.mach));
        jobs.push_back(std::async(std::launch::async, [th, &files] {
            std::vector<ProofScript> all;
            std::vector<std::string> from;
            for (auto& f : files)
                for (auto& s : f.scripts) {
                    all.push_back(s);
                    from.push_back(f.path);
                }
            auto reps = check_scripts(all, *th);
            std::vector<Checked> out;
            for (size_t i = 0; i < all.size(); ++i) out.push_back({from[i], all[i], reps[i]});
            return out;
        }));
    }
    std::vector<Checked> out;
    for (auto& j : jobs) {
        auto v = j.get();
        out.insert(out.end(), v.begin(), v.end());
    }
    std::stable_sort(out.begin(), out.end(), [](const Checked& a, const Checked& b) { return a.path < b.path; });
    return out;
}

std::string join(const std::vector<int>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
    return s;
}

int cmd_check(const Opts& o, const std::vector<std::string>& paths) {
    auto res = check_all(o, paths);
    int verified = 0, failed = 0, redundant = 0;
    for (auto& c : res) {
        const auto& r = c.report;
        bool red = r.ok && !r.reduction.r.empty();
        if (r.ok) ++verified;
        else ++failed;
        if (red) ++redundant;
        if (o.format == "lines") {
            for (auto& l : r.lines)
                std::cout << c.path << '\t' << r.label << '\t' << l.number << '\t' << (l.ok ? "ok" : l.kind) << '\n';
            for (auto& e : r.errors) std::cout << c.path << '\t' << r.label << "\t-\t" << e << '\n';
            std::cout << c.path << '\t' << r.label << "\tresult\t"
                      << (!r.ok ? "failed" : red ? "redundant [" + join(r.reduction.r) + "]" : "verified") << '\n';
        } else if (!r.ok) {
            std::cout << r.label << ": FAILED (" << c.path << ")\n";
            for (auto& l : r.lines)
                if (!l.ok) std::cout << "  line " << l.number << ": " << l.kind << ": " << l.message << '\n';
            for (auto& e : r.errors) std::cout << "  " << e << '\n';
        } else if (red) {
            std::cout << r.label << ": redundant lines [" << join(r.reduction.r) << "]\n";
        }
    }
    std::cout << verified << " proofs verified";
    if (failed) std::cout << ", " << failed << " failed";
    std::cout << ", " << redundant << " redundancies\n";
    return failed ? VerifyFail : redundant ? VerifyFail : Ok;
}

int cmd_extract(const Opts& o, const std::vector<std::string>& paths, bool force) {
    auto res = check_all(o, paths);
    int rc = Ok;
    for (auto& c : res) {
        if (!c.report.ok) {
            std::cerr << c.report.label << ": NotAProof: line " << c.report.first_failure() << '\n';
            rc = VerifyFail;
            continue;
        }
        try {
            auto ex = extract_theorem(c.script, c.report, force);
            std::cout << render_rule(ex.rule);
            if (ex.pruned) std::cout << '\n' << render_script(*ex.pruned);
            std::cout << '\n';
        } catch (const Error& e) {
            std::cerr << c.report.label << ": " << e.what() << '\n';
            rc = VerifyFail;
        }
    }
    return rc;
}

int cmd_options(const Opts& o, const std::string& path) {
    auto th = std::make_shared<Theory>(load_theory(o.theory_dir, theory_for(o, path), o.mach));
    ProofScript s = parse_single_script(read_file(path), o.mach.nstr);
    Session se = session_from_script(th, s);
    auto opts = se.enumerate_options();
    for (size_t i = 0; i < opts.size(); ++i) {
        if (o.format == "lines") std::cout << i << '\t' << opts[i].hash() << '\t';
        std::cout << opts[i].render() << '\n';
    }
    return Ok;
}

int cmd_eval(const Opts& o, const std::string& prog, const std::string& env_text) {
    std::string name = o.theory.empty() ? "int" : o.theory;
    Theory th = load_theory(o.theory_dir, name, o.mach);
    Program p = parse_program(program_lines(text_arg(prog)), o.mach.nstr);
    Env env = parse_env(env_lines(text_arg(env_text)), th.numeric == "rat", o.mach.eps_digits);
    Evaluator ev(th, o.mach);
    auto r = ev.eval(p, env);
    if (r.error) {
        std::cout << "ExecError " << r.error->str() << '\n';
        return EvalFail;
    }
    for (auto& [k, v] : r.env)
        if (!env.count(k)) std::cout << k << " = " << render_value(v, o.mach.eps_digits) << '\n';
    return Ok;
}

int cmd_certify(const Opts& o, const std::string& box, const std::string& v, int64_t n) {
    std::string name = o.theory.empty() ? "vec" : o.theory;
    Theory th = load_theory(o.theory_dir, name, o.mach);
    Evaluator ev(th, o.mach);
    Value pb = parse_value(box, false, o.mach.eps_digits);
    Value pv = parse_value(v, false, o.mach.eps_digits);
    if (!std::holds_alternative<Box>(pb) || !std::holds_alternative<Vec>(pv))
        throw Error("ParseError", "certify takes a box [[lo] [hi]] and a vector [v]");
    auto c = certify_axc5(ev, std::get<Box>(pb), std::get<Vec>(pv), n);
    std::cout << c.text();
    return Ok;
}

std::vector<const RuleRecord*> select_rules(const Theory& th, const std::vector<std::string>& labels) {
    std::vector<const RuleRecord*> out;
    if (labels.empty() || (labels.size() == 1 && labels[0] == "all")) {
        for (auto& r : th.rules())
            if (r.is_axiom()) out.push_back(&r);
        return out;
    }
    for (auto& l : labels) {
        auto* r = th.rule(l);
        if (!r) throw Error("UnknownLabel", l);
        out.push_back(r);
    }
    return out;
}

int cmd_sample(const Opts& o, const std::vector<std::string>& labels, int64_t samples) {
    Theory th = load_theory(o.theory_dir, o.theory.empty() ? "int" : o.theory, o.mach);
    int rc = Ok;
    for (auto* r : select_rules(th, labels)) {
        try {
            auto v = soundness_sample(*r, th, samples, o.mach, o.seed);
            std::cout << v.str() << '\n';
            if (v.violation()) rc = EvalFail;
        } catch (const Error& e) {
            std::cout << r->label << ": " << e.kind() << ": " << e.detail() << '\n';
        }
    }
    return rc;
}

int cmd_search(const Opts& o, const std::vector<std::string>& atoms, size_t max_premise, int64_t samples,
               const std::vector<std::string>& purges) {
    Theory th = load_theory(o.theory_dir, o.theory.empty() ? "int" : o.theory, o.mach);
    for (auto& l : purges) purge(l, th);
    SearchCaps caps;
    caps.samples = samples;
    caps.max_premise = std::max(caps.max_premise, max_premise);
    auto res = search_axioms(th, atoms, max_premise, o.mach, o.seed, caps);
    for (auto& r : res.survivors) {
        if (o.format == "lines") {
            std::string body;
            for (auto& st : r.premise) body += (body.empty() ? "" : "; ") + to_string(st);
            std::cout << body << "\t" << render_statement_or_false(r.conclusion) << '\n';
        } else {
            std::cout << render_rule(r) << '\n';
        }
    }
    std::cerr << "enumerated " << res.enumerated << ", structural " << res.structural << ", sound " << res.sound
              << ", survivors " << res.survivors.size() << '\n';
    return Ok;
}

int cmd_purge(const Opts& o, const std::string& label) {
    Theory th = load_theory(o.theory_dir, o.theory.empty() ? "int" : o.theory, o.mach);
    for (auto& l : purge(label, th)) std::cout << l << '\n';
    return Ok;
}

int cmd_iterate(const Opts& o, int rounds, int64_t samples, const std::vector<std::string>& atoms) {
    Theory th = load_theory(o.theory_dir, o.theory.empty() ? "int" : o.theory, o.mach);
    auto reps = iterate(th, rounds, samples, o.mach, o.seed, atoms);
    for (size_t i = 0; i < reps.size(); ++i) {
        auto& r = reps[i];
        std::cout << "round " << i + 1 << ": " << r.violated.size() << " violated, " << r.purged.size()
                  << " purged, " << r.sweep.relabeled.size() << " relabeled, " << r.sweep.flagged.size()
                  << " flagged, " << r.proposals.size() << " proposals\n";
        for (auto& l : r.violated) std::cout << "  violated " << l << '\n';
        for (auto& [a, t] : r.sweep.relabeled) std::cout << "  relabeled " << a << " as theorem (" << t << ")\n";
        for (auto& [a, b] : r.sweep.flagged) std::cout << "  equivalent axioms " << a << " " << b << '\n';
    }
    return Ok;
}

Service* g_service = nullptr;

int cmd_serve(const Opts& o, const std::string& listen, const std::string& persist) {
    ServiceConfig cfg;
    auto colon = listen.rfind(':');
    cfg.host = colon == std::string::npos ? listen : listen.substr(0, colon);
    cfg.port = colon == std::string::npos ? 8080 : std::stoi(listen.substr(colon + 1));
    cfg.theory_dir = o.theory_dir;
    cfg.mach = o.mach;
    if (!persist.empty()) cfg.persist = persist;
    Service svc(cfg);
    g_service = &svc;
    std::signal(SIGINT, [](int) {
        if (g_service) g_service->stop();
    });
    std::signal(SIGTERM, [](int) {
        if (g_service) g_service->stop();
    });
    std::cerr << "listening on " << cfg.host << ":" << cfg.port << '\n';
    bool ok = svc.listen();
    g_service = nullptr;
    if (!ok) {
        std::cerr << "cannot bind " << listen << '\n';
        return Internal;
    }
    return Ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"vpc: proof checker, options generator and evaluator"};
    app.require_subcommand(1);
    Opts o;
    int64_t budget = o.mach.tcpu;
    app.add_option("--theory-dir", o.theory_dir, "directory holding the theories")->envname("VPC_THEORY_DIR");
    app.add_option("--theory", o.theory, "theory name (default: directory of the input)")->envname("VPC_THEORY");
    app.add_option("--nint", o.mach.nint, "max absolute integer")->envname("VPC_NINT");
    app.add_option("--nlst", o.mach.nlst, "max list length")->envname("VPC_NLST");
    app.add_option("--nprem", o.mach.nprem, "max premise length")->envname("VPC_NPREM");
    app.add_option("--budget", budget, "execution budget in statement steps")->envname("VPC_BUDGET");
    app.add_option("--seed", o.seed, "random seed")->envname("VPC_SEED");
    app.add_option("--format", o.format, "text or lines")
        ->check(CLI::IsMember({"text", "lines"}))
        ->envname("VPC_FORMAT");

    std::vector<std::string> files;
    auto* check = app.add_subcommand("check", "verify proof scripts");
    check->add_option("files", files, "proof files")->required();

    bool force = false;
    auto* extract = app.add_subcommand("extract", "verify and print theorem blocks");
    extract->add_option("files", files, "proof files")->required();
    extract->add_flag("--force", force, "prune redundant lines instead of refusing");

    std::string session_file;
    auto* options = app.add_subcommand("options", "print the options of a partial proof");
    options->add_option("session", session_file, "partial proof script")->required();

    std::string prog, env;
    auto* eval = app.add_subcommand("eval", "run a program on an environment");
    eval->add_option("program", prog, "statements (or a file)")->required();
    eval->add_option("env", env, "bindings such as a=70,b=50 (or a file)")->required();

    std::string box, vec;
    int64_t steps = 100;
    auto* certify = app.add_subcommand("certify", "certify an invariant box for iterf");
    certify->add_option("box", box, "box [[lo] [hi]]")->required();
    certify->add_option("v", vec, "start vector in the box")->required();
    certify->add_option("-n,--steps", steps, "iteration count");

    std::vector<std::string> labels;
    int64_t samples = 1000;
    auto* sample = app.add_subcommand("sample", "soundness sampling of rules");
    sample->add_option("labels", labels, "rule labels (default: all axioms)");
    sample->add_option("--samples", samples, "environments per rule");

    std::vector<std::string> atoms, purges;
    size_t max_premise = 2;
    int64_t search_samples = 200;
    auto* search = app.add_subcommand("search", "bounded search for sound underivable rules");
    search->add_option("--atoms", atoms, "atoms to combine")->required()->delimiter(',');
    search->add_option("--max-premise", max_premise, "premise length bound");
    search->add_option("--samples", search_samples, "environments per candidate");
    search->add_option("--purge", purges, "purge these rules first")->delimiter(',');

    std::string label;
    auto* purge_cmd = app.add_subcommand("purge", "list a rule and every theorem resting on it");
    purge_cmd->add_option("label", label, "rule label")->required();

    int rounds = 1;
    auto* iter = app.add_subcommand("iterate", "sampling, purge and relabel rounds");
    iter->add_option("--rounds", rounds, "rounds");
    iter->add_option("--samples", samples, "environments per rule");
    iter->add_option("--atoms", atoms, "atoms for the search step")->delimiter(',');

    std::string listen = "127.0.0.1:8080", persist;
    auto* serve = app.add_subcommand("serve", "start the HTTP service");
    serve->add_option("--listen", listen, "host:port")->envname("VPC_LISTEN");
    serve->add_option("--persist", persist, "session store file")->envname("VPC_PERSIST");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? Ok : ParseFail;
    }

    try {
        o.mach.tcpu = budget;
        try {
            o.mach.validate();
        } catch (const Error& e) {
            throw Error("InvalidMach", e.detail());
        }
        if (*check) return cmd_check(o, files);
        if (*extract) return cmd_extract(o, files, force);
        if (*options) return cmd_options(o, session_file);
        if (*eval) return cmd_eval(o, prog, env);
        if (*certify) return cmd_certify(o, box, vec, steps);
        if (*sample) return cmd_sample(o, labels, samples);
        if (*search) return cmd_search(o, atoms, max_premise, search_samples, purges);
        if (*purge_cmd) return cmd_purge(o, label);
        if (*iter) return cmd_iterate(o, rounds, samples, atoms);
        if (*serve) return cmd_serve(o, listen, persist);
    } catch (const Error& e) {
        std::cerr << e.kind() << ": " << e.detail() << '\n';
        return exit_for(e);
    } catch (const std::exception& e) {
        std::cerr << "Internal: " << e.what() << '\n';
        return Internal;
    }
    return Internal;
}
