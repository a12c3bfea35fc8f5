#include "pecr/service.hpp"

#include <ctime>
#include <fstream>
#include <mutex>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "pecr/evaluator.hpp"
#include "pecr/kernel.hpp"

namespace pecr {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string now_iso() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

const char* prov_name(Provenance p) {
    switch (p) {
    case Provenance::Rule: return "rule";
    case Provenance::Aio: return "aio";
    case Provenance::Sr1: return "sr1";
    case Provenance::Sr2: return "sr2";
    case Provenance::Falsity: return "falsity";
    case Provenance::Disj: return "disj";
    }
    return "rule";
}

SessionStatus parse_status(const std::string& s) {
    if (s == status_name(SessionStatus::Concluded)) return SessionStatus::Concluded;
    if (s == status_name(SessionStatus::False)) return SessionStatus::False;
    return SessionStatus::Open;
}

struct HttpError {
    int status;
    std::string kind, detail;
};

[[noreturn]] void fail(int status, const std::string& kind, const std::string& detail) {
    throw HttpError{status, kind, detail};
}

int status_for(const std::string& kind) {
    if (kind == "UnknownSession" || kind == "UnknownTheory" || kind == "UnknownRule" || kind == "NotFound") return 404;
    if (kind == "VersionConflict" || kind == "StaleOption") return 409;
    if (kind == "IoError") return 500;
    return 422;
}

json line_json(const ProofLine& l) {
    return {{"number", l.number},     {"statement", render_statement_or_false(l.stmt)},
            {"star", l.star},         {"label", l.label},
            {"cl", l.cl},             {"branches", l.branches},
            {"text", render_line(l)}};
}

json rule_json(const RuleRecord& r) {
    return {{"label", r.label}, {"kind", kind_name(r.kind)}, {"text", render_rule(r)},
            {"tcl", r.tcl},     {"origin", r.origin},       {"falsity", r.is_falsity()}};
}

RuleRecord rule_from_json(const json& j) {
    ProofScript s = parse_single_script(j.at("text").get<std::string>());
    RuleRecord r = rule_from_script(s, j.value("origin", ""));
    r.tcl = j.value("tcl", TokenList{});
    return r;
}

json options_json(const std::vector<Option>& opts) {
    json out = json::array();
    for (size_t i = 0; i < opts.size(); ++i) {
        const auto& o = opts[i];
        out.push_back({{"index", i},
                       {"text", o.render()},
                       {"hash", o.hash()},
                       {"statement", render_statement_or_false(o.conclusion)},
                       {"label", o.label},
                       {"cl", o.cl},
                       {"branches", o.branches},
                       {"provenance", prov_name(o.prov)}});
    }
    return out;
}

// full session state for persistence
json dump_session(const Session& s) {
    json j;
    j["premise_count"] = s.premise_count;
    json lines = json::array();
    for (auto& l : s.lines) lines.push_back(render_line(l));
    j["lines"] = lines;
    json extra = json::array();
    for (auto& r : s.extra) extra.push_back(rule_json(r));
    j["extra"] = extra;
    j["hidden"] = s.hidden;
    j["status"] = status_name(s.status);
    json kids = json::object();
    for (auto& [line, cs] : s.children) {
        json arr = json::array();
        for (auto& c : cs) arr.push_back(dump_session(*c));
        kids[std::to_string(line)] = arr;
    }
    j["children"] = kids;
    return j;
}

std::shared_ptr<Session> restore_session(const json& j, std::shared_ptr<const Theory> th) {
    auto s = std::make_shared<Session>();
    s->theory = std::move(th);
    s->premise_count = j.at("premise_count").get<size_t>();
    for (auto& t : j.at("lines")) s->lines.push_back(parse_proof_line(t.get<std::string>(), s->theory->mach.nstr));
    for (auto& r : j.at("extra")) s->extra.push_back(rule_from_json(r));
    s->hidden = j.at("hidden").get<std::set<std::string>>();
    s->status = parse_status(j.at("status").get<std::string>());
    for (auto& [line, arr] : j.at("children").items()) {
        auto& v = s->children[std::stoi(line)];
        for (auto& c : arr) v.push_back(restore_session(c, s->theory));
    }
    return s;
}

json snapshot(const Session& s, const std::string& id) {
    json j;
    j["id"] = id;
    j["status"] = status_name(s.status);
    j["premise_count"] = s.premise_count;
    json lines = json::array();
    for (auto& l : s.lines) lines.push_back(line_json(l));
    j["lines"] = lines;
    json kids = json::object();
    for (auto& [line, cs] : s.children) {
        json arr = json::array();
        for (size_t i = 0; i < cs.size(); ++i)
            arr.push_back({{"id", id + "." + std::to_string(line) + "." + std::to_string(i)},
                           {"status", status_name(cs[i]->status)}});
        kids[std::to_string(line)] = arr;
    }
    j["children"] = kids;
    json lemmas = json::array();
    for (auto& r : s.extra) lemmas.push_back(r.label);
    j["lemmas"] = lemmas;
    return j;
}

json report_json(const VerificationReport& r) {
    json lines = json::array();
    for (auto& l : r.lines) lines.push_back({{"number", l.number}, {"ok", l.ok}, {"kind", l.kind}, {"message", l.message}});
    json j = {{"label", r.label},
              {"ok", r.ok},
              {"lines", lines},
              {"errors", r.errors},
              {"first_failure", r.first_failure()},
              {"r", r.reduction.r},
              {"unused_premises", r.reduction.unused_premises},
              {"unreachable_lines", r.reduction.unreachable_lines}};
    if (r.theorem) j["theorem"] = render_rule(*r.theorem);
    return j;
}

Program premises_from(const json& v, int64_t nstr) {
    if (v.is_string()) return parse_program(v.get<std::string>(), nstr);
    Program p;
    for (auto& s : v) p.push_back(parse_statement(s.get<std::string>(), nstr));
    return p;
}

std::vector<std::string> split_path(const std::string& path) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : path) {
        if (c == '/') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

MachParams mach_from(const json& body, MachParams m) {
    if (!body.contains("mach")) return m;
    const json& j = body["mach"];
    m.nchar = j.value("nchar", m.nchar);
    m.nstr = j.value("nstr", m.nstr);
    m.nlst = j.value("nlst", m.nlst);
    m.nint = j.value("nint", m.nint);
    m.nprem = j.value("nprem", m.nprem);
    m.tcpu = j.value("tcpu", m.tcpu);
    m.eps_digits = j.value("eps_digits", m.eps_digits);
    m.validate();
    return m;
}

} // namespace

Service::Service(ServiceConfig cfg) : cfg_(std::move(cfg)), server_(std::make_unique<httplib::Server>()) {
    if (cfg_.persist && fs::exists(*cfg_.persist)) load();
}

Service::~Service() { stop(); }

std::shared_ptr<const Theory> Service::theory(const std::string& name) {
    if (auto it = theories_.find(name); it != theories_.end()) return it->second;
    auto names = list_theories(cfg_.theory_dir);
    if (std::find(names.begin(), names.end(), name) == names.end()) fail(404, "UnknownTheory", name);
    auto th = std::make_shared<Theory>(load_theory(cfg_.theory_dir, name, cfg_.mach));
    for (auto& t : stored_[name]) {
        ProofScript s = parse_single_script(t, th->mach.nstr);
        th->store_rule(rule_from_script(s, name));
    }
    theories_[name] = th;
    return th;
}

std::shared_ptr<Session> Service::resolve(const std::string& id, Entry*& entry, std::shared_ptr<Session>* parent) {
    std::vector<std::string> parts;
    std::stringstream ss(id);
    for (std::string p; std::getline(ss, p, '.');) parts.push_back(p);
    if (parts.empty()) fail(404, "UnknownSession", id);
    auto it = sessions_.find(parts[0]);
    if (it == sessions_.end()) fail(404, "UnknownSession", id);
    entry = &it->second;
    std::shared_ptr<Session> cur = entry->root, prev;
    if (parts.size() % 2 == 0) fail(404, "UnknownSession", id);
    for (size_t k = 1; k + 1 < parts.size(); k += 2) {
        int line = 0, idx = 0;
        try {
            line = std::stoi(parts[k]);
            idx = std::stoi(parts[k + 1]);
        } catch (const std::exception&) {
            fail(404, "UnknownSession", id);
        }
        auto c = cur->children.find(line);
        if (c == cur->children.end() || idx < 0 || idx >= (int)c->second.size()) fail(404, "UnknownSession", id);
        prev = cur;
        cur = c->second[idx];
    }
    if (parent) *parent = prev;
    return cur;
}

void Service::touch(Entry& e) {
    ++e.version;
    e.modified = now_iso();
}

Service::Response Service::handle(const std::string& method, const std::string& path, const std::string& body_text) {
    Response res;
    try {
        json body = json::object();
        if (!body_text.empty()) {
            try {
                body = json::parse(body_text);
            } catch (const json::exception& e) {
                fail(400, "BadRequest", e.what());
            }
        }
        auto parts = split_path(path);
        json out;
        bool mutated = false;

        auto check_version = [&](const Entry& e) {
            if (body.contains("version") && body["version"].get<int64_t>() != e.version)
                fail(409, "VersionConflict",
                     "session is at version " + std::to_string(e.version) + ", request names " +
                         std::to_string(body["version"].get<int64_t>()));
        };

        if (parts.empty()) fail(404, "NotFound", path);

        if (parts[0] == "theories" && method == "GET") {
            std::unique_lock lk(mu_);
            if (parts.size() == 1) {
                out["theories"] = list_theories(cfg_.theory_dir);
            } else {
                auto th = theory(parts[1]);
                if (parts.size() == 2) {
                    json atoms = json::array();
                    for (auto& [n, a] : th->atoms())
                        atoms.push_back({{"name", n}, {"in", a.in_types}, {"out", a.out_types}, {"evaluable", a.has_hook}});
                    json rules = json::array();
                    for (auto& r : th->rules()) rules.push_back({{"label", r.label}, {"kind", kind_name(r.kind)}});
                    json disj = json::array();
                    for (auto& [n, d] : th->disjunctions()) disj.push_back(n);
                    out = {{"name", th->name}, {"numeric", th->numeric}, {"includes", th->includes},
                           {"atoms", atoms},   {"rules", rules},         {"disjunctions", disj}};
                } else if (parts.size() == 4 && parts[2] == "rules") {
                    const RuleRecord* r = th->rule(parts[3]);
                    if (!r) fail(404, "UnknownRule", parts[3]);
                    out = rule_json(*r);
                } else {
                    fail(404, "NotFound", path);
                }
            }
        } else if (parts[0] == "eval" && method == "POST" && parts.size() == 1) {
            std::shared_ptr<const Theory> th;
            {
                std::unique_lock lk(mu_);
                th = theory(body.at("theory").get<std::string>());
            }
            MachParams m = mach_from(body, th->mach);
            Program p = premises_from(body.at("program"), m.nstr);
            Env env;
            const json& je = body.value("env", json::object());
            if (je.is_string()) {
                env = parse_env(je.get<std::string>(), th->numeric == "rat", m.eps_digits);
            } else {
                for (auto& [k, v] : je.items())
                    env[k] = parse_value(v.is_string() ? v.get<std::string>() : v.dump(), th->numeric == "rat", m.eps_digits);
            }
            Evaluator ev(*th, m);
            auto r = ev.eval(p, env);
            json outs = json::object();
            for (auto& [k, v] : r.env) outs[k] = render_value(v, m.eps_digits);
            out = {{"ok", r.ok()}, {"env", outs}, {"steps", r.steps}};
            if (r.error)
                out["error"] = {{"kind", r.error->kind}, {"site", r.error->site}, {"detail", r.error->detail},
                                {"text", r.error->str()}};
        } else if (parts[0] == "check" && method == "POST" && parts.size() == 1) {
            std::shared_ptr<const Theory> th;
            {
                std::unique_lock lk(mu_);
                th = theory(body.at("theory").get<std::string>());
            }
            auto scripts = parse_scripts(body.at("text").get<std::string>(), th->mach.nstr);
            json reps = json::array();
            for (auto& r : check_scripts(scripts, *th)) reps.push_back(report_json(r));
            out["reports"] = reps;
        } else if (parts[0] == "sessions") {
            if (parts.size() == 1 && method == "POST") {
                std::unique_lock lk(mu_);
                auto th = theory(body.at("theory").get<std::string>());
                Program prem = premises_from(body.at("premises"), th->mach.nstr);
                if ((int64_t)prem.size() > th->mach.nprem) fail(422, "InvalidPremise", "premise longer than nprem");
                auto s = std::make_shared<Session>(th, prem, body.value("stars", std::vector<bool>{}));
                if (body.contains("hidden")) s->hidden = body["hidden"].get<std::set<std::string>>();
                std::string id = "s" + std::to_string(next_id_++);
                Entry e{th->name, s, 1, now_iso(), now_iso()};
                sessions_[id] = e;
                out = snapshot(*s, id);
                out["theory"] = e.theory;
                out["version"] = e.version;
                out["created"] = e.created;
                out["modified"] = e.modified;
                res.status = 201;
                mutated = true;
            } else if (parts.size() >= 2) {
                const std::string& id = parts[1];
                std::string action = parts.size() >= 3 ? parts[2] : "";
                if (parts.size() > 3) fail(404, "NotFound", path);
                bool write = method != "GET";
                std::shared_lock rl(mu_, std::defer_lock);
                std::unique_lock wl(mu_, std::defer_lock);
                if (write) wl.lock();
                else rl.lock();
                Entry* e = nullptr;
                std::shared_ptr<Session> parent;
                auto s = resolve(id, e, &parent);
                auto finish = [&](json j) {
                    j["theory"] = e->theory;
                    j["version"] = e->version;
                    j["created"] = e->created;
                    j["modified"] = e->modified;
                    return j;
                };
                if (method == "GET" && action.empty()) {
                    out = finish(snapshot(*s, id));
                } else if (method == "GET" && action == "options") {
                    out = {{"id", id}, {"version", e->version}, {"options", options_json(s->enumerate_options())}};
                } else if (method == "DELETE" && action.empty()) {
                    if (id.find('.') != std::string::npos) fail(422, "NotARootSession", id);
                    sessions_.erase(id);
                    out = {{"deleted", id}};
                    mutated = true;
                } else if (method == "POST" && action == "apply") {
                    check_version(*e);
                    const ProofLine* l = nullptr;
                    if (body.contains("literal")) {
                        l = &s->apply_literal(body["literal"].get<std::string>());
                    } else {
                        auto opts = s->enumerate_options();
                        size_t i = body.at("index").get<size_t>();
                        if (i >= opts.size()) fail(409, "StaleOption", "option index out of range");
                        if (body.contains("hash") && body["hash"].get<std::string>() != opts[i].hash())
                            fail(409, "StaleOption", "option " + std::to_string(i) + " changed");
                        l = &s->apply_option(opts[i]);
                    }
                    json line = line_json(*l);
                    touch(*e);
                    out = finish(snapshot(*s, id));
                    out["applied"] = line;
                    mutated = true;
                } else if (method == "POST" && action == "split") {
                    check_version(*e);
                    int line = body.at("line").get<int>();
                    auto kids = s->split(line);
                    touch(*e);
                    out = finish(snapshot(*s, id));
                    json ids = json::array();
                    for (size_t i = 0; i < kids.size(); ++i)
                        ids.push_back(id + "." + std::to_string(line) + "." + std::to_string(i));
                    out["operands"] = ids;
                    mutated = true;
                } else if (method == "POST" && action == "contract") {
                    check_version(*e);
                    std::optional<std::string> stmt;
                    if (body.contains("statement")) stmt = body["statement"].get<std::string>();
                    auto& l = s->contract(body.at("line").get<int>(), body.at("lemmaA").get<std::string>(),
                                          body.at("lemmaB").get<std::string>(), stmt);
                    json line = line_json(l);
                    touch(*e);
                    out = finish(snapshot(*s, id));
                    out["applied"] = line;
                    mutated = true;
                } else if (method == "POST" && action == "extract") {
                    check_version(*e);
                    std::string label = body.value("label", parent ? "" : id);
                    if (label.empty()) fail(422, "MissingLabel", "operand lemmas need a label");
                    RuleKind kind = parse_kind(body.value("kind", parent ? std::string("Lemma") : std::string("Theorem")));
                    ProofScript script = s->to_script(kind, label);
                    auto rep = check_proof(script, s->context());
                    if (!rep.ok) {
                        fail(422, "NotAProof",
                             rep.errors.empty() ? "line " + std::to_string(rep.first_failure()) : rep.errors.front());
                    }
                    Extraction ex = extract_theorem(script, rep, body.value("force", false));
                    ex.rule.origin = e->theory;
                    out = {{"id", id}, {"label", label}, {"theorem", render_rule(ex.rule)}, {"rule", rule_json(ex.rule)},
                           {"report", report_json(rep)}};
                    if (ex.pruned) out["pruned"] = render_script(*ex.pruned);
                    out["script"] = render_script(script);
                    if (parent) {
                        std::erase_if(parent->extra, [&](const RuleRecord& r) { return r.label == label; });
                        parent->extra.insert(parent->extra.begin(), ex.rule);
                        s->status = SessionStatus::Concluded;
                    } else if (s->status == SessionStatus::Open) {
                        s->status = SessionStatus::Concluded;
                    }
                    if (body.value("store", false)) {
                        auto th = theories_.at(e->theory);
                        auto copy = std::make_shared<Theory>(*th);
                        copy->store_rule(ex.rule);
                        theories_[e->theory] = copy;
                        stored_[e->theory].push_back(render_rule(ex.rule));
                    }
                    touch(*e);
                    out["version"] = e->version;
                    mutated = true;
                } else {
                    fail(404, "NotFound", method + " " + path);
                }
            } else {
                fail(404, "NotFound", path);
            }
        } else {
            fail(404, "NotFound", method + " " + path);
        }

        if (mutated && cfg_.persist) {
            std::unique_lock lk(mu_);
            save();
        }
        res.body = out.dump();
    } catch (const HttpError& e) {
        res.status = e.status;
        res.body = json{{"error", e.kind}, {"detail", e.detail}}.dump();
    } catch (const Error& e) {
        res.status = status_for(e.kind());
        res.body = json{{"error", e.kind()}, {"detail", e.detail()}}.dump();
    } catch (const json::exception& e) {
        res.status = 400;
        res.body = json{{"error", "BadRequest"}, {"detail", e.what()}}.dump();
    } catch (const std::exception& e) {
        res.status = 500;
        res.body = json{{"error", "Internal"}, {"detail", e.what()}}.dump();
    }
    return res;
}

void Service::save() const {
    json j;
    j["next_id"] = next_id_;
    j["stored"] = stored_;
    json ss = json::object();
    for (auto& [id, e] : sessions_)
        ss[id] = {{"theory", e.theory},   {"version", e.version},        {"created", e.created},
                  {"modified", e.modified}, {"session", dump_session(*e.root)}};
    j["sessions"] = ss;
    fs::path tmp = *cfg_.persist;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error("IoError", "cannot write " + tmp.string());
        f << j.dump(1);
    }
    fs::rename(tmp, *cfg_.persist);
}

void Service::load() {
    std::unique_lock lk(mu_);
    std::ifstream f(*cfg_.persist, std::ios::binary);
    if (!f) throw Error("IoError", "cannot read " + cfg_.persist->string());
    json j = json::parse(f);
    next_id_ = j.value("next_id", int64_t{1});
    stored_ = j.value("stored", std::map<std::string, std::vector<std::string>>{});
    theories_.clear();
    sessions_.clear();
    for (auto& [id, v] : j.at("sessions").items()) {
        auto th = theory(v.at("theory").get<std::string>());
        Entry e{th->name, restore_session(v.at("session"), th), v.at("version").get<int64_t>(),
                v.at("created").get<std::string>(), v.at("modified").get<std::string>()};
        sessions_[id] = e;
    }
}

void Service::install(httplib::Server& srv) {
    auto forward = [this](const httplib::Request& req, httplib::Response& res) {
        auto r = handle(req.method, req.path, req.body);
        res.status = r.status;
        res.set_content(r.body, "application/json");
        res.set_header("Access-Control-Allow-Origin", "*");
    };
    const char* any = R"(/.*)";
    srv.Get(any, forward);
    srv.Post(any, forward);
    srv.Delete(any, forward);
    srv.Options(any, [](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Origin", "*");
        res.set_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
        res.status = 204;
    });
}

bool Service::listen() {
    install(*server_);
    if (cfg_.port == 0) {
        bound_port_ = server_->bind_to_any_port(cfg_.host);
        if (bound_port_ <= 0) return false;
    } else {
        if (!server_->bind_to_port(cfg_.host, cfg_.port)) return false;
        bound_port_ = cfg_.port;
    }
    return server_->listen_after_bind();
}

void Service::stop() {
    if (server_->is_running()) server_->stop();
}

bool Service::running() const { return server_->is_running(); }

} // namespace pecr
