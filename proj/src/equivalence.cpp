#include "pecr/equivalence.hpp"

#include <algorithm>
#include <set>

namespace pecr {

bool is_sublist(const Program& b, const Program& a) {
    for (auto& s : b)
        if (std::find(a.begin(), a.end(), s) == a.end()) return false;
    return true;
}

bool prgm_equiv(const Program& u, const Program& v) { return is_sublist(u, v) && is_sublist(v, u); }

Binding Substitution::all() const {
    Binding r = in;
    r.insert(out.begin(), out.end());
    return r;
}

bool is_template_const(const std::string& t, const ConstSet& cst) { return is_numeric(t) || cst.contains(t); }

bool bind_statement(const Statement& inst, const Statement& tmpl, Binding& b, const ConstSet& cst) {
    if (inst.name != tmpl.name || inst.ins.size() != tmpl.ins.size() || inst.outs.size() != tmpl.outs.size())
        return false;
    std::vector<std::string> added;
    auto one = [&](const std::string& t, const std::string& x) {
        if (is_template_const(t, cst)) return t == x;
        auto it = b.find(t);
        if (it != b.end()) return it->second == x;
        b.emplace(t, x);
        added.push_back(t);
        return true;
    };
    bool ok = true;
    for (size_t k = 0; ok && k < tmpl.ins.size(); ++k) ok = one(tmpl.ins[k], inst.ins[k]);
    for (size_t k = 0; ok && k < tmpl.outs.size(); ++k) ok = one(tmpl.outs[k], inst.outs[k]);
    if (!ok)
        for (auto& t : added) b.erase(t);
    return ok;
}

std::optional<Substitution> io_equiv(const Program& instance, const Program& tmpl, const ConstSet& cst, bool strict,
                                     MatchFailure* why) {
    auto fail = [&](int c, size_t pos, std::string d) -> std::optional<Substitution> {
        if (why) *why = {c, pos, std::move(d)};
        return std::nullopt;
    };
    if (instance.size() != tmpl.size()) return fail(0, 0, "program lengths differ");
    Substitution sub;
    std::map<std::string, std::string> image_of;  // instance token -> template var (strict mode)
    for (size_t k = 0; k < tmpl.size(); ++k) {
        const auto& t = tmpl[k];
        const auto& s = instance[k];
        if (t.name != s.name || t.ins.size() != s.ins.size() || t.outs.size() != s.outs.size())
            return fail(0, k, "statement shapes differ: " + to_string(s) + " vs " + to_string(t));
        auto step = [&](const std::string& tv, const std::string& iv, bool output) -> std::optional<MatchFailure> {
            if (is_template_const(tv, cst)) {
                if (tv != iv) return MatchFailure{3, k, "constant " + tv + " vs " + iv};
                return std::nullopt;
            }
            if (auto it = sub.out.find(tv); it != sub.out.end()) {
                if (it->second != iv) return MatchFailure{2, k, tv + " is bound to output " + it->second};
                return std::nullopt;
            }
            if (auto it = sub.in.find(tv); it != sub.in.end()) {
                if (it->second != iv) return MatchFailure{1, k, tv + " is bound to " + it->second + ", met " + iv};
                return std::nullopt;
            }
            if (strict) {
                auto [it, fresh] = image_of.emplace(iv, tv);
                if (!fresh && it->second != tv) return MatchFailure{4, k, iv + " is the image of two variables"};
            }
            (output ? sub.out : sub.in).emplace(tv, iv);
            return std::nullopt;
        };
        for (size_t j = 0; j < t.ins.size(); ++j)
            if (auto f = step(t.ins[j], s.ins[j], false)) return fail(f->condition, f->position, f->detail);
        for (size_t j = 0; j < t.outs.size(); ++j)
            if (auto f = step(t.outs[j], s.outs[j], true)) return fail(f->condition, f->position, f->detail);
    }
    return sub;
}

Statement apply_binding(const Statement& s, const Binding& b) {
    Statement r = s;
    for (auto& t : r.ins)
        if (auto it = b.find(t); it != b.end()) t = it->second;
    for (auto& t : r.outs)
        if (auto it = b.find(t); it != b.end()) t = it->second;
    return r;
}

namespace {

struct PParser {
    std::string_view s;
    size_t i = 0;

    void ws() {
        while (i < s.size() && s[i] == ' ') ++i;
    }
    bool at(char c) {
        ws();
        return i < s.size() && s[i] == c;
    }
    // a statement ends after its second bracketed list
    Statement statement() {
        size_t b = i, depth = 0;
        int lists = 0;
        while (i < s.size()) {
            char c = s[i++];
            if (c == '[') ++depth;
            if (c == ']' && --depth == 0 && ++lists == 2) break;
        }
        return parse_statement(s.substr(b, i - b));
    }
    PSeq expr(char close) {
        std::vector<PSeq> alts{seq(close)};
        while (at('|')) {
            ++i;
            alts.push_back(seq(close));
        }
        if (alts.size() == 1) return alts[0];
        PItem d;
        d.alts = std::move(alts);
        return {d};
    }
    PSeq seq(char close) {
        PSeq out;
        while (true) {
            ws();
            if (i >= s.size() || s[i] == '|' || s[i] == close) return out;
            if (s[i] == '(' || s[i] == '[') {
                char c = s[i] == '(' ? ')' : ']';
                ++i;
                PSeq inner = expr(c);
                if (!at(c)) throw parse_error("unbalanced group in `" + std::string(s) + "`");
                ++i;
                out.insert(out.end(), inner.begin(), inner.end());
            } else {
                PItem it;
                it.stmt = statement();
                out.push_back(std::move(it));
            }
        }
    }
};

} // namespace

PSeq parse_pseq(std::string_view text) {
    PParser p{text};
    PSeq r = p.expr('\0');
    p.ws();
    if (p.i != text.size()) throw parse_error("trailing text in `" + std::string(text) + "`");
    return r;
}

std::vector<Program> disjunctive_form(const PSeq& s) {
    std::vector<Program> acc{Program{}};
    for (auto& item : s) {
        if (item.stmt) {
            for (auto& p : acc) p.push_back(*item.stmt);
            continue;
        }
        std::vector<Program> next;
        for (auto& alt : item.alts)
            for (auto& tail : disjunctive_form(alt))
                for (auto& head : acc) {
                    Program p = head;
                    p.insert(p.end(), tail.begin(), tail.end());
                    next.push_back(std::move(p));
                }
        acc = std::move(next);
    }
    return acc;
}

bool prgm_equiv(const PSeq& u, const PSeq& v, const FalsityTest& is_false) {
    auto norm = [&](const PSeq& s) {
        std::vector<Program> ops = disjunctive_form(s);
        // every registered-false operand may be dropped, as long as one survives
        if (is_false && ops.size() > 1) {
            std::vector<Program> kept;
            for (auto& p : ops)
                if (!is_false(p)) kept.push_back(p);
            if (!kept.empty()) ops = kept;
        }
        // operands compared as statement sets
        std::set<std::set<Statement>> out;
        for (auto& p : ops) out.insert(std::set<Statement>(p.begin(), p.end()));
        return out;
    };
    return norm(u) == norm(v);
}

} // namespace pecr
