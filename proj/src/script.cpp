#include "pecr/script.hpp"

#include <algorithm>
#include <regex>
#include <sstream>

namespace pecr {

const char* kind_name(RuleKind k) {
    switch (k) {
    case RuleKind::Axiom: return "Axiom";
    case RuleKind::Lemma: return "Lemma";
    default: return "Theorem";
    }
}

RuleKind parse_kind(const std::string& s) {
    if (s == "Axiom" || s == "axiom") return RuleKind::Axiom;
    if (s == "Lemma" || s == "lemma") return RuleKind::Lemma;
    if (s == "Theorem" || s == "theorem") return RuleKind::Theorem;
    throw parse_error("unknown rule kind `" + s + "`");
}

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool is_dashes(const std::string& s) { return s.size() >= 3 && s.find_first_not_of('-') == std::string::npos; }

std::optional<Statement> stmt_or_false(const std::string& s, int64_t nstr) {
    if (s == ":false") return std::nullopt;
    return parse_statement(s, nstr);
}

} // namespace

ProofLine parse_proof_line(const std::string& raw, int64_t nstr) {
    static const std::regex num_re(R"(^\s*(\d+)\s+(.*)$)");
    std::smatch m;
    if (!std::regex_match(raw, m, num_re)) throw parse_error("bad proof line `" + raw + "`");
    ProofLine l;
    l.number = std::stoi(m[1]);
    std::string rest = trim(m[2]);
    std::string body;
    if (rest.rfind(":false", 0) == 0) {
        body = ":false";
        rest = trim(rest.substr(6));
    } else {
        // the statement ends at the close of its second list
        int depth = 0, lists = 0;
        size_t i = 0;
        for (; i < rest.size(); ++i) {
            if (rest[i] == '[') ++depth;
            if (rest[i] == ']' && --depth == 0 && ++lists == 2) {
                ++i;
                break;
            }
        }
        if (lists != 2) throw parse_error("bad statement in proof line `" + raw + "`");
        body = rest.substr(0, i);
        rest = trim(rest.substr(i));
    }
    l.stmt = stmt_or_false(body, nstr);
    if (rest == "*") {
        l.star = true;
        return l;
    }
    if (rest.empty()) return l;
    static const std::regex just_re(R"(^([a-z][a-z0-9]*)(\s*\[([a-z0-9 ]*)\])?(\s+\*)?$)");
    if (!std::regex_match(rest, m, just_re)) throw parse_error("bad justification `" + rest + "` in `" + raw + "`");
    l.label = m[1];
    if (m[2].matched) {
        std::istringstream in(m[3].str());
        std::string v;
        while (in >> v) {
            if (l.label == "disj") l.branches.push_back(v);
            else if (is_numeric(v) && v[0] != '-') l.cl.push_back(std::stoi(v));
            else throw parse_error("bad connection list in `" + raw + "`");
        }
    }
    l.star = m[4].matched;
    return l;
}

std::vector<ProofScript> parse_scripts(const std::string& text, int64_t nstr) {
    std::vector<std::string> lines;
    {
        std::istringstream in(text);
        std::string l;
        while (std::getline(in, l)) {
            if (!l.empty() && l.back() == '\r') l.pop_back();
            lines.push_back(l);
        }
    }
    static const std::regex head_re(R"(^(Axiom|Theorem|Lemma)\s+([a-z][a-z0-9]*)\.\s*$)");
    std::vector<ProofScript> out;
    size_t i = 0;
    auto skip_blank = [&] {
        while (i < lines.size() && trim(lines[i]).empty()) ++i;
    };
    skip_blank();
    while (i < lines.size()) {
        std::smatch m;
        std::string h = trim(lines[i]);
        if (!std::regex_match(h, m, head_re)) throw parse_error("expected a rule header, got `" + h + "` (line " + std::to_string(i + 1) + ")");
        ProofScript s;
        s.kind = parse_kind(m[1]);
        s.label = m[2];
        ++i;
        skip_blank();
        while (i < lines.size() && !is_dashes(trim(lines[i]))) {
            std::string t = trim(lines[i]);
            if (t.empty()) throw parse_error("blank line inside premise of " + s.label);
            s.premise.push_back(parse_statement(t, nstr));
            ++i;
        }
        if (i >= lines.size()) throw parse_error("missing separator in " + s.label);
        ++i;
        if (i >= lines.size() || trim(lines[i]).empty()) throw parse_error("missing conclusion in " + s.label);
        s.conclusion = stmt_or_false(trim(lines[i]), nstr);
        ++i;
        skip_blank();
        if (i < lines.size() && trim(lines[i]) == "Proof.") {
            s.has_proof = true;
            ++i;
            skip_blank();
            static const std::regex pl_re(R"(^\s*\d+\s.*$)");
            while (i < lines.size() && std::regex_match(lines[i], pl_re)) {
                s.lines.push_back(parse_proof_line(lines[i], nstr));
                ++i;
            }
            skip_blank();
        }
        out.push_back(std::move(s));
    }
    return out;
}

ProofScript parse_single_script(const std::string& text, int64_t nstr) {
    auto v = parse_scripts(text, nstr);
    if (v.size() != 1) throw parse_error("expected exactly one rule block, found " + std::to_string(v.size()));
    return v.front();
}

std::string render_statement_or_false(const std::optional<Statement>& s) { return s ? to_string(*s) : ":false"; }

std::string render_block(RuleKind kind, const std::string& label, const Program& premise,
                         const std::optional<Statement>& conclusion) {
    std::vector<std::string> body;
    for (auto& p : premise) body.push_back(to_string(p));
    std::string c = render_statement_or_false(conclusion);
    size_t w = c.size();
    for (auto& b : body) w = std::max(w, b.size());
    std::string out = std::string(kind_name(kind)) + " " + label + ".\n\n";
    for (auto& b : body) out += b + "\n";
    out += std::string(w, '-') + "\n" + c + "\n";
    return out;
}

std::string render_line(const ProofLine& l) {
    char num[16];
    std::snprintf(num, sizeof num, "%3d ", l.number);
    std::string out = num;
    std::string st = render_statement_or_false(l.stmt);
    if (l.label.empty()) {
        out += st;
        if (l.star) out += " *";
        return out;
    }
    out += st;
    out += std::string(st.size() + 2 > 25 ? 2 : 25 - st.size(), ' ');
    out += l.label;
    if (!l.branches.empty()) {
        out += " [";
        for (size_t k = 0; k < l.branches.size(); ++k) out += (k ? " " : "") + l.branches[k];
        out += "]";
    } else if (!l.cl.empty()) {
        out += " [";
        for (size_t k = 0; k < l.cl.size(); ++k) out += (k ? " " : "") + std::to_string(l.cl[k]);
        out += "]";
    }
    if (l.star) out += " *";
    return out;
}

std::string render_script(const ProofScript& s) {
    std::string out = render_block(s.kind, s.label, s.premise, s.conclusion);
    if (!s.has_proof) return out;
    out += "\nProof.\n";
    for (auto& l : s.lines) out += render_line(l) + "\n";
    return out;
}

} // namespace pecr
