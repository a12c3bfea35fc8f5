#include "pecr/core.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace pecr {

void MachParams::validate() const {
    if (nchar <= 0 || nstr <= 0 || nlst <= 0 || nint <= 0 || nprem <= 0 || tcpu <= 0 || eps_digits <= 0)
        throw Error("InvalidMach", "all machine parameters must be positive");
    if (nprem > nlst) throw Error("InvalidMach", "nprem must not exceed nlst");
    if (eps_digits > 9) throw Error("InvalidMach", "eps_digits too large");
}

bool is_numeric(std::string_view t) {
    if (t.empty()) return false;
    size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
    if (i == t.size()) return false;
    for (; i < t.size(); ++i)
        if (t[i] < '0' || t[i] > '9') return false;
    return true;
}

bool is_variable_name(std::string_view t) {
    if (t.empty() || t[0] < 'a' || t[0] > 'z') return false;
    return std::all_of(t.begin(), t.end(), [](char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'); });
}

bool ConstSet::contains(std::string_view t) const {
    if (t == "-1" || t == "0" || t == "1") return true;
    return named_.find(t) != named_.end();
}

namespace {

struct Lexer {
    std::string_view s;
    size_t i = 0;
    int64_t nstr;

    void ws() {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    }
    bool at_end() {
        ws();
        return i >= s.size();
    }
    bool peek(char c) {
        ws();
        return i < s.size() && s[i] == c;
    }
    void expect(char c) {
        ws();
        if (i >= s.size() || s[i] != c)
            throw parse_error("expected '" + std::string(1, c) + "' at column " + std::to_string(i + 1) + " in `" +
                              std::string(s) + "`");
        ++i;
    }
    std::string word() {
        ws();
        size_t b = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '[' && s[i] != ']' && s[i] != '|') ++i;
        if (b == i) throw parse_error("expected a name at column " + std::to_string(b + 1) + " in `" + std::string(s) + "`");
        std::string w(s.substr(b, i - b));
        if ((int64_t)w.size() > nstr) throw parse_error("token longer than nstr: " + w);
        return w;
    }
    TokenList list() {
        expect('[');
        TokenList out;
        while (!peek(']')) {
            if (at_end()) throw parse_error("unterminated list in `" + std::string(s) + "`");
            std::string w = word();
            if (!is_numeric(w) && !is_variable_name(w)) throw parse_error("illegal token `" + w + "`");
            out.push_back(w);
        }
        expect(']');
        return out;
    }
    Statement statement() {
        Statement st;
        st.name = word();
        if (!is_variable_name(st.name)) throw parse_error("illegal program name `" + st.name + "`");
        st.ins = list();
        if (!peek('[')) throw parse_error("statement needs an input and an output list: `" + std::string(s) + "`");
        st.outs = list();
        return st;
    }
};

void append_list(std::string& out, const TokenList& l) {
    out += '[';
    if (l.empty()) {
        out += ' ';
    } else {
        for (size_t k = 0; k < l.size(); ++k) {
            if (k) out += ' ';
            out += l[k];
        }
    }
    out += ']';
}

} // namespace

Statement parse_statement(std::string_view line, int64_t nstr) {
    Lexer lx{line, 0, nstr};
    Statement st = lx.statement();
    if (!lx.at_end()) throw parse_error("trailing text in `" + std::string(line) + "`");
    return st;
}

Program parse_statement_run(std::string_view text, int64_t nstr) {
    Lexer lx{text, 0, nstr};
    Program p;
    while (!lx.at_end()) p.push_back(lx.statement());
    return p;
}

std::string to_string(const Statement& s) {
    std::string out = s.name;
    out += ' ';
    append_list(out, s.ins);
    out += ' ';
    append_list(out, s.outs);
    return out;
}

std::string to_string(const Program& p) {
    std::string out;
    for (auto& s : p) out += to_string(s) + "\n";
    return out;
}

Program parse_program(std::string_view text, int64_t nstr) {
    Program p;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        p.push_back(parse_statement(line, nstr));
    }
    return p;
}

std::string StructuralIssue::str() const {
    static const char* names[] = {"DuplicateOutput", "ForwardBinding", "ConstantAsOutput", "SelfBinding",
                                  "UnknownAtom", "RepeatedEmptyOutput", "IllegalLiteral"};
    std::string out = std::string(names[(int)kind]) + "(" + var;
    for (size_t l : lines) out += " " + std::to_string(l + 1);
    return out + ")";
}

Validation validate_program(const Program& p, const ConstSet& cst, const std::set<std::string>* known_atoms) {
    Validation v;
    using K = StructuralIssue::Kind;
    std::map<std::string, size_t> out_line;
    for (size_t k = 0; k < p.size(); ++k) {
        const auto& s = p[k];
        if (known_atoms && !known_atoms->count(s.name)) v.errors.push_back({K::UnknownAtom, s.name, {k}});
        for (auto& o : s.outs) {
            if (cst.contains(o) || is_numeric(o)) v.errors.push_back({K::ConstantAsOutput, o, {k}});
            auto it = out_line.find(o);
            if (it != out_line.end()) v.errors.push_back({K::DuplicateOutput, o, {it->second, k}});
            else out_line[o] = k;
            if (std::find(s.ins.begin(), s.ins.end(), o) != s.ins.end()) v.errors.push_back({K::SelfBinding, o, {k}});
        }
    }
    for (size_t k = 0; k < p.size(); ++k)
        for (auto& x : p[k].ins)
            if (is_numeric(x) && !cst.contains(x)) v.errors.push_back({K::IllegalLiteral, x, {k}});
    // an input may not name an output of the same or a later statement
    for (size_t k = 0; k < p.size(); ++k)
        for (auto& x : p[k].ins) {
            auto it = out_line.find(x);
            if (it != out_line.end() && it->second > k) v.errors.push_back({K::ForwardBinding, x, {k, it->second}});
        }
    for (size_t k = 0; k < p.size(); ++k) {
        if (!p[k].outs.empty()) continue;
        for (size_t l = 0; l < k; ++l)
            if (p[l] == p[k]) {
                v.warnings.push_back({K::RepeatedEmptyOutput, to_string(p[k]), {l, k}});
                break;
            }
    }
    return v;
}

TokenList unique(const TokenList& a) {
    TokenList out;
    for (auto& t : a)
        if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
    return out;
}

TokenList setminus(const TokenList& a, const TokenList& b) {
    TokenList out;
    for (auto& t : a)
        if (std::find(b.begin(), b.end(), t) == b.end()) out.push_back(t);
    return out;
}

TokenList intersection(const TokenList& a, const TokenList& b) {
    TokenList out;
    for (auto& t : a)
        if (std::find(b.begin(), b.end(), t) != b.end()) out.push_back(t);
    return out;
}

TokenList substitute(const TokenList& a, const Token& from, const Token& to) {
    TokenList out = a;
    std::replace(out.begin(), out.end(), from, to);
    return out;
}

TokenList piv(const Program& p) {
    TokenList ins, outs;
    for (auto& s : p) {
        ins.insert(ins.end(), s.ins.begin(), s.ins.end());
        outs.insert(outs.end(), s.outs.begin(), s.outs.end());
    }
    return unique(setminus(ins, outs));
}

TokenList free_vars(const Program& p, const ConstSet& cst) {
    TokenList out;
    for (auto& t : piv(p))
        if (!cst.contains(t) && !is_numeric(t)) out.push_back(t);
    return out;
}

TokenList io_names(const Program& p) {
    TokenList all;
    for (auto& s : p) {
        all.insert(all.end(), s.ins.begin(), s.ins.end());
        all.insert(all.end(), s.outs.begin(), s.outs.end());
    }
    return unique(all);
}

Program concat(const Program& p, const Program& q, const ConstSet& cst) {
    TokenList names = io_names(p), qouts;
    for (auto& s : q) qouts.insert(qouts.end(), s.outs.begin(), s.outs.end());
    TokenList clash = unique(intersection(qouts, names));
    if (!clash.empty()) {
        std::string v;
        for (auto& c : clash) v += (v.empty() ? "" : " ") + c;
        throw Error("NameClash", v);
    }
    Program r = p;
    r.insert(r.end(), q.begin(), q.end());
    auto val = validate_program(r, cst);
    if (!val.ok()) throw Error("StructuralError", val.errors.front().str());
    return r;
}

} // namespace pecr
