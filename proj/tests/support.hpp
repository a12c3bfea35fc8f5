#pragma once
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "pecr/kernel.hpp"

namespace testing {

inline std::filesystem::path root() { return PECR_SOURCE_DIR; }
inline std::filesystem::path theory_dir() { return root() / "theories"; }

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream b;
    b << in.rdbuf();
    return b.str();
}

inline std::shared_ptr<pecr::Theory> theory(const std::string& name, const pecr::MachParams& m = {}) {
    return std::make_shared<pecr::Theory>(pecr::load_theory(theory_dir(), name, m));
}

inline std::vector<std::string> corpus_order(const std::string& t) {
    std::ifstream in(root() / "corpus" / t / "ORDER");
    std::vector<std::string> out;
    for (std::string l; in >> l;) out.push_back(l);
    return out;
}

inline pecr::ProofScript corpus(const std::string& t, const std::string& label) {
    return pecr::parse_single_script(slurp(root() / "corpus" / t / (label + ".prf")));
}

inline std::vector<pecr::ProofScript> corpus_all(const std::string& t) {
    std::vector<pecr::ProofScript> out;
    for (auto& l : corpus_order(t)) out.push_back(corpus(t, l));
    return out;
}

// script cut after its first n lines
inline pecr::ProofScript prefix(pecr::ProofScript s, size_t n) {
    s.lines.resize(n);
    return s;
}

inline pecr::Option option_of(const pecr::ProofLine& l) {
    pecr::Option o;
    o.conclusion = l.stmt;
    o.label = l.label;
    o.cl = l.cl;
    o.branches = l.branches;
    o.prov = l.label == "disj" ? pecr::Provenance::Disj : pecr::Provenance::Rule;
    return o;
}

} // namespace testing
