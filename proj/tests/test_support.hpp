#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "cridx/defexpr.hpp"

namespace cridx::testing {

inline std::string corpus_path(const std::string& stem) { return std::string(CRIDX_CORPUS_DIR) + "/" + stem + ".json"; }

inline DomainSpec load_corpus(const std::string& stem) {
    std::ifstream in(corpus_path(stem));
    std::stringstream ss;
    ss << in.rdbuf();
    return load_domain_config(ss.str());
}

inline DomainSpec make_spec(const std::string& rho, int n, int count = 128) {
    DomainSpec spec;
    spec.n = n;
    spec.rho = parse_defining_function(rho, n);
    spec.sampling.count = count;
    return spec;
}

/// Corpus domains used by the property suites.
inline const char* const kCorpus[] = {"ball",        "cylinder",    "cylinder_pluriharmonic", "quartic", "quartic3",
                                      "quartic_tube", "sextic_tube", "twisted_quartic"};

}  // namespace cridx::testing
