#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "nspec/parser.hpp"

namespace nspec::test {

inline std::string corpus_path(const std::string& name) { return std::string(NSPEC_CORPUS_DIR) + "/" + name; }

inline std::string read_text(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Corpus program with strict equality added, as the CLI loads it.
inline Program corpus(const std::string& name) { return add_strict_equality(parse_program(read_text(corpus_path(name)))); }

inline Term term(const Program& p, const std::string& text) { return parse_term(text, p.signature()); }

}  // namespace nspec::test
