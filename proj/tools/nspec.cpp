// nspec: needed narrowing and partial evaluation front end.
//
// Exit codes: 0 ok, 1 usage or I/O, 2 parse, 3 class violation, 4 PE control.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "nspec/deftree.hpp"
#include "nspec/error.hpp"
#include "nspec/narrowing.hpp"
#include "nspec/oracle.hpp"
#include "nspec/parser.hpp"
#include "nspec/peval.hpp"

namespace {

using nlohmann::ordered_json;
using namespace nspec;

constexpr const char* kVersion = "nspec 0.1.0";

enum Exit { kOk = 0, kUsage = 1, kParse = 2, kClass = 3, kControl = 4 };

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
}

// Parse errors carry the file name in front of line:column.
struct FileParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Program load(const std::string& path) {
  std::string text = read_file(path);
  try {
    return add_strict_equality(parse_program(text));
  } catch (const ParseError& e) {
    throw FileParseError(path + ":" + e.what());
  } catch (const ProgramError& e) {
    throw FileParseError(path + ": " + e.what());
  }
}

Term load_term(const std::string& text, const Program& p) {
  try {
    return parse_term(text, p.signature());
  } catch (const ParseError& e) {
    throw FileParseError("<term " + text + ">:" + e.what());
  }
}

ordered_json subst_json(const Substitution& s) {
  ordered_json j = ordered_json::object();
  for (const auto& [v, t] : s.bindings()) j[v] = t.to_string();
  return j;
}

ordered_json tree_json(const NarrowingTree& tree) {
  ordered_json nodes = ordered_json::array();
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    nodes.push_back({{"id", i}, {"term", tree.nodes[i].term.to_string()}, {"status", to_string(tree.nodes[i].status)}});
  }
  ordered_json arcs = ordered_json::array();
  for (const auto& a : tree.arcs) {
    arcs.push_back({{"from", a.from},
                    {"to", a.to},
                    {"position", a.step.position.path()},
                    {"rule", a.step.rule.label},
                    {"subst", subst_json(a.step.subst)}});
  }
  return {{"nodes", nodes}, {"arcs", arcs}};
}

ordered_json deftree_json(const DefinitionalTree& t) {
  ordered_json j;
  j["kind"] = t.is_leaf() ? "leaf" : "branch";
  j["pattern"] = t.pattern().to_string();
  if (t.is_leaf()) {
    j["rule"] = t.rule().label;
  } else {
    j["inductive_position"] = t.inductive_position().path();
    ordered_json kids = ordered_json::array();
    for (const auto& c : t.children()) kids.push_back(deftree_json(c));
    j["children"] = kids;
  }
  return j;
}

// ---------------------------------------------------------------------------

struct Options {
  std::size_t seed = 0;
  std::string file;
  std::string format = "text";
  std::string term;
  std::string target;
  std::string strategy = "needed";
  std::size_t max_steps = 25;
  std::size_t max_solutions = 100;
  std::size_t max_nodes = 100000;
  std::string tree_out;
  std::vector<std::string> calls;
  std::size_t depth = 2;
  std::string whistle = "on";
  std::string determinate = "on";
  std::size_t max_iters = 32;
  std::string out;
  std::string map_out;
  std::string operation;
  std::size_t k = 3;
};

int cmd_check(const Options& o) {
  Program p = load(o.file);
  auto seq = check_inductively_sequential(p);
  auto val = validate(p);
  bool uniform = is_uniform(p);
  if (o.format == "json") {
    ordered_json j;
    j["inductively_sequential"] = seq.sequential;
    j["failing"] = seq.failing;
    j["diagnostics"] = seq.diagnostics;
    j["left_linear"] = val.left_linear;
    j["constructor_based"] = val.constructor_based;
    j["orthogonal"] = val.orthogonal();
    j["overlaps"] = val.overlaps.size();
    j["uniform"] = uniform;
    j["rules"] = p.rules().size();
    ordered_json trees = ordered_json::object();
    for (const auto& op : p.defined_operations()) {
      if (seq.trees.count(op)) trees[op] = deftree_json(seq.trees.at(op));
    }
    j["trees"] = trees;
    std::cout << j.dump(2) << "\n";
  } else {
    auto yn = [](bool b) { return b ? "yes" : "no"; };
    std::cout << "rules: " << p.rules().size() << "\n";
    std::cout << "inductively sequential: " << yn(seq.sequential) << "\n";
    for (const auto& f : seq.failing) std::cout << "  " << f << ": " << seq.diagnostics.at(f) << "\n";
    std::cout << "left-linear: " << yn(val.left_linear) << "\n";
    std::cout << "constructor-based: " << yn(val.constructor_based) << "\n";
    std::cout << "orthogonal: " << yn(val.orthogonal()) << "\n";
    for (const auto& ov : val.overlaps) {
      std::cout << "  overlap " << p.rules()[ov.outer_rule].label << "/" << p.rules()[ov.inner_rule].label << " at "
                << ov.position.to_string() << " " << ov.mgu.to_string() << "\n";
    }
    std::cout << "uniform: " << yn(uniform) << "\n";
    for (const auto& op : p.defined_operations()) {
      if (!seq.trees.count(op)) continue;
      std::cout << "tree " << op << ":\n" << seq.trees.at(op).to_text(1);
    }
  }
  return kOk;
}

int cmd_tree(const Options& o) {
  Program p = load(o.file);
  TreeTable trees = require_trees(p);
  if (!o.operation.empty() && !trees.count(o.operation)) {
    std::cerr << "error: no definitional tree for '" << o.operation << "'\n";
    return kUsage;
  }
  for (const auto& op : p.defined_operations()) {
    if (!o.operation.empty() && op != o.operation) continue;
    std::cout << trees.at(op).to_text();
  }
  return kOk;
}

int cmd_eval(const Options& o) {
  Program p = load(o.file);
  Term goal = load_term(o.term, p);
  if (o.strategy == "rewrite") {
    auto trace = rewrite_normalize(goal, require_trees(p), o.max_steps);
    for (std::size_t i = 0; i < trace.terms.size(); ++i) {
      if (i > 0) {
        const auto& r = trace.redexes[i - 1];
        std::cout << "  -> [" << r.rule.label << " at " << r.position.to_string() << "] ";
      }
      std::cout << trace.terms[i].to_string() << "\n";
    }
    std::cout << (trace.normal_form ? "value: " : "stopped: ") << trace.terms.back().to_string() << "\n";
    return kOk;
  }
  SearchBounds b{o.max_steps, o.max_solutions, o.max_nodes};
  auto result = search(goal, p, o.strategy == "lazy" ? Strategy::Lazy : Strategy::Needed, b, o.seed);
  if (!o.tree_out.empty()) write_file(o.tree_out, tree_json(result.tree).dump(2) + "\n");
  if (o.format == "json") {
    ordered_json answers = ordered_json::array();
    for (const auto& a : result.answers) {
      answers.push_back({{"subst", subst_json(a.subst)},
                         {"result", a.result.to_string()},
                         {"steps", a.steps},
                         {"deterministic", a.deterministic}});
    }
    ordered_json j{{"goal", goal.to_string()}, {"answers", answers}, {"complete", result.complete},
                   {"nodes", result.tree.nodes.size()}};
    std::cout << j.dump(2) << "\n";
  } else {
    for (const auto& a : result.answers) {
      std::cout << a.subst.to_string() << " => " << a.result.to_string() << "  (" << a.steps << " steps)\n";
    }
    std::cout << result.answers.size() << " answer(s), " << result.tree.nodes.size() << " node(s), search "
              << (result.complete ? "complete" : "bounded") << "\n";
  }
  return kOk;
}

int cmd_uniform(const Options& o) {
  Program p = load(o.file);
  Program u = uniform_transform(p);
  std::string text = print_program(u);
  if (o.out.empty()) {
    std::cout << text;
  } else {
    write_file(o.out, text);
  }
  return kOk;
}

int cmd_peval(const Options& o) {
  Program p = load(o.file);
  std::vector<Term> roots;
  for (const auto& c : o.calls) roots.push_back(load_term(c, p));
  UnfoldPolicy policy;
  policy.depth = o.depth;
  policy.whistle = o.whistle == "on";
  policy.determinate = o.determinate == "on";
  policy.max_iters = o.max_iters;
  policy.seed = o.seed;
  PEResult r = pe_control(p, roots, policy);
  write_file(o.out, print_program(r.program));
  if (!o.map_out.empty()) {
    ordered_json m = ordered_json::object();
    for (const auto& [s, pat] : r.renaming.entries()) m[s.to_string()] = pat.to_string();
    write_file(o.map_out, m.dump(2) + "\n");
  }
  std::cout << "calls: " << r.calls.size() << ", rules: " << r.program.rules().size()
            << ", iterations: " << r.report.iterations << ", closed: " << (r.report.closed ? "yes" : "no") << "\n";
  for (const auto& [s, pat] : r.renaming.entries()) std::cout << "  " << s.to_string() << " => " << pat.to_string() << "\n";
  return kOk;
}

int cmd_oracle_rewrites(const Options& o) {
  Program p = load(o.file);
  bool ok = rewrites_to(p, load_term(o.term, p), load_term(o.target, p), o.max_steps);
  std::cout << (ok ? "reachable" : "unreachable") << "\n";
  return kOk;
}

int cmd_oracle_solutions(const Options& o) {
  Program p = load(o.file);
  auto sols = ground_solutions(p, load_term(o.term, p), o.k, o.max_steps);
  for (const auto& s : sols) std::cout << s.to_string() << "\n";
  std::cout << sols.size() << " solution(s)\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Needed narrowing and partial evaluation of inductively sequential programs", "nspec"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Options o;
  app.add_option("--seed", o.seed, "fresh-name counter seed");

  auto file_opt = [&](CLI::App* sub) { sub->add_option("file", o.file, "program file")->required(); };
  auto positive = CLI::PositiveNumber;

  auto* check = app.add_subcommand("check", "report program class");
  file_opt(check);
  check->add_option("--format", o.format)->check(CLI::IsMember({"text", "json"}));

  auto* tree = app.add_subcommand("tree", "print definitional trees");
  file_opt(tree);
  tree->add_option("-f,--function", o.operation, "only this operation");

  auto* eval = app.add_subcommand("eval", "narrow a goal");
  file_opt(eval);
  eval->add_option("-e,--expr", o.term, "goal term")->required();
  eval->add_option("--strategy", o.strategy)->check(CLI::IsMember({"needed", "lazy", "rewrite"}));
  eval->add_option("--max-steps", o.max_steps)->check(positive);
  eval->add_option("--max-solutions", o.max_solutions)->check(positive);
  eval->add_option("--max-nodes", o.max_nodes)->check(positive);
  eval->add_option("--tree", o.tree_out, "write the narrowing tree as JSON");
  eval->add_option("--format", o.format)->check(CLI::IsMember({"text", "json"}));

  auto* uniform = app.add_subcommand("uniform", "flatten nested patterns");
  file_opt(uniform);
  uniform->add_option("-o,--output", o.out);

  auto* peval = app.add_subcommand("peval", "specialize for a set of calls");
  file_opt(peval);
  peval->add_option("-s,--call", o.calls, "call to specialize")->required();
  peval->add_option("--depth", o.depth)->check(positive);
  peval->add_option("--whistle", o.whistle)->check(CLI::IsMember({"on", "off"}));
  peval->add_option("--determinate", o.determinate)->check(CLI::IsMember({"on", "off"}));
  peval->add_option("--max-iters", o.max_iters)->check(positive);
  peval->add_option("-o,--output", o.out)->required();
  peval->add_option("--map", o.map_out, "write the renaming as JSON");

  auto* oracle = app.add_subcommand("oracle", "brute-force checks");
  oracle->require_subcommand(1);
  auto* rew = oracle->add_subcommand("rewrites", "is TARGET reachable by rewriting");
  file_opt(rew);
  rew->add_option("-e,--expr", o.term)->required();
  rew->add_option("--target", o.target)->required();
  rew->add_option("--max-steps", o.max_steps)->check(positive);
  auto* sol = oracle->add_subcommand("solutions", "ground solutions of an equation");
  file_opt(sol);
  sol->add_option("-e,--expr", o.term)->required();
  sol->add_option("-k,--size", o.k)->check(positive);
  sol->add_option("--max-steps", o.max_steps)->check(positive);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (check->parsed()) return cmd_check(o);
    if (tree->parsed()) return cmd_tree(o);
    if (eval->parsed()) return cmd_eval(o);
    if (uniform->parsed()) return cmd_uniform(o);
    if (peval->parsed()) return cmd_peval(o);
    if (rew->parsed()) return cmd_oracle_rewrites(o);
    if (sol->parsed()) return cmd_oracle_solutions(o);
  } catch (const FileParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const ClassViolation& e) {
    std::cerr << "class violation: " << e.what() << "\n";
    return kClass;
  } catch (const ControlFailure& e) {
    std::cerr << "control failure: " << e.what() << "\n";
    for (const auto& u : e.uncovered()) std::cerr << "  uncovered: " << u << "\n";
    return kControl;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
