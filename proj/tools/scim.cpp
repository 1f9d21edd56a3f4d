// Command-line front end: validate grammars (`check`), run
// interpretations or plain engine runs (`run`), and compare the matcher
// against the brute-force reference (`oracle`).

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "scim/scenario.hpp"
#include "scim/testkit.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cmd_check(const std::vector<std::string>& grammars) {
  std::vector<std::string> sources;
  for (const auto& g : grammars) sources.push_back(slurp(g));
  scim::ValidateResult vr = scim::compile_sources(sources);
  for (const auto& d : vr.diagnostics)
    std::cerr << scim::format(d) << "\n";
  return vr.ok() ? 0 : 1;
}

scim::Json branch_json(const scim::BranchState& b) { return b.dump(); }

int cmd_run(const std::vector<std::string>& grammars, const std::string& scene,
            const std::string& utterance, scim::EngineConfig cfg,
            const std::string& trace_path) {
  std::vector<std::string> sources;
  for (const auto& g : grammars) sources.push_back(slurp(g));
  scim::ValidateResult vr = scim::compile_sources(sources);
  if (!vr.ok()) {
    for (const auto& d : vr.diagnostics) std::cerr << scim::format(d) << "\n";
    return 1;
  }
  scim::Engine eng(vr.program);
  cfg.trace = !trace_path.empty();

  scim::Json trace;
  trace["config"] = {{"beam", cfg.beam},
                     {"max-firings", cfg.max_firings},
                     {"halt-on-type", cfg.halt_on_type},
                     {"scene", scene},
                     {"utterance", utterance}};

  int rc = 0;
  if (!scene.empty() || !utterance.empty()) {
    if (scene.empty() || utterance.empty()) {
      std::cerr << "run: --scene and --utterance must be given together\n";
      return 2;
    }
    std::vector<scim::Interpretation> interps;
    try {
      interps = scim::interpret(eng, slurp(scene), utterance, cfg);
    } catch (const scim::RuntimeError& e) {
      std::cerr << e.code() << ": " << e.what() << "\n";
      rc = 1;
    }
    int rank = 1;
    for (const auto& i : interps) {
      std::ostringstream line;
      line << rank++ << " " << std::fixed << std::setprecision(4) << i.score
           << " " << i.sense << " " << i.referent << " "
           << (i.goal.empty() ? "-" : i.goal);
      std::cout << line.str() << "\n";
      trace["interpretations"].push_back(line.str());
    }
  } else {
    scim::BranchState initial(&vr.program->hierarchy);
    scim::RunResult rr = eng.run(initial, cfg);
    std::cout << "branches " << rr.terminals.size() << " firings "
              << rr.total_firings << "\n";
    trace["engine"] = rr.trace;
    for (const auto& b : rr.terminals)
      trace["branches"].push_back(branch_json(b));
  }
  if (!trace_path.empty()) {
    std::ofstream out(trace_path);
    out << trace.dump(2) << "\n";
  }
  return rc;
}

int cmd_oracle(std::uint32_t seed, int cases) {
  int pass = 0;
  for (int i = 0; i < cases; ++i) {
    auto c = scim::testkit::generate_case(seed + static_cast<std::uint32_t>(i));
    scim::Engine eng(c.program);
    auto fast = scim::testkit::canonical(eng.enumerate_matches(c.state));
    auto slow =
        scim::testkit::canonical(scim::testkit::oracle_matches(eng, c.state));
    if (fast == slow)
      ++pass;
    else
      std::cerr << "mismatch at seed " << seed + i << "\n";
  }
  std::cout << pass << "/" << cases << " pass\n";
  return pass == cases ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"situated-construction interpreter"};
  app.require_subcommand(1);

  std::vector<std::string> grammars;
  std::string scene, utterance, halt_on_type, trace_path;
  int beam = 8, max_firings = 200, cases = 50;
  std::uint32_t seed = 0;
  bool seed_given = false;

  CLI::App* check = app.add_subcommand("check", "parse and validate grammars");
  check->add_option("grammar", grammars, "grammar files")->required();

  CLI::App* run = app.add_subcommand("run", "run an interpretation");
  run->add_option("grammar", grammars, "grammar files")->required();
  run->add_option("--scene", scene, "scene file");
  run->add_option("--utterance", utterance, "utterance text");
  run->add_option("--beam", beam, "beam width");
  run->add_option("--max-firings", max_firings, "firing budget");
  run->add_option("--halt-on-type", halt_on_type, "halt when a live instance of this type exists");
  run->add_option("--trace", trace_path, "write a JSON trace here");

  CLI::App* oracle = app.add_subcommand("oracle", "matcher vs. brute-force reference");
  oracle->add_option("--seed", seed, "base seed")->required();
  oracle->add_option("--cases", cases, "number of cases");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (check->parsed()) return cmd_check(grammars);
    if (run->parsed()) {
      scim::EngineConfig cfg;
      cfg.beam = beam;
      cfg.max_firings = max_firings;
      cfg.halt_on_type = halt_on_type;
      return cmd_run(grammars, scene, utterance, cfg, trace_path);
    }
    if (oracle->parsed()) return cmd_oracle(seed, cases);
  } catch (const scim::RuntimeError& e) {
    std::cerr << e.code() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return 2;
}
