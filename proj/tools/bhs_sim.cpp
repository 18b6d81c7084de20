#include <atomic>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bhs/adversary.hpp"
#include "bhs/bhs.hpp"
#include "bhs/demo.hpp"
#include "bhs/explore.hpp"
#include "bhs/generate.hpp"
#include "bhs/graph.hpp"
#include "bhs/oracle.hpp"
#include "bhs/trace.hpp"

namespace {

using namespace bhs;
using ojson = nlohmann::ordered_json;

struct RunSpec {
  std::string graph_file;
  std::string family;
  int n = 0;
  int f = 1;
  int bh = -2; // -2: family default (far node when the algorithm hunts a hole)
  int root = -1;
  double edge_prob = 0.25;
  std::string algo;
  std::string adversary = "empty";
  std::string script_file;
  long long max_rounds = 0; // 0: per-algorithm default cap
  uint64_t seed = 0;
  std::string trace_file;
  std::string summary_file;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int roster_size(const std::string& algo, int f) {
  if (algo == "explore3") return 3;
  if (algo == "explore2") return 2;
  if (algo == "bhs1-9") return 9;
  if (algo == "bhs1-6") return 6;
  if (algo == "bhsf") return 6 * f;
  throw ConfigError("unknown algorithm: " + algo);
}

// documented worst-case bound for the algorithm, times a safety margin
long long default_cap(const std::string& algo, const Footprint& fp, int f) {
  long long m = fp.m();
  if (algo == "explore3") return 4 * 256LL * m * m;
  if (algo == "explore2") return 4 * 128LL * m * m;
  if (algo == "bhs1-9" || algo == "bhs1-6") return 4 * 1024LL * m * m;
  return 4 * fbhs_round_bound(fp, f);
}

Footprint load_footprint(const RunSpec& s, bool wants_hole) {
  if (!s.graph_file.empty()) {
    if (!s.family.empty())
      throw ConfigError("give either --graph or --family, not both");
    return parse_footprint(slurp(s.graph_file));
  }
  if (s.family.empty()) throw ConfigError("one of --graph or --family is required");
  FamilySpec spec;
  spec.kind = s.family;
  spec.n = s.n;
  spec.f = s.f;
  spec.seed = s.seed;
  spec.extra_edge_prob = s.edge_prob;
  spec.black_hole = s.bh != -2 ? s.bh : (wants_hole ? s.n - 1 : -1);
  return generate(spec);
}

Node pick_root(int requested, const Footprint& fp) {
  if (requested >= 0) return requested;
  return fp.black_hole == 0 ? 1 : 0;
}

int exit_for(Outcome::Kind k, bool demo) {
  switch (k) {
    case Outcome::Kind::Detected:
    case Outcome::Kind::Explored: return 0;
    case Outcome::Kind::Timeout: return 2;
    case Outcome::Kind::Stuck: return 3;
    case Outcome::Kind::AllDead: return demo ? 3 : 5;
  }
  return 70;
}

Outcome execute(const Footprint& fp, std::unique_ptr<Algorithm> algo,
                std::unique_ptr<Adversary> adv, int agents, Node root, RunConfig cfg,
                const std::string& trace_file) {
  std::vector<AgentId> roster(agents);
  std::iota(roster.begin(), roster.end(), 0);
  if (!trace_file.empty()) {
    std::ofstream tf(trace_file, std::ios::binary);
    if (!tf) throw ConfigError("cannot write " + trace_file);
    JsonlStreamSink sink(tf);
    return run_simulation(fp, std::move(algo), std::move(adv), roster, root, cfg, sink);
  }
  NullSink sink;
  return run_simulation(fp, std::move(algo), std::move(adv), roster, root, cfg, sink);
}

struct RunOutput {
  int code = 0;
  std::string line;
};

RunOutput run_one(const RunSpec& s) {
  auto algo = make_algorithm(s.algo);
  Footprint fp = load_footprint(s, algo->requires_black_hole());
  std::string script;
  if (!s.script_file.empty()) script = slurp(s.script_file);
  auto adv = make_adversary(s.adversary, script);
  RunConfig cfg;
  cfg.f = s.f;
  cfg.seed = s.seed;
  cfg.max_rounds = s.max_rounds > 0 ? s.max_rounds : default_cap(s.algo, fp, s.f);
  Outcome o = execute(fp, std::move(algo), std::move(adv), roster_size(s.algo, s.f),
                      pick_root(s.root, fp), cfg, s.trace_file);
  std::string summary = summary_json(o, fp.hash(), s.seed);
  if (!s.summary_file.empty()) {
    std::ofstream sf(s.summary_file, std::ios::binary);
    if (!sf) throw ConfigError("cannot write " + s.summary_file);
    sf << summary << '\n';
  }
  return {exit_for(o.kind, false), summary};
}

RunOutput guarded_run(const RunSpec& s) {
  try {
    return run_one(s);
  } catch (const ConfigError& e) {
    return {4, std::string("{\"error\":") + ojson(e.what()).dump() + "}"};
  } catch (const std::invalid_argument& e) {
    return {4, std::string("{\"error\":") + ojson(e.what()).dump() + "}"};
  } catch (const std::exception& e) {
    return {70, std::string("{\"error\":") + ojson(e.what()).dump() + "}"};
  }
}

RunSpec spec_from_json(const nlohmann::json& j) {
  RunSpec s;
  s.graph_file = j.value("graph", "");
  s.family = j.value("family", "");
  s.n = j.value("n", 0);
  s.f = j.value("f", 1);
  s.bh = j.value("bh", -2);
  s.root = j.value("root", -1);
  s.edge_prob = j.value("edge_prob", 0.25);
  s.algo = j.value("algo", "");
  s.adversary = j.value("adversary", "empty");
  s.script_file = j.value("script", "");
  s.max_rounds = j.value("max_rounds", 0LL);
  s.seed = j.value("seed", uint64_t{0});
  s.trace_file = j.value("trace", "");
  s.summary_file = j.value("summary", "");
  return s;
}

int do_batch(const std::string& batch_file) {
  std::istringstream in(slurp(batch_file));
  std::vector<RunSpec> specs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
      throw ConfigError("batch line " + std::to_string(lineno) + " is not a JSON object");
    specs.push_back(spec_from_json(j));
  }
  if (specs.empty()) throw ConfigError("batch file has no configs");

  std::vector<RunOutput> results(specs.size());
  std::atomic<size_t> next{0};
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, specs.size());
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&]() {
      for (;;) {
        size_t i = next.fetch_add(1);
        if (i >= specs.size()) return;
        results[i] = guarded_run(specs[i]);
      }
    });
  for (auto& t : pool) t.join();

  int code = 0;
  for (const auto& r : results) {
    std::cout << r.line << '\n';
    code = std::max(code, r.code);
  }
  return code;
}

int do_validate(const std::string& file) {
  Footprint fp = parse_footprint(slurp(file));
  std::cout << "ok n=" << fp.n << " m=" << fp.m() << " black_hole=" << fp.black_hole
            << " hash=" << fp.hash() << '\n';
  return 0;
}

int do_search(const RunSpec& s, long long depth, long long budget,
              const std::string& script_out) {
  auto proto = make_algorithm(s.algo);
  Footprint fp = load_footprint(s, proto->requires_black_hole());
  std::vector<AgentId> roster(roster_size(s.algo, s.f));
  std::iota(roster.begin(), roster.end(), 0);
  SearchConfig cfg;
  cfg.f = s.f;
  cfg.depth = depth;
  cfg.budget = budget;
  SearchResult res = exhaustive_adversary_search(fp, *proto, roster, pick_root(s.root, fp), cfg);
  ojson j;
  int code = 0;
  switch (res.kind) {
    case SearchResult::Kind::AllDetected:
      j["result"] = "all-detected";
      j["worst_rounds"] = res.worst_rounds;
      code = 0;
      break;
    case SearchResult::Kind::Counterexample:
      j["result"] = "counterexample";
      code = 3;
      break;
    case SearchResult::Kind::Budget:
      j["result"] = "budget-exhausted";
      code = 2;
      break;
  }
  j["expanded"] = res.expanded;
  if (res.kind == SearchResult::Kind::Counterexample) {
    if (!script_out.empty()) {
      std::ofstream out(script_out, std::ios::binary);
      if (!out) throw ConfigError("cannot write " + script_out);
      out << res.counterexample;
      j["script"] = script_out;
    } else {
      j["counterexample"] = res.counterexample;
    }
  }
  std::cout << j.dump() << '\n';
  return code;
}

int do_demo(const std::string& which, int n, int f, long long max_rounds,
            const std::string& trace_file, const std::string& summary_file) {
  Footprint fp;
  std::unique_ptr<Algorithm> algo;
  std::unique_ptr<Adversary> adv;
  int agents = 0;
  RunConfig cfg;
  if (which == "bhs1") {
    fp = make_bhs1_gadget(n);
    agents = 2 * fp.degree(0);
    algo = make_bhs1_demo();
    adv = make_bridge_protect_adversary();
    cfg.f = 1;
  } else if (which == "fbhs") {
    fp = make_kf2_clique(f);
    agents = 2 * f + 1;
    algo = make_fbhs_demo(f);
    adv = make_rules_adversary();
    cfg.f = f;
  } else {
    throw ConfigError("--which must be bhs1 or fbhs");
  }
  cfg.max_rounds = max_rounds;
  Outcome o = execute(fp, std::move(algo), std::move(adv), agents, pick_root(-1, fp), cfg,
                      trace_file);
  std::string summary = summary_json(o, fp.hash(), cfg.seed);
  if (!summary_file.empty()) {
    std::ofstream sf(summary_file, std::ios::binary);
    if (!sf) throw ConfigError("cannot write " + summary_file);
    sf << summary << '\n';
  }
  std::cout << summary << '\n';
  if (o.kind == Outcome::Kind::Detected)
    std::cerr << "unexpected detection: the construction should blind the team\n";
  return exit_for(o.kind, true);
}

void add_graph_flags(CLI::App* cmd, RunSpec& s) {
  cmd->add_option("--graph", s.graph_file, "footprint file (text form)");
  cmd->add_option("--family", s.family,
                  "generator: path ring clique random-connected bhs1-impossibility kf2-clique");
  cmd->add_option("--n", s.n, "node count for generated families");
  cmd->add_option("--f", s.f, "fault budget (also sizes kf2-clique and bhsf rosters)");
  cmd->add_option("--bh", s.bh, "black hole node for generated families (-1: none)");
  cmd->add_option("--root", s.root, "start node (default: lowest safe node)");
  cmd->add_option("--edge-prob", s.edge_prob, "extra edge probability for random-connected");
  cmd->add_option("--seed", s.seed, "seed for generators and the random adversary");
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulator for black-hole search on time-varying graphs"};
  app.require_subcommand(1);

  RunSpec run_spec;
  std::string batch_file;
  CLI::App* run_cmd = app.add_subcommand("run", "run one algorithm/adversary config");
  add_graph_flags(run_cmd, run_spec);
  run_cmd->add_option("--algo", run_spec.algo,
                      "algorithm: explore3 explore2 bhs1-9 bhs1-6 bhsf");
  run_cmd->add_option("--adversary", run_spec.adversary,
                      "adversary: empty replay random block-min-id bridge-protect-bhs1 rules-R1-R5");
  run_cmd->add_option("--script", run_spec.script_file, "removal script for --adversary replay");
  run_cmd->add_option("--max-rounds", run_spec.max_rounds,
                      "round cap (default: documented bound x4)");
  run_cmd->add_option("--trace", run_spec.trace_file, "write the event stream (JSONL)");
  run_cmd->add_option("--summary", run_spec.summary_file, "write the outcome summary (JSON)");
  run_cmd->add_option("--batch", batch_file,
                      "JSONL config file; one run per line, executed in parallel");

  std::string validate_file;
  CLI::App* validate_cmd = app.add_subcommand("validate", "check a footprint file");
  validate_cmd->add_option("file", validate_file, "footprint file")->required();

  RunSpec search_spec;
  long long search_depth = 0;
  long long search_budget = 2000000;
  std::string script_out;
  CLI::App* search_cmd =
      app.add_subcommand("search", "exhaustive adversary search on a small instance");
  add_graph_flags(search_cmd, search_spec);
  search_cmd->add_option("--algo", search_spec.algo, "algorithm under test");
  search_cmd->add_option("--depth", search_depth, "play length (default 4|E|^2)");
  search_cmd->add_option("--budget", search_budget, "node expansion budget");
  search_cmd->add_option("--script-out", script_out, "write a counterexample script here");

  std::string demo_which;
  int demo_n = 17;
  int demo_f = 1;
  long long demo_rounds = 100000;
  std::string demo_trace, demo_summary;
  CLI::App* demo_cmd = app.add_subcommand(
      "demo-impossibility", "run an understaffed team against its blinding adversary");
  demo_cmd->add_option("--which", demo_which, "bhs1 or fbhs")->required();
  demo_cmd->add_option("--n", demo_n, "requested gadget size for bhs1");
  demo_cmd->add_option("--f", demo_f, "fault budget for fbhs");
  demo_cmd->add_option("--max-rounds", demo_rounds, "round cap");
  demo_cmd->add_option("--trace", demo_trace, "write the event stream (JSONL)");
  demo_cmd->add_option("--summary", demo_summary, "write the outcome summary (JSON)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 4;
  }

  try {
    if (run_cmd->parsed()) {
      if (!batch_file.empty()) return do_batch(batch_file);
      if (run_spec.algo.empty()) throw ConfigError("--algo is required");
      RunOutput r = run_one(run_spec);
      std::cout << r.line << '\n';
      return r.code;
    }
    if (validate_cmd->parsed()) return do_validate(validate_file);
    if (search_cmd->parsed()) {
      if (search_spec.algo.empty()) throw ConfigError("--algo is required");
      return do_search(search_spec, search_depth, search_budget, script_out);
    }
    if (demo_cmd->parsed())
      return do_demo(demo_which, demo_n, demo_f, demo_rounds, demo_trace, demo_summary);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 70;
  }
  return 0;
}
