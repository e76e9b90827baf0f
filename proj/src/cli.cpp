#include "cclab/cli.hpp"

#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "cclab/checkers.hpp"
#include "cclab/fixtures.hpp"
#include "cclab/history_json.hpp"
#include "cclab/sim.hpp"

namespace cclab {

namespace {

constexpr int kOk = 0;
constexpr int kInconsistent = 1;
constexpr int kError = 2;

struct CommonFlags {
  std::string graphs;
  std::string inter_graph;
  unsigned d = 1;
  unsigned m = 0;
  std::string d_by_kind;
  std::size_t max_search = 16;
  std::string format = "json";
  std::optional<std::uint64_t> seed;
};

InterOrderOptions inter_options(const CommonFlags& f) {
  InterOrderOptions o;
  o.d = f.d;
  if (f.m > 0) o.multiplicity_m = f.m;
  std::stringstream ss(f.d_by_kind);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--d-by-kind expects kind=hops, got " + item);
    o.d_by_kind[parse_tag_kind(item.substr(0, eq))] = static_cast<unsigned>(std::stoul(item.substr(eq + 1)));
  }
  return o;
}

bool needs_graphs(ModelId m) {
  return m == ModelId::IntraCausal || m == ModelId::IntraPRAM || m == ModelId::IntraSequential ||
         m == ModelId::IntraLinearizable;
}

ModelId model_for(Protocol p) {
  switch (p) {
    case Protocol::EventualP: return ModelId::Eventual;
    case Protocol::CausalP: return ModelId::Causal;
    case Protocol::IntraCausalP: return ModelId::IntraCausal;
    case Protocol::InterCausalP: return ModelId::InterCausal;
  }
  return ModelId::Causal;
}

std::string fixed(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << v;
  return os.str();
}

void print_verdicts_text(const nlohmann::json& verdicts, std::ostream& out) {
  for (const auto& v : verdicts) {
    out << std::left << std::setw(20) << v["model"].get<std::string>()
        << (v["consistent"].get<bool>() ? "consistent" : "INCONSISTENT");
    if (v.contains("violation")) {
      const auto& c = v["violation"];
      out << "  " << c["kind"].get<std::string>();
      if (c.contains("process")) out << " at " << c["process"].get<std::string>();
      if (!c["ops"].empty()) {
        out << ":";
        for (const auto& id : c["ops"]) out << " " << id.get<std::string>();
      }
    }
    out << "\n";
  }
}

int cmd_check(const std::string& path, const std::vector<std::string>& models, const CommonFlags& f,
              std::ostream& out) {
  History h = history_from_json(read_json_file(path));
  auto problems = validate_history(h);
  if (!problems.empty()) {
    throw HistoryError("invalid history: " + problems.front().code + " " + problems.front().detail);
  }
  std::vector<ModelId> ids;
  for (const auto& m : models) {
    if (m == "all") {
      // Without an inter graph "all" means every model that can be decided.
      for (ModelId id : all_models()) {
        if (id != ModelId::InterCausal || !f.inter_graph.empty()) ids.push_back(id);
      }
    } else {
      ids.push_back(parse_model(m));
    }
  }
  std::optional<IntraGraphs> graphs;
  if (!f.graphs.empty()) graphs = intra_graphs_from_json(read_json_file(f.graphs), h);
  std::optional<InterDepGraph> inter;
  if (!f.inter_graph.empty()) inter = inter_graph_from_json(read_json_file(f.inter_graph));

  CheckContext ctx;
  ctx.inter_opts = inter_options(f);
  ctx.max_search = f.max_search;
  if (inter) ctx.inter = &*inter;
  IntraGraphs built;
  bool all_ok = true;
  nlohmann::json verdicts = nlohmann::json::array();
  for (ModelId m : ids) {
    if (needs_graphs(m)) {
      if (graphs) {
        ctx.graphs = &*graphs;
      } else {
        if (built.empty()) built = build_intra_graphs(h);
        ctx.graphs = &built;
      }
    }
    if (m == ModelId::InterCausal && !inter) throw std::invalid_argument("InterCausal needs --inter-graph");
    Verdict v = check(h, m, ctx);
    all_ok = all_ok && v.consistent;
    verdicts.push_back(verdict_to_json(v, h));
  }
  if (f.format == "text") {
    print_verdicts_text(verdicts, out);
  } else {
    out << (verdicts.size() == 1 ? verdicts[0] : verdicts).dump(2) << "\n";
  }
  return all_ok ? kOk : kInconsistent;
}

Scenario load_scenario(const std::string& path, const CommonFlags& f) {
  Scenario sc = scenario_from_json(read_json_file(path));
  if (f.seed) sc.seed = *f.seed;
  if (!f.inter_graph.empty()) sc.inter_graph = inter_graph_from_json(read_json_file(f.inter_graph));
  return sc;
}

int cmd_simulate(const std::string& path, const std::string& protocol, const std::string& history_out,
                 const CommonFlags& f, std::ostream& out) {
  Scenario sc = load_scenario(path, f);
  if (!protocol.empty()) sc.protocol = parse_protocol(protocol);
  SimResult r = run(sc);
  nlohmann::json doc{{"history", history_to_json(r.history)},
                     {"metrics", metrics_to_json(r.metrics)},
                     {"dependencies", dependencies_to_json(r.dependencies)}};
  if (!history_out.empty()) write_json_file(history_out, history_to_json(r.history));
  if (f.format == "text") {
    out << "protocol " << to_string(sc.protocol) << "  mean latency " << fixed(r.metrics.mean_latency)
        << "  max latency " << fixed(r.metrics.max_latency) << "  converged "
        << (r.metrics.converged ? "yes" : "no") << "\n";
    for (const auto& v : doc["metrics"]["visibility"]) {
      out << "  " << std::left << std::setw(14) << v["write"].get<std::string>() << std::setw(6)
          << v["replica"].get<std::string>() << fixed(v["latency"].get<double>()) << "\n";
    }
  } else {
    out << doc.dump(2) << "\n";
  }
  return kOk;
}

nlohmann::json compare_row(const Scenario& base, Protocol p, const CommonFlags& f) {
  Scenario sc = base;
  sc.protocol = p;
  if (p == Protocol::InterCausalP && !sc.inter_graph) {
    throw std::invalid_argument("inter-causal comparison needs an inter graph in the scenario or --inter-graph");
  }
  SimResult r = run(sc);

  CheckContext ctx;
  ctx.max_search = f.max_search;
  ctx.inter_opts = sc.inter_opts;
  if (sc.inter_graph) ctx.inter = &*sc.inter_graph;
  IntraGraphs graphs = build_intra_graphs(r.history);
  ctx.graphs = &graphs;

  auto verdict = [&](ModelId m) -> nlohmann::json {
    try {
      return check(r.history, m, ctx).consistent;
    } catch (const SearchLimitExceeded& e) {
      return nullptr;
    }
  };

  nlohmann::json writes = nlohmann::json::object();
  for (const auto& v : r.metrics.visibility) writes[v.write][v.replica] = to_double(v.latency());
  return {{"protocol", to_string(p)},
          {"mean_latency", r.metrics.mean_latency},
          {"max_latency", r.metrics.max_latency},
          {"mean_dependencies", r.metrics.mean_dependencies},
          {"converged", r.metrics.converged},
          {"model", to_string(model_for(p))},
          {"model_check", verdict(model_for(p))},
          {"causal_check", verdict(ModelId::Causal)},
          {"latency", writes}};
}

std::string verdict_cell(const nlohmann::json& v) {
  if (v.is_null()) return "n/a";
  return v.get<bool>() ? "pass" : "fail";
}

int cmd_compare(const std::string& path, const std::string& protocols, const CommonFlags& f, std::ostream& out) {
  Scenario sc = load_scenario(path, f);
  std::vector<Protocol> list;
  std::stringstream ss(protocols);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) list.push_back(parse_protocol(item));
  }
  if (list.empty()) throw std::invalid_argument("--protocols lists no protocol");
  nlohmann::json rows = nlohmann::json::array();
  for (Protocol p : list) rows.push_back(compare_row(sc, p, f));
  if (f.format == "text") {
    out << std::left << std::setw(14) << "protocol" << std::setw(10) << "mean" << std::setw(10) << "max"
        << std::setw(8) << "deps" << std::setw(11) << "converged" << std::setw(8) << "model"
        << "causal\n";
    for (const auto& r : rows) {
      out << std::left << std::setw(14) << r["protocol"].get<std::string>() << std::setw(10)
          << fixed(r["mean_latency"].get<double>()) << std::setw(10) << fixed(r["max_latency"].get<double>())
          << std::setw(8) << fixed(r["mean_dependencies"].get<double>()) << std::setw(11)
          << (r["converged"].get<bool>() ? "yes" : "no") << std::setw(8) << verdict_cell(r["model_check"])
          << verdict_cell(r["causal_check"]) << "\n";
    }
  } else {
    out << rows.dump(2) << "\n";
  }
  return kOk;
}

int cmd_graph(const std::string& path, std::ostream& out) {
  History h = history_from_json(read_json_file(path));
  out << intra_graphs_to_json(build_intra_graphs(h), h).dump(2) << "\n";
  return kOk;
}

int cmd_fixtures(const std::string& name, const std::string& dir, std::ostream& out) {
  FixtureBundle b = fixture(name);
  nlohmann::json files;
  files["history"] = history_to_json(b.history);
  if (b.graphs) files["graphs"] = intra_graphs_to_json(*b.graphs, b.history);
  if (b.inter) files["inter_graph"] = inter_graph_to_json(*b.inter);
  if (b.scenario) files["scenario"] = scenario_to_json(*b.scenario);
  if (dir.empty()) {
    out << files.dump(2) << "\n";
    return kOk;
  }
  std::filesystem::create_directories(dir);
  nlohmann::json written = nlohmann::json::array();
  for (const auto& [kind, doc] : files.items()) {
    auto path = (std::filesystem::path(dir) / (name + "." + kind + ".json")).string();
    write_json_file(path, doc);
    written.push_back(path);
  }
  out << written.dump(2) << "\n";
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Checks histories against causal consistency variants and simulates wall replication", "cclab"};
  app.require_subcommand(1);
  CommonFlags f;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--max-search", f.max_search, "largest ground set searched exhaustively");
    sub->add_option("--format", f.format, "json or text")->check(CLI::IsMember({"json", "text"}));
  };
  auto add_inter = [&](CLI::App* sub) {
    sub->add_option("--inter-graph", f.inter_graph, "inter-process graph JSON");
    sub->add_option("--d", f.d, "hop bound");
    sub->add_option("--m", f.m, "common-friend multiplicity (0 disables)");
    sub->add_option("--d-by-kind", f.d_by_kind, "per-kind hop bounds, e.g. post=2,add_friend=3");
  };

  std::string input;
  std::vector<std::string> models;
  auto* check_cmd = app.add_subcommand("check", "check a history against consistency models");
  check_cmd->add_option("history", input, "history JSON")->required();
  check_cmd->add_option("--model", models, "model name, repeatable, or 'all'")->required();
  check_cmd->add_option("--graphs", f.graphs, "intra dependency graphs JSON (built from tags if absent)");
  add_inter(check_cmd);
  add_common(check_cmd);

  std::string protocol;
  std::string history_out;
  auto* sim_cmd = app.add_subcommand("simulate", "run a scenario");
  sim_cmd->add_option("scenario", input, "scenario JSON")->required();
  sim_cmd->add_option("--protocol", protocol, "overrides the scenario's protocol");
  sim_cmd->add_option("--history-out", history_out, "also write the emitted history here");
  sim_cmd->add_option("--seed", f.seed, "overrides the scenario's seed");
  add_inter(sim_cmd);
  add_common(sim_cmd);

  std::string protocols = "eventual,causal,intra-causal";
  auto* cmp_cmd = app.add_subcommand("compare", "run a scenario under several protocols");
  cmp_cmd->add_option("scenario", input, "scenario JSON")->required();
  cmp_cmd->add_option("--protocols", protocols, "comma-separated protocol list");
  cmp_cmd->add_option("--seed", f.seed, "overrides the scenario's seed");
  add_inter(cmp_cmd);
  add_common(cmp_cmd);

  auto* graph_cmd = app.add_subcommand("graph", "build intra dependency graphs from a tagged history");
  graph_cmd->add_option("history", input, "history JSON")->required();

  std::string name;
  std::string dir;
  auto* fix_cmd = app.add_subcommand("fixtures", "write a reference fixture");
  fix_cmd->add_option("name", name, "one of fix-a, fix-b, fix-c, fix-d, remove-friend")->required();
  fix_cmd->add_option("--out", dir, "directory for the files (stdout if absent)");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kError;
  }

  try {
    if (*check_cmd) return cmd_check(input, models, f, out);
    if (*sim_cmd) return cmd_simulate(input, protocol, history_out, f, out);
    if (*cmp_cmd) return cmd_compare(input, protocols, f, out);
    if (*graph_cmd) return cmd_graph(input, out);
    if (*fix_cmd) return cmd_fixtures(name, dir, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}

}  // namespace cclab
