// b2v: building graph embedding pipeline.
//
// Exit codes: 0 success, 2 usage error, 3 input data error, 4 internal
// invariant violation.

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "b2v/error.hpp"
#include "b2v/pipeline.hpp"
#include "b2v/step.hpp"
#include "b2v/text.hpp"

namespace {

using namespace b2v;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitInvariant = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Command {
  CLI::App* app = nullptr;
  std::vector<std::string> keys;
  std::vector<std::string> required;
  std::map<std::string, std::string> given;
};

std::string flag_name(const std::string& key) {
  std::string out = key;
  for (auto& c : out) {
    if (c == '_') c = '-';
  }
  return "--" + out;
}

Command& add_command(CLI::App& root, std::map<std::string, Command>& commands, const std::string& name,
                     const std::string& help, std::vector<std::string> keys,
                     std::vector<std::string> required) {
  auto& cmd = commands[name];
  cmd.app = root.add_subcommand(name, help);
  cmd.keys = std::move(keys);
  cmd.required = std::move(required);
  const RunConfig defaults;
  for (const auto& key : cmd.keys) {
    auto* opt = cmd.app->add_option_function<std::string>(
        flag_name(key), [&cmd, key](const std::string& v) { cmd.given[key] = v; },
        std::string(RunConfig::describe(key)));
    opt->default_str(defaults.get(key));
    opt->type_name(key == "strict" || key == "deterministic" || key == "shrink_window" ? "BOOL" : "VALUE");
  }
  cmd.keys.push_back("workers");
  cmd.app->add_option_function<std::string>(
      "--workers", [&cmd](const std::string& v) { cmd.given["workers"] = v; },
      std::string(RunConfig::describe("workers")))
      ->default_str("1");
  return cmd;
}

RunConfig resolve(const Command& cmd, const std::string& config_path) {
  RunConfig cfg;
  try {
    if (!config_path.empty()) cfg.load_file(config_path);
    for (const auto& [key, value] : cmd.given) cfg.set(key, value);
    cfg.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  for (const auto& key : cmd.required) {
    if (cfg.get(key).empty()) throw UsageError("missing required setting '" + key + "' (" + flag_name(key) + ")");
  }
  return cfg;
}

void echo_config(const std::string& command, const RunConfig& cfg) {
  spdlog::info("b2v {} effective config:", command);
  for (auto line : split(cfg.to_text(), '\n')) {
    if (!line.empty()) spdlog::info("  {}", std::string(line));
  }
}

void warn_all(const Diagnostics& d) {
  for (const auto& m : d.messages) spdlog::warn("{}", m);
}

void print_counts(const PropertyGraph& g) {
  std::cout << "nodes\t" << g.node_count() << "\nedges\t" << g.edge_count() << "\n";
  for (const auto& [label, n] : label_counts(g)) std::cout << "label\t" << label << "\t" << n << "\n";
}

int cmd_parse(const RunConfig& cfg, bool dump) {
  const auto model = step::parse_step_file(cfg.ifc);
  std::map<std::string, std::size_t> types;
  for (const auto& [id, e] : model.entities()) ++types[e.type_name];
  std::cout << "entities\t" << model.entities().size() << "\n";
  for (const auto& [t, n] : types) std::cout << "type\t" << t << "\t" << n << "\n";
  const auto dangling = step::validate_references(model);
  std::cout << "dangling\t" << dangling.size() << "\n";
  for (const auto& d : dangling) spdlog::warn("#{} references missing #{}", d.from, d.missing);
  if (dump) {
    if (cfg.out.empty()) {
      std::cout << step::write_step(model);
    } else {
      write_file_atomic(cfg.out, step::write_step(model));
    }
  }
  return 0;
}

int cmd_graph(const RunConfig& cfg) {
  const auto built = build_building_graph(cfg);
  warn_all(built.diagnostics);
  write_file_atomic(cfg.out, write_graph(built.graph));
  print_counts(built.graph);
  std::cout << "skipped_non_object\t" << built.report.skipped_non_object << "\n";
  return 0;
}

int cmd_snapshot(const RunConfig& cfg) {
  Diagnostics diag;
  const auto tg = build_temporal_graph(cfg, &diag);
  warn_all(diag);
  save_temporal(tg, cfg.out);
  const auto tensor = adjacency_tensor(tg);
  if (!cfg.tensor_dir.empty()) write_tensor(tensor, cfg.tensor_dir);
  std::cout << "snapshots\t" << tensor.T << "\nnodes\t" << tensor.N << "\nrecords\t" << tensor.records.size()
            << "\n";
  return 0;
}

int cmd_embed(const RunConfig& cfg) {
  const auto graph = load_embedding_input(cfg);
  const auto result = run_embedding(graph, cfg);
  save_checkpoint(result.embedding, cfg.out);
  if (!cfg.export_dir.empty()) export_projector(result.embedding, &graph, cfg.export_dir);
  std::cout << "vocabulary\t" << result.embedding.size() << "\nwalks\t" << result.corpus.walks.size()
            << "\npairs\t" << result.report.total_pairs << "\n";
  for (std::size_t e = 0; e < result.report.epoch_loss.size(); ++e) {
    std::cout << "epoch\t" << e + 1 << "\tloss\t" << format_double(result.report.epoch_loss[e]) << "\n";
  }
  return 0;
}

int cmd_query(const RunConfig& cfg) {
  const auto emb = load_checkpoint(cfg.checkpoint);
  const auto res = knn(emb, NodeId::parse(cfg.node), cfg.k, parse_filter(cfg.filter), cfg.workers);
  for (std::size_t i = 0; i < res.neighbors.size(); ++i) {
    std::cout << i + 1 << "\t" << res.neighbors[i].node.str() << "\t" << format_double(res.neighbors[i].similarity)
              << "\n";
  }
  return 0;
}

int cmd_predict(const RunConfig& cfg) {
  const auto emb = load_checkpoint(cfg.checkpoint);
  const auto v = predict_comfort(emb, read_labels(cfg.labels), NodeId::parse(cfg.node), cfg.k);
  std::cout << "[" << v[0] << "," << v[1] << "," << v[2] << "]\t" << comfort_name(from_one_hot(v)) << "\n";
  return 0;
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("b2v");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("BUILD2VEC_LOG")) {
    const auto level = spdlog::level::from_str(env);
    // from_str maps unknown names to off; only accept real ones.
    if (level != spdlog::level::off || std::string_view(env) == "off") spdlog::set_level(level);
  }
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();

  CLI::App app{"b2v: embed building information models as graphs"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  app.add_option("--config", config_path, "key = value config file; flags override its values")
      ->check(CLI::ExistingFile);

  const std::vector<std::string> walk_keys{"p", "q", "walk_length", "walks_per_node", "seed", "alias_entry_cap"};
  const std::vector<std::string> train_keys{"dimension", "window",        "negatives",     "epochs",   "initial_lr",
                                            "min_lr",    "deterministic", "shrink_window", "subsample"};
  std::map<std::string, Command> commands;
  auto& parse = add_command(app, commands, "parse", "Parse an IFC STEP file and summarize it", {"ifc", "out"}, {"ifc"});
  bool dump = false;
  parse.app->add_flag("--dump", dump, "print the re-serialized entity table (or write it to --out)");

  add_command(app, commands, "graph", "Build the building property graph",
              {"ifc", "footprints", "sensors", "out", "strict", "cell_size", "adjacency", "sensor_radius",
               "anchor_radius"},
              {"ifc", "out"});
  add_command(app, commands, "snapshot", "Build time-step snapshots and the adjacency tensor",
              {"graph", "readings", "fixes", "out", "tensor_dir", "step", "occupant_radius", "max_gap"},
              {"graph", "out"});
  std::vector<std::string> embed_keys{"graph", "out", "export_dir", "flatten"};
  embed_keys.insert(embed_keys.end(), walk_keys.begin(), walk_keys.end());
  embed_keys.insert(embed_keys.end(), train_keys.begin(), train_keys.end());
  add_command(app, commands, "embed", "Generate walks and train node embeddings", embed_keys, {"graph", "out"});
  add_command(app, commands, "query", "List the nearest neighbors of a node", {"checkpoint", "node", "k", "filter"},
              {"checkpoint", "node"});
  add_command(app, commands, "predict", "Predict a comfort label by nearest-neighbor vote",
              {"checkpoint", "labels", "node", "k"}, {"checkpoint", "labels", "node"});

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  std::string name;
  for (auto& [n, cmd] : commands) {
    if (cmd.app->parsed()) name = n;
  }
  try {
    const auto cfg = resolve(commands.at(name), config_path);
    echo_config(name, cfg);
    if (name == "parse") return cmd_parse(cfg, dump);
    if (name == "graph") return cmd_graph(cfg);
    if (name == "snapshot") return cmd_snapshot(cfg);
    if (name == "embed") return cmd_embed(cfg);
    if (name == "query") return cmd_query(cfg);
    if (name == "predict") return cmd_predict(cfg);
  } catch (const UsageError& e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return e.code() == Errc::InvariantViolation ? kExitInvariant : kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    spdlog::error("IoFailure: {}", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    spdlog::error("internal error: {}", e.what());
    return kExitInvariant;
  }
  return kExitUsage;
}
