#include "cli.h"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "config.h"
#include "poolforge/corpus.h"
#include "poolforge/error.h"
#include "poolforge/eval.h"
#include "poolforge/io.h"
#include "poolforge/service.h"
#include "poolforge/session.h"
#include "poolforge/simulate.h"
#include "poolforge/synth.h"

namespace poolforge::cli {

namespace fs = std::filesystem;

namespace {

struct Context {
  json config;
  fs::path out;
  int threads = 1;
  std::ostream *log = nullptr;
};

fs::path need_path(const json &config, const char *section, const char *key) {
  const json &v = config.at(section).at(key);
  if (v.is_null()) {
    throw Error(ErrorCode::kInvalidConfig,
                std::string(section) + "." + key + " is required");
  }
  return v.get<std::string>();
}

std::optional<fs::path> opt_path(const json &config, const char *section,
                                 const char *key) {
  const json &v = config.at(section).at(key);
  if (v.is_null()) return std::nullopt;
  return fs::path(v.get<std::string>());
}

Analyzer analyzer_for(const json &config) {
  if (auto path = opt_path(config, "data", "stopwords")) {
    return Analyzer(load_stopwords(*path));
  }
  return Analyzer();
}

VectorStore vectors_for(const Context &ctx) {
  if (auto dir = opt_path(ctx.config, "data", "vectors")) {
    return load_vector_store(*dir);
  }
  if (auto corpus = opt_path(ctx.config, "data", "corpus")) {
    const auto docs = load_corpus(*corpus);
    return build_vector_store(docs, ctx.config["data"]["max_features"],
                              analyzer_for(ctx.config));
  }
  throw Error(ErrorCode::kInvalidConfig,
              "data.vectors or data.corpus is required");
}

std::vector<SystemRun> runs_for(const json &config, bool required) {
  auto path = opt_path(config, "data", "runs");
  if (!path) {
    if (required) {
      throw Error(ErrorCode::kInvalidConfig, "data.runs is required");
    }
    return {};
  }
  return load_runs(*path);
}

std::vector<CollectionResult> load_simulation(const Context &ctx) {
  fs::path path = ctx.out / "simulation.json";
  if (auto p = opt_path(ctx.config, "evaluate", "simulation")) path = *p;
  return collection_results_from_json(read_file(path));
}

void cmd_vectorize(const Context &ctx) {
  const auto docs = load_corpus(need_path(ctx.config, "data", "corpus"));
  const VectorStore store = build_vector_store(
      docs, ctx.config["data"]["max_features"], analyzer_for(ctx.config));
  write_vector_store(store, ctx.out);
  *ctx.log << "vectorized " << store.vectors.size() << " documents, "
           << store.vocabulary.size() << " terms -> " << ctx.out.string()
           << '\n';
}

void cmd_simulate(const Context &ctx) {
  const Qrels qrels = load_qrels(need_path(ctx.config, "data", "qrels"));
  const VectorStore vectors = vectors_for(ctx);
  const bool rds = ctx.config["simulation"]["seed"]["kind"] == "RDS";
  const auto runs = runs_for(ctx.config, rds);
  auto topics =
      ctx.config["simulation"]["topics"].get<std::vector<std::string>>();
  if (topics.empty()) topics = qrels.topics();

  std::vector<CollectionResult> results;
  for (const auto &name : ctx.config["simulation"]["strategies"]) {
    const auto strategy = parse_strategy(name.get<std::string>());
    const SimulationConfig cfg = simulation_config(ctx.config, strategy);
    results.push_back(
        run_collection(topics, qrels, vectors, cfg, runs, ctx.threads));
    const auto &r = results.back();
    *ctx.log << strategy_name(strategy) << ": " << r.kept_topics().size()
             << " topics kept, " << r.discarded_topics().size()
             << " discarded\n";
  }
  const int bins = ctx.config["simulation"]["prevalence_bins"];
  atomic_write_file(ctx.out / "curves.csv", curves_csv(results));
  atomic_write_file(ctx.out / "auc.csv", auc_csv(results));
  atomic_write_file(ctx.out / "bins.csv", bins_csv(results, bins));
  atomic_write_file(ctx.out / "simulation.json",
                    collection_results_to_json(results));
}

TauVariant tau_variant(const json &config) {
  return config["evaluate"]["tau_variant"] == "a" ? TauVariant::kA
                                                  : TauVariant::kB;
}

void cmd_evaluate(const Context &ctx) {
  const Qrels qrels = load_qrels(need_path(ctx.config, "data", "qrels"));
  const auto runs = runs_for(ctx.config, true);
  const auto sims = load_simulation(ctx);
  for (const auto &name : ctx.config["evaluate"]["modes"]) {
    const TauMode mode = parse_tau_mode(name.get<std::string>());
    std::vector<TauCurve> curves;
    for (const auto &sim : sims) {
      curves.push_back(
          tau_curve(sim, runs, qrels, mode, tau_variant(ctx.config)));
    }
    const fs::path file =
        ctx.out / ("tau_" + std::string(tau_mode_name(mode)) + ".csv");
    atomic_write_file(file, tau_csv(curves));
    *ctx.log << "wrote " << file.string() << '\n';
  }
}

void cmd_sweep(const Context &ctx) {
  const Qrels qrels = load_qrels(need_path(ctx.config, "data", "qrels"));
  const auto runs = runs_for(ctx.config, true);
  const auto sims = load_simulation(ctx);
  const auto strategy =
      parse_strategy(ctx.config["sweep"]["strategy"].get<std::string>());
  const TauMode mode =
      parse_tau_mode(ctx.config["sweep"]["mode"].get<std::string>());
  const CollectionResult *sim = nullptr;
  for (const auto &s : sims) {
    if (s.strategy == strategy) sim = &s;
  }
  if (!sim) {
    throw Error(ErrorCode::kInvalidConfig,
                "simulation has no results for strategy " +
                    std::string(strategy_name(strategy)));
  }
  const TauCurve curve =
      tau_curve(*sim, runs, qrels, mode, tau_variant(ctx.config));
  const auto sweep = beta_sweep(*sim, curve, sim->betas);
  atomic_write_file(ctx.out / "beta_sweep.csv", beta_sweep_csv(sweep));
  *ctx.log << "wrote " << (ctx.out / "beta_sweep.csv").string() << '\n';
}

void cmd_synth(const Context &ctx) {
  const SynthSpec spec = synth_spec(ctx.config);
  const auto collection = generate_collection(spec);
  write_collection(collection, ctx.out);
  *ctx.log << "synthesized " << collection.topics.size() << " topics, "
           << collection.documents.size() << " documents, "
           << collection.runs.size() << " runs -> " << ctx.out.string()
           << '\n';
}

void cmd_serve(const Context &ctx) {
  const auto docs = load_corpus(need_path(ctx.config, "data", "corpus"));
  const Qrels pools = load_qrels(need_path(ctx.config, "data", "qrels"));
  const auto runs = runs_for(ctx.config, true);
  const VectorStore vectors = vectors_for(ctx);
  const json &serve = ctx.config["serve"];

  SimulationConfig defaults = simulation_config(
      ctx.config, parse_strategy(serve["strategy"].get<std::string>()));
  defaults.seed.kind = SeedKind::kRDS;
  if (!serve["baseline_system"].get<std::string>().empty()) {
    defaults.rds_system = serve["baseline_system"];
  }
  const SystemRun &baseline = choose_rds_run(defaults, runs);

  std::map<std::string, std::string, std::less<>> texts;
  for (const auto &d : docs) texts.emplace(d.doc_id, d.text);
  SessionOptions options;
  if (auto dir = opt_path(ctx.config, "serve", "state_dir")) {
    options.state_dir = *dir;
  }
  options.snapshot_every = serve["snapshot_every"];
  SessionManager sessions(vectors, std::move(texts), options);
  for (const auto &topic : pools.topics()) {
    if (!baseline.ranking(topic)) {
      *ctx.log << "skipping topic " << topic << ": no ranking in "
               << baseline.system_id << '\n';
      continue;
    }
    sessions.register_topic(
        make_registration(topic, pools.pool(topic), baseline));
  }
  const std::size_t recovered = sessions.recover();

  fs::path static_dir;
  if (auto dir = opt_path(ctx.config, "serve", "static_dir")) static_dir = *dir;
  JudgingService service(sessions, defaults, static_dir);
  const int port = service.bind(serve["host"], serve["port"]);
  *ctx.log << "serving on http://" << serve["host"].get<std::string>() << ':'
           << port << "/v1 (" << recovered << " sessions recovered)"
           << std::endl;
  service.listen();
}

}  // namespace

int run(int argc, const char *const *argv, std::ostream &out,
        std::ostream &err) {
  CLI::App app{"Active-learning test collection construction"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::string> config_path;
  std::string out_dir = ".";
  std::vector<std::string> overrides;
  std::optional<int> threads;
  app.add_option("--config", config_path, "JSON config file")
      ->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--set", overrides, "override a config key (a.b=value)")
      ->allow_extra_args(false);
  app.add_option("--threads", threads, "worker threads")
      ->check(CLI::PositiveNumber);

  using Command = void (*)(const Context &);
  const std::vector<std::tuple<const char *, const char *, Command>> commands = {
      {"vectorize", "build TF-IDF vectors for a corpus", cmd_vectorize},
      {"simulate", "run the active-learning simulation", cmd_simulate},
      {"evaluate", "rank systems with simulated qrels, write tau curves",
       cmd_evaluate},
      {"sweep", "correlate F_beta with tau across betas", cmd_sweep},
      {"serve", "run the live judging service", cmd_serve},
      {"synth", "generate a synthetic test collection", cmd_synth},
  };
  Command selected = nullptr;
  for (const auto &[name, help, fn] : commands) {
    auto *sub = app.add_subcommand(name, help);
    sub->callback([&selected, fn = fn] { selected = fn; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e, out, err);
  }

  try {
    Context ctx;
    ctx.config =
        resolve_config(config_path, overrides, std::getenv("POOLFORGE_SEED"));
    ctx.threads = threads ? *threads : ctx.config["threads"].get<int>();
    ctx.out = out_dir;
    ctx.log = &out;
    fs::create_directories(ctx.out);
    selected(ctx);
  } catch (const Error &e) {
    err << "poolforge: " << error_code_name(e.code()) << ": " << e.what()
        << '\n';
    return 1;
  } catch (const std::exception &e) {
    err << "poolforge: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace poolforge::cli
