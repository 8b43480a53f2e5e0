#include <atomic>
#include <charconv>
#include <csignal>
#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "ssbench/annosrv.hpp"
#include "ssbench/config.hpp"
#include "ssbench/corpus.hpp"
#include "ssbench/eval.hpp"
#include "ssbench/lint.hpp"
#include "ssbench/llm.hpp"
#include "ssbench/parallel.hpp"
#include "ssbench/prompt.hpp"
#include "ssbench/starsow.hpp"
#include "ssbench/util.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace ssbench;

namespace {

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string backend;
  std::optional<std::size_t> jobs;
  bool json_errors = false;
  std::vector<std::string> overrides;
};

const std::vector<std::string> kPathKeys = {"backend.fixtures", "pipeline.seed_corpus", "pipeline.checkpoint_dir",
                                            "lint.lexicon_dir", "server.db", "server.static_dir"};

std::string toml_string(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out + "\"";
}

// Config file, then --set overrides, then the dedicated flags.
Config build_config(const Globals& g) {
  Config cfg;
  if (!g.config_path.empty()) {
    cfg = Config::load(g.config_path);
    fs::path base = fs::absolute(g.config_path).parent_path();
    for (const auto& key : kPathKeys) {
      if (!cfg.has(key)) continue;
      fs::path p = cfg.get_string(key, "");
      if (!p.empty() && p.is_relative()) cfg.set(key, toml_string((base / p).lexically_normal().string()));
    }
  }
  for (const auto& kv : g.overrides) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw ValidationError("ConfigError", "--set expects key=value, got '" + kv + "'");
    cfg.set(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
  }
  if (g.seed) cfg.set("run.seed", std::to_string(*g.seed));
  if (!g.backend.empty()) cfg.set("backend.kind", toml_string(g.backend));
  if (g.jobs) cfg.set("run.jobs", std::to_string(*g.jobs));
  cfg.validate_schema();
  if (cfg.get_int("run.jobs", 4) < 1) throw ValidationError("ConfigError", "run.jobs must be at least 1");
  return cfg;
}

std::size_t jobs_of(const Config& cfg) { return static_cast<std::size_t>(cfg.get_int("run.jobs", 4)); }
std::uint64_t seed_of(const Config& cfg) { return static_cast<std::uint64_t>(cfg.get_int("run.seed", 0)); }

const lint::LintConfig& lint_config_of(const Config& cfg) {
  static std::optional<lint::LintConfig> custom;
  std::string dir = cfg.get_string("lint.lexicon_dir", "");
  int version = static_cast<int>(cfg.get_int("lint.lexicon_version", 1));
  bool exempt = cfg.get_bool("lint.exempt_quoted_speech", false);
  if (dir.empty() && version == 1 && !exempt) return lint::LintConfig::builtin();
  custom = lint::LintConfig::load(dir.empty() ? data_dir() / "lexicons" : fs::path(dir), version);
  custom->exempt_quoted_speech = exempt;
  return *custom;
}

metrics::TokenMode token_mode_of(const Config& cfg) {
  std::string mode = cfg.get_string("eval.tokenization", "lowercase");
  if (mode == "lowercase") return metrics::TokenMode::lowercase_words;
  if (mode == "raw") return metrics::TokenMode::words;
  throw ValidationError("ConfigError", "eval.tokenization must be 'lowercase' or 'raw'");
}

// One manifest per generating or evaluating command, written next to its outputs.
class Manifest {
 public:
  Manifest(std::string command, const Config& cfg, std::vector<std::string> args)
      : command_(std::move(command)), cfg_(cfg), args_(std::move(args)), started_(utc_timestamp()) {}

  void output(const fs::path& p) { outputs_.push_back(p.string()); }
  void extra(const std::string& key, json value) { extra_[key] = std::move(value); }

  void write(const fs::path& dir) {
    json m;
    m["command"] = command_;
    m["args"] = args_;
    json cfg = json::object();
    for (const auto& [k, v] : cfg_.entries()) cfg[k] = cfg_.get_string(k, v);
    m["config"] = cfg;
    m["rng_seed"] = seed_of(cfg_);
    m["template_version"] = prompt::TemplateSet::builtin().version();
    m["lexicon_version"] = cfg_.get_int("lint.lexicon_version", 1);
    m["started_at"] = started_;
    m["finished_at"] = utc_timestamp();
    m["outputs"] = outputs_;
    for (auto& [k, v] : extra_.items()) m[k] = v;
    write_file(dir / "manifest.json", m.dump(2) + "\n");
  }

 private:
  std::string command_;
  const Config& cfg_;
  std::vector<std::string> args_;
  std::string started_;
  std::vector<std::string> outputs_;
  json extra_ = json::object();
};

void emit(const std::string& text) {
  std::cout << text;
  if (!text.empty() && text.back() != '\n') std::cout << '\n';
}

void write_output(const fs::path& dir, const std::string& name, const std::string& text, Manifest& manifest) {
  fs::create_directories(dir);
  write_file(dir / name, text);
  manifest.output(dir / name);
}

void check_format(const std::string& format) {
  if (format != "json" && format != "table") throw ValidationError("UsageError", "--format must be json or table");
}

std::atomic<annosrv::ApiServer*> g_server{nullptr};

void on_signal(int) {
  if (auto* s = g_server.load()) s->stop();
}

void print_error(const Globals& g, std::string_view code, std::string_view detail) {
  if (g.json_errors) {
    std::cerr << json{{"error", std::string(code)}, {"detail", std::string(detail)}}.dump() << "\n";
  } else {
    std::cerr << "ssbench: " << code << ": " << detail << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Social story dataset toolkit: grow, lint, evaluate and annotate story corpora."};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Print help for every subcommand");

  Globals g;
  app.add_option("--config", g.config_path, "Config file (TOML subset; see `ssbench config-schema`)")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "RNG seed; overrides run.seed");
  app.add_option("--backend", g.backend, "LLM backend: mock | http; overrides backend.kind")
      ->check(CLI::IsMember({"mock", "http"}));
  app.add_option("--jobs", g.jobs, "Parallelism cap; overrides run.jobs")->check(CLI::PositiveNumber);
  app.add_flag("--json-errors", g.json_errors, "Print errors as JSON on stderr");
  app.add_option("--set", g.overrides, "Override a config key, e.g. --set pipeline.n_chapters=4");
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Log progress to stderr");

  std::vector<std::string> args(argv + 1, argv + argc);
  std::string format = "table";
  std::string out_dir;

  auto* grow = app.add_subcommand("grow", "Run the four-stage story synthesis pipeline");
  std::string grow_out = "grow-out";
  grow->add_option("--out", grow_out, "Output directory for corpus.jsonl, pool.jsonl and manifest.json")
      ->capture_default_str();

  auto* lint_cmd = app.add_subcommand("lint", "Check stories against the quality rubric");
  std::string lint_corpus;
  lint_cmd->add_option("corpus", lint_corpus, "Corpus JSONL")->required()->check(CLI::ExistingFile);
  lint_cmd->add_option("--format", format, "Summary format: json | table")->capture_default_str();
  lint_cmd->add_option("--out", out_dir, "Write reports.jsonl, summary.json and manifest.json here");

  auto* stats = app.add_subcommand("stats", "Corpus statistics");
  std::string stats_corpus;
  stats->add_option("corpus", stats_corpus, "Corpus JSONL")->required()->check(CLI::ExistingFile);

  auto* split = app.add_subcommand("split", "Seeded 8:1:1 train/validation/test split (use --seed)");
  std::string split_corpus;
  split->add_option("corpus", split_corpus, "Corpus JSONL")->required()->check(CLI::ExistingFile);
  split->add_option("--out", out_dir, "Write split.json and manifest.json here");

  auto* metrics_cmd = app.add_subcommand("eval-metrics", "BLEU-4 and ROUGE against reference stories");
  std::string preds_path, metrics_corpus, model_name;
  metrics_cmd->add_option("preds", preds_path, "Predictions JSONL of {id, text}")->required()->check(CLI::ExistingFile);
  metrics_cmd->add_option("corpus", metrics_corpus, "Reference corpus JSONL")->required()->check(CLI::ExistingFile);
  metrics_cmd->add_option("--model", model_name, "Row label (default: predictions file stem)");
  metrics_cmd->add_option("--format", format, "Output format: json | table")->capture_default_str();
  metrics_cmd->add_option("--out", out_dir, "Write metrics.json and manifest.json here");

  auto* judge = app.add_subcommand("eval-judge", "Score stories with an LLM judge");
  std::string judge_corpus, dimensions = "CH,DC,EM,GA,RE";
  judge->add_option("corpus", judge_corpus, "Corpus subset JSONL")->required()->check(CLI::ExistingFile);
  judge->add_option("--dimensions", dimensions, "Comma-separated: CH,DC,EM,GA,RE")->capture_default_str();
  judge->add_option("--format", format, "Score table format: json | table")->capture_default_str();
  judge->add_option("--out", out_dir, "Write transcripts.jsonl, scores.json and manifest.json here");

  auto* diversity = app.add_subcommand("diversity", "Similarity, length and verb-noun histograms");
  std::string gen_path, seed_path;
  std::size_t top_k = 20;
  diversity->add_option("generated", gen_path, "Generated corpus JSONL")->required()->check(CLI::ExistingFile);
  diversity->add_option("seed", seed_path, "Seed corpus JSONL")->required()->check(CLI::ExistingFile);
  diversity->add_option("--top-k", top_k, "Verb-noun pairs to list")->capture_default_str();
  diversity->add_option("--format", format, "Output format: json | table")->capture_default_str();
  diversity->add_option("--out", out_dir, "Write diversity.json and manifest.json here");

  auto* regen = app.add_subcommand("regen-rate", "Regenerate sampled stories and rate them with lint");
  std::string regen_corpus;
  std::size_t sample = 100;
  regen->add_option("corpus", regen_corpus, "Corpus JSONL (chapters need explanations)")
      ->required()
      ->check(CLI::ExistingFile);
  regen->add_option("--sample", sample, "Pairs to sample")->capture_default_str();
  regen->add_option("--format", format, "Summary format: json | table")->capture_default_str();
  regen->add_option("--out", out_dir, "Write regen.json and manifest.json here");

  auto* serve = app.add_subcommand("serve", "Run the annotation service");
  std::string addr, db, static_dir;
  serve->add_option("--addr", addr, "HOST:PORT (default server.addr or 127.0.0.1:8080)");
  serve->add_option("--db", db, "SQLite database path (default server.db or annotations.db)");
  serve->add_option("--static-dir", static_dir, "Directory served at /");

  auto* schema = app.add_subcommand("config-schema", "List every config key");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    if (g.json_errors) {
      print_error(g, "UsageError", e.what());
      return 1;
    }
    app.exit(e);
    return 1;
  }

  spdlog::set_level(verbose ? spdlog::level::info : spdlog::level::warn);
  spdlog::set_pattern("%H:%M:%S %^%l%$ %v");

  try {
    if (*schema) {
      for (const auto& k : config_schema()) {
        std::printf("%-30.*s %-7.*s %.*s\n", static_cast<int>(k.name.size()), k.name.data(),
                    static_cast<int>(k.type.size()), k.type.data(), static_cast<int>(k.description.size()),
                    k.description.data());
      }
      return 0;
    }

    Config cfg = build_config(g);
    check_format(format);

    if (*grow) {
      std::string seed_corpus = cfg.get_string("pipeline.seed_corpus", "");
      if (seed_corpus.empty()) throw ValidationError("ConfigError", "pipeline.seed_corpus is required for grow");
      auto pc = starsow::PipelineConfig::from(cfg);
      auto seed = corpus::load_corpus(seed_corpus);
      auto backend = llm::make_backend(cfg);
      spdlog::info("growing from {} seed pairs with backend {}", seed.pairs().size(), backend->name());
      auto result = starsow::run_pipeline(seed, pc, *backend);
      fs::create_directories(grow_out);
      save_corpus(result.corpus, fs::path(grow_out) / "corpus.jsonl");
      write_file(fs::path(grow_out) / "pool.jsonl", starsow::serialize_pool(result.pool, pc.rng_seed));
      Manifest m("grow", cfg, args);
      m.output(fs::path(grow_out) / "corpus.jsonl");
      m.output(fs::path(grow_out) / "pool.jsonl");
      auto pipeline = json::parse(starsow::manifest_json(pc, result, cfg, backend->name()));
      pipeline.erase("config");
      m.extra("pipeline", pipeline);
      m.write(grow_out);
      std::printf("%zu chapters, %zu generated titles, %zu generated stories; %zu backend calls\n",
                  result.corpus.chapters().size(), result.pool.generated_titles.size(), result.pool.stories.size(),
                  result.backend_calls);
      return 0;
    }

    if (*lint_cmd) {
      auto c = corpus::load_corpus(lint_corpus);
      const auto& lc = lint_config_of(cfg);
      std::vector<lint::QualityReport> reports(c.pairs().size());
      parallel_for(reports.size(), jobs_of(cfg), [&](std::size_t i) { reports[i] = lint::lint_story(c.pairs()[i], lc); });
      auto summary = lint::summarize(reports);
      if (!out_dir.empty()) {
        Manifest m("lint", cfg, args);
        std::string lines;
        for (const auto& r : reports) lines += lint::serialize_report(r) + "\n";
        write_output(out_dir, "reports.jsonl", lines, m);
        write_output(out_dir, "summary.json", lint::serialize_summary(summary) + "\n", m);
        m.write(out_dir);
      }
      emit(format == "json" ? lint::serialize_summary(summary) : lint::format_summary_table(summary));
      return 0;
    }

    if (*stats) {
      emit(corpus::serialize_stats(corpus::compute_stats(corpus::load_corpus(stats_corpus))));
      return 0;
    }

    if (*split) {
      auto s = corpus::split_dataset(corpus::load_corpus(split_corpus), seed_of(cfg));
      std::string text = corpus::serialize_split(s);
      if (!out_dir.empty()) {
        Manifest m("split", cfg, args);
        write_output(out_dir, "split.json", text + "\n", m);
        m.write(out_dir);
      }
      emit(text);
      return 0;
    }

    if (*metrics_cmd) {
      auto refs = corpus::load_corpus(metrics_corpus);
      auto preds = eval::parse_predictions(read_file(preds_path));
      std::string label = model_name.empty() ? fs::path(preds_path).stem().string() : model_name;
      eval::MetricTable table{{eval::eval_traditional(label, preds, refs, token_mode_of(cfg), jobs_of(cfg))}};
      if (!out_dir.empty()) {
        Manifest m("eval-metrics", cfg, args);
        write_output(out_dir, "metrics.json", eval::serialize_metric_table(table) + "\n", m);
        m.write(out_dir);
      }
      emit(format == "json" ? eval::serialize_metric_table(table) : eval::format_metric_table(table));
      return 0;
    }

    if (*judge) {
      auto c = corpus::load_corpus(judge_corpus);
      auto dims = eval::parse_dimensions(dimensions);
      auto backend = llm::make_backend(cfg);
      auto records = eval::judge_pairs(c.pairs(), dims, *backend, jobs_of(cfg));
      auto rows = eval::summarize_judgements(records);
      if (!out_dir.empty()) {
        Manifest m("eval-judge", cfg, args);
        m.extra("backend", backend->name());
        write_output(out_dir, "transcripts.jsonl", eval::serialize_transcripts(records), m);
        write_output(out_dir, "scores.json", eval::serialize_judge_summary(rows) + "\n", m);
        m.write(out_dir);
      }
      emit(format == "json" ? eval::serialize_judge_summary(rows) : eval::format_judge_summary(rows));
      return 0;
    }

    if (*diversity) {
      auto report =
          eval::diversity_report(corpus::load_corpus(gen_path), corpus::load_corpus(seed_path), jobs_of(cfg));
      if (!out_dir.empty()) {
        Manifest m("diversity", cfg, args);
        write_output(out_dir, "diversity.json", eval::serialize_diversity(report, top_k) + "\n", m);
        m.write(out_dir);
      }
      emit(format == "json" ? eval::serialize_diversity(report, top_k) : eval::format_diversity(report, top_k));
      return 0;
    }

    if (*regen) {
      auto c = corpus::load_corpus(regen_corpus);
      auto pc = starsow::PipelineConfig::from(cfg);
      auto backend = llm::make_backend(cfg);
      auto picked = eval::sample_pairs(c, sample, seed_of(cfg));
      auto result = eval::regenerate_and_rate(picked, c, *backend, pc, lint_config_of(cfg));
      if (!out_dir.empty()) {
        Manifest m("regen-rate", cfg, args);
        m.extra("backend", backend->name());
        write_output(out_dir, "regen.json", eval::serialize_regen(result) + "\n", m);
        m.write(out_dir);
      }
      emit(format == "json" ? lint::serialize_summary(result.summary) : lint::format_summary_table(result.summary));
      std::size_t failed = 0;
      for (const auto& item : result.items) failed += !item.error.empty();
      if (failed) std::fprintf(stderr, "%zu of %zu items failed; see regen.json\n", failed, result.items.size());
      return 0;
    }

    if (*serve) {
      if (addr.empty()) addr = cfg.get_string("server.addr", "127.0.0.1:8080");
      if (db.empty()) db = cfg.get_string("server.db", "annotations.db");
      if (static_dir.empty()) static_dir = cfg.get_string("server.static_dir", "");
      auto colon = addr.rfind(':');
      int port = 0;
      if (colon == std::string::npos ||
          std::from_chars(addr.data() + colon + 1, addr.data() + addr.size(), port).ec != std::errc() || port <= 0 ||
          port > 65535) {
        throw ValidationError("UsageError", "--addr must be HOST:PORT, got '" + addr + "'");
      }
      annosrv::Store store(db);
      annosrv::Service service(store, annosrv::service_options_from(cfg));
      std::optional<fs::path> assets;
      if (!static_dir.empty()) assets = static_dir;
      annosrv::ApiServer server(service, assets);
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::fprintf(stderr, "serving on http://%s (db %s)\n", addr.c_str(), db.c_str());
      bool ok = server.listen(addr.substr(0, colon), port);
      g_server = nullptr;
      if (!ok) throw IoError("BindError", "cannot listen on " + addr);
      return 0;
    }
  } catch (const ValidationError& e) {
    print_error(g, e.code(), e.what());
    return 1;
  } catch (const IoError& e) {
    print_error(g, e.code(), e.what());
    return 2;
  } catch (const Error& e) {
    print_error(g, e.code(), e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error(g, "IoError", e.what());
    return 2;
  }
  return 0;
}
