#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lexalign/alignment.hpp"
#include "lexalign/corpus.hpp"
#include "lexalign/embedding.hpp"
#include "lexalign/extraction.hpp"
#include "lexalign/json.hpp"
#include "lexalign/llm_client.hpp"
#include "lexalign/pairs.hpp"
#include "lexalign/reporting.hpp"
#include "lexalign/rubric.hpp"
#include "lexalign/util.hpp"

namespace lexalign {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

inline constexpr int kConfigSchemaVersion = 1;

struct PipelineConfig {
  fs::path corpus_path = "data/corpus.json";
  fs::path articles_path = "data/articles.json";
  fs::path labels_path = "data/labels.csv";
  fs::path transcript_path;  // required in mock mode
  fs::path out_dir = "out";
  bool mock = true;
  std::string base_url = "https://api.openai.com";
  std::string api_path = "/v1/chat/completions";
  std::string model_id = "gpt-4-turbo";
  double extract_temperature = 0.0;
  double stance_temperature = 1.0;
  int stance_samples = 5;
  int parse_retries = 0;
  std::vector<StanceVariant> variants = {StanceVariant::Fatto, StanceVariant::FattoClean};
  StanceVariant report_variant = StanceVariant::Fatto;
  std::string variability_article;  // empty = most frequent article
  std::string annotator = "annotator";
  long max_calls = 0;
  int max_in_flight = 4;
  double test_fraction = 0.3;
  unsigned split_seed = 7;
  std::size_t encoder_dim = 256;
  std::size_t head_dim = 0;  // 0 = same as encoder_dim (identity-initialized head)
  unsigned head_seed = 0;
  TrainingConfig training;

  std::size_t resolved_head_dim() const { return head_dim == 0 ? encoder_dim : head_dim; }
};

namespace detail {

inline fs::path resolve_against(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

inline double number_or(const jsonx::Json& j, const char* key, double fallback) {
  return j.contains(key) ? jsonx::require_number<MalformedCorpus>(j, key, "config") : fallback;
}

inline long long int_or(const jsonx::Json& j, const char* key, long long fallback) {
  return j.contains(key) ? jsonx::require_int<MalformedCorpus>(j, key, "config") : fallback;
}

inline std::string string_or(const jsonx::Json& j, const char* key, const std::string& fallback) {
  return j.contains(key) ? jsonx::require_string<MalformedCorpus>(j, key, "config") : fallback;
}

inline bool bool_or(const jsonx::Json& j, const char* key, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) throw MalformedCorpus(std::string("config field ") + key + " must be a boolean");
  return j.at(key).get<bool>();
}

}  // namespace detail

// Relative paths in the file are resolved against the config file's directory.
inline PipelineConfig config_from_json(const jsonx::Json& j, const fs::path& base_dir) {
  jsonx::require_schema_version<MalformedCorpus>(j, kConfigSchemaVersion, "config");
  PipelineConfig cfg;
  cfg.corpus_path = detail::resolve_against(base_dir, detail::string_or(j, "corpus", "data/corpus.json"));
  cfg.articles_path =
      detail::resolve_against(base_dir, detail::string_or(j, "articles", "data/articles.json"));
  cfg.labels_path = detail::resolve_against(base_dir, detail::string_or(j, "labels", "data/labels.csv"));
  std::string transcript = detail::string_or(j, "transcript", "");
  if (!transcript.empty()) cfg.transcript_path = detail::resolve_against(base_dir, transcript);
  cfg.out_dir = detail::resolve_against(base_dir, detail::string_or(j, "out", "out"));
  cfg.mock = detail::bool_or(j, "mock", true);
  cfg.base_url = detail::string_or(j, "base_url", cfg.base_url);
  cfg.api_path = detail::string_or(j, "api_path", cfg.api_path);
  cfg.model_id = detail::string_or(j, "model_id", cfg.model_id);
  cfg.extract_temperature = detail::number_or(j, "extract_temperature", cfg.extract_temperature);
  cfg.stance_temperature = detail::number_or(j, "stance_temperature", cfg.stance_temperature);
  cfg.stance_samples = static_cast<int>(detail::int_or(j, "stance_samples", cfg.stance_samples));
  cfg.parse_retries = static_cast<int>(detail::int_or(j, "parse_retries", cfg.parse_retries));
  if (j.contains("variants")) {
    cfg.variants.clear();
    for (const auto& v : jsonx::require_array<MalformedCorpus>(j, "variants", "config"))
      cfg.variants.push_back(parse_stance_variant(v.get<std::string>()));
    if (cfg.variants.empty()) throw MalformedCorpus("config variants list is empty");
  }
  cfg.report_variant =
      parse_stance_variant(detail::string_or(j, "report_variant", to_string(cfg.report_variant)));
  cfg.variability_article = detail::string_or(j, "variability_article", "");
  cfg.annotator = detail::string_or(j, "annotator", cfg.annotator);
  cfg.max_calls = static_cast<long>(detail::int_or(j, "max_calls", cfg.max_calls));
  cfg.max_in_flight = static_cast<int>(detail::int_or(j, "max_in_flight", cfg.max_in_flight));
  cfg.test_fraction = detail::number_or(j, "test_fraction", cfg.test_fraction);
  cfg.split_seed = static_cast<unsigned>(detail::int_or(j, "split_seed", cfg.split_seed));
  cfg.encoder_dim = static_cast<std::size_t>(detail::int_or(j, "encoder_dim", 256));
  cfg.head_dim = static_cast<std::size_t>(detail::int_or(j, "head_dim", 0));
  cfg.head_seed = static_cast<unsigned>(detail::int_or(j, "head_seed", cfg.head_seed));
  if (j.contains("training")) {
    const auto& t = j.at("training");
    TrainingConfig& tc = cfg.training;
    tc.epochs = static_cast<int>(detail::int_or(t, "epochs", tc.epochs));
    tc.learning_rate = detail::number_or(t, "learning_rate", tc.learning_rate);
    tc.margin = detail::number_or(t, "margin", tc.margin);
    tc.weight_decay = detail::number_or(t, "weight_decay", tc.weight_decay);
    tc.beta1 = detail::number_or(t, "beta1", tc.beta1);
    tc.beta2 = detail::number_or(t, "beta2", tc.beta2);
    tc.epsilon = detail::number_or(t, "epsilon", tc.epsilon);
    tc.batch_size = static_cast<int>(detail::int_or(t, "batch_size", tc.batch_size));
    tc.seed = static_cast<unsigned>(detail::int_or(t, "seed", tc.seed));
  }
  return cfg;
}

inline PipelineConfig load_config(const fs::path& path) {
  return config_from_json(jsonx::parse<MalformedCorpus>(util::read_file(path), "config"),
                          path.has_parent_path() ? path.parent_path() : fs::path("."));
}

inline jsonx::Json training_to_json(const TrainingConfig& t) {
  return {{"epochs", t.epochs},
          {"learning_rate", t.learning_rate},
          {"margin", t.margin},
          {"weight_decay", t.weight_decay},
          {"beta1", t.beta1},
          {"beta2", t.beta2},
          {"epsilon", t.epsilon},
          {"batch_size", t.batch_size},
          {"seed", t.seed}};
}

// ---------------------------------------------------------------------------
// Run manifest
// ---------------------------------------------------------------------------
// The stable section captures everything that determines artifact content.
// Its hash is the run identity every report file carries; the run section
// holds timestamps and counters that may differ between identical runs.

inline constexpr int kManifestSchemaVersion = 1;

struct RunManifest {
  jsonx::Json stable;
  jsonx::Json run;

  std::string hash() const { return util::fnv1a_hex(stable.dump()); }

  jsonx::Json to_json() const {
    return {{"schema_version", kManifestSchemaVersion},
            {"manifest_hash", hash()},
            {"stable", stable},
            {"run", run}};
  }
};

// ---------------------------------------------------------------------------
// Pipeline paths
// ---------------------------------------------------------------------------

struct PipelinePaths {
  fs::path out;

  fs::path analyses() const { return out / "analyses.json"; }
  fs::path rubric_scores() const { return out / "rubric_scores.jsonl"; }
  fs::path pairs() const { return out / "pairs.json"; }
  fs::path unlabeled() const { return out / "pairs_unlabeled.csv"; }
  fs::path split() const { return out / "split.json"; }
  fs::path head() const { return out / "head.json"; }
  fs::path metrics() const { return out / "metrics.json"; }
  fs::path stances(StanceVariant v) const {
    return out / ("stances_" + to_string(v) + ".json");
  }
  fs::path distances(StanceVariant v) const {
    return out / ("distances_" + to_string(v) + ".csv");
  }
  fs::path unmatched(StanceVariant v) const {
    return out / ("unmatched_" + to_string(v) + ".csv");
  }
  fs::path reports() const { return out / "reports"; }
  fs::path manifest() const { return out / "manifest.json"; }
  fs::path cache() const { return out / ".cache"; }
};

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

enum class RunStatus { Complete, LabelsNeeded };

struct RunResult {
  RunStatus status = RunStatus::Complete;
  std::string message;  // label-gate instructions when LabelsNeeded
  long provider_calls = 0;
  long cache_hits = 0;
  std::string manifest_hash;
};

struct GateResult {
  bool ok = false;
  std::string message;
  std::vector<ArgumentPair> labeled;
  std::size_t unlabeled = 0;
};

class Pipeline {
 public:
  explicit Pipeline(PipelineConfig cfg, std::shared_ptr<ChatProvider> provider = nullptr)
      : cfg_(std::move(cfg)), provider_(std::move(provider)), paths_{cfg_.out_dir} {}

  const PipelineConfig& config() const { return cfg_; }
  const PipelinePaths& paths() const { return paths_; }

  const Corpus& corpus() {
    if (!corpus_) corpus_ = load_corpus(cfg_.corpus_path);
    return *corpus_;
  }

  const ArticleLibrary& articles() {
    if (!articles_) articles_ = ArticleLibrary::load(cfg_.articles_path);
    return *articles_;
  }

  // Built lazily so fully cached runs never touch a provider or transcript.
  Client& client() {
    if (!client_) {
      ClientOptions options;
      options.cache_dir = paths_.cache();
      options.max_calls = cfg_.max_calls;
      options.max_in_flight = cfg_.max_in_flight;
      options.max_samples = std::max(cfg_.stance_samples, cfg_.parse_retries + 1);
      if (provider_) {
        client_ = std::make_shared<Client>(provider_, options);
      } else if (cfg_.mock) {
        if (cfg_.transcript_path.empty())
          throw PreconditionError("mock mode needs a transcript path in the config");
        client_ = mock_from_transcript(cfg_.transcript_path, options);
      } else {
        throw PreconditionError("live mode needs a provider (run through the CLI)");
      }
    }
    return *client_;
  }

  std::vector<RulingAnalysis> stage_extract() {
    fs::path path = paths_.analyses();
    if (fs::exists(path))
      return analyses_from_json(jsonx::parse<MalformedCorpus>(util::read_file(path), "analyses"));
    ExtractOptions options;
    options.model_id = cfg_.model_id;
    options.temperature = cfg_.extract_temperature;
    options.parse_retries = cfg_.parse_retries;
    ExtractionRun run = extract_all(client(), articles(), corpus(), options);
    if (!run.failures.empty()) {
      std::string detail = std::to_string(run.failures.size()) + " ruling(s) failed to parse; first: " +
                           run.failures.front().ruling_id + ": " + run.failures.front().detail;
      throw PipelineError("extract", detail);
    }
    fs::create_directories(paths_.out);
    util::write_file(path, analyses_to_json(run.analyses).dump(2) + "\n");
    return run.analyses;
  }

  void stage_rubric(const std::vector<RulingAnalysis>& analyses) {
    fs::path path = paths_.rubric_scores();
    if (fs::exists(path)) return;
    fs::create_directories(paths_.out);
    ScoreStore store(path);
    for (const auto& row : auto_completeness(analyses, corpus()))
      store.record_auto(row.ruling_id, row.party, row.score);
  }

  std::vector<ArgumentPair> stage_pairs(const std::vector<RulingAnalysis>& analyses) {
    fs::path path = paths_.pairs();
    if (fs::exists(path))
      return pairs_from_json(jsonx::parse<MalformedCorpus>(util::read_file(path), "pairs"));
    std::vector<ArgumentPair> pairs = generate_pairs(analyses);
    fs::create_directories(paths_.out);
    util::write_file(path, pairs_to_json(pairs).dump(2) + "\n");
    return pairs;
  }

  GateResult gate_labels(const std::vector<ArgumentPair>& pairs) {
    GateResult gate;
    std::vector<LabelRow> rows;
    if (!cfg_.labels_path.empty() && fs::exists(cfg_.labels_path))
      rows = labels_from_csv(util::read_file(cfg_.labels_path));
    LabelResult result = label_pairs(pairs, rows);
    if (result.unlabeled > 0) {
      std::set<std::string> covered;
      for (const auto& p : result.labeled) covered.insert(p.pair_id);
      std::string csv = "pair_id,ruling_id,article,party_a,party_b,text_a,text_b\n";
      for (const auto& p : pairs) {
        if (covered.count(p.pair_id)) continue;
        csv += p.pair_id + "," + util::csv_escape(p.a1.ruling_id) + "," +
               util::csv_escape(p.a1.article) + "," + display_name(p.a1.party) + "," +
               display_name(p.a2.party) + "," + util::csv_escape(p.a1.text) + "," +
               util::csv_escape(p.a2.text) + "\n";
      }
      fs::create_directories(paths_.out);
      util::write_file(paths_.unlabeled(), csv);
      gate.unlabeled = result.unlabeled;
      gate.message =
          std::to_string(result.unlabeled) + " pair(s) await labels.\n"
          "The unlabeled pairs were written to " + paths_.unlabeled().string() + ".\n"
          "Label each pair 1 (concordant) or 0 (opposing), append rows\n"
          "  pair_id,label,annotator,timestamp\n"
          "to " + cfg_.labels_path.string() + " (or use `lexalign pairs label`), then re-run.";
      return gate;
    }
    gate.ok = true;
    gate.labeled = std::move(result.labeled);
    return gate;
  }

  PairDataset stage_split(const std::vector<ArgumentPair>& labeled) {
    fs::path path = paths_.split();
    if (fs::exists(path)) {
      jsonx::Json j = jsonx::parse<MalformedCorpus>(util::read_file(path), "split");
      jsonx::require_schema_version<MalformedCorpus>(j, 1, "split record");
      std::map<std::string, const ArgumentPair*> by_id;
      for (const auto& p : labeled) by_id[p.pair_id] = &p;
      PairDataset ds;
      ds.split_seed = static_cast<unsigned>(jsonx::require_int<MalformedCorpus>(j, "seed", "split"));
      auto take = [&](const char* key, std::vector<ArgumentPair>& out) {
        for (const auto& id : jsonx::require_array<MalformedCorpus>(j, key, "split")) {
          auto it = by_id.find(id.get<std::string>());
          if (it == by_id.end())
            throw PipelineError("split", "cached split references unknown pair " +
                                             id.get<std::string>() + "; delete " + path.string() +
                                             " to recompute");
          out.push_back(*it->second);
        }
      };
      take("train", ds.train);
      take("test", ds.test);
      return ds;
    }
    PairDataset ds = split_pairs(labeled, cfg_.test_fraction, cfg_.split_seed);
    jsonx::Json j;
    j["schema_version"] = 1;
    j["seed"] = ds.split_seed;
    j["test_fraction"] = cfg_.test_fraction;
    jsonx::Json train = jsonx::Json::array(), test = jsonx::Json::array();
    for (const auto& p : ds.train) train.push_back(p.pair_id);
    for (const auto& p : ds.test) test.push_back(p.pair_id);
    j["train"] = train;
    j["test"] = test;
    fs::create_directories(paths_.out);
    util::write_file(path, j.dump(2) + "\n");
    return ds;
  }

  EmbeddingBackend make_backend(LinearHead head) const {
    return EmbeddingBackend(std::make_shared<HashedNgramEncoder>(cfg_.encoder_dim),
                            std::move(head));
  }

  SavedHead stage_train(const PairDataset& dataset) {
    fs::path path = paths_.head();
    if (fs::exists(path))
      return head_from_json(jsonx::parse<MalformedCorpus>(util::read_file(path), "head"));
    EmbeddingBackend backend =
        make_backend(LinearHead(cfg_.encoder_dim, cfg_.resolved_head_dim(), cfg_.head_seed));
    TrainResult result = train(backend, dataset, cfg_.training);
    fs::create_directories(paths_.out);
    util::write_file(path, head_to_json(backend.head(), cfg_.training, result.loss_history).dump(2) + "\n");

    double ap = average_precision(backend, dataset.test);
    jsonx::Json metrics = {{"schema_version", 1},
                           {"test_ap", ap},
                           {"n_train", dataset.train.size()},
                           {"n_test", dataset.test.size()},
                           {"final_loss", result.loss_history.empty() ? 0.0 : result.loss_history.back()}};
    util::write_file(paths_.metrics(), metrics.dump(2) + "\n");
    return {backend.head(), cfg_.training, result.loss_history};
  }

  std::vector<Stance> stage_stances(StanceVariant variant) {
    fs::path path = paths_.stances(variant);
    if (fs::exists(path))
      return stances_from_json(jsonx::parse<MalformedCorpus>(util::read_file(path), "stances"));
    StanceOptions options;
    options.model_id = cfg_.model_id;
    options.temperature = cfg_.stance_temperature;
    options.variant = variant;
    options.samples = cfg_.stance_samples;
    StanceRun run = collect_stances(client(), articles(), corpus(), options);
    if (!run.failures.empty()) {
      std::string detail = std::to_string(run.failures.size()) + " stance(s) failed to parse; first: " +
                           run.failures.front().ruling_id + " " + run.failures.front().detail;
      throw PipelineError("stance", detail);
    }
    fs::create_directories(paths_.out);
    util::write_file(path, stances_to_json(run.stances).dump(2) + "\n");
    return run.stances;
  }

  std::vector<DistanceRecord> stage_align(StanceVariant variant,
                                          const std::vector<RulingAnalysis>& analyses,
                                          const std::vector<Stance>& stances,
                                          const EmbeddingBackend& backend) {
    fs::path path = paths_.distances(variant);
    if (fs::exists(path)) return distances_from_csv(util::read_file(path));
    MatchResult matched = match_all(stances, analyses);
    std::vector<DistanceRecord> records = compute_distances(matched.tuples, backend, corpus());
    fs::create_directories(paths_.out);
    util::write_file(path, distances_to_csv(records));
    util::write_file(paths_.unmatched(variant), unmatched_to_csv(matched.unmatched));
    return records;
  }

  // Reads only persisted stores, so reports can be rebuilt alone and re-runs
  // are byte-identical.
  void stage_reports() {
    fs::create_directories(paths_.reports());
    std::string hash = manifest().hash();

    std::vector<std::pair<StanceVariant, std::vector<DistanceRecord>>> per_variant;
    for (StanceVariant v : cfg_.variants) {
      fs::path path = paths_.distances(v);
      if (!fs::exists(path))
        throw PipelineError("report", "missing distance store " + path.string() +
                                          "; run the align stage first");
      per_variant.emplace_back(v, distances_from_csv(util::read_file(path)));
    }

    VariantRows verdict_rows, iteration_rows;
    for (const auto& [v, records] : per_variant) {
      verdict_rows.emplace_back(v, aggregate(records, Grouping::PartyVerdict));
      iteration_rows.emplace_back(v, aggregate(records, Grouping::PartyIteration));
    }
    write_report(paths_.reports() / "party_verdict.csv",
                 emit_table(Grouping::PartyVerdict, verdict_rows, TableFormat::Csv), hash);
    write_report(paths_.reports() / "party_verdict.md",
                 emit_table(Grouping::PartyVerdict, verdict_rows, TableFormat::Markdown), hash);
    for (const auto& [v, rows] : iteration_rows) {
      write_report(paths_.reports() / ("party_iteration_" + to_string(v) + ".csv"),
                   emit_party_iteration_pivot(rows, TableFormat::Csv), hash);
      write_report(paths_.reports() / ("party_iteration_" + to_string(v) + ".md"),
                   emit_party_iteration_pivot(rows, TableFormat::Markdown), hash);
    }

    for (const auto& [v, records] : per_variant) {
      std::string table = emit_article_party_table(aggregate(records, Grouping::ArticleParty));
      fs::path table_path = paths_.reports() / ("article_party_" + to_string(v) + ".csv");
      write_report(table_path, table, hash);
      std::string chart = article_chart_from_table(
          table, "Model-party distance by article (" + to_string(v) + ")", "manifest:" + hash);
      write_report(paths_.reports() / ("article_party_" + to_string(v) + ".svg"), chart, hash);
    }

    for (const auto& [v, records] : per_variant) {
      if (v != cfg_.report_variant) continue;
      std::string article = cfg_.variability_article.empty() ? most_frequent_article(records)
                                                             : cfg_.variability_article;
      if (article.empty()) continue;  // no records at all
      write_report(paths_.reports() /
                       ("variability_" + util::sanitize_for_filename(article) + "_" + to_string(v) + ".csv"),
                   emit_variability_table(variability_report(records, article)), hash);
    }

    if (fs::exists(paths_.rubric_scores())) {
      ScoreStore store(paths_.rubric_scores());
      auto summary = summarize_rubric(store.current());
      write_report(paths_.reports() / "rubric_summary.csv", emit_rubric_table(summary), hash);
      write_report(paths_.reports() / "rubric_scores.svg",
                   rubric_chart_from_summary(summary, "manifest:" + hash), hash);
    }

    if (fs::exists(paths_.metrics())) {
      jsonx::Json m = jsonx::parse<MalformedCorpus>(util::read_file(paths_.metrics()), "metrics");
      std::string csv = "metric,value\n";
      csv += "test_ap," + util::format_3dp(m.at("test_ap").get<double>()) + "\n";
      csv += "n_train," + std::to_string(m.at("n_train").get<long long>()) + "\n";
      csv += "n_test," + std::to_string(m.at("n_test").get<long long>()) + "\n";
      write_report(paths_.reports() / "retrieval.csv", csv, hash);
    }
  }

  RunManifest manifest() {
    RunManifest m;
    jsonx::Json& s = m.stable;
    s["stage_versions"] = {{"corpus", kCorpusSchemaVersion},
                           {"analysis", kAnalysisSchemaVersion},
                           {"stance", kStanceSchemaVersion},
                           {"pairs", kPairsSchemaVersion},
                           {"head", kHeadSchemaVersion},
                           {"cache_record", kCacheRecordSchemaVersion},
                           {"report", 1}};
    s["corpus_hash"] = file_hash(cfg_.corpus_path);
    s["articles_hash"] = file_hash(cfg_.articles_path);
    if (cfg_.mock && !cfg_.transcript_path.empty())
      s["transcript_hash"] = file_hash(cfg_.transcript_path);
    if (!cfg_.labels_path.empty() && fs::exists(cfg_.labels_path))
      s["labels_hash"] = file_hash(cfg_.labels_path);
    s["mock"] = cfg_.mock;
    s["model_id"] = cfg_.model_id;
    s["temperatures"] = {{"extract", cfg_.extract_temperature}, {"stance", cfg_.stance_temperature}};
    s["stance_samples"] = cfg_.stance_samples;
    jsonx::Json variants = jsonx::Json::array();
    for (StanceVariant v : cfg_.variants) variants.push_back(to_string(v));
    s["variants"] = variants;
    s["encoder"] = {{"id", HashedNgramEncoder(cfg_.encoder_dim).id()},
                    {"dim", cfg_.encoder_dim},
                    {"head_dim", cfg_.resolved_head_dim()},
                    {"head_seed", cfg_.head_seed}};
    s["split"] = {{"test_fraction", cfg_.test_fraction}, {"seed", cfg_.split_seed}};
    s["training"] = training_to_json(cfg_.training);
    return m;
  }

  void write_manifest(const std::string& status) {
    RunManifest m = manifest();
    m.run["created"] = util::iso_timestamp_utc();
    m.run["status"] = status;
    m.run["provider_calls"] = client_ ? client_->provider_calls() : 0;
    m.run["cache_hits"] = client_ ? client_->cache_hits() : 0;
    fs::create_directories(paths_.out);
    util::write_file(paths_.manifest(), m.to_json().dump(2) + "\n");
  }

  RunResult run() {
    fs::create_directories(paths_.out);
    RunResult result;
    result.manifest_hash = manifest().hash();

    auto analyses = staged("extract", [&] { return stage_extract(); });
    staged("rubric", [&] { stage_rubric(analyses); return 0; });
    auto pairs = staged("pairs", [&] { return stage_pairs(analyses); });

    GateResult gate = staged("label", [&] { return gate_labels(pairs); });
    if (!gate.ok) {
      write_manifest("labels-needed");
      result.status = RunStatus::LabelsNeeded;
      result.message = gate.message;
      fill_counters(result);
      return result;
    }

    auto dataset = staged("split", [&] { return stage_split(gate.labeled); });
    SavedHead saved = staged("train", [&] { return stage_train(dataset); });
    EmbeddingBackend backend = make_backend(saved.head);

    for (StanceVariant v : cfg_.variants) {
      auto stances = staged("stance", [&] { return stage_stances(v); });
      staged("align", [&] { return stage_align(v, analyses, stances, backend); });
    }

    staged("report", [&] { stage_reports(); return 0; });
    write_manifest("complete");
    fill_counters(result);
    return result;
  }

  long provider_calls() const { return client_ ? client_->provider_calls() : 0; }

 private:
  template <typename F>
  auto staged(const char* stage, F&& f) -> decltype(f()) {
    try {
      return f();
    } catch (const PipelineError&) {
      throw;
    } catch (const Error& e) {
      throw PipelineError(stage, e.what());
    }
  }

  void fill_counters(RunResult& result) const {
    result.provider_calls = client_ ? client_->provider_calls() : 0;
    result.cache_hits = client_ ? client_->cache_hits() : 0;
  }

  static std::string file_hash(const fs::path& path) {
    return util::fnv1a_hex(util::read_file(path));
  }

  static std::string most_frequent_article(const std::vector<DistanceRecord>& records) {
    std::map<std::string, std::size_t, decltype(&article_key_less)> counts(&article_key_less);
    for (const auto& r : records) ++counts[r.article];
    std::string best;
    std::size_t best_count = 0;
    for (const auto& [article, count] : counts) {
      if (count > best_count) {  // ties keep the smallest key, map order
        best = article;
        best_count = count;
      }
    }
    return best;
  }

  static void write_report(const fs::path& path, const std::string& content,
                           const std::string& manifest_hash) {
    util::write_file(path, content);
    util::write_file(path.string() + ".manifest", manifest_hash + "\n");
  }

  PipelineConfig cfg_;
  std::shared_ptr<ChatProvider> provider_;
  PipelinePaths paths_;
  std::optional<Corpus> corpus_;
  std::optional<ArticleLibrary> articles_;
  std::shared_ptr<Client> client_;
};

}  // namespace lexalign
