// Command-line entry point for the alignment pipeline. The live HTTP
// backend is linked only here; the library itself never talks to the
// network, and the API key (from $LEXALIGN_API_KEY) is never printed.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "lexalign/llm_http.hpp"
#include "lexalign/pipeline.hpp"

namespace fs = std::filesystem;
using namespace lexalign;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitLabelsNeeded = 3;

struct GlobalFlags {
  std::string config_path = "config.json";
  std::string out_override;
  std::string model_override;
  bool force_mock = false;
  bool force_live = false;
  long max_calls = -1;
};

PipelineConfig resolve_config(const GlobalFlags& g) {
  PipelineConfig cfg = load_config(g.config_path);
  if (!g.out_override.empty()) cfg.out_dir = g.out_override;
  if (!g.model_override.empty()) cfg.model_id = g.model_override;
  if (g.force_mock && g.force_live)
    throw PreconditionError("--mock and --live are mutually exclusive");
  if (g.force_mock) cfg.mock = true;
  if (g.force_live) cfg.mock = false;
  if (g.max_calls >= 0) cfg.max_calls = g.max_calls;
  return cfg;
}

Pipeline make_pipeline(const PipelineConfig& cfg) {
  std::shared_ptr<ChatProvider> provider;
  if (!cfg.mock)
    provider = std::make_shared<HttpProvider>(cfg.base_url, api_key_from_env(), cfg.api_path);
  return Pipeline(cfg, provider);
}

int cmd_corpus_validate(const PipelineConfig& cfg, const std::string& path_arg) {
  fs::path path = path_arg.empty() ? cfg.corpus_path : fs::path(path_arg);
  Corpus corpus = parse_corpus(util::read_file(path));
  std::size_t violations = 0;
  for (const Ruling& r : corpus.rulings()) {
    for (const std::string& v : validate_ruling(r)) {
      std::printf("ruling %s: %s\n", r.id.c_str(), v.c_str());
      ++violations;
    }
  }
  std::printf("%zu ruling(s), %zu violation(s)\n", corpus.rulings().size(), violations);
  return violations == 0 ? kExitOk : kExitFailure;
}

void append_label(const fs::path& labels_path, const LabelRow& row) {
  if (!fs::exists(labels_path))
    util::write_file(labels_path, std::string(kLabelCsvHeader) + "\n");
  util::append_file(labels_path, row.pair_id + "," + std::to_string(row.label) + "," +
                                     util::csv_escape(row.annotator) + "," + row.timestamp + "\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lexalign: measuring LLM argument alignment over constitutional rulings"};
  app.require_subcommand(1);

  GlobalFlags g;
  app.add_option("--config", g.config_path, "pipeline config file")->capture_default_str();
  app.add_option("--out", g.out_override, "override the output directory");
  app.add_option("--model", g.model_override, "override the model id");
  app.add_flag("--mock", g.force_mock, "force the transcript-backed mock provider");
  app.add_flag("--live", g.force_live, "force the live HTTP provider");
  app.add_option("--max-calls", g.max_calls, "provider call budget (0 = unlimited)");

  auto* corpus_cmd = app.add_subcommand("corpus", "corpus inspection");
  auto* corpus_validate = corpus_cmd->add_subcommand("validate", "check every ruling invariant");
  std::string corpus_path_arg;
  corpus_validate->add_option("path", corpus_path_arg, "corpus file (default: config corpus)");

  auto* extract_cmd = app.add_subcommand("extract", "structured argument extraction");
  extract_cmd->add_subcommand("run", "extract arguments for every ruling");

  auto* rubric_cmd = app.add_subcommand("rubric", "extraction quality scores");
  rubric_cmd->add_subcommand("auto", "score completeness against gold articles");
  auto* rubric_record = rubric_cmd->add_subcommand("record", "record a human review");
  std::string rec_ruling, rec_party, rec_annotator = "annotator";
  int rec_consistency = 0, rec_hallucination = 0;
  rubric_record->add_option("--ruling", rec_ruling, "ruling id")->required();
  rubric_record->add_option("--party", rec_party, "applicant|state|court")->required();
  rubric_record->add_option("--consistency", rec_consistency, "score 1-5")->required();
  rubric_record->add_option("--hallucination", rec_hallucination, "score 1-5")->required();
  rubric_record->add_option("--annotator", rec_annotator, "annotator id");
  rubric_cmd->add_subcommand("report", "summary table and chart");

  auto* pairs_cmd = app.add_subcommand("pairs", "argument pairs and labels");
  pairs_cmd->add_subcommand("generate", "build article-matched cross-party pairs");
  auto* pairs_label = pairs_cmd->add_subcommand("label", "label pairs");
  std::string label_file;
  pairs_label->add_option("--file", label_file, "merge labels from this CSV");
  auto* pairs_split = pairs_cmd->add_subcommand("split", "ruling-level train/test split");
  double split_fraction = -1.0;
  long long split_seed = -1;
  pairs_split->add_option("--test-fraction", split_fraction, "target test share of pairs");
  pairs_split->add_option("--seed", split_seed, "shuffle seed");

  auto* embed_cmd = app.add_subcommand("embed", "contrastive head training");
  auto* embed_train = embed_cmd->add_subcommand("train", "train the embedding head");
  int opt_epochs = -1;
  double opt_lr = -1.0, opt_margin = -1.0;
  long long opt_seed = -1;
  embed_train->add_option("--epochs", opt_epochs, "training epochs");
  embed_train->add_option("--lr", opt_lr, "learning rate");
  embed_train->add_option("--margin", opt_margin, "contrastive margin");
  embed_train->add_option("--seed", opt_seed, "shuffle seed");
  embed_cmd->add_subcommand("eval", "average precision on the test split");

  auto* stance_cmd = app.add_subcommand("stance", "self-generated model stances");
  auto* stance_run = stance_cmd->add_subcommand("run", "sample stances for every ruling");
  std::string stance_variant = "fatto";
  int stance_n = -1;
  stance_run->add_option("--variant", stance_variant, "fatto|fatto-clean");
  stance_run->add_option("--n", stance_n, "samples per ruling");

  auto* align_cmd = app.add_subcommand("align", "distance computation and aggregation");
  auto* align_compute = align_cmd->add_subcommand("compute", "match arguments and compute distances");
  std::string align_variant = "fatto";
  align_compute->add_option("--variant", align_variant, "fatto|fatto-clean");
  auto* align_report = align_cmd->add_subcommand("report", "print an aggregate table");
  std::string report_grouping = "party-verdict";
  std::string report_variant = "fatto";
  align_report->add_option("--grouping", report_grouping,
                           "party-verdict|party-iteration|article-party");
  align_report->add_option("--variant", report_variant, "fatto|fatto-clean");

  app.add_subcommand("report", "emit all tables and charts from persisted stores");
  app.add_subcommand("run", "run the full pipeline");

  CLI11_PARSE(app, argc, argv);

  try {
    PipelineConfig cfg = resolve_config(g);

    if (corpus_validate->parsed()) return cmd_corpus_validate(cfg, corpus_path_arg);

    Pipeline pipeline = make_pipeline(cfg);

    if (extract_cmd->parsed()) {
      auto analyses = pipeline.stage_extract();
      std::printf("extracted %zu analyses -> %s\n", analyses.size(),
                  pipeline.paths().analyses().string().c_str());
      return kExitOk;
    }

    if (rubric_cmd->parsed()) {
      if (rubric_record->parsed()) {
        ScoreStore store(pipeline.paths().rubric_scores());
        store.record_manual(rec_ruling, require_party(rec_party), rec_consistency,
                            rec_hallucination, rec_annotator, util::iso_timestamp_utc());
        std::printf("recorded consistency=%d hallucination=%d for %s/%s\n", rec_consistency,
                    rec_hallucination, rec_ruling.c_str(), rec_party.c_str());
        return kExitOk;
      }
      if (rubric_cmd->get_subcommand("auto")->parsed()) {
        if (fs::exists(pipeline.paths().rubric_scores())) {
          std::printf("rubric store %s already populated; delete it to rescore\n",
                      pipeline.paths().rubric_scores().string().c_str());
          return kExitOk;
        }
        pipeline.stage_rubric(pipeline.stage_extract());
        std::printf("auto completeness written -> %s\n",
                    pipeline.paths().rubric_scores().string().c_str());
        return kExitOk;
      }
      // report
      ScoreStore store(pipeline.paths().rubric_scores());
      auto summary = summarize_rubric(store.current());
      std::fputs(emit_rubric_table(summary).c_str(), stdout);
      fs::create_directories(pipeline.paths().reports());
      std::string hash = pipeline.manifest().hash();
      util::write_file(pipeline.paths().reports() / "rubric_summary.csv",
                       emit_rubric_table(summary));
      util::write_file(pipeline.paths().reports() / "rubric_summary.csv.manifest", hash + "\n");
      util::write_file(pipeline.paths().reports() / "rubric_scores.svg",
                       rubric_chart_from_summary(summary, "manifest:" + hash));
      util::write_file(pipeline.paths().reports() / "rubric_scores.svg.manifest", hash + "\n");
      return kExitOk;
    }

    if (pairs_cmd->parsed()) {
      auto pairs = pipeline.stage_pairs(pipeline.stage_extract());
      if (pairs_cmd->get_subcommand("generate")->parsed()) {
        std::printf("%zu pairs -> %s\n", pairs.size(), pipeline.paths().pairs().string().c_str());
        return kExitOk;
      }
      if (pairs_label->parsed()) {
        std::vector<LabelRow> rows;
        if (fs::exists(cfg.labels_path)) rows = labels_from_csv(util::read_file(cfg.labels_path));
        if (!label_file.empty()) {
          auto merged = rows;
          for (const auto& row : labels_from_csv(util::read_file(label_file)))
            merged.push_back(row);
          label_pairs(pairs, merged);  // validates ids and agreement
          util::write_file(cfg.labels_path, labels_to_csv(merged));
          LabelResult after = label_pairs(pairs, merged);
          std::printf("labels merged -> %s (%zu labeled, %zu still unlabeled)\n",
                      cfg.labels_path.string().c_str(), after.labeled.size(), after.unlabeled);
          return kExitOk;
        }
        // Interactive terminal loop: 1 concordant, 0 opposing, s skip, q quit.
        LabelResult current = label_pairs(pairs, rows);
        std::set<std::string> covered;
        for (const auto& p : current.labeled) covered.insert(p.pair_id);
        std::size_t asked = 0;
        for (const auto& p : pairs) {
          if (covered.count(p.pair_id)) continue;
          std::printf("\npair %s  ruling %s  article %s\n", p.pair_id.c_str(),
                      p.a1.ruling_id.c_str(), p.a1.article.c_str());
          std::printf("  [%s] %s\n", display_name(p.a1.party).c_str(), p.a1.text.c_str());
          std::printf("  [%s] %s\n", display_name(p.a2.party).c_str(), p.a2.text.c_str());
          std::printf("label [1=concordant 0=opposing s=skip q=quit]: ");
          std::fflush(stdout);
          std::string answer;
          if (!std::getline(std::cin, answer) || answer == "q") break;
          if (answer != "0" && answer != "1") continue;
          append_label(cfg.labels_path,
                       {p.pair_id, answer == "1" ? 1 : 0, cfg.annotator,
                        util::iso_timestamp_utc()});
          ++asked;
        }
        LabelResult after = label_pairs(
            pairs, fs::exists(cfg.labels_path)
                       ? labels_from_csv(util::read_file(cfg.labels_path))
                       : std::vector<LabelRow>{});
        std::printf("\n%zu label(s) recorded; %zu pair(s) still unlabeled\n", asked,
                    after.unlabeled);
        return kExitOk;
      }
      if (pairs_split->parsed()) {
        PipelineConfig local = cfg;
        if (split_fraction > 0) local.test_fraction = split_fraction;
        if (split_seed >= 0) local.split_seed = static_cast<unsigned>(split_seed);
        Pipeline alt = make_pipeline(local);
        GateResult gate = alt.gate_labels(pairs);
        if (!gate.ok) {
          std::fputs((gate.message + "\n").c_str(), stderr);
          return kExitLabelsNeeded;
        }
        PairDataset ds = alt.stage_split(gate.labeled);
        std::printf("split: %zu train / %zu test pairs (seed %u) -> %s\n", ds.train.size(),
                    ds.test.size(), ds.split_seed, alt.paths().split().string().c_str());
        return kExitOk;
      }
    }

    if (embed_cmd->parsed()) {
      PipelineConfig local = cfg;
      if (opt_epochs > 0) local.training.epochs = opt_epochs;
      if (opt_lr > 0) local.training.learning_rate = opt_lr;
      if (opt_margin > 0) local.training.margin = opt_margin;
      if (opt_seed >= 0) local.training.seed = static_cast<unsigned>(opt_seed);
      Pipeline alt = make_pipeline(local);
      auto pairs = alt.stage_pairs(alt.stage_extract());
      GateResult gate = alt.gate_labels(pairs);
      if (!gate.ok) {
        std::fputs((gate.message + "\n").c_str(), stderr);
        return kExitLabelsNeeded;
      }
      PairDataset ds = alt.stage_split(gate.labeled);
      if (embed_train->parsed()) {
        SavedHead saved = alt.stage_train(ds);
        EmbeddingBackend backend = alt.make_backend(saved.head);
        std::printf("trained %d epoch(s); final loss %s; test AP %s -> %s\n",
                    saved.config.epochs,
                    saved.loss_history.empty()
                        ? "n/a"
                        : util::format_double(saved.loss_history.back()).c_str(),
                    util::format_3dp(average_precision(backend, ds.test)).c_str(),
                    alt.paths().head().string().c_str());
        return kExitOk;
      }
      // eval
      if (!fs::exists(alt.paths().head()))
        throw PreconditionError("no trained head at " + alt.paths().head().string() +
                                "; run `embed train` first");
      SavedHead saved = head_from_json(
          jsonx::parse<MalformedCorpus>(util::read_file(alt.paths().head()), "head"));
      EmbeddingBackend backend = alt.make_backend(saved.head);
      std::printf("test AP %s over %zu pairs (train %zu)\n",
                  util::format_3dp(average_precision(backend, ds.test)).c_str(), ds.test.size(),
                  ds.train.size());
      return kExitOk;
    }

    if (stance_cmd->parsed()) {
      PipelineConfig local = cfg;
      if (stance_n > 0) local.stance_samples = stance_n;
      Pipeline alt = make_pipeline(local);
      StanceVariant variant = parse_stance_variant(stance_variant);
      auto stances = alt.stage_stances(variant);
      std::printf("%zu stance sample(s) -> %s\n", stances.size(),
                  alt.paths().stances(variant).string().c_str());
      return kExitOk;
    }

    if (align_cmd->parsed()) {
      if (align_compute->parsed()) {
        StanceVariant variant = parse_stance_variant(align_variant);
        if (!fs::exists(pipeline.paths().head()))
          throw PreconditionError("no trained head at " + pipeline.paths().head().string() +
                                  "; run `embed train` first");
        SavedHead saved = head_from_json(
            jsonx::parse<MalformedCorpus>(util::read_file(pipeline.paths().head()), "head"));
        EmbeddingBackend backend = pipeline.make_backend(saved.head);
        auto records = pipeline.stage_align(variant, pipeline.stage_extract(),
                                            pipeline.stage_stances(variant), backend);
        std::printf("%zu distance record(s) -> %s\n", records.size(),
                    pipeline.paths().distances(variant).string().c_str());
        return kExitOk;
      }
      // align report
      StanceVariant variant = parse_stance_variant(report_variant);
      Grouping grouping = parse_grouping(report_grouping);
      fs::path path = pipeline.paths().distances(variant);
      if (!fs::exists(path))
        throw PreconditionError("no distance store at " + path.string() +
                                "; run `align compute` first");
      auto records = distances_from_csv(util::read_file(path));
      auto rows = aggregate(records, grouping);
      if (grouping == Grouping::PartyIteration) {
        std::fputs(emit_party_iteration_pivot(rows, TableFormat::Csv).c_str(), stdout);
      } else {
        VariantRows vr = {{variant, rows}};
        std::fputs(emit_table(grouping, vr, TableFormat::Csv).c_str(), stdout);
      }
      return kExitOk;
    }

    if (app.get_subcommand("report")->parsed()) {
      pipeline.stage_reports();
      std::printf("reports -> %s (manifest %s)\n", pipeline.paths().reports().string().c_str(),
                  pipeline.manifest().hash().c_str());
      return kExitOk;
    }

    if (app.get_subcommand("run")->parsed()) {
      RunResult result = pipeline.run();
      if (result.status == RunStatus::LabelsNeeded) {
        std::fputs((result.message + "\n").c_str(), stderr);
        return kExitLabelsNeeded;
      }
      std::printf("pipeline complete: %ld provider call(s), %ld cache hit(s), manifest %s\n",
                  result.provider_calls, result.cache_hits, result.manifest_hash.c_str());
      std::printf("artifacts -> %s\n", cfg.out_dir.string().c_str());
      return kExitOk;
    }

    std::fputs("no subcommand matched\n", stderr);
    return kExitFailure;
  } catch (const PipelineError& e) {
    std::fprintf(stderr, "error in stage %s: %s\n", e.stage_name.c_str(), e.what());
    return kExitFailure;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFailure;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFailure;
  }
}
