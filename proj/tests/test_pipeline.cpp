#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "lexalign/pipeline.hpp"

using namespace lexalign;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

PipelineConfig fixture_config(const fs::path& out_dir) {
  PipelineConfig cfg = load_config("data/fixture/config.mock.json");
  cfg.out_dir = out_dir;
  return cfg;
}

std::vector<fs::path> tree_files(const fs::path& root) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    fs::path rel = fs::relative(entry.path(), root);
    if (rel.begin()->string() == ".cache") continue;
    if (rel == "manifest.json") continue;
    files.push_back(rel);
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace

TEST_CASE("config defaults, overrides, and path resolution", "[pipeline]") {
  jsonx::Json minimal = {{"schema_version", 1}};
  PipelineConfig cfg = config_from_json(minimal, "/base");
  CHECK(cfg.corpus_path == fs::path("/base/data/corpus.json"));
  CHECK(cfg.articles_path == fs::path("/base/data/articles.json"));
  CHECK(cfg.out_dir == fs::path("/base/out"));
  CHECK(cfg.transcript_path.empty());
  CHECK(cfg.mock);
  CHECK(cfg.model_id == "gpt-4-turbo");
  CHECK(cfg.extract_temperature == 0.0);
  CHECK(cfg.stance_temperature == 1.0);
  CHECK(cfg.stance_samples == 5);
  CHECK(cfg.variants ==
        std::vector<StanceVariant>({StanceVariant::Fatto, StanceVariant::FattoClean}));
  CHECK(cfg.report_variant == StanceVariant::Fatto);
  CHECK(cfg.test_fraction == 0.3);
  CHECK(cfg.split_seed == 7);
  CHECK(cfg.encoder_dim == 256);
  CHECK(cfg.resolved_head_dim() == 256);
  CHECK(cfg.training.epochs == 25);
  CHECK(cfg.training.learning_rate == 2e-5);

  jsonx::Json overridden = {{"schema_version", 1},
                            {"corpus", "/abs/corpus.json"},
                            {"mock", false},
                            {"model_id", "other"},
                            {"variants", {"fatto"}},
                            {"head_dim", 64},
                            {"training", {{"epochs", 3}, {"learning_rate", 0.01}}}};
  PipelineConfig cfg2 = config_from_json(overridden, "/base");
  CHECK(cfg2.corpus_path == fs::path("/abs/corpus.json"));  // absolute stays put
  CHECK_FALSE(cfg2.mock);
  CHECK(cfg2.model_id == "other");
  CHECK(cfg2.variants == std::vector<StanceVariant>({StanceVariant::Fatto}));
  CHECK(cfg2.resolved_head_dim() == 64);
  CHECK(cfg2.training.epochs == 3);
  CHECK(cfg2.training.learning_rate == 0.01);
  CHECK(cfg2.training.margin == 0.5);  // untouched defaults survive

  CHECK_THROWS_AS(config_from_json({{"schema_version", 2}}, "/base"), MalformedCorpus);
  CHECK_THROWS_AS(config_from_json({{"schema_version", 1}, {"mock", "yes"}}, "/base"),
                  MalformedCorpus);
  CHECK_THROWS_AS(config_from_json({{"schema_version", 1}, {"variants", jsonx::Json::array()}},
                                   "/base"),
                  MalformedCorpus);

  PipelineConfig fixture = load_config("data/fixture/config.mock.json");
  CHECK(fixture.corpus_path == fs::path("data/fixture") / "corpus.json");
  CHECK(fixture.articles_path == fs::path("data/fixture") / "../articles.json");
  CHECK(fixture.model_id == "mock-model-1");
  CHECK(fixture.training.learning_rate == 0.01);
}

TEST_CASE("client construction preconditions", "[pipeline]") {
  PipelineConfig cfg;
  cfg.mock = true;
  cfg.transcript_path.clear();
  Pipeline no_transcript(cfg);
  CHECK_THROWS_AS(no_transcript.client(), PreconditionError);

  cfg.mock = false;
  Pipeline no_provider(cfg);
  CHECK_THROWS_WITH(no_provider.client(), Catch::Matchers::ContainsSubstring("CLI"));
}

TEST_CASE("a mock run produces the full artifact tree and replays for free", "[pipeline]") {
  TempDir out("lexalign_pipeline_run");
  PipelineConfig cfg = fixture_config(out.path);

  Pipeline pipeline(cfg);
  RunResult first = pipeline.run();
  CHECK(first.status == RunStatus::Complete);
  CHECK(first.provider_calls == 33);  // 3 extractions + 2 variants x 3 rulings x 5 samples
  CHECK_FALSE(first.manifest_hash.empty());

  PipelinePaths paths{out.path};
  for (const fs::path& p :
       {paths.analyses(), paths.rubric_scores(), paths.pairs(), paths.split(), paths.head(),
        paths.metrics(), paths.stances(StanceVariant::Fatto),
        paths.stances(StanceVariant::FattoClean), paths.distances(StanceVariant::Fatto),
        paths.distances(StanceVariant::FattoClean), paths.unmatched(StanceVariant::Fatto),
        paths.manifest(), paths.reports() / "party_verdict.csv",
        paths.reports() / "party_verdict.csv.manifest",
        paths.reports() / "party_iteration_fatto.csv",
        paths.reports() / "article_party_fatto.svg", paths.reports() / "rubric_summary.csv",
        paths.reports() / "retrieval.csv"}) {
    INFO(p.string());
    CHECK(fs::exists(p));
  }

  // Every artifact is already on disk, so a fresh pipeline replays without
  // touching the provider and reports the same manifest identity.
  Pipeline warm(cfg);
  RunResult second = warm.run();
  CHECK(second.status == RunStatus::Complete);
  CHECK(second.provider_calls == 0);
  CHECK(second.manifest_hash == first.manifest_hash);

  // A brand-new output directory reproduces the same bytes (cache and
  // manifest timestamps aside).
  TempDir out2("lexalign_pipeline_run2");
  Pipeline rerun(fixture_config(out2.path));
  CHECK(rerun.run().status == RunStatus::Complete);
  auto files1 = tree_files(out.path);
  auto files2 = tree_files(out2.path);
  REQUIRE(files1 == files2);
  for (const auto& rel : files1) {
    INFO(rel.string());
    CHECK(util::read_file(out.path / rel) == util::read_file(out2.path / rel));
  }
}

TEST_CASE("missing labels halt the run at the gate with instructions", "[pipeline]") {
  TempDir out("lexalign_pipeline_gate");
  PipelineConfig cfg = fixture_config(out.path);
  cfg.labels_path = out.path / "no_labels.csv";  // does not exist yet

  Pipeline pipeline(cfg);
  RunResult result = pipeline.run();
  CHECK(result.status == RunStatus::LabelsNeeded);
  CHECK(result.message.find("19 pair(s) await labels") != std::string::npos);
  CHECK(result.message.find("pairs_unlabeled.csv") != std::string::npos);

  PipelinePaths paths{out.path};
  CHECK(fs::exists(paths.unlabeled()));
  CHECK(fs::exists(paths.pairs()));
  CHECK_FALSE(fs::exists(paths.split()));
  CHECK_FALSE(fs::exists(paths.distances(StanceVariant::Fatto)));

  // The manifest records the halt.
  jsonx::Json m = jsonx::parse<MalformedCorpus>(util::read_file(paths.manifest()), "manifest");
  CHECK(m.at("run").at("status") == "labels-needed");

  // The unlabeled worksheet lists every pair once with both texts.
  auto lines = util::split_lines(util::read_file(paths.unlabeled()));
  CHECK(lines[0] == "pair_id,ruling_id,article,party_a,party_b,text_a,text_b");
  CHECK(lines.size() == 21);  // header + 19 pairs + terminating newline
  CHECK(lines[20].empty());

  // Supplying the labels lets the same output directory resume: extraction
  // is already on disk, so only the stance samples hit the provider.
  fs::copy_file("data/fixture/labels.csv", cfg.labels_path);
  Pipeline resumed(cfg);
  RunResult done = resumed.run();
  CHECK(done.status == RunStatus::Complete);
  CHECK(done.provider_calls == 30);
}

TEST_CASE("a truncated transcript fails in the stance stage, keeping artifacts", "[pipeline]") {
  TempDir out("lexalign_pipeline_fail");
  PipelineConfig cfg = fixture_config(out.path);

  // Keep only the extraction entries (temperature 0) of the transcript.
  jsonx::Json full = jsonx::parse<MalformedCorpus>(util::read_file(cfg.transcript_path),
                                                   "transcript");
  jsonx::Json truncated = full;
  truncated["entries"] = jsonx::Json::array();
  for (const auto& e : full.at("entries"))
    if (e.at("temperature").get<double>() == 0.0) truncated["entries"].push_back(e);
  fs::path short_transcript = out.path / "short_transcript.json";
  util::write_file(short_transcript, truncated.dump(2) + "\n");
  cfg.transcript_path = short_transcript;

  Pipeline pipeline(cfg);
  try {
    pipeline.run();
    FAIL("expected PipelineError");
  } catch (const PipelineError& e) {
    CHECK(e.stage_name == "stance");
  }

  PipelinePaths paths{out.path};
  CHECK(fs::exists(paths.analyses()));
  CHECK(fs::exists(paths.pairs()));
  CHECK(fs::exists(paths.split()));
  CHECK(fs::exists(paths.head()));
  CHECK_FALSE(fs::exists(paths.stances(StanceVariant::Fatto)));
  CHECK_FALSE(fs::exists(paths.distances(StanceVariant::Fatto)));
}

TEST_CASE("reports rebuild byte-identically from persisted stores", "[pipeline]") {
  TempDir out("lexalign_pipeline_rereport");
  PipelineConfig cfg = fixture_config(out.path);
  Pipeline pipeline(cfg);
  REQUIRE(pipeline.run().status == RunStatus::Complete);

  PipelinePaths paths{out.path};
  std::map<std::string, std::string> before;
  for (const auto& entry : fs::directory_iterator(paths.reports()))
    before[entry.path().filename().string()] = util::read_file(entry.path());
  REQUIRE_FALSE(before.empty());

  fs::remove_all(paths.reports());
  Pipeline rebuilder(cfg);
  rebuilder.stage_reports();

  std::map<std::string, std::string> after;
  for (const auto& entry : fs::directory_iterator(paths.reports()))
    after[entry.path().filename().string()] = util::read_file(entry.path());
  CHECK(after == before);
}

TEST_CASE("the manifest hash pins the stable configuration", "[pipeline]") {
  TempDir out("lexalign_pipeline_manifest");
  PipelineConfig cfg = fixture_config(out.path);

  Pipeline a(cfg), b(cfg);
  CHECK(a.manifest().hash() == b.manifest().hash());
  CHECK(a.manifest().hash().size() == 16);

  PipelineConfig other = cfg;
  other.model_id = "different-model";
  CHECK(Pipeline(other).manifest().hash() != a.manifest().hash());

  other = cfg;
  other.training.learning_rate *= 2;
  CHECK(Pipeline(other).manifest().hash() != a.manifest().hash());

  // Output location does not change identity.
  PipelineConfig moved = cfg;
  moved.out_dir = out.path / "elsewhere";
  CHECK(Pipeline(moved).manifest().hash() == a.manifest().hash());

  // After a run, the written manifest and every report sidecar carry the hash.
  Pipeline runner(cfg);
  REQUIRE(runner.run().status == RunStatus::Complete);
  PipelinePaths paths{out.path};
  jsonx::Json m = jsonx::parse<MalformedCorpus>(util::read_file(paths.manifest()), "manifest");
  std::string hash = runner.manifest().hash();
  CHECK(m.at("manifest_hash") == hash);
  CHECK(m.at("run").at("status") == "complete");
  CHECK(util::read_file(paths.reports() / "party_verdict.csv.manifest") == hash + "\n");
}
