#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>

#include "klucas/pipeline.hpp"

using namespace klucas;

namespace {

PipelineConfig small_config() {
  PipelineConfig c;
  c.k_min = 3;
  c.k_small_max = 4;
  c.mp_bound = 60;
  c.precision = 100;
  return c;
}

const Json& full_run() {
  static const Json b = run_pipeline(small_config());
  return b;
}

Json stop_then_resume(const std::string& label) {
  PipelineOptions first;
  first.stop_at = [&](const std::string& l) { return l == label; };
  Json partial = run_pipeline(small_config(), first);
  EXPECT_FALSE(partial.value("complete", true)) << label;
  PipelineOptions second;
  second.resume = partial;
  return run_pipeline(small_config(), second);
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("klucas_test_" + name + ".json");
}

}  // namespace

TEST(PipelineConfig, Validation) {
  EXPECT_NO_THROW(PipelineConfig{}.validate());
  auto c = small_config();
  c.precision = 10;
  EXPECT_THROW(c.validate(), UsageError);
  c = small_config();
  c.k_min = 2;
  EXPECT_THROW(c.validate(), UsageError);
  c = small_config();
  c.k_small_max = 2;
  EXPECT_THROW(c.validate(), UsageError);
  c = small_config();
  c.k_small_max = 600;
  EXPECT_THROW(c.validate(), UsageError);
  c = small_config();
  c.lattice_c = "1.5";
  EXPECT_THROW(c.validate(), UsageError);
  c.lattice_c = "junk";
  EXPECT_THROW(c.validate(), UsageError);
  c.lattice_c = "5e150";
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(PipelineConfig::from_json(c.to_json()).to_json(), c.to_json());
}

TEST(Pipeline, SmallRunReproducesTheorem) {
  const Json& b = full_run();
  ASSERT_TRUE(b.value("complete", false)) << b.dump(2);
  EXPECT_EQ(b["schema"], kBundleSchema);
  auto expected = theorem_solutions(3, 4);
  EXPECT_EQ(expected.size(), 2u);
  EXPECT_EQ(solution_keys(b["stages"]["base_search"]["solutions"]), expected);
  EXPECT_EQ(solution_keys(b["stages"]["verification"]["solutions"]), expected);
  const Json& s = b["summary"];
  EXPECT_TRUE(s["theorem_match"].get<bool>());
  EXPECT_TRUE(s["case_n_le_k_ok"].get<bool>());
  EXPECT_TRUE(s["guards_hold"].get<bool>());
  EXPECT_TRUE(s["large_k_contradiction"].get<bool>());
  EXPECT_TRUE(s["ok"].get<bool>());
}

TEST(Pipeline, LargeKBranchCertificates) {
  const Json& lk = full_run()["stages"]["large_k"];
  EXPECT_EQ(lk["k_final"], 425);
  EXPECT_EQ(lk["q124"], "17974255294124444596871803224395333592038752850416569230287");
  EXPECT_EQ(lk["tau_first_mismatch"], 8);
  std::map<std::string, std::string> verdicts;
  for (const auto& c : lk["certificates"]) verdicts[c["name"]] = c["verdict"];
  EXPECT_EQ(verdicts["large_k_contradiction"], "equal");
  EXPECT_EQ(verdicts["case_a_k_2"], "equal");
  EXPECT_EQ(verdicts["bd_round_2"], "sharper");
  EXPECT_EQ(verdicts["bd_epsilon"], "equal");
  EXPECT_EQ(verdicts["gamma3_dichotomy_1"], "mismatch");
  EXPECT_EQ(verdicts["a2_lattice"], "mismatch");
}

TEST(Pipeline, ExitCodeFollowsVerdicts) {
  const Json& b = full_run();
  // Published slips in the first large-k round are mismatches, so the strict rule fails.
  EXPECT_FALSE(b["summary"]["strict_ok"].get<bool>());
  EXPECT_EQ(pipeline_exit_code(b), 1);
  EXPECT_EQ(pipeline_exit_code(b, true), 0);
  Json partial = b;
  partial["complete"] = false;
  EXPECT_EQ(pipeline_exit_code(partial, true), 1);
}

TEST(Pipeline, SmallKCapsBelowPublished) {
  for (const auto& e : full_run()["stages"]["small_k_reduction"]["per_k"]) {
    EXPECT_LT(e["n_cap"].get<long>(), 344);
    for (const auto& c : e["certificates"]) EXPECT_EQ(c["verdict"], "sharper") << c["name"];
  }
}

TEST(Pipeline, DeterministicAcrossRunsAndWorkerCounts) {
  ::setenv("KLUCAS_WORKERS", "2", 1);
  Json again = run_pipeline(small_config());
  ::unsetenv("KLUCAS_WORKERS");
  EXPECT_EQ(bundle_text(again), bundle_text(full_run()));
}

TEST(Pipeline, ResumeAtStageBoundaryMatches) {
  EXPECT_EQ(bundle_text(stop_then_resume("case_n_le_k")), bundle_text(full_run()));
}

TEST(Pipeline, ResumeInsidePerKStageMatches) {
  EXPECT_EQ(bundle_text(stop_then_resume("small_k_reduction:k=3")), bundle_text(full_run()));
}

TEST(Pipeline, ResumeRejectsOtherConfig) {
  PipelineOptions o;
  o.resume = full_run();
  auto c = small_config();
  c.mp_bound = 61;
  EXPECT_THROW(run_pipeline(c, o), UsageError);
  Json bad = full_run();
  bad["schema"] = "other/9";
  o.resume = bad;
  EXPECT_THROW(run_pipeline(small_config(), o), UsageError);
}

TEST(Pipeline, CheckpointFileMatchesResult) {
  auto path = temp_path("checkpoint");
  PipelineOptions o;
  o.out_path = path.string();
  o.stop_at = [](const std::string& l) { return l == "bound_chain"; };
  Json partial = run_pipeline(small_config(), o);
  Json on_disk = load_bundle(path.string());
  EXPECT_EQ(on_disk, partial);
  EXPECT_EQ(on_disk["cursor"]["stage"], "small_k_reduction");
  EXPECT_EQ(on_disk["cursor"]["k"], 3);
  std::filesystem::remove(path);
  EXPECT_THROW(load_bundle(path.string()), UsageError);
}

TEST(Pipeline, StageErrorLeavesPartialBundle) {
  auto c = small_config();
  c.lattice_c = "10";  // far too small for any A1 lattice, even after enlarging
  Json b = run_pipeline(c);
  EXPECT_FALSE(b["complete"].get<bool>());
  ASSERT_TRUE(b.contains("error"));
  EXPECT_EQ(b["error"]["stage"], "small_k_reduction");
  EXPECT_TRUE(b["stages"]["bound_chain"]["done"].get<bool>());
  EXPECT_FALSE(b.contains("summary"));
  EXPECT_EQ(pipeline_exit_code(b, true), 1);
  std::string text = emit_report(b, "text");
  EXPECT_NE(text.find("[incomplete]"), std::string::npos);
  EXPECT_NE(text.find("error in small_k_reduction"), std::string::npos);
}

TEST(Report, JsonRoundTrips) {
  const Json& b = full_run();
  EXPECT_EQ(Json::parse(emit_report(b, "json")), b);
  EXPECT_EQ(emit_report(b, "json"), bundle_text(b));
}

TEST(Report, TextListsTwoSolutions) {
  std::string text = emit_report(full_run(), "text");
  EXPECT_NE(text.find("solutions: 2 distinct"), std::string::npos) << text;
  EXPECT_NE(text.find("12 = 1 || 2"), std::string::npos);
  EXPECT_NE(text.find("22 = 2 || 2"), std::string::npos);
  EXPECT_NE(text.find("large_k_contradiction"), std::string::npos);
  EXPECT_EQ(text.find("[incomplete]"), std::string::npos);
  EXPECT_THROW(emit_report(full_run(), "xml"), UsageError);
}

TEST(Report, PartialBundleMarked) {
  PipelineOptions o;
  o.stop_at = [](const std::string& l) { return l == "base_search"; };
  Json partial = run_pipeline(small_config(), o);
  std::string text = emit_report(partial, "text");
  EXPECT_NE(text.find("stage base_search: done"), std::string::npos);
  EXPECT_NE(text.find("stage large_k: [incomplete]"), std::string::npos);
}
