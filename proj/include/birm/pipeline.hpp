#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace birm {

// Fully resolved end-to-end run configuration. Serializes to a flat
// key = value file; CLI flags override file values.
struct PipelineConfig {
  // inputs and outputs
  std::string corpus;
  std::string seeds;
  std::string out_dir;

  // text pipeline
  std::int64_t min_sentence_len = 5;
  std::int64_t min_count = 5;
  bool keep_punct = true;

  // counting
  std::int32_t window = 15;
  std::int32_t score_window = 0;  // 0 = same as window
  std::string weighting = "harmonic";
  std::int32_t buckets = 1;
  bool exclude_focal = false;
  std::int32_t threads = 1;

  // scoring
  double c = 1.3;
  double smoothing = 0.5;
  std::int32_t seed_magnitude = 100;
  bool seeds_only = false;

  // correction
  std::string neutralize = "all";  // all | none | path to word list
  bool symmetrize = false;

  // trainer
  std::int32_t dim = 300;
  std::int32_t epochs = 15;
  double x_max = 100.0;
  double alpha = 0.75;
  double learning_rate = 0.05;
  bool deterministic = true;
  std::string export_mode = "sum";  // sum | main_only

  // experiment
  std::int32_t runs = 3;
  std::uint64_t root_seed = 1;
  std::uint64_t max_exact = 1000000;
  std::uint64_t mc_samples = 100000;

  // evaluations
  std::vector<std::string> weat_specs;  // spec file paths
  bool synth_tests = false;             // add the three synthetic WEAT tests
  std::string ripa_words;
  std::string ripa_fem;   // defaults to the seeds' B pole
  std::string ripa_masc;  // defaults to the seeds' A pole
  std::string sim_data;
  std::string analogy_data;

  static PipelineConfig from_file(const std::string& path);
  void apply(const std::string& key, const std::string& value);
  std::string serialize() const;
  void validate() const;
};

// Runs preprocess -> vocab -> raw counts -> scores -> scored counts ->
// collapse + correct -> train (runs x {original, birm}) -> eval -> report,
// resuming past stages whose outputs already match the manifest. Progress
// goes to log; artifacts plus manifest.json land in cfg.out_dir.
void run_pipeline(const PipelineConfig& cfg, std::ostream& log);

// Re-aggregates a results.json produced by run_pipeline into the report
// tables (min/median/max across runs, per test and variant).
void write_report(const std::string& results_path, std::ostream& text_out,
                  const std::string& tsv_path);

}  // namespace birm
