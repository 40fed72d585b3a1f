#include "birm/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>

#include "json.hpp"

#include "birm/bias_scores.hpp"
#include "birm/cooccurrence.hpp"
#include "birm/correction.hpp"
#include "birm/errors.hpp"
#include "birm/glove_trainer.hpp"
#include "birm/io.hpp"
#include "birm/rng.hpp"
#include "birm/semantic_eval.hpp"
#include "birm/synthetic.hpp"
#include "birm/text_pipeline.hpp"
#include "birm/vectors.hpp"
#include "birm/weat.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace birm {

namespace {

constexpr const char* kVersion = "0.1.0";

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw UsageError("bad boolean for " + key + ": " + v);
}

std::int64_t parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const std::int64_t n = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return n;
  } catch (const std::exception&) {
    throw UsageError("bad integer for " + key + ": " + v);
  }
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const std::uint64_t n = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return n;
  } catch (const std::exception&) {
    throw UsageError("bad unsigned integer for " + key + ": " + v);
  }
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw UsageError("bad number for " + key + ": " + v);
  }
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(v);
  while (std::getline(in, item, ',')) {
    const std::string t = io::trimmed(item);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

std::string join_list(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += v[i];
  }
  return out;
}

// Manifest: config hash, input checksums, and per-stage output checksums.
// A stage is resumable when its recorded outputs still match on disk and
// neither the config nor any input file changed.
class Manifest {
 public:
  Manifest(const std::string& out_dir, const std::string& config_text,
           const std::map<std::string, std::string>& input_paths)
      : dir_(out_dir), path_(out_dir + "/manifest.json") {
    const std::string config_hash = io::hex64(io::fnv1a(config_text));
    json inputs = json::object();
    for (const auto& [name, p] : input_paths)
      inputs[name] = {{"path", p}, {"fnv1a", io::hex64(io::fnv1a_file(p))}};

    bool reuse = false;
    if (fs::exists(path_)) {
      std::ifstream in(path_);
      json old = json::parse(in, nullptr, false);
      if (!old.is_discarded() && old.value("config_hash", "") == config_hash &&
          old.value("inputs", json::object()) == inputs)
        reuse = true;
      if (reuse) j_ = std::move(old);
    }
    if (!reuse) {
      j_ = json::object();
      j_["tool"] = "birm";
      j_["version"] = kVersion;
      j_["config_hash"] = config_hash;
      j_["config"] = config_text;
      j_["inputs"] = inputs;
      j_["stages"] = json::object();
    }
  }

  bool done(const std::string& stage) const {
    if (!j_["stages"].contains(stage)) return false;
    const json& outputs = j_["stages"][stage]["outputs"];
    for (auto it = outputs.begin(); it != outputs.end(); ++it) {
      const std::string p = dir_ + "/" + it.key();
      if (!fs::exists(p)) return false;
      if (io::hex64(io::fnv1a_file(p)) != it.value().get<std::string>())
        return false;
    }
    return true;
  }

  void finish(const std::string& stage, const std::vector<std::string>& outputs,
              json info = json::object()) {
    json o = json::object();
    for (const auto& name : outputs)
      o[name] = io::hex64(io::fnv1a_file(dir_ + "/" + name));
    j_["stages"][stage] = {{"outputs", std::move(o)}, {"info", std::move(info)}};
    save();
  }

  void set(const std::string& key, json value) {
    j_[key] = std::move(value);
    save();
  }

 private:
  std::string dir_;
  std::string path_;
  json j_;

  void save() const {
    std::ofstream out(path_);
    if (!out) throw DataError("cannot write " + path_);
    out << j_.dump(2) << '\n';
  }
};

template <typename F>
void run_stage(const std::string& name, F&& f) {
  try {
    f();
  } catch (const UsageError& e) {
    throw UsageError("stage " + name + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError("stage " + name + ": " + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError("stage " + name + ": " + e.what());
  }
}

std::vector<Sentence> load_sentences_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::vector<Sentence> sentences;
  std::string line, tok;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Sentence s;
    std::istringstream ls(line);
    while (ls >> tok) s.push_back(tok);
    sentences.push_back(std::move(s));
  }
  return sentences;
}

void save_sentences_file(const std::string& path,
                         const std::vector<Sentence>& sentences) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path + " for writing");
  std::string line;
  for (const auto& s : sentences) {
    line.clear();
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (i) line += ' ';
      line += s[i];
    }
    line += '\n';
    out << line;
  }
  if (!out) throw DataError("failed writing " + path);
}

std::string format_sci(double v) {
  std::ostringstream os;
  os << std::setprecision(4) << v;
  return os.str();
}

struct Agg {
  std::vector<double> stat, p, effect;
};

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : (v[h - 1] + v[h]) / 2.0;
}

}  // namespace

PipelineConfig PipelineConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config " + path);
  PipelineConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = io::trimmed(line);
    if (t.empty() || t[0] == '#') continue;
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw UsageError(path + ":" + std::to_string(lineno) +
                       ": expected key = value");
    cfg.apply(io::trimmed(t.substr(0, eq)), io::trimmed(t.substr(eq + 1)));
  }
  return cfg;
}

void PipelineConfig::apply(const std::string& key, const std::string& value) {
  if (key == "corpus") corpus = value;
  else if (key == "seeds") seeds = value;
  else if (key == "out_dir") out_dir = value;
  else if (key == "min_sentence_len") min_sentence_len = parse_int(key, value);
  else if (key == "min_count") min_count = parse_int(key, value);
  else if (key == "keep_punct") keep_punct = parse_bool(key, value);
  else if (key == "window") window = std::int32_t(parse_int(key, value));
  else if (key == "score_window") score_window = std::int32_t(parse_int(key, value));
  else if (key == "weighting") weighting = value;
  else if (key == "buckets") buckets = std::int32_t(parse_int(key, value));
  else if (key == "exclude_focal") exclude_focal = parse_bool(key, value);
  else if (key == "threads") threads = std::int32_t(parse_int(key, value));
  else if (key == "c") c = parse_double(key, value);
  else if (key == "smoothing") smoothing = parse_double(key, value);
  else if (key == "seed_magnitude") seed_magnitude = std::int32_t(parse_int(key, value));
  else if (key == "seeds_only") seeds_only = parse_bool(key, value);
  else if (key == "neutralize") neutralize = value;
  else if (key == "symmetrize") symmetrize = parse_bool(key, value);
  else if (key == "dim") dim = std::int32_t(parse_int(key, value));
  else if (key == "epochs") epochs = std::int32_t(parse_int(key, value));
  else if (key == "x_max") x_max = parse_double(key, value);
  else if (key == "alpha") alpha = parse_double(key, value);
  else if (key == "learning_rate") learning_rate = parse_double(key, value);
  else if (key == "deterministic") deterministic = parse_bool(key, value);
  else if (key == "export_mode") export_mode = value;
  else if (key == "runs") runs = std::int32_t(parse_int(key, value));
  else if (key == "root_seed") root_seed = parse_uint(key, value);
  else if (key == "max_exact") max_exact = parse_uint(key, value);
  else if (key == "mc_samples") mc_samples = parse_uint(key, value);
  else if (key == "weat_specs") weat_specs = split_list(value);
  else if (key == "synth_tests") synth_tests = parse_bool(key, value);
  else if (key == "ripa_words") ripa_words = value;
  else if (key == "ripa_fem") ripa_fem = value;
  else if (key == "ripa_masc") ripa_masc = value;
  else if (key == "sim_data") sim_data = value;
  else if (key == "analogy_data") analogy_data = value;
  else throw UsageError("unknown config key: " + key);
}

std::string PipelineConfig::serialize() const {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "corpus = " << corpus << '\n';
  out << "seeds = " << seeds << '\n';
  out << "out_dir = " << out_dir << '\n';
  out << "min_sentence_len = " << min_sentence_len << '\n';
  out << "min_count = " << min_count << '\n';
  out << "keep_punct = " << (keep_punct ? "true" : "false") << '\n';
  out << "window = " << window << '\n';
  out << "score_window = " << score_window << '\n';
  out << "weighting = " << weighting << '\n';
  out << "buckets = " << buckets << '\n';
  out << "exclude_focal = " << (exclude_focal ? "true" : "false") << '\n';
  out << "threads = " << threads << '\n';
  out << "c = " << c << '\n';
  out << "smoothing = " << smoothing << '\n';
  out << "seed_magnitude = " << seed_magnitude << '\n';
  out << "seeds_only = " << (seeds_only ? "true" : "false") << '\n';
  out << "neutralize = " << neutralize << '\n';
  out << "symmetrize = " << (symmetrize ? "true" : "false") << '\n';
  out << "dim = " << dim << '\n';
  out << "epochs = " << epochs << '\n';
  out << "x_max = " << x_max << '\n';
  out << "alpha = " << alpha << '\n';
  out << "learning_rate = " << learning_rate << '\n';
  out << "deterministic = " << (deterministic ? "true" : "false") << '\n';
  out << "export_mode = " << export_mode << '\n';
  out << "runs = " << runs << '\n';
  out << "root_seed = " << root_seed << '\n';
  out << "max_exact = " << max_exact << '\n';
  out << "mc_samples = " << mc_samples << '\n';
  out << "weat_specs = " << join_list(weat_specs) << '\n';
  out << "synth_tests = " << (synth_tests ? "true" : "false") << '\n';
  out << "ripa_words = " << ripa_words << '\n';
  out << "ripa_fem = " << ripa_fem << '\n';
  out << "ripa_masc = " << ripa_masc << '\n';
  out << "sim_data = " << sim_data << '\n';
  out << "analogy_data = " << analogy_data << '\n';
  return out.str();
}

void PipelineConfig::validate() const {
  if (corpus.empty()) throw UsageError("config: corpus is required");
  if (seeds.empty()) throw UsageError("config: seeds is required");
  if (out_dir.empty()) throw UsageError("config: out_dir is required");
  if (weighting != "harmonic" && weighting != "flat")
    throw UsageError("config: weighting must be harmonic or flat");
  if (export_mode != "sum" && export_mode != "main_only")
    throw UsageError("config: export_mode must be sum or main_only");
  if (buckets < 1) throw UsageError("config: buckets must be >= 1");
  if (runs < 1) throw UsageError("config: runs must be >= 1");
  if (window < 1) throw UsageError("config: window must be >= 1");
  if (min_sentence_len < 1) throw UsageError("config: min_sentence_len must be >= 1");
  if (min_count < 1) throw UsageError("config: min_count must be >= 1");
  if (threads < 1) throw UsageError("config: threads must be >= 1");
}

void run_pipeline(const PipelineConfig& cfg, std::ostream& log) {
  cfg.validate();
  fs::create_directories(cfg.out_dir);
  const std::string out = cfg.out_dir;
  const std::string config_text = cfg.serialize();
  {
    std::ofstream cf(out + "/config.resolved");
    if (!cf) throw DataError("cannot write " + out + "/config.resolved");
    cf << config_text;
  }

  std::map<std::string, std::string> inputs;
  inputs["corpus"] = cfg.corpus;
  inputs["seeds"] = cfg.seeds;
  if (cfg.neutralize != "all" && cfg.neutralize != "none")
    inputs["neutralize"] = cfg.neutralize;
  for (std::size_t i = 0; i < cfg.weat_specs.size(); ++i)
    inputs["weat_spec_" + std::to_string(i)] = cfg.weat_specs[i];
  if (!cfg.ripa_words.empty()) inputs["ripa_words"] = cfg.ripa_words;
  if (!cfg.ripa_fem.empty()) inputs["ripa_fem"] = cfg.ripa_fem;
  if (!cfg.ripa_masc.empty()) inputs["ripa_masc"] = cfg.ripa_masc;
  if (!cfg.sim_data.empty()) inputs["sim_data"] = cfg.sim_data;
  if (!cfg.analogy_data.empty()) inputs["analogy_data"] = cfg.analogy_data;
  for (const auto& [name, p] : inputs)
    if (!fs::exists(p)) throw DataError("missing input file (" + name + "): " + p);

  Manifest man(out, config_text, inputs);

  std::vector<std::uint64_t> run_seeds(cfg.runs);
  for (std::int32_t r = 0; r < cfg.runs; ++r)
    run_seeds[r] = rng::derive_seed(cfg.root_seed, 100 + std::uint64_t(r));
  man.set("root_seed", cfg.root_seed);
  man.set("run_seeds", run_seeds);

  // Lazily reloaded intermediates; stages that are resumed skip the load
  // until a later stage needs the artifact.
  std::optional<std::vector<Sentence>> sentences;
  std::optional<Vocabulary> vocab;
  std::optional<ScoreTable> scores;
  auto ensure_sentences = [&]() -> const std::vector<Sentence>& {
    if (!sentences) sentences = load_sentences_file(out + "/sentences.txt");
    return *sentences;
  };
  auto ensure_vocab = [&]() -> const Vocabulary& {
    if (!vocab) vocab = Vocabulary::load(out + "/vocab.txt");
    return *vocab;
  };
  auto ensure_scores = [&]() -> const ScoreTable& {
    if (!scores) scores = ScoreTable::load(out + "/scores.tsv", ensure_vocab());
    return *scores;
  };

  run_stage("preprocess", [&] {
    if (man.done("preprocess")) {
      log << "[preprocess] up to date\n";
      return;
    }
    std::ifstream in(cfg.corpus);
    if (!in) throw DataError("cannot open " + cfg.corpus);
    NormalizeOptions n;
    n.min_sentence_len = std::size_t(cfg.min_sentence_len);
    n.keep_punct = cfg.keep_punct;
    NormalizeStats stats;
    sentences = normalize_corpus(in, n, &stats);
    save_sentences_file(out + "/sentences.txt", *sentences);
    log << "[preprocess] " << stats.sentences_out << " sentences, "
        << stats.tokens_out << " tokens (dropped " << stats.dropped_short
        << " short, " << stats.invalid_utf8_lines << " invalid lines)\n";
    man.finish("preprocess", {"sentences.txt"},
               {{"sentences", stats.sentences_out},
                {"tokens", stats.tokens_out},
                {"dropped_short", stats.dropped_short},
                {"invalid_utf8_lines", stats.invalid_utf8_lines}});
  });

  run_stage("vocab", [&] {
    if (man.done("vocab")) {
      log << "[vocab] up to date\n";
      return;
    }
    vocab = Vocabulary::from_sentences(ensure_sentences(), cfg.min_count);
    if (vocab->empty()) throw DataError("empty vocabulary after min_count filter");
    vocab->save(out + "/vocab.txt");
    log << "[vocab] " << vocab->size() << " tokens\n";
    man.finish("vocab", {"vocab.txt"}, {{"size", vocab->size()}});
  });

  CountOptions copts;
  copts.window = cfg.window;
  copts.score_window = cfg.score_window;
  copts.weighting = cfg.weighting == "flat" ? CountOptions::Weighting::flat
                                            : CountOptions::Weighting::harmonic;
  copts.bucket_radius = cfg.buckets;
  copts.exclude_focal = cfg.exclude_focal;
  copts.threads = cfg.threads;

  run_stage("rawcounts", [&] {
    if (man.done("rawcounts")) {
      log << "[rawcounts] up to date\n";
      return;
    }
    const ScoreTable zeros = ScoreTable::zeros(ensure_vocab().size(), cfg.c);
    const ScoredCooccurrence sc =
        count_scored_pairs(ensure_sentences(), ensure_vocab(), zeros, copts);
    const CooccurrenceMatrix raw = collapse(sc);
    io::write_matrix(out + "/raw_counts.bin", raw);
    log << "[rawcounts] " << raw.size() << " cells, mass " << raw.total_mass()
        << "\n";
    man.finish("rawcounts", {"raw_counts.bin"}, {{"cells", raw.size()}});
  });

  run_stage("scores", [&] {
    if (man.done("scores")) {
      log << "[scores] up to date\n";
      return;
    }
    const SeedSets seed_sets = [&] {
      SeedSets s = SeedSets::load(cfg.seeds);
      s.seed_magnitude = cfg.seed_magnitude;
      return s;
    }();
    const CooccurrenceMatrix raw =
        io::read_matrix(out + "/raw_counts.bin", ensure_vocab().size());
    ScoreDiagnostics diag;
    scores = compute_word_scores(raw, ensure_vocab(), seed_sets, cfg.c,
                                 cfg.smoothing, cfg.seeds_only, &diag);
    scores->save(out + "/scores.tsv", ensure_vocab());
    log << "[scores] written (" << diag.zero_mass_words
        << " zero-mass words scored 0";
    if (!diag.missing_seeds.empty()) {
      log << "; missing seeds:";
      for (const auto& w : diag.missing_seeds) log << ' ' << w;
    }
    log << ")\n";
    man.finish("scores", {"scores.tsv"},
               {{"zero_mass_words", diag.zero_mass_words},
                {"missing_seeds", diag.missing_seeds}});
  });

  run_stage("scoredcounts", [&] {
    if (man.done("scoredcounts")) {
      log << "[scoredcounts] up to date\n";
      return;
    }
    const ScoredCooccurrence sc = count_scored_pairs(
        ensure_sentences(), ensure_vocab(), ensure_scores(), copts);
    io::write_scored(out + "/scored_counts.bin", sc);
    log << "[scoredcounts] " << sc.pair_count() << " pairs\n";
    man.finish("scoredcounts", {"scored_counts.bin"},
               {{"pairs", sc.pair_count()}});
  });

  run_stage("matrices", [&] {
    if (man.done("matrices")) {
      log << "[matrices] up to date\n";
      return;
    }
    const Vocabulary& v = ensure_vocab();
    const ScoredCooccurrence sc =
        io::read_scored(out + "/scored_counts.bin", v.size());
    const CooccurrenceMatrix original = collapse(sc);
    io::write_matrix(out + "/original_counts.bin", original);

    NeutralizationPolicy policy;
    if (cfg.neutralize == "none") {
      policy = NeutralizationPolicy::neutralize_only(v.size(), {}, cfg.symmetrize);
    } else if (cfg.neutralize == "all") {
      SeedSets s = SeedSets::load(cfg.seeds);
      std::vector<std::int32_t> prot;
      for (const auto& lists : {s.a, s.b})
        for (const auto& w : lists)
          if (v.id(w) >= 0) prot.push_back(v.id(w));
      policy = NeutralizationPolicy::neutralize_all_except(v.size(), prot,
                                                           cfg.symmetrize);
    } else {
      std::vector<std::int32_t> ids;
      std::int64_t missing = 0;
      for (const auto& w : io::read_word_list(cfg.neutralize)) {
        const std::int32_t id = v.id(w);
        if (id >= 0)
          ids.push_back(id);
        else
          ++missing;
      }
      if (missing > 0)
        log << "[matrices] " << missing
            << " neutralize-list words not in vocabulary\n";
      policy = NeutralizationPolicy::neutralize_only(v.size(), ids, cfg.symmetrize);
    }
    const CooccurrenceMatrix birm = correct(sc, policy);
    io::write_matrix(out + "/birm_counts.bin", birm);

    const CorrectionStats st = report_correction_stats(original, birm);
    log << "[matrices] original " << original.size() << " cells, corrected "
        << birm.size() << " cells, " << st.modified_cells
        << " modified (max rel change " << format_sci(st.max_rel_change)
        << ")\n";
    man.finish("matrices", {"original_counts.bin", "birm_counts.bin"},
               {{"modified_cells", st.modified_cells},
                {"max_rel_change", st.max_rel_change}});
  });

  run_stage("train", [&] {
    if (man.done("train")) {
      log << "[train] up to date\n";
      return;
    }
    const Vocabulary& v = ensure_vocab();
    TrainerConfig tc;
    tc.dim = cfg.dim;
    tc.epochs = cfg.epochs;
    tc.x_max = cfg.x_max;
    tc.alpha = cfg.alpha;
    tc.learning_rate = cfg.learning_rate;
    tc.deterministic = cfg.deterministic;
    tc.threads = cfg.threads;
    tc.export_mode = cfg.export_mode == "main_only"
                         ? TrainerConfig::ExportMode::main_only
                         : TrainerConfig::ExportMode::sum;
    std::vector<std::string> outputs;
    for (const char* variant : {"original", "birm"}) {
      const CooccurrenceMatrix matrix = io::read_matrix(
          out + "/" + variant + "_counts.bin", v.size());
      for (std::int32_t r = 0; r < cfg.runs; ++r) {
        tc.seed = run_seeds[r];
        std::vector<double> losses;
        const EmbeddingSet emb = train(matrix, tc, &losses);
        const std::string name = std::string("vectors_") + variant + "_run" +
                                 std::to_string(r) + ".txt";
        export_vectors(emb, v, tc.export_mode, out + "/" + name);
        outputs.push_back(name);
        log << "[train] " << variant << " run " << r << ": loss "
            << format_sci(losses.front()) << " -> " << format_sci(losses.back())
            << "\n";
      }
    }
    man.finish("train", outputs);
  });

  run_stage("eval", [&] {
    if (man.done("eval")) {
      log << "[eval] up to date\n";
      return;
    }
    std::vector<WeatTestSpec> tests;
    for (const auto& p : cfg.weat_specs) tests.push_back(WeatTestSpec::load(p));
    if (cfg.synth_tests) {
      // keep only seed words the corpus actually has, matching the scoring
      // stage's tolerance; a synthetic-only corpus covers just he/she
      SeedSets gender = SeedSets::load(cfg.seeds);
      const Vocabulary& v = ensure_vocab();
      auto in_vocab = [&](std::vector<std::string>& words) {
        std::erase_if(words,
                      [&](const std::string& w) { return v.id(w) < 0; });
      };
      in_vocab(gender.a);
      in_vocab(gender.b);
      if (gender.a.empty() || gender.b.empty())
        throw DataError(
            "synthetic tests: a seed pole is entirely absent from the vocabulary");
      const SyntheticSpec synth = SyntheticSpec::defaults();
      tests.push_back(synth_adjective_test(synth, gender));
      tests.push_back(synth_noun_test(synth, gender));
      tests.push_back(synth_indirect_test(synth));
    }

    json weat_rows = json::array();
    json ripa_rows = json::array();
    json sim_rows = json::array();
    json analogy_rows = json::array();
    for (const char* variant : {"original", "birm"}) {
      for (std::int32_t r = 0; r < cfg.runs; ++r) {
        const VectorTable vt = VectorTable::load(
            out + "/vectors_" + variant + "_run" + std::to_string(r) + ".txt");
        for (std::size_t t = 0; t < tests.size(); ++t) {
          const std::uint64_t mc_seed =
              rng::derive_seed(cfg.root_seed, 500 + std::uint64_t(r) * 64 + t);
          const WeatResult res =
              weat(tests[t], vt, cfg.max_exact, cfg.mc_samples, mc_seed);
          weat_rows.push_back(
              {{"test", res.name},
               {"variant", variant},
               {"run", r},
               {"statistic", res.statistic},
               {"p_value", res.p_value},
               {"p_num", res.p_num},
               {"p_den", res.p_den},
               {"effect_size", res.effect_size},
               {"degenerate", res.effect_degenerate},
               {"mode", res.mode == WeatResult::Mode::exact ? "exact" : "montecarlo"}});
        }
        if (!cfg.ripa_words.empty()) {
          const SeedSets gender = SeedSets::load(cfg.seeds);
          const auto fem = cfg.ripa_fem.empty() ? gender.b
                                                : io::read_word_list(cfg.ripa_fem);
          const auto masc = cfg.ripa_masc.empty()
                                ? gender.a
                                : io::read_word_list(cfg.ripa_masc);
          const RipaReport rep =
              ripa_report(io::read_word_list(cfg.ripa_words), fem, masc, vt);
          for (const auto& row : rep.rows)
            ripa_rows.push_back({{"variant", variant},
                                 {"run", r},
                                 {"word", row.word},
                                 {"min", row.min},
                                 {"median", row.median},
                                 {"max", row.max}});
          for (const auto& w : rep.skipped)
            ripa_rows.push_back(
                {{"variant", variant}, {"run", r}, {"word", w}, {"skipped", true}});
        }
        if (!cfg.sim_data.empty()) {
          const SimilarityResult sr =
              similarity_eval(SimilarityDataset::load(cfg.sim_data), vt);
          sim_rows.push_back({{"variant", variant},
                              {"run", r},
                              {"spearman", sr.spearman},
                              {"covered", sr.covered},
                              {"skipped", sr.skipped}});
        }
        if (!cfg.analogy_data.empty()) {
          const AnalogyResult ar =
              analogy_eval(AnalogyDataset::load(cfg.analogy_data), vt);
          analogy_rows.push_back({{"variant", variant},
                                  {"run", r},
                                  {"accuracy", ar.accuracy},
                                  {"covered", ar.covered},
                                  {"skipped", ar.skipped}});
        }
      }
    }
    json results = {{"runs", cfg.runs},
                    {"weat", std::move(weat_rows)},
                    {"ripa", std::move(ripa_rows)},
                    {"similarity", std::move(sim_rows)},
                    {"analogy", std::move(analogy_rows)}};
    std::ofstream rf(out + "/results.json");
    if (!rf) throw DataError("cannot write results.json");
    rf << results.dump(2) << '\n';
    rf.close();
    log << "[eval] " << results["weat"].size() << " WEAT rows\n";
    man.finish("eval", {"results.json"});
  });

  run_stage("report", [&] {
    {
      std::ofstream rt(out + "/report.txt");
      if (!rt) throw DataError("cannot write report.txt");
      write_report(out + "/results.json", rt, out + "/report.tsv");
    }
    std::ifstream rt(out + "/report.txt");
    log << rt.rdbuf();
    man.finish("report", {"report.txt", "report.tsv"});
  });
}

void write_report(const std::string& results_path, std::ostream& text_out,
                  const std::string& tsv_path) {
  std::ifstream in(results_path);
  if (!in) throw DataError("cannot open " + results_path);
  json results = json::parse(in, nullptr, false);
  if (results.is_discarded()) throw DataError("bad JSON in " + results_path);

  std::map<std::pair<std::string, std::string>, Agg> groups;
  std::map<std::pair<std::string, std::string>, std::string> modes;
  for (const auto& row : results.value("weat", json::array())) {
    const auto key = std::make_pair(row.at("test").get<std::string>(),
                                    row.at("variant").get<std::string>());
    Agg& g = groups[key];
    g.stat.push_back(row.at("statistic").get<double>());
    g.p.push_back(row.at("p_value").get<double>());
    g.effect.push_back(row.at("effect_size").get<double>());
    modes[key] = row.at("mode").get<std::string>();
  }

  std::ofstream tsv;  // optional; unopened stream swallows the writes
  if (!tsv_path.empty()) {
    tsv.open(tsv_path);
    if (!tsv) throw DataError("cannot write " + tsv_path);
  }
  tsv << "test\tvariant\truns\tmode\tstat_min\tstat_median\tstat_max"
      << "\tp_min\tp_median\tp_max\teffect_min\teffect_median\teffect_max\n";
  tsv << std::setprecision(10);

  text_out << std::left << std::setw(26) << "test" << std::setw(10) << "variant"
           << std::setw(6) << "runs" << std::setw(12) << "mode" << std::setw(26)
           << "effect min/med/max" << std::setw(12) << "p median"
           << "stat median\n";
  for (const auto& [key, g] : groups) {
    const auto minmax_s = std::minmax_element(g.stat.begin(), g.stat.end());
    const auto minmax_p = std::minmax_element(g.p.begin(), g.p.end());
    const auto minmax_e = std::minmax_element(g.effect.begin(), g.effect.end());
    const double med_s = median_of(g.stat);
    const double med_p = median_of(g.p);
    const double med_e = median_of(g.effect);
    tsv << key.first << '\t' << key.second << '\t' << g.stat.size() << '\t'
        << modes[key] << '\t' << *minmax_s.first << '\t' << med_s << '\t'
        << *minmax_s.second << '\t' << *minmax_p.first << '\t' << med_p << '\t'
        << *minmax_p.second << '\t' << *minmax_e.first << '\t' << med_e << '\t'
        << *minmax_e.second << '\n';
    std::ostringstream eff;
    eff << format_sci(*minmax_e.first) << "/" << format_sci(med_e) << "/"
        << format_sci(*minmax_e.second);
    text_out << std::left << std::setw(26) << key.first << std::setw(10)
             << key.second << std::setw(6) << g.stat.size() << std::setw(12)
             << modes[key] << std::setw(26) << eff.str() << std::setw(12)
             << format_sci(med_p) << format_sci(med_s) << "\n";
  }

  for (const char* section : {"similarity", "analogy"}) {
    const auto rows = results.value(section, json::array());
    if (rows.empty()) continue;
    text_out << "\n" << section << ":\n";
    for (const auto& row : rows) {
      const char* metric = std::string(section) == "similarity" ? "spearman" : "accuracy";
      text_out << "  " << row.at("variant").get<std::string>() << " run "
               << row.at("run").get<int>() << ": " << metric << " "
               << format_sci(row.at(metric).get<double>()) << " (covered "
               << row.at("covered").get<std::int64_t>() << ", skipped "
               << row.at("skipped").get<std::int64_t>() << ")\n";
    }
  }
  const auto ripa_rows = results.value("ripa", json::array());
  if (!ripa_rows.empty()) {
    text_out << "\nripa (min/median/max over attribute pairs):\n";
    for (const auto& row : ripa_rows) {
      text_out << "  " << row.at("variant").get<std::string>() << " run "
               << row.at("run").get<int>() << " " << std::left << std::setw(16)
               << row.at("word").get<std::string>();
      if (row.value("skipped", false))
        text_out << "out of vocabulary\n";
      else
        text_out << format_sci(row.at("min").get<double>()) << "/"
                 << format_sci(row.at("median").get<double>()) << "/"
                 << format_sci(row.at("max").get<double>()) << "\n";
    }
  }
}

}  // namespace birm
