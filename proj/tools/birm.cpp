#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "birm/bias_scores.hpp"
#include "birm/cooccurrence.hpp"
#include "birm/correction.hpp"
#include "birm/errors.hpp"
#include "birm/glove_trainer.hpp"
#include "birm/io.hpp"
#include "birm/kernels.hpp"
#include "birm/pipeline.hpp"
#include "birm/rng.hpp"
#include "birm/semantic_eval.hpp"
#include "birm/synthetic.hpp"
#include "birm/text_pipeline.hpp"
#include "birm/vectors.hpp"
#include "birm/weat.hpp"

namespace {

using namespace birm;

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path + " for writing");
  return out;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in = open_in(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::vector<Sentence> load_sentences(const std::string& path) {
  std::ifstream in = open_in(path);
  std::vector<Sentence> sentences;
  std::string line, tok;
  while (std::getline(in, line)) {
    Sentence s;
    std::istringstream ls(line);
    while (ls >> tok) s.push_back(tok);
    if (!s.empty()) sentences.push_back(std::move(s));
  }
  return sentences;
}

std::string format(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

void print_weat(const WeatResult& r) {
  std::cout << std::left << std::setw(28) << r.name << std::setw(14)
            << format(r.statistic) << std::setw(14) << format(r.p_value)
            << std::setw(12)
            << (r.effect_degenerate ? "degenerate" : format(r.effect_size))
            << (r.mode == WeatResult::Mode::exact ? "exact" : "montecarlo")
            << " (" << r.p_num << "/" << r.p_den << ")\n";
}

void print_weat_machine(const WeatResult& r) {
  std::cout << r.name << ' ' << std::setprecision(17) << r.statistic << ' '
            << r.p_value << ' ' << r.effect_size << ' '
            << (r.mode == WeatResult::Mode::exact ? "exact" : "montecarlo")
            << '\n';
}

struct Args {
  // shared slots; each subcommand binds the ones it uses
  std::string in, out, corpus, vocab_path, scores_path, seeds_path, counts;
  std::string scored, vectors, spec, words, fem, masc, data, real, synth;
  std::string config_path, results, tsv, neutralize = "all";
  std::string weighting = "harmonic", export_mode = "sum";
  std::int64_t min_sentence_len = 5, min_count = 5;
  std::int32_t window = 15, score_window = 0, buckets = 1, threads = 1;
  std::int32_t dim = 300, epochs = 15, seed_magnitude = 100;
  double c = 1.3, smoothing = 0.5, x_max = 100.0, alpha = 0.75, lr = 0.05;
  std::uint64_t seed = 1, max_exact = 1000000, mc_samples = 100000;
  bool keep_punct = true, seeds_only = false, exclude_focal = false;
  bool symmetrize = false, deterministic = false, check = false;
  bool print_config = false, collapse_out = false;
  std::vector<std::string> overrides;
};

int dispatch(CLI::App& app, Args& a) {
  if (app.got_subcommand("preprocess")) {
    std::ifstream in = open_in(a.in);
    std::ofstream out = open_out(a.out);
    NormalizeOptions opts;
    opts.min_sentence_len = std::size_t(a.min_sentence_len);
    opts.keep_punct = a.keep_punct;
    NormalizeStats stats;
    std::string line;
    normalize_corpus(
        in, opts,
        [&](Sentence&& s) {
          line.clear();
          for (std::size_t i = 0; i < s.size(); ++i) {
            if (i) line += ' ';
            line += s[i];
          }
          line += '\n';
          out << line;
        },
        &stats);
    if (!out) throw DataError("failed writing " + a.out);
    std::cerr << stats.sentences_out << " sentences, " << stats.tokens_out
              << " tokens (dropped " << stats.dropped_short << " short, "
              << stats.invalid_utf8_lines << " invalid UTF-8 lines)\n";
    return 0;
  }

  if (app.got_subcommand("vocab")) {
    const auto sentences = load_sentences(a.in);
    const Vocabulary v = Vocabulary::from_sentences(sentences, a.min_count);
    v.save(a.out);
    std::cerr << v.size() << " tokens\n";
    return 0;
  }

  if (app.got_subcommand("score")) {
    const Vocabulary v = Vocabulary::load(a.vocab_path);
    const CooccurrenceMatrix counts = io::read_matrix(a.counts, v.size());
    SeedSets seeds = SeedSets::load(a.seeds_path);
    seeds.seed_magnitude = a.seed_magnitude;
    ScoreDiagnostics diag;
    const ScoreTable scores = compute_word_scores(counts, v, seeds, a.c,
                                                  a.smoothing, a.seeds_only, &diag);
    scores.save(a.out, v);
    std::cerr << "scored " << v.size() << " words (" << diag.zero_mass_words
              << " zero-mass)";
    if (!diag.missing_seeds.empty()) {
      std::cerr << "; seeds missing from vocabulary:";
      for (const auto& w : diag.missing_seeds) std::cerr << ' ' << w;
    }
    std::cerr << '\n';
    return 0;
  }

  if (app.got_subcommand("cooccur")) {
    const Vocabulary v = Vocabulary::load(a.vocab_path);
    const ScoreTable scores = a.scores_path.empty()
                                  ? ScoreTable::zeros(v.size(), a.c)
                                  : ScoreTable::load(a.scores_path, v);
    CountOptions opts;
    opts.window = a.window;
    opts.score_window = a.score_window;
    opts.weighting = a.weighting == "flat" ? CountOptions::Weighting::flat
                                           : CountOptions::Weighting::harmonic;
    opts.bucket_radius = a.buckets;
    opts.exclude_focal = a.exclude_focal;
    opts.threads = a.threads;
    if (a.weighting != "flat" && a.weighting != "harmonic")
      throw UsageError("weighting must be harmonic or flat");
    const auto sentences = load_sentences(a.corpus);
    const ScoredCooccurrence sc = count_scored_pairs(sentences, v, scores, opts);
    if (a.collapse_out) {
      io::write_matrix(a.out, collapse(sc));
    } else {
      io::write_scored(a.out, sc);
    }
    std::cerr << sc.pair_count() << " pairs\n";
    return 0;
  }

  if (app.got_subcommand("birm")) {
    const Vocabulary v = Vocabulary::load(a.vocab_path);
    const ScoredCooccurrence sc = io::read_scored(a.scored, v.size());
    NeutralizationPolicy policy;
    if (a.neutralize == "none") {
      policy = NeutralizationPolicy::neutralize_only(v.size(), {}, a.symmetrize);
    } else if (a.neutralize == "all") {
      const SeedSets seeds = SeedSets::load(a.seeds_path);
      std::vector<std::int32_t> prot;
      for (const auto* list : {&seeds.a, &seeds.b})
        for (const auto& w : *list)
          if (v.id(w) >= 0) prot.push_back(v.id(w));
      policy = NeutralizationPolicy::neutralize_all_except(v.size(), prot,
                                                           a.symmetrize);
    } else {
      std::vector<std::int32_t> ids;
      for (const auto& w : io::read_word_list(a.neutralize))
        if (v.id(w) >= 0) ids.push_back(v.id(w));
      policy = NeutralizationPolicy::neutralize_only(v.size(), ids, a.symmetrize);
    }
    const CooccurrenceMatrix before = collapse(sc);
    const CooccurrenceMatrix after = correct(sc, policy);
    io::write_matrix(a.out, after);
    const CorrectionStats st = report_correction_stats(before, after);
    std::cerr << st.modified_cells << " cells modified, max relative change "
              << format(st.max_rel_change) << '\n';
    return 0;
  }

  if (app.got_subcommand("train")) {
    const Vocabulary v = Vocabulary::load(a.vocab_path);
    const CooccurrenceMatrix matrix = io::read_matrix(a.counts, v.size());
    TrainerConfig cfg;
    cfg.dim = a.dim;
    cfg.epochs = a.epochs;
    cfg.x_max = a.x_max;
    cfg.alpha = a.alpha;
    cfg.learning_rate = a.lr;
    cfg.seed = a.seed;
    cfg.threads = a.threads;
    cfg.deterministic = a.deterministic || a.threads == 1;
    cfg.export_mode = a.export_mode == "main_only"
                          ? TrainerConfig::ExportMode::main_only
                          : TrainerConfig::ExportMode::sum;
    if (a.export_mode != "sum" && a.export_mode != "main_only")
      throw UsageError("export mode must be sum or main_only");
    std::vector<double> losses;
    const EmbeddingSet emb = train(matrix, cfg, &losses);
    export_vectors(emb, v, cfg.export_mode, a.out);
    std::cerr << "epoch loss " << format(losses.front()) << " -> "
              << format(losses.back()) << '\n';
    return 0;
  }

  if (app.got_subcommand("eval-weat")) {
    const VectorTable vt = VectorTable::load(a.vectors);
    const WeatTestSpec spec = WeatTestSpec::load(a.spec);
    const WeatResult r = weat(spec, vt, a.max_exact, a.mc_samples, a.seed);
    std::cout << std::left << std::setw(28) << "test" << std::setw(14)
              << "statistic" << std::setw(14) << "p-value" << std::setw(12)
              << "effect"
              << "mode\n";
    print_weat(r);
    std::cout << '\n';
    print_weat_machine(r);
    return 0;
  }

  if (app.got_subcommand("eval-ripa")) {
    const VectorTable vt = VectorTable::load(a.vectors);
    const RipaReport rep =
        ripa_report(io::read_word_list(a.words), io::read_word_list(a.fem),
                    io::read_word_list(a.masc), vt);
    std::cout << std::left << std::setw(20) << "word" << std::setw(14) << "min"
              << std::setw(14) << "median"
              << "max\n";
    for (const auto& row : rep.rows)
      std::cout << std::left << std::setw(20) << row.word << std::setw(14)
                << format(row.min) << std::setw(14) << format(row.median)
                << format(row.max) << '\n';
    for (const auto& w : rep.skipped)
      std::cout << std::left << std::setw(20) << w << "out of vocabulary\n";
    return 0;
  }

  if (app.got_subcommand("eval-sim")) {
    const VectorTable vt = VectorTable::load(a.vectors);
    const SimilarityResult r = similarity_eval(SimilarityDataset::load(a.data), vt);
    std::cout << "spearman " << format(r.spearman) << " covered " << r.covered
              << " skipped " << r.skipped << '\n';
    return 0;
  }

  if (app.got_subcommand("eval-analogy")) {
    const VectorTable vt = VectorTable::load(a.vectors);
    const AnalogyResult r = analogy_eval(AnalogyDataset::load(a.data), vt);
    std::cout << "accuracy " << format(r.accuracy) << " covered " << r.covered
              << " skipped " << r.skipped << '\n';
    return 0;
  }

  if (app.got_subcommand("synth-gen")) {
    const SyntheticSpec spec = SyntheticSpec::defaults(a.seed);
    const auto sentences = generate(spec);
    std::ofstream out = open_out(a.out);
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
    if (!out) throw DataError("failed writing " + a.out);
    if (a.check) {
      std::cout << std::left << std::setw(16) << "word" << std::setw(10)
                << "pronoun" << std::setw(10) << "matched" << std::setw(10)
                << "other" << std::setw(8) << "ratio"
                << "ok\n";
      for (const auto& row : stereotype_ratio_check(sentences, spec))
        std::cout << std::left << std::setw(16) << row.word << std::setw(10)
                  << row.matched_pronoun << std::setw(10) << row.matched
                  << std::setw(10) << row.unmatched << std::setw(8) << row.ratio
                  << (row.ok ? "yes" : "NO") << '\n';
    }
    std::cerr << sentences.size() << " sentences\n";
    return 0;
  }

  if (app.got_subcommand("synth-mix")) {
    const auto mixed = mix_lines(read_lines(a.real), read_lines(a.synth), a.seed);
    std::ofstream out = open_out(a.out);
    for (const auto& line : mixed) out << line << '\n';
    if (!out) throw DataError("failed writing " + a.out);
    std::cerr << mixed.size() << " lines\n";
    return 0;
  }

  if (app.got_subcommand("run")) {
    PipelineConfig cfg = a.config_path.empty()
                             ? PipelineConfig()
                             : PipelineConfig::from_file(a.config_path);
    for (const auto& kv : a.overrides) {
      const std::size_t eq = kv.find('=');
      if (eq == std::string::npos)
        throw UsageError("--set expects key=value, got: " + kv);
      cfg.apply(io::trimmed(kv.substr(0, eq)), io::trimmed(kv.substr(eq + 1)));
    }
    if (a.print_config) {
      std::cout << cfg.serialize();
      return 0;
    }
    run_pipeline(cfg, std::cout);
    return 0;
  }

  if (app.got_subcommand("report")) {
    write_report(a.results, std::cout, a.tsv);
    return 0;
  }

  throw UsageError("no subcommand given");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"BIRM: bias-corrected co-occurrence counting and GloVe training"};
  app.set_version_flag("--version", "birm 0.1.0");
  app.require_subcommand(1);

  Args a;
  std::string kernels;
  app.add_option("--kernels", kernels, "Force kernel implementation (scalar|avx2)");

  auto* pre = app.add_subcommand("preprocess", "Normalize raw text into sentences");
  pre->add_option("--in", a.in, "Raw UTF-8 text, one sentence per line")->required();
  pre->add_option("--out", a.out, "Normalized sentences")->required();
  pre->add_option("--min-sentence-len", a.min_sentence_len, "Minimum tokens per sentence");
  pre->add_flag("--keep-punct,!--drop-punct", a.keep_punct,
                "Keep punctuation runs as tokens (default on)");

  auto* voc = app.add_subcommand("vocab", "Build the vocabulary");
  voc->add_option("--in", a.in, "Normalized sentences")->required();
  voc->add_option("--out", a.out, "Vocabulary file")->required();
  voc->add_option("--min-count", a.min_count, "Minimum corpus count");

  auto* sco = app.add_subcommand("score", "Compute per-word bias scores");
  sco->add_option("--counts", a.counts, "Collapsed co-occurrence counts (binary)")->required();
  sco->add_option("--vocab", a.vocab_path, "Vocabulary file")->required();
  sco->add_option("--seeds", a.seeds_path, "Seed sets file ([A]/[B] sections)")->required();
  sco->add_option("--c", a.c, "Score scaling constant");
  sco->add_option("--seed-magnitude", a.seed_magnitude, "Fixed seed score magnitude");
  sco->add_option("--smoothing", a.smoothing, "Additive smoothing pseudo-count");
  sco->add_flag("--seeds-only", a.seeds_only, "Zero all non-seed scores");
  sco->add_option("--out", a.out, "Score table output")->required();

  auto* coo = app.add_subcommand("cooccur", "Count score-bucketed co-occurrences");
  coo->add_option("--corpus", a.corpus, "Normalized sentences")->required();
  coo->add_option("--vocab", a.vocab_path, "Vocabulary file")->required();
  coo->add_option("--scores", a.scores_path, "Score table (omit for all-zero scores)");
  coo->add_option("--window", a.window, "Co-occurrence window");
  coo->add_option("--score-window", a.score_window,
                  "Bucket score window (0 = same as --window)");
  coo->add_option("--weighting", a.weighting, "harmonic or flat");
  coo->add_option("--buckets", a.buckets, "Bucket radius k for S = {-k..k}");
  coo->add_flag("--exclude-focal", a.exclude_focal,
                "Exclude the focal word from the context score sum");
  coo->add_option("--threads", a.threads, "Counting shards");
  coo->add_flag("--collapse", a.collapse_out, "Write the collapsed (unbucketed) matrix");
  coo->add_option("--out", a.out, "Binary counts output")->required();

  auto* cor = app.add_subcommand("birm", "Apply the bias correction to scored counts");
  cor->add_option("--scored", a.scored, "Scored co-occurrence file")->required();
  cor->add_option("--vocab", a.vocab_path, "Vocabulary file")->required();
  cor->add_option("--seeds", a.seeds_path, "Seed sets file (protected words)")->required();
  cor->add_option("--neutralize", a.neutralize,
                  "all, none, or a word-list file of contexts to correct");
  cor->add_flag("--symmetrize", a.symmetrize, "Symmetrize the +/- bucket weights");
  cor->add_option("--out", a.out, "Corrected collapsed matrix output")->required();

  auto* tra = app.add_subcommand("train", "Train GloVe embeddings from counts");
  tra->add_option("--counts", a.counts, "Collapsed co-occurrence counts (binary)")->required();
  tra->add_option("--vocab", a.vocab_path, "Vocabulary file")->required();
  tra->add_option("--dim", a.dim, "Embedding dimension");
  tra->add_option("--epochs", a.epochs, "Training epochs");
  tra->add_option("--x-max", a.x_max, "Loss weight saturation point");
  tra->add_option("--alpha", a.alpha, "Loss weight exponent");
  tra->add_option("--lr", a.lr, "AdaGrad learning rate");
  tra->add_option("--seed", a.seed, "Training seed");
  tra->add_option("--threads", a.threads, "Hogwild workers (>1 disables determinism)");
  tra->add_flag("--deterministic", a.deterministic,
                "Force sequential seeded updates");
  tra->add_option("--export-mode", a.export_mode, "sum or main_only");
  tra->add_option("--out", a.out, "Vector file output")->required();

  auto* ewe = app.add_subcommand("eval-weat", "Run a WEAT permutation test");
  ewe->add_option("--vectors", a.vectors, "Vector file")->required();
  ewe->add_option("--spec", a.spec, "Test spec file ([X][Y][A][B])")->required();
  ewe->add_option("--max-exact", a.max_exact,
                  "Enumerate exactly up to this many partitions");
  ewe->add_option("--mc-samples", a.mc_samples, "Monte-Carlo sample count");
  ewe->add_option("--seed", a.seed, "Monte-Carlo seed");

  auto* eri = app.add_subcommand("eval-ripa", "RIPA projections onto attribute pairs");
  eri->add_option("--vectors", a.vectors, "Vector file")->required();
  eri->add_option("--words", a.words, "Words to score")->required();
  eri->add_option("--fem", a.fem, "Feminine attribute words")->required();
  eri->add_option("--masc", a.masc, "Masculine attribute words")->required();

  auto* esi = app.add_subcommand("eval-sim", "Spearman word-similarity evaluation");
  esi->add_option("--vectors", a.vectors, "Vector file")->required();
  esi->add_option("--data", a.data, "word1<TAB>word2<TAB>score file")->required();

  auto* ean = app.add_subcommand("eval-analogy", "3CosAdd analogy evaluation");
  ean->add_option("--vectors", a.vectors, "Vector file")->required();
  ean->add_option("--data", a.data, "a b c d file")->required();

  auto* sge = app.add_subcommand("synth-gen", "Generate the synthetic stereotype corpus");
  sge->add_option("--seed", a.seed, "Shuffle seed");
  sge->add_flag("--check", a.check, "Print the per-word pronoun ratio table");
  sge->add_option("--out", a.out, "Corpus output")->required();

  auto* smi = app.add_subcommand("synth-mix", "Shuffle a real and a synthetic corpus together");
  smi->add_option("--real", a.real, "Real corpus (lines)")->required();
  smi->add_option("--synth", a.synth, "Synthetic corpus (lines)")->required();
  smi->add_option("--seed", a.seed, "Shuffle seed");
  smi->add_option("--out", a.out, "Mixed corpus output")->required();

  auto* run = app.add_subcommand("run", "Run the full pipeline from a config");
  run->add_option("--config", a.config_path, "Flat key = value config file");
  run->add_option("--set", a.overrides, "Override config values (key=value)");
  run->add_flag("--print-config", a.print_config, "Dump the resolved config and exit");

  auto* rep = app.add_subcommand("report", "Aggregate a results.json into report tables");
  rep->add_option("--results", a.results, "results.json from a pipeline run")->required();
  rep->add_option("--tsv", a.tsv, "Also write a TSV table here");

  try {
    app.parse(argc, argv);
    if (!kernels.empty()) {
      if (kernels == "scalar")
        birm::kernels::force_isa(birm::kernels::Isa::scalar);
      else if (kernels == "avx2")
        birm::kernels::force_isa(birm::kernels::Isa::avx2);
      else
        throw UsageError("unknown kernel set: " + kernels);
    }
    return dispatch(app, a);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
