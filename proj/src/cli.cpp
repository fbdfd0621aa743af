#include "hlwc/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "hlwc/checkpoint.hpp"
#include "hlwc/config.hpp"
#include "hlwc/corpus.hpp"
#include "hlwc/errors.hpp"
#include "hlwc/evaluation.hpp"
#include "hlwc/export.hpp"
#include "hlwc/sampler.hpp"
#include "hlwc/synthetic.hpp"

namespace hlwc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CorpusArgs {
  std::string docword;
  std::string vocab;
  std::string text_dir;
};

struct HyperArgs {
  double gamma = 1.0;
  std::vector<double> eta;
  std::vector<double> alpha;
  int levels = 3;
};

struct ExportArgs {
  ExportOptions options;
  bool hide_root = false;
};

void add_corpus_options(CLI::App* cmd, CorpusArgs& a) {
  auto* dw = cmd->add_option("--docword", a.docword, "UCI docword file");
  cmd->add_option("--vocab", a.vocab, "vocabulary file, one term per line")->needs(dw);
  auto* td = cmd->add_option("--text-dir", a.text_dir, "directory of plain-text documents");
  dw->excludes(td);
}

void add_hyper_options(CLI::App* cmd, HyperArgs& h) {
  cmd->add_option("--gamma", h.gamma, "nCRP concentration")->capture_default_str();
  cmd->add_option("--eta", h.eta, "per-level document Dirichlet parameter (comma list)")->delimiter(',');
  cmd->add_option("--alpha", h.alpha, "per-level level-mixture Dirichlet parameter (comma list)")
      ->delimiter(',');
  cmd->add_option("--levels", h.levels, "tree depth")->capture_default_str();
}

void add_export_options(CLI::App* cmd, ExportArgs& e) {
  cmd->add_option("--min-share", e.options.min_share, "share of a word's tokens needed to list it at a node")
      ->capture_default_str();
  cmd->add_option("--min-tokens", e.options.min_tokens, "tokens needed to list a word at a node")
      ->capture_default_str();
  cmd->add_option("--top-words", e.options.dot_top_words, "words per DOT label")->capture_default_str();
  cmd->add_option("--top-docs", e.options.top_docs, "documents listed per node in JSON")->capture_default_str();
  cmd->add_flag("--hide-root", e.hide_root, "omit the shared root from DOT output");
}

ExportOptions resolve(const ExportArgs& e) {
  ExportOptions o = e.options;
  if (e.hide_root) o.dot_first_level = 1;
  return o;
}

std::vector<double> per_level(std::vector<double> v, int levels, const char* name) {
  if (v.empty()) return std::vector<double>(levels, 1.0);
  if (v.size() == 1) return std::vector<double>(levels, v[0]);
  if (v.size() != static_cast<std::size_t>(levels))
    throw ValueError(std::string(name) + " lists " + std::to_string(v.size()) + " values for " +
                     std::to_string(levels) + " levels");
  return v;
}

Hyperparams resolve(const HyperArgs& h) {
  Hyperparams out;
  out.gamma = h.gamma;
  out.depth = h.levels;
  out.eta = per_level(h.eta, h.levels, "--eta");
  out.alpha = per_level(h.alpha, h.levels, "--alpha");
  return out;
}

LoadedCorpus load_corpus(const CorpusArgs& a) {
  if (!a.text_dir.empty()) return load_text_dir(a.text_dir);
  if (a.docword.empty()) throw ValueError("one of --docword or --text-dir is required");
  return load_uci_bow(a.docword, a.vocab);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

std::string checkpoint_name(std::uint64_t iteration) {
  return "checkpoint-" + std::to_string(iteration) + ".json";
}

struct ChainOutcome {
  std::uint64_t iteration = 0;
  double final_ll = 0.0;
  double best_ll = 0.0;
  std::uint64_t best_iteration = 0;
  double seconds = 0.0;
  std::string error;
};

// Runs sweeps on `state` and writes every artifact of one chain into `dir`.
ChainOutcome drive_chain(ModelState& state, const Vocabulary& vocab, const RunConfig& cfg,
                         const fs::path& dir, bool append_trace) {
  ChainOutcome outcome;
  ensure_dir(dir);
  const json config = cfg.to_json();
  const fs::path trace_path = dir / "ll_trace.csv";
  const bool write_header = !append_trace || !fs::exists(trace_path);
  std::ofstream trace(trace_path, append_trace ? std::ios::app : std::ios::trunc);
  if (!trace) throw IoError("cannot write " + trace_path.string());
  if (write_header) trace << "iteration,joint_ll,words_moved\n";
  trace << std::setprecision(17);

  auto hook = [&](const ModelState& s, const SweepStats& stats) {
    trace << s.iteration << ',' << stats.joint_ll << ',' << stats.words_moved << '\n';
    if (!trace) throw IoError("write failed: " + trace_path.string());
    if (cfg.checkpoint_every > 0 && s.iteration % cfg.checkpoint_every == 0)
      checkpoint_save(s, dir / checkpoint_name(s.iteration), vocab, config);
  };
  RunReport report = run(state, cfg.iterations, hook);
  trace.flush();
  if (!report.hook_error.empty()) {
    outcome.error = report.hook_error;
    return outcome;
  }

  checkpoint_save(state, dir / checkpoint_name(state.iteration), vocab, config);
  checkpoint_save(*report.best_state, dir / "checkpoint-maxll.json", vocab, config);

  const ModelState& chosen = cfg.snapshot == SnapshotRule::MaxLL ? *report.best_state : state;
  const auto options = cfg.export_options;
  json meta_config = config;
  const TreeExport tree = build_tree_export(chosen, vocab, options, meta_config);
  write_text(dir / "tree.json", to_json(tree).dump(2) + "\n");
  write_text(dir / "tree.dot", export_dot(tree, options));

  outcome.iteration = state.iteration;
  outcome.final_ll = report.ll_trace.back();
  outcome.best_ll = report.best_ll;
  outcome.best_iteration = report.best_iteration;
  outcome.seconds = report.wall_seconds;
  return outcome;
}

void report_chain(std::ostream& out, std::size_t chain, const fs::path& dir, const ChainOutcome& o) {
  out << "chain " << chain << ": " << o.iteration << " sweeps in " << std::fixed << std::setprecision(2)
      << o.seconds << "s, final LL " << std::setprecision(4) << o.final_ll << ", best LL " << o.best_ll
      << " at sweep " << o.best_iteration << " -> " << dir.string() << '\n';
  out.unsetf(std::ios::floatfield);
}

json truth_to_json(const SyntheticData& data) {
  json words = json::array();
  for (std::size_t w = 0; w < data.truth.paths.size(); ++w) {
    words.push_back({{"id", w},
                     {"term", data.vocab.terms[w]},
                     {"path", data.truth.paths[w]},
                     {"theta", data.truth.theta[w]},
                     {"token_docs", data.truth.token_docs[w]},
                     {"token_levels", data.truth.token_levels[w]}});
  }
  return {{"format", "hlwc-truth"}, {"version", 1}, {"depth", data.truth.depth}, {"words", std::move(words)}};
}

std::vector<Path> truth_paths(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
    if (doc.value("format", "") != "hlwc-truth") throw ValueError("not a truth file: " + path.string());
    std::vector<Path> out;
    for (const auto& w : doc.at("words")) out.push_back(w.at("path").get<Path>());
    return out;
  } catch (const json::exception& e) {
    throw ValueError("malformed truth file " + path.string() + ": " + e.what());
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hierarchical latent word clustering: nCRP trees of words grouped by document usage", "hlwc"};
  app.require_subcommand(1);
  app.set_config("--config", "", "INI/TOML file supplying any option; command-line flags win");

  // fit / resume
  RunConfig cfg;
  CorpusArgs corpus_args;
  HyperArgs hyper_args;
  ExportArgs export_args;
  std::string out_dir;
  std::string snapshot = "final";

  auto* fit = app.add_subcommand("fit", "run the sampler on a corpus");
  add_corpus_options(fit, corpus_args);
  add_hyper_options(fit, hyper_args);
  add_export_options(fit, export_args);
  fit->add_option("--iters", cfg.iterations, "Gibbs sweeps")->capture_default_str();
  fit->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
  fit->add_option("--skip-top", cfg.skip_top, "drop this many most frequent words")->capture_default_str();
  fit->add_option("--keep-next", cfg.keep_next, "then keep this many words (0 keeps all)")
      ->capture_default_str();
  fit->add_option("--checkpoint-every", cfg.checkpoint_every, "sweeps between checkpoints (0 = end only)")
      ->capture_default_str();
  fit->add_option("--snapshot", snapshot, "state exported as the result")
      ->check(CLI::IsMember({"final", "maxll"}))
      ->capture_default_str();
  fit->add_option("--chains", cfg.chains, "independent chains, run concurrently")->capture_default_str();
  fit->add_option("--out", out_dir, "output directory")->required();

  std::string resume_from;
  auto* resume = app.add_subcommand("resume", "continue sampling from a checkpoint");
  resume->add_option("--checkpoint", resume_from, "checkpoint to resume")->required()->check(CLI::ExistingFile);
  resume->add_option("--iters", cfg.iterations, "additional sweeps")->capture_default_str();
  resume->add_option("--checkpoint-every", cfg.checkpoint_every, "sweeps between checkpoints")
      ->capture_default_str();
  resume->add_option("--snapshot", snapshot, "state exported as the result")
      ->check(CLI::IsMember({"final", "maxll"}))
      ->capture_default_str();
  resume->add_option("--out", out_dir, "output directory")->required();
  add_export_options(resume, export_args);

  std::string export_ckpt;
  std::string json_path;
  std::string dot_path;
  auto* exp = app.add_subcommand("export", "write tree.json / tree.dot from a checkpoint");
  exp->add_option("--checkpoint", export_ckpt, "checkpoint file")->required()->check(CLI::ExistingFile);
  exp->add_option("--json", json_path, "JSON output path");
  exp->add_option("--dot", dot_path, "DOT output path");
  add_export_options(exp, export_args);

  std::size_t synth_docs = 60;
  std::size_t synth_vocab = 90;
  std::size_t synth_tokens = 50;
  auto* synth = app.add_subcommand("synth", "sample a corpus from the generative model");
  synth->add_option("--docs", synth_docs, "documents")->capture_default_str();
  synth->add_option("--vocab-size", synth_vocab, "words")->capture_default_str();
  synth->add_option("--tokens-per-word", synth_tokens, "tokens per word")->capture_default_str();
  synth->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
  std::vector<std::size_t> synth_fan_out;
  synth->add_option("--fan-out", synth_fan_out,
                    "plant a balanced tree with these children per level, e.g. 3,3 (default: draw from the nCRP)")
      ->delimiter(',');
  synth->add_option("--out", out_dir, "output directory")->required();
  add_hyper_options(synth, hyper_args);

  std::string eval_ckpt;
  std::string truth_path;
  int eval_level = -1;
  auto* eval = app.add_subcommand("eval", "adjusted Rand index of a checkpoint against planted paths");
  eval->add_option("--checkpoint", eval_ckpt, "checkpoint file")->required()->check(CLI::ExistingFile);
  eval->add_option("--truth", truth_path, "truth.json from synth")->required()->check(CLI::ExistingFile);
  eval->add_option("--level", eval_level, "tree level compared (-1 = leaf)")->capture_default_str();

  auto* stats = app.add_subcommand("stats", "summarize a corpus");
  add_corpus_options(stats, corpus_args);
  stats->add_option("--skip-top", cfg.skip_top, "drop this many most frequent words");
  stats->add_option("--keep-next", cfg.keep_next, "then keep this many words");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    cfg.snapshot = parse_snapshot_rule(snapshot);
    cfg.export_options = resolve(export_args);

    if (*fit) {
      cfg.hyper = resolve(hyper_args);
      cfg.validate();
      LoadedCorpus loaded = load_corpus(corpus_args);
      if (cfg.keep_next > 0) {
        auto filtered = filter_vocabulary(loaded.corpus, loaded.vocab, cfg.skip_top, cfg.keep_next);
        if (filtered.shortfall > 0)
          err << "warning: only " << filtered.vocab.size() << " words available after skipping "
              << cfg.skip_top << " (" << filtered.shortfall << " short)\n";
        loaded.corpus = std::move(filtered.corpus);
        loaded.vocab = std::move(filtered.vocab);
      }
      const WordView view(loaded.corpus);
      cfg.hyper.n_docs = loaded.corpus.n_docs();

      const fs::path root(out_dir);
      std::vector<ChainOutcome> outcomes(cfg.chains);
      std::vector<std::string> failures(cfg.chains);
      auto chain_dir = [&](unsigned k) { return cfg.chains == 1 ? root : root / ("chain-" + std::to_string(k)); };
      auto work = [&](unsigned k) {
        try {
          ModelState state = init_state(view, cfg.hyper, Rng::chain_seed(cfg.seed, k));
          outcomes[k] = drive_chain(state, loaded.vocab, cfg, chain_dir(k), false);
        } catch (const std::exception& e) {
          failures[k] = e.what();
        }
      };
      if (cfg.chains == 1) {
        work(0);
      } else {
        std::vector<std::jthread> threads;
        for (unsigned k = 0; k < cfg.chains; ++k) threads.emplace_back(work, k);
      }
      int rc = 0;
      for (unsigned k = 0; k < cfg.chains; ++k) {
        const std::string& problem = failures[k].empty() ? outcomes[k].error : failures[k];
        if (!problem.empty()) {
          err << "error: chain " << k << ": " << problem << '\n';
          rc = 1;
        } else {
          report_chain(out, k, chain_dir(k), outcomes[k]);
        }
      }
      return rc;
    }

    if (*resume) {
      Checkpoint cp = checkpoint_load(resume_from);
      // Resumed runs keep the sampler settings they were started with.
      cfg.hyper = cp.state.hyper;
      if (cp.config.is_object()) {
        cfg.seed = cp.config.value("seed", cfg.seed);
        cfg.skip_top = cp.config.value("skip_top", cfg.skip_top);
        cfg.keep_next = cp.config.value("keep_next", cfg.keep_next);
      }
      cfg.validate();
      const fs::path dir(out_dir);
      fs::path from_dir = fs::path(resume_from).parent_path();
      if (from_dir.empty()) from_dir = ".";
      const bool same_dir = fs::exists(dir) && fs::equivalent(dir, from_dir);
      ChainOutcome o = drive_chain(cp.state, cp.vocab, cfg, dir, same_dir);
      if (!o.error.empty()) throw IoError(o.error);
      report_chain(out, 0, dir, o);
      return 0;
    }

    if (*exp) {
      if (json_path.empty() && dot_path.empty()) throw ValueError("nothing to do: pass --json and/or --dot");
      Checkpoint cp = checkpoint_load(export_ckpt);
      const TreeExport tree = build_tree_export(cp.state, cp.vocab, cfg.export_options, cp.config);
      if (!json_path.empty()) write_text(json_path, to_json(tree).dump(2) + "\n");
      if (!dot_path.empty()) write_text(dot_path, export_dot(tree, cfg.export_options));
      out << "exported " << tree.nodes.size() << " nodes\n";
      return 0;
    }

    if (*synth) {
      Hyperparams h = resolve(hyper_args);
      SyntheticData data = synth_fan_out.empty()
                               ? generate_synthetic(synth_docs, synth_vocab, synth_tokens, h, cfg.seed)
                               : generate_planted(synth_docs, synth_fan_out, synth_vocab, synth_tokens, h, cfg.seed);
      const fs::path dir(out_dir);
      ensure_dir(dir);
      write_uci_bow(data.corpus, data.vocab, dir / "docword.txt", dir / "vocab.txt");
      write_text(dir / "truth.json", truth_to_json(data).dump() + "\n");
      out << "wrote " << data.corpus.n_docs() << " documents, " << data.corpus.n_words() << " words, "
          << data.corpus.total_tokens() << " tokens to " << dir.string() << '\n';
      return 0;
    }

    if (*eval) {
      Checkpoint cp = checkpoint_load(eval_ckpt);
      const auto truth = truth_paths(truth_path);
      if (truth.size() != cp.state.words.size())
        throw ValueError("truth covers " + std::to_string(truth.size()) + " words, checkpoint has " +
                         std::to_string(cp.state.words.size()));
      const auto predicted = cluster_labels(cp.state, eval_level);
      const auto planted = cluster_labels(truth, cp.state.active, eval_level);
      out << "ari " << std::setprecision(6) << adjusted_rand_index(predicted, planted) << '\n';
      return 0;
    }

    if (*stats) {
      LoadedCorpus loaded = load_corpus(corpus_args);
      if (cfg.keep_next > 0) {
        auto filtered = filter_vocabulary(loaded.corpus, loaded.vocab, cfg.skip_top, cfg.keep_next);
        loaded.corpus = std::move(filtered.corpus);
        loaded.vocab = std::move(filtered.vocab);
      }
      const WordView view(loaded.corpus);
      out << "documents " << loaded.corpus.n_docs() << '\n'
          << "words " << loaded.corpus.n_words() << '\n'
          << "active_words " << view.active_words().size() << '\n'
          << "nonzeros " << loaded.corpus.nnz() << '\n'
          << "tokens " << loaded.corpus.total_tokens() << '\n';
      const auto freq = loaded.corpus.word_frequencies();
      std::vector<WordId> order(freq.size());
      for (WordId w = 0; w < order.size(); ++w) order[w] = w;
      std::stable_sort(order.begin(), order.end(), [&](WordId a, WordId b) { return freq[a] > freq[b]; });
      out << "top";
      for (std::size_t i = 0; i < std::min<std::size_t>(10, order.size()); ++i)
        out << ' ' << loaded.vocab.term(order[i]) << ':' << freq[order[i]];
      out << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace hlwc
