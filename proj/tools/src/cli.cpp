#include "ljp_cli/cli.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ljp/checkpoint.hpp"
#include "ljp/corpus.hpp"
#include "ljp/error.hpp"
#include "ljp/model_check.hpp"
#include "ljp/run_config.hpp"
#include "ljp/synthetic.hpp"
#include "ljp/training.hpp"

namespace ljp::cli {
namespace {

namespace fs = std::filesystem;

struct StageError : std::runtime_error {
  StageError(std::string stage, const std::string& what)
      : std::runtime_error(what), stage(std::move(stage)) {}
  std::string stage;
};

template <class F>
auto in_stage(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> variant;
  std::optional<std::string> out;
  std::optional<std::size_t> repeats;
};

RunConfig load_config(const std::string& path, const Overrides& o) {
  return in_stage("config", [&] {
    RunConfig cfg = load_run_config(path);
    if (o.seed) cfg.train.seed = *o.seed;
    if (o.variant) cfg.model.variant = parse_variant(*o.variant);
    if (o.out) cfg.out_dir = *o.out;
    if (o.repeats) cfg.repeats = *o.repeats;
    cfg.validate();
    return cfg;
  });
}

std::vector<IndexedCase> load_cases(const fs::path& path, const Vocabulary& vocab, const RunConfig& cfg) {
  return in_stage("data", [&] {
    return encode_records(load_jsonl(path), vocab, cfg.model.graph(), cfg.encode_options());
  });
}

std::string epoch_header(const TaskGraph& graph, bool with_validation) {
  std::string h = "epoch\ttrain_loss";
  if (with_validation) {
    for (const auto& t : graph.tasks()) h += "\tvalid_" + t.id + "_accuracy\tvalid_" + t.id + "_macro_f1";
  }
  return h + "\n";
}

std::string epoch_row(const EpochRecord& e) {
  std::string row = std::to_string(e.epoch) + "\t" + fmt(e.train_loss);
  if (e.validation) {
    for (const auto& t : e.validation->tasks) row += "\t" + fmt(t.accuracy) + "\t" + fmt(t.macro_f1);
  }
  return row + "\n";
}

// ---- gen-corpus ---------------------------------------------------------

int gen_corpus(const std::string& config, const Overrides& o, std::ostream& out) {
  CorpusSpec spec = in_stage("config", [&] {
    CorpusSpec s = config.empty() ? CorpusSpec{} : load_corpus_spec(config);
    if (o.seed) s.seed = *o.seed;
    s.validate();
    return s;
  });
  const fs::path dir = o.out.value_or("corpus");
  SyntheticCorpus corpus = in_stage("generate", [&] { return generate_corpus(spec); });
  in_stage("write", [&] {
    fs::create_directories(dir);
    std::string pairs = "split\tfirst\tsecond\n";
    const std::pair<const char*, const SyntheticSplit*> splits[] = {
        {"train", &corpus.train}, {"valid", &corpus.valid}, {"test", &corpus.test}};
    for (const auto& [name, split] : splits) {
      save_jsonl(split->records, dir / (std::string(name) + ".jsonl"));
      for (const auto& [a, b] : split->contrast_pairs) {
        pairs += std::string(name) + "\t" + std::to_string(a) + "\t" + std::to_string(b) + "\n";
      }
      out << name << ": " << split->records.size() << " cases, " << split->contrast_pairs.size()
          << " contrast pairs\n";
    }
    write_text(dir / "contrast_pairs.tsv", pairs);
  });
  out << "wrote " << dir.string() << "\n";
  return kOk;
}

// ---- train --------------------------------------------------------------

int train_cmd(const std::string& config, const Overrides& o, std::ostream& out) {
  const RunConfig base = load_config(config, o);
  if (base.train_data.empty()) throw StageError("config", "train_data is not set");
  const auto train_records = in_stage("data", [&] { return load_jsonl(base.train_data); });
  const Vocabulary vocab = in_stage("vocab", [&] { return Vocabulary::build(train_records, base.vocab_threshold); });
  const TaskGraph graph = base.model.graph();
  const auto train_set = in_stage("data", [&] {
    return encode_records(train_records, vocab, graph, base.encode_options());
  });
  std::optional<std::vector<IndexedCase>> valid, test;
  if (!base.valid_data.empty()) valid = load_cases(base.valid_data, vocab, base);
  if (!base.test_data.empty()) test = load_cases(base.test_data, vocab, base);

  std::vector<EvalReport> finals;
  for (std::size_t k = 0; k < base.repeats; ++k) {
    RunConfig run = base;
    run.train.seed = base.train.seed + k;
    const fs::path dir = base.repeats == 1 ? base.out_dir : base.out_dir / ("run-" + std::to_string(k));
    Model model = in_stage("model", [&] { return Model(run.model, vocab.size(), run.train.seed); });
    std::string epochs = epoch_header(graph, valid.has_value());
    in_stage("train", [&] {
      train(model, train_set, valid ? &*valid : nullptr, run.train, [&](const EpochRecord& e) {
        epochs += epoch_row(e);
        out << "run " << k << " epoch " << e.epoch << " loss " << fmt(e.train_loss) << "\n";
      });
    });
    in_stage("write", [&] {
      write_text(dir / "epochs.tsv", epochs);
      fs::create_directories(dir);
      save_checkpoint(dir / "model.ckpt", run, vocab, model);
    });
    const auto* held_out = test ? &*test : (valid ? &*valid : nullptr);
    if (held_out) {
      EvalReport report = in_stage("eval", [&] { return evaluate(model, *held_out); });
      in_stage("write", [&] { write_text(dir / "metrics.tsv", format_report_tsv(report)); });
      out << format_report_table(report);
      finals.push_back(std::move(report));
    }
  }

  if (base.repeats > 1 && !finals.empty()) {
    std::string summary = "run\tseed\ttask\taccuracy\tmacro_precision\tmacro_recall\tmacro_f1\n";
    const std::size_t tasks = finals.front().tasks.size();
    std::vector<std::array<double, 4>> mean(tasks, {0, 0, 0, 0});
    for (std::size_t k = 0; k < finals.size(); ++k) {
      for (std::size_t t = 0; t < tasks; ++t) {
        const auto& m = finals[k].tasks[t];
        summary += std::to_string(k) + "\t" + std::to_string(base.train.seed + k) + "\t" + m.task + "\t" +
                   fmt(m.accuracy) + "\t" + fmt(m.macro_precision) + "\t" + fmt(m.macro_recall) + "\t" +
                   fmt(m.macro_f1) + "\n";
        mean[t][0] += m.accuracy / static_cast<double>(finals.size());
        mean[t][1] += m.macro_precision / static_cast<double>(finals.size());
        mean[t][2] += m.macro_recall / static_cast<double>(finals.size());
        mean[t][3] += m.macro_f1 / static_cast<double>(finals.size());
      }
    }
    for (std::size_t t = 0; t < tasks; ++t) {
      summary += "mean\t-\t" + finals.front().tasks[t].task + "\t" + fmt(mean[t][0]) + "\t" +
                 fmt(mean[t][1]) + "\t" + fmt(mean[t][2]) + "\t" + fmt(mean[t][3]) + "\n";
    }
    in_stage("write", [&] { write_text(base.out_dir / "summary.tsv", summary); });
  }
  out << "wrote " << base.out_dir.string() << "\n";
  return kOk;
}

// ---- eval / predict -----------------------------------------------------

int eval_cmd(const std::string& checkpoint, const std::string& data, const Overrides& o, std::ostream& out) {
  Checkpoint ck = in_stage("checkpoint", [&] { return load_checkpoint(checkpoint); });
  const auto cases = load_cases(data, ck.vocab, ck.config);
  EvalReport report = in_stage("eval", [&] { return evaluate(ck.model, cases); });
  out << format_report_table(report);
  if (o.out) in_stage("write", [&] { write_text(*o.out, format_report_tsv(report)); });
  return kOk;
}

int predict_cmd(const std::string& checkpoint, const std::string& data, const Overrides& o,
                std::ostream& out) {
  Checkpoint ck = in_stage("checkpoint", [&] { return load_checkpoint(checkpoint); });
  const auto cases = load_cases(data, ck.vocab, ck.config);
  const TaskGraph& graph = ck.model.graph();
  std::ostringstream lines;
  in_stage("predict", [&] {
    for (std::size_t i = 0; i < cases.size(); ++i) {
      Prediction p = predict(ck.model, cases[i]);
      nlohmann::ordered_json j;
      j["case"] = i;
      for (std::size_t t = 0; t < graph.task_count(); ++t) {
        const std::string& id = graph.task(t).id;
        j["predicted"][id] = p.output.predicted[t];
        j["distributions"][id] = p.output.y_hat[t].values();
      }
      j["attention"] = nlohmann::ordered_json::object();
      for (std::size_t t = 0; t < graph.task_count(); ++t) {
        if (p.attention[t]) j["attention"][graph.task(t).id] = p.attention[t]->values();
      }
      lines << j.dump() << "\n";
    }
  });
  if (o.out) {
    in_stage("write", [&] { write_text(*o.out, lines.str()); });
  } else {
    out << lines.str();
  }
  return kOk;
}

// ---- gradcheck ----------------------------------------------------------

int gradcheck_cmd(const std::string& config, const Overrides& o, std::ostream& out) {
  const RunConfig cfg = load_config(config, o);
  constexpr double kTolerance = 1e-4;
  std::string report = "seed\tparameter\tcoordinates\tworst_relative_error\tanalytic\tnumeric\tstatus\n";
  std::map<std::string, double> group_worst;
  std::vector<std::string> order;
  double worst = 0.0;
  in_stage("gradcheck", [&] {
    for (std::size_t k = 0; k < cfg.repeats; ++k) {
      const std::uint64_t seed = cfg.train.seed + k;
      GradCheckReport r = check_model_gradients(cfg.model, seed);
      for (const auto& t : r.tensors) {
        const double e = t.worst.relative_error;
        report += std::to_string(seed) + "\t" + t.name + "\t" + std::to_string(t.coordinates) + "\t" + fmt(e) +
                  "\t" + fmt(t.worst.analytic) + "\t" + fmt(t.worst.numeric) + "\t" +
                  (e < kTolerance ? "pass" : "FAIL") + "\n";
        if (!group_worst.count(t.name)) order.push_back(t.name);
        group_worst[t.name] = std::max(group_worst[t.name], e);
        worst = std::max(worst, e);
      }
    }
  });
  for (const auto& name : order) {
    char line[256];
    std::snprintf(line, sizeof line, "%-40s %.3e %s\n", name.c_str(), group_worst[name],
                  group_worst[name] < kTolerance ? "pass" : "FAIL");
    out << line;
  }
  const bool ok = worst < kTolerance;
  char verdict[128];
  std::snprintf(verdict, sizeof verdict, "%s: worst relative error %.3e over %zu seed(s), tolerance %.0e\n",
                ok ? "PASS" : "FAIL", worst, cfg.repeats, kTolerance);
  out << verdict;
  if (o.out) in_stage("write", [&] { write_text(*o.out, report); });
  return ok ? kOk : kFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-task legal judgment prediction (MPBFN-WCA)", "ljp"};
  app.require_subcommand(1);

  Overrides o;
  std::string config, checkpoint, data;
  auto add_common = [&](CLI::App* sub, bool with_repeats) {
    sub->add_option("--seed", o.seed, "Override the seed");
    sub->add_option("--out", o.out, "Output directory or file");
    if (with_repeats) {
      sub->add_option("--variant", o.variant, "mpfp | mpbfn | mpbfn-wca")
          ->check(CLI::IsMember({"mpfp", "mpbfn", "mpbfn-wca"}));
      sub->add_option("--repeats", o.repeats, "Number of runs; run k uses seed + k");
    }
  };

  auto* gen = app.add_subcommand("gen-corpus", "Write synthetic train/valid/test JSONL splits");
  gen->add_option("--config", config, "Corpus spec file (defaults when omitted)");
  add_common(gen, false);

  auto* tr = app.add_subcommand("train", "Train from a run config; writes checkpoint and metrics");
  tr->add_option("--config", config, "Run config file")->required();
  add_common(tr, true);

  auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint on a JSONL file");
  ev->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();
  ev->add_option("--data", data, "JSONL cases")->required();
  ev->add_option("--out", o.out, "Write the metrics TSV here");

  auto* pr = app.add_subcommand("predict", "Per-case predictions, distributions and attention");
  pr->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();
  pr->add_option("--data", data, "JSONL cases")->required();
  pr->add_option("--out", o.out, "Write JSONL here instead of stdout");

  auto* gc = app.add_subcommand("gradcheck", "Finite-difference check of the full model loss");
  gc->add_option("--config", config, "Run config file (model sizes)")->required();
  add_common(gc, true);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    if (!app.get_subcommands().empty()) {
      err << app.get_subcommands().front()->help();
    } else {
      err << app.help();
    }
    return kUsage;
  }

  try {
    if (*gen) return gen_corpus(config, o, out);
    if (*tr) return train_cmd(config, o, out);
    if (*ev) return eval_cmd(checkpoint, data, o, out);
    if (*pr) return predict_cmd(checkpoint, data, o, out);
    if (*gc) return gradcheck_cmd(config, o, out);
  } catch (const StageError& e) {
    err << "error [" << e.stage << "]: " << e.what() << "\n";
    return kError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  }
  return kUsage;
}

}  // namespace ljp::cli
