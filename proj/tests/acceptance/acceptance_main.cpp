// Acceptance harness: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ljp/checkpoint.hpp"
#include "ljp/init.hpp"
#include "ljp/model_check.hpp"
#include "ljp/ops.hpp"
#include "ljp/run_config.hpp"
#include "ljp/synthetic.hpp"
#include "ljp/training.hpp"

namespace {

using namespace ljp;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

RunConfig config_file(const std::string& name) {
  return load_run_config(std::string(LJP_CONFIG_DIR) + "/" + name);
}

double sum_of(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s;
}

struct Encoded {
  Vocabulary vocab;
  std::vector<IndexedCase> train;
  std::vector<IndexedCase> test;
};

Encoded encode(const SyntheticSplit& train, const SyntheticSplit* test, const RunConfig& cfg) {
  Encoded out{Vocabulary::build(train.records, cfg.vocab_threshold), {}, {}};
  const TaskGraph graph = cfg.model.graph();
  out.train = encode_records(train.records, out.vocab, graph, cfg.encode_options());
  if (test) out.test = encode_records(test->records, out.vocab, graph, cfg.encode_options());
  return out;
}

// ---------------------------------------------------------------------------

Verdict gradient_fidelity() {
  const RunConfig toy = config_file("toy.cfg");
  constexpr double kTolerance = 1e-4;
  const auto start = Clock::now();
  double worst = 0.0;
  std::string worst_name;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    GradCheckReport r = check_model_gradients(toy.model, seed);
    for (const auto& t : r.tensors) {
      if (t.worst.relative_error > worst) {
        worst = t.worst.relative_error;
        worst_name = t.name;
      }
    }
  }
  const double elapsed = seconds_since(start);

  ModelGradCheckOptions at_init;
  at_init.perturbation = 0.0;
  const double init_error = check_model_gradients(toy.model, 1, at_init).max_relative_error();
  std::printf("  info: same check at the unperturbed initialization, seed 1: worst %.3e\n", init_error);

  return {worst < kTolerance && elapsed < 120.0,
          format("worst relative error %.3e (%s) over 5 seeds, tolerance %.0e, %.1f s (limit 120 s)",
                 worst, worst_name.c_str(), kTolerance, elapsed)};
}

Verdict distribution_invariants() {
  const RunConfig toy = config_file("toy.cfg");
  const std::size_t vocab = 14;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> shift(-1.0, 1.0);
  double worst_sum = 0.0;
  std::size_t bad_gates = 0, bad_ver = 0, calls = 0, attention_rows = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    Model model(toy.model, vocab, seed);
    for (auto& p : model.parameters()) {
      for (double& v : p.tensor->data()) v += shift(rng);
    }
    for (int k = 0; k < 10; ++k, ++calls) {
      IndexedCase c = random_case(toy.model, vocab, 1 + rng() % 6, rng() % 3, rng);
      Tape tape(GradMode::kInference);
      ForwardVars fv = model.forward(tape, c);
      const JudgmentVars& j = fv.judgment;
      for (const Var& p : j.pred) worst_sum = std::max(worst_sum, std::abs(sum_of(p.value()) - 1.0));
      for (const Var& r : j.res) worst_sum = std::max(worst_sum, std::abs(sum_of(r.value()) - 1.0));
      for (const Var& y : j.y_hat) worst_sum = std::max(worst_sum, std::abs(sum_of(y.value()) - 1.0));
      for (const Var& g : j.gate) {
        for (double v : g.value()) bad_gates += !(v > 0.0 && v < 1.0);
      }
      for (const Var& a : fv.attention) {
        if (!a.valid()) continue;
        ++attention_rows;
        worst_sum = std::max(worst_sum, std::abs(sum_of(a.value()) - 1.0));
      }
      const std::size_t last = model.graph().index_of("penalty");
      for (double v : j.ver[last].value()) bad_ver += v != 1.0;
    }
  }
  return {worst_sum <= 1e-6 && bad_gates == 0 && bad_ver == 0 && attention_rows == 2 * calls,
          format("%zu decodes: worst |sum-1| %.2e (tol 1e-6), gates outside (0,1): %zu, "
                 "attention rows %zu, non-unit penalty ver entries: %zu",
                 calls, worst_sum, bad_gates, attention_rows, bad_ver)};
}

Verdict oracle_equivalence() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  double worst = 0.0;
  constexpr int kDraws = 10000;
  for (int draw = 0; draw < kDraws; ++draw) {
    const std::size_t t = 1 + rng() % 6;
    const std::size_t m = 1 + rng() % 4;
    const bool probabilities = draw % 2 == 0;
    std::vector<std::vector<double>> raw(m, std::vector<double>(t));
    for (auto& row : raw) {
      double s = 0.0;
      for (double& v : row) s += (v = u(rng));
      if (probabilities) {
        for (double& v : row) v /= s;
      }
    }
    Tape tape(GradMode::kInference);
    std::vector<Var> vars;
    for (const auto& row : raw) vars.push_back(tape.constant(Shape{t}, row));
    Var fused = probabilities ? comprehensive_fp(vars) : comprehensive_bv(tape, vars, t);

    std::vector<double> expected(t);
    double z = 0.0;
    for (std::size_t k = 0; k < t; ++k) {
      double prod = 1.0;
      for (std::size_t j = 0; j < m; ++j) prod *= raw[j][k];
      expected[k] = prod;
      z += prod;
    }
    for (std::size_t k = 0; k < t; ++k) {
      worst = std::max(worst, std::abs(fused.value()[k] - expected[k] / z));
    }
  }
  return {worst <= 1e-12,
          format("%d draws (t <= 6, FP and BV fusion): worst abs deviation %.2e (tol 1e-12)", kDraws, worst)};
}

Verdict ablation_identity() {
  const RunConfig toy = config_file("toy.cfg");
  const std::size_t vocab = 14;
  std::mt19937_64 rng(5);
  std::size_t mismatches = 0, cases = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    ModelConfig cfg = toy.model;
    cfg.variant = Variant::kMpfp;
    Model fp(cfg, vocab, seed);
    cfg.variant = Variant::kMpbfn;
    Model bv(cfg, vocab, seed);
    cfg.variant = Variant::kMpbfnWca;
    Model wca(cfg, vocab, seed);
    for (int k = 0; k < 20; ++k, ++cases) {
      IndexedCase c = random_case(cfg, vocab, 4, 2, rng);
      auto run = [&](Model& m, ForwardOptions o) {
        Tape tape(GradMode::kInference);
        return JudgmentOutput::from(m.forward(tape, c, o).judgment).y_hat;
      };
      ForwardOptions no_bv, no_wca;
      no_bv.bv_enabled = false;
      no_wca.wca_enabled = false;
      mismatches += run(bv, no_bv) != run(fp, {});
      mismatches += run(wca, no_wca) != run(bv, {});
    }
  }
  return {mismatches == 0,
          format("%zu cases x 2 identities (bv off == mpfp, wca off == mpbfn): %zu bitwise mismatches",
                 cases, mismatches)};
}

Verdict overfit_smoke() {
  RunConfig cfg = config_file("desk.cfg");
  cfg.train.dropout = 0.0;
  cfg.train.batch_size = 16;
  cfg.train.learning_rate = 0.01;
  cfg.train.epochs = 200;
  CorpusSpec spec;
  std::mt19937_64 rng = named_stream(spec.seed, "acceptance.overfit");
  SyntheticSplit split = generate_split(spec, 64, spec.train_contrast_fraction, rng);
  Encoded data = encode(split, nullptr, cfg);
  Model model(cfg.model, data.vocab.size(), cfg.train.seed);

  const auto start = Clock::now();
  std::size_t reached_at = 0;
  double loss_at = 0.0, first_epoch_time = 0.0;
  EvalReport report;
  TrainResult result = train(model, data.train, nullptr, cfg.train, [&](const EpochRecord& e) {
    if (e.epoch == 1) first_epoch_time = seconds_since(start);
    if (reached_at) return;
    const double loss = mean_loss(model, data.train);
    EvalReport r = evaluate(model, data.train);
    bool all_correct = true;
    for (const auto& t : r.tasks) all_correct &= t.accuracy == 1.0;
    if (loss < 0.05 && all_correct) {
      reached_at = e.epoch;
      loss_at = loss;
      report = std::move(r);
    }
  });
  const double elapsed = seconds_since(start);
  const auto trace = result.loss_trace();
  bool decreasing = true;
  for (std::size_t e = 1; e < 10; ++e) decreasing &= trace[e] < trace[e - 1];
  if (!reached_at) {
    report = evaluate(model, data.train);
    loss_at = mean_loss(model, data.train);
  }
  return {reached_at > 0 && elapsed < 300.0 && decreasing,
          format("64 cases: mean loss %.4f with train accuracy law/charge/penalty %.3f/%.3f/%.3f %s epoch %zu "
                 "(limit 200); 200 epochs took %.1f s (limit 300 s, first epoch %.2f s); first 10 epochs "
                 "strictly decreasing: %s",
                 loss_at, report.tasks[0].accuracy, report.tasks[1].accuracy, report.tasks[2].accuracy,
                 reached_at ? "reached at" : "not reached by", reached_at ? reached_at : std::size_t{200},
                 elapsed, first_epoch_time, decreasing ? "yes" : "no")};
}

Verdict wca_margin() {
  const RunConfig desk = config_file("desk.cfg");
  CorpusSpec spec;
  SyntheticCorpus corpus = generate_corpus(spec);
  Encoded data = encode(corpus.train, &corpus.test, desk);
  const std::size_t penalty = desk.model.graph().index_of("penalty");

  double margin_sum = 0.0;
  std::string rows;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    double acc[2];
    for (int k = 0; k < 2; ++k) {
      RunConfig run = desk;
      run.model.variant = k == 0 ? Variant::kMpbfn : Variant::kMpbfnWca;
      run.train.seed = seed;
      Model model(run.model, data.vocab.size(), seed);
      train(model, data.train, nullptr, run.train);
      acc[k] = evaluate(model, data.test).tasks[penalty].accuracy;
    }
    margin_sum += acc[1] - acc[0];
    rows += format(" seed %llu: %.3f -> %.3f;", static_cast<unsigned long long>(seed), acc[0], acc[1]);
  }
  const double margin = 100.0 * margin_sum / 3.0;
  const char* level = margin >= 5.0 ? "target met" : (margin >= 2.0 ? "floor met, target missed" : "below floor");
  std::printf("  info: penalty test accuracy mpbfn -> mpbfn-wca:%s\n", rows.c_str());
  return {margin >= 2.0,
          format("%zu train / %zu test (%zu contrast pairs): mean penalty accuracy margin %+.1f points "
                 "(target 5, floor 2): %s",
                 corpus.train.records.size(), corpus.test.records.size(), corpus.test.contrast_pairs.size(),
                 margin, level)};
}

Verdict metric_correctness() {
  EvalReport report;
  report.tasks.push_back(metrics_from_confusion("example", {{2, 0, 0}, {1, 1, 0}, {0, 0, 2}}));
  const TaskMetrics& m = report.tasks[0];
  const double da = std::abs(m.accuracy - 5.0 / 6.0);
  const double dp = std::abs(m.macro_precision - 8.0 / 9.0);
  const double dr = std::abs(m.macro_recall - 5.0 / 6.0);
  const double tol = 4 * std::numeric_limits<double>::epsilon();
  return {da <= tol && dp <= tol && dr <= tol,
          format("accuracy %.17g (5/6), macro-P %.17g (8/9), macro-R %.17g (5/6); max deviation %.1e",
                 m.accuracy, m.macro_precision, m.macro_recall, std::max({da, dp, dr}))};
}

Verdict determinism() {
  RunConfig cfg = config_file("desk.cfg");
  cfg.train.epochs = 3;
  CorpusSpec spec;
  std::mt19937_64 rng = named_stream(spec.seed, "acceptance.determinism");
  SyntheticSplit train_split = generate_split(spec, 96, 0.5, rng);
  SyntheticSplit test_split = generate_split(spec, 48, 0.5, rng);
  Encoded data = encode(train_split, &test_split, cfg);

  Model a(cfg.model, data.vocab.size(), cfg.train.seed);
  Model b(cfg.model, data.vocab.size(), cfg.train.seed);
  const auto ta = train(a, data.train, nullptr, cfg.train).loss_trace();
  const auto tb = train(b, data.train, nullptr, cfg.train).loss_trace();
  const bool same_trace = ta == tb;

  std::stringstream file;
  write_checkpoint(file, cfg, data.vocab, a);
  Checkpoint loaded = read_checkpoint(file);
  const bool same_metrics = evaluate(loaded.model, data.test) == evaluate(a, data.test);
  bool same_outputs = true;
  for (const auto& c : data.test) {
    same_outputs &= predict(loaded.model, c).output.y_hat == predict(a, c).output.y_hat;
  }
  return {same_trace && same_metrics && same_outputs,
          format("loss traces bit-identical: %s; checkpoint round trip metrics bit-identical: %s, "
                 "y_hat bit-identical on %zu cases: %s",
                 same_trace ? "yes" : "no", same_metrics ? "yes" : "no", data.test.size(),
                 same_outputs ? "yes" : "no")};
}

struct Criterion {
  const char* id;
  const char* title;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<std::string> only;
  app.add_option("--only", only, "Run just these criteria (AC1 ... AC8)");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria{
      {"AC1", "gradient fidelity", gradient_fidelity},
      {"AC2", "distribution invariants", distribution_invariants},
      {"AC3", "fusion oracle equivalence", oracle_equivalence},
      {"AC4", "ablation identity", ablation_identity},
      {"AC5", "overfit smoke", overfit_smoke},
      {"AC6", "directional WCA gain", wca_margin},
      {"AC7", "metric correctness", metric_correctness},
      {"AC8", "determinism and persistence", determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %s [%s]: %s\n", v.pass ? "PASS" : "FAIL", c.id, c.title, v.detail.c_str());
    std::fflush(stdout);
    failures += !v.pass;
  }
  return failures == 0 ? 0 : 1;
}
