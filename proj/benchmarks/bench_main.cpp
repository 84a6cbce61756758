#include <benchmark/benchmark.h>

#include <random>

#include "ljp/model_check.hpp"
#include "ljp/ops.hpp"
#include "ljp/training.hpp"

namespace {

using namespace ljp;

// Desk-scale shapes: d_w 16, d_c 32, 32-token documents, t = (3, 6, 11).
ModelConfig desk_config(Variant variant) {
  ModelConfig cfg;
  cfg.encoder.d_w = 16;
  cfg.encoder.d_c = 32;
  cfg.encoder.max_doc_len = 32;
  cfg.d_s = 16;
  cfg.wca.d_n = 8;
  cfg.wca.ln = 4;
  cfg.variant = variant;
  return cfg;
}

constexpr std::size_t kVocab = 64;

void BM_EncodeFact(benchmark::State& state) {
  ModelConfig cfg = desk_config(Variant::kMpfp);
  EncoderParams params = EncoderParams::init(cfg.encoder, kVocab, 1);
  std::mt19937_64 rng(1);
  IndexedCase c = random_case(cfg, kVocab, 6, 2, rng);
  for (auto _ : state) {
    Tape tape(GradMode::kInference);
    EncoderVars vars = bind_encoder(tape, std::as_const(params));
    benchmark::DoNotOptimize(encode_fact(c.token_ids, vars, cfg.encoder).value().data());
  }
}
BENCHMARK(BM_EncodeFact);

void BM_Predict(benchmark::State& state) {
  const auto variant = static_cast<Variant>(state.range(0));
  Model model(desk_config(variant), kVocab, 1);
  std::mt19937_64 rng(2);
  IndexedCase c = random_case(model.config(), kVocab, 6, 2, rng);
  for (auto _ : state) benchmark::DoNotOptimize(predict(model, c).output.predicted.data());
  state.SetLabel(to_string(variant));
}
BENCHMARK(BM_Predict)->DenseRange(0, 2);

void BM_ForwardBackward(benchmark::State& state) {
  const auto variant = static_cast<Variant>(state.range(0));
  Model model(desk_config(variant), kVocab, 1);
  model.set_requires_grad(true);
  std::mt19937_64 rng(3);
  IndexedCase c = random_case(model.config(), kVocab, 6, 2, rng);
  for (auto _ : state) {
    Tape tape;
    ForwardVars fv = model.forward(tape, c);
    tape.backward(multitask_loss(fv.judgment, c.labels, model.graph()));
  }
  state.SetLabel(to_string(variant));
}
BENCHMARK(BM_ForwardBackward)->DenseRange(0, 2);

void BM_AdamStep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> params(n, 0.5), grads(n, 0.01);
  AdamState s;
  for (auto _ : state) {
    adam_step(params, grads, s, 1e-3);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_AdamStep)->Range(1 << 10, 1 << 18);

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Tensor a(Shape{n, n}, 0.25), b(Shape{n, n}, 0.5);
  for (auto _ : state) {
    Tape tape(GradMode::kInference);
    benchmark::DoNotOptimize(matmul(tape.constant(a), tape.constant(b)).value().data());
  }
}
BENCHMARK(BM_Matmul)->RangeMultiplier(2)->Range(16, 128);

}  // namespace
BENCHMARK_MAIN();
