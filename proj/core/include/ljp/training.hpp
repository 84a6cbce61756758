#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ljp/corpus.hpp"
#include "ljp/metrics.hpp"
#include "ljp/model.hpp"
#include "ljp/mpbfn.hpp"

namespace ljp {

/// Optimisation settings; the defaults are the full-scale setup.
struct TrainConfig {
  double learning_rate = 0.001;
  std::size_t batch_size = 128;
  std::size_t epochs = 16;
  /// Drop probability applied to fact_ori.
  double dropout = 0.5;
  std::uint64_t seed = 1;

  void validate() const;
};

/// sum over tasks of -log(y_hat[gold] + 1e-12).
Var multitask_loss(const JudgmentVars& outputs, std::span<const std::size_t> gold,
                   const TaskGraph& graph);

enum class DropoutMode { kTrain, kEval };
/// Inverted dropout in train mode; identity in eval mode.
Var dropout_fact(Var fact, double drop_probability, DropoutMode mode, std::mt19937_64& rng);

struct AdamHyper {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step = 0;
};

/// One bias-corrected Adam update of `params` in place.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               double learning_rate, const AdamHyper& hyper = {});

/// Adam over a model's named parameters, reading each tensor's grad buffer.
class Adam {
 public:
  explicit Adam(double learning_rate, AdamHyper hyper = {})
      : learning_rate_(learning_rate), hyper_(hyper) {}
  void step(std::span<const NamedTensor> params);

 private:
  double learning_rate_;
  AdamHyper hyper_;
  std::map<std::string, AdamState> states_;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  std::optional<EvalReport> validation;
};

struct TrainResult {
  std::vector<EpochRecord> epochs;
  std::vector<double> loss_trace() const;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Mini-batch Adam on the summed multi-task loss (mean over each batch).
/// Shuffling and dropout draw from streams derived from config.seed, so the
/// same seed and data give bit-identical traces.
TrainResult train(Model& model, const std::vector<IndexedCase>& train_set,
                  const std::vector<IndexedCase>* validation_set, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

/// Per-task argmax predictions against gold labels.
EvalReport evaluate(const Model& model, const std::vector<IndexedCase>& cases);

/// Mean multi-task loss over cases in inference mode.
double mean_loss(const Model& model, const std::vector<IndexedCase>& cases);

}  // namespace ljp
