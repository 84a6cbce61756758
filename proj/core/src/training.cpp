#include "ljp/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ljp/error.hpp"
#include "ljp/init.hpp"
#include "ljp/ops.hpp"

namespace ljp {

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0)) throw ConfigError("learning_rate must be non-negative");
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must lie in [0, 1)");
}

Var multitask_loss(const JudgmentVars& outputs, std::span<const std::size_t> gold,
                   const TaskGraph& graph) {
  if (gold.size() != graph.task_count() || outputs.y_hat.size() != graph.task_count()) {
    throw LabelError("expected one gold label per task");
  }
  Var total;
  for (std::size_t k = 0; k < graph.task_count(); ++k) {
    if (gold[k] >= graph.classes(k)) {
      throw LabelError("gold class " + std::to_string(gold[k]) + " for task '" + graph.task(k).id +
                       "' with " + std::to_string(graph.classes(k)) + " classes");
    }
    Var term = neg_log_at(outputs.y_hat[k], gold[k], 1e-12);
    total = total.valid() ? add(total, term) : term;
  }
  return total;
}

Var dropout_fact(Var fact, double drop_probability, DropoutMode mode, std::mt19937_64& rng) {
  if (mode == DropoutMode::kEval || drop_probability <= 0.0) return fact;
  std::bernoulli_distribution keep(1.0 - drop_probability);
  const double survivor = 1.0 / (1.0 - drop_probability);
  std::vector<double> mask(fact.size());
  for (double& m : mask) m = keep(rng) ? survivor : 0.0;
  return mul(fact, fact.tape().constant(fact.shape(), std::move(mask)));
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               double learning_rate, const AdamHyper& hyper) {
  if (params.size() != grads.size()) {
    throw DimensionError("adam: " + std::to_string(params.size()) + " parameters but " +
                         std::to_string(grads.size()) + " gradients");
  }
  if (state.m.empty()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
  }
  if (state.m.size() != params.size()) throw DimensionError("adam state does not match parameters");
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(hyper.beta1, t);
  const double c2 = 1.0 - std::pow(hyper.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.m[i] = hyper.beta1 * state.m[i] + (1.0 - hyper.beta1) * g;
    state.v[i] = hyper.beta2 * state.v[i] + (1.0 - hyper.beta2) * g * g;
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    params[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + hyper.epsilon);
  }
}

void Adam::step(std::span<const NamedTensor> params) {
  for (const auto& p : params) {
    adam_step(p.tensor->data(), p.tensor->grad(), states_[p.name], learning_rate_, hyper_);
  }
}

std::vector<double> TrainResult::loss_trace() const {
  std::vector<double> out;
  for (const auto& e : epochs) out.push_back(e.train_loss);
  return out;
}

TrainResult train(Model& model, const std::vector<IndexedCase>& train_set,
                  const std::vector<IndexedCase>* validation_set, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
  config.validate();
  if (train_set.empty()) throw EmptyInputError("training set is empty");
  model.set_requires_grad(true);
  auto shuffle_rng = named_stream(config.seed, "train.shuffle");
  auto dropout_rng = named_stream(config.seed, "train.dropout");
  Adam optimizer(config.learning_rate);
  std::vector<NamedTensor> params = model.parameters();

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> losses(train_set.size(), 0.0);

  ForwardOptions options;
  options.train = true;
  options.dropout = config.dropout;
  options.rng = &dropout_rng;

  TrainResult result;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const double weight = 1.0 / static_cast<double>(end - start);
      model.zero_grad();
      for (std::size_t b = start; b < end; ++b) {
        const IndexedCase& c = train_set[order[b]];
        Tape tape;
        ForwardVars fv = model.forward(tape, c, options);
        Var loss = multitask_loss(fv.judgment, c.labels, model.graph());
        losses[order[b]] = loss.item();
        tape.backward(scale(loss, weight));
      }
      optimizer.step(params);
    }
    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = std::accumulate(losses.begin(), losses.end(), 0.0) /
                        static_cast<double>(losses.size());
    if (validation_set && !validation_set->empty()) record.validation = evaluate(model, *validation_set);
    if (on_epoch) on_epoch(record);
    result.epochs.push_back(std::move(record));
  }
  return result;
}

EvalReport evaluate(const Model& model, const std::vector<IndexedCase>& cases) {
  const TaskGraph& graph = model.graph();
  std::vector<Confusion> confusion;
  for (std::size_t k = 0; k < graph.task_count(); ++k) {
    confusion.emplace_back(graph.classes(k), std::vector<std::size_t>(graph.classes(k), 0));
  }
  for (const auto& c : cases) {
    Prediction p = predict(model, c);
    for (std::size_t k = 0; k < graph.task_count(); ++k) {
      if (c.labels.at(k) >= graph.classes(k)) throw LabelError("gold label out of range");
      ++confusion[k][c.labels[k]][p.output.predicted[k]];
    }
  }
  EvalReport report;
  report.cases = cases.size();
  for (std::size_t k = 0; k < graph.task_count(); ++k) {
    report.tasks.push_back(metrics_from_confusion(graph.task(k).id, confusion[k]));
  }
  return report;
}

double mean_loss(const Model& model, const std::vector<IndexedCase>& cases) {
  if (cases.empty()) return 0.0;
  double total = 0.0;
  for (const auto& c : cases) {
    Tape tape(GradMode::kInference);
    ForwardVars fv = model.forward(tape, c);
    total += multitask_loss(fv.judgment, c.labels, model.graph()).item();
  }
  return total / static_cast<double>(cases.size());
}

}  // namespace ljp
