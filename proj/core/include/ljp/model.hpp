#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ljp/corpus.hpp"
#include "ljp/encoder.hpp"
#include "ljp/gradcheck.hpp"
#include "ljp/mpbfn.hpp"
#include "ljp/task_graph.hpp"
#include "ljp/wca.hpp"

namespace ljp {

/// Ablation ladder: forward prediction only, plus backward verification,
/// plus collocation attention.
enum class Variant { kMpfp, kMpbfn, kMpbfnWca };

std::string to_string(Variant v);
Variant parse_variant(const std::string& text);
constexpr bool bv_enabled(Variant v) { return v != Variant::kMpfp; }
constexpr bool wca_enabled(Variant v) { return v == Variant::kMpbfnWca; }

struct ModelConfig {
  EncoderConfig encoder;
  std::size_t d_s = 256;
  WcaConfig wca;
  std::vector<TaskSpec> tasks{{"law", 3}, {"charge", 6}, {"penalty", 11}};
  std::vector<std::pair<std::string, std::string>> edges{
      {"law", "charge"}, {"law", "penalty"}, {"charge", "penalty"}};
  Variant variant = Variant::kMpbfnWca;
  /// Divide y_hat by its sum before the loss; false applies the log to the raw product.
  bool renormalize_yhat = true;

  TaskGraph graph() const { return TaskGraph::from_ids(tasks, edges); }
  void validate() const;
};

struct ForwardOptions {
  bool train = false;
  double dropout = 0.0;
  std::mt19937_64* rng = nullptr;
  /// Runtime switches; may only disable what the variant allocated.
  std::optional<bool> bv_enabled;
  std::optional<bool> wca_enabled;
};

struct ForwardVars {
  Var fact;
  JudgmentVars judgment;
  std::vector<Var> attention;  // per task; valid for attended tasks with collocations
};

class Model {
 public:
  Model(ModelConfig config, std::size_t vocab_size, std::uint64_t seed);

  const ModelConfig& config() const noexcept { return config_; }
  const TaskGraph& graph() const noexcept { return graph_; }
  std::size_t vocab_size() const noexcept { return vocab_size_; }

  ForwardVars forward(Tape& tape, const IndexedCase& input, const ForwardOptions& options = {});
  ForwardVars forward(Tape& tape, const IndexedCase& input, const ForwardOptions& options = {}) const;

  /// Every learnable array, in a fixed order.
  std::vector<NamedTensor> parameters();
  std::vector<std::pair<std::string, const Tensor*>> parameters() const;
  Tensor* find_parameter(const std::string& name);
  std::size_t parameter_count() const;

  void set_requires_grad(bool on);
  void zero_grad();

 private:
  template <class Self>
  static ForwardVars forward_impl(Self& self, Tape& tape, const IndexedCase& input,
                                  const ForwardOptions& options);
  template <class Self, class Fn>
  static void visit(Self& self, Fn&& fn);

  ModelConfig config_;
  TaskGraph graph_;
  std::size_t vocab_size_;
  EncoderParams encoder_;
  MpbfnParams mpbfn_;
  std::optional<WcaParams> wca_;
};

struct Prediction {
  JudgmentOutput output;
  std::vector<std::optional<Tensor>> attention;  // per task
};

/// Inference-mode decode (no dropout, nothing recorded for backward).
Prediction predict(const Model& model, const IndexedCase& input);

}  // namespace ljp
