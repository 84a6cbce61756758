#include "ljp/model.hpp"

#include <numeric>

#include "ljp/error.hpp"
#include "ljp/training.hpp"

namespace ljp {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::kMpfp: return "mpfp";
    case Variant::kMpbfn: return "mpbfn";
    case Variant::kMpbfnWca: return "mpbfn-wca";
  }
  return "?";
}

Variant parse_variant(const std::string& text) {
  if (text == "mpfp") return Variant::kMpfp;
  if (text == "mpbfn") return Variant::kMpbfn;
  if (text == "mpbfn-wca") return Variant::kMpbfnWca;
  throw ConfigError("unknown variant '" + text + "' (expected mpfp, mpbfn or mpbfn-wca)");
}

void ModelConfig::validate() const {
  encoder.validate();
  if (d_s == 0) throw ConfigError("d_s must be positive");
  TaskGraph g = graph();
  if (wca_enabled(variant)) {
    wca.validate(encoder.d_c);
    if (!g.find(wca.target_task)) {
      throw ConfigError("wca target task '" + wca.target_task + "' is not in the task graph");
    }
  }
}

Model::Model(ModelConfig config, std::size_t vocab_size, std::uint64_t seed)
    : config_(std::move(config)), graph_(config_.graph()), vocab_size_(vocab_size) {
  config_.validate();
  if (vocab_size_ < 2) throw ConfigError("vocabulary must hold at least PAD and UNK");
  encoder_ = EncoderParams::init(config_.encoder, vocab_size_, seed);
  mpbfn_ = MpbfnParams::init(graph_, config_.encoder.d_c, config_.d_s, bv_enabled(config_.variant), seed);
  if (wca_enabled(config_.variant)) {
    wca_ = WcaParams::init(config_.wca, graph_, config_.encoder.d_w, config_.encoder.d_c, seed);
  }
  set_requires_grad(true);
}

template <class Self, class Fn>
void Model::visit(Self& self, Fn&& fn) {
  EncoderParams::visit(self.encoder_, self.config_.encoder, fn);
  MpbfnParams::visit(self.mpbfn_, self.graph_, fn);
  if (self.wca_) WcaParams::visit(*self.wca_, self.graph_, fn);
}

std::vector<NamedTensor> Model::parameters() {
  std::vector<NamedTensor> out;
  visit(*this, [&](const std::string& name, Tensor& t) { out.push_back({name, &t}); });
  return out;
}

std::vector<std::pair<std::string, const Tensor*>> Model::parameters() const {
  std::vector<std::pair<std::string, const Tensor*>> out;
  visit(*this, [&](const std::string& name, const Tensor& t) { out.emplace_back(name, &t); });
  return out;
}

Tensor* Model::find_parameter(const std::string& name) {
  for (auto& p : parameters()) {
    if (p.name == name) return p.tensor;
  }
  return nullptr;
}

std::size_t Model::parameter_count() const {
  std::size_t total = 0;
  for (const auto& [_, t] : parameters()) total += t->size();
  return total;
}

void Model::set_requires_grad(bool on) {
  for (auto& p : parameters()) p.tensor->set_requires_grad(on);
}

void Model::zero_grad() {
  for (auto& p : parameters()) p.tensor->zero_grad();
}

template <class Self>
ForwardVars Model::forward_impl(Self& self, Tape& tape, const IndexedCase& input,
                                const ForwardOptions& options) {
  const bool bv = options.bv_enabled.value_or(bv_enabled(self.config_.variant));
  const bool wca = options.wca_enabled.value_or(wca_enabled(self.config_.variant));
  if (bv && !bv_enabled(self.config_.variant)) {
    throw ConfigError("variant " + to_string(self.config_.variant) + " has no verification heads");
  }
  if (wca && !self.wca_) {
    throw ConfigError("variant " + to_string(self.config_.variant) + " has no collocation attention");
  }

  EncoderVars enc = bind_encoder(tape, self.encoder_);
  MpbfnVars dec = bind_mpbfn(tape, self.mpbfn_);

  ForwardVars out;
  Var fact = encode_fact(input.token_ids, enc, self.config_.encoder);
  if (options.train && options.dropout > 0.0) {
    if (!options.rng) throw Error("training forward with dropout needs an rng");
    fact = dropout_fact(fact, options.dropout, DropoutMode::kTrain, *options.rng);
  }
  out.fact = fact;
  out.attention.resize(self.graph_.task_count());

  DecodeOptions decode{bv, self.config_.renormalize_yhat};
  if (!wca) {
    out.judgment = decode_case(fact, self.graph_, dec, decode);
    return out;
  }

  WcaVars wv = bind_wca(tape, *self.wca_);
  const std::size_t target = self.graph_.index_of(self.config_.wca.target_task);
  const std::size_t d_c = self.config_.encoder.d_c;
  std::vector<Var> collocations =
      encode_case_collocations(input, enc.word_embedding, wv, self.config_.wca.ln);
  FactOverride hook = [&](std::size_t from, std::size_t to, Var sem, Var task_fact) -> std::optional<Var> {
    if (to != target) return std::nullopt;
    for (std::size_t k = 0; k < wv.attended_tasks.size(); ++k) {
      if (wv.attended_tasks[k] != from) continue;
      CollocationAttention att = collocation_attention(tape, collocations, sem, wv.attention[k], d_c);
      out.attention[from] = att.weights;
      return mixed_semantic(att.context, fact, task_fact, wv.mix[k]);
    }
    return std::nullopt;
  };
  out.judgment = decode_case(fact, self.graph_, dec, decode, &hook);
  return out;
}

ForwardVars Model::forward(Tape& tape, const IndexedCase& input, const ForwardOptions& options) {
  return forward_impl(*this, tape, input, options);
}

ForwardVars Model::forward(Tape& tape, const IndexedCase& input, const ForwardOptions& options) const {
  return forward_impl(*this, tape, input, options);
}

Prediction predict(const Model& model, const IndexedCase& input) {
  Tape tape(GradMode::kInference);
  ForwardVars vars = model.forward(tape, input);
  Prediction out;
  out.output = JudgmentOutput::from(vars.judgment);
  for (const Var& a : vars.attention) {
    out.attention.push_back(a.valid() ? std::optional<Tensor>(a.to_tensor()) : std::nullopt);
  }
  return out;
}

}  // namespace ljp
