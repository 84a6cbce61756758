#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ljp/task_graph.hpp"
#include "ljp/tape.hpp"
#include "ljp/tensor.hpp"

namespace ljp {

struct LinearParams {
  Tensor weight;  // [out x in]
  Tensor bias;    // [out]
};

struct LinearVars {
  Var weight;
  Var bias;
};

/// Learnable arrays of the bi-feedback decoder.
///
/// Latent states exist for tasks that feed a follow-up or (with verification)
/// verify a pre-order task; state-to-semantic
/// maps for tasks with follow-ups, direct heads for root tasks, one forward
/// head per edge and, when verification is allocated, one gate head per
/// edge. gate[e] for edge (j -> i) maps lsv_i to t_j gate logits.
struct MpbfnParams {
  std::vector<std::optional<Tensor>> latent_state;       // [t_i x d_s]
  std::vector<std::optional<Tensor>> state_to_semantic;  // [d_c x d_s]
  std::vector<std::optional<LinearParams>> direct;       // [t_i x d_c], [t_i]
  std::vector<LinearParams> forward;                      // [t_j x d_c], [t_j]
  std::vector<LinearParams> gate;                         // [t_j x d_s], [t_j]

  static MpbfnParams init(const TaskGraph& graph, std::size_t d_c, std::size_t d_s,
                          bool with_gates, std::uint64_t seed);

  bool has_gates() const { return !gate.empty(); }

  template <class Self, class Fn>
  static void visit(Self& self, const TaskGraph& graph, Fn&& fn) {
    for (std::size_t i = 0; i < graph.task_count(); ++i) {
      const std::string& id = graph.task(i).id;
      if (self.latent_state[i]) fn("mpbfn.latent_state." + id, *self.latent_state[i]);
      if (self.state_to_semantic[i]) {
        fn("mpbfn.state_to_semantic." + id, *self.state_to_semantic[i]);
      }
      if (self.direct[i]) {
        fn("mpbfn.direct." + id + ".weight", self.direct[i]->weight);
        fn("mpbfn.direct." + id + ".bias", self.direct[i]->bias);
      }
    }
    for (std::size_t e = 0; e < graph.edges().size(); ++e) {
      const std::string from = graph.task(graph.edges()[e].from).id;
      const std::string to = graph.task(graph.edges()[e].to).id;
      fn("mpbfn.forward." + from + "->" + to + ".weight", self.forward[e].weight);
      fn("mpbfn.forward." + from + "->" + to + ".bias", self.forward[e].bias);
      if (!self.gate.empty()) {
        fn("mpbfn.gate." + to + "->" + from + ".weight", self.gate[e].weight);
        fn("mpbfn.gate." + to + "->" + from + ".bias", self.gate[e].bias);
      }
    }
  }
};

struct MpbfnVars {
  std::vector<Var> latent_state;
  std::vector<Var> state_to_semantic;
  std::vector<std::optional<LinearVars>> direct;
  std::vector<LinearVars> forward;
  std::vector<LinearVars> gate;
};

template <class Params>
MpbfnVars bind_mpbfn(Tape& tape, Params& p) {
  MpbfnVars v;
  for (auto& s : p.latent_state) v.latent_state.push_back(s ? tape.param(*s) : Var());
  for (auto& w : p.state_to_semantic) v.state_to_semantic.push_back(w ? tape.param(*w) : Var());
  for (auto& d : p.direct) {
    if (d) {
      v.direct.push_back(LinearVars{tape.param(d->weight), tape.param(d->bias)});
    } else {
      v.direct.push_back(std::nullopt);
    }
  }
  for (auto& f : p.forward) v.forward.push_back({tape.param(f.weight), tape.param(f.bias)});
  for (auto& g : p.gate) v.gate.push_back({tape.param(g.weight), tape.param(g.bias)});
  return v;
}

/// lsv_i = sum_j res_ij * S^i_j.
Var latent_state_vector(Var res, Var latent_state);
/// sem_i = elu(Ws_i * lsv_i).
Var task_semantic(Var lsv, Var state_to_semantic);
/// fact_i = fact_ori (x) sem_i.
Var task_fact(Var fact_ori, Var sem);
/// softmax(W * input + b).
Var predict_head(Var input, const LinearVars& head);
/// pred_ij = softmax(Wf_ij * (fact_ori (x) sem_i) + bf_ij).
Var forward_predict(Var fact_ori, Var sem, const LinearVars& head);
/// gate_ij = sigmoid(Wg_ij * lsv_i + bg_ij).
Var backward_verify(Var lsv, const LinearVars& gate_head);
/// norm(prod_j pred_ji); needs at least one prediction.
Var comprehensive_fp(std::span<const Var> predictions);
/// All-ones when there are no gates, else norm(prod_j gate_ji).
Var comprehensive_bv(Tape& tape, std::span<const Var> gates, std::size_t classes);
/// y_hat = res (x) ver, divided by its sum when `renormalize`.
Var final_result(Var res, Var ver, bool renormalize);

/// Lowest index wins ties.
std::size_t argmax(std::span<const double> values);

struct DecodeOptions {
  bool bv_enabled = true;
  bool renormalize = true;
};

/// Optionally replaces the input of pred_{from,to} (normally fact_from).
using FactOverride =
    std::function<std::optional<Var>(std::size_t from, std::size_t to, Var sem_from, Var fact_from)>;

struct JudgmentVars {
  std::vector<Var> res;    // per task
  std::vector<Var> ver;    // per task
  std::vector<Var> y_hat;  // per task
  std::vector<Var> lsv;    // per task, invalid without a latent state
  std::vector<Var> sem;    // per task, invalid without follow-ups
  std::vector<Var> pred;   // per edge (from -> to)
  std::vector<Var> gate;   // per edge: gate_{to,from}; invalid without BV
};

/// Runs forward prediction in topological order, then backward
/// verification from each task's comprehensive FP result, then fuses.
JudgmentVars decode_case(Var fact_ori, const TaskGraph& graph, const MpbfnVars& params,
                         const DecodeOptions& options, const FactOverride* fact_override = nullptr);

/// Plain-value snapshot of a decode.
struct JudgmentOutput {
  std::vector<Tensor> res;
  std::vector<Tensor> ver;
  std::vector<Tensor> y_hat;
  std::vector<Tensor> pred;
  std::vector<std::optional<Tensor>> gate;
  std::vector<std::size_t> predicted;

  static JudgmentOutput from(const JudgmentVars& vars);
};

}  // namespace ljp
