#include "ljp/mpbfn.hpp"

#include "ljp/error.hpp"
#include "ljp/init.hpp"
#include "ljp/ops.hpp"

namespace ljp {

MpbfnParams MpbfnParams::init(const TaskGraph& graph, std::size_t d_c, std::size_t d_s,
                              bool with_gates, std::uint64_t seed) {
  const std::size_t n = graph.task_count();
  MpbfnParams p;
  p.latent_state.resize(n);
  p.state_to_semantic.resize(n);
  p.direct.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t t = graph.classes(i);
    if (!graph.follow_up(i).empty() || (with_gates && !graph.pre_order(i).empty())) {
      p.latent_state[i] = Tensor(Shape{t, d_s});
    }
    if (!graph.follow_up(i).empty()) p.state_to_semantic[i] = Tensor(Shape{d_c, d_s});
    if (graph.pre_order(i).empty()) p.direct[i] = LinearParams{Tensor(Shape{t, d_c}), Tensor(Shape{t})};
  }
  for (const auto& e : graph.edges()) {
    const std::size_t t_to = graph.classes(e.to);
    const std::size_t t_from = graph.classes(e.from);
    p.forward.push_back({Tensor(Shape{t_to, d_c}), Tensor(Shape{t_to})});
    if (with_gates) p.gate.push_back({Tensor(Shape{t_from, d_s}), Tensor(Shape{t_from})});
  }
  visit(p, graph, [&](const std::string& name, Tensor& t) {
    if (name.rfind("mpbfn.latent_state.", 0) == 0) {
      init_uniform(t, -0.1, 0.1, seed, name);
    } else if (t.rank() == 2) {
      init_glorot(t, seed, name);
    }
  });
  return p;
}

Var latent_state_vector(Var res, Var latent_state) {
  if (res.rank() != 1 || latent_state.rank() != 2 || res.size() != latent_state.shape()[0]) {
    throw DimensionError("lsv: result " + shape_string(res.shape()) + " vs latent state " +
                         shape_string(latent_state.shape()));
  }
  return matmul(res, latent_state);
}

Var task_semantic(Var lsv, Var state_to_semantic) { return elu(matmul(state_to_semantic, lsv)); }

Var task_fact(Var fact_ori, Var sem) { return mul(fact_ori, sem); }

Var predict_head(Var input, const LinearVars& head) {
  return softmax(add(matmul(head.weight, input), head.bias));
}

Var forward_predict(Var fact_ori, Var sem, const LinearVars& head) {
  return predict_head(task_fact(fact_ori, sem), head);
}

Var backward_verify(Var lsv, const LinearVars& gate_head) {
  return sigmoid(add(matmul(gate_head.weight, lsv), gate_head.bias));
}

namespace {

Var product(std::span<const Var> factors) {
  Var acc = factors[0];
  for (std::size_t k = 1; k < factors.size(); ++k) acc = mul(acc, factors[k]);
  return acc;
}

}  // namespace

Var comprehensive_fp(std::span<const Var> predictions) {
  if (predictions.empty()) throw OrderingError("comprehensive FP without pre-order predictions");
  for (const Var& p : predictions) {
    if (!p.valid()) throw OrderingError("pre-order prediction not yet computed");
  }
  return normalize(product(predictions));
}

Var comprehensive_bv(Tape& tape, std::span<const Var> gates, std::size_t classes) {
  if (gates.empty()) return tape.constant(Tensor::ones(Shape{classes}));
  for (const Var& g : gates) {
    if (g.size() != classes) {
      throw DimensionError("gate " + shape_string(g.shape()) + " for a task with " +
                           std::to_string(classes) + " classes");
    }
  }
  return normalize(product(gates));
}

Var final_result(Var res, Var ver, bool renormalize) {
  Var fused = mul(res, ver);
  return renormalize ? normalize(fused) : fused;
}

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

JudgmentVars decode_case(Var fact_ori, const TaskGraph& graph, const MpbfnVars& params,
                         const DecodeOptions& options, const FactOverride* fact_override) {
  Tape& tape = fact_ori.tape();
  const std::size_t n = graph.task_count();
  const auto& edges = graph.edges();
  if (options.bv_enabled && params.gate.size() != edges.size()) {
    throw ConfigError("backward verification enabled but gate heads are not allocated");
  }

  JudgmentVars out;
  out.res.resize(n);
  out.ver.resize(n);
  out.y_hat.resize(n);
  out.lsv.resize(n);
  out.sem.resize(n);
  out.pred.resize(edges.size());
  out.gate.resize(edges.size());

  for (std::size_t i : graph.topological_order()) {
    const auto& pre = graph.pre_order(i);
    if (pre.empty()) {
      out.res[i] = predict_head(fact_ori, *params.direct[i]);
    } else {
      std::vector<Var> preds;
      for (std::size_t j : pre) preds.push_back(out.pred[graph.edge_index(j, i)]);
      out.res[i] = comprehensive_fp(preds);
    }
    if (params.latent_state[i].valid()) {
      out.lsv[i] = latent_state_vector(out.res[i], params.latent_state[i]);
    }
    const auto& follow = graph.follow_up(i);
    if (follow.empty()) continue;
    out.sem[i] = task_semantic(out.lsv[i], params.state_to_semantic[i]);
    Var fact_i = task_fact(fact_ori, out.sem[i]);
    for (std::size_t k : follow) {
      const std::size_t e = graph.edge_index(i, k);
      Var input = fact_i;
      if (fact_override && *fact_override) {
        if (auto replaced = (*fact_override)(i, k, out.sem[i], fact_i)) input = *replaced;
      }
      out.pred[e] = predict_head(input, params.forward[e]);
    }
  }

  for (std::size_t e = 0; e < edges.size() && options.bv_enabled; ++e) {
    out.gate[e] = backward_verify(out.lsv[edges[e].to], params.gate[e]);
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<Var> gates;
    if (options.bv_enabled) {
      for (std::size_t i : graph.follow_up(j)) gates.push_back(out.gate[graph.edge_index(j, i)]);
    }
    out.ver[j] = comprehensive_bv(tape, gates, graph.classes(j));
    out.y_hat[j] = final_result(out.res[j], out.ver[j], options.renormalize);
  }
  return out;
}

JudgmentOutput JudgmentOutput::from(const JudgmentVars& vars) {
  JudgmentOutput out;
  for (std::size_t i = 0; i < vars.res.size(); ++i) {
    out.res.push_back(vars.res[i].to_tensor());
    out.ver.push_back(vars.ver[i].to_tensor());
    out.y_hat.push_back(vars.y_hat[i].to_tensor());
    out.predicted.push_back(argmax(vars.y_hat[i].value()));
  }
  for (const Var& p : vars.pred) out.pred.push_back(p.to_tensor());
  for (const Var& g : vars.gate) {
    out.gate.push_back(g.valid() ? std::optional<Tensor>(g.to_tensor()) : std::nullopt);
  }
  return out;
}

}  // namespace ljp
