#include "ljp/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "ljp/error.hpp"

namespace ljp {

double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / denom;
}

double GradCheckReport::max_relative_error() const {
  double worst = 0.0;
  for (const auto& t : tensors) worst = std::max(worst, t.worst.relative_error);
  return worst;
}

GradCheckReport check_gradients(const ScalarFn& f, std::span<const NamedTensor> tensors,
                                double step, Stencil stencil) {
  if (!(step > 0.0)) throw DomainError("grad check step must be positive");
  std::vector<bool> had_grad;
  for (const auto& nt : tensors) {
    had_grad.push_back(nt.tensor->requires_grad());
    nt.tensor->set_requires_grad(true);
    nt.tensor->zero_grad();
  }
  {
    Tape tape;
    Var loss = f(tape);
    tape.backward(loss);
  }
  auto evaluate = [&f]() {
    Tape tape(GradMode::kInference);
    return f(tape).item();
  };

  GradCheckReport report;
  for (const auto& nt : tensors) {
    TensorCheck check;
    check.name = nt.name;
    check.coordinates = nt.tensor->size();
    auto data = nt.tensor->data();
    auto grad = nt.tensor->grad();
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double original = data[i];
      auto at = [&](double offset) {
        data[i] = original + offset;
        const double v = evaluate();
        data[i] = original;
        return v;
      };
      const double near = at(step) - at(-step);
      double numeric = near / (2.0 * step);
      if (stencil == Stencil::kFivePoint) {
        const double far = at(2.0 * step) - at(-2.0 * step);
        numeric = (8.0 * near - far) / (12.0 * step);
      }
      const double err = relative_error(grad[i], numeric);
      if (i == 0 || err > check.worst.relative_error) {
        check.worst = {i, grad[i], numeric, err};
      }
    }
    report.tensors.push_back(std::move(check));
  }
  for (std::size_t k = 0; k < tensors.size(); ++k) {
    if (!had_grad[k]) tensors[k].tensor->set_requires_grad(false);
  }
  return report;
}

double grad_check(const std::function<Var(Tape&, std::span<const Var>)>& f,
                  std::vector<Tensor> inputs, double step) {
  std::vector<NamedTensor> named;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    named.push_back({"input" + std::to_string(i), &inputs[i]});
  }
  ScalarFn wrapped = [&](Tape& tape) {
    std::vector<Var> vars;
    vars.reserve(inputs.size());
    for (auto& t : inputs) vars.push_back(tape.param(t));
    return f(tape, vars);
  };
  return check_gradients(wrapped, named, step).max_relative_error();
}

}  // namespace ljp
