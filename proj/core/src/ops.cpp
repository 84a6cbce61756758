#include "ljp/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ljp/error.hpp"

namespace ljp {
namespace {

bool needs(Var v) { return v.tape().needs_grad(v.id()); }

void same_tape(Var a, Var b) {
  if (&a.tape() != &b.tape()) throw Error("operands recorded on different tapes");
}

}  // namespace

Var matmul(Var a, Var b) {
  same_tape(a, b);
  const Shape& sa = a.shape();
  const Shape& sb = b.shape();
  if (sa.empty() || sa.size() > 2 || sb.empty() || sb.size() > 2 ||
      (sa.size() == 1 && sb.size() == 1)) {
    throw RankError("matmul of " + shape_string(sa) + " and " + shape_string(sb));
  }
  const std::size_t m = sa.size() == 2 ? sa[0] : 1;
  const std::size_t k = sa.back();
  const std::size_t kb = sb[0];
  const std::size_t n = sb.size() == 2 ? sb[1] : 1;
  if (k != kb) {
    throw DimensionError("matmul inner dimensions differ: " + shape_string(sa) + " x " +
                         shape_string(sb));
  }
  Shape out_shape;
  if (sa.size() == 2) out_shape.push_back(m);
  if (sb.size() == 2) out_shape.push_back(n);

  auto av = a.value();
  auto bv = b.value();
  std::vector<double> out(m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = av[i * k + p];
      if (aip == 0.0) continue;
      const double* brow = &bv[p * n];
      double* orow = &out[i * n];
      for (std::size_t j = 0; j < n; ++j) orow[j] += aip * brow[j];
    }
  }
  const std::uint32_t ia = a.id(), ib = b.id();
  return a.tape().record(
      std::move(out_shape), std::move(out), needs(a) || needs(b),
      [ia, ib, m, k, n](Tape& t, std::uint32_t self) {
        auto g = t.grad(self);
        auto av = t.value(ia);
        auto bv = t.value(ib);
        if (t.needs_grad(ia)) {
          auto ga = t.grad_buffer(ia);
          for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t p = 0; p < k; ++p) {
              double acc = 0.0;
              for (std::size_t j = 0; j < n; ++j) acc += g[i * n + j] * bv[p * n + j];
              ga[i * k + p] += acc;
            }
          }
        }
        if (t.needs_grad(ib)) {
          auto gb = t.grad_buffer(ib);
          for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t p = 0; p < k; ++p) {
              const double aip = av[i * k + p];
              if (aip == 0.0) continue;
              for (std::size_t j = 0; j < n; ++j) gb[p * n + j] += aip * g[i * n + j];
            }
          }
        }
      });
}

Var elementwise(Elementwise kind, Var a, Var b) {
  same_tape(a, b);
  if (a.shape() != b.shape()) {
    throw DimensionError("elementwise shapes differ: " + shape_string(a.shape()) + " vs " +
                         shape_string(b.shape()));
  }
  auto av = a.value();
  auto bv = b.value();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    switch (kind) {
      case Elementwise::kAdd: out[i] = av[i] + bv[i]; break;
      case Elementwise::kSub: out[i] = av[i] - bv[i]; break;
      case Elementwise::kMul: out[i] = av[i] * bv[i]; break;
    }
  }
  const std::uint32_t ia = a.id(), ib = b.id();
  return a.tape().record(
      a.shape(), std::move(out), needs(a) || needs(b), [kind, ia, ib](Tape& t, std::uint32_t self) {
        auto g = t.grad(self);
        if (t.needs_grad(ia)) {
          auto ga = t.grad_buffer(ia);
          if (kind == Elementwise::kMul) {
            auto bv = t.value(ib);
            for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * bv[i];
          } else {
            for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
          }
        }
        if (t.needs_grad(ib)) {
          auto gb = t.grad_buffer(ib);
          if (kind == Elementwise::kMul) {
            auto av = t.value(ia);
            for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * av[i];
          } else if (kind == Elementwise::kSub) {
            for (std::size_t i = 0; i < g.size(); ++i) gb[i] -= g[i];
          } else {
            for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i];
          }
        }
      });
}

Var concat(Var a, Var b) {
  same_tape(a, b);
  if (a.rank() != 1 || b.rank() != 1) {
    throw RankError("concat needs vectors, got " + shape_string(a.shape()) + " and " +
                    shape_string(b.shape()));
  }
  auto av = a.value();
  auto bv = b.value();
  std::vector<double> out;
  out.reserve(av.size() + bv.size());
  out.insert(out.end(), av.begin(), av.end());
  out.insert(out.end(), bv.begin(), bv.end());
  const std::size_t na = av.size();
  const std::uint32_t ia = a.id(), ib = b.id();
  Shape shape{out.size()};
  return a.tape().record(std::move(shape), std::move(out), needs(a) || needs(b),
                         [ia, ib, na](Tape& t, std::uint32_t self) {
                           auto g = t.grad(self);
                           if (t.needs_grad(ia)) {
                             auto ga = t.grad_buffer(ia);
                             for (std::size_t i = 0; i < na; ++i) ga[i] += g[i];
                           }
                           if (t.needs_grad(ib)) {
                             auto gb = t.grad_buffer(ib);
                             for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += g[na + i];
                           }
                         });
}

Var activation(Activation kind, Var x) {
  auto xv = x.value();
  std::vector<double> out(xv.size());
  switch (kind) {
    case Activation::kElu:
      for (std::size_t i = 0; i < xv.size(); ++i) {
        out[i] = xv[i] > 0.0 ? xv[i] : std::expm1(xv[i]);
      }
      break;
    case Activation::kSigmoid:
      for (std::size_t i = 0; i < xv.size(); ++i) {
        out[i] = xv[i] >= 0.0 ? 1.0 / (1.0 + std::exp(-xv[i]))
                              : std::exp(xv[i]) / (1.0 + std::exp(xv[i]));
      }
      break;
    case Activation::kTanh:
      for (std::size_t i = 0; i < xv.size(); ++i) out[i] = std::tanh(xv[i]);
      break;
    case Activation::kSoftmax: {
      if (x.rank() != 1 || xv.empty()) {
        throw RankError("softmax needs a non-empty vector, got " + shape_string(x.shape()));
      }
      const double mx = *std::max_element(xv.begin(), xv.end());
      double total = 0.0;
      for (std::size_t i = 0; i < xv.size(); ++i) {
        out[i] = std::exp(xv[i] - mx);
        total += out[i];
      }
      for (double& v : out) v /= total;
      break;
    }
  }
  const std::uint32_t ix = x.id();
  return x.tape().record(x.shape(), std::move(out), needs(x), [kind, ix](Tape& t, std::uint32_t self) {
    auto g = t.grad(self);
    auto y = t.value(self);
    auto xv = t.value(ix);
    auto gx = t.grad_buffer(ix);
    switch (kind) {
      case Activation::kElu:
        for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * (xv[i] > 0.0 ? 1.0 : y[i] + 1.0);
        break;
      case Activation::kSigmoid:
        for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * y[i] * (1.0 - y[i]);
        break;
      case Activation::kTanh:
        for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * (1.0 - y[i] * y[i]);
        break;
      case Activation::kSoftmax: {
        double gy = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) gy += g[i] * y[i];
        for (std::size_t i = 0; i < g.size(); ++i) gx[i] += y[i] * (g[i] - gy);
        break;
      }
    }
  });
}

Var max_pool_over_positions(Var positions) {
  if (positions.rank() != 2) {
    throw RankError("max-pool needs [positions x channels], got " +
                    shape_string(positions.shape()));
  }
  const std::size_t rows = positions.shape()[0];
  const std::size_t cols = positions.shape()[1];
  if (rows == 0) throw DegenerateInputError("max-pool over zero positions");
  auto v = positions.value();
  std::vector<double> out(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(cols));
  std::vector<std::size_t> arg(cols, 0);
  for (std::size_t r = 1; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (v[r * cols + c] > out[c]) {
        out[c] = v[r * cols + c];
        arg[c] = r;
      }
    }
  }
  const std::uint32_t ip = positions.id();
  return positions.tape().record(Shape{cols}, std::move(out), needs(positions),
                                 [ip, cols, arg = std::move(arg)](Tape& t, std::uint32_t self) {
                                   auto g = t.grad(self);
                                   auto gp = t.grad_buffer(ip);
                                   for (std::size_t c = 0; c < cols; ++c) gp[arg[c] * cols + c] += g[c];
                                 });
}

Var embedding_lookup(Var table, std::size_t index) {
  if (table.rank() != 2) throw RankError("embedding table must be rank 2");
  const std::size_t vocab = table.shape()[0];
  const std::size_t dim = table.shape()[1];
  if (index >= vocab) {
    throw IndexError("embedding index " + std::to_string(index) + " outside table of " +
                     std::to_string(vocab) + " rows");
  }
  auto v = table.value();
  std::vector<double> out(v.begin() + static_cast<std::ptrdiff_t>(index * dim),
                          v.begin() + static_cast<std::ptrdiff_t>((index + 1) * dim));
  const std::uint32_t it = table.id();
  return table.tape().record(Shape{dim}, std::move(out), needs(table),
                             [it, index, dim](Tape& t, std::uint32_t self) {
                               auto g = t.grad(self);
                               auto gt = t.grad_buffer(it);
                               for (std::size_t j = 0; j < dim; ++j) gt[index * dim + j] += g[j];
                             });
}

Var gather_rows(Var table, std::span<const std::size_t> indices) {
  if (table.rank() != 2) throw RankError("embedding table must be rank 2");
  const std::size_t vocab = table.shape()[0];
  const std::size_t dim = table.shape()[1];
  auto v = table.value();
  std::vector<double> out;
  out.reserve(indices.size() * dim);
  for (std::size_t idx : indices) {
    if (idx >= vocab) {
      throw IndexError("embedding index " + std::to_string(idx) + " outside table of " +
                       std::to_string(vocab) + " rows");
    }
    out.insert(out.end(), v.begin() + static_cast<std::ptrdiff_t>(idx * dim),
               v.begin() + static_cast<std::ptrdiff_t>((idx + 1) * dim));
  }
  const std::uint32_t it = table.id();
  std::vector<std::size_t> rows(indices.begin(), indices.end());
  return table.tape().record(Shape{indices.size(), dim}, std::move(out), needs(table),
                             [it, dim, rows = std::move(rows)](Tape& t, std::uint32_t self) {
                               auto g = t.grad(self);
                               auto gt = t.grad_buffer(it);
                               for (std::size_t r = 0; r < rows.size(); ++r) {
                                 for (std::size_t j = 0; j < dim; ++j) {
                                   gt[rows[r] * dim + j] += g[r * dim + j];
                                 }
                               }
                             });
}

Var conv_windows(Var rows, Var weight, Var bias, std::size_t window) {
  same_tape(rows, weight);
  same_tape(rows, bias);
  if (rows.rank() != 2 || weight.rank() != 2 || bias.rank() != 1) {
    throw RankError("conv_windows needs rows [l x d], weight [f x h*d], bias [f]");
  }
  const std::size_t len = rows.shape()[0];
  const std::size_t dim = rows.shape()[1];
  const std::size_t filters = weight.shape()[0];
  const std::size_t span = window * dim;
  if (window == 0 || weight.shape()[1] != span || bias.shape()[0] != filters) {
    throw DimensionError("conv_windows: weight " + shape_string(weight.shape()) + ", bias " +
                         shape_string(bias.shape()) + " do not fit window " +
                         std::to_string(window) + " over rows " + shape_string(rows.shape()));
  }
  if (len < window) {
    throw DegenerateInputError("conv_windows: " + std::to_string(len) +
                               " rows shorter than window " + std::to_string(window));
  }
  const std::size_t positions = len - window + 1;
  auto x = rows.value();
  auto w = weight.value();
  auto b = bias.value();
  std::vector<double> out(positions * filters);
  for (std::size_t i = 0; i < positions; ++i) {
    const double* xs = &x[i * dim];
    for (std::size_t f = 0; f < filters; ++f) {
      const double* wf = &w[f * span];
      double acc = b[f];
      for (std::size_t q = 0; q < span; ++q) acc += wf[q] * xs[q];
      out[i * filters + f] = acc;
    }
  }
  const std::uint32_t ix = rows.id(), iw = weight.id(), ib = bias.id();
  return rows.tape().record(
      Shape{positions, filters}, std::move(out), needs(rows) || needs(weight) || needs(bias),
      [ix, iw, ib, positions, filters, span, dim](Tape& t, std::uint32_t self) {
        auto g = t.grad(self);
        auto x = t.value(ix);
        auto w = t.value(iw);
        const bool gx_on = t.needs_grad(ix), gw_on = t.needs_grad(iw), gb_on = t.needs_grad(ib);
        std::span<double> gx, gw, gb;
        if (gx_on) gx = t.grad_buffer(ix);
        if (gw_on) gw = t.grad_buffer(iw);
        if (gb_on) gb = t.grad_buffer(ib);
        for (std::size_t i = 0; i < positions; ++i) {
          for (std::size_t f = 0; f < filters; ++f) {
            const double gi = g[i * filters + f];
            if (gi == 0.0) continue;
            if (gb_on) gb[f] += gi;
            if (gw_on) {
              for (std::size_t q = 0; q < span; ++q) gw[f * span + q] += gi * x[i * dim + q];
            }
            if (gx_on) {
              for (std::size_t q = 0; q < span; ++q) gx[i * dim + q] += gi * w[f * span + q];
            }
          }
        }
      });
}

Var sum(Var x) {
  auto v = x.value();
  double total = 0.0;
  for (double e : v) total += e;
  const std::uint32_t ix = x.id();
  return x.tape().record(Shape{}, {total}, needs(x), [ix](Tape& t, std::uint32_t self) {
    const double g = t.grad(self)[0];
    for (double& e : t.grad_buffer(ix)) e += g;
  });
}

Var dot(Var a, Var b) {
  same_tape(a, b);
  if (a.shape() != b.shape()) {
    throw DimensionError("dot shapes differ: " + shape_string(a.shape()) + " vs " +
                         shape_string(b.shape()));
  }
  auto av = a.value();
  auto bv = b.value();
  double total = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) total += av[i] * bv[i];
  const std::uint32_t ia = a.id(), ib = b.id();
  return a.tape().record(Shape{}, {total}, needs(a) || needs(b), [ia, ib](Tape& t, std::uint32_t self) {
    const double g = t.grad(self)[0];
    auto av = t.value(ia);
    auto bv = t.value(ib);
    if (t.needs_grad(ia)) {
      auto ga = t.grad_buffer(ia);
      for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g * bv[i];
    }
    if (t.needs_grad(ib)) {
      auto gb = t.grad_buffer(ib);
      for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += g * av[i];
    }
  });
}

Var normalize(Var x) {
  auto v = x.value();
  double total = 0.0;
  for (double e : v) total += e;
  if (!(total > 0.0)) throw DomainError("normalize: non-positive total");
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / total;
  const std::uint32_t ix = x.id();
  return x.tape().record(x.shape(), std::move(out), needs(x), [ix, total](Tape& t, std::uint32_t self) {
    auto g = t.grad(self);
    auto y = t.value(self);
    double gy = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) gy += g[i] * y[i];
    auto gx = t.grad_buffer(ix);
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += (g[i] - gy) / total;
  });
}

Var scale(Var x, double factor) {
  auto v = x.value();
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * factor;
  const std::uint32_t ix = x.id();
  return x.tape().record(x.shape(), std::move(out), needs(x), [ix, factor](Tape& t, std::uint32_t self) {
    auto g = t.grad(self);
    auto gx = t.grad_buffer(ix);
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * factor;
  });
}

Var slice(Var x, std::size_t offset, std::size_t length) {
  if (x.rank() != 1) throw RankError("slice needs a vector, got " + shape_string(x.shape()));
  auto v = x.value();
  if (offset + length > v.size()) {
    throw IndexError("slice [" + std::to_string(offset) + ", " + std::to_string(offset + length) +
                     ") outside vector of " + std::to_string(v.size()));
  }
  std::vector<double> out(v.begin() + static_cast<std::ptrdiff_t>(offset),
                          v.begin() + static_cast<std::ptrdiff_t>(offset + length));
  const std::uint32_t ix = x.id();
  return x.tape().record(Shape{length}, std::move(out), needs(x), [ix, offset](Tape& t, std::uint32_t self) {
    auto g = t.grad(self);
    auto gx = t.grad_buffer(ix);
    for (std::size_t i = 0; i < g.size(); ++i) gx[offset + i] += g[i];
  });
}

Var transpose(Var m) {
  if (m.rank() != 2) throw RankError("transpose needs a matrix, got " + shape_string(m.shape()));
  const std::size_t r = m.shape()[0], c = m.shape()[1];
  auto v = m.value();
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) out[j * r + i] = v[i * c + j];
  }
  const std::uint32_t im = m.id();
  return m.tape().record(Shape{c, r}, std::move(out), needs(m), [im, r, c](Tape& t, std::uint32_t self) {
    auto g = t.grad(self);
    auto gm = t.grad_buffer(im);
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < c; ++j) gm[i * c + j] += g[j * r + i];
    }
  });
}

Var stack_rows(std::span<const Var> rows) {
  if (rows.empty()) throw DegenerateInputError("stack_rows of zero rows");
  Tape& tape = rows.front().tape();
  const std::size_t dim = rows.front().size();
  std::vector<double> out;
  out.reserve(rows.size() * dim);
  std::vector<std::uint32_t> ids;
  ids.reserve(rows.size());
  bool any = false;
  for (const Var& r : rows) {
    same_tape(rows.front(), r);
    if (r.rank() != 1 || r.size() != dim) {
      throw DimensionError("stack_rows: row " + shape_string(r.shape()) + " vs length " +
                           std::to_string(dim));
    }
    auto v = r.value();
    out.insert(out.end(), v.begin(), v.end());
    ids.push_back(r.id());
    any = any || needs(r);
  }
  return tape.record(Shape{rows.size(), dim}, std::move(out), any,
                     [ids = std::move(ids), dim](Tape& t, std::uint32_t self) {
                       auto g = t.grad(self);
                       for (std::size_t r = 0; r < ids.size(); ++r) {
                         if (!t.needs_grad(ids[r])) continue;
                         auto gr = t.grad_buffer(ids[r]);
                         for (std::size_t j = 0; j < dim; ++j) gr[j] += g[r * dim + j];
                       }
                     });
}

Var neg_log_at(Var x, std::size_t index, double eps) {
  auto v = x.value();
  if (index >= v.size()) {
    throw IndexError("neg_log_at index " + std::to_string(index) + " outside " +
                     shape_string(x.shape()));
  }
  const double shifted = v[index] + eps;
  const std::uint32_t ix = x.id();
  return x.tape().record(Shape{}, {-std::log(shifted)}, needs(x),
                         [ix, index, shifted](Tape& t, std::uint32_t self) {
                           t.grad_buffer(ix)[index] -= t.grad(self)[0] / shifted;
                         });
}

}  // namespace ljp
