#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "npode/tensor.hpp"

namespace npode::ad {

enum class OpKind {
  Leaf,
  MatMul,
  Transpose,
  Conv1d,
  Add,
  Sub,
  Mul,
  Div,
  Scale,
  AddScalar,
  AddRowVec,
  Negate,
  Relu,
  Tanh,
  Softplus,
  Exp,
  Log,
  Sum,
  Mean,
  SumAxis,
  MeanAxis,
  Softmax,
  Concat,
  Reshape,
};

// Reverse-mode tape over Tensor ops. Nodes are appended in evaluation order,
// so inputs always precede their consumers and the backward sweep is a single
// reverse pass. One tape per forward/backward pass, one thread per tape.
class Tape {
 public:
  struct Node {
    OpKind kind;
    std::vector<int> inputs;
    Shape shape;
    std::shared_ptr<std::vector<double>> value;
    // Accumulates into the grad buffers of this node's inputs.
    std::function<void(Tape&, const double*)> back;
    std::vector<double> grad;
  };

  long size() const { return static_cast<long>(nodes_.size()); }
  void clear() { nodes_.clear(); }

  // Records an existing tensor (parameter or input) as a differentiable leaf.
  Tensor leaf(const Tensor& t) {
    Tensor out(t.shape(), t.storage());
    out.node = push(OpKind::Leaf, t.shape(), t.storage(), {}, nullptr);
    return out;
  }

  // ---- linear algebra ----

  Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0))
      throw DimensionError("matmul: incompatible shapes " + shape_str(a.shape()) +
                           " and " + shape_str(b.shape()));
    long r = a.dim(0), k = a.dim(1), c = b.dim(1);
    Tensor out({r, c});
    gemm(false, false, r, c, k, 1.0, a.data(), k, b.data(), c, 0.0, out.data(), c);
    auto as = a.storage(), bs = b.storage();
    int an = a.node, bn = b.node;
    out.node = push(OpKind::MatMul, out.shape(), out.storage(), {an, bn},
                    [as, bs, an, bn, r, k, c](Tape& t, const double* g) {
                      if (double* ga = t.grad_buf(an))
                        gemm(false, true, r, k, c, 1.0, g, c, bs->data(), c, 1.0, ga, k);
                      if (double* gb = t.grad_buf(bn))
                        gemm(true, false, k, c, r, 1.0, as->data(), k, g, c, 1.0, gb, c);
                    });
    return out;
  }

  Tensor transpose(const Tensor& a) {
    if (a.rank() != 2) throw DimensionError("transpose: rank-2 tensor required");
    long r = a.dim(0), c = a.dim(1);
    Tensor out({c, r});
    for (long i = 0; i < r; ++i)
      for (long j = 0; j < c; ++j) out.data()[j * r + i] = a.data()[i * c + j];
    int an = a.node;
    out.node = push(OpKind::Transpose, out.shape(), out.storage(), {an},
                    [an, r, c](Tape& t, const double* g) {
                      if (double* ga = t.grad_buf(an))
                        for (long i = 0; i < r; ++i)
                          for (long j = 0; j < c; ++j) ga[i * c + j] += g[j * r + i];
                    });
    return out;
  }

  // Same-padded stride-1 cross-correlation. signal: [Cin x L] or [B x Cin x L];
  // weights: [Cin x Cout x K], K odd, no bias. Output keeps the signal length.
  Tensor conv1d(const Tensor& signal, const Tensor& weights) {
    if (weights.rank() != 3)
      throw DimensionError("conv1d: weights must be [in x out x kernel], got " +
                           shape_str(weights.shape()));
    long cin = weights.dim(0), cout = weights.dim(1), kk = weights.dim(2);
    if (kk % 2 == 0)
      throw ConfigError("conv1d: even kernel size " + std::to_string(kk) +
                        " unsupported (same padding needs odd)");
    bool batched = signal.rank() == 3;
    if (!batched && signal.rank() != 2)
      throw DimensionError("conv1d: signal must be rank 2 or 3, got " +
                           shape_str(signal.shape()));
    long b = batched ? signal.dim(0) : 1;
    long sc = batched ? signal.dim(1) : signal.dim(0);
    long len = batched ? signal.dim(2) : signal.dim(1);
    if (sc != cin)
      throw DimensionError("conv1d: signal channels " + shape_str(signal.shape()) +
                           " vs weights " + shape_str(weights.shape()));
    long pad = (kk - 1) / 2;

    // Pack weights as [Cout x Cin*K] once; im2col per call.
    std::vector<double> wmat(cout * cin * kk);
    for (long ci = 0; ci < cin; ++ci)
      for (long co = 0; co < cout; ++co)
        for (long q = 0; q < kk; ++q)
          wmat[co * cin * kk + ci * kk + q] = weights.data()[(ci * cout + co) * kk + q];

    std::vector<double> cols;
    im2col(signal.data(), b, cin, len, kk, pad, cols);

    // out_mat [Cout x B*L] then reorder to [B x Cout x L].
    std::vector<double> out_mat(cout * b * len);
    gemm(false, false, cout, b * len, cin * kk, 1.0, wmat.data(), cin * kk, cols.data(),
         b * len, 0.0, out_mat.data(), b * len);
    Shape oshape = batched ? Shape{b, cout, len} : Shape{cout, len};
    Tensor out(oshape);
    for (long bi = 0; bi < b; ++bi)
      for (long co = 0; co < cout; ++co)
        for (long l = 0; l < len; ++l)
          out.data()[(bi * cout + co) * len + l] = out_mat[co * (b * len) + bi * len + l];

    auto ss = signal.storage();
    int sn = signal.node, wn = weights.node;
    out.node = push(
        OpKind::Conv1d, out.shape(), out.storage(), {sn, wn},
        [ss, sn, wn, wmat = std::move(wmat), b, cin, cout, len, kk,
         pad](Tape& t, const double* g) {
          long bl = b * len;
          // grad w.r.t. output reordered to [Cout x B*L]
          std::vector<double> gmat(cout * bl);
          for (long bi = 0; bi < b; ++bi)
            for (long co = 0; co < cout; ++co)
              for (long l = 0; l < len; ++l)
                gmat[co * bl + bi * len + l] = g[(bi * cout + co) * len + l];
          if (double* gw = t.grad_buf(wn)) {
            std::vector<double> cols;
            im2col(ss->data(), b, cin, len, kk, pad, cols);
            std::vector<double> gwmat(cout * cin * kk, 0.0);
            gemm(false, true, cout, cin * kk, bl, 1.0, gmat.data(), bl, cols.data(), bl,
                 0.0, gwmat.data(), cin * kk);
            for (long ci = 0; ci < cin; ++ci)
              for (long co = 0; co < cout; ++co)
                for (long q = 0; q < kk; ++q)
                  gw[(ci * cout + co) * kk + q] += gwmat[co * cin * kk + ci * kk + q];
          }
          if (double* gs = t.grad_buf(sn)) {
            std::vector<double> gcols(cin * kk * bl);
            gemm(true, false, cin * kk, bl, cout, 1.0, wmat.data(), cin * kk,
                 gmat.data(), bl, 0.0, gcols.data(), bl);
            // col2im accumulate
            for (long bi = 0; bi < b; ++bi)
              for (long ci = 0; ci < cin; ++ci)
                for (long q = 0; q < kk; ++q) {
                  const double* src = gcols.data() + (ci * kk + q) * bl + bi * len;
                  double* dst = gs + (bi * cin + ci) * len;
                  for (long l = 0; l < len; ++l) {
                    long p = l + q - pad;
                    if (p >= 0 && p < len) dst[p] += src[l];
                  }
                }
          }
        });
    return out;
  }

  // ---- elementwise ----

  Tensor add(const Tensor& a, const Tensor& b) {
    return binary(OpKind::Add, a, b, [](double x, double y) { return x + y; },
                  [](Tape& t, int an, int bn, long n, const double* g,
                     const std::vector<double>&, const std::vector<double>&) {
                    if (double* ga = t.grad_buf(an))
                      for (long i = 0; i < n; ++i) ga[i] += g[i];
                    if (double* gb = t.grad_buf(bn))
                      for (long i = 0; i < n; ++i) gb[i] += g[i];
                  });
  }

  Tensor sub(const Tensor& a, const Tensor& b) {
    return binary(OpKind::Sub, a, b, [](double x, double y) { return x - y; },
                  [](Tape& t, int an, int bn, long n, const double* g,
                     const std::vector<double>&, const std::vector<double>&) {
                    if (double* ga = t.grad_buf(an))
                      for (long i = 0; i < n; ++i) ga[i] += g[i];
                    if (double* gb = t.grad_buf(bn))
                      for (long i = 0; i < n; ++i) gb[i] -= g[i];
                  });
  }

  Tensor mul(const Tensor& a, const Tensor& b) {
    return binary(OpKind::Mul, a, b, [](double x, double y) { return x * y; },
                  [](Tape& t, int an, int bn, long n, const double* g,
                     const std::vector<double>& av, const std::vector<double>& bv) {
                    if (double* ga = t.grad_buf(an))
                      for (long i = 0; i < n; ++i) ga[i] += g[i] * bv[i];
                    if (double* gb = t.grad_buf(bn))
                      for (long i = 0; i < n; ++i) gb[i] += g[i] * av[i];
                  });
  }

  Tensor div(const Tensor& a, const Tensor& b) {
    return binary(OpKind::Div, a, b, [](double x, double y) { return x / y; },
                  [](Tape& t, int an, int bn, long n, const double* g,
                     const std::vector<double>& av, const std::vector<double>& bv) {
                    if (double* ga = t.grad_buf(an))
                      for (long i = 0; i < n; ++i) ga[i] += g[i] / bv[i];
                    if (double* gb = t.grad_buf(bn))
                      for (long i = 0; i < n; ++i)
                        gb[i] -= g[i] * av[i] / (bv[i] * bv[i]);
                  });
  }

  Tensor scale(const Tensor& a, double c) {
    Tensor out(a.shape());
    long n = a.numel();
    for (long i = 0; i < n; ++i) out.data()[i] = a.data()[i] * c;
    int an = a.node;
    out.node = push(OpKind::Scale, out.shape(), out.storage(), {an},
                    [an, c, n](Tape& t, const double* g) {
                      if (double* ga = t.grad_buf(an))
                        for (long i = 0; i < n; ++i) ga[i] += g[i] * c;
                    });
    return out;
  }

  Tensor add_scalar(const Tensor& a, double c) {
    Tensor out(a.shape());
    long n = a.numel();
    for (long i = 0; i < n; ++i) out.data()[i] = a.data()[i] + c;
    int an = a.node;
    out.node = push(OpKind::AddScalar, out.shape(), out.storage(), {an},
                    [an, n](Tape& t, const double* g) {
                      if (double* ga = t.grad_buf(an))
                        for (long i = 0; i < n; ++i) ga[i] += g[i];
                    });
    return out;
  }

  // [n x d] + [d], broadcast over rows (FC bias).
  Tensor add_rowvec(const Tensor& m, const Tensor& v) {
    if (m.rank() != 2 || v.numel() != m.dim(1))
      throw DimensionError("add_rowvec: " + shape_str(m.shape()) + " + " +
                           shape_str(v.shape()));
    long r = m.dim(0), d = m.dim(1);
    Tensor out({r, d});
    for (long i = 0; i < r; ++i)
      for (long j = 0; j < d; ++j) out.data()[i * d + j] = m.data()[i * d + j] + v.data()[j];
    int mn = m.node, vn = v.node;
    out.node = push(OpKind::AddRowVec, out.shape(), out.storage(), {mn, vn},
                    [mn, vn, r, d](Tape& t, const double* g) {
                      if (double* gm = t.grad_buf(mn))
                        for (long i = 0; i < r * d; ++i) gm[i] += g[i];
                      if (double* gv = t.grad_buf(vn))
                        for (long i = 0; i < r; ++i)
                          for (long j = 0; j < d; ++j) gv[j] += g[i * d + j];
                    });
    return out;
  }

  Tensor negate(const Tensor& a) { return scale(a, -1.0); }

  Tensor relu(const Tensor& a) {
    return unary(OpKind::Relu, a, [](double x) { return x > 0 ? x : 0.0; },
                 [](double x, double) { return x > 0 ? 1.0 : 0.0; });
  }

  Tensor tanh(const Tensor& a) {
    return unary(OpKind::Tanh, a, [](double x) { return std::tanh(x); },
                 [](double, double y) { return 1.0 - y * y; });
  }

  Tensor softplus(const Tensor& a) {
    return unary(OpKind::Softplus, a,
                 [](double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); },
                 [](double x, double) { return 1.0 / (1.0 + std::exp(-x)); });
  }

  Tensor exp(const Tensor& a) {
    return unary(OpKind::Exp, a, [](double x) { return std::exp(x); },
                 [](double, double y) { return y; });
  }

  Tensor log(const Tensor& a) {
    for (long i = 0; i < a.numel(); ++i)
      if (!(a.data()[i] > 0.0))
        throw DomainError("log: non-positive input " + std::to_string(a.data()[i]) +
                          " at index " + std::to_string(i));
    return unary(OpKind::Log, a, [](double x) { return std::log(x); },
                 [](double x, double) { return 1.0 / x; });
  }

  // ---- reductions ----

  Tensor sum(const Tensor& a) { return reduce_full(a, false); }
  Tensor mean(const Tensor& a) { return reduce_full(a, true); }

  Tensor sum_axis(const Tensor& a, long axis) { return reduce_axis(a, axis, false); }
  Tensor mean_axis(const Tensor& a, long axis) { return reduce_axis(a, axis, true); }

  // Max-subtracted softmax along `axis`.
  Tensor softmax(const Tensor& a, long axis) {
    if (axis < 0 || axis >= a.rank())
      throw DimensionError("softmax: axis " + std::to_string(axis) + " out of range for " +
                           shape_str(a.shape()));
    auto [outer, n, inner] = axis_split(a.shape(), axis);
    Tensor out(a.shape());
    for (long o = 0; o < outer; ++o)
      for (long in = 0; in < inner; ++in) {
        const double* src = a.data() + o * n * inner + in;
        double* dst = out.data() + o * n * inner + in;
        double mx = src[0];
        for (long i = 1; i < n; ++i) mx = std::max(mx, src[i * inner]);
        double s = 0;
        for (long i = 0; i < n; ++i) s += std::exp(src[i * inner] - mx);
        for (long i = 0; i < n; ++i) dst[i * inner] = std::exp(src[i * inner] - mx) / s;
      }
    int an = a.node;
    auto ys = out.storage();
    out.node = push(OpKind::Softmax, out.shape(), out.storage(), {an},
                    [an, ys, outer, n, inner](Tape& t, const double* g) {
                      double* ga = t.grad_buf(an);
                      if (!ga) return;
                      const double* y = ys->data();
                      for (long o = 0; o < outer; ++o)
                        for (long in = 0; in < inner; ++in) {
                          long base = o * n * inner + in;
                          double dot = 0;
                          for (long i = 0; i < n; ++i)
                            dot += g[base + i * inner] * y[base + i * inner];
                          for (long i = 0; i < n; ++i)
                            ga[base + i * inner] +=
                                (g[base + i * inner] - dot) * y[base + i * inner];
                        }
                    });
    return out;
  }

  // ---- structure ----

  Tensor reshape(const Tensor& a, Shape shape) {
    if (numel_of(shape) != a.numel())
      throw DimensionError("reshape: " + shape_str(a.shape()) + " to " + shape_str(shape));
    Tensor out(std::move(shape), a.storage());
    long n = a.numel();
    int an = a.node;
    out.node = push(OpKind::Reshape, out.shape(), out.storage(), {an},
                    [an, n](Tape& t, const double* g) {
                      if (double* ga = t.grad_buf(an))
                        for (long i = 0; i < n; ++i) ga[i] += g[i];
                    });
    return out;
  }

  Tensor concat(const std::vector<Tensor>& parts, long axis) {
    if (parts.empty()) throw ContractError("concat: no inputs");
    const Shape& s0 = parts[0].shape();
    if (axis < 0 || axis >= static_cast<long>(s0.size()))
      throw DimensionError("concat: axis out of range");
    Shape oshape = s0;
    long total = 0;
    for (const auto& p : parts) {
      if (p.rank() != parts[0].rank())
        throw DimensionError("concat: rank mismatch");
      for (long d = 0; d < p.rank(); ++d)
        if (d != axis && p.dim(d) != s0[d])
          throw DimensionError("concat: shape mismatch " + shape_str(p.shape()) +
                               " vs " + shape_str(s0));
      total += p.dim(axis);
    }
    oshape[axis] = total;
    long outer = 1, inner = 1;
    for (long d = 0; d < axis; ++d) outer *= s0[d];
    for (long d = axis + 1; d < static_cast<long>(s0.size()); ++d) inner *= s0[d];
    Tensor out(oshape);
    std::vector<int> in_nodes;
    std::vector<long> widths;
    long off = 0;
    for (const auto& p : parts) {
      long w = p.dim(axis) * inner;
      for (long o = 0; o < outer; ++o)
        std::copy(p.data() + o * w, p.data() + (o + 1) * w,
                  out.data() + o * total * inner + off);
      in_nodes.push_back(p.node);
      widths.push_back(w);
      off += w;
    }
    long row = total * inner;
    out.node = push(OpKind::Concat, out.shape(), out.storage(), in_nodes,
                    [in_nodes, widths, outer, row](Tape& t, const double* g) {
                      long off = 0;
                      for (size_t i = 0; i < in_nodes.size(); ++i) {
                        if (double* ga = t.grad_buf(in_nodes[i]))
                          for (long o = 0; o < outer; ++o)
                            for (long j = 0; j < widths[i]; ++j)
                              ga[o * widths[i] + j] += g[o * row + off + j];
                        off += widths[i];
                      }
                    });
    return out;
  }

  // ---- backward ----

  // Reverse sweep from a scalar loss. Grad buffers are cleared first, so a
  // second call on the same tape reproduces identical results.
  void backward(const Tensor& loss) {
    if (!loss.is_scalar()) throw ContractError("backward: loss must be scalar");
    if (loss.node < 0) throw ContractError("backward: loss is not on the tape");
    for (auto& nd : nodes_) nd.grad.clear();
    nodes_[loss.node].grad.assign(1, 1.0);
    for (int i = loss.node; i >= 0; --i) {
      Node& nd = nodes_[i];
      if (nd.grad.empty() || !nd.back) continue;
      nd.back(*this, nd.grad.data());
    }
  }

  // Gradient of the last backward() w.r.t. the tensor recorded at `node`.
  Tensor grad(int node) const {
    const Node& nd = nodes_.at(node);
    if (nd.grad.empty()) return Tensor::zeros(nd.shape);
    return Tensor(nd.shape, nd.grad);
  }

  Tensor grad(const Tensor& t) const { return grad(t.node); }

  double* grad_buf(int node) {
    if (node < 0) return nullptr;
    Node& nd = nodes_[node];
    if (nd.grad.empty()) nd.grad.assign(numel_of(nd.shape), 0.0);
    return nd.grad.data();
  }

 private:
  std::vector<Node> nodes_;

  int push(OpKind kind, Shape shape, std::shared_ptr<std::vector<double>> value,
           std::vector<int> inputs, std::function<void(Tape&, const double*)> back) {
    nodes_.push_back(Node{kind, std::move(inputs), std::move(shape), std::move(value),
                          std::move(back), {}});
    return static_cast<int>(nodes_.size()) - 1;
  }

  template <class F, class G>
  Tensor unary(OpKind kind, const Tensor& a, F f, G df) {
    Tensor out(a.shape());
    long n = a.numel();
    for (long i = 0; i < n; ++i) out.data()[i] = f(a.data()[i]);
    int an = a.node;
    auto as = a.storage();
    auto ys = out.storage();
    out.node = push(kind, out.shape(), out.storage(), {an},
                    [an, as, ys, df, n](Tape& t, const double* g) {
                      if (double* ga = t.grad_buf(an))
                        for (long i = 0; i < n; ++i)
                          ga[i] += g[i] * df((*as)[i], (*ys)[i]);
                    });
    return out;
  }

  template <class F, class B>
  Tensor binary(OpKind kind, const Tensor& a, const Tensor& b, F f, B back) {
    if (a.shape() != b.shape())
      throw DimensionError("elementwise: shape mismatch " + shape_str(a.shape()) +
                           " vs " + shape_str(b.shape()));
    Tensor out(a.shape());
    long n = a.numel();
    for (long i = 0; i < n; ++i) out.data()[i] = f(a.data()[i], b.data()[i]);
    int an = a.node, bn = b.node;
    auto as = a.storage(), bs = b.storage();
    out.node = push(kind, out.shape(), out.storage(), {an, bn},
                    [an, bn, as, bs, back, n](Tape& t, const double* g) {
                      back(t, an, bn, n, g, *as, *bs);
                    });
    return out;
  }

  Tensor reduce_full(const Tensor& a, bool take_mean) {
    long n = a.numel();
    double s = 0;
    for (long i = 0; i < n; ++i) s += a.data()[i];
    if (take_mean) s /= static_cast<double>(n);
    Tensor out = Tensor::scalar(s);
    double w = take_mean ? 1.0 / static_cast<double>(n) : 1.0;
    int an = a.node;
    out.node = push(take_mean ? OpKind::Mean : OpKind::Sum, out.shape(), out.storage(),
                    {an}, [an, n, w](Tape& t, const double* g) {
                      if (double* ga = t.grad_buf(an))
                        for (long i = 0; i < n; ++i) ga[i] += g[0] * w;
                    });
    return out;
  }

  Tensor reduce_axis(const Tensor& a, long axis, bool take_mean) {
    if (axis < 0 || axis >= a.rank())
      throw DimensionError("reduce: axis " + std::to_string(axis) + " out of range for " +
                           shape_str(a.shape()));
    auto [outer, n, inner] = axis_split(a.shape(), axis);
    Shape oshape;
    for (long d = 0; d < a.rank(); ++d)
      if (d != axis) oshape.push_back(a.dim(d));
    if (oshape.empty()) oshape = {1};
    Tensor out(oshape);
    double w = take_mean ? 1.0 / static_cast<double>(n) : 1.0;
    for (long o = 0; o < outer; ++o)
      for (long in = 0; in < inner; ++in) {
        double s = 0;
        for (long i = 0; i < n; ++i) s += a.data()[o * n * inner + i * inner + in];
        out.data()[o * inner + in] = s * w;
      }
    int an = a.node;
    out.node = push(take_mean ? OpKind::MeanAxis : OpKind::SumAxis, out.shape(),
                    out.storage(), {an},
                    [an, outer, n, inner, w](Tape& t, const double* g) {
                      if (double* ga = t.grad_buf(an))
                        for (long o = 0; o < outer; ++o)
                          for (long i = 0; i < n; ++i)
                            for (long in = 0; in < inner; ++in)
                              ga[o * n * inner + i * inner + in] += g[o * inner + in] * w;
                    });
    return out;
  }

  static std::tuple<long, long, long> axis_split(const Shape& s, long axis) {
    long outer = 1, inner = 1;
    for (long d = 0; d < axis; ++d) outer *= s[d];
    for (long d = axis + 1; d < static_cast<long>(s.size()); ++d) inner *= s[d];
    return {outer, s[axis], inner};
  }

  static void im2col(const double* signal, long b, long cin, long len, long kk, long pad,
                     std::vector<double>& cols) {
    long bl = b * len;
    cols.assign(cin * kk * bl, 0.0);
    for (long bi = 0; bi < b; ++bi)
      for (long ci = 0; ci < cin; ++ci) {
        const double* src = signal + (bi * cin + ci) * len;
        for (long q = 0; q < kk; ++q) {
          double* dst = cols.data() + (ci * kk + q) * bl + bi * len;
          long shift = q - pad;
          long lo = std::max<long>(0, -shift), hi = std::min(len, len - shift);
          for (long l = lo; l < hi; ++l) dst[l] = src[l + shift];
        }
      }
  }
};

}  // namespace npode::ad
