#pragma once

#include "skewscore/rng.hpp"
#include "skewscore/types.hpp"

#include <cmath>
#include <vector>

namespace skewscore {

enum class Activation { Tanh, Softplus };

namespace detail {

struct ActivationFns {
  Activation kind;

  double value(double a) const { return kind == Activation::Tanh ? std::tanh(a) : std::log1p(std::exp(-std::abs(a))) + std::max(a, 0.0); }
  double first(double a, double h) const {
    if (kind == Activation::Tanh) return 1.0 - h * h;
    return 1.0 / (1.0 + std::exp(-a));
  }
  double second(double a, double h) const {
    if (kind == Activation::Tanh) return -2.0 * h * (1.0 - h * h);
    const double q = 1.0 / (1.0 + std::exp(-a));
    return q * (1.0 - q);
  }
};

}  // namespace detail

/// Fully connected network in -> hidden... -> out with a linear output layer.
/// Batches are stored column-wise (features x batch).
class Mlp {
 public:
  struct Layer {
    Matrix w;
    Vector b;
  };

  /// Forward activations of one batch, plus optional tangents along a direction.
  struct Trace {
    std::vector<Matrix> pre;   // a_l
    std::vector<Matrix> post;  // h_l (post[0] is the input)
    std::vector<Matrix> dpre;  // da_l
    std::vector<Matrix> dpost; // dh_l (dpost[0] is the direction)
    Matrix out, dout;
  };

  Mlp() = default;

  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialization for weights and biases.
  Mlp(int in, const std::vector<int>& hidden, int out, Activation act, Rng& rng) : act_{act} {
    require(in >= 1 && out >= 1, "Mlp: input and output widths must be positive");
    int prev = in;
    std::vector<int> widths = hidden;
    widths.push_back(out);
    for (int w : widths) {
      require(w >= 1, "Mlp: layer widths must be positive");
      const double bound = 1.0 / std::sqrt(static_cast<double>(prev));
      Layer l{Matrix(w, prev), Vector(w)};
      for (Eigen::Index i = 0; i < l.w.size(); ++i) l.w.data()[i] = uniform(rng, -bound, bound);
      for (Eigen::Index i = 0; i < l.b.size(); ++i) l.b(i) = uniform(rng, -bound, bound);
      layers_.push_back(std::move(l));
      prev = w;
    }
  }

  std::vector<Layer>& layers() noexcept { return layers_; }
  const std::vector<Layer>& layers() const noexcept { return layers_; }
  int depth() const noexcept { return static_cast<int>(layers_.size()); }

  Matrix forward(const Eigen::Ref<const Matrix>& x) const {
    Matrix h = x;
    for (int l = 0; l < depth(); ++l) {
      Matrix a = (layers_[l].w * h).colwise() + layers_[l].b;
      if (l + 1 < depth())
        h = a.unaryExpr([&](double t) { return fns().value(t); });
      else
        h = std::move(a);
    }
    return h;
  }

  /// Forward pass that keeps every intermediate; with `direction` also pushes a tangent through.
  Trace trace(const Eigen::Ref<const Matrix>& x, const Matrix* direction = nullptr) const {
    Trace t;
    t.post.push_back(x);
    if (direction) t.dpost.push_back(*direction);
    for (int l = 0; l < depth(); ++l) {
      const Layer& L = layers_[l];
      Matrix a = (L.w * t.post.back()).colwise() + L.b;
      Matrix da;
      if (direction) da = L.w * t.dpost.back();
      if (l + 1 < depth()) {
        Matrix h = a.unaryExpr([&](double v) { return fns().value(v); });
        if (direction) {
          Matrix dh(h.rows(), h.cols());
          for (Eigen::Index i = 0; i < h.size(); ++i) dh.data()[i] = fns().first(a.data()[i], h.data()[i]) * da.data()[i];
          t.dpost.push_back(std::move(dh));
          t.dpre.push_back(std::move(da));
        }
        t.pre.push_back(std::move(a));
        t.post.push_back(std::move(h));
      } else {
        t.out = std::move(a);
        if (direction) t.dout = std::move(da);
      }
    }
    return t;
  }

  /// Backpropagates output cotangents g_out (and g_dout when the trace carries tangents)
  /// and accumulates parameter gradients into `grads` (same layout as layers()).
  void backward(const Trace& t, const Matrix& g_out, const Matrix* g_dout, std::vector<Layer>& grads) const {
    const bool tangent = g_dout != nullptr;
    Matrix g_a = g_out;
    Matrix g_da;
    if (tangent) g_da = *g_dout;
    for (int l = depth() - 1; l >= 0; --l) {
      const Layer& L = layers_[l];
      const Matrix& h_prev = t.post[static_cast<std::size_t>(l)];
      grads[l].w.noalias() += g_a * h_prev.transpose();
      grads[l].b += g_a.rowwise().sum();
      if (tangent) grads[l].w.noalias() += g_da * t.dpost[static_cast<std::size_t>(l)].transpose();
      if (l == 0) break;
      Matrix g_h = L.w.transpose() * g_a;
      Matrix g_dh;
      if (tangent) g_dh = L.w.transpose() * g_da;
      // Step back through h = act(a) and dh = act'(a) * da.
      const Matrix& a = t.pre[static_cast<std::size_t>(l - 1)];
      const Matrix& h = t.post[static_cast<std::size_t>(l)];
      Matrix next_g_a(a.rows(), a.cols());
      Matrix next_g_da;
      if (tangent) next_g_da.resize(a.rows(), a.cols());
      const Matrix* da = tangent ? &t.dpre[static_cast<std::size_t>(l - 1)] : nullptr;
      for (Eigen::Index i = 0; i < a.size(); ++i) {
        const double av = a.data()[i], hv = h.data()[i];
        const double d1 = fns().first(av, hv);
        double ga = g_h.data()[i] * d1;
        if (tangent) {
          ga += g_dh.data()[i] * fns().second(av, hv) * da->data()[i];
          next_g_da.data()[i] = g_dh.data()[i] * d1;
        }
        next_g_a.data()[i] = ga;
      }
      g_a = std::move(next_g_a);
      if (tangent) g_da = std::move(next_g_da);
    }
  }

  std::vector<Layer> zero_like() const {
    std::vector<Layer> z;
    for (const auto& l : layers_) z.push_back({Matrix::Zero(l.w.rows(), l.w.cols()), Vector::Zero(l.b.size())});
    return z;
  }

 private:
  detail::ActivationFns fns() const { return {act_}; }

  std::vector<Layer> layers_;
  Activation act_ = Activation::Tanh;
};

/// Adam over the parameter list of an Mlp.
class Adam {
 public:
  Adam(const Mlp& net, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), b1_(beta1), b2_(beta2), eps_(eps), m_(net.zero_like()), v_(net.zero_like()) {}

  void step(Mlp& net, const std::vector<Mlp::Layer>& grads) {
    ++t_;
    const double c1 = 1.0 - std::pow(b1_, t_), c2 = 1.0 - std::pow(b2_, t_);
    auto update = [&](auto& p, const auto& g, auto& m, auto& v) {
      m = b1_ * m + (1.0 - b1_) * g;
      v = b2_ * v + (1.0 - b2_) * g.cwiseProduct(g);
      p.array() -= lr_ * (m.array() / c1) / ((v.array() / c2).sqrt() + eps_);
    };
    for (std::size_t l = 0; l < grads.size(); ++l) {
      update(net.layers()[l].w, grads[l].w, m_[l].w, v_[l].w);
      update(net.layers()[l].b, grads[l].b, m_[l].b, v_[l].b);
    }
  }

 private:
  double lr_, b1_, b2_, eps_;
  int t_ = 0;
  std::vector<Mlp::Layer> m_, v_;
};

}  // namespace skewscore
