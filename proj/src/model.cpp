#include "cafe/model.hpp"

#include <algorithm>
#include <cmath>

#include "cafe/errors.hpp"

namespace cafe {

std::vector<int> ModelConfig::layer_dims() const {
  std::vector<int> dims;
  dims.push_back(input_dim);
  for (int hdim : hidden_dims) dims.push_back(hdim);
  dims.push_back(feature_dim);
  return dims;
}

ParamLayout make_layout(const ModelConfig& cfg) {
  if (cfg.input_dim <= 0 || cfg.feature_dim <= 0 || cfg.num_classes <= 0)
    throw ConfigError("model dimensions must be positive");
  for (int hdim : cfg.hidden_dims)
    if (hdim <= 0) throw ConfigError("hidden layer width must be positive");

  ParamLayout layout;
  layout.feature_dim = cfg.feature_dim;
  layout.num_classes = cfg.num_classes;
  auto dims = cfg.layer_dims();
  size_t off = 0;
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    ParamLayout::Layer layer;
    layer.in = dims[l];
    layer.out = dims[l + 1];
    layer.w_off = off;
    off += static_cast<size_t>(layer.in) * layer.out;
    layer.b_off = off;
    off += layer.out;
    layout.layers.push_back(layer);
  }
  layout.classifier_off = off;
  layout.total = off + static_cast<size_t>(cfg.num_classes) * cfg.feature_dim;
  return layout;
}

ModelParams::ModelParams(const ModelConfig& cfg) : layout_(make_layout(cfg)) {
  values.assign(layout_.total, 0.0);
}

void ModelParams::init_random(Rng& rng) {
  for (size_t l = 0; l < layout_.layers.size(); ++l) {
    const auto& layer = layout_.layers[l];
    double gain = std::sqrt(1.0 / layer.in);
    auto w = layer_w(static_cast<int>(l));
    for (double& v : w) v = gain * rng.normal();
    set_zero(layer_b(static_cast<int>(l)));
  }
  double gain = std::sqrt(1.0 / layout_.feature_dim);
  auto phi = classifier_block();
  for (double& v : phi) v = gain * rng.normal();
}

Matrix ModelParams::classifier_matrix() const {
  Matrix phi(layout_.num_classes, layout_.feature_dim);
  auto blockview = classifier_block();
  std::copy(blockview.begin(), blockview.end(), phi.data.begin());
  return phi;
}

void ModelParams::set_classifier_matrix(const Matrix& phi) {
  if (phi.rows != layout_.num_classes || phi.cols != layout_.feature_dim)
    throw ConfigError("classifier matrix shape mismatch");
  auto blockview = classifier_block();
  std::copy(phi.data.begin(), phi.data.end(), blockview.begin());
}

double apply_activation(Activation a, double x) {
  switch (a) {
    case Activation::Relu:
      return x > 0.0 ? x : 0.0;
    case Activation::Tanh:
      return std::tanh(x);
    case Activation::Identity:
      return x;
  }
  return x;
}

double activation_derivative(Activation a, double pre, double post) {
  switch (a) {
    case Activation::Relu:
      return pre > 0.0 ? 1.0 : 0.0;
    case Activation::Tanh:
      return 1.0 - post * post;
    case Activation::Identity:
      return 1.0;
  }
  return 1.0;
}

Matrix forward_features(const ModelConfig& cfg, const ModelParams& params, const Matrix& x,
                        ForwardCache* cache) {
  if (x.cols != cfg.input_dim) throw ConfigError("input feature dimension mismatch");
  const int num_layers = params.num_layers();
  if (cache) {
    cache->input = x;
    cache->pre.assign(num_layers, Matrix());
    cache->post.assign(num_layers, Matrix());
  }

  Matrix current = x;
  for (int l = 0; l < num_layers; ++l) {
    const auto& layer = params.layout().layers[l];
    Matrix pre(current.rows, layer.out);
    auto w = params.layer_w(l);
    auto b = params.layer_b(l);
    for (int i = 0; i < current.rows; ++i) {
      auto in_row = current.row(i);
      for (int o = 0; o < layer.out; ++o) {
        double s = b[o];
        const double* wrow = w.data() + static_cast<size_t>(o) * layer.in;
        for (int j = 0; j < layer.in; ++j) s += wrow[j] * in_row[j];
        pre(i, o) = s;
      }
    }
    Matrix post(pre.rows, pre.cols);
    for (size_t i = 0; i < pre.data.size(); ++i)
      post.data[i] = apply_activation(cfg.activation, pre.data[i]);
    if (cache) {
      cache->pre[l] = pre;
      cache->post[l] = post;
    }
    current = std::move(post);
  }
  if (cache) cache->filled = true;
  return current;
}

Matrix logits(const ModelParams& params, const Matrix& h) {
  const auto& layout = params.layout();
  if (h.cols != layout.feature_dim) throw ConfigError("embedding dimension mismatch");
  Matrix z(h.rows, layout.num_classes);
  for (int i = 0; i < h.rows; ++i) {
    auto hrow = h.row(i);
    for (int c = 0; c < layout.num_classes; ++c) z(i, c) = dot(params.classifier_row(c), hrow);
  }
  return z;
}

Matrix softmax(const Matrix& z) {
  Matrix p(z.rows, z.cols);
  for (int i = 0; i < z.rows; ++i) {
    double zmax = z(i, 0);
    for (int c = 1; c < z.cols; ++c) zmax = std::max(zmax, z(i, c));
    double sum = 0.0;
    for (int c = 0; c < z.cols; ++c) {
      double e = std::exp(z(i, c) - zmax);
      p(i, c) = e;
      sum += e;
    }
    for (int c = 0; c < z.cols; ++c) p(i, c) /= sum;
  }
  return p;
}

double cross_entropy(const Matrix& probs, const std::vector<int>& labels) {
  double total = 0.0;
  for (int i = 0; i < probs.rows; ++i) {
    double py = std::max(probs(i, labels[static_cast<size_t>(i)]), 1e-12);
    total -= std::log(py);
  }
  return total / probs.rows;
}

Matrix batch_residual(const Matrix& probs, const std::vector<int>& labels) {
  Matrix r(probs.rows, probs.cols);
  for (int i = 0; i < probs.rows; ++i)
    for (int c = 0; c < probs.cols; ++c)
      r(i, c) = (labels[static_cast<size_t>(i)] == c ? 1.0 : 0.0) - probs(i, c);
  return r;
}

Vec residual_class_sums(const Matrix& residual) {
  Vec sums(residual.cols, 0.0);
  for (int i = 0; i < residual.rows; ++i)
    for (int c = 0; c < residual.cols; ++c) sums[static_cast<size_t>(c)] += residual(i, c);
  return sums;
}

Matrix grad_wrt_features(const Matrix& residual, const ModelParams& params) {
  const auto& layout = params.layout();
  Matrix g(residual.rows, layout.feature_dim);
  for (int i = 0; i < residual.rows; ++i) {
    auto grow = g.row(i);
    for (int c = 0; c < layout.num_classes; ++c)
      axpy(-residual(i, c), params.classifier_row(c), grow);
  }
  return g;
}

Matrix grad_wrt_classifier(const Matrix& residual, const Matrix& h) {
  Matrix zeta(residual.cols, h.cols);
  for (int c = 0; c < residual.cols; ++c) {
    auto zrow = zeta.row(c);
    for (int i = 0; i < residual.rows; ++i) axpy(-residual(i, c), h.row(i), zrow);
  }
  return zeta;
}

Matrix classifier_grad_ascent_form(const Matrix& descent) {
  Matrix out = descent;
  for (double& v : out.data) v = -v;
  return out;
}

Vec backprop_extractor(const ModelConfig& cfg, const ModelParams& params,
                       const ForwardCache& cache, const Matrix& d_embeddings) {
  if (!cache.filled) throw UsageError("backprop_extractor: forward cache not filled");
  const int num_layers = params.num_layers();
  Vec grad(params.size(), 0.0);
  const ParamLayout& layout = params.layout();

  // delta holds dL/d(post-activation) of the current layer
  Matrix delta = d_embeddings;
  for (int l = num_layers - 1; l >= 0; --l) {
    const auto& layer = layout.layers[l];
    const Matrix& pre = cache.pre[static_cast<size_t>(l)];
    const Matrix& post = cache.post[static_cast<size_t>(l)];
    const Matrix& input = (l == 0) ? cache.input : cache.post[static_cast<size_t>(l) - 1];

    Matrix dpre(delta.rows, delta.cols);
    for (int i = 0; i < delta.rows; ++i)
      for (int o = 0; o < delta.cols; ++o)
        dpre(i, o) = delta(i, o) * activation_derivative(cfg.activation, pre(i, o), post(i, o));

    double* wgrad = grad.data() + layer.w_off;
    double* bgrad = grad.data() + layer.b_off;
    for (int i = 0; i < dpre.rows; ++i) {
      auto in_row = input.row(i);
      for (int o = 0; o < layer.out; ++o) {
        double d = dpre(i, o);
        double* wrow = wgrad + static_cast<size_t>(o) * layer.in;
        for (int j = 0; j < layer.in; ++j) wrow[j] += d * in_row[j];
        bgrad[o] += d;
      }
    }

    if (l > 0) {
      Matrix next(dpre.rows, layer.in);
      auto w = params.layer_w(l);
      for (int i = 0; i < dpre.rows; ++i) {
        auto nrow = next.row(i);
        for (int o = 0; o < layer.out; ++o) {
          const double* wrow = w.data() + static_cast<size_t>(o) * layer.in;
          axpy(dpre(i, o), std::span<const double>(wrow, static_cast<size_t>(layer.in)), nrow);
        }
      }
      delta = std::move(next);
    }
  }
  return grad;
}

}  // namespace cafe
