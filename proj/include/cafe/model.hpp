#pragma once

#include <span>
#include <vector>

#include "cafe/linalg.hpp"
#include "cafe/rng.hpp"

namespace cafe {

// Feed-forward feature extractor plus linear classifier with hand-written
// forward and backward passes.
//
// Conventions used throughout:
//  - batches are matrices with one sample per row;
//  - the classifier is bias-free; row c of the classifier matrix is the
//    weight vector for class c;
//  - gradient functions return descent-form derivatives (d loss / d param)
//    of the batch-summed cross-entropy; training code rescales to the batch
//    mean where it applies them.

enum class Activation { Relu, Tanh, Identity };

struct ModelConfig {
  int input_dim = 0;
  std::vector<int> hidden_dims;  // extractor hidden widths, may be empty
  int feature_dim = 0;           // embedding size
  int num_classes = 0;
  Activation activation = Activation::Relu;

  // extractor layer widths including input and embedding
  std::vector<int> layer_dims() const;
};

// Offsets of every block inside the flat parameter vector. Layout, in order:
// for each extractor layer l: weight matrix (out x in, row-major) then bias
// (out); finally the classifier matrix (num_classes x feature_dim,
// row-major).
struct ParamLayout {
  struct Layer {
    size_t w_off = 0;
    size_t b_off = 0;
    int in = 0;
    int out = 0;
  };
  std::vector<Layer> layers;
  size_t classifier_off = 0;
  int feature_dim = 0;
  int num_classes = 0;
  size_t total = 0;
};

ParamLayout make_layout(const ModelConfig& cfg);

// Full trainable state as one flat vector with structured views.
class ModelParams {
 public:
  ModelParams() = default;
  explicit ModelParams(const ModelConfig& cfg);

  // Draw order: extractor layers in order (weights row-major, normal scaled
  // by 1/sqrt(fan_in); biases zero), then classifier rows (normal,
  // 1/sqrt(feature_dim) scale).
  void init_random(Rng& rng);

  std::span<double> layer_w(int l) { return block(layout_.layers[l].w_off, w_size(l)); }
  std::span<const double> layer_w(int l) const { return block(layout_.layers[l].w_off, w_size(l)); }
  std::span<double> layer_b(int l) { return block(layout_.layers[l].b_off, layout_.layers[l].out); }
  std::span<const double> layer_b(int l) const {
    return block(layout_.layers[l].b_off, layout_.layers[l].out);
  }
  std::span<double> classifier_row(int c) {
    return block(layout_.classifier_off + static_cast<size_t>(c) * layout_.feature_dim,
                 layout_.feature_dim);
  }
  std::span<const double> classifier_row(int c) const {
    return block(layout_.classifier_off + static_cast<size_t>(c) * layout_.feature_dim,
                 layout_.feature_dim);
  }
  std::span<double> classifier_block() {
    return block(layout_.classifier_off,
                 static_cast<size_t>(layout_.num_classes) * layout_.feature_dim);
  }
  std::span<const double> classifier_block() const {
    return block(layout_.classifier_off,
                 static_cast<size_t>(layout_.num_classes) * layout_.feature_dim);
  }

  // classifier matrix copied out as rows (one per class)
  Matrix classifier_matrix() const;
  void set_classifier_matrix(const Matrix& phi);

  const ParamLayout& layout() const { return layout_; }
  size_t size() const { return values.size(); }
  int num_layers() const { return static_cast<int>(layout_.layers.size()); }

  Vec values;

 private:
  size_t w_size(int l) const {
    return static_cast<size_t>(layout_.layers[l].in) * layout_.layers[l].out;
  }
  std::span<double> block(size_t off, size_t n) { return {values.data() + off, n}; }
  std::span<const double> block(size_t off, size_t n) const { return {values.data() + off, n}; }

  ParamLayout layout_;
};

// Activations recorded during a forward pass, needed by the backward pass.
struct ForwardCache {
  Matrix input;
  std::vector<Matrix> pre;   // pre-activation per layer
  std::vector<Matrix> post;  // post-activation per layer; back() is the embedding batch
  bool filled = false;
};

// Embeddings for a batch; every layer applies the configured activation,
// including the last. Deterministic: fixed evaluation order, no reductions
// whose order depends on thread count.
Matrix forward_features(const ModelConfig& cfg, const ModelParams& params, const Matrix& x,
                        ForwardCache* cache = nullptr);

// Raw class scores: z(i, c) = <classifier row c, embedding i>.
Matrix logits(const ModelParams& params, const Matrix& h);

// Row-wise softmax with max-subtraction so large logits cannot overflow.
Matrix softmax(const Matrix& z);

// Mean negative log-likelihood over the batch; probabilities are clamped
// below at 1e-12 before the log.
double cross_entropy(const Matrix& probs, const std::vector<int>& labels);

// residual(i, c) = indicator{label_i == c} - probs(i, c); rows sum to zero
Matrix batch_residual(const Matrix& probs, const std::vector<int>& labels);

// per-class column sums of a residual matrix
Vec residual_class_sums(const Matrix& residual);

// Per-sample derivative of the batch-summed loss with respect to the
// embedding: row i equals sum_c (probs - indicator) * classifier row c.
Matrix grad_wrt_features(const Matrix& residual, const ModelParams& params);

// Per-class classifier gradient in descent form:
// row c equals sum_i (probs(i,c) - indicator) * embedding_i.
Matrix grad_wrt_classifier(const Matrix& residual, const Matrix& h);

// Sign-flipped convention used when updates are reported as
// sum_{positives}(1 - p) h - sum_{negatives} p h; equal to the negated
// descent form. Kept as an explicit converter so both conventions stay
// testable against the same finite-difference ground truth.
Matrix classifier_grad_ascent_form(const Matrix& descent);

// Chain-rule pass through the extractor. Returns a flat gradient vector over
// the full layout (classifier block left at zero). Throws UsageError when the
// cache was not filled by forward_features.
Vec backprop_extractor(const ModelConfig& cfg, const ModelParams& params,
                       const ForwardCache& cache, const Matrix& d_embeddings);

double apply_activation(Activation a, double x);
double activation_derivative(Activation a, double pre, double post);

}  // namespace cafe
