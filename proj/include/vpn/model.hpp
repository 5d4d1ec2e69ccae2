#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "vpn/kernels.hpp"

namespace vpn {

struct Shape {
  int h = 0;
  int w = 0;
  int c = 0;

  int flat_size() const { return h * w * c; }
  bool operator==(const Shape&) const = default;
};

// Flattening is row-major, channel-last: index = (r*W + c)*C + ch.
inline int flat_index(const Shape& s, int r, int c, int ch) {
  return (r * s.w + c) * s.c + ch;
}

struct Image {
  Shape shape;
  std::vector<double> pix;  // shape.flat_size() values in [0,1]
};

struct DenseLayer {
  Mat weights;               // out x in
  std::vector<double> bias;  // out
};

struct Conv2DLayer {
  // kernels[k][ci][u][v] flattened as ((k*in_ch + ci)*kh + u)*kw + v
  std::vector<double> kernels;
  int out_ch = 0, in_ch = 0, kh = 0, kw = 0;
  std::vector<double> bias;  // out_ch
  int stride = 1;
  int padding = 0;

  double kernel_at(int k, int ci, int u, int v) const {
    return kernels[((static_cast<size_t>(k) * in_ch + ci) * kh + u) * kw + v];
  }
};

struct ReluLayer {};
struct FlattenLayer {};

using LayerSpec = std::variant<DenseLayer, Conv2DLayer, ReluLayer, FlattenLayer>;

struct Network {
  Shape input_shape;
  int label_count = 0;
  std::vector<LayerSpec> layers;
};

using Logits = std::vector<double>;

struct Prediction {
  int label = 0;
  double margin = 0.0;  // logit[label] - max other logit, >= 0
};

// Affine+ReLU chain equivalent to the source network; conv and flatten
// expanded away. Last stage never carries relu_after.
struct AffineStage {
  Mat weights;
  std::vector<double> bias;
  bool relu_after = false;
};

struct AffineNetwork {
  std::vector<AffineStage> stages;
  int input_dim = 0;
};

class model_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parses and validates the JSON model format (see model-format.md).
// Throws model_error naming the offending layer on dimension mismatch,
// malformed syntax or non-finite weights.
Network load_network(std::istream& source);
Network load_network_file(const std::string& path);

// Re-checks all Network invariants; throws model_error. Used both by the
// loader and by tests that build networks programmatically.
void validate_network(const Network& net);

Logits forward(const Network& net, const Image& image);
Prediction predict(const Network& net, const Image& image);
Prediction predict_logits(const Logits& logits);

AffineNetwork lower_to_affine(const Network& net);
std::vector<double> affine_eval(const AffineNetwork& net, const std::vector<double>& input);

// Predicted labels for a batch of images; OpenMP across images when
// threads > 1, with the serial path as reference.
std::vector<int> predict_labels_serial(const Network& net, const std::vector<Image>& images);
std::vector<int> predict_labels(const Network& net, const std::vector<Image>& images,
                                int threads = 1);

}  // namespace vpn
