#include "vpn/model.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "vpn/log.hpp"

namespace vpn {

using nlohmann::json;

namespace {

std::string layer_tag(size_t index) { return "layer " + std::to_string(index); }

// Walks the layer chain and returns the flat logit count; throws on the
// first inconsistency, naming the layer.
int check_layer_chain(const Network& net) {
  if (net.input_shape.h < 1 || net.input_shape.w < 1 || net.input_shape.c < 1)
    throw model_error("input_shape dimensions must be positive");
  Shape cur = net.input_shape;
  bool flat = false;
  int flat_dim = cur.flat_size();

  for (size_t li = 0; li < net.layers.size(); ++li) {
    const LayerSpec& layer = net.layers[li];
    if (const auto* dense = std::get_if<DenseLayer>(&layer)) {
      const int in = flat ? flat_dim : cur.flat_size();
      if (dense->weights.cols != in)
        throw model_error(layer_tag(li) + ": dense expects " + std::to_string(in) +
                          " inputs, weights have " + std::to_string(dense->weights.cols) +
                          " columns (dimension mismatch)");
      if (static_cast<int>(dense->bias.size()) != dense->weights.rows)
        throw model_error(layer_tag(li) + ": bias length " + std::to_string(dense->bias.size()) +
                          " does not match " + std::to_string(dense->weights.rows) + " rows");
      flat = true;
      flat_dim = dense->weights.rows;
    } else if (const auto* conv = std::get_if<Conv2DLayer>(&layer)) {
      if (flat)
        throw model_error(layer_tag(li) + ": conv2d after flattened activations");
      if (conv->stride < 1) throw model_error(layer_tag(li) + ": stride must be >= 1");
      if (conv->padding < 0) throw model_error(layer_tag(li) + ": padding must be >= 0");
      if (conv->in_ch != cur.c)
        throw model_error(layer_tag(li) + ": kernel expects " + std::to_string(conv->in_ch) +
                          " input channels, activations have " + std::to_string(cur.c) +
                          " (dimension mismatch)");
      const int ph = cur.h + 2 * conv->padding;
      const int pw = cur.w + 2 * conv->padding;
      if (conv->kh > ph || conv->kw > pw)
        throw model_error(layer_tag(li) + ": kernel larger than padded input");
      cur.h = (ph - conv->kh) / conv->stride + 1;
      cur.w = (pw - conv->kw) / conv->stride + 1;
      cur.c = conv->out_ch;
      if (static_cast<int>(conv->bias.size()) != conv->out_ch)
        throw model_error(layer_tag(li) + ": bias length does not match output channels");
    } else if (std::holds_alternative<FlattenLayer>(layer)) {
      if (flat) throw model_error(layer_tag(li) + ": flatten after flattened activations");
      flat = true;
      flat_dim = cur.flat_size();
    }
    // ReLU: shape preserved, nothing to check.
  }
  return flat ? flat_dim : cur.flat_size();
}

void check_finite(const std::vector<double>& vals, size_t li) {
  for (double v : vals)
    if (!std::isfinite(v))
      throw model_error(layer_tag(li) + ": non-finite weight");
}

Mat parse_dense_weights(const json& jw, size_t li) {
  if (!jw.is_array() || jw.empty() || !jw[0].is_array())
    throw model_error(layer_tag(li) + ": dense weights must be a 2-d array");
  Mat w(static_cast<int>(jw.size()), static_cast<int>(jw[0].size()));
  for (size_t r = 0; r < jw.size(); ++r) {
    if (static_cast<int>(jw[r].size()) != w.cols)
      throw model_error(layer_tag(li) + ": ragged weight rows");
    for (size_t c = 0; c < jw[r].size(); ++c) w.at(static_cast<int>(r), static_cast<int>(c)) =
        jw[r][c].get<double>();
  }
  return w;
}

LayerSpec parse_layer(const json& jl, size_t li) {
  const std::string type = jl.at("type").get<std::string>();
  if (type == "dense") {
    DenseLayer dense;
    dense.weights = parse_dense_weights(jl.at("weights"), li);
    dense.bias = jl.at("bias").get<std::vector<double>>();
    check_finite(dense.weights.a, li);
    check_finite(dense.bias, li);
    return dense;
  }
  if (type == "conv2d") {
    Conv2DLayer conv;
    const json& jk = jl.at("kernels");
    conv.out_ch = static_cast<int>(jk.size());
    if (conv.out_ch == 0) throw model_error(layer_tag(li) + ": empty kernel tensor");
    conv.in_ch = static_cast<int>(jk[0].size());
    conv.kh = static_cast<int>(jk[0][0].size());
    conv.kw = static_cast<int>(jk[0][0][0].size());
    conv.kernels.reserve(static_cast<size_t>(conv.out_ch) * conv.in_ch * conv.kh * conv.kw);
    for (const auto& jc : jk) {
      if (static_cast<int>(jc.size()) != conv.in_ch)
        throw model_error(layer_tag(li) + ": ragged kernel tensor");
      for (const auto& ju : jc) {
        if (static_cast<int>(ju.size()) != conv.kh)
          throw model_error(layer_tag(li) + ": ragged kernel tensor");
        for (const auto& jv : ju) {
          if (static_cast<int>(jv.size()) != conv.kw)
            throw model_error(layer_tag(li) + ": ragged kernel tensor");
          for (const auto& jx : jv) conv.kernels.push_back(jx.get<double>());
        }
      }
    }
    conv.bias = jl.at("bias").get<std::vector<double>>();
    conv.stride = jl.value("stride", 1);
    conv.padding = jl.value("padding", 0);
    check_finite(conv.kernels, li);
    check_finite(conv.bias, li);
    return conv;
  }
  if (type == "relu") return ReluLayer{};
  if (type == "flatten") return FlattenLayer{};
  throw model_error(layer_tag(li) + ": unknown layer type '" + type + "'");
}

}  // namespace

void validate_network(const Network& net) {
  if (net.label_count < 2) throw model_error("label_count must be at least 2");
  const int out = check_layer_chain(net);
  if (out != net.label_count)
    throw model_error("final layer outputs " + std::to_string(out) + " values, label_count is " +
                      std::to_string(net.label_count));
}

Network load_network(std::istream& source) {
  json j;
  try {
    j = json::parse(source);
  } catch (const json::exception& e) {
    throw model_error(std::string("malformed model file: ") + e.what());
  }
  try {
    Network net;
    const auto shape = j.at("input_shape").get<std::vector<int>>();
    if (shape.size() != 3) throw model_error("input_shape must be [H,W,C]");
    net.input_shape = Shape{shape[0], shape[1], shape[2]};
    net.label_count = j.at("label_count").get<int>();
    const json& jlayers = j.at("layers");
    for (size_t li = 0; li < jlayers.size(); ++li) net.layers.push_back(parse_layer(jlayers[li], li));
    validate_network(net);
    return net;
  } catch (const json::exception& e) {
    throw model_error(std::string("malformed model file: ") + e.what());
  }
}

Network load_network_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw model_error("cannot open model file: " + path);
  Network net = load_network(in);
  logf(LogLevel::info, "loaded model %s: %zu layers, %d labels", path.c_str(),
       net.layers.size(), net.label_count);
  return net;
}

namespace {

std::vector<double> conv_forward(const Conv2DLayer& conv, const std::vector<double>& in,
                                 const Shape& is, Shape& os) {
  os.h = (is.h + 2 * conv.padding - conv.kh) / conv.stride + 1;
  os.w = (is.w + 2 * conv.padding - conv.kw) / conv.stride + 1;
  os.c = conv.out_ch;
  std::vector<double> out(static_cast<size_t>(os.flat_size()));
  for (int orow = 0; orow < os.h; ++orow)
    for (int ocol = 0; ocol < os.w; ++ocol)
      for (int k = 0; k < conv.out_ch; ++k) {
        double acc = conv.bias[k];
        for (int ci = 0; ci < conv.in_ch; ++ci)
          for (int u = 0; u < conv.kh; ++u) {
            const int ir = orow * conv.stride - conv.padding + u;
            if (ir < 0 || ir >= is.h) continue;
            for (int v = 0; v < conv.kw; ++v) {
              const int ic = ocol * conv.stride - conv.padding + v;
              if (ic < 0 || ic >= is.w) continue;
              acc += conv.kernel_at(k, ci, u, v) * in[flat_index(is, ir, ic, ci)];
            }
          }
        out[flat_index(os, orow, ocol, k)] = acc;
      }
  return out;
}

}  // namespace

Logits forward(const Network& net, const Image& image) {
  if (!(image.shape == net.input_shape))
    throw model_error("image shape does not match the network input shape");
  std::vector<double> act = image.pix;
  Shape cur = net.input_shape;
  bool flat = false;

  for (const LayerSpec& layer : net.layers) {
    if (const auto* dense = std::get_if<DenseLayer>(&layer)) {
      std::vector<double> out(static_cast<size_t>(dense->weights.rows));
      kernels::matvec_serial(dense->weights, act.data(), dense->bias.data(), out.data());
      act = std::move(out);
      flat = true;
    } else if (const auto* conv = std::get_if<Conv2DLayer>(&layer)) {
      Shape os;
      act = conv_forward(*conv, act, cur, os);
      cur = os;
    } else if (std::holds_alternative<ReluLayer>(layer)) {
      kernels::relu_inplace(act.data(), static_cast<int>(act.size()));
    } else {
      flat = true;  // flatten: storage is already row-major channel-last
    }
  }
  (void)flat;
  return act;
}

Prediction predict_logits(const Logits& logits) {
  int best = 0;
  for (int j = 1; j < static_cast<int>(logits.size()); ++j)
    if (logits[j] > logits[best]) best = j;
  double other = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < static_cast<int>(logits.size()); ++j)
    if (j != best && logits[j] > other) other = logits[j];
  return Prediction{best, logits[best] - other};
}

Prediction predict(const Network& net, const Image& image) {
  return predict_logits(forward(net, image));
}

AffineNetwork lower_to_affine(const Network& net) {
  AffineNetwork out;
  out.input_dim = net.input_shape.flat_size();
  Shape cur = net.input_shape;

  auto push_identity = [&] {
    const int n = out.stages.empty() ? out.input_dim : out.stages.back().weights.rows;
    AffineStage stage;
    stage.weights = Mat(n, n);
    for (int i = 0; i < n; ++i) stage.weights.at(i, i) = 1.0;
    stage.bias.assign(n, 0.0);
    out.stages.push_back(std::move(stage));
  };

  for (const LayerSpec& layer : net.layers) {
    if (const auto* dense = std::get_if<DenseLayer>(&layer)) {
      out.stages.push_back(AffineStage{dense->weights, dense->bias, false});
    } else if (const auto* conv = std::get_if<Conv2DLayer>(&layer)) {
      Shape os;
      os.h = (cur.h + 2 * conv->padding - conv->kh) / conv->stride + 1;
      os.w = (cur.w + 2 * conv->padding - conv->kw) / conv->stride + 1;
      os.c = conv->out_ch;
      AffineStage stage;
      stage.weights = Mat(os.flat_size(), cur.flat_size());
      stage.bias.assign(static_cast<size_t>(os.flat_size()), 0.0);
      for (int orow = 0; orow < os.h; ++orow)
        for (int ocol = 0; ocol < os.w; ++ocol)
          for (int k = 0; k < conv->out_ch; ++k) {
            const int r = flat_index(os, orow, ocol, k);
            stage.bias[r] = conv->bias[k];
            for (int ci = 0; ci < conv->in_ch; ++ci)
              for (int u = 0; u < conv->kh; ++u) {
                const int ir = orow * conv->stride - conv->padding + u;
                if (ir < 0 || ir >= cur.h) continue;  // padded cells keep coefficient 0
                for (int v = 0; v < conv->kw; ++v) {
                  const int ic = ocol * conv->stride - conv->padding + v;
                  if (ic < 0 || ic >= cur.w) continue;
                  stage.weights.at(r, flat_index(cur, ir, ic, ci)) +=
                      conv->kernel_at(k, ci, u, v);
                }
              }
          }
      out.stages.push_back(std::move(stage));
      cur = os;
    } else if (std::holds_alternative<ReluLayer>(layer)) {
      // A ReLU with no affine stage in front gets an explicit identity
      // stage so the chain stays affine+ReLU and exact.
      if (out.stages.empty() || out.stages.back().relu_after) push_identity();
      out.stages.back().relu_after = true;
    }
    // Flatten contributes no stage; the flat layout is the lowering's
    // native layout already.
  }
  // Logits must come out unclamped.
  if (out.stages.empty() || out.stages.back().relu_after) push_identity();
  return out;
}

std::vector<double> affine_eval(const AffineNetwork& net, const std::vector<double>& input) {
  if (static_cast<int>(input.size()) != net.input_dim)
    throw model_error("affine network input dimension mismatch");
  std::vector<double> act = input;
  for (const AffineStage& stage : net.stages) {
    std::vector<double> out(static_cast<size_t>(stage.weights.rows));
    kernels::matvec_serial(stage.weights, act.data(), stage.bias.data(), out.data());
    if (stage.relu_after) kernels::relu_inplace(out.data(), static_cast<int>(out.size()));
    act = std::move(out);
  }
  return act;
}

std::vector<int> predict_labels_serial(const Network& net, const std::vector<Image>& images) {
  std::vector<int> labels(images.size());
  for (size_t i = 0; i < images.size(); ++i) labels[i] = predict(net, images[i]).label;
  return labels;
}

std::vector<int> predict_labels(const Network& net, const std::vector<Image>& images,
                                int threads) {
  if (threads <= 1) return predict_labels_serial(net, images);
  std::vector<int> labels(images.size());
#pragma omp parallel for schedule(static) num_threads(threads)
  for (long i = 0; i < static_cast<long>(images.size()); ++i)
    labels[i] = predict(net, images[i]).label;
  return labels;
}

}  // namespace vpn
