// Copyright 2026 The MagSpec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "magspec/encoder.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "magspec/csv.hpp"
#include "magspec/rng.hpp"
#include "view_parallel.hpp"

namespace magspec {

namespace {

// Vectorized stable softplus: max(x, 0) + log(1 + exp(-|x|)). The log
// argument lies in [1, 2], so plain log loses nothing over log1p here and
// stays on the SIMD path.
Matrix apply_activation(const Matrix& pre, Activation act) {
  if (act == Activation::kLinear) return pre;
  return (pre.array().max(0.0) + (1.0 + (-pre.array().abs()).exp()).log()).matrix();
}

const char* activation_name(Activation act) {
  return act == Activation::kLinear ? "linear" : "softplus";
}

Activation activation_from_name(const std::string& name) {
  if (name == "linear") return Activation::kLinear;
  if (name == "softplus") return Activation::kSoftplus;
  throw ParseError("unknown activation '" + name + "'");
}

}  // namespace

Matrix mlp_forward(const Mlp& net, const Matrix& x, MlpCache* cache) {
  if (!net.layers.empty() && x.cols() != net.input_dim()) {
    throw ShapeError("mlp_forward: input has " + std::to_string(x.cols()) +
                     " columns, expected " + std::to_string(net.input_dim()));
  }
  Matrix h = x;
  if (cache) {
    cache->inputs.clear();
    cache->preactivations.clear();
  }
  for (const DenseLayer& layer : net.layers) {
    Matrix pre;
    pre.noalias() = h * layer.weights;
    pre.rowwise() += layer.bias.transpose();
    if (cache) {
      cache->inputs.push_back(std::move(h));
      cache->preactivations.push_back(std::move(pre));
      h = apply_activation(cache->preactivations.back(), layer.activation);
    } else if (layer.activation == Activation::kLinear) {
      h = std::move(pre);
    } else {
      h = apply_activation(pre, layer.activation);
    }
  }
  return h;
}

MlpGrads mlp_zero_grads(const Mlp& net) {
  MlpGrads grads;
  for (const DenseLayer& layer : net.layers) {
    grads.weights.push_back(Matrix::Zero(layer.weights.rows(), layer.weights.cols()));
    grads.bias.push_back(Vector::Zero(layer.bias.size()));
  }
  return grads;
}

Matrix mlp_backward(const Mlp& net, const MlpCache& cache, const Matrix& d_output,
                    MlpGrads& grads) {
  Matrix d = d_output;
  for (std::size_t l = net.layers.size(); l-- > 0;) {
    const DenseLayer& layer = net.layers[l];
    Matrix d_pre;
    if (layer.activation == Activation::kLinear) {
      d_pre = std::move(d);
    } else {
      // Softplus derivative fused into the product (logistic of the cached
      // pre-activation).
      d_pre = (d.array() * cache.preactivations[l].array().logistic()).matrix();
    }
    grads.weights[l].noalias() += cache.inputs[l].transpose() * d_pre;
    grads.bias[l] += d_pre.colwise().sum().transpose();
    d.noalias() = d_pre * layer.weights.transpose();
  }
  return d;
}

Mlp make_mlp(const std::vector<Index>& dims, Activation hidden_activation,
             std::uint64_t seed) {
  if (dims.size() < 2) throw ParameterError("make_mlp: need at least two dims");
  Rng rng(seed);
  Mlp net;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    DenseLayer layer;
    const Index in = dims[l];
    const Index out = dims[l + 1];
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    layer.weights = Matrix(in, out);
    for (Index i = 0; i < in; ++i)
      for (Index j = 0; j < out; ++j)
        layer.weights(i, j) = rng.uniform(-limit, limit);
    layer.bias = Vector::Zero(out);
    const bool last = (l + 2 == dims.size());
    layer.activation = last ? Activation::kLinear : hidden_activation;
    net.layers.push_back(std::move(layer));
  }
  return net;
}

AutoencoderParams make_autoencoders(const std::vector<Index>& view_dims,
                                    Index latent_dim,
                                    const std::vector<Index>& hidden_dims,
                                    std::uint64_t seed) {
  AutoencoderParams params;
  params.latent_dim = latent_dim;
  const Rng master(seed);
  for (std::size_t v = 0; v < view_dims.size(); ++v) {
    std::vector<Index> enc_dims;
    enc_dims.push_back(view_dims[v]);
    enc_dims.insert(enc_dims.end(), hidden_dims.begin(), hidden_dims.end());
    enc_dims.push_back(latent_dim);
    std::vector<Index> dec_dims(enc_dims.rbegin(), enc_dims.rend());
    params.encoders.push_back(make_mlp(enc_dims, Activation::kSoftplus,
                                       master.child(2 * v).seed()));
    params.decoders.push_back(make_mlp(dec_dims, Activation::kSoftplus,
                                       master.child(2 * v + 1).seed()));
  }
  return params;
}

AutoencoderParams make_identity_autoencoders(int num_views) {
  AutoencoderParams params;
  params.latent_dim = 0;  // per-view latent dim equals the view dim
  params.encoders.resize(static_cast<std::size_t>(num_views));
  params.decoders.resize(static_cast<std::size_t>(num_views));
  return params;
}

Matrix encode(const AutoencoderParams& params, int view_index, const Matrix& x) {
  const auto v = static_cast<std::size_t>(view_index);
  if (v >= params.encoders.size()) {
    throw ParameterError("encode: view index out of range");
  }
  return mlp_forward(params.encoders[v], x);
}

ReconstructionResult reconstruction_loss(const AutoencoderParams& params,
                                         const MultiViewDataset& dataset) {
  if (params.encoders.size() != static_cast<std::size_t>(dataset.num_views)) {
    throw ShapeError("reconstruction_loss: params cover " +
                     std::to_string(params.encoders.size()) + " views, dataset has " +
                     std::to_string(dataset.num_views));
  }
  const int num_views = dataset.num_views;
  ReconstructionResult result;
  result.encoder_grads.resize(static_cast<std::size_t>(num_views));
  result.decoder_grads.resize(static_cast<std::size_t>(num_views));
  result.latents.resize(static_cast<std::size_t>(num_views));
  std::vector<double> losses(static_cast<std::size_t>(num_views), 0.0);
  internal::for_each_view(num_views, [&](int v) {
    const auto vi = static_cast<std::size_t>(v);
    const Matrix& x = dataset.views[vi];
    MlpCache enc_cache, dec_cache;
    Matrix z = mlp_forward(params.encoders[vi], x, &enc_cache);
    Matrix xhat = mlp_forward(params.decoders[vi], z, &dec_cache);
    const Matrix residual = xhat - x;
    losses[vi] = residual.squaredNorm();

    MlpGrads dec_grads = mlp_zero_grads(params.decoders[vi]);
    MlpGrads enc_grads = mlp_zero_grads(params.encoders[vi]);
    const Matrix d_xhat = 2.0 * residual;
    const Matrix d_z = mlp_backward(params.decoders[vi], dec_cache, d_xhat, dec_grads);
    mlp_backward(params.encoders[vi], enc_cache, d_z, enc_grads);

    result.encoder_grads[vi] = std::move(enc_grads);
    result.decoder_grads[vi] = std::move(dec_grads);
    result.latents[vi] = std::move(z);
  });
  for (double value : losses) result.loss += value;
  return result;
}

void adam_step(const std::vector<ParamRef>& params,
               const std::vector<ConstParamRef>& grads, AdamState& state) {
  if (params.size() != grads.size()) {
    throw ShapeError("adam_step: params/grads count mismatch");
  }
  if (state.first_moment.empty()) {
    for (const ParamRef& p : params) {
      state.first_moment.emplace_back(p.size, 0.0);
      state.second_moment.emplace_back(p.size, 0.0);
    }
  }
  if (state.first_moment.size() != params.size()) {
    throw ShapeError("adam_step: state tensor count mismatch");
  }
  ++state.step_count;
  const AdamConfig& cfg = state.config;
  const double bc1 = 1.0 - std::pow(cfg.beta1, state.step_count);
  const double bc2 = 1.0 - std::pow(cfg.beta2, state.step_count);
  for (std::size_t t = 0; t < params.size(); ++t) {
    if (params[t].size != grads[t].size ||
        params[t].size != state.first_moment[t].size()) {
      throw ShapeError("adam_step: tensor " + std::to_string(t) + " shape mismatch");
    }
    double* p = params[t].data;
    const double* g = grads[t].data;
    double* m = state.first_moment[t].data();
    double* v = state.second_moment[t].data();
    for (std::size_t i = 0; i < params[t].size; ++i) {
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      p[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon);
    }
  }
}

std::vector<ParamRef> mlp_param_refs(Mlp& net) {
  std::vector<ParamRef> refs;
  for (DenseLayer& layer : net.layers) {
    refs.push_back({layer.weights.data(),
                    static_cast<std::size_t>(layer.weights.size())});
    refs.push_back({layer.bias.data(), static_cast<std::size_t>(layer.bias.size())});
  }
  return refs;
}

std::vector<ConstParamRef> mlp_grad_refs(const MlpGrads& grads) {
  std::vector<ConstParamRef> refs;
  for (std::size_t l = 0; l < grads.weights.size(); ++l) {
    refs.emplace_back(grads.weights[l].data(),
                      static_cast<std::size_t>(grads.weights[l].size()));
    refs.emplace_back(grads.bias[l].data(),
                      static_cast<std::size_t>(grads.bias[l].size()));
  }
  return refs;
}

namespace {

void write_matrix_block(std::ofstream& out, const Matrix& m) {
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << csv::format_double(m(i, j));
    }
    out << '\n';
  }
}

Matrix read_matrix_block(std::ifstream& in, Index rows, Index cols,
                         const std::string& path) {
  Matrix m(rows, cols);
  std::string line;
  for (Index i = 0; i < rows; ++i) {
    if (!std::getline(in, line)) throw ParseError(path + ": truncated tensor block");
    std::stringstream ss(line);
    std::string cell;
    for (Index j = 0; j < cols; ++j) {
      if (!std::getline(ss, cell, ',')) {
        throw ParseError(path + ": short tensor row");
      }
      m(i, j) = std::strtod(cell.c_str(), nullptr);
    }
  }
  return m;
}

void write_mlp(std::ofstream& out, const Mlp& net, const std::string& tag, int view) {
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const DenseLayer& layer = net.layers[l];
    out << "layer," << view << ',' << tag << ',' << l << ','
        << activation_name(layer.activation) << ',' << layer.weights.rows() << ','
        << layer.weights.cols() << '\n';
    write_matrix_block(out, layer.weights);
    write_matrix_block(out, layer.bias.transpose());
  }
}

}  // namespace

void save_checkpoint(const std::string& path, const AutoencoderParams& params,
                     const std::vector<Matrix>& view_centers) {
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write " + path);
  const int num_views = static_cast<int>(params.encoders.size());
  out << "magspec-checkpoint,1\n";
  out << "views," << num_views << ",latent," << params.latent_dim << '\n';
  for (int v = 0; v < num_views; ++v) {
    const auto vi = static_cast<std::size_t>(v);
    out << "view," << v << ",enc_layers," << params.encoders[vi].layers.size()
        << ",dec_layers," << params.decoders[vi].layers.size() << '\n';
    write_mlp(out, params.encoders[vi], "enc", v);
    write_mlp(out, params.decoders[vi], "dec", v);
  }
  for (std::size_t v = 0; v < view_centers.size(); ++v) {
    out << "centers," << v << ',' << view_centers[v].rows() << ','
        << view_centers[v].cols() << '\n';
    write_matrix_block(out, view_centers[v]);
  }
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + path);
  std::string line;
  auto next_fields = [&](const char* what) {
    if (!std::getline(in, line)) throw ParseError(path + ": missing " + what);
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) fields.push_back(cell);
    return fields;
  };

  auto header = next_fields("header");
  if (header.size() != 2 || header[0] != "magspec-checkpoint" || header[1] != "1") {
    throw ParseError(path + ": not a magspec checkpoint");
  }
  auto counts = next_fields("views line");
  if (counts.size() != 4 || counts[0] != "views") {
    throw ParseError(path + ": malformed views line");
  }
  const int num_views = std::stoi(counts[1]);
  Checkpoint ckpt;
  ckpt.params.latent_dim = std::stol(counts[3]);
  ckpt.params.encoders.resize(static_cast<std::size_t>(num_views));
  ckpt.params.decoders.resize(static_cast<std::size_t>(num_views));

  for (int v = 0; v < num_views; ++v) {
    auto view_line = next_fields("view line");
    if (view_line.size() != 6 || view_line[0] != "view") {
      throw ParseError(path + ": malformed view line");
    }
    const int enc_layers = std::stoi(view_line[3]);
    const int dec_layers = std::stoi(view_line[5]);
    for (int part = 0; part < 2; ++part) {
      const int count = part == 0 ? enc_layers : dec_layers;
      Mlp& net = part == 0 ? ckpt.params.encoders[static_cast<std::size_t>(v)]
                           : ckpt.params.decoders[static_cast<std::size_t>(v)];
      for (int l = 0; l < count; ++l) {
        auto layer_line = next_fields("layer line");
        if (layer_line.size() != 7 || layer_line[0] != "layer") {
          throw ParseError(path + ": malformed layer line");
        }
        DenseLayer layer;
        layer.activation = activation_from_name(layer_line[4]);
        const Index rows = std::stol(layer_line[5]);
        const Index cols = std::stol(layer_line[6]);
        layer.weights = read_matrix_block(in, rows, cols, path);
        layer.bias = read_matrix_block(in, 1, cols, path).transpose();
        net.layers.push_back(std::move(layer));
      }
    }
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> fields;
    while (std::getline(ss, cell, ',')) fields.push_back(cell);
    if (fields.size() != 4 || fields[0] != "centers") {
      throw ParseError(path + ": malformed centers line");
    }
    ckpt.view_centers.push_back(
        read_matrix_block(in, std::stol(fields[2]), std::stol(fields[3]), path));
  }
  return ckpt;
}

}  // namespace magspec
