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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "magspec/dataset.hpp"
#include "magspec/types.hpp"

namespace magspec {

enum class Activation { kLinear, kSoftplus };

struct DenseLayer {
  Matrix weights;  // in x out
  Vector bias;     // out
  Activation activation = Activation::kLinear;
};

// A stack of dense layers; an empty stack is the identity (pass-through)
// map, used for pipeline tests that bypass representation learning.
struct Mlp {
  std::vector<DenseLayer> layers;

  Index input_dim() const {
    return layers.empty() ? -1 : layers.front().weights.rows();
  }
  Index output_dim() const {
    return layers.empty() ? -1 : layers.back().weights.cols();
  }
};

struct MlpCache {
  std::vector<Matrix> inputs;          // input to each layer
  std::vector<Matrix> preactivations;  // X W + b per layer
};

struct MlpGrads {
  std::vector<Matrix> weights;
  std::vector<Vector> bias;
};

Matrix mlp_forward(const Mlp& net, const Matrix& x, MlpCache* cache = nullptr);

// Backpropagates dL/dY through the net, accumulating parameter gradients
// into `grads` (which must be zero-initialized with mlp_zero_grads) and
// returning dL/dX.
Matrix mlp_backward(const Mlp& net, const MlpCache& cache, const Matrix& d_output,
                    MlpGrads& grads);

MlpGrads mlp_zero_grads(const Mlp& net);

// Glorot-uniform initialization, deterministic per seed.
Mlp make_mlp(const std::vector<Index>& dims, Activation hidden_activation,
             std::uint64_t seed);

// One encoder/decoder pair per view. Defaults: encoder d_v -> hidden -> d
// with softplus hidden layers and a linear output, decoder mirrored.
struct AutoencoderParams {
  std::vector<Mlp> encoders;
  std::vector<Mlp> decoders;
  Index latent_dim = 0;
};

AutoencoderParams make_autoencoders(const std::vector<Index>& view_dims,
                                    Index latent_dim,
                                    const std::vector<Index>& hidden_dims,
                                    std::uint64_t seed);

// Identity autoencoders (zero layers); latent dim equals each view's input
// dim, so this only suits per-view consumers.
AutoencoderParams make_identity_autoencoders(int num_views);

Matrix encode(const AutoencoderParams& params, int view_index, const Matrix& x);

struct ReconstructionResult {
  double loss = 0.0;
  std::vector<MlpGrads> encoder_grads;
  std::vector<MlpGrads> decoder_grads;
  std::vector<Matrix> latents;  // Z per view
};

// Sum of squared Frobenius reconstruction errors over views, with gradients
// for every encoder/decoder parameter.
ReconstructionResult reconstruction_loss(const AutoencoderParams& params,
                                         const MultiViewDataset& dataset);

// Raw view over a parameter or gradient tensor.
struct ParamRef {
  double* data = nullptr;
  std::size_t size = 0;
};
struct ConstParamRef {
  const double* data = nullptr;
  std::size_t size = 0;

  ConstParamRef() = default;
  ConstParamRef(const double* d, std::size_t s) : data(d), size(s) {}
  ConstParamRef(const ParamRef& p) : data(p.data), size(p.size) {}
};

struct AdamConfig {
  double learning_rate = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamConfig config;
  int step_count = 0;
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;
};

// Standard Adam update with bias correction. Moment buffers are created on
// the first call; afterwards shapes must match exactly.
void adam_step(const std::vector<ParamRef>& params,
               const std::vector<ConstParamRef>& grads, AdamState& state);

std::vector<ParamRef> mlp_param_refs(Mlp& net);
std::vector<ConstParamRef> mlp_grad_refs(const MlpGrads& grads);

// Checkpoint format: text lines, one tensor per block, values at 17
// significant digits (exact round-trip). See README for the layout.
void save_checkpoint(const std::string& path, const AutoencoderParams& params,
                     const std::vector<Matrix>& view_centers);
struct Checkpoint {
  AutoencoderParams params;
  std::vector<Matrix> view_centers;
};
Checkpoint load_checkpoint(const std::string& path);

}  // namespace magspec
