// Copyright 2026 The anosynth Authors. All Rights Reserved.
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


#include "anosynth/stylizer/losses.hpp"

#include <cmath>
#include <string>

#include "anosynth/core/error.hpp"

namespace anosynth::stylizer {
namespace {

torch::Tensor flat(const torch::Tensor& v) { return v.reshape({-1}); }

void check_same_dim(const torch::Tensor& a, const torch::Tensor& b, const char* what) {
  require(a.numel() == b.numel(), ErrorCode::DimensionMismatch,
          std::string(what) + ": embedding dimensions differ");
}

// Cosine distance of two 1-D vectors whose norms are known to be non-zero.
torch::Tensor cosine_distance(const torch::Tensor& a, const torch::Tensor& b) {
  return 1.0 - torch::dot(a, b) / (a.norm() * b.norm());
}

}  // namespace

void TrainHyperparams::validate(int image_width, int image_height) const {
  require(iterations >= 1, ErrorCode::InvalidArgument, "iterations must be at least 1");
  require(learning_rate > 0.0 && std::isfinite(learning_rate), ErrorCode::InvalidArgument,
          "learning rate must be positive");
  require(patch_count >= 1, ErrorCode::InvalidArgument, "patch_count must be at least 1");
  require(patch_side >= 1, ErrorCode::InvalidArgument, "patch_side must be at least 1");
  require(perspective_distortion >= 0.0 && perspective_distortion <= 1.0, ErrorCode::InvalidArgument,
          "perspective distortion must lie in [0, 1]");
  for (double l : {lambda_gdir, lambda_pdir, lambda_tv, lambda_c, lambda_mclip}) {
    require(l >= 0.0 && std::isfinite(l), ErrorCode::InvalidArgument, "loss weights must be finite and >= 0");
  }
  if (image_width > 0 && image_height > 0) {
    require(patch_side <= std::min(image_width, image_height), ErrorCode::InvalidArgument,
            "patch_side " + std::to_string(patch_side) + " exceeds the image side " +
                std::to_string(std::min(image_width, image_height)));
  }
}

nlohmann::json to_json(const TrainHyperparams& hp) {
  return {{"iterations", hp.iterations},
          {"learning_rate", hp.learning_rate},
          {"patch_count", hp.patch_count},
          {"patch_side", hp.patch_side},
          {"perspective_distortion", hp.perspective_distortion},
          {"lambda_gdir", hp.lambda_gdir},
          {"lambda_pdir", hp.lambda_pdir},
          {"lambda_tv", hp.lambda_tv},
          {"lambda_c", hp.lambda_c},
          {"lambda_mclip", hp.lambda_mclip}};
}

TrainHyperparams hyperparams_from_json(const nlohmann::json& j) {
  require(j.is_object(), ErrorCode::InvalidArgument, "hyperparameters must be a JSON object");
  TrainHyperparams hp;
  for (const auto& [key, value] : j.items()) {
    if (key == "iterations") hp.iterations = value.get<int>();
    else if (key == "learning_rate") hp.learning_rate = value.get<double>();
    else if (key == "patch_count") hp.patch_count = value.get<int>();
    else if (key == "patch_side") hp.patch_side = value.get<int>();
    else if (key == "perspective_distortion") hp.perspective_distortion = value.get<double>();
    else if (key == "lambda_gdir") hp.lambda_gdir = value.get<double>();
    else if (key == "lambda_pdir") hp.lambda_pdir = value.get<double>();
    else if (key == "lambda_tv") hp.lambda_tv = value.get<double>();
    else if (key == "lambda_c") hp.lambda_c = value.get<double>();
    else if (key == "lambda_mclip") hp.lambda_mclip = value.get<double>();
    else fail(ErrorCode::InvalidArgument, "unknown hyperparameter '" + key + "'");
  }
  hp.validate();
  return hp;
}

nlohmann::json to_json(const LossBreakdown& b) {
  return {{"gdir", b.gdir}, {"pdir", b.pdir},       {"mwcd", b.mwcd}, {"mclip", b.mclip},
          {"content", b.content}, {"tv", b.tv}, {"total", b.total}};
}

LossBreakdown total_loss(const LossParts& parts, const TrainHyperparams& hp) {
  std::string bad;
  const auto check = [&bad](const char* name, double v) {
    if (!std::isfinite(v)) bad += std::string(bad.empty() ? "" : ", ") + name + "=" + std::to_string(v);
  };
  check("gdir", parts.gdir);
  check("pdir", parts.pdir);
  check("mclip", parts.mclip);
  check("content", parts.content);
  check("tv", parts.tv);
  if (!bad.empty()) fail(ErrorCode::NonFinite, "non-finite loss terms: " + bad);

  LossBreakdown b;
  b.gdir = parts.gdir;
  b.pdir = parts.pdir;
  b.mclip = parts.mclip;
  b.content = parts.content;
  b.tv = parts.tv;
  b.mwcd = hp.lambda_gdir * b.gdir + hp.lambda_pdir * b.pdir;
  b.total = b.mwcd + hp.lambda_mclip * b.mclip + hp.lambda_c * b.content + hp.lambda_tv * b.tv;
  return b;
}

torch::Tensor loss_gdir(const torch::Tensor& h_I_n, const torch::Tensor& h_I_a, const torch::Tensor& h_T_n,
                        const torch::Tensor& h_T_a) {
  check_same_dim(h_I_n, h_I_a, "gdir");
  check_same_dim(h_I_n, h_T_n, "gdir");
  check_same_dim(h_T_n, h_T_a, "gdir");
  const auto d_img = flat(h_I_a) - flat(h_I_n);
  const auto d_txt = flat(h_T_a).to(d_img.dtype()) - flat(h_T_n).to(d_img.dtype());
  require(d_img.norm().item<double>() > 0.0, ErrorCode::DegenerateDirection,
          "image direction is zero: the generated image embeds exactly like the input");
  require(d_txt.norm().item<double>() > 0.0, ErrorCode::DegenerateDirection,
          "text direction is zero: normal and anomaly prompts embed identically");
  return cosine_distance(d_img, d_txt);
}

torch::Tensor loss_pdir_embeddings(const torch::Tensor& patch_embeddings, const std::vector<double>& overlaps,
                                   const torch::Tensor& h_I_n, const torch::Tensor& h_T_n,
                                   const torch::Tensor& h_T_a) {
  require(patch_embeddings.dim() == 2 && patch_embeddings.size(0) == static_cast<int64_t>(overlaps.size()),
          ErrorCode::DimensionMismatch, "pdir: one overlap ratio per patch embedding is required");
  require(patch_embeddings.size(1) == h_I_n.numel(), ErrorCode::DimensionMismatch,
          "pdir: embedding dimensions differ");
  std::vector<int64_t> keep;
  std::vector<double> weights;
  for (std::size_t j = 0; j < overlaps.size(); ++j) {
    if (overlaps[j] > 0.0) {
      keep.push_back(static_cast<int64_t>(j));
      weights.push_back(overlaps[j]);
    }
  }
  const auto opts = patch_embeddings.options();
  if (keep.empty()) return torch::zeros({}, opts);

  const auto rows = patch_embeddings.index_select(0, torch::tensor(keep, torch::kInt64));
  const auto dirs = rows - flat(h_I_n).to(opts.dtype()).unsqueeze(0);
  const auto d_txt = flat(h_T_a).to(opts.dtype()) - flat(h_T_n).to(opts.dtype());
  require(d_txt.norm().item<double>() > 0.0, ErrorCode::DegenerateDirection,
          "text direction is zero: normal and anomaly prompts embed identically");
  const auto cos = torch::mv(dirs, d_txt) / (torch::clamp_min(dirs.norm(2, 1), 1e-12) * d_txt.norm());
  const auto w = torch::tensor(weights, torch::kFloat64).to(opts.dtype());
  return torch::sum(w * (1.0 - cos)) / torch::sum(w);
}

torch::Tensor loss_mclip(const torch::Tensor& generated, const torch::Tensor& mask, const torch::Tensor& h_T_a,
                         const backends::ImageEncoder& encoder) {
  require(mask.sum().item<double>() > 0.0, ErrorCode::EmptyMask, "mclip needs a non-empty mask");
  const auto emb = flat(encoder.encode(generated * mask.to(generated.dtype())));
  check_same_dim(emb, h_T_a, "mclip");
  const auto t = flat(h_T_a).to(emb.dtype());
  return 1.0 - torch::dot(emb, t) / (torch::clamp_min(emb.norm(), 1e-12) * t.norm());
}

torch::Tensor loss_content_features(const std::vector<torch::Tensor>& a, const std::vector<torch::Tensor>& b) {
  require(a.size() == b.size() && !a.empty(), ErrorCode::DimensionMismatch,
          "content: feature layer lists differ");
  torch::Tensor total;
  for (std::size_t i = 0; i < a.size(); ++i) {
    require(a[i].sizes() == b[i].sizes(), ErrorCode::DimensionMismatch, "content: feature shapes differ");
    const auto term = torch::mean(torch::square(a[i] - b[i]));
    total = total.defined() ? total + term : term;
  }
  return total;
}

torch::Tensor loss_content(const torch::Tensor& input, const torch::Tensor& generated,
                           const backends::PerceptualFeatureExtractor& extractor) {
  return loss_content_features(extractor.features(input), extractor.features(generated));
}

torch::Tensor loss_tv(const torch::Tensor& image) {
  require(image.dim() >= 2 && image.size(-1) >= 2 && image.size(-2) >= 2, ErrorCode::DimensionMismatch,
          "tv needs an image of at least 2x2");
  const int64_t w = image.size(-1);
  const int64_t h = image.size(-2);
  const auto dx = image.narrow(-1, 1, w - 1) - image.narrow(-1, 0, w - 1);
  const auto dy = image.narrow(-2, 1, h - 1) - image.narrow(-2, 0, h - 1);
  return torch::mean(torch::square(dx)) + torch::mean(torch::square(dy));
}

torch::Tensor composite_output(const torch::Tensor& network_output, const torch::Tensor& input,
                               const torch::Tensor& mask) {
  require(network_output.sizes() == input.sizes(), ErrorCode::DimensionMismatch,
          "composite: network output and input differ in shape");
  require(mask.dim() == input.dim() && mask.size(-1) == input.size(-1) && mask.size(-2) == input.size(-2),
          ErrorCode::DimensionMismatch, "composite: mask and image differ in size");
  return torch::where(mask > 0.5, network_output, input.to(network_output.dtype()));
}

}  // namespace anosynth::stylizer
