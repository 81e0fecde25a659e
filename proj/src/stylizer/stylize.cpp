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


#include "anosynth/stylizer/stylize.hpp"

#include "anosynth/backends/tensor_image.hpp"
#include "anosynth/core/error.hpp"
#include "anosynth/core/rng.hpp"

namespace anosynth::stylizer {

Objective::Objective(const torch::Tensor& input, const mask::MaskCanvas& mask,
                     const prompt::PromptEmbeddings& text, const StylizerBackends& backends,
                     const TrainHyperparams& hp)
    : input_(input.detach()), mask_(mask), backends_(backends), hp_(hp) {
  require(backends.image_encoder != nullptr && backends.features != nullptr, ErrorCode::InvalidArgument,
          "stylizer needs an image encoder and a feature extractor");
  require(input.dim() == 4 && input.size(0) == 1 && input.size(1) == 3, ErrorCode::DimensionMismatch,
          "stylizer input must be [1, 3, H, W]");
  require(input.size(3) == mask.width() && input.size(2) == mask.height(), ErrorCode::DimensionMismatch,
          "stylizer: image and mask differ in size");
  require(mask.any(), ErrorCode::EmptyMask, "stylizer needs a non-empty anomaly mask");
  require(text.dim == backends.image_encoder->embedding_dim(), ErrorCode::DimensionMismatch,
          "text and image embeddings differ in dimension");
  hp_.validate(mask.width(), mask.height());
  const auto dtype = input.scalar_type();
  mask_t_ = backends::mask_to_tensor(mask, dtype);
  h_T_n_ = backends::embedding_to_tensor(text.normal, dtype);
  h_T_a_ = backends::embedding_to_tensor(text.anomaly, dtype);
  torch::NoGradGuard guard;
  h_I_n_ = backends.image_encoder->encode(input_).reshape({-1}).detach();
  for (const auto& f : backends.features->features(input_)) input_features_.push_back(f.detach());
}

Objective::Result Objective::evaluate(const torch::Tensor& network_output,
                                      const std::vector<PatchPlan>& plans) const {
  const auto& encoder = *backends_.image_encoder;
  Result r;
  r.composite = composite_output(network_output, input_, mask_t_);

  const auto gdir = loss_gdir(h_I_n_, encoder.encode(r.composite), h_T_n_, h_T_a_);

  // Zero-overlap patches are never encoded, so they cannot influence the term.
  std::vector<PatchPlan> kept;
  std::vector<double> overlaps;
  for (const auto& p : plans) {
    if (p.overlap > 0.0) {
      kept.push_back(p);
      overlaps.push_back(p.overlap);
    }
  }
  r.pdir_patches = static_cast<int>(kept.size());
  torch::Tensor pdir;
  if (kept.empty()) {
    pdir = torch::zeros({}, r.composite.options());
  } else {
    const auto emb = encoder.encode(apply_patch_plans(r.composite, kept));
    pdir = loss_pdir_embeddings(emb, overlaps, h_I_n_, h_T_n_, h_T_a_);
  }

  const auto mclip = loss_mclip(r.composite, mask_t_, h_T_a_, encoder);
  const auto content = loss_content_features(input_features_, backends_.features->features(r.composite));
  const auto tv = loss_tv(r.composite);

  LossParts parts;
  parts.gdir = gdir.item<double>();
  parts.pdir = pdir.item<double>();
  parts.mclip = mclip.item<double>();
  parts.content = content.item<double>();
  parts.tv = tv.item<double>();
  r.breakdown = total_loss(parts, hp_);
  r.total = hp_.lambda_gdir * gdir + hp_.lambda_pdir * pdir + hp_.lambda_mclip * mclip +
            hp_.lambda_c * content + hp_.lambda_tv * tv;
  return r;
}

nlohmann::json to_json(const IterationRecord& r) {
  auto j = to_json(r.loss);
  j["iteration"] = r.iteration;
  j["pdir_patches"] = r.pdir_patches;
  return j;
}

StylizationResult run_stylization(const Image& image, const mask::MaskCanvas& mask,
                                  const prompt::PromptEmbeddings& text, const StylizerBackends& backends,
                                  const TrainHyperparams& hp, std::uint64_t seed,
                                  const StylizationOptions& options) {
  require(image.channels == 3, ErrorCode::InvalidArgument, "stylizer expects a 3-channel image");
  const auto input = backends::image_to_tensor(image, options.dtype);
  const Objective objective(input, mask, text, backends, hp);

  auto net = init_network(options.network, seed, options.dtype);
  net->train();
  torch::optim::Adam optimizer(net->parameters(), torch::optim::AdamOptions(hp.learning_rate));

  StylizationResult result;
  std::vector<PatchPlan> first_plans;
  for (int it = 0; it < hp.iterations; ++it) {
    Rng rng(derive_seed(seed, "patches", static_cast<std::uint64_t>(it)));
    auto plans = sample_patch_plans(mask, hp, rng);
    const auto r = objective.evaluate(net->forward(input), plans);
    if (r.pdir_patches == 0) ++result.pdir_empty_steps;
    result.trace.push_back({it, r.breakdown, r.pdir_patches});
    if (options.on_iteration) options.on_iteration(it, r.composite.detach());
    optimizer.zero_grad();
    r.total.backward();
    optimizer.step();
    if (it == 0) first_plans = std::move(plans);
  }
  result.initial_loss = result.trace.front().loss;

  torch::NoGradGuard guard;
  const auto final_eval = objective.evaluate(net->forward(input), first_plans);
  result.final_loss = final_eval.breakdown;
  result.image = backends::tensor_to_image(final_eval.composite.to(torch::kFloat32));
  result.network_checksum = parameter_checksum(*net);
  return result;
}

}  // namespace anosynth::stylizer
