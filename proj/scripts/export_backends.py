#!/usr/bin/env python3
# Copyright 2026 The anosynth Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Exports the pretrained backends to TorchScript for the C++ library.

Writes one directory per model under --out:

  clip-vit-b-32/  text_encoder.pt image_encoder.pt bpe_simple_vocab_16e6.txt.gz
  vgg19/          features.pt
  sam-vit-b/      segmenter.pt
  inception-v3/   classifier.pt
  lpips-alex/     distance.pt

each with a meta.json describing inputs and preprocessing constants.

Pretrained weights are fetched by open_clip / torchvision on first use. SAM
needs a local checkpoint (sam_vit_b_01ec64.pth from the segment-anything
release page) passed with --sam-checkpoint.

--weights random builds the same architectures with random initialization and
--tiny shrinks them further; both exist to test the C++ bridge offline.
--reference additionally writes reference.json with outputs computed here for
fixed inputs, which the C++ tests compare against.
"""

import argparse
import json
import os
import shutil
import warnings

import torch
import torch.nn as nn
import torch.nn.functional as F

CLIP_MEAN = [0.48145466, 0.4578275, 0.40821073]
CLIP_STD = [0.26862954, 0.26130258, 0.27577711]
IMAGENET_MEAN = [0.485, 0.456, 0.406]
IMAGENET_STD = [0.229, 0.224, 0.225]
SAM_MEAN = [123.675, 116.28, 103.53]
SAM_STD = [58.395, 57.12, 57.375]

# Module indices of conv4_2 and conv5_2 in torchvision's VGG-19 `features`.
VGG_CONV4_2 = 21
VGG_CONV5_2 = 30

REFERENCE_PROMPTS = ["a photo of the flawless bottle.", "a photo of the bottle with crack defect."]


def pattern_image(size, offset=0):
    """Deterministic test pattern in [0, 1], shape [1, 3, size, size].

    The C++ tests rebuild it with the same formula.
    """
    i = torch.arange(size).view(size, 1)
    j = torch.arange(size).view(1, size)
    chans = [((i * 7 + j * 3 + c * 11 + offset) % 256).float() / 255.0 for c in range(3)]
    return torch.stack(chans).unsqueeze(0)


def write_meta(directory, meta):
    with open(os.path.join(directory, "meta.json"), "w") as f:
        json.dump(meta, f, indent=2, sort_keys=True)


def unit(x):
    return F.normalize(x, dim=-1)


class TextTower(nn.Module):
    def __init__(self, model):
        super().__init__()
        self.model = model

    def forward(self, ids):
        return self.model.encode_text(ids)


class ImageTower(nn.Module):
    def __init__(self, model):
        super().__init__()
        self.model = model

    def forward(self, x):
        return self.model.encode_image(x)


def build_clip(args):
    import open_clip
    from open_clip.model import CLIPTextCfg, CLIPVisionCfg

    if args.tiny:
        model = open_clip.CLIP(
            embed_dim=32,
            vision_cfg=CLIPVisionCfg(layers=1, width=64, patch_size=32, image_size=224, head_width=32),
            text_cfg=CLIPTextCfg(context_length=77, vocab_size=49408, width=64, heads=2, layers=1),
        )
        dim = 32
    else:
        pretrained = None if args.weights == "random" else "openai"
        model = open_clip.create_model("ViT-B-32", pretrained=pretrained)
        dim = 512
    return model.eval(), dim


def export_clip(args, out, reference):
    from open_clip.tokenizer import SimpleTokenizer, default_bpe

    model, dim = build_clip(args)
    d = os.path.join(out, "clip-vit-b-32")
    os.makedirs(d, exist_ok=True)
    tokenizer = SimpleTokenizer()
    ids = tokenizer(REFERENCE_PROMPTS)
    # Traced with autograd enabled: under no_grad the attention layers record
    # a fused inference kernel that has no backward.
    text = torch.jit.trace(TextTower(model), (ids,), check_trace=False)
    image = torch.jit.trace(ImageTower(model), (torch.zeros(1, 3, 224, 224),), check_trace=False)
    text.save(os.path.join(d, "text_encoder.pt"))
    image.save(os.path.join(d, "image_encoder.pt"))
    shutil.copy(default_bpe(), os.path.join(d, "bpe_simple_vocab_16e6.txt.gz"))
    write_meta(d, {
        "model_id": "clip-vit-b-32",
        "text": {"file": "text_encoder.pt", "vocab": "bpe_simple_vocab_16e6.txt.gz",
                 "context_length": 77, "embedding_dim": dim},
        "image": {"file": "image_encoder.pt", "input_size": 224, "mean": CLIP_MEAN, "std": CLIP_STD,
                  "embedding_dim": dim},
    })
    if reference is not None:
        with torch.no_grad():
            x = (pattern_image(224) - torch.tensor(CLIP_MEAN).view(1, 3, 1, 1)) / torch.tensor(CLIP_STD).view(1, 3, 1, 1)
            reference["clip"] = {
                "prompts": REFERENCE_PROMPTS,
                "token_ids": [tokenizer.encode(p) for p in REFERENCE_PROMPTS],
                "text_embeddings": unit(model.encode_text(ids)).tolist(),
                "image_embedding": unit(model.encode_image(x))[0].tolist(),
            }


class VggContent(nn.Module):
    def __init__(self, features):
        super().__init__()
        self.features = features[: VGG_CONV5_2 + 1]

    def forward(self, x):
        conv4_2 = x
        for idx, layer in enumerate(self.features):
            x = layer(x)
            if idx == VGG_CONV4_2:
                conv4_2 = x
        return conv4_2, x


def export_vgg(args, out, reference):
    import torchvision

    if args.tiny:
        cfg = [8, 8, "M", 8, 8, "M", 16, 16, 16, 16, "M", 16, 16, 16, 16, "M", 16, 16, 16, 16, "M"]
        features = torchvision.models.vgg.make_layers(cfg)
    else:
        weights = None if args.weights == "random" else torchvision.models.VGG19_Weights.IMAGENET1K_V1
        features = torchvision.models.vgg19(weights=weights).features
    model = VggContent(features).eval()
    d = os.path.join(out, "vgg19")
    os.makedirs(d, exist_ok=True)
    torch.jit.trace(model, (torch.zeros(1, 3, 64, 64),), check_trace=False).save(os.path.join(d, "features.pt"))
    write_meta(d, {"model_id": "vgg19",
                   "features": {"file": "features.pt", "layers": ["conv4_2", "conv5_2"],
                                "mean": IMAGENET_MEAN, "std": IMAGENET_STD}})
    if reference is not None:
        with torch.no_grad():
            x = (pattern_image(64) - torch.tensor(IMAGENET_MEAN).view(1, 3, 1, 1)) / torch.tensor(IMAGENET_STD).view(1, 3, 1, 1)
            a, b = model(x)
        reference["vgg"] = {"input_size": 64, "layer_means": [a.mean().item(), b.mean().item()],
                            "layer_shapes": [list(a.shape), list(b.shape)]}


class SamPointDecoder(nn.Module):
    def __init__(self, sam):
        super().__init__()
        self.sam = sam

    def forward(self, image, coords, labels):
        embedding = self.sam.image_encoder(image)
        sparse, dense = self.sam.prompt_encoder(points=(coords, labels), boxes=None, masks=None)
        low_res, _ = self.sam.mask_decoder(
            image_embeddings=embedding,
            image_pe=self.sam.prompt_encoder.get_dense_pe(),
            sparse_prompt_embeddings=sparse,
            dense_prompt_embeddings=dense,
            multimask_output=False,
        )
        return low_res


def build_sam(args):
    from functools import partial

    from segment_anything import sam_model_registry
    from segment_anything.modeling import ImageEncoderViT, MaskDecoder, PromptEncoder, Sam, TwoWayTransformer

    if args.tiny:
        encoder = ImageEncoderViT(depth=1, embed_dim=64, img_size=1024, mlp_ratio=2,
                                  norm_layer=partial(nn.LayerNorm, eps=1e-6), num_heads=2, patch_size=16,
                                  qkv_bias=True, use_rel_pos=True, global_attn_indexes=[0], window_size=14,
                                  out_chans=32)
        prompt = PromptEncoder(embed_dim=32, image_embedding_size=(64, 64), input_image_size=(1024, 1024),
                               mask_in_chans=4)
        decoder = MaskDecoder(num_multimask_outputs=3,
                              transformer=TwoWayTransformer(depth=1, embedding_dim=32, mlp_dim=64, num_heads=2),
                              transformer_dim=32, iou_head_depth=2, iou_head_hidden_dim=32)
        return Sam(image_encoder=encoder, prompt_encoder=prompt, mask_decoder=decoder,
                   pixel_mean=SAM_MEAN, pixel_std=SAM_STD).eval()
    if args.weights == "pretrained" and not args.sam_checkpoint:
        raise SystemExit("--sam-checkpoint is required for pretrained SAM weights")
    checkpoint = args.sam_checkpoint if args.weights == "pretrained" else None
    return sam_model_registry["vit_b"](checkpoint=checkpoint).eval()


def export_sam(args, out, reference):
    sam = build_sam(args)
    model = SamPointDecoder(sam).eval()
    d = os.path.join(out, "sam-vit-b")
    os.makedirs(d, exist_ok=True)
    coords = torch.tensor([[[0.0, 0.0], [1023.0, 0.0], [0.0, 1023.0], [1023.0, 1023.0]]])
    labels = torch.ones(1, 4, dtype=torch.int64)
    image = torch.zeros(1, 3, 1024, 1024)
    with torch.no_grad():
        torch.jit.trace(model, (image, coords, labels), check_trace=False).save(os.path.join(d, "segmenter.pt"))
    write_meta(d, {"model_id": "sam-vit-b",
                   "segmenter": {"file": "segmenter.pt", "input_size": 1024, "pixel_mean": SAM_MEAN,
                                 "pixel_std": SAM_STD, "mask_threshold": 0.0}})
    if reference is not None:
        with torch.no_grad():
            x = (pattern_image(1024) * 255.0 - torch.tensor(SAM_MEAN).view(1, 3, 1, 1)) / torch.tensor(SAM_STD).view(1, 3, 1, 1)
            low = model(x, coords, labels)
            full = F.interpolate(low, (1024, 1024), mode="bilinear", align_corners=False)
        reference["sam"] = {"input_size": 1024, "mask_area": int((full[0, 0] > 0).sum().item())}


class TinyClassifier(nn.Module):
    def __init__(self):
        super().__init__()
        self.conv = nn.Conv2d(3, 8, 3, stride=2)
        self.fc = nn.Linear(8, 1000)

    def forward(self, x):
        return self.fc(F.adaptive_avg_pool2d(F.relu(self.conv(x)), 1).flatten(1))


def export_inception(args, out, reference):
    import torchvision

    if args.tiny:
        model = TinyClassifier().eval()
    else:
        weights = None if args.weights == "random" else torchvision.models.Inception_V3_Weights.IMAGENET1K_V1
        model = torchvision.models.inception_v3(weights=weights, aux_logits=True, init_weights=weights is None).eval()
    d = os.path.join(out, "inception-v3")
    os.makedirs(d, exist_ok=True)
    with torch.no_grad():
        torch.jit.trace(model, (torch.zeros(1, 3, 299, 299),), check_trace=False).save(os.path.join(d, "classifier.pt"))
    write_meta(d, {"model_id": "inception-v3",
                   "classifier": {"file": "classifier.pt", "input_size": 299, "mean": IMAGENET_MEAN,
                                  "std": IMAGENET_STD, "num_classes": 1000}})
    if reference is not None:
        with torch.no_grad():
            x = (pattern_image(299) - torch.tensor(IMAGENET_MEAN).view(1, 3, 1, 1)) / torch.tensor(IMAGENET_STD).view(1, 3, 1, 1)
            p = torch.softmax(model(x).double(), dim=1)[0]
        reference["inception"] = {"input_size": 299, "top_class": int(p.argmax()), "top_prob": p.max().item()}


class LpipsPair(nn.Module):
    def __init__(self, net):
        super().__init__()
        self.net = net

    def forward(self, a, b):
        return self.net(a * 2.0 - 1.0, b * 2.0 - 1.0).reshape(-1)


def export_lpips(args, out, reference):
    import lpips

    random_backbone = args.tiny or args.weights == "random"
    net = lpips.LPIPS(net="alex", pretrained=True, pnet_rand=random_backbone, verbose=False).eval()
    model = LpipsPair(net).eval()
    d = os.path.join(out, "lpips-alex")
    os.makedirs(d, exist_ok=True)
    with torch.no_grad():
        torch.jit.trace(model, (torch.zeros(1, 3, 256, 256), torch.zeros(1, 3, 256, 256)), check_trace=False).save(
            os.path.join(d, "distance.pt"))
    write_meta(d, {"model_id": "lpips-alex", "distance": {"file": "distance.pt", "input_size": 256}})
    if reference is not None:
        with torch.no_grad():
            dist = model(pattern_image(256), pattern_image(256, offset=40)).item()
        reference["lpips"] = {"input_size": 256, "pattern_offset": 40, "distance": dist}


EXPORTERS = {
    "clip": export_clip,
    "vgg": export_vgg,
    "sam": export_sam,
    "inception": export_inception,
    "lpips": export_lpips,
}


def main():
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--out", required=True, help="model root (use as ANOSYNTH_MODEL_DIR)")
    parser.add_argument("--weights", choices=["pretrained", "random"], default="pretrained")
    parser.add_argument("--tiny", action="store_true", help="reduced-width random models for bridge tests")
    parser.add_argument("--sam-checkpoint", help="path to sam_vit_b_01ec64.pth")
    parser.add_argument("--only", default=",".join(EXPORTERS), help="comma-separated subset of " + ",".join(EXPORTERS))
    parser.add_argument("--reference", action="store_true", help="write reference.json for the C++ tests")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    if args.tiny:
        args.weights = "random"

    warnings.filterwarnings("ignore", category=torch.jit.TracerWarning)
    warnings.filterwarnings("ignore", category=UserWarning)
    torch.manual_seed(args.seed)
    torch.set_num_threads(1)
    os.makedirs(args.out, exist_ok=True)
    reference = {} if args.reference else None
    for name in args.only.split(","):
        if name not in EXPORTERS:
            raise SystemExit(f"unknown model group '{name}'")
        EXPORTERS[name](args, args.out, reference)
        print(f"exported {name}")
    if reference is not None:
        with open(os.path.join(args.out, "reference.json"), "w") as f:
            json.dump(reference, f, indent=2, sort_keys=True)


if __name__ == "__main__":
    main()
