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

#include "anosynth/core/image.hpp"

#include <algorithm>
#include <cmath>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "anosynth/core/error.hpp"

namespace anosynth {
namespace {

std::uint8_t to_level(float v) {
  const float clamped = std::clamp(v, 0.0f, 1.0f);
  return static_cast<std::uint8_t>(std::lround(clamped * 255.0f));
}

}  // namespace

Image load_image(const std::filesystem::path& path) {
  cv::Mat raw = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (raw.empty()) fail(ErrorCode::Io, "cannot read image " + path.string());
  cv::Mat rgb;
  cv::cvtColor(raw, rgb, cv::COLOR_BGR2RGB);
  Image out(rgb.cols, rgb.rows, 3);
  for (int y = 0; y < rgb.rows; ++y) {
    const auto* row = rgb.ptr<std::uint8_t>(y);
    for (int x = 0; x < rgb.cols * 3; ++x) {
      out.data[static_cast<std::size_t>(y) * rgb.cols * 3 + x] = row[x] / 255.0f;
    }
  }
  return out;
}

void save_png(const std::filesystem::path& path, const Image& image) {
  require(image.channels == 1 || image.channels == 3, ErrorCode::InvalidArgument,
          "save_png expects 1 or 3 channels");
  cv::Mat mat(image.height, image.width, image.channels == 1 ? CV_8UC1 : CV_8UC3);
  for (int y = 0; y < image.height; ++y) {
    auto* row = mat.ptr<std::uint8_t>(y);
    for (int x = 0; x < image.width; ++x) {
      if (image.channels == 1) {
        row[x] = to_level(image.at(x, y, 0));
      } else {
        // OpenCV stores BGR.
        row[3 * x + 0] = to_level(image.at(x, y, 2));
        row[3 * x + 1] = to_level(image.at(x, y, 1));
        row[3 * x + 2] = to_level(image.at(x, y, 0));
      }
    }
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  if (!cv::imwrite(path.string(), mat)) fail(ErrorCode::Io, "cannot write " + path.string());
}

Image resize_bicubic(const Image& image, int width, int height) {
  require(width > 0 && height > 0, ErrorCode::InvalidArgument, "resize target must be positive");
  if (image.width == width && image.height == height) return image;
  cv::Mat src(image.height, image.width, CV_32FC(image.channels),
              const_cast<float*>(image.data.data()));
  cv::Mat dst;
  cv::resize(src, dst, cv::Size(width, height), 0, 0, cv::INTER_CUBIC);
  Image out(width, height, image.channels);
  std::copy(dst.ptr<float>(0), dst.ptr<float>(0) + out.data.size(), out.data.begin());
  for (float& v : out.data) v = std::clamp(v, 0.0f, 1.0f);
  return out;
}

Image quantize_8bit(const Image& image) {
  Image out = image;
  for (float& v : out.data) v = to_level(v) / 255.0f;
  return out;
}

}  // namespace anosynth
