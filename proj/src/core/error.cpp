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

#include "anosynth/core/error.hpp"

namespace anosynth {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::DimensionMismatch: return "dimension-mismatch";
    case ErrorCode::EmptyMask: return "empty-mask";
    case ErrorCode::DegenerateSegmentation: return "degenerate-segmentation";
    case ErrorCode::DegenerateDirection: return "degenerate-direction";
    case ErrorCode::NonFinite: return "non-finite";
    case ErrorCode::BackendLoad: return "backend-load";
    case ErrorCode::Backend: return "backend";
    case ErrorCode::Io: return "io";
    case ErrorCode::Dataset: return "dataset";
  }
  return "unknown";
}

}  // namespace anosynth
