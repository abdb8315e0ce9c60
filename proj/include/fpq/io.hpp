// Copyright 2026 The fpq Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "fpq/tensor.hpp"

namespace fpq {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sidecar path for a raw tensor file: "<path>.json".
std::filesystem::path sidecar_path(const std::filesystem::path& path);

/// Reads a tensor. ".csv" files hold one value per line and give a rank-1
/// tensor; anything else is raw little-endian float32 in row-major order with
/// a JSON sidecar {"shape": [...], "channel_axis": int|null}.
Tensor read_tensor(const std::filesystem::path& path);

/// Writes a tensor in the layout read_tensor expects. Raw output narrows to float32.
void write_tensor(const std::filesystem::path& path, const Tensor& tensor);

/// "%.17g" text, which round-trips any double; "inf" / "-inf" / "nan" otherwise.
std::string format_real(double value);

/// Writes `text` to `path`, replacing any existing file.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace fpq
