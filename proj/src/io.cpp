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

#include "fpq/io.hpp"

#include <json.hpp>

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace fpq {

namespace {

using nlohmann::json;

bool is_csv(const std::filesystem::path& path) { return path.extension() == ".csv"; }

std::uint32_t to_little_endian(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
  }
}

std::string slurp(const std::filesystem::path& path, std::ios::openmode mode) {
  std::ifstream in(path, mode);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Tensor read_csv(const std::filesystem::path& path) {
  std::istringstream in(slurp(path, std::ios::in));
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const std::string field = line.substr(first, line.find_last_not_of(" \t\r") - first + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(field, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != field.size()) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": not a number: '" + field + "'");
    }
    values.push_back(v);
  }
  if (values.empty()) throw IoError(path.string() + ": no values");
  return Tensor::vector(Eigen::Map<Eigen::ArrayXd>(values.data(), static_cast<Eigen::Index>(values.size())));
}

struct Sidecar {
  std::vector<std::size_t> shape;
  std::optional<std::size_t> channel_axis;
};

Sidecar read_sidecar(const std::filesystem::path& path) {
  const auto side = sidecar_path(path);
  json j;
  try {
    j = json::parse(slurp(side, std::ios::in));
  } catch (const json::parse_error& e) {
    throw IoError(side.string() + ": " + e.what());
  }
  Sidecar s;
  if (!j.is_object() || !j.contains("shape") || !j["shape"].is_array()) {
    throw IoError(side.string() + ": missing \"shape\" array");
  }
  for (const auto& d : j["shape"]) {
    if (!d.is_number_integer() || d.get<long long>() <= 0) {
      throw IoError(side.string() + ": shape entries must be positive integers");
    }
    s.shape.push_back(d.get<std::size_t>());
  }
  if (j.contains("channel_axis") && !j["channel_axis"].is_null()) {
    if (!j["channel_axis"].is_number_integer() || j["channel_axis"].get<long long>() < 0) {
      throw IoError(side.string() + ": channel_axis must be a non-negative integer or null");
    }
    s.channel_axis = j["channel_axis"].get<std::size_t>();
  }
  return s;
}

Tensor read_raw(const std::filesystem::path& path) {
  const Sidecar side = read_sidecar(path);
  const std::string bytes = slurp(path, std::ios::in | std::ios::binary);
  if (bytes.empty()) throw IoError(path.string() + ": empty tensor file");
  if (bytes.size() % 4 != 0) throw IoError(path.string() + ": size is not a multiple of 4 bytes");
  const std::size_t n = bytes.size() / 4;
  Eigen::ArrayXd data(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    std::uint32_t raw = 0;
    std::memcpy(&raw, bytes.data() + 4 * i, 4);
    data[static_cast<Eigen::Index>(i)] = std::bit_cast<float>(to_little_endian(raw));
  }
  return Tensor(std::move(data), side.shape, side.channel_axis);
}

}  // namespace

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  return std::filesystem::path(path.string() + ".json");
}

Tensor read_tensor(const std::filesystem::path& path) { return is_csv(path) ? read_csv(path) : read_raw(path); }

void write_tensor(const std::filesystem::path& path, const Tensor& tensor) {
  if (is_csv(path)) {
    if (tensor.shape().size() != 1) throw IoError("CSV output needs a rank-1 tensor");
    std::string text;
    for (double v : tensor.data()) text += format_real(v) + "\n";
    write_text_file(path, text);
    return;
  }
  std::string bytes(tensor.size() * 4, '\0');
  for (std::size_t i = 0; i < tensor.size(); ++i) {
    const auto f = static_cast<float>(tensor.data()[static_cast<Eigen::Index>(i)]);
    const std::uint32_t raw = to_little_endian(std::bit_cast<std::uint32_t>(f));
    std::memcpy(bytes.data() + 4 * i, &raw, 4);
  }
  {
    std::ofstream out(path, std::ios::out | std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path.string());
  }
  json side;
  side["shape"] = tensor.shape();
  side["channel_axis"] = tensor.channel_axis() ? json(*tensor.channel_axis()) : json(nullptr);
  write_text_file(sidecar_path(path), side.dump() + "\n");
}

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::out | std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace fpq
