// SPDX-License-Identifier: Apache-2.0
//
// adarx - adaptive neural OFDM receiver simulator
// Copyright (C) 2026 The adarx authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef ADARX_CONTAINER_HPP
#define ADARX_CONTAINER_HPP

#include "adarx/rnn_receiver.hpp"

#include <json.hpp>

#include <filesystem>

namespace adarx {

// On-disk container: a CBOR-encoded document. Tensors are objects
//   {"name": str, "dtype": "f32" | "f64" | "u8", "shape": [..], "data": <bytes>}
// with row-major little-endian element data.
//
// Checkpoint document:
//   {"format": "adarx-checkpoint", "version": 1,
//    "config": {"lstm_units", "dense_units", "bits_per_symbol"},
//    "params": [tensor...], "adam": {"step", "m": [tensor...], "v": [tensor...]},
//    "metadata": {...}}
inline constexpr int kContainerVersion = 1;

nlohmann::json make_tensor(const std::string &name, std::span<const float> values, std::vector<std::int64_t> shape);
nlohmann::json make_tensor(const std::string &name, std::span<const double> values, std::vector<std::int64_t> shape);
nlohmann::json make_tensor(const std::string &name, std::span<const std::uint8_t> values,
                           std::vector<std::int64_t> shape);

std::vector<float> tensor_f32(const nlohmann::json &tensor);
std::vector<double> tensor_f64(const nlohmann::json &tensor);
std::vector<std::uint8_t> tensor_u8(const nlohmann::json &tensor);
std::vector<std::int64_t> tensor_shape(const nlohmann::json &tensor);

// Readable form: binary data replaced by a flat list of numbers.
nlohmann::json tensor_to_readable(const nlohmann::json &tensor);

void write_container(const std::filesystem::path &path, const nlohmann::json &doc);
nlohmann::json read_container(const std::filesystem::path &path);

nlohmann::json checkpoint_document(const RnnReceiver &receiver, const nlohmann::json &metadata = nlohmann::json::object());
RnnReceiver receiver_from_document(const nlohmann::json &doc);

void save_checkpoint(const std::filesystem::path &path, const RnnReceiver &receiver,
                     const nlohmann::json &metadata = nlohmann::json::object());
RnnReceiver load_checkpoint(const std::filesystem::path &path);
nlohmann::json load_checkpoint_metadata(const std::filesystem::path &path);

// Converts any container file into pretty-printed JSON with readable tensors.
void export_container_json(const std::filesystem::path &in, const std::filesystem::path &out);

}  // namespace adarx

#endif
