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

#include "adarx/container.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

static_assert(std::endian::native == std::endian::little, "container I/O assumes a little-endian host");

namespace adarx {

using nlohmann::json;

namespace {

template <typename T>
json tensor_impl(const std::string &name, std::span<const T> values, std::vector<std::int64_t> shape,
                 const char *dtype)
{
    std::int64_t count = 1;
    for (auto d : shape) {
        if (d < 0)
            throw InvalidArgument("make_tensor: negative dimension");
        count *= d;
    }
    if (count != static_cast<std::int64_t>(values.size()))
        throw InvalidArgument("make_tensor: shape does not match the data size of " + name);
    std::vector<std::uint8_t> bytes(values.size() * sizeof(T));
    if (!bytes.empty())
        std::memcpy(bytes.data(), values.data(), bytes.size());
    return json{{"name", name}, {"dtype", dtype}, {"shape", shape}, {"data", json::binary(std::move(bytes))}};
}

template <typename T>
std::vector<T> tensor_data(const json &t, const char *dtype)
{
    if (!t.is_object() || !t.contains("dtype") || !t.contains("data") || !t["data"].is_binary())
        throw IoError("container: malformed tensor");
    if (t["dtype"] != dtype)
        throw IoError("container: tensor " + t.value("name", std::string("?")) + " has dtype " +
                      t["dtype"].get<std::string>() + ", expected " + dtype);
    const auto &bytes = t["data"].get_binary();
    if (bytes.size() % sizeof(T) != 0)
        throw IoError("container: tensor byte length is not a multiple of the element size");
    std::vector<T> out(bytes.size() / sizeof(T));
    if (!out.empty())
        std::memcpy(out.data(), bytes.data(), bytes.size());
    std::int64_t count = 1;
    for (auto d : tensor_shape(t))
        count *= d;
    if (count != static_cast<std::int64_t>(out.size()))
        throw IoError("container: tensor shape does not match its data");
    return out;
}

json param_tensors(const ParamLayout &layout, const std::vector<float> &values)
{
    json list = json::array();
    for (const auto &b : layout.blocks())
        list.push_back(make_tensor(b.name, std::span<const float>(values.data() + b.offset, b.size()),
                                   {b.rows, b.cols}));
    return list;
}

void read_param_tensors(const ParamLayout &layout, const json &list, std::vector<float> &values)
{
    if (!list.is_array() || list.size() != layout.blocks().size())
        throw IoError("checkpoint: parameter list does not match the network layout");
    values.assign(layout.total_size(), 0.0f);
    for (std::size_t i = 0; i < list.size(); ++i) {
        const auto &b = layout.blocks()[i];
        const auto &t = list[i];
        if (t.value("name", std::string()) != b.name)
            throw IoError("checkpoint: expected tensor " + b.name);
        const auto shape = tensor_shape(t);
        if (shape != std::vector<std::int64_t>{b.rows, b.cols})
            throw IoError("checkpoint: tensor " + b.name + " has the wrong shape");
        const auto data = tensor_f32(t);
        std::copy(data.begin(), data.end(), values.begin() + static_cast<std::ptrdiff_t>(b.offset));
    }
}

}  // namespace

json make_tensor(const std::string &name, std::span<const float> values, std::vector<std::int64_t> shape)
{
    return tensor_impl(name, values, std::move(shape), "f32");
}

json make_tensor(const std::string &name, std::span<const double> values, std::vector<std::int64_t> shape)
{
    return tensor_impl(name, values, std::move(shape), "f64");
}

json make_tensor(const std::string &name, std::span<const std::uint8_t> values, std::vector<std::int64_t> shape)
{
    return tensor_impl(name, values, std::move(shape), "u8");
}

std::vector<float> tensor_f32(const json &t) { return tensor_data<float>(t, "f32"); }
std::vector<double> tensor_f64(const json &t) { return tensor_data<double>(t, "f64"); }
std::vector<std::uint8_t> tensor_u8(const json &t) { return tensor_data<std::uint8_t>(t, "u8"); }

std::vector<std::int64_t> tensor_shape(const json &t)
{
    if (!t.is_object() || !t.contains("shape") || !t["shape"].is_array())
        throw IoError("container: tensor without shape");
    return t["shape"].get<std::vector<std::int64_t>>();
}

json tensor_to_readable(const json &t)
{
    json out = t;
    const std::string dtype = t.value("dtype", std::string());
    if (dtype == "f32")
        out["data"] = tensor_f32(t);
    else if (dtype == "f64")
        out["data"] = tensor_f64(t);
    else if (dtype == "u8")
        out["data"] = tensor_u8(t);
    else
        throw IoError("container: unknown dtype " + dtype);
    return out;
}

void write_container(const std::filesystem::path &path, const json &doc)
{
    const auto bytes = json::to_cbor(doc);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw IoError("write failed for " + path.string());
}

json read_container(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return json::from_cbor(bytes);
    } catch (const json::exception &e) {
        throw IoError("corrupt container " + path.string() + ": " + e.what());
    }
}

json checkpoint_document(const RnnReceiver &receiver, const json &metadata)
{
    const auto &cfg = receiver.config();
    const auto &layout = receiver.network().layout();
    json doc;
    doc["format"] = "adarx-checkpoint";
    doc["version"] = kContainerVersion;
    doc["config"] = {{"lstm_units", cfg.lstm_units},
                     {"dense_units", cfg.dense_units},
                     {"bits_per_symbol", cfg.bits_per_symbol}};
    doc["params"] = param_tensors(layout, receiver.network().params());
    const auto &adam = receiver.adam();
    json a;
    a["step"] = adam.step;
    if (adam.m.size() == layout.total_size()) {
        a["m"] = param_tensors(layout, adam.m);
        a["v"] = param_tensors(layout, adam.v);
    }
    doc["adam"] = std::move(a);
    doc["metadata"] = metadata;
    return doc;
}

RnnReceiver receiver_from_document(const json &doc)
{
    if (!doc.is_object() || doc.value("format", std::string()) != "adarx-checkpoint")
        throw IoError("not a checkpoint container");
    if (doc.value("version", 0) != kContainerVersion)
        throw IoError("unsupported checkpoint version");
    try {
        RnnConfig cfg;
        const auto &c = doc.at("config");
        cfg.lstm_units = c.at("lstm_units").get<int>();
        cfg.dense_units = c.at("dense_units").get<int>();
        cfg.bits_per_symbol = c.at("bits_per_symbol").get<int>();
        RnnReceiver rx(cfg);
        const auto &layout = rx.network().layout();
        read_param_tensors(layout, doc.at("params"), rx.network().params());
        const auto &a = doc.at("adam");
        rx.adam().step = a.at("step").get<std::int64_t>();
        if (a.contains("m")) {
            read_param_tensors(layout, a.at("m"), rx.adam().m);
            read_param_tensors(layout, a.at("v"), rx.adam().v);
        }
        return rx;
    } catch (const json::exception &e) {
        throw IoError(std::string("malformed checkpoint: ") + e.what());
    } catch (const InvalidArgument &e) {
        throw IoError(std::string("invalid checkpoint: ") + e.what());
    }
}

void save_checkpoint(const std::filesystem::path &path, const RnnReceiver &receiver, const json &metadata)
{
    write_container(path, checkpoint_document(receiver, metadata));
}

RnnReceiver load_checkpoint(const std::filesystem::path &path)
{
    return receiver_from_document(read_container(path));
}

json load_checkpoint_metadata(const std::filesystem::path &path)
{
    const auto doc = read_container(path);
    return doc.value("metadata", json::object());
}

namespace {

json readable(const json &node)
{
    if (node.is_object()) {
        if (node.contains("dtype") && node.contains("data") && node["data"].is_binary())
            return tensor_to_readable(node);
        json out = json::object();
        for (auto it = node.begin(); it != node.end(); ++it)
            out[it.key()] = readable(it.value());
        return out;
    }
    if (node.is_array()) {
        json out = json::array();
        for (const auto &v : node)
            out.push_back(readable(v));
        return out;
    }
    return node;
}

}  // namespace

void export_container_json(const std::filesystem::path &in, const std::filesystem::path &out)
{
    const json doc = readable(read_container(in));
    std::ofstream o(out, std::ios::trunc);
    if (!o)
        throw IoError("cannot open " + out.string() + " for writing");
    o << doc.dump(1) << '\n';
    if (!o)
        throw IoError("write failed for " + out.string());
}

}  // namespace adarx
