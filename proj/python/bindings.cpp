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

#include "adarx/adaptation.hpp"
#include "adarx/baseline_rx.hpp"
#include "adarx/channel_model.hpp"
#include "adarx/container.hpp"
#include "adarx/harness.hpp"
#include "adarx/rng.hpp"

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace adarx;

namespace {

py::array_t<std::complex<double>> to_numpy(const CMatrix &m)
{
    py::array_t<std::complex<double>> out({m.rows(), m.cols()});
    std::copy(m.data(), m.data() + m.size(), out.mutable_data());
    return out;
}

CMatrix from_numpy(const py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast> &a)
{
    if (a.ndim() != 2)
        throw InvalidArgument("expected a 2-D complex array");
    CMatrix m(a.shape(0), a.shape(1));
    std::copy(a.data(), a.data() + a.size(), m.data());
    return m;
}

py::array_t<std::uint8_t> bits(const BitVector &b)
{
    py::array_t<std::uint8_t> out(static_cast<py::ssize_t>(b.size()));
    std::copy(b.begin(), b.end(), out.mutable_data());
    return out;
}

ChannelParams make_channel(int num_taps, double velocity_kmh, double decay_total_db)
{
    ChannelParams p;
    p.num_taps = num_taps;
    p.velocity_kmh = velocity_kmh;
    p.decay_total_db = decay_total_db;
    p.validate();
    return p;
}

py::dict record_dict(const BerRecord &r)
{
    py::dict d;
    d["receiver"] = r.receiver;
    d["ebn0_db"] = r.ebn0_db;
    d["ber"] = r.ber();
    d["bits"] = r.bits;
    d["errors"] = r.errors;
    d["frames"] = r.frames;
    d["ci95"] = r.bits ? ber_confidence(r) : 0.0;
    d["batches_accepted"] = r.batches_accepted;
    d["batches_rejected"] = r.batches_rejected;
    d["updates_applied"] = r.updates_applied;
    return d;
}

// One transmitted frame with everything a Python caller may want to inspect.
struct PyFrame {
    Transmission tx;
};

}  // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Adaptive neural OFDM receiver simulator";

    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    m.def("pdp_weights", [](int num_taps, double decay_total_db) {
        return compute_pdp_weights(num_taps, decay_total_db).weights;
    }, py::arg("num_taps"), py::arg("decay_total_db") = -13.0);
    m.def("doppler_frequency", &doppler_frequency, py::arg("velocity_kmh"), py::arg("carrier_freq_hz") = 5.9e9);
    m.def("ebn0_to_sigma", &ebn0_to_sigma, py::arg("ebn0_db"), py::arg("bits_per_symbol") = kBitsPerSymbol,
          py::arg("code_rate") = 0.5);
    m.def("ber_confidence", py::overload_cast<double, double>(&ber_confidence), py::arg("ber"), py::arg("bits"));
    m.def("collection_time_s", [](int batch_frames, int batches_per_retrain) {
        GatePolicy g;
        g.batch_frames = batch_frames;
        g.batches_per_retrain = batches_per_retrain;
        return collection_time_s(g, FrameGeometry{});
    }, py::arg("batch_frames") = 50, py::arg("batches_per_retrain") = 32);

    m.def("sample_channel", [](int num_taps, double velocity_kmh, std::uint64_t seed, double decay_total_db) {
        Rng rng(seed);
        return to_numpy(sample_channel_matrix(make_channel(num_taps, velocity_kmh, decay_total_db), FrameGeometry{},
                                              rng).h);
    }, py::arg("num_taps"), py::arg("velocity_kmh"), py::arg("seed") = 0, py::arg("decay_total_db") = -13.0,
       "Channel matrix H (36 x 64) of one frame.");

    py::class_<PyFrame>(m, "Frame")
        .def_property_readonly("y", [](const PyFrame &f) { return to_numpy(f.tx.grid.y); })
        .def_property_readonly("x", [](const PyFrame &f) { return to_numpy(f.tx.grid.x); })
        .def_property_readonly("h", [](const PyFrame &f) { return to_numpy(f.tx.h); })
        .def_property_readonly("info", [](const PyFrame &f) { return bits(f.tx.info); })
        .def_property_readonly("coded", [](const PyFrame &f) { return bits(f.tx.coded); })
        .def_property_readonly("sigma", [](const PyFrame &f) { return f.tx.noise.sigma; })
        .def_property_readonly("ebn0_db", [](const PyFrame &f) { return f.tx.noise.ebn0_db; });

    py::class_<Transceiver>(m, "Link")
        .def(py::init([] { return Transceiver(); }))
        .def_property_readonly("info_bits", [](const Transceiver &t) { return t.coding().info_bits(); })
        .def_property_readonly("code_rate", &Transceiver::code_rate)
        .def("transmit", [](const Transceiver &t, int num_taps, double velocity_kmh, double ebn0_db,
                            std::uint64_t seed, bool interference) {
            Rng rng(seed);
            const auto spec = interference ? InterferenceSpec::outer_four(t.geometry().num_subcarriers)
                                           : InterferenceSpec{};
            return PyFrame{t.transmit(make_channel(num_taps, velocity_kmh, -13.0), ebn0_db, rng, spec)};
        }, py::arg("num_taps"), py::arg("velocity_kmh"), py::arg("ebn0_db"), py::arg("seed") = 0,
           py::arg("interference") = false)
        .def("lmmse_iedd", [](const Transceiver &t, const PyFrame &f) {
            const auto corr = genie_correlation(f.tx.channel, t.geometry(), f.tx.noise.sigma * f.tx.noise.sigma);
            return bits(iedd_receive(f.tx.grid.y, t.pilots(), corr, f.tx.noise.sigma, t.coding()).hard_info);
        }, py::arg("frame"), "Information bits decided by the LMMSE IEDD baseline.")
        .def("perfect_idd", [](const Transceiver &t, const PyFrame &f) {
            return bits(perfect_knowledge_idd(f.tx.grid.y, f.tx.h, f.tx.noise.sigma, t.pilots(), t.coding()).hard_info);
        }, py::arg("frame"))
        .def("count_errors", [](const Transceiver &t, const PyFrame &f,
                                const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast> &info) {
            return t.count_info_errors(f.tx, std::span<const std::uint8_t>(info.data(), info.size()));
        }, py::arg("frame"), py::arg("info"));

    py::class_<RnnReceiver>(m, "Receiver")
        .def(py::init([](int lstm_units, int dense_units, std::uint64_t seed) {
            return RnnReceiver::initialized(RnnConfig{lstm_units, dense_units, kBitsPerSymbol}, seed);
        }), py::arg("lstm_units") = 64, py::arg("dense_units") = 8, py::arg("seed") = 0)
        .def_static("load", [](const std::string &path) { return load_checkpoint(path); }, py::arg("path"))
        .def("save", [](const RnnReceiver &r, const std::string &path) { save_checkpoint(path, r); }, py::arg("path"))
        .def_property_readonly("num_params", [](const RnnReceiver &r) { return r.network().params().size(); })
        .def_property_readonly("adam_step", [](const RnnReceiver &r) { return r.adam().step; })
        .def("logits", [](const RnnReceiver &r, const Transceiver &t, const PyFrame &f) {
            const auto g = r.logits(assemble_input(f.tx.grid.y, t.pilots(), f.tx.noise.sigma));
            py::array_t<double> out({g.num_symbols, g.num_subcarriers, g.bits_per_symbol});
            std::copy(g.values.begin(), g.values.end(), out.mutable_data());
            return out;
        }, py::arg("link"), py::arg("frame"), "Bit logits (positive favours 1), shape (36, 64, 4).")
        .def("detect", [](const RnnReceiver &r, const Transceiver &t, const PyFrame &f) {
            const auto d = rnn_detect(r, assemble_input(f.tx.grid.y, t.pilots(), f.tx.noise.sigma), t.pilots(),
                                      t.coding());
            return py::make_tuple(bits(d.hard_info), d.mean_syndrome_fraction());
        }, py::arg("link"), py::arg("frame"), "Information bits and syndrome fraction after 20 BP iterations.");

    m.def("run_scenario", [](const std::string &config_json, const std::string &checkpoint) {
        auto cfg = scenario_from_json(nlohmann::json::parse(config_json));
        std::optional<RnnReceiver> rx;
        if (!checkpoint.empty())
            cfg.checkpoint = checkpoint;
        if (cfg.uses_rnn()) {
            if (cfg.checkpoint.empty())
                throw InvalidArgument("RNN receivers need a checkpoint");
            rx = load_checkpoint(cfg.checkpoint);
        }
        ScenarioResult res;
        {
            py::gil_scoped_release release;
            res = run_scenario(cfg, rx ? &*rx : nullptr);
        }
        py::list records;
        for (const auto &r : res.records)
            records.append(record_dict(r));
        return py::make_tuple(records, format_csv(res.records));
    }, py::arg("config_json"), py::arg("checkpoint") = std::string(),
       "Runs a scenario given as a JSON string; returns (records, csv_text).");

    m.def("scenario_preset", [](const std::string &name) { return scenario_to_json(scenario_preset(name)).dump(); },
          py::arg("name"), "Preset scenario as a JSON string.");
}
