# SPDX-License-Identifier: Apache-2.0
"""Adaptive neural OFDM receiver simulator."""

import json as _json

from ._core import (
    Frame,
    InvalidArgument,
    IoError,
    Link,
    Receiver,
    ber_confidence,
    collection_time_s,
    doppler_frequency,
    ebn0_to_sigma,
    pdp_weights,
    sample_channel,
)
from ._core import run_scenario as _run_scenario
from ._core import scenario_preset as _scenario_preset

__all__ = [
    "Frame",
    "InvalidArgument",
    "IoError",
    "Link",
    "Receiver",
    "ber_confidence",
    "collection_time_s",
    "doppler_frequency",
    "ebn0_to_sigma",
    "pdp_weights",
    "run_scenario",
    "sample_channel",
    "scenario_preset",
]


def scenario_preset(name):
    """Preset scenario as a dict (corner, extreme or interference)."""
    return _json.loads(_scenario_preset(name))


def run_scenario(config, checkpoint=None):
    """Run a scenario given as a dict. Returns (records, csv_text)."""
    return _run_scenario(_json.dumps(config), checkpoint or "")
