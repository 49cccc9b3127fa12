"""Duality relations for two-way interferometers with which-way detectors."""

from . import channel, engine, qmath, sqds
from .channel import ChannelConfig
from .engine import ConventionError, DualityReport, InterferometerConfig, duality_report
from .qmath import UnphysicalStateError
from .sqds import SqdsConfig, sqds_report

__all__ = [
    "ChannelConfig",
    "ConventionError",
    "DualityReport",
    "InterferometerConfig",
    "SqdsConfig",
    "UnphysicalStateError",
    "channel",
    "duality_report",
    "engine",
    "qmath",
    "sqds",
    "sqds_report",
]
