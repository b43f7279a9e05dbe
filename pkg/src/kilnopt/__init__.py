"""Kiln emission surrogates, forecasting, setpoint optimization, and SNCR economics."""

__version__ = "0.1.0"
