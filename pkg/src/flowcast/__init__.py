"""Hourly stream-flow forecasting with recurrent networks and baselines."""

__version__ = "0.1.0"
