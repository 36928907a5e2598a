"""Driving-scene QA dataset generation and chain-based reasoning evaluation."""

__version__ = "0.1.0"
