"""Simulation and verification lab for weakly asymmetric speed-change exclusion processes."""

__version__ = "0.1.0"
