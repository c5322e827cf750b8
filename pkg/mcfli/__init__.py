"""Multicore-fiber lensless imaging: SROP sensing, recovery solvers and Monte-Carlo harnesses."""

__version__ = "0.1.0"
