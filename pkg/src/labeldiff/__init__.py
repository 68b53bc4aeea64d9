"""Diffusion-generated labeled datasets for sim2real detection experiments."""

__version__ = "0.1.0"
