"""Synthetic tabular data: statistical, agent-based and GAN generators plus fidelity evaluation."""

__version__ = "0.1.0"
