"""Finite-scale verification of Akcoglu's L1 dilation and Rota's martingale dilation."""

__version__ = "0.1.0"
