"""Mod-2 monodromy toolkit for knot surgery Lefschetz fibrations."""

__version__ = "0.1.0"
