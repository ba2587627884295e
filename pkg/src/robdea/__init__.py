"""Robustness-based ranking of decision making units."""
