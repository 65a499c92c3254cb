"""Moment bounds on cumulative entropies."""
