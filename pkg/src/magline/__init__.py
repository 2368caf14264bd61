"""Magnetic trajectories of Killing magnetic fields in Euclidean 3-space."""
