"""Topological Abel-Jacobi map, height pairing and Poincare bundle lifting by exact discrete Hodge theory."""
