"""Grids, discrete operators, quadrature, linear solvers and field I/O."""
