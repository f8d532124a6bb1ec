"""Constitutive laws, the two solvers and the energy functionals."""
