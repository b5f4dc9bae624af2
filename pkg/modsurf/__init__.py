"""Spectral data of the modular surface SL(2, Z)\\H.

Modules:
    specfun     complex Gamma, digamma, zeta, Dirichlet L, K_{ir}(y)
    hypgeom     Mobius action, fundamental-domain reduction, geodesic lengths
    maass       Maass cusp forms by collocation, eigenvalue search
    hecke       Hecke operators, L-series, Euler products, completed L-functions
    scattering  Eisenstein series, scattering determinant, winding number
    traceform   test-function pairs, trace-formula terms, Weyl counting curve
"""

__version__ = "0.1.0"
