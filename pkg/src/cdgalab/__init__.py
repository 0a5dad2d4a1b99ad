"""Exact-arithmetic workbench for commutative differential graded algebras.

Modules:

* ``exactlin``  -- rational linear algebra kernel (RREF, kernels, solves)
* ``graded``    -- free graded-commutative algebras with Koszul signs
* ``cdga``      -- differentials, truncations, cohomology, morphisms
* ``polyforms`` -- polynomial forms on simplices, integration, extension
* ``sullivan``  -- minimal Sullivan models and free-loop models
* ``gluing``    -- fiber products, Mayer-Vietoris, suspension models
* ``localsys``  -- local systems of DG algebras over simplicial complexes
* ``specseq``   -- spectral sequences of filtered complexes
* ``cli``       -- JSON problem-file front end
"""

__version__ = "0.1.0"
