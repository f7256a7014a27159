"""Exact computations for the chiral quantization of hypertoric varieties.

Modules: ``hypertoric`` (combinatorics), ``vertex_engine`` (free-field OPE
calculus), ``brst`` (chiral BRST complex), ``conformal`` (conformal vectors),
``zhu_weyl`` (Zhu and C2 algebras against the Weyl-algebra oracle) and
``cli``.
"""

__version__ = "0.1.0"
