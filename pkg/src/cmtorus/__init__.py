"""Exact computations with the character lattices of CM tori.

Modules:

* ``exact_lattice``: integer matrices, Smith normal form, kernels, exactness
* ``groups``: finite groups from multiplication tables
* ``galois_cm``: CM Galois data, places, towers, presets
* ``tate_cohomology``: (Tate) cohomology of finite groups, crossed modules
* ``serre_weil``: the Serre and Weil-number character lattices and maps
* ``brauer_adelic``: Brauer invariants and H^1 models of tori
* ``weil_numbers``: Weil numbers, slopes, the alpha construction
* ``classfield_data``: form class groups, relative class numbers, irregular primes
* ``limits_engine``: lim and lim^1 of towers
"""

__version__ = "0.1.0"
