"""Finite groups with semidihedral Sylow 2-subgroups.

Subpackages build the standard families as permutation groups, read off
their 2-local fusion, chop their mod-2 permutation modules and classify
the principal 2-block. ``tameblocks.classifier.classify`` is the entry point.
"""

__version__ = "0.1.0"
