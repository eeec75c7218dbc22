from crystalspectra.crystal import QuotientGraph, PerturbationSpec, builtin, load_crystal, load_perturbation
from crystalspectra.floquet import assemble_fiber
from crystalspectra.bands import sample_bands, estimate_thresholds, mourre_constant
from crystalspectra.realspace import Box, build_h0, build_h
