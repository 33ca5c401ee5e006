"""Cyclotomic multi-way block designs and their optimality.

Finite fields and cyclotomic cosets (:mod:`.gfcyclo`), designs in
multi-way heterogeneity settings (:mod:`.designcore`), the three
cyclotomic constructions (:mod:`.constructions`), exact C-matrices and
spectra (:mod:`.exactla`), majorization-based optimality checks
(:mod:`.optimality`) and the character-sum diagonalization
(:mod:`.charspec`).
"""
from .constructions import build, build_d1_star, build_d2_star, build_d3_star
from .designcore import (Design, Factor, MainEffectPlan, Setting, classify_setting,
                         dual_of_mep, incidence_matrix, is_equireplicate,
                         total_incidence, treatment_incidence)
from .errors import MultiwayError
from .exactla import (RationalMatrix, Spectrum, c_matrix, c_matrix_closedform,
                      c_matrix_definitional, exact_rank, exact_spectrum,
                      loewner_geq, verify_spectrum)
from .gfcyclo import FiniteField, build_cyclotomy, build_field, field_of_order
from .optimality import (EigenvalueVector, criterion_value, eigenvalue_vector,
                         m_better, verify_m_optimality, weakly_majorized_above)

__version__ = "0.1.0"
