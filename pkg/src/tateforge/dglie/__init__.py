"""dg-Lie algebras over the field or a finite-dimensional cdga."""

from ..cdga import BaseCdga, CdgaAxiomViolation, CdgaModule, NotAModule, square_zero
from .ce import (
    CONVENTIONS,
    DEFAULT_CONVENTION,
    CEChains,
    CECochains,
    CEResult,
    NotARepresentation,
    Representation,
    ce_cohomology,
    ce_homology,
    coalgebra_check,
    convention_report,
)
from .envelope import PBWCertificate, envelope_quotient_oracle, pbw_symmetrize, sym_monomials, symmetrize
from .free import FreeLieAlgebra, WeightTooLarge, free_lie, necklace_dims, pbw_series_dims
from .lie import (
    DgLieAlgebra,
    LieAxiomViolation,
    abelian,
    base_change,
    corrupted_sl2,
    from_document,
    sl2,
    to_document,
    validate_lie,
)

__all__ = [name for name in dir() if not name.startswith("_")]
