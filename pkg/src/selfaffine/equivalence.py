"""w-Lipschitz classification of two systems sharing the same matrix.

Under the open set condition, two totally disconnected attractors of (A, D1)
and (A, D2) are w-Lipschitz equivalent exactly when #D1 = #D2.  The decider
only answers Yes/No when every hypothesis is established; otherwise Unknown.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .affine_core import AffineSystem
from .dimension import mcmullen_dimension
from .errors import DigitOutOfFundamentalDomain, MatrixMismatch, NotDiagonal2x2, OscNotCertified
from .simplicity import SimplicityVerdict, osc_certified

EQUAL_MODULI_TOL = 1e-9


class Answer(str, Enum):
    YES = "Yes"
    NO = "No"
    UNKNOWN = "Unknown"


@dataclass
class EquivalenceReport:
    w_equivalent: Answer
    nearly_lipschitz: Answer
    euclidean_obstruction: tuple[float, float] | None
    # No when Hausdorff dimensions differ; otherwise Unknown (never Yes)
    euclidean_lipschitz: Answer = Answer.UNKNOWN
    evidence: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)


def cardinality_necessity_check(sys1: AffineSystem, sys2: AffineSystem,
                                assert_osc: tuple[bool, bool] = (False, False)) -> dict:
    for s, flag in zip((sys1, sys2), assert_osc):
        if not osc_certified(s, flag):
            raise OscNotCertified("cardinality check needs the open set condition on both systems")
    dims = tuple(s.dim * math.log(s.n_digits) / math.log(s.q) for s in (sys1, sys2))
    return {"w_dims": dims, "equal": sys1.n_digits == sys2.n_digits}


def _mcmullen_or_none(system: AffineSystem) -> float | None:
    try:
        return mcmullen_dimension(system)
    except (NotDiagonal2x2, DigitOutOfFundamentalDomain):
        return None


def decide(sys1: AffineSystem, sys2: AffineSystem, verdict1: SimplicityVerdict,
           verdict2: SimplicityVerdict, assert_osc: tuple[bool, bool] = (False, False)) -> EquivalenceReport:
    if sys1.matrix != sys2.matrix:
        raise MatrixMismatch("both systems must share the matrix A")
    osc = tuple(osc_certified(s, f) for s, f in zip((sys1, sys2), assert_osc))
    simple = (verdict1.simple, verdict2.simple)
    n1, n2 = sys1.n_digits, sys2.n_digits
    notes = []
    if all(osc) and all(simple):
        answer = Answer.YES if n1 == n2 else Answer.NO
    else:
        answer = Answer.UNKNOWN
        if not all(osc):
            notes.append("open set condition not established for both systems")
        if not all(simple):
            notes.append("total disconnectedness not established (simplicity verdict not Simple)")
    equal_moduli = abs(sys1.lambda0 - sys1.lambda1) <= EQUAL_MODULI_TOL
    nearly = Answer.YES if answer is Answer.YES and equal_moduli else Answer.UNKNOWN

    obstruction = None
    h1, h2 = _mcmullen_or_none(sys1), _mcmullen_or_none(sys2)
    if h1 is not None and h2 is not None:
        if abs(h1 - h2) > 1e-12:
            obstruction = (h1, h2)
            notes.append("Hausdorff dimensions differ: not Lipschitz equivalent under the Euclidean norm")
        else:
            notes.append("equal Hausdorff dimensions: Euclidean Lipschitz equivalence is undetermined")
    if answer is Answer.YES:
        notes.append("horizontal edges use J = K; the simple-iff-totally-disconnected step relies on "
                     "the bounded-component criterion for hyperbolic graphs of bounded degree")

    evidence = {
        "osc": list(osc),
        "simple": [v.status.value for v in (verdict1, verdict2)],
        "cardinalities": [n1, n2],
        "lambda0": sys1.lambda0,
        "lambda1": sys1.lambda1,
        "hausdorff_dims": [h1, h2],
    }
    euclid = Answer.NO if obstruction else Answer.UNKNOWN
    return EquivalenceReport(answer, nearly, obstruction, euclid, evidence, notes)
