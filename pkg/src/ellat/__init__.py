"""Lattice operations on EL concept descriptions."""
from .errors import (BottomError, BudgetExceeded, CyclicDefinitionError, EllatError,
                     NotCycleRestrictedError, ParseError, UnknownNameError)
from .syntax import (BOTTOM, TOP, Concept, Measures, Signature, conjoin, exists, measure,
                     name, parse, parse_signature, restrict, subconcepts, to_text)
from .order import equiv, lcs, mgd, reduce, strictly, strongly_not_subsumed, subsumes

__version__ = "0.1.0"
