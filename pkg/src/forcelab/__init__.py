"""Desk-scale laboratory for forcing over circuit Boolean algebras.

Modules: ``circuits`` (DAG store, truth tables, the algebra of circuits),
``formula`` (two-sorted formulas), ``translate`` (propositional translation
and Boolean values), ``generic`` (ideals, filters, forcing checks), ``mcv``
(monotone circuit value and witnessing), ``proofs`` (EF, EF(S), WF),
``randomized`` (eval_R and dWPHP experiments), ``suite`` and ``cli``.
"""

__version__ = "0.1.0"
