"""Glue between specs and the sequence builders: entropy-reference policy,
recipe dispatch, and small parsers for the command line."""

from __future__ import annotations

import math
import re

from .complexity import (
    complexity_table,
    entropy_bounds,
    kappa_sequence,
    perron_defect_constant,
)
from .errors import InputError
from .potential import TruncatedPotential
from .sequences import (
    build_cor53_sequence,
    build_thm34_sequence,
    build_thm51_sequence,
    build_thm52_sequence,
    custom_sequence,
    power_sequence,
)
from .subshift import SubshiftSpec

RECIPES = ("thm34", "thm51", "thm52", "cor53")


def entropy_reference(spec: SubshiftSpec, n_max: int):
    """(h_ref, conditional): the exact entropy when available, otherwise the
    best upper bound.  Upper bounds enlarge the gap sequence, which keeps the
    freezing inequalities valid; such results are flagged conditional."""
    est = entropy_bounds(spec, n_max)
    return est.reference, est.conditional


def sequence_from_recipe(spec: SubshiftSpec, recipe: str, *, i_max=None,
                         h_ref=None, c=None, j_max=None):
    """Build the named decay sequence for the spec, resolving defaults."""
    if recipe == "thm34":
        if i_max is None:
            i_max = 4 if spec.dimension == 1 else 2
        conditional = False
        if h_ref is None:
            n_ref = 2 ** i_max if spec.dimension == 1 else min(2 ** i_max, 8)
            h_ref, conditional = entropy_reference(spec, n_ref)
        table = complexity_table(spec, [2 ** i for i in range(i_max + 1)])
        return build_thm34_sequence(table, h_ref=h_ref, i_max=i_max,
                                    conditional=conditional)
    if recipe == "thm51":
        if spec.sided != "one":
            raise InputError("thm51 recipe requires a one-sided spec")
        if c is None:
            h, _ = entropy_reference(spec, 8)
            c = perron_defect_constant(spec, h, j_max=64)
        return build_thm51_sequence(c)
    if recipe == "thm52":
        if spec.sided != "one":
            raise InputError("thm52 recipe requires a one-sided spec")
        if j_max is None:
            j_max = 256
        i_need = int(math.log2(j_max)) + 1
        h_ref_val = h_ref
        if h_ref_val is None:
            h_ref_val, _ = entropy_reference(spec, 2 ** min(i_need, 6))
        kappa = kappa_sequence(spec, i_need, h_ref=h_ref_val)
        return build_thm52_sequence(kappa, j_max=j_max)
    if recipe == "cor53":
        return build_cor53_sequence()
    raise InputError(f"unknown recipe {recipe!r}; expected one of {RECIPES}")


def potential_from_recipe(spec: SubshiftSpec, recipe: str, radius: int,
                          **kwargs) -> TruncatedPotential:
    seq = sequence_from_recipe(spec, recipe, **kwargs)
    return TruncatedPotential(seq, spec, radius)


_POWER_RE = re.compile(r"^1/n\^(\d+(?:\.\d+)?)$")


def parse_sequence_expression(expr: str, dimension: int = 1):
    """Small closed-form sequence parser for the no-go classifier.

    Accepted: "1/n^P" (power), "c/n" (harmonic), "log^2/n", "log/n^d",
    "loglog/n^d".
    """
    expr = expr.replace(" ", "")
    m = _POWER_RE.match(expr)
    if m:
        p = float(m.group(1))
        if p > 1:
            return power_sequence(p - 1.0, dimension=dimension)
        if p == 1:
            return build_thm51_sequence(1.0)  # a_j ~ c/j, tagged as such
        return custom_sequence(lambda j: 1.0 / max(j, 1) ** p,
                               dimension=dimension, name=expr)
    if expr in ("1/n", "c/n"):
        return build_thm51_sequence(1.0)
    if expr == "log^2/n":
        return build_cor53_sequence()
    if expr in ("log/n^d", "log/n"):
        from .sequences import LOG_OVER_JD, AsymptoticClass

        def val(j):
            jj = max(j, 2)
            return math.log(jj) / jj ** dimension
        return custom_sequence(lambda j: max(val(j), val(3)) if j <= 3 else val(j),
                               dimension=dimension, name=expr,
                               asymptotic=AsymptoticClass(LOG_OVER_JD))
    if expr in ("loglog/n^d", "loglog/n"):
        from .sequences import LOGLOG_OVER_JD, AsymptoticClass

        def val2(j):
            jj = max(j, 3)
            return math.log(math.log(jj)) / jj ** dimension
        peak = max(val2(j) for j in range(3, 10))  # formula peaks below j=10
        return custom_sequence(lambda j: peak if j <= 9 else val2(j),
                               dimension=dimension, name=expr,
                               asymptotic=AsymptoticClass(LOGLOG_OVER_JD))
    raise InputError(f"cannot parse sequence expression {expr!r}")
