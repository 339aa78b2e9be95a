"""Python access to the calcforge core."""

from ._core import (
    Expr,
    ParseError,
    canonicalize,
    check_integral,
    check_ode,
    corpus_stats,
    differentiate,
    from_prefix,
    gen_bwd,
    gen_fwd,
    gen_ode,
    integrate,
    make_ode,
    numeric_equiv,
    parse,
    parse_ode,
    run_cli,
    simplify,
    uglify,
)

__all__ = [
    "Expr",
    "ParseError",
    "canonicalize",
    "check_integral",
    "check_ode",
    "corpus_stats",
    "differentiate",
    "from_prefix",
    "gen_bwd",
    "gen_fwd",
    "gen_ode",
    "integrate",
    "make_ode",
    "numeric_equiv",
    "parse",
    "parse_ode",
    "run_cli",
    "simplify",
    "uglify",
]
