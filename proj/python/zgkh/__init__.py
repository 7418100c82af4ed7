"""Python access to the zgkh library.

Complexes and reports come back as decoded JSON (dicts and lists).
"""

import json

try:
    from . import _zgkh
except ImportError:  # an in-tree build puts the extension next to the package
    import _zgkh

ZgkhError = _zgkh.ZgkhError
sha256_hex = _zgkh.sha256_hex
zigzag = _zgkh.zigzag

__all__ = ["ZgkhError", "complex", "invariants", "lambda_bounds", "run", "s_invariant", "sha256_hex",
           "staircase", "u_G", "zigzag"]


def _input(pd=None, braid=None, rational=None, complex=None):
    given = [(k, v) for k, v in (("pd", pd), ("braid", braid), ("rational", rational), ("complex", complex))
             if v is not None]
    if len(given) != 1:
        raise ValueError("give exactly one of pd, braid, rational, complex")
    kind, value = given[0]
    if kind == "braid" and not isinstance(value, str):
        value = "[" + ",".join(str(int(x)) for x in value) + "]"
    if kind == "complex" and not isinstance(value, str):
        value = json.dumps(value)
    return kind, value


def run(command, *args, emit="graph", basepoint=-1, **inputs):
    """Runs one CLI command; returns (exit_code, report)."""
    kind, source = _input(**inputs) if inputs else ("", "")
    out = json.loads(_zgkh.run_job(command, kind, source, [str(a) for a in args], emit, basepoint))
    return out["exit_code"], out["report"]


def complex(basepoint=-1, **inputs):
    return json.loads(_zgkh.complex_json(*_input(**inputs), basepoint))


def invariants(**inputs):
    code, report = run("invariants", **inputs)
    if code != 0:
        raise ZgkhError(report.get("error", "invariants failed"))
    return report


def u_G(**inputs):
    return _zgkh.u_G(*_input(**inputs))


def lambda_bounds(**inputs):
    return _zgkh.lambda_bounds(*_input(**inputs))


def s_invariant(p=0, **inputs):
    return _zgkh.s_invariant(*_input(**inputs), p)


def staircase(n):
    return json.loads(_zgkh.staircase_json(n))
