"""Exact rational bookkeeping for Strichartz-type exponents.

Every number here is a :class:`fractions.Fraction`; the only non-rational
value is the explicit infinity marker ``INF`` used for time exponents, with
``1/INF == 0``.  The claim database lives in ``data/claims.json`` as
formula strings in the dimension ``d`` (and the window variable ``R``),
evaluated by a small whitelist interpreter so no Python ``eval`` is involved.
"""

from __future__ import annotations

import ast
import json
import operator
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Union


class DomainError(ValueError):
    """Argument outside the range where a formula is meaningful."""


class ClaimFormatError(ValueError):
    """Malformed claim record or formula."""


class _Infinity:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()

Exponent = Union[Fraction, _Infinity]


def as_rational(x) -> Fraction:
    if isinstance(x, _Infinity):
        raise DomainError("infinity is not a rational")
    if isinstance(x, float):
        # floats are accepted only when they are exact binary fractions the
        # caller clearly meant; prefer strings like "13/10"
        return Fraction(x)
    return Fraction(x)


def reciprocal(x: Exponent) -> Fraction:
    if isinstance(x, _Infinity):
        return Fraction(0)
    x = as_rational(x)
    if x == 0:
        raise DomainError("reciprocal of zero exponent")
    return 1 / x


def _exponent(x) -> Exponent:
    if isinstance(x, _Infinity):
        return x
    if isinstance(x, str) and x.strip().lower() in ("inf", "infinity", "oo"):
        return INF
    return as_rational(x)


@dataclass(frozen=True)
class AdmissiblePair:
    q: Exponent
    r: Fraction
    s: Fraction
    d: int

    def __post_init__(self):
        object.__setattr__(self, "q", _exponent(self.q))
        r = _exponent(self.r)
        if isinstance(r, _Infinity):
            raise DomainError("spatial exponent r must be finite")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "s", as_rational(self.s))
        if int(self.d) != self.d or self.d < 2:
            raise DomainError(f"dimension must be an integer >= 2, got {self.d}")
        if not isinstance(self.q, _Infinity) and self.q < 2:
            raise DomainError(f"time exponent must be >= 2, got {self.q}")
        if self.r < 2:
            raise DomainError(f"space exponent must be >= 2, got {self.r}")

    def decay_slack(self) -> Fraction:
        """(d-1)/4 - 1/q - (d-1)/(2r); nonnegative when the decay condition holds."""
        return Fraction(self.d - 1, 4) - reciprocal(self.q) - Fraction(self.d - 1, 2) / self.r

    def scaling_residual(self) -> Fraction:
        """1/q + d/r - (d/2 - s); zero exactly when the scaling condition holds."""
        return reciprocal(self.q) + self.d / self.r - (Fraction(self.d, 2) - self.s)


@dataclass(frozen=True)
class HolderSplit:
    target: Fraction
    parts: tuple

    def __post_init__(self):
        object.__setattr__(self, "target", as_rational(self.target))
        object.__setattr__(self, "parts", tuple(as_rational(p) for p in self.parts))


def critical_regularity(d: int) -> Fraction:
    if d < 3:
        raise DomainError(f"critical regularity needs d >= 3, got {d}")
    return Fraction(d - 2, 2)


def alpha_exponent(d: int) -> Fraction:
    if d < 6:
        raise DomainError(f"derivative count alpha needs d >= 6, got {d}")
    return Fraction(d * d - 4 * d + 1, 2 * (d - 1))


def is_wave_admissible(pair: AdmissiblePair) -> bool:
    return pair.decay_slack() >= 0 and pair.scaling_residual() == 0


def admissible_regularity(q: Exponent, r, d: int) -> Fraction:
    """The unique s for which (q, r) satisfies the scaling condition."""
    return Fraction(d, 2) - reciprocal(_exponent(q)) - d * reciprocal(_exponent(r))


def holder_split_valid(split: HolderSplit) -> bool:
    values = (split.target,) + split.parts
    if any(v < 0 or v > 1 for v in values):
        return False
    return sum(split.parts, Fraction(0)) == split.target


def decay_R_window(d: int) -> tuple[Fraction, Fraction]:
    if d < 6:
        raise DomainError(f"decay window needs d >= 6, got {d}")
    lo = Fraction(2 * (d - 1), d - 3)
    hi = min(Fraction(2 * d, d - 4), Fraction(3 * d, d - 1))
    if not lo < hi:
        raise ArithmeticError(f"empty decay window at d={d}: ({lo}, {hi})")
    return lo, hi


# formula interpreter

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
}
_FUNCS = {"min": min, "max": max}


def _eval_node(node, env):
    if isinstance(node, ast.Expression):
        return _eval_node(node.body, env)
    if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
        return Fraction(node.value)
    if isinstance(node, ast.Name):
        if node.id not in env:
            raise ClaimFormatError(f"unknown symbol {node.id!r}")
        return env[node.id]
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        value = _eval_node(node.operand, env)
        return -value if isinstance(node.op, ast.USub) else value
    if isinstance(node, ast.BinOp):
        left = _eval_node(node.left, env)
        right = _eval_node(node.right, env)
        if isinstance(node.op, ast.Pow):
            if right.denominator != 1:
                raise ClaimFormatError("only integer powers are allowed")
            return left ** int(right)
        op = _BINOPS.get(type(node.op))
        if op is None:
            raise ClaimFormatError(f"operator {type(node.op).__name__} not allowed")
        if op is operator.truediv and right == 0:
            raise DomainError("division by zero in formula")
        return op(left, right)
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS and not node.keywords:
        return _FUNCS[node.func.id](*(_eval_node(a, env) for a in node.args))
    raise ClaimFormatError(f"unsupported syntax: {ast.dump(node)}")


def evaluate(formula: str, **symbols) -> Exponent:
    """Evaluate a formula string exactly; "inf" maps to INF."""
    text = str(formula).strip()
    if text.lower() in ("inf", "infinity", "oo"):
        return INF
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ClaimFormatError(f"cannot parse {formula!r}: {exc}") from exc
    env = {k: Fraction(v) for k, v in symbols.items()}
    return _eval_node(tree, env)


# claim database

_OPS = {"<": operator.lt, "<=": operator.le, ">": operator.gt, ">=": operator.ge, "==": operator.eq}


@dataclass(frozen=True)
class Claim:
    id: str
    kind: str
    description: str
    data: dict
    expected: bool = True
    min_dim: int = 6

    @classmethod
    def from_record(cls, rec: dict) -> "Claim":
        try:
            cid, kind = rec["id"], rec["kind"]
        except KeyError as exc:
            raise ClaimFormatError(f"claim record missing {exc}") from exc
        if kind not in _CHECKERS:
            raise ClaimFormatError(f"claim {cid}: unknown kind {kind!r}")
        payload = {k: v for k, v in rec.items() if k not in ("id", "kind", "description", "expected", "min_dim")}
        return cls(cid, kind, rec.get("description", ""), payload,
                   bool(rec.get("expected", True)), int(rec.get("min_dim", 6)))


@dataclass(frozen=True)
class ClaimResult:
    id: str
    kind: str
    formula: str
    holds: bool
    expected: bool
    residual: Fraction

    @property
    def passed(self) -> bool:
        return self.holds == self.expected


@dataclass
class ClaimReport:
    d: int
    results: list = field(default_factory=list)

    @property
    def failures(self) -> list:
        return [r for r in self.results if not r.passed]

    @property
    def all_passed(self) -> bool:
        return not self.failures

    def as_dict(self) -> dict:
        return {
            "d": self.d,
            "passed": self.all_passed,
            "claims": [
                {"id": r.id, "kind": r.kind, "formula": r.formula, "holds": r.holds,
                 "expected": r.expected, "passed": r.passed, "residual": str(r.residual)}
                for r in self.results
            ],
        }


def _check_admissible(data, d):
    pair = AdmissiblePair(evaluate(data["q"], d=d), evaluate(data["r"], d=d), evaluate(data["s"], d=d), d)
    scale = pair.scaling_residual()
    slack = pair.decay_slack()
    holds = scale == 0 and slack >= 0
    # report the scaling mismatch if present, otherwise any decay deficit
    residual = scale if scale != 0 else min(slack, Fraction(0))
    return holds, residual, f"(q,r,s)=({data['q']}, {data['r']}, {data['s']})"


def _check_holder(data, d):
    split = HolderSplit(evaluate(data["target"], d=d), [evaluate(p, d=d) for p in data["parts"]])
    residual = sum(split.parts, Fraction(0)) - split.target
    return holder_split_valid(split), residual, f"{data['target']} = " + " + ".join(data["parts"])


def _check_identity(data, d):
    residual = evaluate(data["lhs"], d=d) - evaluate(data["rhs"], d=d)
    return residual == 0, residual, f"{data['lhs']} == {data['rhs']}"


def _check_inequality(data, d):
    op = _OPS[data["op"]]
    lhs, rhs = evaluate(data["lhs"], d=d), evaluate(data["rhs"], d=d)
    return op(lhs, rhs), lhs - rhs, f"{data['lhs']} {data['op']} {data['rhs']}"


def _check_window(data, d):
    # expression must be affine in 1/R: then the open-window statement
    # reduces to the closed check at both ends plus a strict check inside
    lo, hi = decay_R_window(d)
    a, b = 1 / hi, 1 / lo
    mid = (a + b) / 2
    expr = data["expr"]
    rhs = evaluate(data["rhs"], d=d)
    fa, fb, fm = (evaluate(expr, d=d, R=1 / x) - rhs for x in (a, b, mid))
    if fm * 2 != fa + fb:
        raise ClaimFormatError(f"window expression {expr!r} is not affine in 1/R")
    op = data["op"]
    if op in (">", ">="):
        holds = fa >= 0 and fb >= 0 and (fm > 0 if op == ">" else True)
        residual = min(fa, fb)
    elif op in ("<", "<="):
        holds = fa <= 0 and fb <= 0 and (fm < 0 if op == "<" else True)
        residual = max(fa, fb)
    else:
        raise ClaimFormatError(f"window claims need an ordering operator, got {op!r}")
    return holds, residual, f"{expr} {op} {data['rhs']} for R in ({lo}, {hi})"


_CHECKERS = {
    "admissible": _check_admissible,
    "holder": _check_holder,
    "identity": _check_identity,
    "inequality": _check_inequality,
    "window": _check_window,
}


def load_claims(path=None) -> list:
    if path is None:
        text = resources.files("wavecrit").joinpath("data/claims.json").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    raw = json.loads(text)
    records = raw["claims"] if isinstance(raw, dict) else raw
    return [Claim.from_record(r) for r in records]


def check_claim(claim: Claim, d: int) -> ClaimResult:
    holds, residual, formula = _CHECKERS[claim.kind](claim.data, d)
    return ClaimResult(claim.id, claim.kind, formula, bool(holds), claim.expected, residual)


def verify_claims(d: int, claims=None) -> ClaimReport:
    """Evaluate every claim in the database at dimension d."""
    if d < 6:
        raise DomainError(f"claim database is stated for d >= 6, got {d}")
    if claims is None:
        claims = load_claims()
    report = ClaimReport(d)
    for claim in claims:
        if d >= claim.min_dim:
            report.results.append(check_claim(claim, d))
    return report


def perturb_claim(claim: Claim, field_name: str, delta: str) -> Claim:
    """Copy of claim with ``delta`` added to one of its formulas (for fault injection)."""
    data = dict(claim.data)
    if field_name not in data:
        raise KeyError(field_name)
    data[field_name] = f"({data[field_name]}) + ({delta})"
    return Claim(claim.id + ".perturbed", claim.kind, claim.description, data, claim.expected, claim.min_dim)
