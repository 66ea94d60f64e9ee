"""Collision kernels: four builtins, a small expression language, and
homogeneity tooling.

All kernels are dimensionless functions of the scaled volumes x = v/u and
y = v1/u.  Physical prefactors are intentionally omitted; callers scale the
averaged result externally.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, replace

import numpy as np


class KernelSyntaxError(ValueError):
    """Kernel expression failed to parse; carries offset and expected set."""

    def __init__(self, offset, expected, found):
        self.offset = offset
        self.expected = tuple(expected)
        self.found = found
        super().__init__(
            f"syntax error at offset {offset}: expected "
            f"{', '.join(self.expected)}; found {found}"
        )


class NonHomogeneousError(ValueError):
    """Sampled homogeneity estimates disagree: no single degree q exists."""


class KernelDomainError(ArithmeticError):
    """Kernel evaluation hit a domain error (carries the x, y pair)."""

    def __init__(self, message, x=None, y=None):
        self.x = x
        self.y = y
        super().__init__(message)


@dataclass(frozen=True)
class KernelSpec:
    """A symmetric homogeneous collision kernel ready for quadrature.

    source is a builtin id (FM | CR | SC | SD) or a parsed expression tree;
    symmetric reflects what sampling actually verified, not an assumption.
    """

    source: object
    degree_q: float | None
    symmetric: bool
    label: str
    symmetry_warning: str | None = None


def _beta_sc(x, y):
    s = np.cbrt(x) + np.cbrt(y)
    return s * s * s


def _beta_sd(x, y):
    cx = np.cbrt(x)
    cy = np.cbrt(y)
    s = cx + cy
    return s * s * s * np.abs(cx - cy)


def _beta_fm(x, y):
    s = np.cbrt(x) + np.cbrt(y)
    return np.sqrt(1.0 / x + 1.0 / y) * s * s


def _beta_cr(x, y):
    cx = np.cbrt(x)
    cy = np.cbrt(y)
    return (1.0 / cx + 1.0 / cy) * (cx + cy)


_BUILTINS = {
    "SC": (_beta_sc, 1.0),
    "SD": (_beta_sd, 4.0 / 3.0),
    "FM": (_beta_fm, 1.0 / 6.0),
    "CR": (_beta_cr, 0.0),
}

# parseable transcription of each builtin, used by the pretty-printer
_BUILTIN_TEXT = {
    "SC": "(x^(1/3)+y^(1/3))^3",
    "SD": "(x^(1/3)+y^(1/3))^3*abs(x^(1/3)-y^(1/3))",
    "FM": "(x^(-1)+y^(-1))^(1/2)*(x^(1/3)+y^(1/3))^2",
    "CR": "(x^(-1/3)+y^(-1/3))*(x^(1/3)+y^(1/3))",
}


def builtin_kernel(kernel_id: str) -> KernelSpec:
    key = kernel_id.strip().upper()
    if key not in _BUILTINS:
        raise ValueError(
            f"unknown kernel id {kernel_id!r}: expected one of FM, CR, SC, SD"
        )
    _, q = _BUILTINS[key]
    return KernelSpec(source=key, degree_q=q, symmetric=True, label=key)


# ---------------------------------------------------------------------------
# expression language

_TOKEN_RE = re.compile(
    r"""(?P<num>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)
      | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
      | (?P<op>[-+*/^()=;])
      | (?P<ws>\s+)
    """,
    re.VERBOSE,
)

_PRIMARY_EXPECTED = ("a number", "'x'", "'y'", "'eta'", "'eta1'", "'abs'", "'('", "'-'")


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise KernelSyntaxError(pos, ("a token",), repr(text[pos]))
        if m.lastgroup != "ws":
            tokens.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


def _describe(token):
    kind, value, _ = token
    return "end of input" if kind == "end" else repr(value)


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, expected):
        tok = self.peek()
        raise KernelSyntaxError(tok[2], expected, _describe(tok))

    def expect_op(self, symbol):
        kind, value, _ = self.peek()
        if kind != "op" or value != symbol:
            self.fail((f"'{symbol}'",))
        return self.advance()

    def at_op(self, *symbols):
        kind, value, _ = self.peek()
        return kind == "op" and value in symbols

    def parse_expr(self):
        node = self.parse_term()
        while self.at_op("+", "-"):
            op = self.advance()[1]
            node = (op, node, self.parse_term())
        return node

    def parse_term(self):
        node = self.parse_factor()
        while self.at_op("*", "/"):
            op = self.advance()[1]
            node = (op, node, self.parse_factor())
        return node

    def parse_factor(self):
        base = self.parse_unary()
        if self.at_op("^"):
            self.advance()
            return ("^", base, self.parse_factor())  # right-associative
        return base

    def parse_unary(self):
        kind, value, _ = self.peek()
        if kind == "op" and value == "-":
            self.advance()
            return ("neg", self.parse_unary())
        if kind == "name" and value == "abs":
            self.advance()
            self.expect_op("(")
            inner = self.parse_expr()
            self.expect_op(")")
            return ("abs", inner)
        return self.parse_primary()

    def parse_primary(self):
        kind, value, _ = self.peek()
        if kind == "num":
            self.advance()
            return ("num", float(value))
        if kind == "name" and value in ("x", "eta"):
            self.advance()
            return ("var", "x")
        if kind == "name" and value in ("y", "eta1"):
            self.advance()
            return ("var", "y")
        if kind == "op" and value == "(":
            self.advance()
            inner = self.parse_expr()
            self.expect_op(")")
            return inner
        self.fail(_PRIMARY_EXPECTED)

    def parse_number_literal(self):
        negate = False
        while self.at_op("-"):
            self.advance()
            negate = not negate
        kind, value, _ = self.peek()
        if kind != "num":
            self.fail(("a number",))
        self.advance()
        v = float(value)
        return -v if negate else v


def _eval_tree(node, x, y):
    kind = node[0]
    if kind == "num":
        return node[1]
    if kind == "var":
        return x if node[1] == "x" else y
    if kind == "neg":
        return -_eval_tree(node[1], x, y)
    if kind == "abs":
        return np.abs(_eval_tree(node[1], x, y))
    a = _eval_tree(node[1], x, y)
    b = _eval_tree(node[2], x, y)
    if kind == "+":
        return a + b
    if kind == "-":
        return a - b
    if kind == "*":
        return a * b
    if kind == "/":
        return np.divide(a, b)
    if kind == "^":
        return np.power(a, b)
    raise AssertionError(f"unknown node kind {kind!r}")


def _tree_text(node):
    kind = node[0]
    if kind == "num":
        return repr(node[1])
    if kind == "var":
        return node[1]
    if kind == "neg":
        return f"(-{_tree_text(node[1])})"
    if kind == "abs":
        return f"abs({_tree_text(node[1])})"
    # full parentheses preserve the tree shape (and hence values) exactly
    return f"({_tree_text(node[1])}{kind}{_tree_text(node[2])})"


def format_kernel(spec: KernelSpec) -> str:
    """Parseable text form; re-parsing gives identical values."""
    if isinstance(spec.source, str):
        return _BUILTIN_TEXT[spec.source]
    return _tree_text(spec.source)


def eval_kernel(spec: KernelSpec, x, y):
    """beta(x, y) for scalars or numpy arrays (arrays may carry NaN through;
    scalar domain failures raise KernelDomainError)."""
    scalar = np.isscalar(x) and np.isscalar(y)
    if scalar and (x <= 0 or y <= 0):
        raise ValueError(f"kernel arguments must be positive, got ({x}, {y})")
    with np.errstate(all="ignore"):
        if isinstance(spec.source, str):
            val = _BUILTINS[spec.source][0](x, y)
        else:
            val = _eval_tree(spec.source, x, y)
    if scalar:
        v = float(val)
        if not math.isfinite(v):
            raise KernelDomainError(
                f"kernel undefined at (x = {x}, y = {y}): value {v}", x, y
            )
        return v
    return val


def homogeneity_degree(spec: KernelSpec) -> float:
    """Numerical estimate of q from beta(a x, a y) = a^q beta(x, y).

    Averages ln-ratio estimates over 32 sample pairs and a in {2, 1/2};
    a spread beyond 1e-6 means no single degree fits.
    """
    rng = np.random.default_rng(20250831)
    estimates = []
    for _ in range(32):
        x, y = 10.0 ** rng.uniform(-1.5, 1.5, 2)
        base = eval_kernel(spec, float(x), float(y))
        for alpha in (2.0, 0.5):
            scaled = eval_kernel(spec, float(alpha * x), float(alpha * y))
            if base <= 0.0 or scaled <= 0.0:
                raise NonHomogeneousError(
                    f"kernel not positive at sample (x = {x}, y = {y})"
                )
            estimates.append(math.log(scaled / base) / math.log(alpha))
    spread = max(estimates) - min(estimates)
    if spread > 1e-6:
        raise NonHomogeneousError(
            f"homogeneity estimates spread {spread:.3e} over "
            f"{len(estimates)} samples (range {min(estimates):.6f}"
            f" to {max(estimates):.6f})"
        )
    return float(np.mean(estimates))


def _verify_symmetry(spec: KernelSpec):
    rng = np.random.default_rng(27182818)
    worst = 0.0
    where = None
    for _ in range(64):
        x, y = 10.0 ** rng.uniform(-1.5, 1.5, 2)
        a = eval_kernel(spec, float(x), float(y))
        b = eval_kernel(spec, float(y), float(x))
        scale = max(abs(a), abs(b), 1e-300)
        rel = abs(a - b) / scale
        if rel > worst:
            worst = rel
            where = (float(x), float(y))
    if worst > 1e-10:
        return f"asymmetric: relative difference {worst:.3e} at {where}"
    return None


def parse_kernel(text: str) -> KernelSpec:
    """Parse an expression kernel; see the grammar in the package docs.

    An optional "q=<number>;" prefix fixes the homogeneity degree, which is
    otherwise estimated numerically (and must exist).  Symmetry is checked
    by sampling; an asymmetric kernel parses but carries a warning.
    """
    tokens = _tokenize(text)
    parser = _Parser(tokens)
    explicit_q = None
    if (
        tokens[0][:2] == ("name", "q")
        and len(tokens) > 1
        and tokens[1][:2] == ("op", "=")
    ):
        parser.advance()
        parser.advance()
        explicit_q = parser.parse_number_literal()
        parser.expect_op(";")
    tree = parser.parse_expr()
    if parser.peek()[0] != "end":
        parser.fail(("'+'", "'-'", "'*'", "'/'", "'^'", "end of input"))
    spec = KernelSpec(
        source=tree,
        degree_q=explicit_q,
        symmetric=True,
        label=text.strip(),
    )
    warning = _verify_symmetry(spec)
    if warning is not None:
        spec = replace(spec, symmetric=False, symmetry_warning=warning)
    if explicit_q is None:
        spec = replace(spec, degree_q=homogeneity_degree(spec))
    return spec


def euler_identity_residual(spec: KernelSpec, x: float, y: float, h: float) -> float:
    """x db/dx + y db/dy - q b, centrally differenced and scaled by b.

    The caller keeps (x, y) away from non-smooth loci (the SD diagonal);
    smooth homogeneous kernels give O(h^2).
    """
    if spec.degree_q is None:
        raise ValueError("kernel has no degree set")
    b = eval_kernel(spec, x, y)
    dbdx = (eval_kernel(spec, x * (1 + h), y) - eval_kernel(spec, x * (1 - h), y)) / (
        2 * h * x
    )
    dbdy = (eval_kernel(spec, x, y * (1 + h)) - eval_kernel(spec, x, y * (1 - h))) / (
        2 * h * y
    )
    return (x * dbdx + y * dbdy - spec.degree_q * b) / b
