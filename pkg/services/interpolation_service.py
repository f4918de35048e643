"""
Application Layer: interpolation kernel.

Equidistant nodes, Newton-form interpolation expanded to local monomial
coefficients, exact coefficientwise antiderivatives, and componentwise
divided differences. Values are stacked as (count, d) arrays, so every
routine works on all components at once.
"""

from typing import Optional, Sequence

import numpy as np
import numpy.typing as npt

from core.exceptions import InvalidArgument, InvalidNodes, NonFiniteValue
from models.polynomials import LocalPolynomial
from models.state import StateVector, ensure_finite

NodeSet = npt.NDArray[np.float64]

MAX_NODES = 11


def equidistant_nodes(x0: float, x1: float, count: int) -> NodeSet:
    """
    Equally spaced nodes in [x0, x1].

    count == 1 gives the single node x0; count >= 2 gives nodes whose first
    is x0 and last is x1 exactly.

    Raises:
        InvalidNodes: if count < 1 or x0 >= x1
    """
    if count < 1 or count > MAX_NODES:
        raise InvalidNodes(f"node count must be in [1, {MAX_NODES}], got {count}")
    if not x0 < x1:
        raise InvalidNodes(f"need x0 < x1, got [{x0}, {x1}]")
    if count == 1:
        return np.array([x0], dtype=np.float64)
    nodes = x0 + (x1 - x0) * (np.arange(count, dtype=np.float64) / (count - 1))
    nodes[0] = x0
    nodes[-1] = x1
    return nodes


def _stack(nodes: Sequence[float], values: Sequence[StateVector]) -> tuple[np.ndarray, np.ndarray]:
    points = np.asarray(nodes, dtype=np.float64).reshape(-1)
    table = np.asarray(values, dtype=np.float64)
    if table.ndim == 1:
        table = table.reshape(-1, 1)
    if points.size == 0 or points.size > MAX_NODES:
        raise InvalidNodes(f"node count must be in [1, {MAX_NODES}], got {points.size}")
    if table.shape[0] != points.size:
        raise InvalidNodes(f"{points.size} nodes but {table.shape[0]} values")
    ensure_finite(points, "nodes")
    ensure_finite(table, "node values")
    if points.size > 1 and np.any(np.diff(np.sort(points)) == 0.0):
        raise InvalidNodes(f"coincident nodes: {points.tolist()}")
    return points, table


def divided_difference_table(points: np.ndarray, table: np.ndarray) -> np.ndarray:
    """
    Top row of the divided-difference table on already validated (count,)
    nodes and (count, d) values: row k is the k-th order divided difference
    over nodes[0..k].
    """
    coef = table.copy()
    n = points.size
    for j in range(1, n):
        coef[j:] = (coef[j:] - coef[j - 1 : -1]) / (points[j:] - points[: n - j]).reshape(-1, 1)
    return coef


def newton_to_monomial(points: np.ndarray, coef: np.ndarray, origin: float) -> np.ndarray:
    """Expand Newton-form coefficients into monomial rows in (t - origin)."""
    shifts = points - origin

    # Horner on the Newton form: p = c_{n-1}; p = p * (s - shift_j) + c_j
    n, d = coef.shape
    poly = np.zeros((n, d), dtype=np.float64)
    poly[0] = coef[-1]
    degree = 0
    for j in range(n - 2, -1, -1):
        shifted = np.zeros_like(poly)
        shifted[1 : degree + 2] = poly[: degree + 1]
        shifted[: degree + 1] -= shifts[j] * poly[: degree + 1]
        shifted[0] += coef[j]
        poly = shifted
        degree += 1
    return poly


def newton_coefficients(nodes: Sequence[float], values: Sequence[StateVector]) -> np.ndarray:
    """Validated divided-difference top row, shape (count, d)."""
    points, table = _stack(nodes, values)
    return divided_difference_table(points, table)


def divided_difference(nodes: Sequence[float], values: Sequence[StateVector]) -> StateVector:
    """
    Order-(count-1) divided difference, componentwise.

    Raises:
        InvalidNodes: on coincident nodes or mismatched lengths
    """
    coef = newton_coefficients(nodes, values)
    result = coef[-1]
    if not np.all(np.isfinite(result)):
        raise NonFiniteValue(f"divided difference overflowed: {result.tolist()}")
    return result


def interpolate(
    nodes: Sequence[float],
    values: Sequence[StateVector],
    origin: Optional[float] = None,
) -> LocalPolynomial:
    """
    Interpolating vector polynomial of degree <= count-1, returned as local
    monomial coefficients in (t - origin); origin defaults to nodes[0].
    """
    points, table = _stack(nodes, values)
    if origin is None:
        origin = float(points[0])
    rows = newton_to_monomial(points, divided_difference_table(points, table), origin)
    return LocalPolynomial(origin=origin, coefficients=rows)


def antiderivative_rows(rows: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Rows of y + integral of the polynomial given by rows, same origin."""
    divisors = np.arange(1, rows.shape[0] + 1, dtype=np.float64).reshape(-1, 1)
    return np.vstack([y, rows / divisors])


def integrate_from(poly: LocalPolynomial, x_i: float, y_i: StateVector) -> LocalPolynomial:
    """
    P(t) = y_i + integral from x_i to t of poly, computed coefficientwise.
    P(x_i) = y_i exactly and P' = poly exactly.
    """
    if poly.origin != x_i:
        poly = rebase(poly, x_i)
    y = np.asarray(y_i, dtype=np.float64).reshape(-1)
    if y.shape[0] != poly.dimension:
        raise InvalidArgument(f"y_i has {y.shape[0]} components, polynomial has {poly.dimension}")
    ensure_finite(y, "y_i")
    return LocalPolynomial(origin=x_i, coefficients=antiderivative_rows(poly.coefficients, y))


def rebase(poly: LocalPolynomial, origin: float) -> LocalPolynomial:
    """Re-expand a local polynomial around a new origin (Taylor shift)."""
    shift = origin - poly.origin
    rows = poly.coefficients.copy()
    n = rows.shape[0]
    for k in range(n - 1):
        for j in range(n - 2, k - 1, -1):
            rows[j] += shift * rows[j + 1]
    return LocalPolynomial(origin=origin, coefficients=rows)
