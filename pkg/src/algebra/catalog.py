"""
Built-in bases of vector fields on the (x, v) plane.

* ``sl3_realization`` - X1..X8, the sl(3, R) realization containing the
  lift of x'' + 3 x x' + x^3 = f(t).
* ``riccati2_scheme_V2`` - Y1..Y8, the linear space of the second-order
  Riccati scheme.
* ``riccati2_scheme_W`` - {Y2, Y8}, its Abelian subalgebra.
"""

from typing import Callable, Dict, List, Tuple

from ..errors import CatalogError
from .field_space import FieldSpace
from .polynomial import Polynomial, PolyVectorField


XV = ("x", "v")


def _field(dx=0, dv=0) -> PolyVectorField:
    return PolyVectorField(XV, (_poly(dx), _poly(dv)))


def _poly(value) -> Polynomial:
    if isinstance(value, Polynomial):
        return value
    return Polynomial.constant(XV, value)


def _xv() -> Tuple[Polynomial, Polynomial]:
    return Polynomial.variable(XV, "x"), Polynomial.variable(XV, "v")


def sl3_realization() -> List[PolyVectorField]:
    x, v = _xv()
    return [
        _field(v, -(3 * x * v + x ** 3)),
        _field(0, 1),
        _field(-1, 3 * x),
        _field(x, -2 * x ** 2),
        _field(v + 2 * x ** 2, -x * (v + 3 * x ** 2)),
        _field(2 * x * (v + x ** 2), 2 * (v ** 2 - x ** 4)),
        _field(1, -x),
        _field(2 * x, 4 * v),
    ]


def riccati2_scheme_V2() -> List[PolyVectorField]:
    x, v = _xv()
    return [
        _field(v, 0),
        _field(0, v),
        _field(0, x * v),
        _field(0, 1),
        _field(0, x),
        _field(0, x ** 2),
        _field(0, x ** 3),
        _field(x, 0),
    ]


def riccati2_scheme_W() -> List[PolyVectorField]:
    V2 = riccati2_scheme_V2()
    return [V2[1], V2[7]]


_CATALOG: Dict[str, Callable[[], List[PolyVectorField]]] = {
    "sl3_realization": sl3_realization,
    "riccati2_scheme_V2": riccati2_scheme_V2,
    "riccati2_scheme_W": riccati2_scheme_W,
}

# Short names accepted on the command line
ALIASES = {
    "sl3": "sl3_realization",
    "V2": "riccati2_scheme_V2",
    "W": "riccati2_scheme_W",
}


def catalog_names() -> List[str]:
    return sorted(_CATALOG)


def catalog(name: str) -> List[PolyVectorField]:
    """
    Return a built-in basis by name.

    Raises:
        CatalogError: If the name is unknown
    """
    key = ALIASES.get(name, name)
    if key not in _CATALOG:
        raise CatalogError(
            f"Unknown catalog basis '{name}'; available: {', '.join(catalog_names())}",
            name=name,
        )
    return _CATALOG[key]()


def catalog_space(name: str) -> FieldSpace:
    return FieldSpace.from_fields(catalog(name))
