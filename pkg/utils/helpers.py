import logging
from typing import Dict, List, Sequence, Union

from langevin.potentials import BetaIndex, Potential, adversarial, quadratic, separable, smooth_nonquadratic

logger = logging.getLogger(__name__)

POTENTIAL_KINDS = ("quadratic", "separable", "adversarial", "smooth")


def _split(value) -> List[str]:
    if isinstance(value, str):
        return [part.strip() for part in value.split(",") if part.strip()]
    if isinstance(value, (int, float)):
        return [str(value)]
    return [str(part) for part in value]


def parse_int_list(value: Union[str, Sequence]) -> List[int]:
    """'16,32,64' (or a YAML list) -> [16, 32, 64]."""
    out = []
    for part in _split(value):
        number = float(part)
        if number != int(number):
            raise ValueError(f"{part!r} is not an integer")
        out.append(int(number))
    return out


def parse_float_list(value: Union[str, Sequence]) -> List[float]:
    return [float(part) for part in _split(value)]


def parse_beta(text: str) -> BetaIndex:
    """A bit string such as '0110' read as beta_{-N} ... beta_{N-1}."""
    text = str(text).strip()
    if not text or set(text) - {"0", "1"}:
        raise ValueError(f"beta must be a non-empty string of 0/1, got {text!r}")
    return BetaIndex.parse(text)


def _parse_fields(body: str) -> Dict[str, str]:
    fields = {}
    for item in body.split(","):
        item = item.strip()
        if not item:
            continue
        key, sep, value = item.partition("=")
        if not sep or not value.strip():
            raise ValueError(f"potential parameter {item!r} is not key=value")
        fields[key.strip()] = value.strip()
    return fields


def _take(fields: Dict[str, str], key: str, cast=float, default=None):
    if key not in fields:
        if default is None:
            raise ValueError(f"potential spec is missing '{key}'")
        return default
    try:
        return cast(fields.pop(key))
    except ValueError:
        raise ValueError(f"potential parameter '{key}' is not a valid {cast.__name__}") from None


def parse_potential(spec: str) -> Potential:
    """Build a potential from 'kind:key=value,...'.

    quadratic:u=1,L=4[,ell=..,d=..]
    separable:u=1|2|3,L=4          (one quadratic per dimension)
    adversarial:u=2,cx=0.25,n=8,xi=1,beta=0101...[,ell=..,L=..]
    smooth:ell=1,L=4[,d=..,amplitude=..]
    """
    kind, sep, body = str(spec).partition(":")
    kind = kind.strip()
    if kind not in POTENTIAL_KINDS:
        raise ValueError(f"unknown potential kind {kind!r}; expected one of {', '.join(POTENTIAL_KINDS)}")
    fields = _parse_fields(body) if sep else {}

    if kind == "quadratic":
        u = _take(fields, "u")
        p = quadratic(u, d=_take(fields, "d", int, 1), ell=_take(fields, "ell", float, u),
                      L=_take(fields, "L", float, u))
    elif kind == "separable":
        if "u" not in fields:
            raise ValueError("potential spec is missing 'u'")
        us = [float(part) for part in fields.pop("u").split("|")]
        L = _take(fields, "L", float, max(us))
        ell = _take(fields, "ell", float, min(us))
        p = separable([quadratic(u, ell=ell, L=L) for u in us])
    elif kind == "adversarial":
        if "beta" not in fields:
            raise ValueError("potential spec is missing 'beta'")
        beta = parse_beta(fields.pop("beta"))
        N = _take(fields, "n", int, beta.N)
        u = _take(fields, "u")
        xi = _take(fields, "xi")
        p = adversarial(u, _take(fields, "cx"), N, xi, beta, ell=_take(fields, "ell", float, u - xi),
                        L=_take(fields, "L", float, u + xi))
    else:
        p = smooth_nonquadratic(_take(fields, "ell"), _take(fields, "L"), d=_take(fields, "d", int, 1),
                                amplitude=_take(fields, "amplitude", float, 1.0))

    if fields:
        raise ValueError(f"unknown {kind} parameter(s): {', '.join(sorted(fields))}")
    logger.debug(f"Parsed potential {spec!r} -> {p.label}")
    return p
