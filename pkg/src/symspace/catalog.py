"""Named spaces: a small text catalog mapping keys to Lie algebra builders."""

from functools import lru_cache
from importlib import resources

from .lie_core import build_sl, build_so, build_sp, build_su, direct_sum
from .root_system import build_division_algebra_nilpotent, nilpotent_structure, restricted_roots

BUILDERS = {"so": build_so, "su": build_su, "sp": build_sp, "sl": build_sl}
# families whose simple factors are real or complex hyperbolic spaces
HYPERBOLIC_FAMILIES = ("so", "su")


class CatalogError(LookupError):
    pass


def parse_catalog(text):
    """{key: [(family, args...), ...]} from the catalog text."""
    out = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, expr = line.partition("=")
        key = key.strip()
        if not expr.strip():
            raise ValueError(f"bad catalog line: {raw!r}")
        summands = []
        for part in expr.split("+"):
            fam, *args = part.split()
            if fam == "nilpotent":
                summands.append((fam, args[0], int(args[1])))
            elif fam in BUILDERS:
                summands.append((fam, int(args[0])))
            else:
                raise ValueError(f"unknown family {fam!r} in {raw!r}")
        out[key] = summands
    return out


@lru_cache(maxsize=None)
def catalog():
    text = resources.files("symspace").joinpath("catalog.txt").read_text()
    return parse_catalog(text)


def keys():
    return sorted(catalog())


def entry(key):
    try:
        return catalog()[key]
    except KeyError:
        raise CatalogError(f"unknown space {key!r}; known: {', '.join(keys())}") from None


def is_nilpotent_only(key):
    return entry(key)[0][0] == "nilpotent"


def has_hyperbolic_factor(key):
    return any(s[0] in HYPERBOLIC_FAMILIES for s in entry(key))


@lru_cache(maxsize=None)
def algebra(key):
    if is_nilpotent_only(key):
        raise CatalogError(f"{key} is only available as a nilpotent model")
    parts = [BUILDERS[fam](n) for fam, n in entry(key)]
    alg = parts[0] if len(parts) == 1 else direct_sum(*parts)
    alg.label = key
    return alg


@lru_cache(maxsize=None)
def roots(key):
    return restricted_roots(algebra(key))


def nilpotent(key):
    """The nilpotent part n of the Iwasawa decomposition (or the stored model)."""
    e = entry(key)
    if e[0][0] == "nilpotent":
        _, kind, n = e[0]
        return build_division_algebra_nilpotent(kind, n)
    return nilpotent_structure(roots(key))
