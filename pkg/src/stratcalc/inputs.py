"""Loading posets, maps, degree functions and catalogs from files or short names.

Every loader raises ``InputError`` with a one-line diagnostic on malformed
input, which the command line turns into exit code 2.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Dict, Hashable, List, Optional, Union

from .checks import InputError
from .diagram import Diagram
from .poset import FinitePoset, MonotoneMap, PosetError, catalog, label_text, named_poset

BUNDLED_CATALOG = "catalog5.json"
FIXTURE_KEYS = {"name", "poset", "field", "values", "edges"}


def read_json(source: Union[str, Path]) -> object:
    """Parse ``source`` as inline JSON when it starts with '{' or '[', else as a file."""
    text = str(source).strip()
    try:
        if text.startswith(("{", "[")) and not Path(text).exists():
            return json.loads(text)
        with open(text, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {text}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{text}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def _catalog_entry(name: str) -> Optional[FinitePoset]:
    size = name[1:].split(".")[0]
    if not (name.startswith("P") and size.isdigit()):
        return None
    try:
        return next((P for P in catalog(int(size)) if P.name == name), None)
    except PosetError:
        return None


def load_poset(source: str) -> FinitePoset:
    """A JSON file, inline JSON, a named poset ('[3]', 'B2', 'V', ...) or a catalog id 'P4.2'."""
    text = str(source).strip()
    if not (Path(text).exists() or text.startswith("{")):
        try:
            return named_poset(text)
        except PosetError:
            pass
        P = _catalog_entry(text)
        if P is None:
            raise InputError(f"no poset named {text!r} and no such file")
        return P
    data = read_json(text)
    if not isinstance(data, dict):
        raise InputError("poset JSON must be an object with 'elements' and 'relations'")
    try:
        P = FinitePoset.from_json(data)
    except PosetError as exc:
        raise InputError(f"bad poset: {exc}") from None
    if not P.name:
        P.name = Path(text).stem if Path(text).exists() else "poset"
    return P


def load_map(source: str, P: FinitePoset) -> MonotoneMap:
    """Map JSON {"target": <poset>, "assignment": {x: y}}; the target may be a named poset."""
    data = read_json(source)
    if not isinstance(data, dict):
        raise InputError("map JSON must be an object")
    try:
        target = data.get("target")
        if isinstance(target, str):
            target = named_poset(target)
        elif target is not None:
            target = FinitePoset.from_json(target)
        return MonotoneMap.from_json(data, P, target)
    except (PosetError, AttributeError, TypeError) as exc:
        raise InputError(f"bad map: {exc}") from None


def load_degrees(source: str, P: FinitePoset) -> Dict[Hashable, int]:
    """A flat {element: integer} object, or a map JSON to a chain."""
    data = read_json(source)
    if not isinstance(data, dict):
        raise InputError("degree map JSON must be an object")
    if "assignment" in data:
        data = data["assignment"]
    names = {label_text(x): x for x in P.elements}
    out = {}
    for k, v in data.items():
        if k not in names:
            raise InputError(f"degree map mentions unknown element {k!r}")
        try:
            out[names[k]] = int(v)
        except (TypeError, ValueError):
            raise InputError(f"degree of {k!r} is not an integer: {v!r}") from None
    missing = [label_text(x) for x in P.elements if x not in out]
    if missing:
        raise InputError(f"degree map misses {missing}")
    return out


def load_fibers(source: str, P: FinitePoset) -> Dict[Hashable, FinitePoset]:
    """{element: poset-or-name} refinements for the wreath construction."""
    data = read_json(source)
    if not isinstance(data, dict):
        raise InputError("fibers JSON must be an object")
    names = {label_text(x): x for x in P.elements}
    out = {}
    for k, v in data.items():
        if k not in names:
            raise InputError(f"fibers mention unknown element {k!r}")
        out[names[k]] = load_poset(v if isinstance(v, str) else json.dumps(v))
    return out


@dataclass
class Catalog:
    posets: List[FinitePoset] = field(default_factory=list)
    fixtures: List[Diagram] = field(default_factory=list)
    fixture_names: List[str] = field(default_factory=list)


def catalog_json(posets: List[FinitePoset]) -> dict:
    return {"posets": [dict(name=P.name, **P.to_json()) for P in posets], "fixtures": []}


def load_catalog(source: Optional[str] = None, max_size: Optional[int] = None) -> Catalog:
    """The bundled catalog, or a catalog file {"posets": [...], "fixtures": [...]}.

    Fixtures are diagram JSON objects (with a "name"); they are validated on
    load, so a broken fixture is reported before any check runs.
    """
    if source is None:
        data = json.loads(resources.files("stratcalc").joinpath("data", BUNDLED_CATALOG).read_text("utf-8"))
    else:
        data = read_json(source)
    if not isinstance(data, dict) or not isinstance(data.get("posets", []), list):
        raise InputError("catalog JSON must be an object with a 'posets' list")
    out = Catalog()
    for i, entry in enumerate(data.get("posets", [])):
        try:
            P = FinitePoset.from_json(entry)
        except (PosetError, AttributeError) as exc:
            raise InputError(f"catalog poset #{i}: {exc}") from None
        P.name = P.name or f"poset{i}"
        if max_size is None or len(P) <= max_size:
            out.posets.append(P)
    for i, entry in enumerate(data.get("fixtures", [])):
        name = str(entry.get("name", f"fixture{i}")) if isinstance(entry, dict) else f"fixture{i}"
        extra = set(entry) - FIXTURE_KEYS if isinstance(entry, dict) else set()
        if extra:
            raise InputError(f"catalog fixture {name}: unknown fields {sorted(extra)}")
        try:
            D = Diagram.from_json(entry)
        except (ValueError, AttributeError) as exc:
            raise InputError(f"catalog fixture {name}: {exc}") from None
        out.fixtures.append(D)
        out.fixture_names.append(name)
    return out
