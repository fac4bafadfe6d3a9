"""JSON documents for derivations.

A node is ``{"rule", "conclusion", "params", "premises"}``; ``conclusion``
is sequent text and ``params`` may hold ``path`` (a frame path into the
conclusion's bunch, e.g. ``"R,L;"``), ``formula`` (the cut formula),
``index`` and ``env`` (``{"x1": "<bunch>"}``) for structural extensions.
"""

from __future__ import annotations

import json
from typing import Any

from .calculus import Derivation, Rule
from .errors import MalformedInput
from .parsing import parse_bunch, parse_formula, parse_sequent
from .syntax import ctx_at_path, show_bunch, show_formula


def to_document(d: Derivation) -> dict[str, Any]:
    params: dict[str, Any] = {}
    if d.ctx is not None:
        params["path"] = d.ctx.path()
    if d.formula is not None:
        params["formula"] = show_formula(d.formula)
    if d.index is not None:
        params["index"] = d.index
    if d.env is not None:
        params["env"] = {f"x{j}": show_bunch(b) for j, b in d.env}
    doc: dict[str, Any] = {"rule": d.rule.value, "conclusion": str(d.conclusion)}
    if params:
        doc["params"] = params
    doc["premises"] = [to_document(p) for p in d.premises]
    return doc


def from_document(doc: Any) -> Derivation:
    if not isinstance(doc, dict):
        raise MalformedInput("derivation node must be an object")
    try:
        rule = Rule(doc["rule"])
    except KeyError:
        raise MalformedInput("derivation node lacks 'rule'") from None
    except ValueError:
        raise MalformedInput(f"unknown rule {doc['rule']!r}") from None
    if "conclusion" not in doc:
        raise MalformedInput("derivation node lacks 'conclusion'")
    conclusion = parse_sequent(doc["conclusion"])
    params = doc.get("params", {})
    premises = doc.get("premises", [])
    if not isinstance(params, dict) or not isinstance(premises, list):
        raise MalformedInput("'params' must be an object and 'premises' a list")
    ctx = None
    if "path" in params:
        ctx, _ = ctx_at_path(conclusion.lhs, params["path"])
    formula = parse_formula(params["formula"]) if "formula" in params else None
    index = params.get("index")
    if index is not None and not isinstance(index, int):
        raise MalformedInput("'index' must be an integer")
    env = None
    if "env" in params:
        items = []
        for key, text in params["env"].items():
            if not (key.startswith("x") and key[1:].isdigit()):
                raise MalformedInput(f"bad variable name {key!r}")
            items.append((int(key[1:]), parse_bunch(text)))
        env = tuple(sorted(items))
    kids = tuple(from_document(p) for p in premises)
    d = Derivation(rule, conclusion, kids, ctx=ctx, formula=formula, index=index, env=env)
    return d


def dumps(d: Derivation, indent: int | None = 1) -> str:
    return json.dumps(to_document(d), indent=indent, ensure_ascii=False)


def loads(text: str) -> Derivation:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise MalformedInput(f"{e.lineno}:{e.colno}: {e.msg}") from None
    return from_document(doc)


def load(path) -> Derivation:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def dump(d: Derivation, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(d))
        fh.write("\n")
