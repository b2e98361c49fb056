"""On-disk cache of computed entries.

Each entry is stored as its canonical text (``<key>.diff``) next to an exact
term dump (``<key>.json``) that reloads without reparsing, and is listed in
``manifest.json``.  Keys hash the parsed curve configuration together with
(2g, arity, flavor), so whitespace or comments in a curve file never matter.
The directory defaults to ~/.cache/refined-tr and is overridden by the
REFINED_TR_CACHE environment variable.
"""

from __future__ import annotations

import hashlib
import json
import os
from fractions import Fraction
from pathlib import Path

import flint
from filelock import FileLock

from .algebra import INF, RatFunc, parse_differential, parse_expr
from .algebra.poly import context_for, fmpq_to_fraction
from .curve import SpectralCurve, point_text
from .recursion import MultiDiff

ENV_VAR = "REFINED_TR_CACHE"
FORMAT_VERSION = 1


def default_directory() -> Path:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "refined-tr"


def entry_key(curve: SpectralCurve, two_g: int, arity: int, flavor: str) -> str:
    text = f"v{FORMAT_VERSION}\n{curve.config.canonical_text()}{two_g} {arity} {flavor}\n"
    return hashlib.sha256(text.encode()).hexdigest()


def _poly_dump(p) -> dict:
    names = list(p.context().names())
    terms = [[list(map(int, e)), str(fmpq_to_fraction(c))] for e, c in zip(p.monoms(), p.coeffs())]
    return {"names": names, "terms": terms}


def _poly_load(data):
    ctx = context_for(data["names"])
    order = list(ctx.names())
    perm = [data["names"].index(n) for n in order]
    terms = {}
    for exps, c in data["terms"]:
        q = Fraction(c)
        terms[tuple(exps[i] for i in perm)] = flint.fmpq(q.numerator, q.denominator)
    return ctx.from_dict(terms) if terms else ctx.from_dict({})


def _point_load(text: str):
    return INF if text == "oo" else parse_expr(text)


class DiffCache:
    def __init__(self, directory=None):
        self.directory = Path(directory) if directory is not None else default_directory()
        self.hits = 0
        self.misses = 0

    @property
    def manifest_path(self) -> Path:
        return self.directory / "manifest.json"

    def _lock(self) -> FileLock:
        return FileLock(str(self.directory / ".lock"))

    def _read_manifest(self) -> dict:
        try:
            with open(self.manifest_path, encoding="utf-8") as fh:
                return json.load(fh)
        except (FileNotFoundError, json.JSONDecodeError):
            return {}

    def load(self, curve: SpectralCurve, two_g: int, arity: int, flavor: str):
        key = entry_key(curve, two_g, arity, flavor)
        info = self._read_manifest().get(key)
        if info is None:
            self.misses += 1
            return None
        try:
            with open(self.directory / f"{key}.json", encoding="utf-8") as fh:
                dump = json.load(fh)
            expr = RatFunc(_poly_load(dump["num"]), _poly_load(dump["den"]), normalized=True)
        except (FileNotFoundError, json.JSONDecodeError, KeyError):
            text = (self.directory / f"{key}.diff").read_text(encoding="utf-8").strip()
            expr = parse_differential(text, [f"dz{i}" for i in range(arity)])
        poles = tuple(_point_load(p) for p in info["pole_locus"])
        self.hits += 1
        return MultiDiff(two_g, arity, expr, flavor, poles)

    def store(self, curve: SpectralCurve, d: MultiDiff) -> None:
        self.directory.mkdir(parents=True, exist_ok=True)
        key = entry_key(curve, d.two_g, d.arity, d.flavor)
        dump = {"num": _poly_dump(d.expr.num), "den": _poly_dump(d.expr.den)}
        with self._lock():
            _atomic_write(self.directory / f"{key}.diff", d.canonical() + "\n")
            _atomic_write(self.directory / f"{key}.json", json.dumps(dump, separators=(",", ":")))
            manifest = self._read_manifest()
            manifest[key] = {
                "two_g": d.two_g,
                "arity": d.arity,
                "flavor": d.flavor,
                "pole_locus": [point_text(p) for p in d.pole_locus],
                "curve": hashlib.sha256(curve.config.canonical_text().encode()).hexdigest(),
            }
            _atomic_write(self.manifest_path, json.dumps(manifest, indent=1, sort_keys=True) + "\n")


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + f".{os.getpid()}.tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)
