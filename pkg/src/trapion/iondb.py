"""Ion-constant database: a CSV file with one species per row.

Columns are ``name, nuclear_spin_I, gamma_2pi_hz, nu_F_hz, nu_0_hz``;
frequencies are ordinary (not angular) frequencies in Hz and the nuclear
spin may be written as a fraction (``3/2``).
"""

from __future__ import annotations

import csv
import logging
import os
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .errors import ConfigError
from .ramancoupling import IonSpecies

log = logging.getLogger(__name__)

ENV_VAR = "TRAPION_ION_DB"
COLUMNS = ("name", "nuclear_spin_I", "gamma_2pi_hz", "nu_F_hz", "nu_0_hz")


def default_db_path() -> Path:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    return Path(str(resources.files("trapion") / "data" / "ions.csv"))


def _field(row: dict, key: str, lineno: int, path, convert):
    raw = (row.get(key) or "").strip()
    if not raw:
        raise ConfigError(f"{path}:{lineno}: field '{key}' is missing")
    try:
        return convert(raw)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"{path}:{lineno}: field '{key}' has invalid value {raw!r}") from exc


def load_ion_db(path=None) -> list[IonSpecies]:
    """Read and validate an ion database; ``None`` loads the shipped copy
    (or the file named by ``$TRAPION_ION_DB``)."""
    path = Path(path) if path is not None else default_db_path()
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read ion database ({exc.strerror or exc})") from exc
    if not text.strip():
        log.warning("ion database %s is empty", path)
        return []
    reader = csv.DictReader(text.splitlines())
    missing = [c for c in COLUMNS if c not in (reader.fieldnames or [])]
    if missing:
        raise ConfigError(f"{path}:1: header lacks column(s) {', '.join(missing)}")
    ions = []
    for row in reader:
        lineno = reader.line_num
        name = _field(row, "name", lineno, path, str)
        spin = _field(row, "nuclear_spin_I", lineno, path, Fraction)
        gamma = _field(row, "gamma_2pi_hz", lineno, path, float)
        nu_f = _field(row, "nu_F_hz", lineno, path, float)
        nu_0 = _field(row, "nu_0_hz", lineno, path, float)
        try:
            ions.append(IonSpecies.from_hz(name, spin, gamma, nu_f, nu_0))
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: row '{name}': {exc}") from exc
    return ions


def find_ion(ions, name: str) -> IonSpecies:
    for ion in ions:
        if ion.name == name:
            return ion
    raise ConfigError(f"ion {name!r} not in database (have: {', '.join(i.name for i in ions)})")
