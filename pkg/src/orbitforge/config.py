"""INI run configurations: parsing, validation, lossless round-trips.

Sections and keys are a closed set; unknown keys are rejected so that a
typo cannot silently change a run.  The S selector grammar is either a
bare rational prime ("7": every ideal above 7) or a prime with an ideal
tag ("7a"/"7b": one of the two split ideals in canonical order).
"""

from __future__ import annotations

import configparser
import io
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .constants import CParams, SplittingData
from .fields import FieldSpec, make_field
from .ideals import SSet, factor_rational_prime
from .intfactor import DEFAULT_RHO_BUDGET
from .orbits import DEFAULT_BIT_CAP
from .polynomials import Polynomial
from .search import DEFAULT_ELEMENT_CAP, DEFAULT_M_MAX


class ConfigError(ValueError):
    pass


_ALLOWED = {
    "field": {"kind", "d"},
    "poly": {"coeffs", "splitting_degree", "class_number_l", "regulator_l"},
    "sset": {"ideals"},
    "c_params": {"c1", "c2", "c3", "c4", "c5", "c6", "c7"},
    "caps": {"height_cap", "m_max", "bit_cap", "factor_budget", "element_cap"},
    "run": {"alpha", "m", "n", "k", "n_max", "sample_count", "x_bound", "h_beta", "variant"},
    "output": {"dir"},
}


@dataclass
class RunConfig:
    field: FieldSpec
    poly: Polynomial | None
    S: SSet
    c_params: CParams
    height_cap: float = 0.0
    m_max: int = DEFAULT_M_MAX
    bit_cap: int = DEFAULT_BIT_CAP
    factor_budget: int = DEFAULT_RHO_BUDGET
    element_cap: int = DEFAULT_ELEMENT_CAP
    splitting_degree: int | None = None
    class_number_L: int | None = None
    regulator_L: float | None = None
    run_options: dict = dc_field(default_factory=dict)
    output_dir: str | None = None

    def splitting_override(self) -> SplittingData | None:
        if self.splitting_degree is None:
            return None
        return SplittingData(
            self.splitting_degree, self.class_number_L, self.regulator_L, "config"
        )

    def to_ini(self) -> str:
        cp = configparser.ConfigParser()
        cp["field"] = {"kind": self.field.kind}
        if self.field.kind == "quadratic":
            cp["field"]["d"] = str(self.field.D)
        if self.poly is not None:
            cp["poly"] = {
                "coeffs": ",".join(str(c.a) for c in self.poly.coeffs)
            }
            if self.splitting_degree is not None:
                cp["poly"]["splitting_degree"] = str(self.splitting_degree)
            if self.class_number_L is not None:
                cp["poly"]["class_number_l"] = str(self.class_number_L)
            if self.regulator_L is not None:
                cp["poly"]["regulator_l"] = repr(self.regulator_L)
        cp["sset"] = {"ideals": ",".join(self.S.ideal_selectors())}
        cp["c_params"] = {k: repr(v) for k, v in self.c_params.as_dict().items()}
        cp["caps"] = {
            "height_cap": repr(self.height_cap),
            "m_max": str(self.m_max),
            "bit_cap": str(self.bit_cap),
            "factor_budget": str(self.factor_budget),
            "element_cap": str(self.element_cap),
        }
        if self.run_options:
            cp["run"] = {k: str(v) for k, v in self.run_options.items()}
        if self.output_dir:
            cp["output"] = {"dir": self.output_dir}
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()


def parse_s_selectors(field: FieldSpec, text: str) -> SSet:
    ideals = []
    for raw in text.split(","):
        tok = raw.strip()
        if not tok:
            continue
        tag = None
        if tok[-1] in ("a", "b"):
            tag = tok[-1]
            tok = tok[:-1]
        try:
            p = int(tok)
        except ValueError as exc:
            raise ConfigError(f"bad S selector {raw!r}") from exc
        above = factor_rational_prime(field, p)
        if tag is None:
            ideals.extend(above)
        else:
            want = f"split-{tag}"
            matches = [P for P in above if P.kind == want]
            if not matches:
                raise ConfigError(
                    f"selector {raw!r}: prime {p} has no ideal tagged {tag!r}"
                )
            ideals.extend(matches)
    return SSet(field, ideals)


def _parse_section(cp: configparser.ConfigParser, name: str) -> dict:
    if not cp.has_section(name):
        return {}
    got = dict(cp.items(name))
    unknown = set(got) - _ALLOWED[name]
    if unknown:
        raise ConfigError(f"unknown keys in [{name}]: {sorted(unknown)}")
    return got


def load_config_text(text: str) -> RunConfig:
    cp = configparser.ConfigParser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        lineno = getattr(exc, "lineno", "?")
        raise ConfigError(f"config parse error at line {lineno}: {exc.message}") from exc
    for section in cp.sections():
        if section not in _ALLOWED:
            raise ConfigError(f"unknown section [{section}]")

    fs = _parse_section(cp, "field")
    kind = fs.get("kind", "rational")
    if kind not in ("rational", "quadratic"):
        raise ConfigError(f"field.kind must be rational|quadratic, got {kind!r}")
    D = None
    if kind == "quadratic":
        if "d" not in fs:
            raise ConfigError("field.D required for quadratic fields")
        D = int(fs["d"])
    try:
        field = make_field(kind, D)
    except Exception as exc:
        raise ConfigError(f"field: {exc}") from exc

    poly = None
    ps = _parse_section(cp, "poly")
    if "coeffs" in ps:
        coeffs = [Fraction(c.strip()) for c in ps["coeffs"].split(",")]
        poly = Polynomial(field, coeffs)
        if not poly.is_integral():
            raise ConfigError("poly.coeffs must be integral")
    splitting_degree = int(ps["splitting_degree"]) if "splitting_degree" in ps else None
    class_number_L = int(ps["class_number_l"]) if "class_number_l" in ps else None
    regulator_L = float(ps["regulator_l"]) if "regulator_l" in ps else None

    ss = _parse_section(cp, "sset")
    S = parse_s_selectors(field, ss.get("ideals", ""))

    cs = _parse_section(cp, "c_params")
    c_params = CParams(**{k: float(v) for k, v in cs.items()})

    caps = _parse_section(cp, "caps")
    height_cap = float(caps.get("height_cap", 0.0))
    if not math.isfinite(height_cap) or height_cap < 0:
        raise ConfigError("caps.height_cap must be a finite nonnegative number")

    run = _parse_section(cp, "run")
    out = _parse_section(cp, "output")

    return RunConfig(
        field=field,
        poly=poly,
        S=S,
        c_params=c_params,
        height_cap=height_cap,
        m_max=int(caps.get("m_max", DEFAULT_M_MAX)),
        bit_cap=int(caps.get("bit_cap", DEFAULT_BIT_CAP)),
        factor_budget=int(caps.get("factor_budget", DEFAULT_RHO_BUDGET)),
        element_cap=int(caps.get("element_cap", DEFAULT_ELEMENT_CAP)),
        splitting_degree=splitting_degree,
        class_number_L=class_number_L,
        regulator_L=regulator_L,
        run_options=dict(run),
        output_dir=out.get("dir"),
    )


def load_config(path: str) -> RunConfig:
    """Parse and validate a config file; errors carry the line or the field."""
    with open(path, encoding="utf-8") as fh:
        return load_config_text(fh.read())
