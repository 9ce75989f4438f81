"""Bounded enumeration campaigns over ring elements and orbit pairs.

Campaigns are deterministic: the scan order is fixed, factorization
failures become explicit skip rows (never silent), and reports serialize
with sorted keys so equal configurations give byte-identical output.
Sharding only partitions the element stream; results are merged and
sorted, so shard_count never changes a report.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field as dc_field

from .constants import (
    CParams,
    SplittingData,
    eta1_inverse,
    eta2_inverse,
    lambda_bound_shape,
    log_star,
    northcott_bound,
    resolve_splitting,
)
from .fields import FieldSpec, NFElement
from .heights import height_S_of_inverse, height_value, log_abs_embedding
from .ideals import SSet
from .intfactor import DEFAULT_RHO_BUDGET, IncompleteFactorization
from .orbits import (
    DEFAULT_BIT_CAP,
    check_power_dependence,
    check_s_integer_ratio,
    is_s_unit,
    is_zero_periodic,
    iterate_orbit,
    support_lambda_of_ratio,
)
from .polynomials import Polynomial

DEFAULT_ELEMENT_CAP = 10**7
DEFAULT_M_MAX = 8


@dataclass
class SearchConfig:
    field: FieldSpec
    f: Polynomial
    S: SSet
    height_cap: float
    m_max: int = DEFAULT_M_MAX
    bit_cap: int = DEFAULT_BIT_CAP
    factor_budget: int = DEFAULT_RHO_BUDGET
    element_cap: int = DEFAULT_ELEMENT_CAP
    c_params: CParams = dc_field(default_factory=CParams)
    splitting: SplittingData | None = None
    shard_count: int = 1
    cache: object | None = None

    def provenance(self) -> dict:
        """Result-defining inputs only; execution details like shard_count
        stay out so that shard-invariance can be byte-exact."""
        return {
            "field": repr(self.field),
            "poly": repr(self.f),
            "S": ",".join(self.S.ideal_selectors()),
            "height_cap": self.height_cap,
            "m_max": self.m_max,
            "bit_cap": self.bit_cap,
            "factor_budget": self.factor_budget,
            "element_cap": self.element_cap,
            "c_params": self.c_params.as_dict(),
        }


@dataclass
class CampaignReport:
    kind: str
    provenance: dict
    rows: list[dict]
    partial: bool
    version: str = "0.1.0"

    def to_jsonl(self) -> str:
        head = {
            "type": "provenance",
            "campaign": self.kind,
            "version": self.version,
            "partial": self.partial,
        }
        head.update({f"config_{k}": v for k, v in sorted(self.provenance.items())})
        lines = [json.dumps(head, sort_keys=True)]
        lines.extend(json.dumps(r, sort_keys=True) for r in self.rows)
        return "\n".join(lines) + "\n"

    def witness_rows(self) -> list[dict]:
        return [r for r in self.rows if r.get("type") == "witness"]

    def skip_rows(self) -> list[dict]:
        return [r for r in self.rows if r.get("type") == "skip"]


# ---------------------------------------------------------------------------
# element enumeration
# ---------------------------------------------------------------------------

_H_EPS = 1e-12


def enumerate_ring_elements(field: FieldSpec, H: float, cap: int = DEFAULT_ELEMENT_CAP):
    """All ring integers of height <= H, ordered by (height, coordinates).

    Emits at most cap elements; ring_elements_capped exposes whether the
    cap actually cut the stream short.
    """
    elements, _ = ring_elements_capped(field, H, cap)
    yield from elements


def ring_elements_capped(
    field: FieldSpec, H: float, cap: int = DEFAULT_ELEMENT_CAP
) -> tuple[list[NFElement], bool]:
    """(elements, truncated): the capped stream plus the truncation flag."""
    if H < 0:
        raise ValueError("height cap must be >= 0")
    out = []
    if field.degree == 1:
        nmax = int(math.exp(H)) + 1
        while nmax >= 1 and math.log(nmax) > H + _H_EPS:
            nmax -= 1
        for a in range(-nmax, nmax + 1):
            out.append(field.element(a))
    else:
        # embedding box: |s_i(x)| <= e^{2H} for two real places (one factor
        # may carry the whole height), e^H for the single complex place.
        # w-coordinates: b = (s1 - s2)/sqrt(D) (doubled when w is the
        # half-integral generator), a = x - b*w.
        bound = math.exp(2 * H) + 1 if field.D > 0 else math.exp(H) + 1
        sq = math.sqrt(abs(field.D))
        b_hi = int(2 * bound / sq) + 2
        a_hi = int(bound + b_hi) + 2
        for b in range(-b_hi, b_hi + 1):
            for a in range(-a_hi, a_hi + 1):
                x = field.element(a, b)
                if x.is_zero():
                    out.append(x)
                    continue
                la0 = log_abs_embedding(x, 0)
                if field.D > 0:
                    la1 = log_abs_embedding(x, 1)
                    h = 0.5 * (max(la0, 0.0) + max(la1, 0.0))
                else:
                    h = max(la0, 0.0)
                if h <= H + _H_EPS:
                    out.append(x)
    out.sort(key=_element_order_key)
    return out[:cap], len(out) > cap


def _element_order_key(x: NFElement):
    h = height_value(x) if not x.is_zero() else 0.0
    return (round(h, 9), x.a, x.b)


def _element_sort_key(x: NFElement):
    return (x.a, x.b)


# ---------------------------------------------------------------------------
# dependence search
# ---------------------------------------------------------------------------


def _shards(stream, shard_count: int):
    shards = [[] for _ in range(max(shard_count, 1))]
    for i, x in enumerate(stream):
        shards[i % max(shard_count, 1)].append(x)
    return shards


def search_dependence(cfg: SearchConfig) -> CampaignReport:
    """Scan all alpha up to the height cap and all iterate pairs for
    ratio and power witnesses, each verified by exact resubstitution."""
    zp = is_zero_periodic(cfg.f)
    if zp is None:
        raise ValueError("0-periodicity unknown: refusing to run the campaign")
    if zp:
        raise ValueError("campaign requires 0 not periodic for f")
    rows: list[dict] = []
    partial = False
    elements, cut = ring_elements_capped(cfg.field, cfg.height_cap, cfg.element_cap)
    if cut:
        rows.append({"type": "skip", "alpha": None, "m": None, "n": None,
                     "reason": "element-cap truncated the scan"})
        partial = True
    shards = _shards(elements, cfg.shard_count)
    collected: list[tuple[tuple, dict]] = []
    for shard in shards:
        for alpha in shard:
            for entry in _scan_alpha(cfg, alpha):
                key = (
                    _element_sort_key(alpha),
                    entry.get("m") or 0,
                    entry.get("n") or 0,
                    entry.get("kind") or entry["type"],
                )
                collected.append((key, entry))
    collected.sort(key=lambda kv: kv[0])
    for _, entry in collected:
        if entry["type"] == "skip":
            partial = True
        rows.append(entry)
    rows.extend(_bound_annotation(cfg))
    return CampaignReport("search-dependence", cfg.provenance(), rows, partial)


def _scan_alpha(cfg: SearchConfig, alpha: NFElement):
    orbit = iterate_orbit(cfg.f, alpha, cfg.m_max, cfg.bit_cap)
    out = []
    if orbit.truncated:
        out.append(
            {
                "type": "skip",
                "alpha": alpha.as_string(),
                "m": None,
                "n": None,
                "reason": f"bit-cap at iterate {orbit.length + 1}",
            }
        )
    top = orbit.length
    for m in range(1, top + 1):
        xm = orbit.iterates[m]
        for n in range(0, m):
            if not xm.is_zero():
                w = check_s_integer_ratio(cfg.f, alpha, m, n, cfg.S)
                if w is not None:
                    out.append(w.row())
            if n >= 1 and not xm.is_zero() and not orbit.iterates[n].is_zero():
                try:
                    w = check_power_dependence(
                        cfg.f, alpha, m, n, cfg.S, cfg.factor_budget, cfg.cache
                    )
                except IncompleteFactorization:
                    out.append(
                        {
                            "type": "skip",
                            "alpha": alpha.as_string(),
                            "m": m,
                            "n": n,
                            "reason": "factor-budget",
                        }
                    )
                    continue
                if w is not None:
                    out.append(w.row())
    return out


def _bound_annotation(cfg: SearchConfig) -> list[dict]:
    try:
        sp = cfg.splitting or resolve_splitting(cfg.field, cfg.f)
        rep = northcott_bound(
            cfg.field, cfg.f, cfg.S, cfg.c_params, sp, zero_periodic=False
        )
        return rep.rows()
    except Exception as exc:  # annotation only: report the gap, never die
        return [{"type": "annotation_error", "error": str(exc)}]


# ---------------------------------------------------------------------------
# S-unit orbit values
# ---------------------------------------------------------------------------


def search_sunit_orbit_values(cfg: SearchConfig, n_max: int) -> CampaignReport:
    """All (alpha, n <= n_max) with f^(n)(alpha) an S-unit, by exact orders."""
    rows = []
    elements, cut = ring_elements_capped(cfg.field, cfg.height_cap, cfg.element_cap)
    partial = cut
    if cut:
        rows.append({"type": "skip", "alpha": None, "m": None, "n": None,
                     "reason": "element-cap truncated the scan"})
    for alpha in elements:
        orbit = iterate_orbit(cfg.f, alpha, n_max, cfg.bit_cap)
        if orbit.truncated:
            rows.append(
                {
                    "type": "skip",
                    "alpha": alpha.as_string(),
                    "m": None,
                    "n": None,
                    "reason": f"bit-cap at iterate {orbit.length + 1}",
                }
            )
            partial = True
        for n in range(1, orbit.length + 1):
            val = orbit.iterates[n]
            if val.is_zero():
                continue
            if is_s_unit(val, cfg.S):
                rows.append(
                    {
                        "type": "sunit",
                        "alpha": alpha.as_string(),
                        "n": n,
                        "value": val.as_string(),
                    }
                )
    return CampaignReport("sunit-scan", cfg.provenance(), rows, partial)


# ---------------------------------------------------------------------------
# empirical eta
# ---------------------------------------------------------------------------


def verify_spart_empirical(cfg: SearchConfig, sample_count: int) -> CampaignReport:
    """Sampled ratios rho = h_S(f(a)^-1) / (h(f(a)) + 1) next to the formula.

    Reports max rho and the implied empirical eta beside the c1 = 1 formula
    values; states which is larger and asserts nothing about which should be.
    """
    if cfg.f.distinct_root_count() < 3:
        raise ValueError("empirical check needs >= 3 distinct roots")
    rows = []
    best = None
    count = 0
    for alpha in enumerate_ring_elements(cfg.field, cfg.height_cap, cfg.element_cap):
        if count >= sample_count:
            break
        val = cfg.f(alpha)
        if val.is_zero():
            continue
        count += 1
        h = height_value(val)
        rho = height_S_of_inverse(val, cfg.S) / (h + 1.0)
        rows.append(
            {
                "type": "rho",
                "alpha": alpha.as_string(),
                "h_f_alpha": h,
                "rho": rho,
            }
        )
        if best is None or rho > best[0]:
            best = (rho, alpha)
    summary: dict = {"type": "empirical_eta", "sample_count": count}
    if best is None:
        summary["eta_empirical"] = None
        summary["note"] = "empty sample: eta undefined"
    else:
        eta_emp = 1.0 - best[0]
        summary["max_rho"] = best[0]
        summary["argmax_alpha"] = best[1].as_string()
        summary["eta_empirical"] = eta_emp
        sp = cfg.splitting or resolve_splitting(cfg.field, cfg.f)
        e1 = eta1_inverse(cfg.field, cfg.f, cfg.S, CParams(), sp)
        summary["eta1_formula"] = 1.0 / e1
        if cfg.S.t > 0 and sp.class_number_L is not None:
            summary["eta2_formula"] = 1.0 / eta2_inverse(
                cfg.field, cfg.f, cfg.S, CParams(), sp
            )
        else:
            summary["eta2_formula"] = None
        summary["larger"] = (
            "empirical" if eta_emp > summary["eta1_formula"] else "formula"
        )
    rows.append(summary)
    return CampaignReport("verify-spart", cfg.provenance(), rows, False)


# ---------------------------------------------------------------------------
# lambda growth rows
# ---------------------------------------------------------------------------


def lambda_growth_report(
    f: Polynomial,
    alpha,
    n: int,
    m_max: int,
    c4: float = 1.0,
    budget: int = DEFAULT_RHO_BUDGET,
    bit_cap: int = DEFAULT_BIT_CAP,
    cache=None,
) -> list[dict]:
    """Per m > n: the largest support norm of f^(m)/f^(n) against the
    growth shape c4 * L log*L / log*log*L; factorization-failure rows skip."""
    field = f.field
    if not isinstance(alpha, NFElement):
        alpha = field.element(alpha)
    orbit = iterate_orbit(f, alpha, m_max, bit_cap)
    rows = []
    xn = orbit.iterates[n] if n <= orbit.length else None
    if xn is None or xn.is_zero():
        raise ZeroDivisionError("f^(n)(alpha) unavailable or zero")
    h_n = height_value(xn)
    for m in range(n + 1, orbit.length + 1):
        xm = orbit.iterates[m]
        if xm.is_zero():
            rows.append({"type": "skip", "m": m, "reason": "zero iterate"})
            continue
        try:
            lam = support_lambda_of_ratio(xm, xn, budget, cache)
        except IncompleteFactorization:
            rows.append({"type": "skip", "m": m, "reason": "factor-budget"})
            continue
        h_m = height_value(xm)
        L = log_star(h_m / (h_n + 1.0))
        shape = lambda_bound_shape(L, c4)
        rows.append(
            {
                "type": "lambda_row",
                "m": m,
                "n": n,
                "lambda": str(lam),
                "L": L,
                "shape": shape,
                "ratio": lam / shape,
            }
        )
    if orbit.truncated:
        rows.append({"type": "skip", "m": orbit.length + 1, "reason": "bit-cap"})
    return rows
