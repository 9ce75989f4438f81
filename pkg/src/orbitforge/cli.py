"""Command-line front end: config-driven runs, JSON-lines + CSV reports.

Exit codes: 0 success, 2 partial results (explicit skip rows present),
1 error.  Reports embed the result-defining configuration so every number
is reproducible from the files alone.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import random
import sys

from . import __version__
from .cache import FactorCache, default_cache_path
from .config import ConfigError, RunConfig, load_config
from .constants import (
    A1,
    A2,
    A3,
    gyory_yu_height_bound,
    northcott_bound,
    resolve_splitting,
    sset_params,
    voutier_delta,
)
from .fields import FieldError
from .heights import height, height_T, height_S_of_inverse, support_lambda
from .intfactor import IncompleteFactorization
from .orbits import (
    check_power_dependence,
    check_s_integer_ratio,
    find_primitive_divisor,
    is_zero_periodic,
    iterate_orbit,
    spart_witness,
)
from .search import (
    CampaignReport,
    SearchConfig,
    lambda_growth_report,
    search_dependence,
    search_sunit_orbit_values,
    verify_spart_empirical,
)

COMMANDS = (
    "heights",
    "constants",
    "orbit",
    "witness",
    "search-dependence",
    "sunit-scan",
    "primitive-divisors",
    "lambda-report",
    "verify-spart",
)


def _jsonable(v):
    return v if v is None or isinstance(v, (int, float, str, bool)) else str(v)


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return json.dumps(v)  # same textual form as the JSON twin
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True)
    return str(v)


def write_report(report: CampaignReport, out_dir: str, name: str):
    os.makedirs(out_dir, exist_ok=True)
    jpath = os.path.join(out_dir, f"{name}.jsonl")
    with open(jpath, "w", encoding="utf-8") as fh:
        fh.write(report.to_jsonl())
    rows = [r for r in report.rows if r.get("type") != "provenance"]
    cpath = os.path.join(out_dir, f"{name}.csv")
    cols: list[str] = []
    for r in rows:
        for k in r:
            if k not in cols:
                cols.append(k)
    with open(cpath, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for r in rows:
            w.writerow([_csv_cell(r.get(c)) for c in cols])
    return jpath, cpath


def _search_config(cfg: RunConfig, shards: int, cache) -> SearchConfig:
    if cfg.poly is None:
        raise ConfigError("this command needs [poly] coeffs")
    return SearchConfig(
        field=cfg.field,
        f=cfg.poly,
        S=cfg.S,
        height_cap=cfg.height_cap,
        m_max=cfg.m_max,
        bit_cap=cfg.bit_cap,
        factor_budget=cfg.factor_budget,
        element_cap=cfg.element_cap,
        c_params=cfg.c_params,
        splitting=cfg.splitting_override(),
        shard_count=shards,
        cache=cache,
    )


def _need(cfg: RunConfig, key: str) -> str:
    if key not in cfg.run_options:
        raise ConfigError(f"[run] {key} is required for this command")
    return cfg.run_options[key]


def _alpha(cfg: RunConfig):
    return cfg.field.from_string(_need(cfg, "alpha"))


def _provenance_report(cfg: RunConfig, kind: str, rows, partial: bool) -> CampaignReport:
    sc = SearchConfig(
        field=cfg.field,
        f=cfg.poly,
        S=cfg.S,
        height_cap=cfg.height_cap,
        m_max=cfg.m_max,
        bit_cap=cfg.bit_cap,
        factor_budget=cfg.factor_budget,
        element_cap=cfg.element_cap,
        c_params=cfg.c_params,
    )
    prov = sc.provenance()
    if cfg.poly is None:
        prov["poly"] = None
    prov.update({f"run_{k}": _jsonable(v) for k, v in sorted(cfg.run_options.items())})
    return CampaignReport(kind, prov, rows, partial, version=__version__)


# ---------------------------------------------------------------------------
# command handlers
# ---------------------------------------------------------------------------


def _cmd_heights(cfg: RunConfig, shards, seed, cache):
    x = _alpha(cfg)
    hb = height(x, cfg.factor_budget, cache)
    rows = [
        {
            "type": "height",
            "alpha": x.as_string(),
            "h": hb.total,
            "h_S": height_T(x, cfg.S.places()),
            "h_S_of_inverse": None if x.is_zero() else height_S_of_inverse(x, cfg.S),
        }
    ]
    for pl, contrib in hb.contributions:
        rows.append({"type": "height_place", "place": repr(pl), "contribution": contrib})
    if not x.is_zero():
        st = support_lambda(x, cfg.factor_budget, cache)
        rows.append(
            {
                "type": "support",
                "sigma": [repr(P) for P in st.sigma],
                "lambda": st.lam,
            }
        )
    return _provenance_report(cfg, "heights", rows, False)


def _cmd_constants(cfg: RunConfig, shards, seed, cache):
    field = cfg.field
    s, t, P, Q, T = sset_params(cfg.S)
    rows = [
        {
            "type": "sset_params",
            "s": s,
            "t": t,
            "P": P,
            "Q": Q,
            "T_sum": T,
            "delta_field": field.delta,
            "voutier_delta_d": voutier_delta(field.degree),
            "A3": A3(field) if field.unit_rank >= 1 else None,
            "A1_1_1": A1(1, 1),
            "A2_1_1": A2(1, 1),
        }
    ]
    if cfg.poly is not None:
        zp = is_zero_periodic(cfg.poly)
        sp = cfg.splitting_override() or resolve_splitting(field, cfg.poly)
        rep = northcott_bound(field, cfg.poly, cfg.S, cfg.c_params, sp, zero_periodic=zp)
        rows.extend(rep.rows())
        h_beta = float(cfg.run_options.get("h_beta", 0.0))
        rows.append(
            {
                "type": "gyory_yu_shape",
                "variant1": gyory_yu_height_bound(1, field, cfg.S, h_beta),
                "variant2": (
                    gyory_yu_height_bound(2, field, cfg.S, h_beta) if t > 0 else None
                ),
                "h_beta": h_beta,
            }
        )
    return _provenance_report(cfg, "constants", rows, False)


def _cmd_orbit(cfg: RunConfig, shards, seed, cache):
    if cfg.poly is None:
        raise ConfigError("orbit needs [poly]")
    x = _alpha(cfg)
    m = int(cfg.run_options.get("m", cfg.m_max))
    orb = iterate_orbit(cfg.poly, x, m, cfg.bit_cap)
    rows = []
    from .heights import height_value

    for k, it in enumerate(orb.iterates):
        rows.append(
            {
                "type": "orbit_row",
                "k": k,
                "value": it.as_string(),
                "h": height_value(it),
            }
        )
    partial = False
    if orb.truncated:
        rows.append({"type": "skip", "m": orb.length + 1, "reason": "bit-cap"})
        partial = True
    return _provenance_report(cfg, "orbit", rows, partial)


def _cmd_witness(cfg: RunConfig, shards, seed, cache):
    if cfg.poly is None:
        raise ConfigError("witness needs [poly]")
    x = _alpha(cfg)
    m = int(_need(cfg, "m"))
    n = int(_need(cfg, "n"))
    rows = []
    partial = False
    w = check_s_integer_ratio(cfg.poly, x, m, n, cfg.S)
    rows.append(w.row() if w else {"type": "no_witness", "kind": "s_integer_ratio", "m": m, "n": n})
    if n >= 1:
        try:
            w2 = check_power_dependence(
                cfg.poly, x, m, n, cfg.S, cfg.factor_budget, cache
            )
            rows.append(
                w2.row() if w2 else {"type": "no_witness", "kind": "power_relation", "m": m, "n": n}
            )
        except IncompleteFactorization:
            rows.append({"type": "skip", "m": m, "n": n, "reason": "factor-budget"})
            partial = True
    return _provenance_report(cfg, "witness", rows, partial)


def _cmd_search_dependence(cfg: RunConfig, shards, seed, cache):
    return search_dependence(_search_config(cfg, shards, cache))


def _cmd_sunit_scan(cfg: RunConfig, shards, seed, cache):
    n_max = int(cfg.run_options.get("n_max", cfg.m_max))
    return search_sunit_orbit_values(_search_config(cfg, shards, cache), n_max)


def _cmd_primitive_divisors(cfg: RunConfig, shards, seed, cache):
    if cfg.poly is None:
        raise ConfigError("primitive-divisors needs [poly]")
    x = _alpha(cfg)
    m = int(_need(cfg, "m"))
    k = int(cfg.run_options.get("k", m))
    rows = []
    partial = False
    try:
        res = find_primitive_divisor(cfg.poly, x, m, k, cfg.factor_budget, cache)
        rows.append(
            {
                "type": "primitive_divisor",
                "m": m,
                "k": k,
                "prime": repr(res.primitive_prime) if res.primitive_prime else None,
                "norm": res.primitive_prime.norm if res.primitive_prime else None,
                "window": res.excluded_indices,
            }
        )
    except IncompleteFactorization:
        rows.append({"type": "skip", "m": m, "reason": "factor-budget"})
        partial = True
    return _provenance_report(cfg, "primitive-divisors", rows, partial)


def _cmd_lambda_report(cfg: RunConfig, shards, seed, cache):
    if cfg.poly is None:
        raise ConfigError("lambda-report needs [poly]")
    x = _alpha(cfg)
    n = int(cfg.run_options.get("n", 0))
    m_max = int(cfg.run_options.get("m", cfg.m_max))
    rows = lambda_growth_report(
        cfg.poly, x, n, m_max, cfg.c_params.c4, cfg.factor_budget, cfg.bit_cap, cache
    )
    partial = any(r.get("type") == "skip" for r in rows)
    return _provenance_report(cfg, "lambda-report", rows, partial)


def _cmd_verify_spart(cfg: RunConfig, shards, seed, cache):
    if cfg.poly is None:
        raise ConfigError("verify-spart needs [poly]")
    rows = []
    partial = False
    if "alpha" in cfg.run_options:
        x = _alpha(cfg)
        try:
            wit = spart_witness(cfg.poly, x, cfg.S, cfg.factor_budget, cache)
            rows.append(wit.row())
        except IncompleteFactorization:
            rows.append({"type": "skip", "alpha": cfg.run_options["alpha"], "reason": "factor-budget"})
            partial = True
    n_samples = int(cfg.run_options.get("sample_count", 0))
    if n_samples > 0:
        rep = verify_spart_empirical(_search_config(cfg, shards, cache), n_samples)
        rows.extend(rep.rows)
    rep = _provenance_report(cfg, "verify-spart", rows, partial)
    return rep


_HANDLERS = {
    "heights": _cmd_heights,
    "constants": _cmd_constants,
    "orbit": _cmd_orbit,
    "witness": _cmd_witness,
    "search-dependence": _cmd_search_dependence,
    "sunit-scan": _cmd_sunit_scan,
    "primitive-divisors": _cmd_primitive_divisors,
    "lambda-report": _cmd_lambda_report,
    "verify-spart": _cmd_verify_spart,
}


def run_command(name: str, cfg: RunConfig, out_dir: str, shards: int = 1, seed=None, cache=None) -> int:
    if name not in _HANDLERS:
        raise ConfigError(f"unknown command {name!r}")
    if seed is not None:
        random.seed(seed)
    report = _HANDLERS[name](cfg, shards, seed, cache)
    write_report(report, out_dir, name)
    partial = report.partial or any(r.get("type") == "skip" for r in report.rows)
    return 2 if partial else 0


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="orbitforge",
        description="heights, effective bound shapes and dependence search in polynomial orbits",
    )
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", required=True, help="INI run configuration")
    ap.add_argument("--out", default=None, help="output directory (default: config [output] dir or .)")
    ap.add_argument("--shards", type=int, default=1)
    ap.add_argument("--seed", type=int, default=None)
    args = ap.parse_args(argv)
    try:
        cfg = load_config(args.config)
        out_dir = args.out or cfg.output_dir or "."
        cache_path = default_cache_path()
        cache = FactorCache(cache_path) if cache_path else None
        code = run_command(args.command, cfg, out_dir, args.shards, args.seed, cache)
        return code
    except (ConfigError, FieldError, ValueError, ArithmeticError, OSError) as exc:
        print(f"orbitforge: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
