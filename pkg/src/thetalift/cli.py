"""Command-line verification reports.

Every subcommand writes one JSON document to stdout (or --output).  Exit
status: 0 when every verdict passes, 1 when one fails, 2 on a configuration
error.  Errors go to stderr as a JSON object.
"""

from __future__ import annotations

import json
import sys
import time
from contextlib import contextmanager
from typing import Callable, Dict, List, Optional

import click
import numpy as np

from . import thetalift as TL
from .gsp4cosets import COSET_KINDS, closure_scan, cosets
from .localfield import FieldConfigError, legendre

SCHEMA_VERSION = 1


class ConfigError(click.UsageError):
    """Invalid run configuration (exit code 2)."""


def _emit_error(kind: str, message: str) -> None:
    sys.stderr.write(json.dumps({"error": kind, "message": message}, sort_keys=True) + "\n")


class Report:
    """Single writer for the output document."""

    def __init__(self, command: str, config: dict, timings: bool):
        self.doc: Dict[str, object] = {"schema": SCHEMA_VERSION, "command": command,
                                       "config": config, "artifacts": {}, "verdicts": {}}
        self.timings: Optional[Dict[str, float]] = {} if timings else None

    def verdict(self, name: str, ok: bool, detail=None) -> None:
        entry = {"pass": bool(ok)}
        if detail is not None:
            entry["detail"] = detail
        self.doc["verdicts"][name] = entry  # type: ignore[index]

    def artifact(self, name: str, value) -> None:
        self.doc["artifacts"][name] = value  # type: ignore[index]

    @contextmanager
    def timed(self, name: str):
        t0 = time.perf_counter()
        yield
        if self.timings is not None:
            self.timings[name] = round(time.perf_counter() - t0, 3)

    @property
    def ok(self) -> bool:
        return all(v["pass"] for v in self.doc["verdicts"].values())  # type: ignore[union-attr]

    def dump(self) -> str:
        if self.timings is not None:
            self.doc["timings"] = self.timings
        self.doc["ok"] = self.ok
        return json.dumps(self.doc, sort_keys=True, indent=2, default=_json_default) + "\n"


def _json_default(x):
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.bool_):
        return bool(x)
    return str(x)


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


def _case_from(p: int, case: str, n, n1, n2) -> TL.Case:
    try:
        if case == "split":
            if n is not None and (n1 is not None or n2 is not None):
                raise ConfigError("give either --n or --n1/--n2 for the split case")
            if n is None and (n1 is None or n2 is None):
                raise ConfigError("split case needs --n1 and --n2 (or --n)")
            return TL.Case.make("split", p, n=n, n1=n1, n2=n2)
        if n is None:
            raise ConfigError(f"{case} case needs --n")
        return TL.Case.make(case, p, n=n)
    except (TL.UnsupportedCase, FieldConfigError) as exc:
        raise ConfigError(str(exc)) from exc


def _check_chi_delta(c: TL.Case, chi_delta: Optional[int]) -> Optional[int]:
    if chi_delta is None:
        return None
    if c.kind != "ramified":
        raise ConfigError("--chi-delta applies to the ramified case only")
    actual = TL.chi_delta(c)
    if chi_delta != actual:
        raise ConfigError(f"chi(delta) is forced to chi(-1) = {actual} at p = {c.p}")
    return chi_delta


def case_options(f: Callable) -> Callable:
    opts = [
        click.option("--p", "p", type=int, required=True, help="odd residue characteristic"),
        click.option("--case", "case", type=click.Choice(TL.KINDS), required=True),
        click.option("--n", "n", type=int, default=None, help="level (inert, ramified)"),
        click.option("--n1", "n1", type=int, default=None, help="first split level"),
        click.option("--n2", "n2", type=int, default=None, help="second split level"),
        click.option("--chi-delta", "chi_delta", type=click.Choice(["1", "-1"]), default=None,
                     help="sign of chi(delta), ramified only"),
    ]
    for o in reversed(opts):
        f = o(f)
    return f


def common_options(f: Callable) -> Callable:
    opts = [
        click.option("--output", "output", type=click.Path(dir_okay=False), default=None),
        click.option("--depth", "depth", type=int, default=None, help="support scan depth"),
        click.option("--seed", "seed", type=int, default=0, help="seed for sampled checks"),
        click.option("--timings/--no-timings", default=False,
                     help="include wall-clock timings (breaks byte-identical output)"),
    ]
    for o in reversed(opts):
        f = o(f)
    return f


def _config(c: TL.Case, **kw) -> dict:
    doc = c.to_json()
    doc.update({k: v for k, v in kw.items() if v is not None})
    return doc


def _finish(rep: Report, output: Optional[str]) -> None:
    text = rep.dump()
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    sys.exit(0 if rep.ok else 1)


# ---------------------------------------------------------------------------
# Report sections
# ---------------------------------------------------------------------------


def _section_phi(rep: Report, c: TL.Case) -> TL.PhiBundle:
    with rep.timed("build_phi"):
        bundle = TL.build_phi(c)
    rep.artifact("phi", bundle.to_json())
    if bundle.tilde is not None:
        struct = TL.summand_structure(bundle)
        rep.artifact("summand_constants", struct)
        rep.verdict("summand_boxes", all(s["boxes_match"] for s in struct.values()))
        with rep.timed("overlaps"):
            ov = TL.summand_overlaps(bundle)
        rep.verdict("summands_disjoint", ov.disjoint, ov.to_json())
    return bundle


def _section_invariance(rep: Report, bundle: TL.PhiBundle) -> None:
    with rep.timed("invariance"):
        r = TL.invariance_report(bundle)
    for f in r.families:
        rep.verdict(f"invariance.{f.target}.{f.family}", f.ok, f.to_json())


def _section_bessel(rep: Report, c: TL.Case, chi_delta: Optional[int]) -> None:
    with rep.timed("bessel"):
        value = TL.bessel_at_identity(c, chi_d=chi_delta)
        assembled = TL.bessel_assembly(c)
    doc = value.to_json()
    rep.doc["besselCoefficient"] = doc["besselCoefficient"]
    rep.doc["nonzero"] = doc["nonzero"]
    rep.artifact("bessel", doc)
    rep.artifact("bessel_assembly", assembled.to_json())
    rep.artifact("bessel_consistency", {"closed_form": value.exact(), "assembly": assembled.exact(),
                                        "agree": value.coefficient == assembled.coefficient})
    rep.verdict("bessel_nonzero", value.nonzero)
    rep.verdict("bessel_assembly_nonzero", assembled.nonzero)


def _section_support(rep: Report, c: TL.Case, bundle: TL.PhiBundle, depth: Optional[int]) -> None:
    with rep.timed("support_scan"):
        sc = TL.scan_support(c, depth, bundle)
    rep.verdict("support_scan", sc.ok, sc.to_json())


def _section_fourier(rep: Report, c: TL.Case, bundle: TL.PhiBundle) -> None:
    from .schwartz import negate_argument
    from .weilrep import fourier1
    for i, f in enumerate(bundle.factors, start=1):
        rep.verdict(f"fourier_involution.phi{i}", fourier1(fourier1(f)) == negate_argument(f))
    if c.kind == "ramified":
        ids = TL.fourier_identities(c)
        rep.artifact("fourier_identities", {k: v.to_json() for k, v in sorted(ids.items())})
        for k, v in sorted(ids.items()):
            rep.verdict(f"fourier_identity_boxes.{k}", v.boxes_match)
        kp = TL.kprime_checks(c.params)
        rep.verdict("kprime", kp["fourth_power_one"] and kp["modulus_error"] < 1e-9,
                    {"value": kp["value"], "modulus_error": kp["modulus_error"]})


def _section_crosscheck(rep: Report, c: TL.Case, bundle: TL.PhiBundle, seed: int) -> None:
    from . import oracle as O
    from .gsp4cosets import generators_k, s2, t_n, weyl_j
    from .weilrep import OracleOnly, weil_apply
    P = c.params
    consts = O.resolve_constants(P, seed=seed)
    rr = O.representation_check(P, seed=seed, consts=consts)
    rep.verdict("representation", rr.ok, rr.to_json())
    f = bundle.tilde if bundle.tilde is not None else bundle.phi
    from .weilrep import fourier_full
    def symmetric(w):
        sym4 = w.factor(0).union(w.factor(1))
        return w.with_factor(0, sym4).with_factor(1, sym4)

    # widest window under the enumeration cap
    w = symmetric(O.FiniteWindow.covering(f).union(O.FiniteWindow.covering(fourier_full(f))))
    if w.count > O.MAX_POINTS:
        w = symmetric(O.FiniteWindow.covering(f))
    if w.count > O.MAX_POINTS:
        rep.verdict("oracle_crosscheck", False,
                    {"error": "window exceeds the enumeration cap", "points": w.count})
        return
    table = O.sample(f, w, consts)
    elements = [("J", weyl_j()), ("s2", s2()), ("tN", t_n(c.p, c.N))]
    gens = [g for g in generators_k(c.N, c.p, with_similitude=False)
            if g.family in ("levi", "unipotent")]
    import random
    rng = random.Random(seed)
    for g in rng.sample(gens, min(6, len(gens))):
        elements.append((f"{g.family}{g.params}", g.matrix))
    devs = {}
    for name, g in elements:
        try:
            sym = weil_apply(g, None, f)
        except OracleOnly:
            devs[name] = "oracle only"
            continue
        try:
            num, ww = O.numeric_weil(g, None, table, w, consts)
            ww2 = ww.union(O.FiniteWindow.covering(sym)) if not sym.is_zero() else ww
            devs[name] = O.crosscheck(sym, O.resample(num, ww, ww2), ww2, consts)
        except O.AliasingError:
            devs[name] = "window too coarse"
    numeric = [d for d in devs.values() if isinstance(d, float)]
    rep.verdict("oracle_crosscheck", len(numeric) >= 3 and max(numeric) < 1e-8,
                {k: (f"{v:.3e}" if isinstance(v, float) else v) for k, v in sorted(devs.items())})
    rep.artifact("constants", {"gamma1": consts.gamma1, "gamma_j": consts.gamma_j,
                               "tau": consts.tau})


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


@click.group()
def main() -> None:
    """Verification reports for explicit theta lifts to paramodular level."""


@main.command("build-phi")
@case_options
@common_options
def build_phi_cmd(p, case, n, n1, n2, chi_delta, output, depth, seed, timings):
    c = _case_from(p, case, n, n1, n2)
    _check_chi_delta(c, None if chi_delta is None else int(chi_delta))
    rep = Report("build-phi", _config(c), timings)
    _section_phi(rep, c)
    _finish(rep, output)


@main.command("verify-invariance")
@case_options
@common_options
def verify_invariance_cmd(p, case, n, n1, n2, chi_delta, output, depth, seed, timings):
    c = _case_from(p, case, n, n1, n2)
    _check_chi_delta(c, None if chi_delta is None else int(chi_delta))
    rep = Report("verify-invariance", _config(c), timings)
    bundle = TL.build_phi(c)
    _section_invariance(rep, bundle)
    _finish(rep, output)


@main.command("fourier")
@case_options
@common_options
def fourier_cmd(p, case, n, n1, n2, chi_delta, output, depth, seed, timings):
    c = _case_from(p, case, n, n1, n2)
    _check_chi_delta(c, None if chi_delta is None else int(chi_delta))
    rep = Report("fourier", _config(c), timings)
    _section_fourier(rep, c, TL.build_phi(c))
    _finish(rep, output)


@main.command("cosets")
@click.option("--p", "p", type=int, required=True)
@click.option("--N", "N", type=int, required=True)
@click.option("--kind", "kind", type=click.Choice(COSET_KINDS), required=True)
@click.option("--output", "output", type=click.Path(dir_okay=False), default=None)
@click.option("--timings/--no-timings", default=False)
def cosets_cmd(p, N, kind, output, timings):
    from .localfield import is_prime
    if p == 2 or not is_prime(p):
        raise ConfigError(f"p must be an odd prime, got {p}")
    if N < (1 if kind == "K_mod_Kl" else 2):
        raise ConfigError(f"{kind} needs N >= {1 if kind == 'K_mod_Kl' else 2}")
    rep = Report("cosets", {"p": p, "N": N, "kind": kind}, timings)
    cl = cosets(kind, N, p)
    rep.artifact("cosets", cl.to_json())
    with rep.timed("closure"):
        cr = closure_scan(kind, N, p)
    rep.verdict("closure", cr.disjoint and cr.closed, cr.to_json())
    _finish(rep, output)


@main.command("bessel")
@case_options
@common_options
def bessel_cmd(p, case, n, n1, n2, chi_delta, output, depth, seed, timings):
    c = _case_from(p, case, n, n1, n2)
    cd = _check_chi_delta(c, None if chi_delta is None else int(chi_delta))
    rep = Report("bessel", _config(c, chi_delta=cd), timings)
    _section_bessel(rep, c, cd)
    _finish(rep, output)


@main.command("oracle-crosscheck")
@case_options
@common_options
def oracle_crosscheck_cmd(p, case, n, n1, n2, chi_delta, output, depth, seed, timings):
    c = _case_from(p, case, n, n1, n2)
    _check_chi_delta(c, None if chi_delta is None else int(chi_delta))
    rep = Report("oracle-crosscheck", _config(c, seed=seed), timings)
    _section_crosscheck(rep, c, TL.build_phi(c), seed)
    _finish(rep, output)


@main.command("full-report")
@case_options
@common_options
def full_report_cmd(p, case, n, n1, n2, chi_delta, output, depth, seed, timings):
    c = _case_from(p, case, n, n1, n2)
    cd = _check_chi_delta(c, None if chi_delta is None else int(chi_delta))
    rep = Report("full-report", _config(c, chi_delta=cd, seed=seed, depth=depth), timings)
    bundle = _section_phi(rep, c)
    _section_invariance(rep, bundle)
    _section_fourier(rep, c, bundle)
    _section_support(rep, c, bundle, depth)
    if c.N >= 1:
        cr = closure_scan("K_mod_Kl", c.N, c.p)
        expected = c.q ** c.N + c.q ** (c.N - 1)
        rep.verdict("cosets.K_mod_Kl", cr.disjoint and cr.closed and cr.count == expected,
                    {"count": cr.count, "expected": expected})
    _section_bessel(rep, c, cd)
    _finish(rep, output)


def run(argv: Optional[List[str]] = None) -> int:
    """Entry point with structured errors; returns the exit code."""
    try:
        main.main(args=argv, standalone_mode=False)
    except SystemExit as exc:
        return int(exc.code or 0)
    except click.UsageError as exc:
        _emit_error("config", exc.format_message())
        return 2
    except click.exceptions.Abort:
        _emit_error("aborted", "aborted")
        return 2
    except Exception as exc:  # noqa: BLE001 - reported, not swallowed
        _emit_error(type(exc).__name__, str(exc))
        return 1
    return 0


def entry() -> None:
    sys.exit(run())


if __name__ == "__main__":
    entry()
