"""End-to-end verification runs and their reports."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction

from nontidy.cohomology import sw_height
from nontidy.crystal import (
    coindex_one_witness,
    find_odd_involution,
    replay_certificate,
    torsion_free_certificate,
)
from nontidy.simplicial import build_quotient_model

log = logging.getLogger(__name__)

MODES = ("group-only", "cohomology-only", "full")
FORMATS = ("json", "markdown")


@dataclass
class PipelineConfig:
    dim: int
    resolution: Fraction = Fraction(1, 4)
    mode: str | None = None

    def __post_init__(self):
        if not isinstance(self.dim, int) or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim!r}")
        self.resolution = Fraction(self.resolution)
        if self.mode is None:
            self.mode = "full" if self.dim <= 3 else "group-only"
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")


@dataclass
class VerificationReport:
    dim: int
    mode: str
    resolution: str
    group: dict | None = None
    cohomology: dict | None = None
    conclusion: str = ""
    exit_status: int = 1
    failures: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "dim": self.dim,
            "mode": self.mode,
            "resolution": self.resolution,
            "group": self.group,
            "cohomology": self.cohomology,
            "conclusion": self.conclusion,
            "exit_status": self.exit_status,
            "failures": list(self.failures),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VerificationReport":
        return cls(
            dim=d["dim"],
            mode=d["mode"],
            resolution=d["resolution"],
            group=d["group"],
            cohomology=d["cohomology"],
            conclusion=d["conclusion"],
            exit_status=d["exit_status"],
            failures=list(d["failures"]),
        )


def _group_section(n: int, failures: list[str]) -> dict:
    cert = torsion_free_certificate(n)
    try:
        replayed = replay_certificate(cert)
    except AssertionError as exc:
        replayed = False
        failures.append(f"certificate replay failed: {exc}")
    if cert.verdict != "torsion-free":
        failures.append(f"group is not torsion-free: {cert.counterexample}")
    alpha = find_odd_involution(n)
    if alpha is not None:
        failures.append(f"odd involution found: {alpha}")
    w = coindex_one_witness(n)
    if w.parity != 1:
        failures.append("coindex witness is not odd")
    return {
        "torsion_verdict": cert.verdict,
        "patterns_checked": len(cert.entries),
        "certificate_replayed": replayed,
        "odd_involution": None if alpha is None else list(alpha.twice),
        "coindex_witness": list(w.twice),
        "witness_parity": w.parity,
    }


def _cohomology_section(n: int, resolution: Fraction, failures: list[str]) -> dict:
    m = build_quotient_model(n, resolution)
    log.info("model for n=%d: cells %s, %d subdivisions", n, m.complex.cells_per_dim(), m.subdivisions)
    rep = sw_height(m)
    betti = rep.betti
    if betti != betti[::-1]:
        failures.append(f"Betti numbers {betti} are not Poincaré symmetric")
    euler = m.complex.euler()
    if euler != 0:
        failures.append(f"Euler characteristic {euler} != 0")
    top_nonzero = dict(rep.powers).get(n) is False
    if top_nonzero != (rep.pairing == 1):
        failures.append("top cup power and fundamental-class pairing disagree")
    if rep.height != n:
        failures.append(f"height {rep.height} != {n}")
    section = rep.as_dict()
    section["cells_per_dim"] = m.complex.cells_per_dim()
    section["euler"] = euler
    section["subdivisions"] = m.subdivisions
    return section


def _conclusion(n: int, group: dict | None, coh: dict | None) -> str:
    coind_one = group is not None and group["odd_involution"] is None and group["witness_parity"] == 1
    if coh is not None and coind_one:
        if coh["height"] == n:
            if n >= 2:
                return f"non-tidy: h = {n}, coind = 1"
            return "h = 1, coind = 1: no gap"
        return f"h = {coh['height']}, coind = 1"
    if coind_one:
        return "coind = 1; height not computed"
    if coh is not None:
        return f"h = {coh['height']}; coindex not computed"
    return "inconclusive"


def run_pipeline(config: PipelineConfig) -> VerificationReport:
    n = config.dim
    failures: list[str] = []
    group = coh = None
    if config.mode in ("group-only", "full"):
        group = _group_section(n, failures)
    if config.mode in ("cohomology-only", "full"):
        coh = _cohomology_section(n, config.resolution, failures)
    return VerificationReport(
        dim=n,
        mode=config.mode,
        resolution=str(config.resolution),
        group=group,
        cohomology=coh,
        conclusion=_conclusion(n, group, coh),
        exit_status=1 if failures else 0,
        failures=failures,
    )


def _markdown(r: VerificationReport) -> str:
    out = [f"# Verification report, n = {r.dim}", ""]
    out.append(f"- mode: {r.mode}")
    out.append(f"- resolution: {r.resolution}")
    out.append("")
    if r.group is not None:
        g = r.group
        out += ["## Deck group", ""]
        out.append(f"- torsion: {g['torsion_verdict']} ({g['patterns_checked']} sign patterns, replayed: {g['certificate_replayed']})")
        out.append(f"- odd involution: {g['odd_involution'] if g['odd_involution'] is not None else 'none'}")
        out.append(f"- coindex witness (twice-values): {g['coindex_witness']}, parity {g['witness_parity']}")
        out.append("")
    if r.cohomology is not None:
        c = r.cohomology
        out += ["## Mod-2 cohomology", ""]
        out.append(f"- cells per dimension: {c['cells_per_dim']}, Euler characteristic {c['euler']}")
        out.append(f"- Betti numbers: {c['betti']}")
        out.append("")
        out.append("| k | w1^k is a coboundary |")
        out.append("|---|---|")
        for p in c["powers"]:
            out.append(f"| {p['k']} | {p['is_coboundary']} |")
        out.append("")
        out.append(f"- height: {c['height']}")
        out.append(f"- pairing with fundamental class: {c['pairing']}")
        out.append("")
    out.append(f"**Conclusion:** {r.conclusion}")
    if r.failures:
        out.append("")
        out.append("Failures:")
        out += [f"- {f}" for f in r.failures]
    return "\n".join(out) + "\n"


def emit_report(r: VerificationReport, format: str = "json") -> bytes:
    if format == "json":
        return (json.dumps(r.as_dict(), indent=2) + "\n").encode()
    if format == "markdown":
        return _markdown(r).encode()
    raise ValueError(f"unknown report format {format!r}")


def parse_report(data: bytes | str) -> VerificationReport:
    return VerificationReport.from_dict(json.loads(data))
