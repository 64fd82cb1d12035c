"""Command line entry point: ``qhcodes <subcommand> ...``."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field

from . import codes, cutgap, report
from .fields import FieldError, build_field
from .projective import GuardError
from .varieties import cache_dir_from_env, load_or_enumerate, make_variety, write_pointset
from .verify import ITEM_NAMES, verify_paper

log = logging.getLogger("qhcodes")


@dataclass
class RunConfig:
    e: int | None = None
    r: int | None = None
    variety: str = "veps"
    exhaustive: bool = False
    samples: int | None = None
    seed: int | None = None
    cache_dir: str | None = None
    json_path: str | None = None
    csv_path: str | None = None
    markdown_path: str | None = None
    override_guard: bool = False
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        known = {k: getattr(args, k) for k in cls.__dataclass_fields__ if k != "extra" and hasattr(args, k)}
        return cls(**known)

    @property
    def cap(self):
        return None if self.override_guard else codes.WORK_CAP


def _tower(cfg: RunConfig):
    return build_field(cfg.e, allow_large=cfg.override_guard)


def _pointset(cfg: RunConfig, r=None):
    T = _tower(cfg)
    v = make_variety(cfg.variety, T, cfg.r if r is None else r)
    cap = None if cfg.override_guard else 5 * 10**7
    return T, load_or_enumerate(v, cfg.cache_dir, cap=cap)


def _emit(cfg: RunConfig, body, table=None, markdown: str | None = None) -> None:
    text = report.dumps(body)
    if cfg.json_path:
        report.write_text(cfg.json_path, text)
    else:
        sys.stdout.write(text)
    if table is not None and cfg.csv_path:
        report.write_text(cfg.csv_path, report.weights_csv(table))
    if markdown is not None and cfg.markdown_path:
        report.write_text(cfg.markdown_path, markdown)


def _need_seed(cfg: RunConfig) -> None:
    if cfg.samples and cfg.seed is None:
        raise SystemExit("error: --seed is required whenever sampling (--samples) is used")


# ---------------------------------------------------------------------------
# subcommands

def cmd_field_dump(cfg: RunConfig) -> int:
    T = _tower(cfg)
    body = T.describe()
    body["roots_of_unity_n"] = T.nth_roots_of_unity(T.n)
    _emit(cfg, body)
    return 0


def cmd_enumerate(cfg: RunConfig) -> int:
    T = _tower(cfg)
    v = make_variety(cfg.variety, T, cfg.r)
    ps = load_or_enumerate(v, cfg.cache_dir, cap=None if cfg.override_guard else 5 * 10**7)
    if cfg.extra.get("out"):
        write_pointset(cfg.extra["out"], ps, T.e)
    _emit(cfg, {"e": T.e, "r": cfg.r, "variety": cfg.variety, "points": len(ps),
                "affine": ps.n_affine, "infinity": ps.n_infinity})
    return 0


def cmd_weights(cfg: RunConfig) -> int:
    _need_seed(cfg)
    T, ps = _pointset(cfg)
    S = codes.ProjectiveSystem.from_pointset(ps)
    minimal, d_k = None, {}
    if cfg.samples:
        table = codes.weight_sample(S, cfg.samples, cfg.seed, tower=T)
    else:
        try:
            table = codes.weight_distribution(S, cfg.cap)
        except GuardError as exc:
            raise SystemExit(f"error: {exc}") from None
        minimal = codes.ab_minimality(table)
        d_k = {1: table.min_weight}
    _emit(cfg, report.weights_report(T.e, cfg.r, cfg.variety, table, minimal, d_k), table)
    return 0


def cmd_minimality(cfg: RunConfig) -> int:
    _need_seed(cfg)
    T, ps = _pointset(cfg)
    S = codes.ProjectiveSystem.from_pointset(ps)
    res = codes.is_cutting(S, cfg.cap, cfg.samples or 0, cfg.seed, T)
    body = {"e": T.e, "r": cfg.r, "variety": cfg.variety, "verdict": res.verdict, "mode": res.mode,
            "witness": list(res.witness) if res.witness else None, "witness_span_dim": res.witness_span_dim,
            "checked": res.checked}
    if res.mode == "sampled":
        body.update(seed=res.seed, n_samples=cfg.samples or 0)
    if res.mode == "exhaustive" and res.cutting:
        body["ab"] = codes.ab_minimality(codes.weight_distribution(S, cfg.cap))
    _emit(cfg, body)
    return 0


def cmd_genweights(cfg: RunConfig) -> int:
    T, ps = _pointset(cfg)
    S = codes.ProjectiveSystem.from_pointset(ps)
    k = cfg.extra["k"]
    try:
        d = codes.generalized_weight(S, k, cfg.cap)
    except GuardError as exc:
        raise SystemExit(f"error: {exc}") from None
    _emit(cfg, {"e": T.e, "r": cfg.r, "variety": cfg.variety, "length": S.length, "d_k": {str(k): d}})
    return 0


def cmd_multiset(cfg: RunConfig) -> int:
    T = _tower(cfg)
    j = cfg.extra["j"]
    body = {"e": T.e, "r": cfg.r, "j": j, **codes.multiset_weights(cfg.r, j, T.q)}
    table = None
    if cfg.extra.get("verify"):
        table = codes.weight_distribution(codes.multiset_system(T, cfg.r, j), cfg.cap)
        body["realized"] = table.to_dict()
    _emit(cfg, body, table)
    return 0


def cmd_cutgap(cfg: RunConfig) -> int:
    _need_seed(cfg)
    T, ps = _pointset(cfg)
    k, s = cfg.extra["k"], cfg.extra["s"]
    if cfg.samples:
        g = cutgap.gap_sampled(ps, k, cfg.samples, cfg.seed, tower=T, s=s)
    else:
        try:
            g = cutgap.modified_gap(ps, k, s, cap=None if cfg.override_guard else cutgap.SUBSPACE_CAP) \
                if s >= 0 else cutgap.gap_exhaustive(ps, k, cap=None if cfg.override_guard else cutgap.SUBSPACE_CAP)
        except GuardError as exc:
            raise SystemExit(f"error: {exc}; rerun with --samples N --seed S") from None
    _emit(cfg, {"e": T.e, "r": cfg.r, "variety": cfg.variety, "gap": g.to_dict()})
    return 0


def cmd_hermitian_gaps(cfg: RunConfig) -> int:
    rep = cutgap.hermitian_gap_table(cfg.r, cfg.extra["q"], override=cfg.override_guard)
    _emit(cfg, rep.to_dict())
    return 0


def cmd_fermat_lines(cfg: RunConfig) -> int:
    _emit(cfg, cutgap.fermat_external_lines(cfg.e).to_dict())
    return 0


def cmd_verify_paper(cfg: RunConfig) -> int:
    status, out = verify_paper(
        cfg.e,
        seed=cfg.seed if cfg.seed is not None else 0,
        samples=cfg.samples or 1000,
        large_samples=cfg.extra["large_samples"],
        plane_samples=cfg.extra["plane_samples"],
        only=cfg.extra.get("only"),
        cache_dir=cfg.cache_dir,
    )
    body = out["body"]
    md = report.markdown_table(body["items"])
    _emit(cfg, body, markdown=md)
    if not cfg.markdown_path:
        sys.stderr.write(md)
    return status


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qhcodes", description="Codes from quasi-Hermitian hypersurfaces")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, r=True, variety=False, e=True):
        if e:
            sp.add_argument("--e", type=int, required=True, help="q = 2^e, e odd")
        if r:
            sp.add_argument("--r", type=int, required=True)
        if variety:
            sp.add_argument("--variety", default="veps", choices=["bt", "fermat", "hcone", "hermitian", "veps"])
        sp.add_argument("--cache-dir", dest="cache_dir", default=None,
                        help="point-set cache (default: $QHCODES_CACHE_DIR)")
        sp.add_argument("--json", dest="json_path", default=None)
        sp.add_argument("--override-guard", action="store_true")

    def sampling(sp):
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--exhaustive", action="store_true")
        g.add_argument("--samples", type=int, default=None)
        sp.add_argument("--seed", type=int, default=None)

    sp = sub.add_parser("field-dump", help="print the field tower constants")
    common(sp, r=False)
    sp.set_defaults(func=cmd_field_dump)

    sp = sub.add_parser("enumerate", help="enumerate and cache a point set")
    common(sp, variety=True)
    sp.add_argument("--out", default=None, help="also write the binary point file here")
    sp.set_defaults(func=cmd_enumerate)

    sp = sub.add_parser("weights", help="weight distribution")
    common(sp, variety=True)
    sampling(sp)
    sp.add_argument("--csv", dest="csv_path", default=None)
    sp.set_defaults(func=cmd_weights)

    sp = sub.add_parser("minimality", help="cutting-set test")
    common(sp, variety=True)
    sampling(sp)
    sp.set_defaults(func=cmd_minimality)

    sp = sub.add_parser("genweights", help="generalized Hamming weight d_k")
    common(sp, variety=True)
    sp.add_argument("--k", type=int, required=True)
    sp.set_defaults(func=cmd_genweights)

    sp = sub.add_parser("multiset", help="weights of the multiset construction")
    common(sp)
    sp.add_argument("--j", type=int, required=True)
    sp.add_argument("--verify", action="store_true", help="also run the exhaustive weight distribution")
    sp.add_argument("--csv", dest="csv_path", default=None)
    sp.set_defaults(func=cmd_multiset)

    sp = sub.add_parser("cutgap", help="cutting gap tau_k or tau_{k,s}")
    common(sp, variety=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--s", type=int, default=-1)
    sampling(sp)
    sp.set_defaults(func=cmd_cutgap)

    sp = sub.add_parser("hermitian-gaps", help="exhaustive Hermitian gap table")
    common(sp, e=False)
    sp.add_argument("--q", type=int, required=True)
    sp.set_defaults(func=cmd_hermitian_gaps)

    sp = sub.add_parser("fermat-lines", help="line spectrum of the Fermat curve")
    common(sp, r=False)
    sp.set_defaults(func=cmd_fermat_lines)

    sp = sub.add_parser("verify-paper", help="re-check all published claims for e")
    common(sp, r=False)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--samples", type=int, default=1000, help="sampled hyperplanes for C^4")
    sp.add_argument("--large-samples", type=int, default=64, help="samples for the largest point sets")
    sp.add_argument("--plane-samples", type=int, default=10**4)
    sp.add_argument("--only", action="append", choices=ITEM_NAMES, help="run only this item (repeatable)")
    sp.add_argument("--markdown", dest="markdown_path", default=None)
    sp.set_defaults(func=cmd_verify_paper)
    return p


_EXTRA = ("k", "s", "j", "q", "out", "verify", "only", "large_samples", "plane_samples")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    cfg = RunConfig.from_args(args)
    if cfg.cache_dir is None:
        env = cache_dir_from_env()
        cfg.cache_dir = str(env) if env else None
    cfg.extra = {k: getattr(args, k) for k in _EXTRA if hasattr(args, k)}
    try:
        return args.func(cfg)
    except (FieldError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
