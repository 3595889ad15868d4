"""Command-line surface: evaluation, domain checks, decomposition, relation
generation, exact ranks, and the rank table.

Exit-code contract (stable): 0 success, 2 domain violation, 3 parse/usage
error, 4 budget cap exceeded, 5 non-admissible symbol.

Output is JSON by default; CSV covers the flat tables (table1, eval
refinement lists); text is a human-readable rendering.  Relation sets are
cached under --cache-dir (or $MZF_CACHE_DIR) keyed by a content hash of the
generation settings; cache hits are byte-identical to cold runs.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import re
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import relations as rel_mod
from . import series
from .decompose import count_lattice_points, decompose_to_mzv, weak_orders
from .errors import (
    BudgetError,
    DomainError,
    NonAdmissibleError,
    ParseError,
)
from .model import (
    EXTRA,
    ComplexArgs,
    Shape,
    VarId,
    build_constraints_S,
    build_constraints_S_i,
    build_constraints_S_ij,
    build_constraints_T_i,
    parse_complex,
    w_inequalities,
)

CACHE_ENV = "MZF_CACHE_DIR"


@dataclass
class RunConfig:
    cache_dir: Path | None
    out_format: str
    parallel: int
    max_cutoff: int | None
    max_weight: int
    max_rows: int

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        cache = getattr(args, "cache_dir", None) or os.environ.get(CACHE_ENV)
        parallel = max(1, getattr(args, "parallel", 1) or 1)
        return cls(
            cache_dir=Path(cache) if cache else None,
            out_format=getattr(args, "format", "json") or "json",
            parallel=parallel,
            max_cutoff=getattr(args, "budget_max_n", None),
            max_weight=getattr(args, "budget_max_weight", None) or 8,
            max_rows=getattr(args, "budget_max_rows", None) or 20000,
        )


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(message)


def _bool_flag(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ParseError(f"expected a boolean, got {text!r}")


def build_parser() -> _Parser:
    p = _Parser(prog="cycliczeta", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--format", choices=("json", "csv", "text"), default="json")
        sp.add_argument("--cache-dir", default=None)
        sp.add_argument("--parallel", type=int, default=1)

    ev = sub.add_parser("eval", help="evaluate a truncated series")
    ev.add_argument("--kind", required=True,
                    choices=("mzf", "zeta-tilde", "zeta-c", "mt", "theorem"))
    ev.add_argument("--shape", default=None)
    ev.add_argument("--s", required=True)
    ev.add_argument("--N", type=int, default=None)
    ev.add_argument("--N-list", dest="n_list", default=None)
    ev.add_argument("--i", type=int, default=None)
    ev.add_argument("--j", type=int, default=None)
    ev.add_argument("--variant", default="diff",
                    choices=("1", "2", "diff", "h1", "h2"))
    ev.add_argument("--budget-max-n", type=int, default=None)
    common(ev)

    dm = sub.add_parser("domain", help="membership verdict with margins")
    dm.add_argument("--shape", default=None)
    dm.add_argument("--s", required=True)
    common(dm)

    rl = sub.add_parser("relations", help="generate a relation set file")
    rl.add_argument("--weight", type=int, required=True)
    rl.add_argument("--family", required=True, choices=rel_mod.FAMILIES)
    rl.add_argument("--out", required=True)
    rl.add_argument("--include-d1-derivation", type=_bool_flag, default=True)
    rl.add_argument("--budget-max-weight", type=int, default=None)
    rl.add_argument("--budget-max-rows", type=int, default=None)
    common(rl)

    rk = sub.add_parser("rank", help="exact rank of a relation set file")
    rk.add_argument("--in", dest="infile", required=True)
    common(rk)

    tb = sub.add_parser("table1", help="independent-relation counts per weight")
    tb.add_argument("--max-weight", type=int, required=True)
    tb.add_argument("--families", nargs="*", default=list(rel_mod.FAMILIES),
                    choices=rel_mod.FAMILIES)
    tb.add_argument("--include-d1-derivation", type=_bool_flag, default=True)
    tb.add_argument("--budget-max-weight", type=int, default=None)
    tb.add_argument("--budget-max-rows", type=int, default=None)
    common(tb)

    dc = sub.add_parser("decompose", help="rewrite a constrained sum into symbols")
    dc.add_argument("--shape", required=True)
    dc.add_argument("--set", dest="setname", required=True,
                    choices=("S", "S_i", "S_ij", "T_i"))
    dc.add_argument("--i", type=int, default=None)
    dc.add_argument("--j", type=int, default=None)
    dc.add_argument("--exponents", default=None)
    dc.add_argument("--count", action="store_true")
    dc.add_argument("--N", type=int, default=None)
    common(dc)
    return p


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _emit(text: str):
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _plan_from_args(args) -> series.TruncationPlan:
    refinements = None
    if args.n_list:
        try:
            refinements = tuple(int(x) for x in args.n_list.split(","))
        except ValueError:
            raise ParseError(f"bad --N-list {args.n_list!r}") from None
        if not refinements:
            raise ParseError("--N-list is empty")
    cutoff = args.N if args.N is not None else (refinements[-1] if refinements else None)
    if cutoff is None:
        raise ParseError("one of --N or --N-list is required")
    try:
        return series.TruncationPlan(cutoff, refinements)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def _parse_flat_complex(text: str) -> list[complex]:
    entries = [e for e in re.split(r"[;,]", text) if e.strip()]
    if not entries:
        raise ParseError("empty argument list")
    return [parse_complex(e) for e in entries]


def _parse_args_with_shape(args) -> ComplexArgs:
    # The canonical form separates blocks with ';', but a flat comma list is
    # accepted whenever --shape pins the block structure.
    shape = Shape.parse(args.shape.replace(";", ",")) if args.shape else None
    if shape is None:
        return ComplexArgs.parse(args.s)
    try:
        return ComplexArgs.parse(args.s, shape)
    except ParseError:
        vals = _parse_flat_complex(args.s)
        if len(vals) != shape.total_depth:
            raise
        return ComplexArgs(shape, tuple(vals))


def _report_text(rep: series.EvalReport) -> str:
    lines = [f"value = {rep.value.real!r} + {rep.value.imag!r}i  (N = {rep.cutoff})"]
    if rep.refinements:
        for n, v in rep.refinements:
            lines.append(f"  N={n}: {v.real!r} + {v.imag!r}i")
    lines.append(f"residual estimate = {rep.residual!r}")
    return "\n".join(lines)


def _report_csv(rep: series.EvalReport) -> str:
    rows = ["N,re,im"]
    for n, v in rep.refinements or [(rep.cutoff, rep.value)]:
        rows.append(f"{n},{v.real!r},{v.imag!r}")
    return "\n".join(rows)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_eval(args, cfg: RunConfig) -> int:
    plan = _plan_from_args(args)
    kind = args.kind
    if kind == "mzf":
        rep = series.eval_mzf(_parse_flat_complex(args.s), plan,
                              max_cutoff=cfg.max_cutoff)
    elif kind == "mt":
        vals = _parse_flat_complex(args.s)
        if len(vals) != 3:
            raise ParseError("--kind mt needs exactly three arguments")
        rep = series.eval_mordell_tornheim(*vals, plan, max_cutoff=cfg.max_cutoff)
    else:
        s = _parse_args_with_shape(args)
        try:
            if kind == "zeta-tilde":
                if args.i is None or args.j is None:
                    raise ParseError("--kind zeta-tilde needs --i and --j")
                if args.variant in ("h1", "h2"):
                    rep = series.eval_zeta_tilde_harmonic(
                        s, args.i, args.j, int(args.variant[1]), plan,
                        max_cutoff=cfg.max_cutoff)
                else:
                    rep = series.eval_zeta_tilde(
                        s, args.i, args.j, args.variant, plan,
                        max_cutoff=cfg.max_cutoff)
            elif kind == "zeta-c":
                if args.i is not None:
                    rep = series.eval_zeta_C_i(s, args.i, plan, max_cutoff=cfg.max_cutoff)
                else:
                    rep = series.eval_zeta_C(s, plan, max_cutoff=cfg.max_cutoff)
            else:  # theorem
                rep = series.eval_theorem_residual(s, plan, max_cutoff=cfg.max_cutoff)
        except ValueError as exc:
            raise ParseError(str(exc)) from None

    if kind == "theorem":
        if cfg.out_format == "json":
            _emit(json.dumps(rep.to_json_obj(), indent=2))
        elif cfg.out_format == "csv":
            rows = ["N,lhs_re,lhs_im,rhs_re,rhs_im,residual"]
            for n, l, r, q in rep.refinements or [
                (rep.cutoff, rep.lhs, rep.rhs, rep.residual)
            ]:
                rows.append(f"{n},{l.real!r},{l.imag!r},{r.real!r},{r.imag!r},{q!r}")
            _emit("\n".join(rows))
        else:
            lines = [
                f"lhs = {rep.lhs!r}",
                f"rhs = {rep.rhs!r}",
                f"residual = {rep.residual!r}  (N = {rep.cutoff})",
            ]
            if rep.refinements:
                for n, _, _, q in rep.refinements:
                    lines.append(f"  N={n}: residual {q!r}")
            _emit("\n".join(lines))
        return 0
    if cfg.out_format == "json":
        _emit(json.dumps(rep.to_json_obj(), indent=2))
    elif cfg.out_format == "csv":
        _emit(_report_csv(rep))
    else:
        _emit(_report_text(rep))
    return 0


def cmd_domain(args, cfg: RunConfig) -> int:
    s = _parse_args_with_shape(args)
    qs = w_inequalities(s)
    inside = all(q.ok for q in qs)
    if cfg.out_format == "json":
        _emit(json.dumps({
            "inside": inside,
            "inequalities": [
                {
                    "label": q.label,
                    "value": q.value,
                    "threshold": q.threshold,
                    "strict": q.strict,
                    "ok": q.ok,
                }
                for q in qs
            ],
        }, indent=2))
    else:
        verdict = "inside W" if inside else "outside W"
        first_bad = next((q for q in qs if not q.ok), None)
        head = verdict if first_bad is None else f"{verdict}: {first_bad.describe()}"
        lines = [head]
        for q in qs:
            lines.append(
                ("  ok   " if q.ok else "  FAIL ")
                + q.describe()
                + f"  (margin {q.value - q.threshold:+g})"
            )
        _emit("\n".join(lines))
    return 0


def _relation_set_bytes(weight: int, family: str, include_d1: bool,
                        cfg: RunConfig) -> bytes:
    if weight > rel_mod.HARD_MAX_WEIGHT or weight > cfg.max_weight:
        raise BudgetError(
            f"weight {weight} exceeds the configured budget "
            f"{min(cfg.max_weight, rel_mod.HARD_MAX_WEIGHT)}"
        )
    configs = rel_mod.enumerate_family(weight, family,
                                       include_d1_derivation=include_d1)
    if len(configs) > cfg.max_rows:
        raise BudgetError(f"{len(configs)} rows exceed the budget {cfg.max_rows}")

    def one(pair):
        shape, k = pair
        r = rel_mod.csf_relation(k) if family == "csf" else rel_mod.cyclic_relation(k)
        return rel_mod.Relation(r.combo, rel_mod.Provenance(family, shape, k))

    if cfg.parallel > 1:
        with ThreadPoolExecutor(max_workers=cfg.parallel) as pool:
            rels = list(pool.map(one, configs))
    else:
        rels = [one(c) for c in configs]
    obj = rel_mod.relation_set_to_json_obj(
        weight, family, rels,
        settings={"include_d1_derivation": include_d1, "schema": 1},
    )
    return (json.dumps(obj, indent=2) + "\n").encode()


def _atomic_write(path: Path, data: bytes):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _cache_path(cfg: RunConfig, weight: int, family: str, include_d1: bool) -> Path | None:
    if cfg.cache_dir is None:
        return None
    key = json.dumps(
        {"schema": 1, "weight": weight, "family": family,
         "include_d1_derivation": include_d1},
        sort_keys=True,
    )
    h = hashlib.sha256(key.encode()).hexdigest()[:16]
    return cfg.cache_dir / f"relations-w{weight}-{family}-{h}.json"


def _cache_valid(data: bytes) -> bool:
    try:
        obj = json.loads(data)
        return all(k in obj for k in ("weight", "family", "symbols", "rows"))
    except (json.JSONDecodeError, TypeError):
        return False


def cmd_relations(args, cfg: RunConfig) -> int:
    include_d1 = args.include_d1_derivation
    cache = _cache_path(cfg, args.weight, args.family, include_d1)
    data = None
    cached = False
    if cache is not None and cache.exists():
        blob = cache.read_bytes()
        if _cache_valid(blob):
            data, cached = blob, True
        else:
            print(f"warning: corrupt cache entry {cache}, recomputing",
                  file=sys.stderr)
    if data is None:
        data = _relation_set_bytes(args.weight, args.family, include_d1, cfg)
        if cache is not None:
            _atomic_write(cache, data)
    out = Path(args.out)
    _atomic_write(out, data)
    obj = json.loads(data)
    summary = {
        "out": str(out),
        "weight": args.weight,
        "family": args.family,
        "rows": len(obj["rows"]),
        "symbols": len(obj["symbols"]),
        "cached": cached,
    }
    if cfg.out_format == "json":
        _emit(json.dumps(summary, indent=2))
    else:
        _emit(
            f"wrote {summary['rows']} relations over {summary['symbols']} symbols "
            f"to {out}" + (" (cache hit)" if cached else "")
        )
    return 0


def cmd_rank(args, cfg: RunConfig) -> int:
    path = Path(args.infile)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    matrix = rel_mod.relation_set_loads(text)
    rank = rel_mod.rank_exact(matrix)
    if cfg.out_format == "json":
        _emit(json.dumps({"rank": rank, "rows": matrix.shape[0],
                          "symbols": matrix.shape[1]}, indent=2))
    else:
        _emit(str(rank))
    return 0


def cmd_table1(args, cfg: RunConfig) -> int:
    weights = range(3, args.max_weight + 1)
    families = list(args.families or rel_mod.FAMILIES)

    def cell(pair):
        w, fam = pair
        rels = rel_mod.generate_relations(
            w, fam, include_d1_derivation=args.include_d1_derivation
        )
        if len(rels) > cfg.max_rows:
            raise BudgetError(f"{len(rels)} rows exceed the budget {cfg.max_rows}")
        return rel_mod.rank_exact(rel_mod.relation_matrix(rels))

    for w in weights:
        if w > rel_mod.HARD_MAX_WEIGHT or w > cfg.max_weight:
            raise BudgetError(
                f"weight {w} exceeds the configured budget "
                f"{min(cfg.max_weight, rel_mod.HARD_MAX_WEIGHT)}"
            )
    cells = [(w, fam) for w in weights for fam in families]
    if cfg.parallel > 1:
        with ThreadPoolExecutor(max_workers=cfg.parallel) as pool:
            ranks = list(pool.map(cell, cells))
    else:
        ranks = [cell(c) for c in cells]
    table: dict[int, dict[str, int]] = {}
    for (w, fam), r in zip(cells, ranks):
        table.setdefault(w, {})[fam] = r
    for w in weights:
        table[w]["all_ref"] = rel_mod.ALL_RELATIONS_REF.get(w, 0)

    if cfg.out_format == "json":
        obj = {
            "note": "all_ref is a stored reference count, not computed",
            "rows": [{"weight": w, **table[w]} for w in weights],
        }
        _emit(json.dumps(obj, indent=2))
    elif cfg.out_format == "csv":
        header = ["weight"] + families + ["all_relations(ref)"]
        rows = [",".join(header)]
        for w in weights:
            rows.append(
                ",".join([str(w)] + [str(table[w][f]) for f in families]
                         + [str(table[w]["all_ref"])])
            )
        _emit("\n".join(rows))
    else:
        names = {"csf": "cyclic sum formula", "derivation": "derivation relation",
                 "cyclic": "cyclic relation"}
        width = max(len("all relations (ref)"), *(len(names[f]) for f in families))
        lines = [f"{'weight':<{width}}" + "".join(f"{w:>6d}" for w in weights)]
        for f in families:
            lines.append(
                f"{names[f]:<{width}}"
                + "".join(f"{table[w][f]:>6d}" for w in weights)
            )
        lines.append(
            f"{'all relations (ref)':<{width}}"
            + "".join(f"{table[w]['all_ref']:>6d}" for w in weights)
        )
        _emit("\n".join(lines))
    return 0


_EXP_KEY = re.compile(r"^(n)$|^n(\d+)_(\d+)$")


def _parse_exponents(text: str, variables) -> dict[VarId, int]:
    out: dict[VarId, int] = {}
    for tok in re.split(r"[,\s]+", text.strip()):
        if not tok:
            continue
        if ":" not in tok:
            raise ParseError(f"bad exponent entry {tok!r} (expected key:value)")
        key, _, val = tok.partition(":")
        m = _EXP_KEY.match(key.strip())
        if not m:
            raise ParseError(f"bad exponent key {key!r} (use n or n<i>_<j>)")
        var = EXTRA if m.group(1) else VarId.block(int(m.group(2)), int(m.group(3)))
        try:
            out[var] = int(val)
        except ValueError:
            raise ParseError(f"bad exponent value {val!r}") from None
    missing = [v for v in variables if v not in out]
    if missing:
        raise ParseError(
            "missing exponents for " + ", ".join(str(v) for v in missing)
        )
    return out


def cmd_decompose(args, cfg: RunConfig) -> int:
    shape = Shape.parse(args.shape)
    try:
        if args.setname == "S":
            cs = build_constraints_S(shape)
        elif args.setname == "S_i":
            if args.i is None:
                raise ParseError("--set S_i needs --i")
            cs = build_constraints_S_i(shape, args.i)
        elif args.setname == "S_ij":
            if args.i is None or args.j is None:
                raise ParseError("--set S_ij needs --i and --j")
            cs = build_constraints_S_ij(shape, args.i, args.j)
        else:
            if args.i is None:
                raise ParseError("--set T_i needs --i")
            cs = build_constraints_T_i(shape, args.i)
    except ValueError as exc:
        raise ParseError(str(exc)) from None

    if args.count:
        if args.N is None:
            raise ParseError("--count needs --N")
        n = count_lattice_points(cs, args.N)
        if cfg.out_format == "json":
            _emit(json.dumps({"count": n, "N": args.N,
                              "constraints": [str(c) for c in cs.constraints]}))
        else:
            _emit(str(n))
        return 0

    if args.exponents is None:
        raise ParseError("--exponents is required unless --count is given")
    exps = _parse_exponents(args.exponents, cs.variables)
    combo = decompose_to_mzv(cs, exps)
    orders = weak_orders(cs)
    if cfg.out_format == "json":
        _emit(json.dumps({
            "weak_orders": len(orders),
            "combination": combo.to_json_obj(),
            "constraints": [str(c) for c in cs.constraints],
        }, indent=2))
    else:
        _emit(f"{len(orders)} weak orders\n{combo}")
    return 0


# ---------------------------------------------------------------------------


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = RunConfig.from_args(args)
        handler = {
            "eval": cmd_eval,
            "domain": cmd_domain,
            "relations": cmd_relations,
            "rank": cmd_rank,
            "table1": cmd_table1,
            "decompose": cmd_decompose,
        }[args.command]
        return handler(args, cfg)
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return 2
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 3
    except BudgetError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 4
    except NonAdmissibleError as exc:
        detail = f" (partition {exc.partition})" if exc.partition is not None else ""
        print(f"non-admissible symbol: {exc}{detail}", file=sys.stderr)
        return 5


if __name__ == "__main__":
    sys.exit(main())
