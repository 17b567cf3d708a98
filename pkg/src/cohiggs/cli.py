"""Command-line interface.

Exit codes: 0 success, 2 input error, 3 missing oracle entry, 4 internal
invariant failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import chains, ffcount, higgs, rank2
from .cache import CacheConflict, CensusCache
from .chains import ChainComponent, MissingOracleError, PoincarePolynomial
from .higgs import CharCoeffs, HiggsField, SplittingType
from .sections import Section, as_rational, format_rational

EXIT_OK, EXIT_INPUT, EXIT_ORACLE, EXIT_INVARIANT = 0, 2, 3, 4


class InputError(ValueError):
    pass


def _emit(args, payload, text: str) -> None:
    if args.format == "json":
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


def _read_payload(arg: str):
    """Inline JSON, ``@path`` for a file, or ``-`` for stdin."""
    if arg == "-":
        raw = sys.stdin.read()
    elif arg.startswith("@"):
        raw = Path(arg[1:]).read_text(encoding="utf-8")
    else:
        raw = arg
    try:
        return json.loads(raw)
    except json.JSONDecodeError as exc:
        raise InputError(f"payload is not valid JSON: {exc}") from None


def _field2(data: dict, variant: str) -> rank2.TraceFreeHiggs2:
    """Accept the full record or the short form {"a": [...], "b": [...], "c": [...]}."""
    if "variant" in data and data["variant"] != variant:
        raise InputError(f"expected a {variant} field, got {data['variant']}")
    if isinstance(data.get("a"), dict):
        return rank2.TraceFreeHiggs2.from_json({**data, "variant": variant})
    twists = rank2._TWISTS[variant]
    parts = [Section.from_poly(t, [as_rational(x) for x in data[k]])
             for t, k in zip(twists, "abc")]
    return rank2.TraceFreeHiggs2(variant, *parts)


def _load_oracle(args) -> dict:
    table = {}
    if getattr(args, "oracle", None):
        table.update(ffcount.load_oracle(args.oracle))
    if getattr(args, "cache", None):
        for key, poly in CensusCache(args.cache).oracle().items():
            if table.setdefault(key, poly) != poly:
                raise CacheConflict(f"oracle file and cache disagree on {key}")
    return table


def _census(args, r: int, d: int) -> list[ChainComponent]:
    cache = CensusCache(args.cache) if getattr(args, "cache", None) else None
    if cache is not None:
        hit = cache.get_census(r, d)
        if hit is not None:
            return hit
    comps = chains.enumerate_components(r, d, max_rank=args.max_rank)
    if cache is not None:
        cache.put_census(r, d, comps)
    return comps


# -- commands ------------------------------------------------------------------

def cmd_admissible(args) -> int:
    t = SplittingType(args.splitting)
    gap = higgs.first_violation(t)
    ok = gap is None
    text = "true" if ok else f"false, gap ({gap[0]},{gap[1]})"
    _emit(args, {"splitting": list(t.m), "admissible": ok,
                 "violation": None if ok else list(gap)}, text)
    return EXIT_OK


def cmd_canonical_higgs(args) -> int:
    phi = higgs.canonical_stable_higgs(SplittingType(args.splitting))
    rows = ["[" + ", ".join(str(s) for s in row) + "]" for row in phi.entries]
    _emit(args, phi.to_json(), "\n".join(rows))
    return EXIT_OK


def cmd_charpoly(args) -> int:
    if args.payload is None:
        phi = higgs.canonical_stable_higgs(SplittingType(args.splitting))
    else:
        phi = HiggsField.from_json(_read_payload(args.payload))
    rho = higgs.char_coeffs(phi)
    _emit(args, {"rho": rho.to_json(), "charpoly": higgs.format_charpoly(phi)},
          higgs.format_charpoly(phi))
    return EXIT_OK


def cmd_spectral_smooth(args) -> int:
    rho2 = Section.of(4, [as_rational(x) for x in args.rho])
    rho = CharCoeffs((Section.zero(2), rho2))
    smooth = higgs.spectral_smooth_r2(rho)
    _emit(args, {"rho": [format_rational(c) for c in rho2.coeffs], "smooth": smooth},
          "true" if smooth else "false")
    return EXIT_OK


def cmd_rank2(args) -> int:
    data = _read_payload(args.payload)
    if args.op == "to-s":
        p = rank2.to_S(_field2(data, rank2.ODD))
        _emit(args, p.to_json(), json.dumps(p.to_json()))
    elif args.op == "from-s":
        phi = rank2.from_S(rank2.SPoint.from_json(data))
        _emit(args, phi.to_json(), json.dumps(phi.to_json()))
    elif args.op == "normalize-even":
        rho = rank2.normalize_even_E11(_field2(data, rank2.EVEN_E11))
        out = {"rho": [format_rational(c) for c in rho.coeffs]}
        _emit(args, out, json.dumps(out))
    else:
        res = rank2.classify_even_E0(_field2(data, rank2.EVEN_E0))
        _emit(args, res.to_json(), json.dumps(res.to_json()))
    return EXIT_OK


def cmd_chains_list(args) -> int:
    comps = _census(args, args.r, args.d)
    oracle = _load_oracle(args)
    records = []
    for c in comps:
        rec = c.to_json()
        p = chains.closed_form_poincare(c) or oracle.get(c.key)
        rec["poincare"] = p.to_json() if p is not None else "external"
        records.append(rec)
    lines = [f"{c.key}  type {tuple(c.shape.rtype)}  index {c.morse_index}  "
             f"P = {rec['poincare'] if rec['poincare'] == 'external' else PoincarePolynomial(rec['poincare'])}"
             for c, rec in zip(comps, records)]
    _emit(args, records, "\n".join(lines))
    return EXIT_OK


def cmd_betti(args) -> int:
    comps = _census(args, args.r, args.d)
    total = chains.poincare_series(args.r, args.d, _load_oracle(args), components=comps)
    _emit(args, {"r": args.r, "d": args.d, "poincare": total.to_json()}, str(total))
    return EXIT_OK


def cmd_dualize(args) -> int:
    c = chains.dualize(ChainComponent.from_key(args.key))
    _emit(args, c.to_json(), c.key)
    return EXIT_OK


def cmd_ffcount(args) -> int:
    keys = list(args.keys)
    if args.census:
        r, d = args.census
        keys += [c.key for c in _census(args, r, d) if chains.closed_form_poincare(c) is None]
    if not keys:
        raise InputError("give component keys or --census R D")
    done = ffcount.oracle_keys(args.out) if args.out else set()
    cache = CensusCache(args.cache) if args.cache else None
    out = []
    for key in keys:
        comp = ChainComponent.from_key(key)
        if key in done:
            continue
        rec = ffcount.component_poincare_ff(comp, args.primes, ansatz=args.ansatz,
                                            method=args.method)
        if args.out:
            ffcount.write_records(args.out, [rec])
            done.add(key)
        if cache is not None:
            cache.put_count(rec)
        out.append(rec)
    _emit(args, [r.to_json() for r in out],
          "\n".join(f"{r.component}: {r.poincare}" for r in out) or "nothing to do")
    return EXIT_OK


# -- parser ----------------------------------------------------------------------

def _int_list(values):
    return [int(v) for v in values]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    census = argparse.ArgumentParser(add_help=False)
    census.add_argument("--max-rank", type=int, default=chains.MAX_RANK)
    census.add_argument("--cache", help="JSON-lines census/oracle cache")
    oracle = argparse.ArgumentParser(add_help=False)
    oracle.add_argument("--oracle", help="JSON-lines table of count records")

    parser = argparse.ArgumentParser(prog="cohiggs", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("admissible", parents=[common], help="test a splitting type")
    p.add_argument("splitting", nargs="+", type=int)
    p.set_defaults(func=cmd_admissible)

    p = sub.add_parser("canonical-higgs", parents=[common], help="the canonical stable field")
    p.add_argument("splitting", nargs="+", type=int)
    p.set_defaults(func=cmd_canonical_higgs)

    p = sub.add_parser("charpoly", parents=[common], help="characteristic polynomial")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--splitting", nargs="+", type=int, help="use the canonical field")
    g.add_argument("--payload", help="Higgs field JSON, @file or -")
    p.set_defaults(func=cmd_charpoly)

    p = sub.add_parser("spectral-smooth", parents=[common],
                       help="rank-2 smoothness from the five coefficients of rho_2")
    p.add_argument("rho", nargs=5)
    p.set_defaults(func=cmd_spectral_smooth)

    p = sub.add_parser("rank2", help="rank-2 moduli")
    r2 = p.add_subparsers(dest="op", required=True)
    for op in ("to-s", "from-s", "normalize-even", "classify-e0"):
        q = r2.add_parser(op, parents=[common])
        q.add_argument("payload", help="JSON, @file or -")
        q.set_defaults(func=cmd_rank2, op=op)

    p = sub.add_parser("chains", help="fixed-point components")
    ch = p.add_subparsers(dest="op", required=True)
    q = ch.add_parser("list", parents=[common, census, oracle])
    q.add_argument("r", type=int)
    q.add_argument("d", type=int)
    q.set_defaults(func=cmd_chains_list)
    for parent in (ch, sub):
        q = parent.add_parser("betti", parents=[common, census, oracle],
                              help="Poincare polynomial of the moduli space")
        q.add_argument("r", type=int)
        q.add_argument("d", type=int)
        q.set_defaults(func=cmd_betti)
    q = ch.add_parser("dualize", parents=[common])
    q.add_argument("key", help="component key such as 0,0|-1")
    q.set_defaults(func=cmd_dualize)

    p = sub.add_parser("ffcount", parents=[common, census],
                       help="finite-field oracle for mixed components")
    p.add_argument("keys", nargs="*", help="component keys such as 0|0,0|-1")
    p.add_argument("--census", nargs=2, type=int, metavar=("R", "D"),
                   help="count every mixed component of the (R, D) census")
    p.add_argument("--primes", nargs="+", type=int, default=list(ffcount.DEFAULT_PRIMES))
    p.add_argument("--ansatz", choices=("auto", "general", "palindromic"), default="auto")
    p.add_argument("--method", choices=("grouped", "brute"), default="grouped")
    p.add_argument("--out", help="append count records to this JSON-lines file")
    p.set_defaults(func=cmd_ffcount)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MissingOracleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    except (AssertionError, ffcount.FitError) as exc:
        print(f"internal invariant failure: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (ValueError, TypeError, KeyError, LookupError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
