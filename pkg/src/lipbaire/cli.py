"""Command line front end.

Every subcommand writes one JSON document to stdout (or ``--output``).
Exit status: 0 on success, 1 when a checked property fails (the JSON carries
the witness), 2 on malformed input.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import back_and_forth as bnf
from . import counterexamples as cx
from . import forcing_lab as fl
from . import lipschitz_maps as lm
from . import slaloms as sl
from ._rng import subseed
from .prefix_core import BINARY, OMEGA, Alphabet, Point, WordTree
from .selftest import run_selftest

log = logging.getLogger("lipbaire")


class InputError(Exception):
    pass


class Failure(Exception):
    """A property check failed; ``payload`` is still printed."""

    def __init__(self, payload):
        super().__init__("property violated")
        self.payload = payload


def _load(args):
    if not args.input:
        raise InputError("this command needs --input FILE")
    try:
        if args.input == "-":
            return json.load(sys.stdin)
        with open(args.input) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(str(exc)) from exc


def _parse(fn, obj, what):
    try:
        return fn(obj)
    except (ValueError, KeyError, TypeError, AttributeError) as exc:
        raise InputError(f"bad {what}: {exc}") from exc


def _field(obj, key):
    if not isinstance(obj, dict) or key not in obj:
        raise InputError(f"input needs a {key!r} field")
    return obj[key]


def cmd_check_lipschitz(args):
    m = _parse(lm.PartialMap.from_json, _load(args), "partial map")
    out = lm.check_lipschitz(m).to_json()
    if not out["ok"]:
        raise Failure(out)
    return out


def cmd_check_isometry(args):
    m = _parse(lm.PartialMap.from_json, _load(args), "partial map")
    out = lm.check_isometry(m).to_json()
    if not out["ok"]:
        raise Failure(out)
    return out


def cmd_induce_hom(args):
    m = _parse(lm.PartialMap.from_json, _load(args), "partial map")
    try:
        h = lm.induced_hom(m, args.depth, args.alphabet, args.alphabet)
    except lm.NotLipschitz as exc:
        raise Failure({"ok": False, "error": "not lipschitz", "verdict": exc.args[0]}) from exc
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    return h.to_json()


def cmd_level_analysis(args):
    h = _parse(lm.hom_from_json, _load(args), "homomorphism")
    try:
        reports = lm.level_analysis(h, args.depth)
    except (ValueError, lm.OutOfTable) as exc:
        raise InputError(str(exc)) from exc
    out = {
        "levels": [r.to_json() for r in reports],
        "isometry_to_depth": all(r.injective for r in reports),
        "injective_iff_surjective": all(r.injective == r.surjective for r in reports),
    }
    if not out["injective_iff_surjective"] and h.alphabet_in == h.alphabet_out:
        raise Failure(out)
    return out


def cmd_backforth(args):
    if args.input:
        obj = _load(args)
        A = _parse(lambda o: bnf.FiniteOracle([Point.from_json(p) for p in o["A"]], args.alphabet), obj, "sample A")
        B = _parse(lambda o: bnf.FiniteOracle([Point.from_json(p) for p in o["B"]], args.alphabet), obj, "sample B")
        steps = args.depth if args.depth is not None else min(len(A.points), len(B.points)) - 1
    else:
        if args.alphabet.size == 1:
            raise InputError("back-and-forth needs at least two letters")
        A = bnf.EventuallyConstantOracle(args.alphabet, 0, seed=subseed(args.seed, "A"))
        B = bnf.EventuallyConstantOracle(args.alphabet, 1, seed=subseed(args.seed, "B"))
        steps = args.trials
    log.info("running %d back-and-forth rounds", steps)
    snapshots = []
    try:
        state = bnf.bnf_run(A, B, steps, on_step=snapshots.append)
    except (bnf.Exhausted, bnf.NoFreshLetter, bnf.OracleError) as exc:
        state = snapshots[-1] if snapshots else None
        payload = {
            "seed": args.seed,
            "error": type(exc).__name__,
            "message": str(exc),
            "transcript": state.transcript_json() if state else [],
        }
        raise Failure(payload) from exc
    verdict = lm.check_isometry(state.current)
    out = {
        "seed": args.seed,
        "steps": steps,
        "isometry": verdict.to_json(),
        "map": state.current.to_json(),
        "transcript": state.transcript_json(),
    }
    if not verdict:
        raise Failure(out)
    return out


def _default_cells(alphabet, depth):
    return list((alphabet if alphabet.is_finite else BINARY).words_upto(depth))


def cmd_gen_parity_family(args):
    depth = 3 if args.depth is None else args.depth
    try:
        fam = cx.gen_family(args.kind, _default_cells(args.alphabet, depth), args.trials,
                            subseed(args.seed, args.kind), args.alphabet)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    return {"seed": args.seed, **fam.to_json()}


def cmd_certify_no_isometry(args):
    if args.input:
        obj = _load(args)
        src = _parse(cx.ParityFamily.from_json, _field(obj, "src"), "src family")
        dst = _parse(cx.ParityFamily.from_json, _field(obj, "dst"), "dst family")
    else:
        depth = 3 if args.depth is None else args.depth
        cells = _default_cells(args.alphabet, depth)
        src = cx.gen_family(cx.ODD, cells, args.trials, subseed(args.seed, cx.ODD), args.alphabet)
        dst = cx.gen_family(cx.EVEN, cells, args.trials, subseed(args.seed, cx.EVEN), args.alphabet)
    try:
        cert = cx.certify_no_isometry(src, dst)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    out = {"seed": args.seed, **cert.to_json()}
    if cert.isometric_pairs:
        raise Failure(out)
    return out


def cmd_slalom_from_hom(args):
    obj = _load(args)
    h = _parse(lm.hom_from_json, _field(obj, "hom"), "homomorphism")
    sample = _parse(sl.BoundedDenseSample.from_json, _field(obj, "sample"), "sample")
    depth = args.depth if args.depth is not None else 8
    try:
        phi = sl.slalom_from_hom(h, sample, depth)
    except (ValueError, lm.OutOfTable) as exc:
        raise InputError(f"cannot evaluate homomorphism: {exc}") from exc
    bounds = [sl.sample_width_bound(len(sample.s), n, sample.bound) for n in range(depth)]
    out = {
        "slalom": phi.to_json(),
        "widths": phi.widths(),
        "width_bound": bounds,
        "within_bound": all(w <= b for w, b in zip(phi.widths(), bounds)),
    }
    if not out["within_bound"]:
        raise Failure(out)
    return out


def cmd_merge_slaloms(args):
    obj = _load(args)
    if not isinstance(obj, list):
        raise InputError("expected an array of slaloms")
    phis = [_parse(sl.Slalom.from_json, v, "slalom") for v in obj]
    try:
        merged = sl.merge_slaloms(phis)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    out = {"slalom": merged.to_json(), "widths": merged.widths(), "npow2_ok": sl.slalom_width_ok(merged, sl.NPOW2)}
    if not out["npow2_ok"]:
        raise Failure(out)
    return out


def cmd_tree_width(args):
    obj = _load(args)
    corset = None
    if isinstance(obj, dict):
        tree = _parse(WordTree.from_json, _field(obj, "tree"), "tree")
        if "corset" in obj:
            corset = _parse(sl.WidthProfile.from_json, obj["corset"], "corset")
    else:
        tree = _parse(WordTree.from_json, obj, "tree")
    out = {"counts": sl.tree_width(tree)}
    if corset is not None:
        out["within"] = sl.width_check(tree, corset)
        if not all(out["within"]):
            raise Failure(out)
    return out


def cmd_hom_image(args):
    obj = _load(args)
    h = _parse(lm.hom_from_json, _field(obj, "hom"), "homomorphism")
    tree = _parse(WordTree.from_json, _field(obj, "tree"), "tree")
    try:
        image = sl.hom_image_tree(h, tree)
    except (ValueError, lm.OutOfTable) as exc:
        raise InputError(f"cannot evaluate homomorphism: {exc}") from exc
    src, img = sl.tree_width(tree), sl.tree_width(image)
    out = {"image": image.to_json(), "source_counts": src, "image_counts": img,
           "counts_monotone": all(i <= s for s, i in zip(src, img))}
    if not out["counts_monotone"]:
        raise Failure(out)
    return out


def cmd_forcing_check(args):
    obj = _load(args)
    if isinstance(obj, dict):
        m = _parse(lm.PartialMap.from_json, _field(obj, "condition"), "condition")
    else:
        m = _parse(lm.PartialMap.from_json, obj, "condition")
    out = {"condition": fl.is_condition(m).to_json()}
    if isinstance(obj, dict) and "separating" in obj:
        x = _parse(fl.separating_from_json, obj["separating"], "separating set")
        out["separating"] = fl.is_separating(x).to_json()
        out["in_Px"] = bool(out["separating"]["ok"]) and fl.in_Px(m, x)
    if not out["condition"]["ok"] or not out.get("separating", {"ok": True})["ok"]:
        raise Failure(out)
    return out


def cmd_forcing_extend(args):
    obj = _load(args)
    p = _parse(lm.PartialMap.from_json, obj.get("condition", []) if isinstance(obj, dict) else None, "condition")
    a = _parse(Point.from_json, _field(obj, "a"), "point a")
    b = _parse(Point.from_json, _field(obj, "b"), "point b")
    if not fl.is_condition(p):
        raise Failure({"condition": fl.is_condition(p).to_json()})
    A = bnf.EventuallyConstantOracle(OMEGA, 0)
    B = bnf.EventuallyConstantOracle(OMEGA, 0)
    q = fl.extend_condition(p, a, b, A, B)
    return {"condition": q.to_json(), "valid": fl.is_condition(q).ok}


def cmd_forcing_antichain(args):
    obj = _load(args)
    if not isinstance(obj, list):
        raise InputError("expected an array of conditions")
    conds = [_parse(lm.PartialMap.from_json, c, "condition") for c in obj]
    report = fl.find_antichain(conds, args.min_size)
    out = report.to_json()
    if not report.meets_min:
        raise Failure(out)
    return out


def cmd_selftest(args):
    report = run_selftest(args.seed, args.trials, 3 if args.depth is None else args.depth, args.alphabet)
    if not report["passed"]:
        raise Failure(report)
    return report


COMMANDS = {
    "check-lipschitz": (cmd_check_lipschitz, "decide whether a partial map (JSON) is Lipschitz"),
    "check-isometry": (cmd_check_isometry, "decide whether a partial map (JSON) is an isometry"),
    "induce-hom": (cmd_induce_hom, "tabulate the homomorphism induced by a Lipschitz map"),
    "level-analysis": (cmd_level_analysis, "per-level injectivity/surjectivity of a homomorphism"),
    "backforth": (cmd_backforth, "build a partial isometry between two dense sets"),
    "gen-parity-family": (cmd_gen_parity_family, "generate an odd or even support family"),
    "certify-no-isometry": (cmd_certify_no_isometry, "count isometric two-point maps between opposite families"),
    "slalom-from-hom": (cmd_slalom_from_hom, "slalom catching the image of a bounded sample"),
    "merge-slaloms": (cmd_merge_slaloms, "diagonal union of a list of slaloms"),
    "tree-width": (cmd_tree_width, "per-level node counts of a word tree"),
    "hom-image": (cmd_hom_image, "image of a word tree under a homomorphism"),
    "forcing-check": (cmd_forcing_check, "validate a condition (and optional separating set)"),
    "forcing-extend": (cmd_forcing_extend, "extend a condition to cover a and b"),
    "forcing-antichain": (cmd_forcing_antichain, "largest pairwise incompatible subfamily"),
    "selftest": (cmd_selftest, "run every seeded invariant suite"),
}


def _seed(text):
    value = int(text, 0)
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def _alphabet(text):
    try:
        return Alphabet.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_seed, default=0)
    common.add_argument("--depth", type=int, default=None)
    common.add_argument("--trials", type=int, default=None)
    common.add_argument("--alphabet", type=_alphabet, default=None, help="k or omega")
    common.add_argument("--input", help="JSON input file ('-' for stdin)")
    common.add_argument("--output", help="write JSON here instead of stdout")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="lipbaire", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text)
        if name == "gen-parity-family":
            p.add_argument("--kind", choices=[cx.ODD, cx.EVEN], default=cx.ODD)
        if name == "forcing-antichain":
            p.add_argument("--min-size", type=int, default=0)
    return parser


_DEFAULT_TRIALS = {"backforth": 100, "gen-parity-family": 10, "certify-no-isometry": 10, "selftest": 100}
_DEFAULT_ALPHABET = {"induce-hom": OMEGA, "backforth": BINARY}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(message)s")
    if args.trials is None:
        args.trials = _DEFAULT_TRIALS.get(args.command, 100)
    if args.trials < 1:
        parser.print_usage(sys.stderr)
        return 2
    if args.alphabet is None:
        args.alphabet = _DEFAULT_ALPHABET.get(args.command, BINARY)
    handler = COMMANDS[args.command][0]
    code = 0
    try:
        payload = handler(args)
    except InputError as exc:
        log.error("%s", exc)
        payload, code = {"error": "malformed input", "message": str(exc)}, 2
    except Failure as exc:
        payload, code = exc.payload, 1
    text = json.dumps(payload, sort_keys=True) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
