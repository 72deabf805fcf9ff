"""Batch front end: check models, run reflections, compare, verify universality.

Exit codes are a stable contract: 0 success, 1 negative verdict, 2 input
error, 3 budget exhausted or exceeded, 4 precondition violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import compare as compare_mod
from . import elim, kelly, universal
from .errors import BudgetExceeded, EngineError, InputError, PreconditionError
from .setops import (
    DEFAULT_TUPLE_BUDGET,
    NatTransSpec,
    SetPresentation,
    presentation_from_json_dict,
)
from .sketchlib import (
    BUILDERS,
    LimitSketch,
    build_sketch,
    builder_names,
    is_model,
    sketch_dumps,
    sketch_from_json_dict,
)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3
EXIT_PRECONDITION = 4


def _read_json(path: str) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: JSON parse error: {exc}") from None


def _load_sketch(source: str) -> LimitSketch:
    """A sketch argument is either a builder name or a JSON file path."""
    if source in BUILDERS:
        return build_sketch(source)
    return sketch_from_json_dict(_read_json(source), name=source)


def _resolve_category(name: str):
    if name in BUILDERS:
        return build_sketch(name).base
    return None


def _load_presentation(path: str, sketch: LimitSketch) -> SetPresentation:
    return presentation_from_json_dict(
        _read_json(path), base=sketch.base, resolve_category=_resolve_category
    )


def _load_nat_trans(path: str, source: SetPresentation, target: SetPresentation) -> NatTransSpec:
    data = _read_json(path)
    if not isinstance(data, dict) or set(data) != {"components"}:
        raise InputError(f"{path}: transformation document needs exactly 'components'")
    nat = NatTransSpec(source, target, {o: dict(m) for o, m in data["components"].items()})
    for obj in source.base.objects:
        nat.components.setdefault(obj, {})
    report = nat.validate()
    if not report.ok:
        raise InputError(f"{path}: invalid transformation: {report.violations[0]}")
    return nat


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_check(args: argparse.Namespace) -> int:
    sketch = _load_sketch(args.sketch)
    pres = _load_presentation(args.presentation, sketch)
    report = is_model(pres, sketch, max_tuples=args.max_tuples)
    if args.format == "json":
        _emit(json.dumps(report.to_json_dict(), sort_keys=True, indent=2) + "\n", args.out)
    else:
        lines = []
        for check in report.checks:
            status = "ok" if check.ok else "FAIL"
            lines.append(
                f"cone {check.cone}: {status} "
                f"(injective={str(check.injective).lower()} "
                f"surjective={str(check.surjective).lower()})"
            )
            if check.injectivity_witness:
                lines.append(f"  merged pair: {check.injectivity_witness}")
            if check.unhit_tuple:
                lines.append(f"  unhit tuple: {check.unhit_tuple}")
        lines.append(f"model: {str(report.is_model).lower()}")
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if report.is_model else EXIT_NEGATIVE


def cmd_reflect(args: argparse.Namespace) -> int:
    sketch = _load_sketch(args.sketch)
    pres = _load_presentation(args.presentation, sketch)
    if args.engine == "elim":
        trace = elim.reflect_elim(
            pres,
            sketch,
            budget=args.budget,
            mode=args.mode,
            max_tuples=args.max_tuples,
            max_elements=args.max_elements,
        )
        payload = trace.dumps()
        sizes = [
            (st.index, {o: len(st.total.carrier[o]) for o in sketch.base.objects})
            for st in trace.stages
        ]
    else:
        trace = kelly.reflect_kelly(
            pres, sketch, budget=args.budget, max_tuples=args.max_tuples
        )
        payload = trace.dumps()
        sizes = [(0, {o: len(pres.carrier[o]) for o in sketch.base.objects})]
        sizes += [
            (st.index, {o: len(st.obj.carrier[o]) for o in sketch.base.objects})
            for st in trace.stages
        ]
    _emit(payload, args.out)
    for index, size in sizes:
        line = " ".join(f"{o}={size[o]}" for o in sketch.base.objects)
        print(f"stage {index}: {line}")
    if trace.converged:
        core = trace.core
        assert core is not None
        line = " ".join(f"{o}={len(core.carrier[o])}" for o in sketch.base.objects)
        print(f"converged at stage {trace.converged_at}; core sizes: {line}")
        return EXIT_OK
    print("budget exhausted before convergence")
    return EXIT_BUDGET


def cmd_compare(args: argparse.Namespace) -> int:
    sketch = _load_sketch(args.sketch)
    pres = _load_presentation(args.presentation, sketch)
    faithful = elim.reflect_elim(
        pres,
        sketch,
        budget=args.budget,
        mode=elim.FAITHFUL,
        max_tuples=args.max_tuples,
        max_elements=args.max_elements,
    )
    depth = len(faithful.stages) - 1
    kelly_stages = kelly.reflect_kelly(
        pres,
        sketch,
        budget=max(depth, args.budget),
        stop_on_convergence=False,
        max_tuples=args.max_tuples,
    )
    alpha = compare_mod.build_alpha(faithful, kelly_stages, sketch, stage_budget=depth)
    elim_conv = (
        faithful
        if faithful.converged
        else elim.reflect_elim(
            pres,
            sketch,
            budget=args.budget,
            mode=elim.PRUNED,
            max_tuples=args.max_tuples,
            max_elements=args.max_elements,
        )
    )
    kelly_conv = (
        kelly_stages
        if kelly_stages.converged
        else kelly.reflect_kelly(pres, sketch, budget=args.budget, max_tuples=args.max_tuples)
    )
    if not elim_conv.converged or not kelly_conv.converged:
        print("budget exhausted before both constructions converged")
        return EXIT_BUDGET
    iso = compare_mod.reflector_iso_check(elim_conv, kelly_conv, sketch)
    _emit(compare_mod.comparison_report(alpha, iso), args.out)
    print(f"alpha squares: {'pass' if alpha.ok else 'FAIL'}")
    print(f"reflector isomorphism: {'verified' if iso.ok else 'FAIL'}")
    return EXIT_OK if alpha.ok and iso.ok else EXIT_NEGATIVE


def cmd_universal(args: argparse.Namespace) -> int:
    sketch = _load_sketch(args.sketch)
    pres = _load_presentation(args.presentation, sketch)
    model = _load_presentation(args.model, sketch)
    f = _load_nat_trans(args.map, pres, model)
    trace = elim.reflect_elim(
        pres,
        sketch,
        budget=args.budget,
        mode=args.mode,
        max_tuples=args.max_tuples,
        max_elements=args.max_elements,
    )
    if not trace.converged:
        print("budget exhausted before convergence")
        return EXIT_BUDGET
    result = universal.solve_factorisation(trace, f, model, sketch)
    verdict = universal.check_uniqueness(trace, f, model, sketch, cap=args.enum_cap)
    _emit(universal.universal_report(result, verdict), args.out)
    print(f"factorisation exists and commutes: {str(result.commutes).lower()}")
    print(f"uniqueness: {verdict.status} (search space {verdict.search_space})")
    if verdict.status == "unique":
        return EXIT_OK
    if verdict.status == "counterexample":
        return EXIT_NEGATIVE
    return EXIT_BUDGET


def cmd_builders(args: argparse.Namespace) -> int:
    if args.action == "list":
        for name in builder_names():
            print(name)
        return EXIT_OK
    if not args.name:
        raise InputError("builders emit needs a builder name")
    sketch = build_sketch(args.name, budget=args.budget)
    _emit(sketch_dumps(sketch), args.out)
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser, needs_presentation: bool = True) -> None:
    parser.add_argument("--sketch", required=True, help="sketch JSON file or builder name")
    if needs_presentation:
        parser.add_argument("--presentation", required=True, help="presentation JSON file")
    parser.add_argument("--budget", type=int, default=8, help="stage budget")
    parser.add_argument(
        "--max-tuples", type=int, default=DEFAULT_TUPLE_BUDGET, dest="max_tuples"
    )
    parser.add_argument(
        "--max-elements", type=int, default=elim.DEFAULT_ELEMENT_CAP, dest="max_elements"
    )
    parser.add_argument("--format", choices=["json", "text"], default="json")
    parser.add_argument("--out", default=None, help="write the report to this path")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="limsketch",
        description="Reflect set-valued presentations into models of a limit sketch.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="is the presentation a model?")
    _add_common(p_check)
    p_check.set_defaults(func=cmd_check)

    p_reflect = sub.add_parser("reflect", help="run a reflection to convergence")
    _add_common(p_reflect)
    p_reflect.add_argument("--engine", choices=["elim", "kelly"], default="elim")
    p_reflect.add_argument(
        "--mode", choices=[elim.FAITHFUL, elim.PRUNED], default=elim.PRUNED
    )
    p_reflect.set_defaults(func=cmd_reflect)

    p_compare = sub.add_parser("compare", help="stage comparison and reflector isomorphism")
    _add_common(p_compare)
    p_compare.set_defaults(func=cmd_compare, budget=3)

    p_universal = sub.add_parser("universal", help="factorisation and uniqueness check")
    _add_common(p_universal)
    p_universal.add_argument("--model", required=True, help="model presentation JSON file")
    p_universal.add_argument("--map", required=True, help="transformation JSON file")
    p_universal.add_argument(
        "--mode", choices=[elim.FAITHFUL, elim.PRUNED], default=elim.PRUNED
    )
    p_universal.add_argument("--enum-cap", type=int, default=10**6, dest="enum_cap")
    p_universal.set_defaults(func=cmd_universal)

    p_builders = sub.add_parser("builders", help="list or emit built-in sketches")
    p_builders.add_argument("action", choices=["list", "emit"])
    p_builders.add_argument("name", nargs="?", default=None)
    p_builders.add_argument("--budget", type=int, default=6)
    p_builders.add_argument("--out", default=None)
    p_builders.set_defaults(func=cmd_builders)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetExceeded as exc:
        print(f"budget error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except PreconditionError as exc:
        print(f"precondition error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except EngineError as exc:
        print(f"engine error: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE


if __name__ == "__main__":
    sys.exit(main())
