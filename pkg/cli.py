"""Command-line front end for the SDS engine."""

import argparse
import logging
import sys
import time
from pathlib import Path
from typing import List, Optional, Tuple

import pandas as pd

from config import settings
from constructions import CatalogManager, catalog, catalog_entry, spence63_result
from errors import (
    CapacityError,
    FormatError,
    InvalidParametersError,
    PipelineError,
    SdsEngineError,
    SearchBudgetExceeded,
    VerificationError,
)
from matrices import char_matrix, hadamard_from_sds, is_hadamard, is_skew_type, is_type1, read_matrix, write_matrix
from models import DedupMode, GroupSpec, RunReport, SdsParams, SearchSpec, SymmetryType
from reporting import ReportRenderer, params_frame, render_frame
from sds import SdsFamily, load_sds, satisfies_type, type_of, verify_sds, xia_liu_params
from search import search_with_stats

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3

CommandResult = Tuple[RunReport, Optional[str]]


def _flag(value: bool) -> str:
    return "true" if value else "false"


def _load_family(args) -> Tuple[str, SdsFamily]:
    if getattr(args, "entry", None):
        entry = catalog_entry(args.entry)
        return entry.id, entry.family
    if not args.path:
        raise InvalidParametersError("give an SDS file or --entry")
    return args.path, load_sds(args.path)


def cmd_verify(args) -> CommandResult:
    report = RunReport(command="verify")
    locator, family = _load_family(args)
    result = verify_sds(family, True if args.difference_family else None)
    found = type_of(family)
    if not result.ok:
        report.add(locator, False, result.detail)
        return report, None

    detail = f"{result.params} {found} eq1={_flag(result.eq1_holds)} eq3={_flag(result.eq3_holds)}"
    declared = family.declared_type
    if declared is not None and not satisfies_type(family, declared):
        report.add(locator, False, f"{detail}; declared type {declared} does not hold")
    else:
        report.add(locator, True, detail)
    return report, None


def cmd_construct(args) -> CommandResult:
    report = RunReport(command="construct")
    locator, family = _load_family(args)
    if len(family.blocks) != 4:
        raise InvalidParametersError(f"the Goethals-Seidel array needs 4 blocks, got {len(family.blocks)}")
    result = verify_sds(family)
    if not result.ok:
        raise VerificationError(f"{locator}: {result.detail}", result)

    type1 = all(is_type1(char_matrix(b), seed=args.seed) for b in family.blocks)
    h = hadamard_from_sds(family)
    hadamard = is_hadamard(h)
    skew = is_skew_type(h)
    out = write_matrix(h, args.out, "hadamard" if hadamard else "matrix")
    report.add(
        locator, hadamard and type1,
        f"order {h.order} hadamard={_flag(hadamard)} skew_type={_flag(skew)} type1={_flag(type1)} -> {out}",
    )
    return report, None


def cmd_check_matrix(args) -> CommandResult:
    report = RunReport(command="check-matrix")
    header, m = read_matrix(args.path)
    hadamard = is_hadamard(m)
    skew = is_skew_type(m)
    passed = hadamard or header != "hadamard"
    report.add(args.path, passed, f"order {m.order} header={header} hadamard={_flag(hadamard)} skew_type={_flag(skew)}")
    return report, None


def cmd_catalog(args) -> CommandResult:
    report = RunReport(command=f"catalog {args.action}")

    if args.action == "list":
        entries = catalog()
        if args.tsv:
            frame = pd.DataFrame.from_records(
                [{"id": e.id, "params": str(e.expected_params), "type": str(e.expected_type),
                  "provenance": e.provenance} for e in entries],
                columns=["id", "params", "type", "provenance"],
            )
            return report, frame.to_csv(sep="\t", index=False)
        lines = [f"{e.id} {e.expected_params} {e.expected_type}  {e.provenance}" for e in entries]
        return report, "\n".join(lines) + "\n"

    if args.action == "export":
        if not args.target:
            raise InvalidParametersError("catalog export needs an entry id")
        entry = catalog_entry(args.target)
        text = entry.export()
        if args.out:
            path = Path(args.out)
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text)
            report.add(entry.id, True, f"exported to {path}")
            return report, None
        return report, text

    if args.action == "check-all":
        manager = CatalogManager()
        for entry in manager.load_all():
            ok, result, found = entry.check()
            detail = f"{result.params} {found}"
            if ok and len(entry.blocks) == 4:
                h = hadamard_from_sds(entry.family)
                hadamard = is_hadamard(h)
                skew = is_skew_type(h)
                ok = hadamard and skew == (found.letters[0] == "k")
                detail += f" hadamard={_flag(hadamard)} skew_type={_flag(skew)}"
            elif not ok:
                detail += f" expected {entry.expected_params} {entry.expected_type}: {result.detail}"
            report.add(entry.id, ok, detail)
        for name, message in manager.failures:
            report.add(f"source:{name}", False, message)

        pipeline = spence63_result()
        report.add(
            "spence63-pipeline", True,
            f"period {pipeline.sequence.period} X{_rds(pipeline.x_params)} Y{_rds(pipeline.y_params)} "
            f"offset {pipeline.offset} {pipeline.params} {type_of(pipeline.family)}",
        )
        return report, None

    if args.action == "audit-spence63":
        directory = Path(args.target or settings.output_dir / "spence63")
        pipeline = spence63_result()
        paths = pipeline.dump(directory)
        report.add("spence63-pipeline", True, f"{len(paths)} stage files in {directory}")
        return report, None

    raise InvalidParametersError(f"unknown catalog action '{args.action}'")


def _rds(params) -> str:
    return str(params.as_tuple()).replace(" ", "")


def cmd_search(args) -> CommandResult:
    report = RunReport(command="search")
    group = GroupSpec.parse(args.group)
    k = tuple(int(x) for x in args.k.split(","))
    spec = SearchSpec(
        group=group,
        params=SdsParams.from_sizes(group.order, k),
        symmetry_type=SymmetryType.parse(args.type),
        dedup=DedupMode(args.dedup),
        allow_translation=not args.no_translation,
        limit=args.limit,
        budget=args.budget or settings.search_budget,
        workers=args.workers or settings.search_workers,
    )
    outcome = search_with_stats(spec)
    label = f"{group} {spec.params} {spec.symmetry_type}"
    if not outcome.compatible:
        return report, f"{label}: incompatible (x)\n"

    count = len(outcome.families)
    noun = "class" if spec.dedup == DedupMode.CANONICAL else "family"
    plural = {"class": "classes", "family": "families"}[noun]
    body = f"{label}: {count} {noun if count == 1 else plural} ({outcome.raw_count} raw, {outcome.nodes} nodes)\n"

    if args.out:
        paths = outcome.store.export(args.out, prefix=f"n{group.order}_{spec.symmetry_type.letters.replace('*', 'x')}")
        body += f"wrote {len(paths)} files to {args.out}\n"
    return report, body


def cmd_params(args) -> CommandResult:
    report = RunReport(command="params")
    if args.n % 2 == 0 or args.n < 3:
        raise InvalidParametersError(f"n must be odd and >= 3, got {args.n}")
    body = render_frame(params_frame(args.n), tsv=args.tsv)

    q = int(round(args.n ** 0.5))
    if q * q == args.n and q % 4 == 1:
        try:
            row = xia_liu_params(q)
            body += f"multicirculant series q={q}: {row}\n"
        except InvalidParametersError:
            pass
    return report, body


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sds", description="Supplementary difference sets and Hadamard matrices")
    parser.add_argument("--tsv", action="store_true", help="tab-separated output")
    parser.add_argument("--seed", type=int, default=None, help="seed for sampled matrix checks")
    parser.add_argument("--log-level", default=None, help="logging level (default from settings)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="verify an SDS file")
    p.add_argument("path", nargs="?")
    p.add_argument("--entry", help="verify a catalog entry instead of a file")
    p.add_argument("--difference-family", action="store_true", help="do not require lambda = sum(k) - n")
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("construct", help="assemble the Goethals-Seidel matrix of an SDS")
    p.add_argument("path", nargs="?")
    p.add_argument("--entry", help="use a catalog entry instead of a file")
    p.add_argument("-o", "--out", required=True, help="output matrix file")
    p.set_defaults(handler=cmd_construct)

    p = sub.add_parser("check-matrix", help="re-verify an exported +/- matrix")
    p.add_argument("path")
    p.set_defaults(handler=cmd_check_matrix)

    p = sub.add_parser("catalog", help="list, export or check the catalog")
    p.add_argument("action", choices=["list", "export", "check-all", "audit-spence63"])
    p.add_argument("target", nargs="?", help="entry id (export) or output directory (audit-spence63)")
    p.add_argument("-o", "--out", help="output file for export")
    p.set_defaults(handler=cmd_catalog)

    p = sub.add_parser("search", help="exhaustive search for SDSs")
    p.add_argument("--group", required=True, help="cyclic:<n> or ea:<p>^<k>:<c0,...,ck>")
    p.add_argument("--k", required=True, help="block sizes k1,k2,k3,k4")
    p.add_argument("--type", required=True, help="symmetry type, e.g. kkss")
    p.add_argument("--no-translation", action="store_true", help="exclude per-block translations from equivalence")
    p.add_argument("--dedup", choices=[m.value for m in DedupMode], default=DedupMode.CANONICAL.value)
    p.add_argument("--budget", type=int, default=None, help="maximum number of search nodes")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--limit", type=int, default=None)
    p.add_argument("--out", default=None, help="directory for result SDS files")
    p.set_defaults(handler=cmd_search)

    p = sub.add_parser("params", help="feasible parameters for odd n")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(handler=cmd_params)

    return parser


def _configure_logging(level: Optional[str]):
    logging.basicConfig(
        level=(level or settings.log_level).upper(),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK

    _configure_logging(args.log_level)

    start = time.time()
    try:
        report, body = args.handler(args)
    except SearchBudgetExceeded as e:
        logger.error(f"Search budget exhausted: {e}")
        print(f"PARTIAL {len(e.partial)} families, {e.completed_share:.1%} of tasks completed, {e.nodes} nodes")
        return EXIT_BUDGET
    except VerificationError as e:
        logger.error(f"Verification failed: {e}")
        print(f"FAIL  {e}")
        return EXIT_FAILURE
    except PipelineError as e:
        logger.error(f"Pipeline failed: {e}")
        print(f"FAIL  {e}")
        return EXIT_FAILURE
    except (FormatError, InvalidParametersError, CapacityError, KeyError) as e:
        logger.error(f"{args.command}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (SdsEngineError, ValueError) as e:
        logger.error(f"{args.command}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE

    report.elapsed = time.time() - start
    report.exit_code = EXIT_OK if report.all_passed else EXIT_FAILURE
    if body:
        sys.stdout.write(body)
    if report.items or body is None:
        sys.stdout.write(ReportRenderer().render(report, tsv=args.tsv))
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
