"""Command-line front end emitting reproducible table reports.

Every subcommand renders one table as text, CSV, or JSON.  Randomized
subcommands take a seed and default to a fixed one, so identical
invocations produce byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import random
import sys

from . import dictionary, echo, manchester, reconciler, scrambler, ternary
from .errors import WorkbenchError

DEFAULT_SEED = 20259
EVEN_LETTERS = tuple(range(2, 21, 2))
PAGE_LETTERS = (8, 12, 16)
SYMMETRIC_ROWS = (9, 27, 28, 29, 35, 36, 37, 38, 44, 45)
DM_ROWS = (14, 15, 19, 20, 23, 26)
BUDGET_DEMANDS = (72, 36, 29, 28, 27, 26, 25, 24, 23, 22, 21, 20)


class UsageError(WorkbenchError, ValueError):
    """Malformed request, reported with exit code 2."""


def _census_report(args) -> tuple[list[str], list[list]]:
    header = ["count"] + [f"m{m}" for m in EVEN_LETTERS]
    per = {m: dictionary.census(m) for m in EVEN_LETTERS}

    def mask_total(m: int, mask: str) -> int:
        return sum(per[m][mask].values())

    rows = [
        ["valid"] + [sum(mask_total(m, k) for k in per[m]) for m in EVEN_LETTERS],
        ["mask_jj"] + [mask_total(m, "JJ") for m in EVEN_LETTERS],
        ["mask_jk"] + [mask_total(m, "JK") for m in EVEN_LETTERS],
        ["mask_kj"] + [mask_total(m, "KJ") for m in EVEN_LETTERS],
    ]
    return header, rows


def _pages_report(args) -> tuple[list[str], list[list]]:
    header = ["letters", "data_bits", "selection", "page_a", "page_b", "multiplex_ok"]
    letters = (args.letters,) if getattr(args, "letters", None) else PAGE_LETTERS
    rows = []
    for m in letters:
        bits = m // 2
        chooser = dictionary.filter_for_data_bits(bits)
        pages = dictionary.build_pages(m, chooser)
        kind = "balanced" if chooser.balanced_only else f"bias<={chooser.max_abs_bias}"
        rows.append(
            [m, bits, kind, len(pages[0]), len(pages[1]), dictionary.multiplex_feasible(bits)]
        )
    return header, rows


def _symmetric_report(args) -> tuple[list[str], list[list]]:
    header = ["r", "m_even", "m_odd", "x_even", "x_odd", "anchor", "unb_pos", "unb_neg", "obs_s"]
    rows = []
    for r in SYMMETRIC_ROWS:
        sol = scrambler.symmetric_solutions(r, 259)[0]
        pos, neg = scrambler.unbalance(sol)
        rows.append(
            [
                sol.r,
                sol.m_even,
                sol.m_odd,
                sol.x_even,
                sol.x_odd,
                "x_even" if sol.symmetric_e else "x_odd",
                scrambler.format_unbalance(pos),
                scrambler.format_unbalance(neg),
                f"{scrambler.observation_time(r):.3g}",
            ]
        )
    return header, rows


def _dm_report(args) -> tuple[list[str], list[list]]:
    header = ["r", "m_even", "m_odd", "x_even", "x_odd", "delta_x", "unb_pos", "unb_neg"]
    rows = []
    for r in DM_ROWS:
        sol = scrambler.solve_dm1(r, 259)[0]
        pos, neg = scrambler.unbalance(sol)
        rows.append(
            [
                sol.r,
                sol.m_even,
                sol.m_odd,
                sol.x_even,
                sol.x_odd,
                abs(sol.x_even - sol.x_odd),
                scrambler.format_unbalance(pos),
                scrambler.format_unbalance(neg),
            ]
        )
    return header, rows


def _budget_report(args) -> tuple[list[str], list[list]]:
    header = ["t", "r", "repetition_s", "observation_s", "root_feasible"]
    rows = []
    for t in BUDGET_DEMANDS:
        report = scrambler.budget(t)
        rows.append(
            [
                report.t,
                report.r,
                f"{report.repetition_period:.4g}",
                f"{report.observation_time:.3g}",
                report.root_feasible,
            ]
        )
    return header, rows


def _jump_report(args) -> tuple[list[str], list[list]]:
    letters = getattr(args, "letters", None) or 8
    pages = dictionary.build_pages(letters)
    header = ["position", "jj", "jk", "kj", "all"]
    rows = []
    for i in range(letters):
        cells = [i]
        for mask in ("JJ", "JK", "KJ", None):
            p = dictionary.position_jump_probability(pages, i, mask=mask)
            cells.append(f"{float(p):.4f}")
        rows.append(cells)
    return header, rows


def _reference_dictionary_report(args) -> tuple[list[str], list[list]]:
    rows = ternary.reference_rows()
    header = list(rows[0].keys())
    return header, [[row[key] for key in header] for row in rows]


def _broadened_dictionary_report(args) -> tuple[list[str], list[list]]:
    rows = ternary.broadened_rows()
    header = list(rows[0].keys())
    return header, [[row[key] for key in header] for row in rows]


def _delimiter_report(args) -> tuple[list[str], list[list]]:
    header = ["s4", "sigma", "period", "kind", "word"]
    rows = []
    for s4 in (0, 1):
        for sigma in ternary.SIGMA_LEVELS:
            for period in ternary.DELIMITER_PERIODS:
                kinds = ("any",) if period < 4 else ternary.DELIMITER_KINDS
                for kind in kinds:
                    try:
                        word = ternary.delimiter_word(s4, sigma, period, kind)
                    except ternary.UndefinedCell:
                        continue
                    rows.append([s4, sigma, period, kind, word])
    return header, rows


def _portrait_report(args, variant: str) -> tuple[list[str], list[list]]:
    stats = ternary.portrait(ternary.dictionary_for(variant))
    header = ["quantity", "phase_1", "phase_2", "phase_3", "average"]

    def cell(mapping, key) -> str:
        return f"{float(mapping[key]):.2f}" if key in mapping else ""

    rows = []
    for level in range(6):
        rows.append(
            [f"p_sum_{level}"]
            + [cell(phase, level) for phase in stats.p_sigma_phase]
            + [cell(stats.p_sigma, level)]
        )
    for letter in ternary.SYMBOLS:
        rows.append(
            [f"p_letter_{letter}"]
            + [cell(phase, letter) for phase in stats.p_letter_phase]
            + [cell(stats.p_letter, letter)]
        )
    average = sum(stats.p_transit) / 3
    rows.append(
        ["p_transit"]
        + [f"{float(p):.2f}" for p in stats.p_transit]
        + [f"{float(average):.2f}"]
    )
    for sigma, share in zip(ternary.SIGMA_LEVELS, stats.boundary):
        rows.append([f"pi_{sigma}", "", "", "", f"{float(share):.2f}"])
    for letter, bound in sorted(stats.run_bounds.items()):
        rows.append([f"run_{letter}", "", "", "", bound])
    return header, rows


def _sweep_report(args) -> tuple[list[str], list[list]]:
    header = ["max_head_droop", "max_tail_droop", "dc_bound", "min_transits", "count", "matches_pool"]
    rows = []
    for entry in echo.selection_sweep(jobs=args.jobs):
        rows.append([entry[key] for key in header])
    return header, rows


def _features_report(args) -> tuple[list[str], list[list]]:
    pools = echo.pool_arithmetic()
    resolution, uncertainty = echo.event_resolution()
    mii_resolution, mii_uncertainty = echo.event_resolution(mii=True)
    words_per_event = 5 * echo.GROUP_WORDS
    cols = echo.image_features()
    mean_transits = cols["transits"].sum() / echo.IMAGE_SPACE
    rows = [
        ["tx_delay_words", echo.GROUP_WORDS],
        ["tx_delay_ns", int(echo.GROUP_WORDS * echo.WORD_NS)],
        ["rx_delay_words", 2 * echo.GROUP_WORDS],
        ["rx_delay_ns", int(2 * echo.GROUP_WORDS * echo.WORD_NS)],
        ["event_resolution_ns", f"{resolution:g}"],
        ["event_uncertainty_ns", f"{uncertainty:g}"],
        ["mii_resolution_ns", f"{mii_resolution:g}"],
        ["mii_uncertainty_ns", f"{mii_uncertainty:g}"],
        ["mii_positions", echo.MII_POSITIONS],
        ["event_rate_words", words_per_event],
        ["event_rate_mev_s", f"{1e3 / (words_per_event * echo.WORD_NS):.2f}"],
        ["mean_transits_per_image", f"{mean_transits:.2f}"],
        ["native_pool", pools["native"]],
        ["forced_pool", pools["forced"]],
        ["pool_total", pools["total"]],
        ["image_space", pools["image_space"]],
    ]
    return ["parameter", "value"], rows


REPORTS = {
    "tbt-table13-census": _census_report,
    "tbt-table9-pages": _pages_report,
    "t1-table6-symmetric": _symmetric_report,
    "t1-table6-dm": _dm_report,
    "t1-table6-budget": _budget_report,
    "t1s-table14-jump": _jump_report,
    "t1l-table6-dictionary": _reference_dictionary_report,
    "t1l-table8-dictionary": _broadened_dictionary_report,
    "t1l-table10-delimiters": _delimiter_report,
    "t1l-table7-portrait": lambda args: _portrait_report(args, ternary.REFERENCE),
    "t1l-table9-portrait": lambda args: _portrait_report(args, ternary.BROADENED),
    "t1-table7-sweep": _sweep_report,
    "t1-table8-features": _features_report,
}


def _report_command(args) -> tuple[list[str], list[list]]:
    builder = REPORTS.get(args.table)
    if builder is None:
        known = ", ".join(sorted(REPORTS))
        raise UsageError(f"unknown table id {args.table!r}; known ids: {known}")
    return builder(args)


def _lam_codec_command(args) -> tuple[list[str], list[list]]:
    if args.letters % 2 or args.letters < 2:
        raise UsageError("letter count must be a positive even number")
    rng = random.Random(args.seed)
    space = 1 << (args.letters // 2)
    data = [rng.randrange(space) for _ in range(args.count)]
    letters = dictionary.encode_stream(data, args.letters)
    verdict = "PASS" if dictionary.decode_stream(letters, args.letters) == data else "FAIL"
    metrics = manchester.metrics(letters)
    header = ["check", "result", "detail"]
    rows = [
        ["round_trip", verdict, f"{args.count} words of {args.letters} letters"],
        ["stream_letters", len(letters), f"bias {metrics.dc_bias:+d}"],
    ]
    return header, rows


def _reconcile_command(args) -> tuple[list[str], list[list]]:
    if args.n_out <= args.n_in:
        raise UsageError("output radix must exceed input radix")
    rng = random.Random(args.seed)
    data = [rng.randrange(args.n_in) for _ in range(args.count)]
    oracle = reconciler.constant_oracle(args.n_in, args.n_out)
    config = reconciler.ReconcilerConfig(capacity_threshold=args.threshold)
    encoded = reconciler.encode_stream(data, oracle, config)
    verdict = "PASS" if reconciler.decode_stream(encoded, oracle, config) == data else "FAIL"
    efficiency = (
        len(data) * math.log2(args.n_in) / (len(encoded.symbols) * math.log2(args.n_out))
        if encoded.symbols
        else 0.0
    )
    header = ["check", "result", "detail"]
    rows = [
        ["round_trip", verdict, f"{args.count} symbols base {args.n_in} -> base {args.n_out}"],
        ["outputs", len(encoded.symbols), f"threshold {args.threshold}"],
        ["efficiency", f"{efficiency:.4f}", "input bits over output bits"],
    ]
    return header, rows


def _t1l_codec_command(args) -> tuple[list[str], list[list]]:
    rng = random.Random(args.seed)
    d = ternary.dictionary_for(args.variant)
    codes = []
    sigma = ternary.START_SIGMA
    floor, ceiling = sigma, sigma
    for _ in range(args.words):
        code = rng.randrange(len(d.page(sigma)))
        codes.append(code)
        sigma += d.page(sigma).entry_for(code).word.delta_dc
        floor, ceiling = min(floor, sigma), max(ceiling, sigma)
    letters = ternary.encode_stream(codes, args.variant)
    verdict = "PASS" if ternary.decode_stream(letters, args.variant) == codes else "FAIL"
    header = ["check", "result", "detail"]
    rows = [
        ["round_trip", verdict, f"{args.words} words, variant {args.variant}"],
        ["page_misses", 0, "decode raised none"],
        ["sum_band", f"{floor}..{ceiling}", "running disparity stays on a page"],
    ]
    return header, rows


def _echo_plan_command(args) -> tuple[list[str], list[list]]:
    plan = echo.plan_round(args.data, args.capable, args.modulus)
    header = ["data_radix", "echo_radix", "echo_modulus", "word_count", "holds"]
    lhs = plan.cancellation * plan.data_radix**plan.word_count
    rhs = plan.echo_radix**plan.word_count
    return header, [[plan.data_radix, plan.echo_radix, plan.echo_modulus, plan.word_count, lhs <= rhs]]


def _echo_census_command(args) -> tuple[list[str], list[list]]:
    if args.sweep:
        return _sweep_report(args)
    count = echo.image_filter_census(
        max_head_droop=args.head,
        max_tail_droop=args.tail,
        dc_bound=args.dc,
        min_transits=args.transits,
        dc_unit=args.dc_unit,
        jobs=args.jobs,
    )
    header = ["max_head_droop", "max_tail_droop", "dc_bound", "min_transits", "count", "matches_pool"]
    return header, [[args.head, args.tail, args.dc, args.transits, count, count == echo.POOL_TOTAL]]


def _render(header: list[str], rows: list[list], fmt: str) -> str:
    if fmt == "csv":
        sink = io.StringIO()
        writer = csv.writer(sink, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return sink.getvalue()
    if fmt == "json":
        records = [dict(zip(header, row)) for row in rows]
        return json.dumps(records, indent=2) + "\n"
    table = [header] + [[str(cell) for cell in row] for row in rows]
    widths = [max(len(line[col]) for line in table) for col in range(len(header))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(line, widths)).rstrip() for line in table]
    return "\n".join(lines) + "\n"


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "csv", "json"), default="text")
    common.add_argument("--out", help="write the report to this path instead of stdout")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--jobs", type=int, default=1)
    return common


def _parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(
        prog="lamcode", description="constrained line-code workbench reports"
    )
    sub = parser.add_subparsers(dest="group", required=True)

    lam = sub.add_parser("lam", help="two-level letter dictionaries").add_subparsers(
        dest="command", required=True
    )
    enum = lam.add_parser("enum", parents=[common], help="valid-image census table")
    enum.set_defaults(handler=_census_report)
    pages = lam.add_parser("pages", parents=[common], help="page sizes per letter count")
    pages.add_argument("--letters", type=int)
    pages.set_defaults(handler=_pages_report)
    codec = lam.add_parser("codec", parents=[common], help="randomized codec round trip")
    codec.add_argument("--letters", type=int, default=8)
    codec.add_argument("--count", type=int, default=2000)
    codec.set_defaults(handler=_lam_codec_command)

    scram = sub.add_parser("scramble", help="partition solver and budgets").add_subparsers(
        dest="command", required=True
    )
    solve = scram.add_parser("solve", parents=[common], help="partition rows for one width")
    solve.add_argument("--r", type=int, required=True)
    solve.add_argument("--n", type=int, default=259)
    solve.set_defaults(handler=_solve_command)
    binmap = scram.add_parser("map", parents=[common], help="bubble bin layout")
    binmap.add_argument("--bins", type=int, required=True)
    binmap.set_defaults(handler=_map_command)
    budget = scram.add_parser("budget", parents=[common], help="repetition and observation budget")
    budget.set_defaults(handler=_budget_report)

    rec = sub.add_parser("reconcile", help="mixed-radix reconciler").add_subparsers(
        dest="command", required=True
    )
    run = rec.add_parser("run", parents=[common], help="randomized round-trip suite")
    run.add_argument("--self-test", action="store_true")
    run.add_argument("--count", type=int, default=2000)
    run.add_argument("--n-in", type=int, default=256)
    run.add_argument("--n-out", type=int, default=259)
    run.add_argument("--threshold", type=int, default=1 << 20)
    run.set_defaults(handler=_reconcile_command)

    t1l = sub.add_parser("t1l", help="paged ternary transport").add_subparsers(
        dest="command", required=True
    )
    tcodec = t1l.add_parser("codec", parents=[common], help="randomized codec round trip")
    tcodec.add_argument("--words", type=int, default=10000)
    tcodec.add_argument("--variant", choices=ternary.VARIANTS, default=ternary.REFERENCE)
    tcodec.set_defaults(handler=_t1l_codec_command)
    tport = t1l.add_parser("portrait", parents=[common], help="stationary statistics table")
    tport.add_argument("--variant", choices=ternary.VARIANTS, default=ternary.REFERENCE)
    tport.set_defaults(handler=lambda args: _portrait_report(args, args.variant))

    ech = sub.add_parser("echo", help="echo pools and image census").add_subparsers(
        dest="command", required=True
    )
    plan = ech.add_parser("plan", parents=[common], help="round-length plan")
    plan.add_argument("--data", type=int, default=16)
    plan.add_argument("--capable", type=int, default=20)
    plan.add_argument("--modulus", type=int, default=2)
    plan.set_defaults(handler=_echo_plan_command)
    census = ech.add_parser("census", parents=[common], help="image filter census")
    census.add_argument("--head", type=int, default=echo.IMAGE_SYMBOLS)
    census.add_argument("--tail", type=int, default=echo.IMAGE_SYMBOLS)
    census.add_argument("--dc", type=int, default=echo.IMAGE_SYMBOLS)
    census.add_argument("--transits", type=int, default=0)
    census.add_argument("--dc-unit", type=int, default=1)
    census.add_argument("--sweep", action="store_true")
    census.set_defaults(handler=_echo_census_command)

    report = sub.add_parser("report", parents=[common], help="render a table by id")
    report.add_argument("table")
    report.set_defaults(handler=_report_command)
    return parser


def _solve_command(args) -> tuple[list[str], list[list]]:
    header = ["r", "m_even", "m_odd", "x_even", "x_odd", "kind", "unb_pos", "unb_neg"]
    rows = []
    for sol in scrambler.solve_partitions(args.r, args.n):
        pos, neg = scrambler.unbalance(sol)
        kind = "dx1" if abs(sol.x_even - sol.x_odd) <= 1 else "dm1"
        rows.append(
            [
                sol.r,
                sol.m_even,
                sol.m_odd,
                sol.x_even,
                sol.x_odd,
                kind,
                scrambler.format_unbalance(pos),
                scrambler.format_unbalance(neg),
            ]
        )
    return header, rows


def _map_command(args) -> tuple[list[str], list[list]]:
    layout = scrambler.bubble_map(args.bins)
    header = ["bin", "size"]
    rows = [[i, size] for i, size in enumerate(layout.sizes)]
    return header, rows


def main(argv: list[str] | None = None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    try:
        header, rows = args.handler(args)
        text = _render(header, rows, args.format)
    except WorkbenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - the contract maps these to exit 1
        print(f"internal error: {exc}", file=sys.stderr)
        return 1
    if args.out:
        with open(args.out, "w", encoding="utf-8") as sink:
            sink.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
