import sys
import math
import argparse
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import List, Optional

from core.config import load_config, get_max_workers, VERSION, DEFAULT_TABLE_RADIUS, \
    DEFAULT_GRID_STEP, DEFAULT_GRID_CEILING, SELFTEST_SEED, SELFTEST_COUNT
from core.errors import InputError, InfeasibleError
from core.report import RunReport, Stopwatch
from core import formats
from core.bigraph import Side, max_matching, is_perfect, hall_check, bottleneck_matching
from core.groups import Family, GroupDescriptor, FiniteSubset, ball
from core.symmetry import (
    SymMatching, factor, is_proper, properness_oracle, symmetric_perfect_matching,
    materialize, materialize_matching, interior_coverage, interior_violation,
)
from core.amenability import (
    folner_ratio, folner_witness_translate, ball_family, box_family,
    standard_f2_paradox, verify_paradox, classification_table, ParadoxCertificate,
)
from core.counterexample import (
    build_counterexample, cyclic_latin_square, corrupt_latin_square, verify_window,
    certify_no_symmetric_matching,
)
from core.twinlattice import (
    RationalRotation, bottleneck_bound, default_rcap, emit_pairs, irrational_window_estimate,
    angle_sweep, common_sublattice,
)
from core.selftest import run_selftest
from utils.helpers import parse_rational, parse_int_list, format_rational, format_float
from utils.logger import log
from utils.path_utils import read_input, write_output, digest_text

# Exit codes
EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2


class SymMatchCLI:
    """One binary, one subcommand per experiment; every run yields a RunReport."""

    def __init__(self):
        self.parser = self._build_parser()

    def _build_parser(self) -> argparse.ArgumentParser:
        common = argparse.ArgumentParser(add_help=False)
        common.add_argument("--format", choices=["json", "text"], default="json",
                            help="Report format on stdout (default: json)")
        common.add_argument("--no-timing", action="store_true",
                            help="Omit timing_ms (for golden files)")
        common.add_argument("--output", default="-", help="Write the report to FILE instead of stdout")

        parser = argparse.ArgumentParser(
            prog="symmatch",
            description="Perfect matchings of bipartite graphs with a free group action.")
        parser.add_argument("--version", action="version", version=f"symmatch {VERSION}")
        sub = parser.add_subparsers(dest="command", required=True)

        p = sub.add_parser("match", parents=[common], help="Maximum matching and Hall witnesses")
        p.add_argument("graph", help="FiniteBigraph JSON file ('-' for stdin)")
        p.add_argument("--require-perfect", action="store_true", help="Exit 1 unless the matching is perfect")
        p.add_argument("--bottleneck", action="store_true", help="Also compute the bottleneck matching")

        p = sub.add_parser("factor", parents=[common], help="Factor graph and properness")
        p.add_argument("symgraph", help="SymGraph JSON file ('-' for stdin)")
        p.add_argument("--oracle-radius", type=int, default=None,
                       help="Cross-check properness on a materialized ball")

        p = sub.add_parser("symmatch", parents=[common], help="Perfect symmetric matching or factor witness")
        p.add_argument("symgraph", help="SymGraph JSON file ('-' for stdin)")
        p.add_argument("--window", type=int, default=None, help="Verify on the materialized ball of radius R")

        p = sub.add_parser("folner", parents=[common], help="Folner ratios |FU|/|F| over a window family")
        p.add_argument("--family", choices=[f.value for f in Family], required=True)
        p.add_argument("--param", type=int, required=True)
        windows = p.add_mutually_exclusive_group(required=True)
        windows.add_argument("--balls", help="Ball radii, e.g. 1,2,3")
        windows.add_argument("--boxes", help="Box sides (Z^d only), e.g. 8,16,32")
        u_spec = p.add_mutually_exclusive_group(required=True)
        u_spec.add_argument("--u", help="Elements of U separated by ';', e.g. '0,0;1,0;0,1'")
        u_spec.add_argument("--generators", action="store_true", help="U = identity plus symmetric generators")
        p.add_argument("--translate", action="store_true", help="Also report max |F \\ Fg| / |F|")

        p = sub.add_parser("paradox", parents=[common], help="Verify the F_2 paradoxical decomposition")
        p.add_argument("--radius", type=int, required=True)
        p.add_argument("--table-radius", type=int, default=DEFAULT_TABLE_RADIUS)
        p.add_argument("--corrupt", action="store_true", help="Drop the a^n shift (expected to fail)")

        p = sub.add_parser("counterexample", parents=[common], help="Proper F_2 graph without symmetric matching")
        mode = p.add_mutually_exclusive_group(required=True)
        mode.add_argument("--emit", action="store_true", help="Emit graph, factor and witness")
        mode.add_argument("--verify", type=int, metavar="R", help="Verify the explicit matching on balls 0..R")
        p.add_argument("--naive", action="store_true", help="Untwisted construction (not proper)")
        p.add_argument("--corrupt-phi", action="store_true", help="Repeat a Latin square entry")

        p = sub.add_parser("twinlattice", parents=[common], help="Z^2 against a rotated copy")
        rotation = p.add_mutually_exclusive_group(required=True)
        rotation.add_argument("--pqc", nargs=3, type=int, metavar=("P", "Q", "C"))
        rotation.add_argument("--angle", type=float, help="Rotation angle (radians unless --degrees)")
        rotation.add_argument("--sweep", help="Angles separated by ',' (radians unless --degrees)")
        p.add_argument("--degrees", action="store_true")
        p.add_argument("--t", nargs=2, default=["0", "0"], metavar=("TX", "TY"))
        p.add_argument("--rcap", default=None, help="Largest threshold tried (rational mode)")
        p.add_argument("--window", type=int, default=None, help="Disc radius N (angle mode)")
        p.add_argument("--step", type=float, default=DEFAULT_GRID_STEP)
        p.add_argument("--ceiling", type=float, default=DEFAULT_GRID_CEILING)
        p.add_argument("--emit-pairs", default=None, metavar="FILE", help="Write 'x y -> x2 y2' lines")
        p.add_argument("--periods", type=int, default=1, help="Periods per axis for --emit-pairs")
        p.add_argument("--export-quotient", default=None, metavar="FILE", help="Write the quotient SymGraph")

        p = sub.add_parser("selftest", parents=[common], help="Seeded property checks")
        p.add_argument("--seed", type=int, default=SELFTEST_SEED)
        p.add_argument("--count", type=int, default=SELFTEST_COUNT)
        return parser

    def run(self, argv: Optional[List[str]] = None) -> int:
        argv = list(sys.argv[1:] if argv is None else argv)
        try:
            args = self.parser.parse_args(argv)
        except SystemExit as e:
            return EXIT_OK if e.code in (0, None) else EXIT_INPUT

        handler = getattr(self, f"cmd_{args.command}")
        watch = Stopwatch()
        try:
            with watch.running():
                digest, result, code = handler(args)
        except InputError as e:
            log.error("Invalid input", details=str(e))
            return EXIT_INPUT

        report = RunReport(["symmatch"] + argv, digest, result, watch.elapsed_ms)
        write_output(args.output, report.render(args.format, with_timing=not args.no_timing))
        log.detail("Digest", report.digest)
        return code

    # =========================================================================
    # GRAPH COMMANDS
    # =========================================================================

    def cmd_match(self, args):
        text = read_input(args.graph)
        g = formats.parse_bigraph(text)
        m = max_matching(g)
        perfect = is_perfect(g, m)
        result = {
            "left": g.left_count,
            "right": g.right_count,
            "size": len(m),
            "perfect": perfect,
            "matching": formats.matching_to_json(m),
            "hall_left": formats.witness_to_json(hall_check(g, Side.LEFT)),
            "hall_right": formats.witness_to_json(hall_check(g, Side.RIGHT)),
        }
        if args.bottleneck:
            bn = bottleneck_matching(g)
            result["bottleneck"] = None if bn is None else {
                "threshold": formats.encode_weight(bn.threshold),
                "matching": formats.matching_to_json(bn.matching),
            }
        if perfect:
            log.success(f"Perfect matching of size {len(m)}")
        else:
            log.warning(f"Maximum matching {len(m)} on {g.left_count}+{g.right_count} vertices")
        code = EXIT_NEGATIVE if args.require_perfect and not perfect else EXIT_OK
        return digest_text(text), result, code

    def cmd_factor(self, args):
        text = read_input(args.symgraph)
        sg = formats.parse_symgraph(text)
        fg = factor(sg)
        proper = is_proper(sg)
        result = {
            "group": sg.group.to_json(),
            "factor": formats.factor_to_json(fg),
            "proper": proper,
        }
        if args.oracle_radius is not None:
            hit = properness_oracle(sg, args.oracle_radius)
            result["oracle"] = None if hit is None else [_vertex(v) for v in hit]
        log.info(f"Factor graph: {fg.underlying.left_count}x{fg.underlying.right_count}, "
                 f"{len(fg.underlying.edges)} edges, {'proper' if proper else 'not proper'}")
        return digest_text(text), result, EXIT_OK

    def cmd_symmatch(self, args):
        text = read_input(args.symgraph)
        sg = formats.parse_symgraph(text)
        outcome = symmetric_perfect_matching(sg)
        found = isinstance(outcome, SymMatching)
        result = {
            "status": "matching" if found else "witness",
            "matching": formats.symmatching_to_json(outcome) if found else None,
            "witness": None if found else formats.witness_to_json(outcome),
        }
        if args.window is not None:
            window = ball(sg.group, args.window)
            violation = interior_violation(sg, window)
            check = {"radius": args.window, "interior_violation": formats.witness_to_json(violation)}
            if found:
                wg = materialize(sg, window)
                m = materialize_matching(sg, outcome, wg)
                uncovered_left, uncovered_right = interior_coverage(wg, m)
                check.update({
                    "pairs": len(m),
                    "interior_left": len(wg.interior_left),
                    "interior_right": len(wg.interior_right),
                    "uncovered_left": len(uncovered_left),
                    "uncovered_right": len(uncovered_right),
                })
            result["window"] = check
        if found:
            log.success(f"Symmetric perfect matching on {len(outcome)} orbit pairs")
        else:
            log.warning(f"No symmetric perfect matching: {outcome.side.value} deficiency {outcome.deficiency}")
        return digest_text(text), result, EXIT_OK if found else EXIT_NEGATIVE

    # =========================================================================
    # AMENABILITY
    # =========================================================================

    def cmd_folner(self, args):
        desc = GroupDescriptor(args.family, args.param)
        if args.balls is not None:
            windows = ball_family(desc, parse_int_list(args.balls))
        else:
            windows = box_family(desc, parse_int_list(args.boxes))
        if args.generators:
            u = FiniteSubset.of(desc, [desc.identity(), *desc.generators()])
        else:
            u = FiniteSubset.parse(desc, [part for part in args.u.split(";") if part.strip()])

        report = folner_ratio(desc, windows, u)
        rows = [row.to_json() for row in report.rows]
        if args.translate:
            for row, (_, window) in zip(rows, windows):
                row["translate"] = format_rational(folner_witness_translate(desc, window, u))
        result = {
            "group": desc.to_json(),
            "U": u.serialize(),
            "rows": rows,
            "infimum_so_far": format_rational(report.infimum_so_far),
        }
        log.info(f"{desc.label}: infimum of |FU|/|F| over {len(rows)} windows = "
                 f"{format_rational(report.infimum_so_far)}")
        digest = digest_text(repr((desc.label, [label for label, _ in windows], result["U"])))
        return digest, result, EXIT_OK

    def cmd_paradox(self, args):
        p = standard_f2_paradox(shift_powers=not args.corrupt)
        verdict = verify_paradox(p, args.radius)
        ok = isinstance(verdict, ParadoxCertificate)
        if ok:
            outcome = {"ok": True, "radius": verdict.radius, "words_checked": verdict.words_checked,
                       "images_checked": verdict.images_checked}
            log.success(f"Paradoxical decomposition verified on ball({args.radius})")
        else:
            outcome = {"ok": False, "word": verdict.word.serialize(), "kind": verdict.kind,
                       "detail": verdict.detail}
            log.warning(f"Violation at {verdict.word}: {verdict.detail}")
        result = {
            "decomposition": p.name,
            "index_set": p.index_set.serialize(),
            "table": classification_table(p, args.table_radius),
            "verification": outcome,
        }
        return digest_text(p.name), result, EXIT_OK if ok else EXIT_NEGATIVE

    # =========================================================================
    # COUNTEREXAMPLE
    # =========================================================================

    def cmd_counterexample(self, args):
        p = standard_f2_paradox()
        phi = cyclic_latin_square(len(p.index_set))
        if args.corrupt_phi:
            phi = corrupt_latin_square(phi)
        bundle = build_counterexample(p, phi, twisted=not args.naive)
        sg = bundle.sym_graph

        if args.emit:
            fg = factor(sg)
            witness = certify_no_symmetric_matching(bundle)
            result = {
                "symgraph": formats.symgraph_to_json(sg),
                "phi": [list(row) for row in phi.table],
                "proper": is_proper(sg),
                "factor": formats.factor_to_json(fg),
                "factor_max_matching": len(max_matching(fg.underlying)),
                "witness": formats.witness_to_json(witness),
            }
            log.info(f"Counterexample: {sg.a_orbits} A-orbits, {sg.b_orbits} B-orbits, "
                     f"{'proper' if result['proper'] else 'not proper'}")
            return digest_text(repr(phi.table) + str(args.naive)), result, EXIT_OK

        if args.verify < 0:
            raise InputError(f"Radius must be >= 0, got {args.verify}")
        radii = list(range(args.verify + 1))
        reports = []
        with ThreadPoolExecutor(max_workers=get_max_workers()) as executor:
            futures = {executor.submit(verify_window, bundle, f"ball({r})", ball(sg.group, r)): r
                       for r in radii}
            for done, future in enumerate(as_completed(futures), 1):
                r = futures[future]
                reports.append((r, future.result()))
                log.step(done, len(radii), f"ball({r}) checked")
        reports.sort(key=lambda item: item[0])
        windows = [report.to_json() for _, report in reports]
        ok = all(report.ok for _, report in reports)
        if ok:
            log.success(f"Explicit matching verified on balls 0..{args.verify}")
        else:
            log.warning("Explicit matching failed on at least one window")
        result = {"proper": is_proper(sg), "windows": windows, "ok": ok}
        return digest_text(repr(phi.table) + str(args.naive)), result, EXIT_OK if ok else EXIT_NEGATIVE

    # =========================================================================
    # TWIN LATTICE
    # =========================================================================

    def cmd_twinlattice(self, args):
        if args.pqc is not None:
            return self._twin_rational(args)
        return self._twin_angle(args)

    def _twin_rational(self, args):
        p, q, c = args.pqc
        t = (parse_rational(args.t[0]), parse_rational(args.t[1]))
        rot = RationalRotation(p, q, c, t)
        r_cap = parse_rational(args.rcap) if args.rcap is not None else default_rcap(rot)
        lattice = common_sublattice(rot)
        rotation = {"p": rot.p, "q": rot.q, "c": rot.c, "t": [format_rational(v) for v in rot.t],
                    "basis": [list(v) for v in lattice.basis], "index": lattice.index}
        digest = digest_text(repr((rot.p, rot.q, rot.c, rot.t, r_cap)))
        try:
            bound = bottleneck_bound(rot, r_cap)
        except InfeasibleError as e:
            log.warning(str(e))
            result = {"rotation": rotation, "feasible": False,
                      "largest_tested": format_rational(e.largest_tested)}
            return digest, result, EXIT_NEGATIVE

        if args.emit_pairs:
            lines = emit_pairs(bound.quotient, bound.matching, args.periods)
            write_output(args.emit_pairs, "\n".join(lines) + "\n")
            log.detail("Pairs", f"{len(lines)} lines -> {args.emit_pairs}")
        if args.export_quotient:
            data = formats.symgraph_to_json(bound.quotient.sym_graph, bound.quotient.weights)
            write_output(args.export_quotient, formats.dump_json(data))
            log.detail("Quotient", args.export_quotient)

        result = {
            "rotation": rotation,
            "feasible": True,
            "r_squared": format_rational(bound.r_squared),
            "r": format_float(bound.r),
            "candidates": bound.candidates,
            "matching": formats.symmatching_to_json(bound.matching),
        }
        log.success(f"Bottleneck bound r* = {format_float(bound.r)} (r*^2 = {format_rational(bound.r_squared)})")
        return digest, result, EXIT_OK

    def _twin_angle(self, args):
        if args.window is None:
            raise InputError("--window N is required with --angle or --sweep")
        t = (float(parse_rational(args.t[0])), float(parse_rational(args.t[1])))
        scale = math.pi / 180 if args.degrees else 1.0
        if args.sweep is not None:
            try:
                angles = [float(a) * scale for a in args.sweep.split(",") if a.strip()]
            except ValueError:
                raise InputError(f"Cannot parse angles: {args.sweep!r}")
            log.start_spinner(f"Sweeping {len(angles)} angles")
            try:
                estimates = angle_sweep(angles, t, args.window, args.step, args.ceiling,
                                        max_workers=get_max_workers())
            finally:
                log.stop_spinner()
            result = {"rows": [e.to_json() for e in estimates]}
        else:
            log.start_spinner(f"Scanning thresholds on the disc of radius {args.window}")
            try:
                estimate = irrational_window_estimate(args.angle * scale, t, args.window, args.step, args.ceiling)
            finally:
                log.stop_spinner()
            result = estimate.to_json()
            log.info(f"Window N={args.window}: lower bound {result['lower_bound']}, "
                     f"upper indication {result['upper_indication']} (heuristic)")
        digest = digest_text(repr((args.angle, args.sweep, args.degrees, t, args.window, args.step, args.ceiling)))
        return digest, result, EXIT_OK

    # =========================================================================
    # SELFTEST
    # =========================================================================

    def cmd_selftest(self, args):
        if args.count < 0:
            raise InputError(f"Count must be >= 0, got {args.count}")
        log.section(f"Selftest (seed {args.seed}, {args.count} cases per property)")
        result = run_selftest(args.seed, args.count)
        if result["failures"]:
            log.error(f"{result['failures']} failures")
        else:
            log.success("All properties hold")
        digest = digest_text(f"{args.seed}:{args.count}")
        return digest, result, EXIT_NEGATIVE if result["failures"] else EXIT_OK


def _vertex(v) -> list:
    return [v[0].serialize(), v[1]]


load_config()
log.configure()


if __name__ == "__main__":
    try:
        sys.exit(SymMatchCLI().run())
    except KeyboardInterrupt:
        print("\nAborted.", file=sys.stderr)
        sys.exit(130)
