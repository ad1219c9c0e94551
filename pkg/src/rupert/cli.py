"""Command-line interface.

Exit codes: 0 success or proof verified, 1 mathematical failure, 2 usage
or I/O error.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from fractions import Fraction

from gmpy2 import mpq

from . import solids as sol
from .certtree import DEFAULT_DENOMINATOR, DecodeError, Region5

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _q(text) -> mpq:
    try:
        return mpq(Fraction(str(text)))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _solid(name):
    try:
        if os.path.exists(name):
            return sol.load_vertex_file(name)
        return sol.get_solid(name)
    except (KeyError, ValueError) as exc:
        raise SystemExit(_usage(str(exc)))


def _usage(msg) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return EXIT_USAGE


def _root(poly, args):
    if getattr(args, "root", None):
        return Region5.from_flat(args.root)
    if getattr(args, "alpha_range", None):
        lo, hi = args.alpha_range
        return sol.alpha_slab(poly, lo, hi, args.denominator)
    return sol.initial_region(poly, args.denominator)


# -- subcommands ------------------------------------------------------------

def cmd_solids(args):
    for name in sol.SOLIDS:
        p = sol.get_solid(name)
        print(f"{name}\t{p.n} vertices\tsymmetry={p.symmetry or 'none'}\tmax norm bound {p.radius_bound}")
    return EXIT_OK


def cmd_build_tree(args):
    from .builder import BuildConfig, BuildError, build_table
    poly = _solid(args.solid)
    try:
        root = _root(poly, args)
    except ValueError as exc:
        return _usage(exc)
    cfg = BuildConfig(max_depth=args.max_depth, margin=args.margin, denominator=args.denominator,
                      threads=args.threads, progress=not args.quiet)
    t0 = time.time()
    try:
        table = build_table(poly, root, cfg)
    except BuildError as exc:
        print(f"build failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    try:
        table.write_csv(args.out)
    except OSError as exc:
        return _usage(exc)
    st = table.stats()
    print(f"wrote {len(table)} nodes to {args.out}: {st['interior']} interior, {st['leaves']} leaves "
          f"({st['global']} global, {st['local']} local) in {time.time() - t0:.1f}s")
    return EXIT_OK


def cmd_verify_tree(args):
    from .verifier import verify_tree
    poly = _solid(args.solid)
    try:
        root = _root(poly, args)
        rep = verify_tree(poly, args.tree, root, threads=args.threads, sample=args.sample,
                          report_path=args.report, denominator=args.denominator, progress=not args.quiet)
    except (OSError, DecodeError, ValueError) as exc:
        return _usage(exc)
    print(rep.summary())
    if args.sample is not None:
        return EXIT_OK if rep.sample_ok else EXIT_FAIL
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_check_region(args):
    from .certtree import GLOBAL, LOCAL, CertNode
    from .exclusion.rational import RationalSolid
    from .verifier import verify_leaf
    poly = _solid(args.solid)
    try:
        region = Region5.from_flat(args.region)
    except ValueError as exc:
        return _usage(exc)
    if (args.glob is None) == (args.local is None):
        return _usage("give exactly one of --global or --local")
    if args.glob is not None:
        s, wx, wy, wd = args.glob
        node = CertNode(0, GLOBAL, region, s_index=s, wx=wx, wy=wy, wd=wd)
    else:
        p1, p2, p3, q1, q2, q3, r, sg = args.local
        node = CertNode(0, LOCAL, region, p=(p1, p2, p3), q=(q1, q2, q3), r=r, sigma_q=sg)
    res = verify_leaf(RationalSolid(poly), node, args.denominator)
    print(f"center: {[str(c) for c in region.center(args.denominator)]}")
    print(f"epsilon: {region.epsilon(args.denominator)}")
    if res.excluded:
        print("excluded")
        return EXIT_OK
    print(f"inconclusive at step {res.step.value}: {res.detail}")
    return EXIT_FAIL


def cmd_find_solution(args):
    from .find import SearchConfig, search_solution
    poly = _solid(args.solid)
    res = search_solution(poly, SearchConfig(starts=args.starts, seed=args.seed))
    if res is None:
        print("no certified solution found within budget")
        return EXIT_FAIL
    print("angles: " + " ".join(str(a) for a in res.angles()))
    print(f"certified Nieuwland lower bound: {res.nu} (= {float(res.nu):.4f})")
    return EXIT_OK


def cmd_nieuwland(args):
    from .find import RupertSolution, certify_solution, nieuwland_lower
    poly = _solid(args.solid)
    s = RupertSolution.make(args.angles)
    try:
        if args.scale is not None:
            ok = certify_solution(poly, s.scaled(args.scale))
            print(f"scale {args.scale}: {'certified' if ok else 'not certified'}")
            return EXIT_OK if ok else EXIT_FAIL
        nu = nieuwland_lower(poly, s)
    except ValueError as exc:
        return _usage(exc)
    if nu < 1:
        print("not a certified solution at scale 1")
        return EXIT_FAIL
    print(f"certified Nieuwland lower bound: {nu} (= {float(nu):.4f})")
    return EXIT_OK


def cmd_export_projection(args):
    from .find import export_projection
    poly = _solid(args.solid)
    try:
        text = export_projection(poly, args.theta, args.phi, args.alpha, args.format, args.out, args.inner)
    except OSError as exc:
        return _usage(exc)
    if args.out is None:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_band_proof(args):
    from .band import band_grid, build_band_cover, write_cover
    from .exclusion.rational import RationalSolid
    from .verifier import verify_band_cover, verify_leaf, verify_regions
    poly = _solid(args.solid)
    t0 = time.time()
    try:
        grid = band_grid(args.epsilon_grid, args.denominator)
    except (ValueError, ArithmeticError) as exc:
        return _usage(exc)
    solid = RationalSolid(poly)
    cover = build_band_cover(poly, grid, block=args.block, max_regions=args.max_regions,
                             check=lambda n: verify_leaf(solid, n, args.denominator).excluded,
                             progress=not args.quiet)
    print(f"grid: omega={grid.omega}, i<={grid.n_theta}, j<={grid.n_phi}, {grid.cell_count()} boxes")
    print(f"cover: {len(cover.nodes)} regions, {len(cover.failed_cells)} unresolved cells "
          f"({time.time() - t0:.0f}s)")
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        write_cover(cover, os.path.join(args.out, "regions.csv"), os.path.join(args.out, "assignment.csv"))
    if cover.failed_cells or len(cover.nodes) > args.max_regions:
        print("band proof FAILED: could not cover every grid box")
        return EXIT_FAIL
    results = verify_regions(poly, cover.nodes, threads=args.threads, denominator=args.denominator)
    bad = [r for r in results if not r[1]]
    print(f"exact local-theorem checks: {len(results) - len(bad)}/{len(results)} passed")
    ok, problems = verify_band_cover(grid, cover.regions(), cover.assignment)
    for p in problems:
        print(f"  cover: {p}")
    print(f"B_ij containment: {'ok' if ok else 'FAILED'} ({time.time() - t0:.0f}s)")
    if bad or not ok:
        print("band proof FAILED")
        return EXIT_FAIL
    print(f"proof verified: no Rupert solution of {poly.name} with |theta1-theta2|, |phi1-phi2|, "
          f"|alpha| <= {grid.omega}")
    return EXIT_OK


# -- parser ------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(prog="rupert", description="Prove or disprove Rupert's property.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, tree=False):
        p.add_argument("--solid", default="noperthedron", help="registry name or vertex file")
        p.add_argument("--denominator", type=int, default=DEFAULT_DENOMINATOR)
        if tree:
            p.add_argument("--alpha-range", nargs=2, type=_q, metavar=("LO", "HI"),
                           help="restrict alpha to [LO*pi, HI*pi]")
            p.add_argument("--root", nargs=10, type=int, metavar="B",
                           help="explicit root box (10 integer bounds over the denominator)")
            p.add_argument("--threads", type=int, default=1)
            p.add_argument("--quiet", action="store_true")

    p = sub.add_parser("solids", help="list the solid registry")
    p.set_defaults(func=cmd_solids)

    p = sub.add_parser("build-tree", help="build a certificate tree")
    common(p, tree=True)
    p.add_argument("--out", required=True)
    p.add_argument("--max-depth", type=int, default=40)
    p.add_argument("--margin", type=float, default=1e-6)
    p.set_defaults(func=cmd_build_tree)

    p = sub.add_parser("verify-tree", help="verify a certificate tree exactly")
    common(p, tree=True)
    p.add_argument("--tree", required=True)
    p.add_argument("--sample", type=int, default=None, help="check only this many leaves (not a proof)")
    p.add_argument("--report", default=None, help="write id,verdict,step lines here")
    p.set_defaults(func=cmd_verify_tree)

    p = sub.add_parser("check-region", help="check one region and witness exactly")
    common(p)
    p.add_argument("--region", nargs=10, type=int, required=True,
                   metavar="B", help="T1_min T1_max V1_min V1_max T2_min T2_max V2_min V2_max A_min A_max")
    p.add_argument("--global", dest="glob", nargs=4, type=int, metavar=("S", "WX", "WY", "WD"))
    p.add_argument("--local", nargs=8, type=int, metavar=("P1", "P2", "P3", "Q1", "Q2", "Q3", "R", "SIGMA"))
    p.set_defaults(func=cmd_check_region)

    p = sub.add_parser("find-solution", help="search for a certified Rupert solution")
    common(p)
    p.add_argument("--starts", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_find_solution)

    p = sub.add_parser("nieuwland", help="certified Nieuwland lower bound at given angles")
    common(p)
    p.add_argument("--angles", nargs=5, type=_q, required=True, metavar="X",
                   help="theta1 phi1 theta2 phi2 alpha (decimal or fraction)")
    p.add_argument("--scale", type=_q, default=None, help="only certify this scale")
    p.set_defaults(func=cmd_nieuwland)

    p = sub.add_parser("export-projection", help="write a shadow as SVG or CSV")
    common(p)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--phi", type=float, required=True)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--inner", nargs=2, type=float, default=None, metavar=("THETA1", "PHI1"))
    p.add_argument("--format", choices=("svg", "csv"), default="csv")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_export_projection)

    p = sub.add_parser("band-proof", help="certificate that no near-diagonal solution exists")
    common(p)
    p.set_defaults(solid="ruperthedron")
    p.add_argument("--epsilon-grid", type=_q, default=mpq(6, 10000), help="grid width omega")
    p.add_argument("--block", type=int, default=32)
    p.add_argument("--max-regions", type=int, default=5000)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", default=None, help="directory for regions.csv and assignment.csv")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_band_proof)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
