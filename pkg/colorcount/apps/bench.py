#
#   Generate datasets, verify counting structures and benchmark them.
#

import argparse
import json
import logging
import os.path
import sys
import time

from lmfit import Model
import numpy as np
import pandas as pd
from tqdm import tqdm

from colorcount.config import get_default_config
from colorcount.errors import (
    BadParamsError,
    ColorCountError,
    DatasetIOError,
    SettingUnsupportedError,
    SuitabilityError,
)
from colorcount.geom_core import (
    CAPPROX,
    ApproxAnswer,
    ColoredInterval,
    ColoredPoint,
    ColoredRect3S,
    Rect5,
)
import colorcount.apps_nd as apps_nd
import colorcount.oracle as oracle
import colorcount.ortho2d as ortho2d
import colorcount.stab2d as stab2d
import colorcount.stab3d as stab3d

log = logging.getLogger(__name__)

DISTRIBUTIONS = ["uniform", "clustered", "skyline-adversarial"]

CSV_COLUMNS = ["structure", "n", "eps", "build_ms", "qps", "space_units", "max_ratio_err"]


def _oracle(setting, objects, eps, config, universe):
    return oracle.OracleCounter(setting, objects, colored=setting != oracle.STAB5S_3D)


def _stab2d(setting, objects, eps, config, universe):
    return stab2d.build_colored_counter(setting, objects, eps, config)


def _stab3d(setting, objects, eps, config, universe):
    return stab3d.build_colored_dominance_counter(objects, eps, config)


def _recursion_tree(setting, objects, eps, config, universe):
    return stab3d.build_box_stab_counter(objects, eps, config, sampled=False)


def _sampled_stabber(setting, objects, eps, config, universe):
    return stab3d.build_box_stab_counter(objects, eps, config, sampled=True)


def _initial2(setting, objects, eps, config, universe):
    return ortho2d.build_initial_2approx(objects)


def _bucketed(setting, objects, eps, config, universe):
    return ortho2d.build_bucketed_capprox(objects, config)


def _ortho3s(setting, objects, eps, config, universe):
    return ortho2d.build_colored_3sided(objects, eps, config, universe)


def _ortho4s(setting, objects, eps, config, universe):
    return ortho2d.build_colored_4sided(objects, eps, config, universe)


def _ortho_rd(setting, objects, eps, config, universe):
    dim = objects[0].dim if len(objects) > 0 else 2
    return apps_nd.build_colored_orthocount_rd(objects, dim, eps, config, universe)


# name: (settings, builder)
STRUCTURES = {
    "oracle": (oracle.SETTINGS, _oracle),
    "stab2d": ([oracle.INTERVAL_STAB_1D, oracle.DOM2D, oracle.STAB3S_2D], _stab2d),
    "stab3d": ([oracle.DOM3D], _stab3d),
    "recursion_tree": ([oracle.STAB5S_3D], _recursion_tree),
    "sampled_stabber": ([oracle.STAB5S_3D], _sampled_stabber),
    "initial2": ([oracle.RANGE3S_2D], _initial2),
    "bucketed": ([oracle.RANGE3S_2D], _bucketed),
    "ortho3s": ([oracle.RANGE3S_2D], _ortho3s),
    "ortho4s": ([oracle.RANGE4S_2D], _ortho4s),
    "ortho_rd": ([oracle.ORTHO_RD], _ortho_rd),
}


def parse_args(argv=None):
    """
    Parse the commandline arguments.

    Returns
    -------
    args: populated namespace
        The commandline arguments.
    """

    parser = argparse.ArgumentParser(
        description="Generate datasets, verify and benchmark approximate colour counting structures.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )

    parser.add_argument(
        "--verbose",
        dest="verbose",
        action="store_true",
        default=False,
        help="Log the build milestones.",
    )

    subparsers = parser.add_subparsers(dest="command")
    subparsers.required = True

    gen = subparsers.add_parser(
        "gen",
        help="Generate a dataset.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )

    gen.add_argument(
        "--setting",
        dest="setting",
        choices=oracle.SETTINGS,
        required=True,
        help="The geometric setting.",
    )

    gen.add_argument(
        "--n",
        dest="n",
        type=int,
        default=100,
        metavar="n",
        help="The number of objects.",
    )

    gen.add_argument(
        "--colors",
        dest="colors",
        type=int,
        default=10,
        metavar="colors",
        help="The number of colours to draw from.",
    )

    gen.add_argument(
        "--dist",
        dest="dist",
        choices=DISTRIBUTIONS,
        default="uniform",
        help="The distribution of the objects.",
    )

    gen.add_argument(
        "--grid",
        dest="grid",
        type=int,
        default=None,
        metavar="U",
        help="Coordinates are drawn from [0, U). Defaults to 4n, at least 16.",
    )

    gen.add_argument(
        "--dim",
        dest="dim",
        type=int,
        default=2,
        metavar="d",
        help="The dimension of ortho_rd points.",
    )

    gen.add_argument(
        "--seed",
        dest="seed",
        type=int,
        default=42,
        metavar="seed",
        help="The seed of the random number generator.",
    )

    gen.add_argument(
        "--out",
        dest="out",
        type=str,
        required=True,
        help="The output dataset file.",
    )

    for name, helptext in [
        ("verify", "Verify a structure against the exact oracle."),
        ("bench", "Benchmark structures and write CSV rows."),
    ]:
        sub = subparsers.add_parser(
            name,
            help=helptext,
            formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        )

        sub.add_argument(
            "datasets",
            type=str,
            nargs="+" if name == "bench" else 1,
            help="The dataset files.",
        )

        sub.add_argument(
            "--structure",
            dest="structure",
            choices=sorted(STRUCTURES),
            required=True,
            help="The structure to build.",
        )

        sub.add_argument(
            "--eps",
            dest="eps",
            type=float,
            default=0.5,
            metavar="eps",
            help="The approximation parameter.",
        )

        sub.add_argument(
            "--seed",
            dest="seed",
            type=int,
            default=42,
            metavar="seed",
            help="The seed of the first random sample.",
        )

        sub.add_argument(
            "--max-queries",
            dest="max_queries",
            type=int,
            default=None,
            metavar="num",
            help="Check a seeded subset of at most this many queries. Defaults to all distinct queries.",
        )

        if name == "verify":
            sub.add_argument(
                "--corrupt",
                dest="corrupt",
                action="store_true",
                default=False,
                help=argparse.SUPPRESS,
            )
        else:
            sub.add_argument(
                "--repetitions",
                dest="repetitions",
                type=int,
                default=1,
                metavar="num",
                help="Build and query this many times per dataset.",
            )

            sub.add_argument(
                "--out",
                dest="out",
                type=str,
                default=None,
                help="The output CSV file. Defaults to standard output.",
            )

            sub.add_argument(
                "--fit",
                dest="fit",
                action="store_true",
                default=False,
                help="Fit a power law to the space units against n.",
            )

    args = parser.parse_args(argv)

    return args


def check_args(args):
    """
    Sanity check the commandline arguments.

    Parameters
    ----------
    args: populated namespace
        The commandline arguments.
    """

    if args.command == "gen":
        if args.n < 0:
            print("BAD_PARAMS: The number of objects is negative: {0}".format(args.n))
            sys.exit(1)

        if args.colors < 1:
            print("BAD_PARAMS: The number of colours must be positive: {0}".format(args.colors))
            sys.exit(1)

        if args.grid is not None and args.grid < 1:
            print("BAD_PARAMS: The grid size must be positive: {0}".format(args.grid))
            sys.exit(1)

        if args.dim not in apps_nd.DIMENSIONS:
            print("BAD_PARAMS: The dimension is unsupported: {0}".format(args.dim))
            sys.exit(1)

    else:
        if not (0 < args.eps <= 1):
            print("BAD_PARAMS: eps must lie in (0, 1]: {0}".format(args.eps))
            sys.exit(1)

        if args.max_queries is not None and args.max_queries < 1:
            print("BAD_PARAMS: The query limit must be positive: {0}".format(args.max_queries))
            sys.exit(1)

        if args.command == "bench" and args.repetitions < 1:
            print("BAD_PARAMS: The repetitions must be positive: {0}".format(args.repetitions))
            sys.exit(1)

        for filename in args.datasets:
            if not os.path.isfile(filename):
                print("IO: The file does not exist: {0}".format(filename))
                sys.exit(1)


def _draw_coords(rng, n, dim, grid, colors, dist, color_ids):
    if dist == "uniform":
        coords = rng.integers(0, grid, size=(n, dim))
    elif dist == "clustered":
        centers = rng.integers(0, grid, size=(colors, dim))
        spread = max(1.0, grid / (4.0 * max(colors, 1) ** (1.0 / dim)))
        coords = centers[color_ids] + rng.normal(0.0, spread, size=(n, dim))
        coords = np.clip(np.rint(coords), 0, grid - 1).astype(int)
    elif dist == "skyline-adversarial":
        # an anti-chain, every point is maximal
        steps = np.sort(rng.choice(grid, size=n, replace=grid < n))
        coords = np.zeros((n, dim), dtype=int)
        coords[:, 0] = steps
        coords[:, 1:] = (grid - 1 - steps)[:, None]
    else:
        raise BadParamsError("Distribution is unknown: {0}".format(dist))

    return coords


def _colors_for(rng, n, colors, dist):
    if dist == "skyline-adversarial":
        return np.arange(n) % colors

    return rng.integers(0, colors, size=n)


def make_object(setting, coords, color):
    """
    Build the object of a setting from its integer columns.
    """

    coords = [int(v) for v in coords]

    if setting == oracle.INTERVAL_STAB_1D:
        lo, hi = coords
        res = ColoredInterval(lo, hi, color)
    elif setting == oracle.STAB3S_2D:
        x1, x2, y = coords
        res = ColoredRect3S(x1, x2, y, color)
    elif setting == oracle.STAB5S_3D:
        x1, x2, y1, y2, ztop = coords
        res = Rect5(x1, x2, y1, y2, ztop, color)
    elif setting in oracle.SETTINGS:
        res = ColoredPoint(coords, color)
    else:
        raise SettingUnsupportedError("Setting is unknown: {0}".format(setting))

    return res


def object_columns(setting, obj):
    """
    The integer columns of an object, inverse of make_object.
    """

    if setting == oracle.INTERVAL_STAB_1D:
        res = [obj.lo, obj.hi]
    elif setting == oracle.STAB3S_2D:
        res = [obj.x1, obj.x2, obj.y]
    elif setting == oracle.STAB5S_3D:
        res = [obj.x1, obj.x2, obj.y1, obj.y2, obj.ztop]
    else:
        res = list(obj.coords)

    return [int(v) for v in res]


def generate_dataset(setting, n, colors, dist="uniform", seed=42, grid=None, dim=2):
    """
    Generate a random dataset.

    Parameters
    ----------
    setting: str
        The geometric setting.
    n: int
        The number of objects.
    colors: int
        The number of colours to draw from.
    dist: str
        One of uniform, clustered or skyline-adversarial.
    seed: int
        The seed of the random number generator.
    grid: int or None
        Coordinates are drawn from [0, grid).
    dim: int
        The dimension of ortho_rd points.

    Returns
    -------
    header: dict
        The dataset metadata.
    objects: list
        The coloured objects.
    """

    oracle.check_setting(setting)

    if n < 0 or colors < 1:
        raise BadParamsError("Bad dataset size: n={0}, colors={1}".format(n, colors))

    if grid is None:
        grid = max(16, 4 * n)

    if setting in [oracle.INTERVAL_STAB_1D, oracle.DOM2D, oracle.RANGE3S_2D, oracle.RANGE4S_2D]:
        dim = 2
    elif setting in [oracle.DOM3D, oracle.STAB3S_2D]:
        dim = 3
    elif setting == oracle.STAB5S_3D:
        dim = 3

    rng = np.random.default_rng(seed)
    color_ids = _colors_for(rng, n, colors, dist)
    coords = _draw_coords(rng, n, dim, grid, colors, dist, color_ids)

    objects = []

    for row, color in zip(coords, color_ids):
        if setting == oracle.INTERVAL_STAB_1D:
            columns = sorted(row)
        elif setting == oracle.STAB3S_2D:
            columns = sorted(row[:2]) + [row[2]]
        elif setting == oracle.STAB5S_3D:
            half = max(1, grid // 8)
            ext = rng.integers(0, half, size=2)
            columns = [row[0], row[0] + ext[0], row[1], row[1] + ext[1], row[2]]
        else:
            columns = list(row)

        objects.append(make_object(setting, columns, int(color)))

    header = {
        "setting": setting,
        "n": n,
        "grid": grid,
        "seed": seed,
        "colors": colors,
        "dim": dim,
        "dist": dist,
    }

    return header, objects


def write_dataset(filename, header, objects):
    """
    Write a dataset as JSON lines, the header first.
    """

    setting = header["setting"]

    try:
        with open(filename, "w") as fd:
            fd.write(json.dumps(header, sort_keys=True) + "\n")

            for obj in objects:
                record = {
                    "setting": setting,
                    "color": int(oracle.color_of(obj)),
                    "coords": object_columns(setting, obj),
                }
                fd.write(json.dumps(record, sort_keys=True) + "\n")

    except OSError as e:
        raise DatasetIOError("Could not write {0}: {1}".format(filename, e))


def read_dataset(filename):
    """
    Read a JSON lines dataset.

    Returns
    -------
    header: dict
        The dataset metadata.
    objects: list
        The coloured objects.

    Raises
    ------
    DatasetIOError
        If the file cannot be read or parsed.
    """

    try:
        with open(filename, "r") as fd:
            lines = [line for line in fd.read().splitlines() if line.strip() != ""]
    except OSError as e:
        raise DatasetIOError("Could not read {0}: {1}".format(filename, e))

    if len(lines) == 0:
        raise DatasetIOError("The dataset has no header: {0}".format(filename))

    try:
        header = json.loads(lines[0])
        setting = header["setting"]
        records = [json.loads(line) for line in lines[1:]]
        objects = [make_object(setting, r["coords"], r["color"]) for r in records]
    except (ValueError, KeyError, TypeError) as e:
        raise DatasetIOError("The dataset is malformed: {0}: {1}".format(filename, e))

    return header, objects


def build_structure(name, setting, objects, eps, config=None, universe=None):
    """
    Build a registered structure for a dataset.

    The structures built by a reduction certify their samples over the
    universe if one is given, over all distinct queries otherwise.

    Raises
    ------
    SettingUnsupportedError
        If the structure does not handle the setting.
    """

    if name not in STRUCTURES:
        raise SettingUnsupportedError("Structure is unknown: {0}".format(name))

    settings, builder = STRUCTURES[name]

    if setting not in settings:
        raise SettingUnsupportedError(
            "Structure {0} does not handle {1}".format(name, setting)
        )

    res = builder(setting, objects, eps, config, universe)

    return res


def exact_counts(setting, objects, universe):
    """
    The true answers, distinct colours or objects for box stabbing.
    """

    if setting == oracle.STAB5S_3D:
        return oracle.standard_counts(setting, objects, universe)

    return oracle.colored_counts(setting, objects, universe)


def corrupt_answer(answer, eps):
    res = ApproxAnswer(answer.value * (1.0 + 2.0 * eps) + 1, answer.kind, answer.param)

    return res


def verify_structure(structure, setting, objects, universe, eps, corrupt=False):
    """
    Check every answer against the exact count.

    Returns
    -------
    report: dict
        The number of queries, the violations of the answer contract and
        of exact small counts, and the largest ratio error.
    """

    truth = exact_counts(setting, objects, universe)

    report = {
        "queries": len(universe),
        "contract_violations": 0,
        "small_k_violations": 0,
        "max_ratio_err": 0.0,
    }

    for q, k in tqdm(
        zip(universe.queries, truth), total=len(universe), desc="verify", disable=None
    ):
        k = int(k)
        answer = structure.query(q)

        if corrupt:
            answer = corrupt_answer(answer, eps)

        if not answer.holds(k):
            report["contract_violations"] += 1

        if k == 0 and answer.value != 0:
            report["small_k_violations"] += 1
        elif k == 1 and answer.kind != CAPPROX and answer.value != 1:
            report["small_k_violations"] += 1

        report["max_ratio_err"] = max(report["max_ratio_err"], answer.ratio_error(k))

    return report


def run_bench(name, setting, objects, universe, eps, config=None):
    """
    Build a structure once, answer every query and measure it.

    Returns
    -------
    row: dict
        One CSV row.
    """

    start = time.perf_counter()
    structure = build_structure(name, setting, objects, eps, config, universe)
    build_ms = 1.0e3 * (time.perf_counter() - start)

    truth = exact_counts(setting, objects, universe)

    start = time.perf_counter()
    answers = [structure.query(q) for q in universe.queries]
    elapsed = time.perf_counter() - start

    errors = [a.ratio_error(int(k)) for a, k in zip(answers, truth)]

    row = {
        "structure": name,
        "n": len(objects),
        "eps": eps,
        "build_ms": build_ms,
        "qps": len(answers) / elapsed if elapsed > 0 else float("inf"),
        "space_units": structure.space_units(),
        "max_ratio_err": max(errors) if len(errors) > 0 else 0.0,
    }

    return row


def linear(x, x0, slope, intercept):
    """
    A linear function.

    Parameters
    ----------
    x: ~np.array
        The running variable.
    x0: float
        The reference location.
    slope: float
        The slope of the line.
    intercept: float
        The y value at x0.

    Returns
    -------
    res: ~np.array
        The model data.
    """

    res = slope * (x - x0) + intercept

    return res


def fit_space(df):
    """
    Fit space_units = A n^slope in log-log space.

    Returns
    -------
    fitresult: lmfit.model.ModelResult
        The fit result.

    Raises
    ------
    BadParamsError
        If fewer than two distinct positive sizes are available.
    """

    df = df[(df["n"] > 0) & (df["space_units"] > 0)]
    df = df.groupby("n", as_index=False)["space_units"].mean()

    if len(df.index) < 2:
        raise BadParamsError("The fit needs at least two dataset sizes.")

    log_x = np.log10(df["n"].to_numpy(dtype=float))
    log_y = np.log10(df["space_units"].to_numpy(dtype=float))

    model = Model(linear)

    model.set_param_hint("x0", value=np.mean(log_x), vary=False)
    model.set_param_hint("slope", value=1.0)
    model.set_param_hint("intercept", value=np.mean(log_y))

    fitparams = model.make_params()

    fitresult = model.fit(data=log_y, x=log_x, params=fitparams, method="leastsq")

    if not fitresult.success:
        raise RuntimeError("Fit did not converge.")

    return fitresult


def _universe(header, objects, args):
    res = oracle.enumerate_queries(
        header["setting"],
        objects,
        max_queries=args.max_queries,
        seed=args.seed,
        dim=header.get("dim"),
    )

    if not res.complete:
        log.warning(
            "Using a seeded subset of {0} queries, the universe is incomplete".format(
                len(res)
            )
        )

    return res


def run_gen(args):
    header, objects = generate_dataset(
        args.setting,
        args.n,
        args.colors,
        dist=args.dist,
        seed=args.seed,
        grid=args.grid,
        dim=args.dim,
    )

    write_dataset(args.out, header, objects)

    print("Wrote {0} objects to {1}".format(len(objects), args.out))

    return 0


def run_verify(args, config):
    header, objects = read_dataset(args.datasets[0])
    setting = header["setting"]
    universe = _universe(header, objects, args)

    print(
        "Verifying {0} on {1}: n={2}, eps={3}, queries={4}".format(
            args.structure, setting, len(objects), args.eps, len(universe)
        )
    )

    structure = build_structure(
        args.structure, setting, objects, args.eps, config, universe
    )
    report = verify_structure(
        structure, setting, objects, universe, args.eps, corrupt=args.corrupt
    )

    failed = False

    for label, key in [
        ("contract", "contract_violations"),
        ("exact_small_k", "small_k_violations"),
    ]:
        status = "pass" if report[key] == 0 else "FAIL"
        failed = failed or report[key] > 0
        print(
            "{0}: {1} ({2} violations in {3} queries)".format(
                label, status, report[key], report["queries"]
            )
        )

    print("max_ratio_err: {0:.6f}".format(report["max_ratio_err"]))

    if universe.complete:
        print("universe: complete ({0} queries)".format(len(universe)))
    else:
        print("universe: incomplete (seeded subset of {0} queries)".format(len(universe)))

    if failed:
        return 1

    return 0


def run_bench_command(args, config):
    rows = []

    for filename in args.datasets:
        header, objects = read_dataset(filename)
        universe = _universe(header, objects, args)

        for _ in range(args.repetitions):
            rows.append(
                run_bench(
                    args.structure, header["setting"], objects, universe, args.eps, config
                )
            )

    df = pd.DataFrame(rows, columns=CSV_COLUMNS)

    if args.out is None:
        print(df.to_csv(index=False), end="")
    else:
        try:
            df.to_csv(args.out, index=False)
        except OSError as e:
            raise DatasetIOError("Could not write {0}: {1}".format(args.out, e))

        print("Wrote {0} rows to {1}".format(len(df.index), args.out))

    if args.fit:
        fitresult = fit_space(df)
        print(fitresult.fit_report())
        print(
            "Space exponent: {0:.3f} +- {1:.3f}".format(
                fitresult.best_values["slope"], fitresult.params["slope"].stderr or 0.0
            )
        )

    return 0


#
# MAIN
#


def main(argv=None):
    args = parse_args(argv)

    # sanity check command line arguments
    check_args(args)

    if args.verbose:
        logging.basicConfig(level=logging.INFO)

    try:
        config = get_default_config()

        if args.command == "gen":
            status = run_gen(args)
        else:
            config = config.copy(seed=args.seed)

            if args.command == "verify":
                status = run_verify(args, config)
            else:
                status = run_bench_command(args, config)

    except SuitabilityError as e:
        print("{0} (attempts={1})".format(e, e.attempts))
        sys.exit(1)
    except ColorCountError as e:
        print(e)
        sys.exit(1)

    if status != 0:
        sys.exit(status)


if __name__ == "__main__":
    main()
