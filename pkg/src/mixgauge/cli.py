"""Command-line front end.

Exit status: 0 on success, 2 for bad input (malformed JSON, failed
preconditions, depth over the limit), 3 for I/O failures.
"""
from __future__ import annotations

import json
import os
import sys
import tempfile

import click
import numpy as np

from . import __version__
from .analysis import (
    COMPARABILITY_IDS,
    comparability_sweep,
    minkowski_perimeter,
    scaling_check,
    standard_suite,
)
from .covering import WhitneyDecomposition, whitney_decompose
from .dyadic import CONVENTIONS, MAX_DEPTH, CoverResult, RootFrame, measure
from .errors import MixGaugeError
from .gauge import GaugeParams
from .geometry import shape_from_json
from .render import render_cover

DEFAULTS = {
    "lambda": "1",
    "depth": 12,
    "t": 2.0,
    "epsilon": 0.01,
    "diam_convention": "diameter",
    "seed": 0,
    "min_level": 0,
}


class InputError(MixGaugeError, ValueError):
    """Malformed user input (files, flags, grid specs)."""


# -- helpers --------------------------------------------------------------------

def parse_lambda(spec) -> list:
    """``"1"``, ``"0.1,1,10"`` or a grid ``"a:b:N[log|lin]"`` (also ``a:b:N:log``)."""
    if isinstance(spec, (int, float)):
        return [float(spec)]
    if isinstance(spec, (list, tuple)):
        return [float(v) for v in spec]
    text = str(spec).strip()
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) == 4:
                a, b, steps, mode = parts
            elif len(parts) == 3:
                a, b, steps = parts
                mode = "lin"
                for m in ("log", "lin"):
                    if steps.endswith(m):
                        steps, mode = steps[: -len(m)], m
            else:
                raise ValueError
            a, b, steps = float(a), float(b), int(steps)
            if steps < 1 or mode not in ("log", "lin"):
                raise ValueError
            if steps == 1:
                return [a]
            if mode == "log":
                if a <= 0 or b <= 0:
                    raise InputError("log grid needs positive endpoints")
                grid = np.geomspace(a, b, steps)
            else:
                grid = np.linspace(a, b, steps)
            return [float(v) for v in grid]
        return [float(v) for v in text.split(",")]
    except InputError:
        raise
    except ValueError:
        raise InputError(f"malformed lambda spec {spec!r}; use a value, a list or a:b:N(log|lin)") from None


def _load_json(path: str):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def load_shape(spec: str):
    """A shape file, or ``suite:NAME`` for one of the built-in shapes."""
    if spec.startswith("suite:"):
        suite = standard_suite()
        name = spec[len("suite:"):]
        if name not in suite:
            raise InputError(f"unknown suite shape {name!r}; choose from {', '.join(suite)}")
        return suite[name]
    obj = _load_json(spec)
    try:
        return shape_from_json(obj)
    except MixGaugeError as exc:
        raise InputError(f"{spec}: {exc}") from None
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{spec}: malformed shape ({exc})") from None


def write_atomic(path: str, text: str):
    """Write via a temp file in the target directory and rename over it."""
    target = os.path.abspath(path)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(target), prefix=".tmp-", suffix=os.path.basename(target))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=True) + "\n"


def _threads(value) -> int:
    if value is None:
        value = os.environ.get("MIXGAUGE_THREADS", 1)
    try:
        n = int(value)
    except ValueError:
        raise InputError(f"bad thread count {value!r}") from None
    if n < 1:
        raise InputError("thread count must be at least 1")
    return n


def _parse_root(text):
    if text is None:
        return None
    try:
        vals = [float(v) for v in str(text).split(",")]
    except ValueError:
        raise InputError(f"malformed root {text!r}; use ox,oy,side") from None
    if len(vals) < 2:
        raise InputError("root needs an origin and a side")
    return RootFrame(tuple(vals[:-1]), vals[-1])


class Settings:
    """Resolves each option as flag > config file > default."""

    def __init__(self, config_path, **flags):
        self.config = {}
        if config_path:
            cfg = _load_json(config_path)
            if not isinstance(cfg, dict):
                raise InputError(f"{config_path}: config must be a JSON object")
            self.config = {k.replace("-", "_"): v for k, v in cfg.items()}
        self.flags = flags

    def get(self, key):
        v = self.flags.get(key)
        if v is None:
            v = self.config.get(key)
        if v is None:
            v = DEFAULTS.get(key)
        return v

    def depth(self, key="depth"):
        d = self.get(key)
        if isinstance(d, bool) or int(d) != d or d < 0:
            raise InputError(f"depth must be a nonnegative integer, got {d!r}")
        if d > MAX_DEPTH:
            raise InputError(f"depth {d} exceeds the limit {MAX_DEPTH}")
        return int(d)

    def require(self, key):
        v = self.get(key)
        if v is None:
            raise InputError(f"--{key.replace('_', '-')} is required")
        return v


def _metadata(command, settings):
    return {"command": command, "seed": int(settings.get("seed")), "version": __version__}


def _emit(settings, text):
    out = settings.get("out")
    if out:
        write_atomic(out, text)
    else:
        click.echo(text, nl=False)


def common(*names):
    """Attach the shared options named in ``names`` to a command."""
    opts = {
        "shape": click.option("--shape", "shape", help="Shape JSON file or suite:NAME."),
        "lambda": click.option("--lambda", "lam", help="Value, comma list or grid a:b:N(log|lin)."),
        "depth": click.option("--depth", type=int, help=f"Maximum dyadic depth (<= {MAX_DEPTH})."),
        "t": click.option("--t", "t", type=float, help="Scale factor (power of two)."),
        "epsilon": click.option("--epsilon", type=float, help="Tube radius."),
        "diam_convention": click.option("--diam-convention", type=click.Choice(CONVENTIONS)),
        "root": click.option("--root", help="Root frame as ox,oy,side (default: fitted to the shape)."),
    }

    def deco(fn):
        fn = click.option("--config", "config", help="JSON file of option defaults.")(fn)
        fn = click.option("--seed", type=int, help="Seed for any random sampling (default 0).")(fn)
        fn = click.option("--threads", type=int, help="Worker threads (env MIXGAUGE_THREADS).")(fn)
        fn = click.option("--out", help="Output path (default: stdout).")(fn)
        for name in reversed(names):
            fn = opts[name](fn)
        return fn

    return deco


def _settings(config, lam=None, **kw):
    return Settings(config, **{"lambda": lam}, **kw)


# -- commands ---------------------------------------------------------------------

@click.group()
@click.version_option(__version__, prog_name="mixgauge")
def cli():
    """Dyadic estimates of the mixed volume/perimeter gauge measure."""


@cli.command("measure")
@common("shape", "lambda", "depth", "diam_convention", "root")
def measure_cmd(**kw):
    """Optimal dyadic cover cost of a shape."""
    s = _settings(**kw)
    shape = load_shape(s.require("shape"))
    depth = s.depth()
    root = _parse_root(s.get("root"))
    threads = _threads(s.get("threads"))
    results = []
    for lam in parse_lambda(s.get("lambda")):
        r = measure(shape, GaugeParams(shape.dim, lam), depth, root=root,
                    diam_convention=s.get("diam_convention"), threads=threads)
        results.append(r)
    meta = _metadata("measure", s)
    if len(results) == 1:
        obj = results[0].to_json()
        obj["metadata"] = meta
    else:
        obj = {"results": [r.to_json() for r in results], "metadata": meta}
    summary = "\n".join(f"lambda={r.params.lam!r} total={r.total!r} cells={len(r.cells)}" for r in results)
    if s.get("out"):
        write_atomic(s.get("out"), _dump(obj))
        click.echo(summary)
    else:
        click.echo(_dump(obj), nl=False)


@cli.command("whitney")
@common("shape", "depth", "root")
@click.option("--min-level", type=int, help="Coarsest level at which cubes may be accepted.")
def whitney_cmd(**kw):
    """Whitney decomposition of a planar shape; --depth is the finest level."""
    s = _settings(**kw)
    shape = load_shape(s.require("shape"))
    dec = whitney_decompose(shape, min_level=int(s.get("min_level")), max_level=s.depth(),
                            root=_parse_root(s.get("root")))
    obj = dec.to_json()
    obj["metadata"] = _metadata("whitney", s)
    _emit(s, _dump(obj))
    if s.get("out"):
        click.echo(f"cubes={len(dec.cubes)} coverage_defect={dec.coverage_defect!r} "
                   f"dist_ratio=[{dec.dist_ratio_min!r}, {dec.dist_ratio_max!r}]")


@cli.command("scale-check")
@common("shape", "lambda", "depth", "t", "diam_convention", "root")
def scale_check_cmd(**kw):
    """Residual of the power-of-two scaling identity on the estimator."""
    s = _settings(**kw)
    if kw.get("depth") is None and "depth" not in s.config:
        s.flags["depth"] = 10
    shape = load_shape(s.require("shape"))
    t = float(s.get("t"))
    rows = []
    for lam in parse_lambda(s.get("lambda")):
        res = scaling_check(shape, GaugeParams(shape.dim, lam), t, s.depth(), root=_parse_root(s.get("root")),
                            diam_convention=s.get("diam_convention"), threads=_threads(s.get("threads")))
        rows.append({"lambda": lam, "t": t, "depth": s.depth(), "residual": res})
        click.echo(f"residual={res!r}")
    if s.get("out"):
        write_atomic(s.get("out"), _dump({"rows": rows, "metadata": _metadata("scale-check", s)}))


@cli.command("sweep")
@click.option("--shape", "shapes", multiple=True, help="Shape file or suite:NAME; repeatable. Default: standard suite.")
@common("lambda", "depth", "diam_convention")
def sweep_cmd(shapes, **kw):
    """Comparability ratios mu_hat / (area + lambda * perimeter) as CSV (or JSON for .json)."""
    s = _settings(**kw)
    if not shapes:
        shapes = s.config.get("shape") or [f"suite:{k}" for k in COMPARABILITY_IDS]
        if isinstance(shapes, str):
            shapes = [shapes]
    named = []
    for spec in shapes:
        sid = spec[len("suite:"):] if spec.startswith("suite:") else os.path.splitext(os.path.basename(spec))[0]
        named.append((sid, load_shape(spec)))
    if kw.get("lam") is None and "lambda" not in s.config:
        s.flags["lambda"] = "0.01,0.1,1,10"
    report = comparability_sweep(named, parse_lambda(s.get("lambda")), s.depth(),
                                 diam_convention=s.get("diam_convention"), threads=_threads(s.get("threads")))
    out = s.get("out")
    if out and out.endswith(".json"):
        obj = report.to_json()
        obj["metadata"] = _metadata("sweep", s)
        write_atomic(out, _dump(obj))
    else:
        _emit(s, report.to_csv())
    if out:
        click.echo(f"rows={len(report.rows)} ratio_min={report.ratio_min!r} ratio_max={report.ratio_max!r}")


@cli.command("minkowski")
@common("shape", "epsilon")
def minkowski_cmd(**kw):
    """Perimeter estimate from the area of a thin tube around the boundary."""
    s = _settings(**kw)
    shape = load_shape(s.require("shape"))
    eps = float(s.get("epsilon"))
    p = minkowski_perimeter(shape, eps)
    click.echo(f"perimeter={p!r}")
    if s.get("out"):
        write_atomic(s.get("out"), _dump({"epsilon": eps, "perimeter": p, "metadata": _metadata("minkowski", s)}))


@cli.command("render")
@click.option("--cover", "cover", help="CoverResult or Whitney JSON file.")
@click.option("--shape", "shape", help="Shape to outline when the cover file carries none.")
@common()
def render_cmd(cover, shape, **kw):
    """SVG picture of a cover or Whitney decomposition."""
    s = _settings(**kw)
    cover = cover or s.config.get("cover")
    if not cover:
        raise InputError("--cover is required")
    obj = _load_json(cover)
    try:
        if "dist_ratio_min" in obj:
            result = WhitneyDecomposition.from_json(obj)
        else:
            result = CoverResult.from_json(obj)
    except MixGaugeError as exc:
        raise InputError(f"{cover}: {exc}") from None
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise InputError(f"{cover}: not a cover file ({exc})") from None
    outline = load_shape(shape) if shape else None
    _emit(s, render_cover(result, shape=outline))


def main(argv=None) -> int:
    try:
        rv = cli.main(args=argv, prog_name="mixgauge", standalone_mode=False)
        return rv if isinstance(rv, int) else 0
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 2
    except (MixGaugeError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except OSError as exc:
        click.echo(f"I/O error: {exc}", err=True)
        return 3


if __name__ == "__main__":
    sys.exit(main())
