import functools
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

import typer

from dqgkit import (
    Corep,
    Report,
    StructuralError,
    SpecDocument,
    assembly_class,
    corep_validate,
    emit_spec,
    homotopy_check,
    load_spec,
    logger,
    verify_bialgebra,
    verify_dual,
    verify_haar,
    verify_module,
)
from dqgkit.builders import (
    CYCLE_KINDS,
    build_commutative,
    build_group_dual,
    build_suq2_window,
    load_group,
)
from dqgkit.core import Window
from dqgkit.dual import GNS_CONVENTION
from dqgkit.formats import parse_element
from dqgkit.report import REPORT_VERSION
from settings import DEV_MODE, DQG_FORMAT, DQG_SAMPLES, DQG_SEED, DQG_TOL, DQG_WINDOW_GROW

app = typer.Typer(
    help="Verification kernel for discrete quantum groups given by block data.",
    no_args_is_help=True,
    add_completion=False,
)
build_app = typer.Typer(help="Build example spec documents.", no_args_is_help=True)
app.add_typer(build_app, name="build")


@dataclass
class Options:
    tol: float
    samples: int
    seed: int
    window_grow: int
    fmt: str


@app.callback()
def main(
    ctx: typer.Context,
    tol: float = typer.Option(DQG_TOL, "--tol", help="Residual tolerance."),
    samples: int = typer.Option(DQG_SAMPLES, "--samples", help="Certified samples per check."),
    seed: int = typer.Option(DQG_SEED, "--seed", envvar="DQG_SEED", help="Sampling seed."),
    window_grow: int = typer.Option(
        DQG_WINDOW_GROW, "--window-grow", help="Grow the sampling window by N fusion layers."
    ),
    fmt: str = typer.Option(DQG_FORMAT, "--format", help="text or machine."),
):
    if fmt not in ("text", "machine"):
        raise typer.BadParameter("expected 'text' or 'machine'", param_hint="--format")
    if fmt == "machine":
        logger.disabled = True
    ctx.obj = Options(tol, samples, seed, window_grow, fmt)


def structural_exit(func: Callable) -> Callable:
    """Maps structural and window errors to exit code 2."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except StructuralError as e:
            if DEV_MODE:
                logger.print_exception()
            typer.echo(f"error: {e}", err=True)
            raise typer.Exit(2)

    return wrapper


def open_spec(path: Path, opts: Options) -> SpecDocument:
    doc = load_spec(path)
    if opts.window_grow > 0:
        doc.spec.window = Window.of(doc.spec).grow(doc.spec, opts.window_grow).J
    return doc


def finish(report: Report, doc: SpecDocument, opts: Options):
    report.header.update(
        {
            "version": REPORT_VERSION,
            "seed": opts.seed,
            "tol": opts.tol,
            "samples": opts.samples,
            "spec": doc.name,
            "gns": GNS_CONVENTION,
        }
    )
    if opts.fmt == "machine":
        typer.echo(report.to_lines(), nl=False)
    else:
        logger.print(report.to_table())
        for check in report.failed:
            logger.print(f"[red]failed[/red] {check.name}: {check.residual:.3e} > {check.tol:.1e}")
    raise typer.Exit(0 if report.passed else 1)


def require_cycle(doc: SpecDocument):
    if doc.coaction is None or doc.cycle is None:
        raise StructuralError(f"{doc.name!r} carries no coaction and cycle")
    if doc.coaction.h is None:
        raise StructuralError("coaction has no cutoff element")


SpecArg = typer.Argument(..., exists=True, dir_okay=False, readable=True, help="Spec document.")


@app.command()
@structural_exit
def validate(ctx: typer.Context, spec: Path = SpecArg):
    """Bialgebra axioms, antipode and Galois bijectivity."""
    opts: Options = ctx.obj
    doc = open_spec(spec, opts)
    finish(verify_bialgebra(doc.spec, opts.samples, opts.tol, opts.seed), doc, opts)


@app.command()
@structural_exit
def haar(ctx: typer.Context, spec: Path = SpecArg):
    """Invariance and modular properties of the Haar functionals."""
    opts: Options = ctx.obj
    doc = open_spec(spec, opts)
    finish(verify_haar(doc.spec, doc.haar, opts.samples, opts.tol, opts.seed), doc, opts)


@app.command()
@structural_exit
def dual(ctx: typer.Context, spec: Path = SpecArg):
    """The dual convolution algebra and its GNS space."""
    opts: Options = ctx.obj
    doc = open_spec(spec, opts)
    finish(verify_dual(doc.spec, doc.haar, opts.samples, opts.tol, opts.seed), doc, opts)


@app.command()
@structural_exit
def module(ctx: typer.Context, spec: Path = SpecArg):
    """The module structure of the document's corepresentation (trivial if none)."""
    opts: Options = ctx.obj
    doc = open_spec(spec, opts)
    if doc.cycle is None:
        corep = Corep.trivial(doc.spec, 1)
        pi_h, certs = None, None
    else:
        require_cycle(doc)
        corep = doc.cycle.corep
        pi_h = doc.cycle.pi_of(doc.coaction.h)
        certs = [doc.cycle.pi_of(c) for c in doc.coaction.basis()]
    report = corep_validate(doc.spec, corep, opts.samples, opts.tol, opts.seed)
    report.merge(verify_module(doc.spec, doc.haar, corep, pi_h, certs, opts.samples, opts.tol, opts.seed))
    finish(report, doc, opts)


@app.command()
@structural_exit
def assemble(ctx: typer.Context, spec: Path = SpecArg):
    """Averaged operator, module data and compactness witnesses of the cycle."""
    opts: Options = ctx.obj
    doc = open_spec(spec, opts)
    require_cycle(doc)
    rep = assembly_class(
        doc.cycle, doc.coaction, doc.haar, None, opts.tol, max(1, opts.samples // 2), opts.seed
    )
    finish(rep.report, doc, opts)


@app.command()
@structural_exit
def homotopy(
    ctx: typer.Context,
    spec: Path = SpecArg,
    h2: Path = typer.Option(..., "--h2", exists=True, dir_okay=False, help="Second cutoff element."),
    steps: int = typer.Option(5, "--steps", help="Interior points of the path."),
):
    """Joins the averaged operators of two cutoffs by a witnessed path."""
    opts: Options = ctx.obj
    doc = open_spec(spec, opts)
    require_cycle(doc)
    other = parse_element(h2.read_bytes(), doc.coaction.cdims)
    report = homotopy_check(
        doc.cycle, doc.coaction, doc.haar, doc.coaction.h, other, steps, opts.tol, max(1, opts.samples // 2), opts.seed
    )
    finish(report, doc, opts)


def write_doc(doc: SpecDocument, output: Optional[Path]):
    data = emit_spec(doc)
    if output is None:
        typer.echo(data.decode("utf-8"), nl=False)
    else:
        output.write_bytes(data)
        logger.log(f"wrote {doc.name} to {output}")


def check_cycle(cycle: Optional[str]):
    if cycle is not None and cycle not in CYCLE_KINDS:
        raise typer.BadParameter(f"expected one of {', '.join(CYCLE_KINDS)}", param_hint="--cycle")


@build_app.command("commutative")
@structural_exit
def build_commutative_cmd(
    ctx: typer.Context,
    group: str = typer.Argument(..., help="Z2, Z3, Z5, Z6, S3 or a JSON table file."),
    cycle: Optional[str] = typer.Option(None, "--cycle", help="point, trivial or regular."),
    output: Optional[Path] = typer.Option(None, "--output", "-o", help="Write here instead of stdout."),
):
    """Functions on a finite group."""
    check_cycle(cycle)
    write_doc(build_commutative(load_group(group), cycle, ctx.obj.seed), output)


@build_app.command("group-dual")
@structural_exit
def build_group_dual_cmd(
    ctx: typer.Context,
    group: str = typer.Argument(..., help="Z2, Z3, Z5, Z6, S3 or a JSON table file."),
    cycle: Optional[str] = typer.Option(None, "--cycle", help="point, trivial or regular."),
    output: Optional[Path] = typer.Option(None, "--output", "-o", help="Write here instead of stdout."),
):
    """The dual of a finite group, blocks indexed by irreps."""
    check_cycle(cycle)
    write_doc(build_group_dual(load_group(group), cycle, ctx.obj.seed), output)


@build_app.command("suq2")
@structural_exit
def build_suq2_cmd(
    q: float = typer.Option(1.5, "--q", help="Deformation parameter, positive and not 1."),
    L: float = typer.Option(1.0, "--L", help="Largest spin."),
    output: Optional[Path] = typer.Option(None, "--output", "-o", help="Write here instead of stdout."),
):
    """A finite window of the dual of SU_q(2)."""
    write_doc(build_suq2_window(q, L), output)


if __name__ == "__main__":
    app()
