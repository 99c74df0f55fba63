"""CLI"""

import json
import logging
import sys
from collections import namedtuple
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import click

from .adiabatic import (
    EVOLVE_LIMIT,
    AnnealSchedule,
    evolve,
    gap_series,
    measure,
    success_series,
)
from .embed import (
    bounded_chain_strength,
    build_chimera,
    embed_grouped,
    embed_heuristic,
    embedding_json,
    set_parameters,
    unembed_sampleset,
)
from .encoders import (
    asymptotic_qubits,
    block_system_json,
    encode,
    estimate_qubits,
    length_candidates,
    preset,
)
from .golden import check_golden
from .ising import dumps, to_ising
from .ising import to_text as coupler_list
from .pbp import to_text
from .quadratize import ledger_json, quadratize
from .solve import (
    DEFAULT_SAMPLES,
    DEFAULT_SWEEPS,
    EXACT_LIMIT,
    histogram_csv,
    histogram_json,
    make_histogram,
    sample_exact,
    sample_sa,
    sampleset_json,
    solve_exact,
)
from .util import (
    DIRECT,
    LOGGER_NAME,
    METHODS,
    TABLE,
    InvalidEmbedding,
    LengthTooSmall,
    NoEmbeddingFound,
    NonUnitaryDrift,
    ReductionBroken,
    TooLarge,
    __app_name__,
    __version__,
    check_odd,
)

logger = logging.getLogger(LOGGER_NAME)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NO_EMBEDDING = 3
EXIT_NO_FACTORS = 4
EXIT_INTERNAL = 5

SOLVERS = ["auto", "exact", "sa", "adiabatic", "none"]
EMBEDDINGS = ["none", "grouped", "heuristic"]
ARTIFACTS = ["qubo", "ising", "blocks", "embedding", "histogram"]
DEFAULT_CHIMERA = "16,16,4"
DEFAULT_ANNEAL_TIME = 100.0
BOUNDED = "bounded"

RunConfig = namedtuple(
    "RunConfig",
    [
        "n",
        "method",
        "l1",
        "l2",
        "block_widths",
        "carry_bits",
        "fixed_leading",
        "solver",
        "embed",
        "chimera",
        "chain_strength",
        "samples",
        "sweeps",
        "seed",
        "threads",
        "anneal_time",
        "emit",
    ],
    defaults=[
        TABLE,
        None,
        None,
        None,
        None,
        False,
        "auto",
        "none",
        (16, 16, 4),
        None,
        DEFAULT_SAMPLES,
        DEFAULT_SWEEPS,
        None,
        1,
        DEFAULT_ANNEAL_TIME,
        (),
    ],
)

Compiled = namedtuple("Compiled", ["cf", "reduced", "ledger", "model"])

RunResult = namedtuple(
    "RunResult", ["status", "qubits", "physical_qubits", "factors", "artifacts"]
)


def compile_instance(config: RunConfig, l1: int, l2: int) -> Compiled:
    """encode, quadratize and convert to spins"""
    cf = encode(
        config.n,
        config.method,
        l1,
        l2,
        block_widths=config.block_widths,
        fixed_leading=config.fixed_leading,
        carry_bits=config.carry_bits,
    )
    reduced, ledger = quadratize(cf)
    return Compiled(cf, reduced, ledger, to_ising(reduced))


def layouts(config: RunConfig) -> List[RunConfig]:
    """the given lengths, the preset layout, or the factor-length search order"""
    if config.l1 is not None and config.l2 is not None:
        return [config]
    known = preset(config.n)
    if known and config.method == TABLE:
        return [
            config._replace(
                l1=known["l1"],
                l2=known["l2"],
                block_widths=config.block_widths or known["widths"],
                carry_bits=config.carry_bits or known.get("carry_bits"),
            )
        ]
    return [config._replace(l1=a, l2=b) for a, b in length_candidates(config.n)]


def _chain_strength(config: RunConfig, model):
    if config.chain_strength == BOUNDED:
        return bounded_chain_strength(model)
    return config.chain_strength


def _embed(config: RunConfig, model):
    hw = build_chimera(*config.chimera)
    try:
        if config.embed == "grouped":
            emb = embed_grouped(model, hw)
        else:
            emb = embed_heuristic(model, hw, seed=config.seed)
    except TooLarge as error:
        raise NoEmbeddingFound(str(error)) from error
    physical = set_parameters(model, emb, hw, _chain_strength(config, model))
    return emb, physical


def _sample(config: RunConfig, model):
    solver = config.solver
    if solver == "auto":
        solver = "exact" if model.n_spins <= EXACT_LIMIT else "sa"
    logger.debug(f"solving {model.n_spins} spins with {solver}")
    if solver == "exact":
        return sample_exact(model)
    if solver == "sa":
        return sample_sa(
            model,
            sweeps=config.sweeps,
            samples=config.samples,
            seed=config.seed,
            threads=config.threads,
        )
    if model.n_spins > EVOLVE_LIMIT:
        raise TooLarge(
            f"{model.n_spins} spins exceed the state-vector limit {EVOLVE_LIMIT}"
        )
    psi, success = evolve(model, AnnealSchedule(config.anneal_time))
    logger.debug(f"adiabatic success probability {success:.6f}")
    return measure(model, psi, config.samples, seed=config.seed)


def _artifacts(config: RunConfig, compiled: Compiled, emb, physical, ss, entries):
    emit = set(ARTIFACTS) if "all" in config.emit else set(config.emit)
    out: Dict[str, str] = {}
    reduced = compiled.reduced
    if "qubo" in emit:
        out["qubo.json"] = json.dumps(
            {
                "variables": reduced.registry.to_json(),
                "polynomial": to_text(reduced.polynomial).splitlines(),
                "ledger": ledger_json(compiled.ledger, reduced.registry),
            },
            indent=2,
        )
    if "ising" in emit:
        out["ising.json"] = dumps(compiled.model)
        out["ising.txt"] = coupler_list(compiled.model)
    if "blocks" in emit and compiled.cf.method == TABLE:
        out["blocks.json"] = json.dumps(block_system_json(compiled.cf.blocks), indent=2)
    if "embedding" in emit and emb is not None:
        out["embedding.json"] = json.dumps(embedding_json(emb), indent=2)
        out["physical.json"] = dumps(physical)
    if "histogram" in emit and entries is not None:
        out["histogram.csv"] = histogram_csv(entries)
        out["histogram.json"] = histogram_json(entries)
        out["samples.json"] = sampleset_json(ss)
    return out


def run_pipeline(config: RunConfig) -> RunResult:
    """encode, quadratize, (embed), solve and decode over the candidate layouts"""
    check_odd(config.n)
    result = None
    for attempt in layouts(config):
        try:
            compiled = compile_instance(attempt, attempt.l1, attempt.l2)
        except LengthTooSmall as error:
            logger.debug(f"skipping l1={attempt.l1} l2={attempt.l2}: {error}")
            continue
        logger.debug(
            f"layout l1={attempt.l1} l2={attempt.l2}: {compiled.model.n_spins} spins"
        )
        emb = physical = None
        if attempt.embed != "none":
            emb, physical = _embed(attempt, compiled.model)

        ss = entries = None
        factors: List[Tuple[int, int]] = []
        if attempt.solver != "none":
            if physical is None:
                ss = _sample(attempt, compiled.model)
            else:
                ss, _ = unembed_sampleset(
                    _sample(attempt, physical), emb, compiled.model
                )
            entries = make_histogram(ss, compiled.reduced.registry, compiled.reduced)
            factors = [(e.p, e.q) for e in entries if e.label != "invalid"]
            factors = list(dict.fromkeys(factors))

        found = attempt.solver == "none" or bool(factors)
        result = RunResult(
            EXIT_OK if found else EXIT_NO_FACTORS,
            compiled.model.n_spins,
            None if physical is None else physical.n_spins,
            factors,
            _artifacts(attempt, compiled, emb, physical, ss, entries),
        )
        if found:
            return result
    if result is None:
        raise LengthTooSmall(f"No factor lengths fit {config.n}")
    return result


def _csv_ints(text: Optional[str], name: str) -> Optional[Tuple[int, ...]]:
    if not text:
        return None
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError:
        raise click.BadParameter("Expected comma-separated integers.", param_hint=name)


def _csv_floats(text: str, name: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise click.BadParameter("Expected comma-separated numbers.", param_hint=name)


def _chain_option(text: Optional[str]):
    if text is None or text == BOUNDED:
        return text
    try:
        value = float(text)
    except ValueError:
        raise click.BadParameter(
            f"Expected a number or '{BOUNDED}'.", param_hint="--chain-strength"
        )
    if value <= 0:
        raise click.BadParameter("Must be positive.", param_hint="--chain-strength")
    return value


def write_artifacts(artifacts: Dict[str, str], output: Optional[str]):
    if output is None:
        for text in artifacts.values():
            click.echo(text.rstrip("\n"))
        return
    folder = Path(output)
    folder.mkdir(parents=True, exist_ok=True)
    for name, text in artifacts.items():
        (folder / name).write_text(text if text.endswith("\n") else text + "\n")


def _report_golden():
    results = check_golden()
    for name, passed in results:
        if passed:
            click.echo(f"PASS {name}")
        else:
            click.secho(f"FAIL {name}", fg="red", err=True)
    sys.exit(EXIT_OK if all(p for _, p in results) else EXIT_INTERNAL)


def length_options(f):
    f = click.option("--l2", type=click.IntRange(min=2), help="Bits of q.")(f)
    f = click.option("--l1", type=click.IntRange(min=2), help="Bits of p.")(f)
    f = click.option(
        "-m",
        "--method",
        type=click.Choice(METHODS),
        default=TABLE,
        help="Cost function encoding.",
    )(f)
    return f


@click.command(name="run", help="Factor N: encode, reduce, embed, solve and decode.")
@click.option("-n", "--number", type=int, help="Odd composite to factor.")
@length_options
@click.option("-w", "--widths", help="Block widths, e.g. 2,2,3 (table method).")
@click.option("--carry-bits", help="Carry widths per block, e.g. 2,3,4,3,2.")
@click.option(
    "--fixed-leading/--free-leading",
    default=False,
    help="Fix the leading factor bits to 1 (direct method).",
)
@click.option(
    "-s", "--solver", type=click.Choice(SOLVERS), default="auto", help="Ising solver."
)
@click.option(
    "-e",
    "--embed",
    type=click.Choice(EMBEDDINGS),
    default="none",
    help="Minor embedding onto a Chimera graph before solving.",
)
@click.option("--chimera", default=DEFAULT_CHIMERA, help="Chimera rows,cols,shore.")
@click.option(
    "--chain-strength", help=f"Ferromagnetic chain coupling, or '{BOUNDED}'."
)
@click.option("--samples", type=click.IntRange(min=1), default=DEFAULT_SAMPLES)
@click.option("--sweeps", type=click.IntRange(min=0), default=DEFAULT_SWEEPS)
@click.option("--seed", type=click.IntRange(min=0), help="Sampler seed.")
@click.option("--threads", type=click.IntRange(min=1), default=1)
@click.option(
    "--anneal-time",
    type=click.FloatRange(min=0),
    default=DEFAULT_ANNEAL_TIME,
    help="Total time T of the adiabatic solver.",
)
@click.option(
    "--emit",
    type=click.Choice(ARTIFACTS + ["all"]),
    multiple=True,
    help="Artifacts to write. Repeatable.",
)
@click.option(
    "-o",
    "--output",
    type=click.Path(file_okay=False),
    help="Directory for artifacts (default: stdout).",
)
@click.option("--golden", is_flag=True, help="Check the built-in reference tables.")
def run(
    number,
    method,
    l1,
    l2,
    widths,
    carry_bits,
    fixed_leading,
    solver,
    embed,
    chimera,
    chain_strength,
    samples,
    sweeps,
    seed,
    threads,
    anneal_time,
    emit,
    output,
    golden,
):
    if golden:
        _report_golden()
    if number is None:
        raise click.BadParameter("Required unless --golden.", param_hint="--number")
    if (l1 is None) != (l2 is None):
        raise click.BadOptionUsage(
            option_name="--l1", message="Give both --l1 and --l2, or neither."
        )
    if method == DIRECT and (widths or carry_bits):
        raise click.BadOptionUsage(
            option_name="--widths", message="Block widths require `--method table`."
        )
    if "blocks" in emit and method != TABLE:
        click.secho(
            "Warning: `--emit blocks` has no effect with `--method direct`.",
            fg="yellow",
            err=True,
        )
    dims = _csv_ints(chimera, "--chimera")
    if dims is None or len(dims) != 3:
        raise click.BadParameter("Expected rows,cols,shore.", param_hint="--chimera")

    config = RunConfig(
        n=number,
        method=method,
        l1=l1,
        l2=l2,
        block_widths=_csv_ints(widths, "--widths"),
        carry_bits=_csv_ints(carry_bits, "--carry-bits"),
        fixed_leading=fixed_leading,
        solver=solver,
        embed=embed,
        chimera=dims,
        chain_strength=_chain_option(chain_strength),
        samples=samples,
        sweeps=sweeps,
        seed=seed,
        threads=threads,
        anneal_time=anneal_time,
        emit=tuple(emit),
    )
    try:
        result = run_pipeline(config)
    except NoEmbeddingFound as error:
        click.secho(f"Error: {error}", fg="red", err=True)
        sys.exit(EXIT_NO_EMBEDDING)
    except (ReductionBroken, NonUnitaryDrift, InvalidEmbedding) as error:
        click.secho(f"Error: {error}", fg="red", err=True)
        sys.exit(EXIT_INTERNAL)
    except ValueError as error:
        raise click.BadParameter(str(error), param_hint="--number")

    click.echo(f"qubits: {result.qubits}")
    if result.physical_qubits is not None:
        click.echo(f"physical qubits: {result.physical_qubits}")
    for p, q in result.factors:
        click.echo(f"p={p} q={q}")
    write_artifacts(result.artifacts, output)
    if result.status == EXIT_NO_FACTORS:
        click.secho(
            f"No valid factorization of {number} found."
            " Try more --samples or --sweeps.",
            fg="yellow",
            err=True,
        )
    sys.exit(result.status)


@click.command(name="estimate", help="Count the qubits of an encoding.")
@click.option("-n", "--number", type=int, required=True, help="Odd composite.")
@length_options
@click.option("-w", "--widths", help="Block widths, e.g. 2,2,3 (table method).")
@click.option("--carry-bits", help="Carry widths per block.")
@click.option("--fixed-leading/--free-leading", default=False)
@click.option(
    "--asymptotic",
    is_flag=True,
    help="Only the log²(N)/4 estimate of the table method.",
)
def estimate(number, method, l1, l2, widths, carry_bits, fixed_leading, asymptotic):
    try:
        check_odd(number)
    except ValueError as error:
        raise click.BadParameter(str(error), param_hint="--number")
    click.echo(f"asymptotic: {asymptotic_qubits(number)}")
    if asymptotic:
        return
    config = RunConfig(
        n=number,
        method=method,
        l1=l1,
        l2=l2,
        block_widths=_csv_ints(widths, "--widths"),
        carry_bits=_csv_ints(carry_bits, "--carry-bits"),
        fixed_leading=fixed_leading,
    )
    for attempt in layouts(config):
        try:
            count = estimate_qubits(
                number,
                method,
                attempt.l1,
                attempt.l2,
                block_widths=attempt.block_widths,
                fixed_leading=fixed_leading,
                carry_bits=attempt.carry_bits,
            )
        except LengthTooSmall:
            continue
        except ValueError as error:
            raise click.BadParameter(str(error), param_hint="--widths")
        click.echo(f"l1={attempt.l1} l2={attempt.l2}")
        click.echo(f"qubits: {count}")
        return
    raise click.BadParameter(f"No factor lengths fit {number}.", param_hint="--number")


@click.command(
    name="anneal", help="Simulate the adiabatic evolution: success and gap curves."
)
@click.option("-n", "--number", type=int, required=True, help="Odd composite.")
@length_options
@click.option("-w", "--widths", help="Block widths (table method).")
@click.option("-t", "--times", default="1,10,100", help="Total times T to simulate.")
@click.option("--steps", type=click.IntRange(min=1), help="Fixed steps per run.")
@click.option("--resolution", type=click.IntRange(min=2), default=101)
@click.option("-o", "--output", type=click.Path(file_okay=False))
def anneal(number, method, l1, l2, widths, times, steps, resolution, output):
    if (l1 is None) != (l2 is None):
        raise click.BadOptionUsage(
            option_name="--l1", message="Give both --l1 and --l2, or neither."
        )
    config = RunConfig(
        n=number,
        method=method,
        l1=l1,
        l2=l2,
        block_widths=_csv_ints(widths, "--widths"),
    )
    times = _csv_floats(times, "--times")
    if any(t < 0 for t in times):
        raise click.BadParameter("Times must be nonnegative.", param_hint="--times")
    try:
        check_odd(number)
        attempt = next((a for a in layouts(config) if _fits(a)), None)
        if attempt is None:
            raise LengthTooSmall(f"No factor lengths fit {number}")
        model = compile_instance(attempt, attempt.l1, attempt.l2).model
        degeneracy = len(solve_exact(model)[1])
        success = success_series(model, times, steps)
        gaps = gap_series(model, resolution, ground_degeneracy=degeneracy)
    except NonUnitaryDrift as error:
        click.secho(f"Error: {error}", fg="red", err=True)
        sys.exit(EXIT_INTERNAL)
    except ValueError as error:
        raise click.BadParameter(str(error), param_hint="--number")
    write_artifacts(
        {
            "success.csv": success.to_csv(index=False),
            "gap.csv": gaps.to_csv(index=False),
        },
        output,
    )


def _fits(config: RunConfig) -> bool:
    try:
        encode(
            config.n,
            config.method,
            config.l1,
            config.l2,
            config.block_widths,
            config.fixed_leading,
            config.carry_bits,
        )
    except LengthTooSmall:
        return False
    return True


@click.group()
@click.version_option(version=__version__, prog_name=__app_name__)
def cli():
    pass


cli.add_command(run)
cli.add_command(estimate)
cli.add_command(anneal)


if __name__ == "__main__":
    cli()  # pragma: no cover
