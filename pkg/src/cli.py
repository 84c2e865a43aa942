"""
Command-line front end for the entropy calculus toolkit.
Loads tables and states from JSON files, dispatches one verb per invocation, and
writes results as JSON, CSV, or an ASCII rendering.
"""
import argparse
import logging
import math
import sys
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from src.black_hole import ProtoBH, evaporate, form_black_hole, ledger_from_mass
from src.classical_info import (
    DYNAMICS, READOUTS, GibbsSpec, conditional_entropy, correlation_entropy, equilibration_demo,
    gibbs_table, measurement_demo, mutual_entropy, named_readout, shannon_entropy, thermo_average,
    venn_classical
)
from src.config import LOG_LEVEL, log_base_from_env
from src.diagram import EntropyDiagram, cell_names
from src.errors import EntropyCalculusError, UsageError
from src.quantum_entropy import (
    conditional_amplitude_matrix, conditional_entropy_diagnostics, diagonal_shannon_bound,
    inseparability_witness, mutual_entropy_q, resolve_cut, venn_quantum, von_neumann_entropy
)
from src.quantum_state import partial_trace, purify, schmidt_decompose
from src.scenarios import HADAMARD, epr_experiment, four_party_marginals
from src.schemas import (
    diagram_to_dict, dumps, equilibration_csv, evaporation_summary_to_dict, load_prob_table,
    load_pure_state, load_state, pure_state_to_dict, trajectory_csv
)

# Set up logging
logger = logging.getLogger(__name__)

FORMATS = ("json", "ascii", "csv")


class CommandParser(argparse.ArgumentParser):
    """Argument parser that raises UsageError instead of exiting."""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


class CommandResult(NamedTuple):
    payload: Dict[str, Any]
    diagrams: Tuple[Tuple[str, EntropyDiagram], ...] = ()
    csv: Optional[str] = None
    exit_code: int = 0


def _base_name(log_base: float) -> str:
    if log_base == 2.0:
        return "bits"
    if log_base == math.e:
        return "nats"
    return f"base {log_base:g}"


def _fmt(value: float) -> str:
    # round first so tiny negatives print as 0.0000
    return f"{round(value, 4) + 0.0:.4f}"


def render_ascii_venn(diagram: EntropyDiagram) -> str:
    """
    Fixed-width text rendering of an entropy diagram.

    Bipartite diagrams are drawn as three boxes left to right; tripartite diagrams
    list the seven cells with the shared center last.

    Args:
        diagram: Diagram to render

    Returns:
        str: Multi-line text
    """
    names = cell_names(diagram.labels)
    header = f"Entropy diagram ({', '.join(diagram.labels)}), log base {_base_name(diagram.log_base)}"
    values = diagram.as_tuple()
    if diagram.arity == 2:
        width = max(11, max(len(n) for n in names) + 4, max(len(_fmt(v)) for v in values) + 4)
        border = "+" + "+".join("-" * width for _ in names) + "+"
        title = "|" + "|".join(n.center(width) for n in names) + "|"
        row = "|" + "|".join(_fmt(v).center(width) for v in values) + "|"
        return "\n".join([header, border, title, row, border])

    width = max(len(n) for n in names) + 2
    lines = [header]
    for name, value in zip(names, values):
        suffix = "  (center)" if name == names[-1] else ""
        lines.append(f"  {name.ljust(width)}{_fmt(value).rjust(10)}{suffix}")
    return "\n".join(lines)


def _labels(text: Optional[str]) -> List[str]:
    if text is None:
        return []
    labels = [part.strip() for part in text.split(",") if part.strip()]
    if not labels:
        raise UsageError(f"Empty label list '{text}'")
    return labels


def _parties(text: str) -> List[Tuple[str, ...]]:
    parties = []
    for part in _labels(text):
        group = tuple(label.strip() for label in part.split("+") if label.strip())
        if not group:
            raise UsageError(f"Empty party in '{text}'")
        parties.append(group)
    return parties


def _require(args, *names: str) -> None:
    for name in names:
        if getattr(args, name, None) is None:
            raise UsageError(f"{args.verb}: --{name.strip('_').replace('_', '-')} is required for this task")


def _classical(args) -> CommandResult:
    base = log_base_from_env()
    task = args.task
    if task == "gibbs":
        _require(args, "levels", "beta")
        spec = GibbsSpec(tuple(args.levels), args.beta, tuple(args.observable) if args.observable else None)
        result = gibbs_table(spec, base)
        payload = {
            "task": task,
            "probabilities": [float(p) for p in result.table.weights],
            "partition_function": result.partition_function,
            "log_partition_function": result.log_partition_function,
            "free_energy": result.free_energy,
            "mean_energy": result.mean_energy,
            "entropy": result.entropy,
            "log_base": base,
        }
        if spec.observable is not None:
            payload["observable_average"] = thermo_average(spec)
        return CommandResult(payload)

    if task == "equilibrate":
        _require(args, "particles", "initial_cells", "cells")
        points = equilibration_demo(args.particles, args.initial_cells, args.cells, args.rule, args.steps, base)
        return CommandResult(
            {"task": task, "rule": args.rule, "log_base": base, "trajectory": [p._asdict() for p in points]},
            csv=equilibration_csv(points),
        )

    _require(args, "table")
    table = load_prob_table(args.table)
    if task == "entropy":
        subset = _labels(args.subset) or list(table.labels)
        return CommandResult({"task": task, "subset": subset, "entropy": shannon_entropy(table, subset, base),
                              "log_base": base})
    if task == "conditional":
        _require(args, "subset")
        target, given = _labels(args.subset), _labels(args.given)
        value = conditional_entropy(table, target, given, base)
        return CommandResult({"task": task, "target": target, "given": given, "conditional_entropy": value,
                              "log_base": base})
    if task == "mutual":
        _require(args, "subset", "with_")
        x, y = _labels(args.subset), _labels(args.with_)
        return CommandResult({"task": task, "x": x, "y": y, "mutual_entropy": mutual_entropy(table, x, y, base),
                              "log_base": base})
    if task == "correlation":
        return CommandResult({"task": task, "correlation_entropy": correlation_entropy(table, base),
                              "log_base": base})
    if task == "measure":
        demo = measurement_demo(table, named_readout(args.readout, table), args.device_label, base)
        return CommandResult(
            {"task": task, "readout": args.readout, "system_entropy": demo.system_entropy,
             "before": diagram_to_dict(demo.before), "after": diagram_to_dict(demo.after)},
            diagrams=(("before", demo.before), ("after", demo.after)),
        )
    raise UsageError(f"Unknown classical task '{task}'")


def _basis_for(rho, name: str) -> np.ndarray:
    if name == "z":
        return np.eye(rho.dim)
    if any(d != 2 for d in rho.layout.dims):
        raise UsageError("The x basis needs every subsystem to be a qubit")
    basis = np.ones((1, 1))
    for _ in rho.layout.dims:
        basis = np.kron(basis, HADAMARD)
    return basis


def _quantum(args) -> CommandResult:
    base = log_base_from_env()
    task = args.task
    if task == "schmidt":
        _require(args, "cut")
        psi = load_pure_state(args.state)
        terms = schmidt_decompose(psi, _labels(args.cut))
        return CommandResult({"task": task, "left": _labels(args.cut),
                              "coefficients": [t.coefficient for t in terms]})

    rho = load_state(args.state)
    if task == "entropy":
        subset = _labels(args.cut) or list(rho.layout.labels)
        return CommandResult({"task": task, "subset": subset,
                              "entropy": von_neumann_entropy(partial_trace(rho, subset), base), "log_base": base})
    if task == "purify":
        return CommandResult({"task": task, "state": pure_state_to_dict(purify(rho, args.reference))})
    if task == "bound":
        bound = diagonal_shannon_bound(rho, _basis_for(rho, args.basis), base)
        return CommandResult({"task": task, "basis": args.basis, "von_neumann": bound.von_neumann,
                              "diagonal_shannon": bound.diagonal_shannon, "equality": bound.equality,
                              "log_base": base})

    _require(args, "cut")
    cut = resolve_cut(rho.layout, _labels(args.cut))
    if task == "conditional":
        report = conditional_entropy_diagnostics(rho, cut, base)
        return CommandResult({"task": task, "a": list(cut[0]), "b": list(cut[1]),
                              "conditional_entropy": report.canonical, "trace_form": report.trace_form,
                              "discrepancy": report.discrepancy, "commuting": report.commuting, "log_base": base})
    if task == "mutual":
        return CommandResult({"task": task, "a": list(cut[0]), "b": list(cut[1]),
                              "mutual_entropy": mutual_entropy_q(rho, cut, base), "log_base": base})
    if task == "amplitude":
        amplitude = conditional_amplitude_matrix(rho, cut)
        return CommandResult({"task": task, "a": list(amplitude.a_labels), "b": list(amplitude.b_labels),
                              "spectrum": list(amplitude.spectrum),
                              "re": np.real(amplitude.entries).tolist(), "im": np.imag(amplitude.entries).tolist()})
    raise UsageError(f"Unknown quantum task '{task}'")


def _venn(args) -> CommandResult:
    base = log_base_from_env()
    parties = _parties(args.parties)
    if args.state:
        diagram = venn_quantum(load_state(args.state), parties, base)
    else:
        diagram = venn_classical(load_prob_table(args.table), parties, base)
    return CommandResult(diagram_to_dict(diagram), diagrams=(("diagram", diagram),))


def _witness(args) -> CommandResult:
    rho = load_state(args.state)
    result = inseparability_witness(rho, _labels(args.cut))
    return CommandResult({"cut": _labels(args.cut), "max_eigenvalue": result.max_eigenvalue,
                          "inseparable": result.exceeds_unity})


def _epr(args) -> CommandResult:
    base = log_base_from_env()
    experiment = epr_experiment(args.basis1, args.basis2, base)
    payload = {
        "basis1": args.basis1,
        "basis2": args.basis2,
        "full_diagram": diagram_to_dict(experiment.full_diagram),
        "device_diagram": diagram_to_dict(experiment.device_diagram),
        "system_device_mutual": experiment.system_device_mutual,
        "four_party_marginals": four_party_marginals(experiment.state, base),
    }
    return CommandResult(payload, diagrams=(("full", experiment.full_diagram),
                                            ("devices", experiment.device_diagram)))


def _bh_form(args) -> CommandResult:
    formation = form_black_hole(ProtoBH(args.temperature))
    ledger = formation.ledger
    payload = {
        "units": "nats",
        "temperature": args.temperature,
        "mass": ledger.mass,
        "sigma": ledger.sigma_account,
        "s_bh": ledger.s_bh,
        "s_rad": ledger.s_rad,
        "s_corr": ledger.s_corr,
        "collapse_diagram": diagram_to_dict(formation.collapse_diagram),
    }
    return CommandResult(payload, diagrams=(("collapse", formation.collapse_diagram),))


def _bh_evaporate(args) -> CommandResult:
    formation = None
    if args.temperature is not None:
        formation = form_black_hole(ProtoBH(args.temperature))
        ledger = formation.ledger
    else:
        ledger = ledger_from_mass(args.mass)
    result = evaporate(ledger, args.fraction, args.mmin)
    diagrams = (("collapse", formation.collapse_diagram),) if formation else ()
    return CommandResult(evaporation_summary_to_dict(result, formation), diagrams=diagrams,
                         csv=trajectory_csv(result))


def _selftest(args) -> CommandResult:
    from src.acceptance import run_acceptance

    results = run_acceptance(args.seed)
    passed = all(r.passed for r in results)
    payload = {
        "passed": passed,
        "seed": args.seed,
        "criteria": [r._asdict() for r in results],
    }
    return CommandResult(payload, exit_code=0 if passed else 1)


COMMANDS: Dict[str, Callable[[argparse.Namespace], CommandResult]] = {
    "classical": _classical,
    "quantum": _quantum,
    "venn": _venn,
    "witness": _witness,
    "epr": _epr,
    "bh-form": _bh_form,
    "bh-evaporate": _bh_evaporate,
    "selftest": _selftest,
}


def _add_output_options(parser: argparse.ArgumentParser, suppress: bool) -> None:
    # Subcommands repeat the options without defaults so values given before the verb survive
    if suppress:
        defaults = {"format": argparse.SUPPRESS, "out": argparse.SUPPRESS, "log_level": argparse.SUPPRESS}
    else:
        defaults = {"format": "json", "out": None, "log_level": LOG_LEVEL}
    parser.add_argument("--format", choices=FORMATS, default=defaults["format"], help="Output format (default json)")
    parser.add_argument("--out", default=defaults["out"], help="Write the result to this file instead of stdout")
    parser.add_argument("--log-level", default=defaults["log_level"], help="Logging level (DEBUG, INFO, WARNING, ERROR)")


def build_parser() -> CommandParser:
    """
    Build the argument parser with one subcommand per verb.

    Returns:
        CommandParser: Parser raising UsageError on bad input
    """
    parser = CommandParser(prog="entropy-calculus", description="Classical and quantum entropy calculus")
    _add_output_options(parser, suppress=False)
    sub = parser.add_subparsers(dest="verb", metavar="verb", parser_class=CommandParser)
    sub.required = True

    common = CommandParser(add_help=False)
    _add_output_options(common, suppress=True)

    classical = sub.add_parser("classical", parents=[common], help="Shannon entropies and classical demos")
    classical.add_argument("--task", required=True,
                           choices=["entropy", "conditional", "mutual", "correlation", "gibbs", "measure",
                                    "equilibrate"])
    classical.add_argument("--table", help="ProbTable JSON file")
    classical.add_argument("--subset", help="Comma-separated variable labels")
    classical.add_argument("--given", help="Comma-separated conditioning labels")
    classical.add_argument("--with", dest="with_", help="Comma-separated labels of the second variable group")
    classical.add_argument("--levels", type=float, nargs="+", help="Energy levels")
    classical.add_argument("--beta", type=float, help="Inverse temperature")
    classical.add_argument("--observable", type=float, nargs="+", help="Observable value per level")
    classical.add_argument("--readout", choices=sorted(READOUTS), default="identity")
    classical.add_argument("--device-label", default="M")
    classical.add_argument("--particles", type=int)
    classical.add_argument("--initial-cells", type=int)
    classical.add_argument("--cells", type=int)
    classical.add_argument("--steps", type=int, default=50)
    classical.add_argument("--rule", choices=sorted(DYNAMICS), default="partner_parity_shift")

    quantum = sub.add_parser("quantum", parents=[common], help="Von Neumann entropies of a state")
    quantum.add_argument("--state", required=True, help="DensityMatrix or PureState JSON file")
    quantum.add_argument("--task", required=True,
                         choices=["entropy", "conditional", "mutual", "amplitude", "bound", "purify", "schmidt"])
    quantum.add_argument("--cut", help="Comma-separated labels of the A side; B is the rest of the layout")
    quantum.add_argument("--basis", choices=["z", "x"], default="z", help="Basis for the diagonal bound")
    quantum.add_argument("--reference", default="R", help="Reference label for purification")

    venn = sub.add_parser("venn", parents=[common], help="Entropy Venn diagram")
    source = venn.add_mutually_exclusive_group(required=True)
    source.add_argument("--state", help="DensityMatrix or PureState JSON file")
    source.add_argument("--table", help="ProbTable JSON file")
    venn.add_argument("--parties", required=True, help="Parties as A,B[,C]; join labels with '+'")

    witness = sub.add_parser("witness", parents=[common], help="Inseparability witness")
    witness.add_argument("--state", required=True)
    witness.add_argument("--cut", required=True, help="Comma-separated labels of the A side; B is the rest of the layout")

    epr = sub.add_parser("epr", parents=[common], help="EPR pair measured by two devices")
    epr.add_argument("action", nargs="?", choices=["run"], default="run")
    epr.add_argument("--basis1", choices=["z", "x"], default="z")
    epr.add_argument("--basis2", choices=["z", "x"], default="z")

    bh_form = sub.add_parser("bh-form", parents=[common], help="Black hole formation from a proto black hole")
    bh_form.add_argument("--temperature", type=float, required=True)

    bh_evaporate = sub.add_parser("bh-evaporate", parents=[common], help="Black hole evaporation trajectory")
    start = bh_evaporate.add_mutually_exclusive_group(required=True)
    start.add_argument("--mass", type=float)
    start.add_argument("--temperature", type=float, help="Form from a proto black hole first")
    bh_evaporate.add_argument("--fraction", type=float, default=1e-3)
    bh_evaporate.add_argument("--mmin", type=float, required=True)

    selftest = sub.add_parser("selftest", parents=[common], help="Run the acceptance suite")
    selftest.add_argument("--seed", type=int, default=0)
    return parser


def _render(result: CommandResult, fmt: str) -> str:
    if fmt == "json":
        return dumps(result.payload) + "\n"
    if fmt == "csv":
        if result.csv is None:
            raise UsageError("CSV output is only available for trajectories")
        return result.csv
    blocks = [render_ascii_venn(diagram) for _, diagram in result.diagrams]
    diagram_keys = {"cells", "labels", "arity"}
    for key, value in result.payload.items():
        if isinstance(value, dict) and diagram_keys <= set(value):
            continue
        if key in diagram_keys:
            continue
        if isinstance(value, list) and value and isinstance(value[0], dict):
            blocks.append(f"{key}:\n" + "\n".join(f"  {item}" for item in value))
        else:
            blocks.append(f"{key}: {value}")
    return "\n".join(blocks) + "\n"


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse arguments, run one verb, and emit its result.

    Args:
        argv: Arguments without the program name (default sys.argv[1:])

    Returns:
        int: 0 on success, 1 on validation or invariant errors, 2 on model-domain errors
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        level = str(args.log_level).upper()
        if not isinstance(logging.getLevelName(level), int):
            raise UsageError(f"Unknown log level '{args.log_level}'")
        logging.getLogger().setLevel(level)

        logger.debug(f"Running '{args.verb}'")
        result = COMMANDS[args.verb](args)
        text = _render(result, args.format)
        if args.out:
            with open(args.out, "w") as f:
                f.write(text)
            logger.info(f"Wrote {args.verb} result to {args.out}")
        else:
            sys.stdout.write(text)
        return result.exit_code
    except SystemExit as e:
        # --help
        return int(e.code or 0)
    except EntropyCalculusError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return 1
