"""
The ``iqp`` management command: instance generation, amplitudes, output
distributions, sampling, compilation and the experiments.

Artifacts go to stdout (or ``--out``); diagnostics go to stderr through
logging. Exit codes: 2 invalid input or usage, 3 resource limit, 4 failed
bound check, 1 any other error.
"""
import argparse
import json
import logging
from contextlib import contextmanager

from django.core.management.base import BaseCommand, CommandError

from iqp import formats
from iqp.amplitude import output_distribution
from iqp.compiler import compile_ising, compile_poly, emit_repeated, gadgetize
from iqp.conf import default_workers
from iqp.core import IqpCircuit, IsingInstance, MixedCircuit, Polynomial3, bits_to_int, int_to_bits
from iqp.evaluation import BACKENDS, ISING_MODES, evaluate_amplitude
from iqp.exceptions import (
    BoundViolation, InvalidInstance, InvalidParameters, IqpError, ResourceLimitExceeded, UnsupportedOrder,
)
from iqp.experiments import PipelineConfig, lemma9_sum, moment4, pipeline, pz_fraction
from iqp.models import ExperimentRun
from iqp.recovery import NOISE_MODES, RecoveryConfig, recovery_experiment
from iqp.reports import ReportEncoder, config_line, format_real, write_rows
from iqp.rng import ESTIMATOR, Seed, gen_ising, gen_poly3, gen_xmask
from iqp.sampling import (
    ESTIMATE_MODES, MODEL_KINDS, ProbEstimate, comparison_rows, estimate_prob, model_for_budget, realize, sample,
)

logger = logging.getLogger("iqp")

# options that never change an artifact
_UNECHOED = {
    "verbosity", "settings", "pythonpath", "traceback", "no_color", "force_color", "skip_checks",
    "out", "threads", "record",
}
_DEFAULT_FORMAT = {"amp": "text", "lemma9": "text", "dist": "csv", "sample": "csv"}
_INPUT_ERRORS = (InvalidInstance, InvalidParameters, UnsupportedOrder)


def _common_options():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="64-bit seed (default 0)")
    common.add_argument("--substream", type=int, default=0, help="64-bit substream (default 0)")
    common.add_argument("--threads", type=int, default=None, help="worker processes (default: available CPUs)")
    common.add_argument("-o", "--out", default=None, help="write the artifact here instead of stdout")
    common.add_argument("--format", choices=("json", "csv", "text"), default=None)
    return common


def _family_options(parser):
    parser.add_argument("--kind", choices=("poly3", "ising"), default="poly3")
    parser.add_argument("--n", type=int, required=True)
    parser.add_argument("--edge-range", type=int, choices=(8, 4), default=8)


def _mode_options(parser):
    mode = parser.add_mutually_exclusive_group()
    mode.add_argument("--trials", type=int, default=10_000, help="Monte Carlo trials (default 10000)")
    mode.add_argument("--exact", action="store_true", help="enumerate the whole instance family")


class Command(BaseCommand):
    help = "IQP circuit amplitudes, sampling and anticoncentration experiments."

    def add_arguments(self, parser):
        common = _common_options()
        commands = parser.add_subparsers(dest="command", required=True)

        gen = commands.add_parser("gen", parents=[common], help="generate a random instance")
        gen.add_argument("--kind", choices=("poly3", "ising", "xmask"), required=True)
        gen.add_argument("--n", type=int, required=True)
        gen.add_argument("--edge-range", type=int, choices=(8, 4), default=8)

        amp = commands.add_parser("amp", parents=[common], help="evaluate one amplitude <y|C|0>")
        amp.add_argument("file")
        amp.add_argument("--backend", choices=BACKENDS, default=None)
        amp.add_argument("--y", default=None, help="basis string, default all zeros")
        amp.add_argument("--exact", action="store_true", help="print only the exact value")
        amp.add_argument(
            "--mode", choices=ISING_MODES, default=None,
            help="ising backend only; default exact when t allows it and n is under ISING_EXACT_MAX_N",
        )

        dist = commands.add_parser("dist", parents=[common], help="output distribution, CSV columns y,p")
        dist.add_argument("file")

        smp = commands.add_parser(
            "sample", parents=[common],
            help="sample a (possibly perturbed) output distribution, CSV columns y,p,q,estimate,abs_err",
        )
        smp.add_argument("file")
        smp.add_argument("--shots", type=int, required=True)
        smp.add_argument("--model", choices=MODEL_KINDS, default="exact")
        smp.add_argument("--budget", type=float, default=0.0, help="l1 distance of the model from p")
        smp.add_argument("--estimate", choices=ESTIMATE_MODES, default=None)
        smp.add_argument("--rho", type=float, default=0.0, help="relative error of oracle estimates")
        smp.add_argument("--shots-est", type=int, default=10_000, help="shots per empirical estimate")

        cmp = commands.add_parser("compile", parents=[common], help="compile a poly3 or ising instance")
        cmp.add_argument("file")
        cmp.add_argument("--emit-repeated", action="store_true", help="expand pair gates into unit gates")

        gad = commands.add_parser("gadget", parents=[common], help="remove intermediate Hadamards")
        gad.add_argument("file")

        exp = commands.add_parser("exp", help="run an experiment")
        experiments = exp.add_subparsers(dest="experiment", required=True)
        recording = argparse.ArgumentParser(add_help=False)
        recording.add_argument("--record", action="store_true", help="store the report in the database")
        parents = [common, recording]

        m4 = experiments.add_parser("moment4", parents=parents, help="fourth moment, CSV per trial")
        _family_options(m4)
        _mode_options(m4)

        pz = experiments.add_parser("pz", parents=parents, help="anticoncentrated fraction, CSV per trial")
        _family_options(pz)
        _mode_options(pz)
        pz.add_argument("--alpha", type=float, default=0.5)

        l9 = experiments.add_parser("lemma9", parents=parents, help="exact quadruple count")
        l9.add_argument("--r", type=int, required=True)
        l9.add_argument("--s", type=int, required=True)
        l9.add_argument("--n", type=int, required=True)

        pl = experiments.add_parser(
            "pipeline", parents=parents,
            help="obfuscated estimation pipeline, CSV columns trial,substream,y,p,q,estimate,abs_err,...",
        )
        _family_options(pl)
        pl.add_argument("--model", choices=MODEL_KINDS, default="uniform_mix")
        pl.add_argument("--budget", type=float, default=None, help="default alpha*p/8")
        pl.add_argument("--trials", type=int, default=100)
        pl.add_argument("--alpha", type=float, default=0.5)
        pl.add_argument("--p", type=float, default=1 / 12)
        pl.add_argument("--delta", type=float, default=None, help="default p/2")
        pl.add_argument("--rho", type=float, default=None, help="default 1/n")

        rc = experiments.add_parser("recover", parents=parents, help="gap recovery, CSV per run")
        rc.add_argument("--n", type=int, required=True)
        rc.add_argument("--eps", type=float, required=True)
        rc.add_argument("--noise", choices=NOISE_MODES, default="random")
        rc.add_argument("--runs", type=int, default=100)
        rc.add_argument("--grid-m", type=int, default=None)
        rc.add_argument("--max-iters", type=int, default=None)
        rc.add_argument("--from-squared", action="store_true")
        rc.add_argument("--unchecked-eps", action="store_true", help="allow eps >= 1/2")

    def handle(self, *args, **options):
        verbosity = options.get("verbosity", 1)
        if verbosity >= 2:
            logging.getLogger("iqp").setLevel(logging.DEBUG if verbosity >= 3 else logging.INFO)
        self.options = options
        self.workers = options.get("threads") or default_workers()
        name = options.get("experiment") or options["command"]
        self.format = options.get("format") or _DEFAULT_FORMAT.get(name, "json")
        self.config = {
            key: value for key, value in sorted(options.items())
            if key not in _UNECHOED and value is not None
        }
        handler = getattr(self, f"handle_{name}")
        try:
            self.seed_value = Seed(options["seed"], options["substream"])
            handler()
        except ResourceLimitExceeded as exc:
            raise CommandError(str(exc), returncode=3)
        except _INPUT_ERRORS as exc:
            raise CommandError(str(exc), returncode=2)
        except BoundViolation as exc:
            raise CommandError(str(exc), returncode=4)
        except IqpError as exc:
            raise CommandError(str(exc), returncode=1)
        except OSError as exc:
            raise CommandError(f"cannot read or write a file: {exc}", returncode=2)

    # --- output ---

    @contextmanager
    def _stream(self):
        if self.options.get("out"):
            with open(self.options["out"], "w", encoding="utf-8", newline="") as handle:
                yield handle
        else:
            yield self.stdout

    def _emit(self, text):
        with self._stream() as stream:
            stream.write(text)

    def _emit_json(self, payload):
        self._emit(json.dumps({"config": self.config, **payload}, cls=ReportEncoder) + "\n")

    def _emit_rows(self, rows, fieldnames):
        if self.format == "json":
            self._emit_json({"rows": list(rows)})
            return
        with self._stream() as stream:
            write_rows(stream, rows, fieldnames, self.config)

    def _load(self):
        return formats.load(self.options["file"])

    def _circuit(self, obj):
        if isinstance(obj, Polynomial3):
            return compile_poly(obj)
        if isinstance(obj, IsingInstance):
            return compile_ising(obj)
        if isinstance(obj, IqpCircuit):
            return obj
        raise InvalidParameters(f"expected a poly3, ising or circuit document, got {type(obj).__name__}")

    # --- subcommands ---

    def handle_gen(self):
        n = self.options["n"]
        kind = self.options["kind"]
        if kind == "poly3":
            obj = gen_poly3(n, self.seed_value)
        elif kind == "ising":
            obj = gen_ising(n, self.seed_value, self.options["edge_range"])
        else:
            obj = gen_xmask(n, self.seed_value)
        self._emit_json(formats.to_dict(obj))

    def handle_amp(self):
        value = evaluate_amplitude(
            self._load(), self.options["y"], self.options["backend"], self.workers, self.options["mode"],
        )
        exact = value.exact_str()
        if self.options["exact"] and exact is None:
            raise InvalidParameters("this backend does not produce an exact value")
        if self.format == "json":
            self._emit_json({"real": value.value.real, "imag": value.value.imag, "exact": exact})
            return
        if self.options["exact"]:
            lines = [exact]
        else:
            lines = [_format_complex(value.value)] + ([f"exact={exact}"] if exact is not None else [])
        self._emit("\n".join([config_line(self.config)] + lines) + "\n")

    def handle_dist(self):
        d = output_distribution(self._circuit(self._load()))
        rows = ({"y": int_to_bits(i, d.n), "p": float(p)} for i, p in enumerate(d.probs))
        self._emit_rows(rows, ["y", "p"])

    def handle_sample(self):
        circuit = self._circuit(self._load())
        p = output_distribution(circuit)
        model = model_for_budget(self.options["model"], circuit, self.options["budget"], p)
        q = realize(model, p)
        shots = self.options["shots"]
        counts = sample(q, shots, self.seed_value)
        mode = self.options["estimate"]
        estimates = {}
        for y in sorted(counts, key=bits_to_int):
            if mode is None:
                estimates[y] = ProbEstimate(y, counts[y] / shots, None, shots)
            else:
                estimates[y] = estimate_prob(
                    model, y, mode, self.options["rho"], self.seed_value.child(ESTIMATOR, bits_to_int(y)),
                    shots=self.options["shots_est"], q=q,
                )
        self._emit_rows(comparison_rows(p, q, estimates), ["y", "p", "q", "estimate", "abs_err"])

    def handle_compile(self):
        obj = self._load()
        if not isinstance(obj, (Polynomial3, IsingInstance)):
            raise InvalidParameters("compile expects a poly3 or ising document")
        circuit = self._circuit(obj)
        if self.options["emit_repeated"]:
            circuit = emit_repeated(circuit)
        self._emit_json(formats.to_dict(circuit))

    def handle_gadget(self):
        mixed = self._load()
        if not isinstance(mixed, MixedCircuit):
            raise InvalidParameters("gadget expects a mixed document")
        result = gadgetize(mixed)
        self._emit_json({**formats.to_dict(result.circuit), "m": result.m, "scale": result.scale,
                         "postselect": list(result.postselect)})

    # --- experiments ---

    def _family_mode(self):
        mode = "exact" if self.options["exact"] else "monte_carlo"
        return dict(
            kind=self.options["kind"], n=self.options["n"], mode=mode, trials=self.options["trials"],
            seed=self.seed_value, edge_range=self.options["edge_range"], workers=self.workers,
        )

    def handle_moment4(self):
        self._finish(moment4(**self._family_mode()))

    def handle_pz(self):
        self._finish(pz_fraction(alpha=self.options["alpha"], **self._family_mode()))

    def handle_lemma9(self):
        self._finish(lemma9_sum(self.options["r"], self.options["s"], self.options["n"]))

    def handle_pipeline(self):
        cfg = PipelineConfig(
            alpha=self.options["alpha"],
            p=self.options["p"],
            delta=self.options["delta"],
            rho=self.options["rho"],
            trials=self.options["trials"],
            seed=self.seed_value,
            edge_range=self.options["edge_range"],
        )
        report = pipeline(
            self.options["kind"], self.options["n"], self.options["model"], self.options["budget"], cfg,
            workers=self.workers,
        )
        self._finish(report)

    def handle_recover(self):
        cfg = RecoveryConfig(
            epsilon=self.options["eps"],
            noise=self.options["noise"],
            grid_m=self.options["grid_m"],
            max_iters=self.options["max_iters"],
            from_squared=self.options["from_squared"],
            strict=not self.options["unchecked_eps"],
        )
        self._finish(recovery_experiment(self.options["n"], cfg, self.options["runs"], self.seed_value, self.workers))

    def _finish(self, report):
        report.config = {"cli": self.config, **report.config}
        if self.format == "text":
            self._emit(report.to_text())
        elif self.format == "csv":
            with self._stream() as stream:
                report.write_csv(stream)
        else:
            self._emit(report.to_json() + "\n")
        if self.options.get("record"):
            run = ExperimentRun.from_report(report)
            run.save()
            logger.info("stored %s as experiment run %d", report.name, run.id)
        if not report.passed:
            raise BoundViolation(report.failed_checks)


def _format_complex(value: complex) -> str:
    if value.imag == 0:
        return format_real(value.real)
    return f"{value.real:.17g}{value.imag:+.17g}j"
