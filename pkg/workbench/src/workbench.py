"""Service layer behind the CLI: each verb runs one analysis and returns a Report."""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from typing import Any

from arena import Arena, Player
from automaton import Automaton
from config import AppConfig
from errors import HistoryDeterministicError, InputError
from gallery import GALLERY, get_entry, random_timed_word, verify_entry
from game_builders import build_sim_game, is_history_deterministic
from ghost import certify_delay, delay_finite, verify_ghost
from lasso import lasso_membership, sample_lassos
from open_telemetry import Telemetry
from parity import solve_parity3
from schemas import ReportDocument, SpoilerCertificateDocument
from serialization import Model, result_to_document
from spoiler import build_spoiler
from timed import TimedAutomaton, TimedWord, accepts, accepts_ghost, delay_timed, ghost_copy_invariants
from uniform import UniformAutomaton, delay_uniform, expand
from vpa import Vpa, count_runs, sample_well_nested, semantic_stack_check, vpa_bounded_g1, vpa_ghost

logger = logging.getLogger(__name__)

# Longest VPA prefix checked for the run-count bijection and the semantic stack.
VPA_PREFIX_LENGTH = 10
TIMED_WORD_LENGTH = 6


@dataclass
class Report:
    command: str
    ok: bool
    verdicts: dict[str, Any] = field(default_factory=dict)
    counterexamples: list[str] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)
    seed: int | None = None
    details: dict[str, Any] = field(default_factory=dict)
    inputs: dict[str, str] = field(default_factory=dict)
    # Model emitted by the command (ghost, spoiler, gallery instance); written separately from the report.
    output: Model | None = None

    @property
    def exit_code(self) -> int:
        return 0 if self.ok else 1

    def to_document(self) -> ReportDocument:
        return ReportDocument(
            command=self.command,
            ok=self.ok,
            inputs=self.inputs,
            verdicts=self.verdicts,
            counterexamples=self.counterexamples,
            timings=self.timings,
            seed=self.seed,
            details=self.details,
        )


class Workbench:
    def __init__(self, config: AppConfig, telemetry: Telemetry):
        self.config = config
        self.telemetry = telemetry

    def _seed(self, seed: int | None) -> int:
        return self.config.workbench_seed if seed is None else seed

    def _samples(self, samples: int | None) -> int:
        return self.config.workbench_lasso_samples if samples is None else samples

    def _bound(self, bound: int | None) -> int:
        return self.config.workbench_bound if bound is None else bound

    def _certificate(self, kind: str, ok: bool) -> None:
        self.telemetry.metrics.certificates.add(1, {"kind": kind, "outcome": "passed" if ok else "failed"})

    # ---- decisions ----

    def check_hd(self, a: Automaton, monitor: Automaton | None = None) -> Report:
        with self.telemetry.create_span("check_hd", attributes={"automaton": a.name, "states": a.num_states}) as span:
            timer = self.telemetry.metrics.timer()
            verdict = is_history_deterministic(a, monitor, self.config.workbench_arena_node_limit)
            elapsed = timer()
            self.telemetry.metrics.solve_latency.record(elapsed, {"operation": "check_hd"})
            span.set_attribute("history_deterministic", verdict.history_deterministic)
            logger.info(f"check-hd {a.name or 'automaton'}: HD={verdict.history_deterministic}, paths {verdict.paths}")
            return Report(
                "check-hd",
                verdict.history_deterministic,
                {"history_deterministic": verdict.history_deterministic, "paths": verdict.paths},
                timings={"decide": elapsed},
                details={"summary": "HD" if verdict else "not HD"},
            )

    def check_sim(self, a: Automaton, b: Automaton) -> Report:
        """Does `a` simulate `b`? Adam builds a run of `b`, Eve answers in `a`."""
        with self.telemetry.create_span("check_sim", attributes={"simulator": a.name, "simulated": b.name}) as span:
            timer = self.telemetry.metrics.timer()
            game = build_sim_game(a, b, self.config.workbench_arena_node_limit)
            built = timer()
            self._record_arena("sim", game.arena, built)
            result = solve_parity3(game.arena)
            elapsed = timer() - built
            winner = result.winner_at(game.arena.initial)
            self._record_solve("sim", winner, elapsed)
            span.set_attribute("winner", winner.value)
            return Report(
                "check-sim",
                winner is Player.EVE,
                {"simulates": winner is Player.EVE, "winner": winner.value},
                timings={"build": built, "solve": elapsed},
                details={"arena_nodes": game.arena.num_nodes},
            )

    def solve(self, arena: Arena) -> Report:
        with self.telemetry.create_span("solve", attributes={"nodes": arena.num_nodes}):
            self._record_arena("file", arena, 0.0)
            timer = self.telemetry.metrics.timer()
            result = solve_parity3(arena)
            elapsed = timer()
            winner = result.winner_at(arena.initial)
            self._record_solve("file", winner, elapsed)
            return Report(
                "solve",
                True,
                {
                    "winner_at_initial": winner.value,
                    "eve_region": len(result.region(Player.EVE)),
                    "adam_region": len(result.region(Player.ADAM)),
                },
                timings={"solve": elapsed},
                details={"result": result_to_document(result).model_dump(mode="json")},
            )

    def _record_arena(self, kind: str, arena: Arena, seconds: float) -> None:
        self.telemetry.metrics.arenas_built.add(1, {"kind": kind})
        self.telemetry.metrics.arena_nodes.record(arena.num_nodes, {"kind": kind})
        self.telemetry.metrics.construction_latency.record(seconds, {"operation": f"{kind}_arena"})

    def _record_solve(self, kind: str, winner: Player, seconds: float) -> None:
        self.telemetry.metrics.arenas_solved.add(1, {"kind": kind, "winner": winner.value})
        self.telemetry.metrics.solve_latency.record(seconds, {"operation": kind})

    # ---- ghosts ----

    def ghost(
        self, model: Model, verify: bool = False, samples: int | None = None, seed: int | None = None,
        bound: int | None = None,
    ) -> Report:
        seed, samples, bound = self._seed(seed), self._samples(samples), self._bound(bound)
        with self.telemetry.create_span("ghost", attributes={"model": type(model).__name__, "verify": verify}):
            timer = self.telemetry.metrics.timer()
            match model:
                case Automaton():
                    report = self._ghost_finite(model, verify, samples, seed)
                case Vpa():
                    report = self._ghost_vpa(model, verify, samples, seed, bound)
                case UniformAutomaton():
                    report = self._ghost_uniform(model, verify, samples, seed, bound)
                case TimedAutomaton():
                    report = self._ghost_timed(model, verify, samples, seed)
                case _:
                    raise InputError(f"No ghost construction for {type(model).__name__}")
            report.timings["total"] = timer()
            report.seed = seed
            self.telemetry.metrics.construction_latency.record(report.timings["total"], {"operation": "ghost"})
            if verify:
                self._certificate(f"ghost_{type(model).__name__.lower()}", report.ok)
            return report

    def _ghost_finite(self, a: Automaton, verify: bool, samples: int, seed: int) -> Report:
        d = delay_finite(a)
        report = Report("ghost", True, {"states": d.automaton.num_states}, output=d.automaton)
        if verify:
            check = certify_delay(
                a, samples=samples, seed=seed, max_prefix=self.config.workbench_max_prefix,
                max_cycle=self.config.workbench_max_cycle,
            )
            self.telemetry.metrics.lassos_sampled.add(check.lassos_checked, {"purpose": "ghost"})
            report.ok = check.passed
            report.verdicts.update(
                eve_wins_g1=check.eve_wins_g1, copy_certified=check.copy_certified, lassos=check.lassos_checked
            )
            report.counterexamples = [str(lasso) for lasso in check.disagreements]
        return report

    def _ghost_vpa(self, v: Vpa, verify: bool, samples: int, seed: int, bound: int) -> Report:
        g = vpa_ghost(v)
        report = Report("ghost", True, {"states": g.vpa.num_states}, output=g.vpa)
        if not verify:
            return report
        bounded = vpa_bounded_g1(g, max(bound, 1))
        lassos = sample_well_nested(
            v, samples, bound, self.config.workbench_max_prefix, self.config.workbench_max_cycle, seed
        )
        for lasso in lassos:
            prefix = lasso.take(VPA_PREFIX_LENGTH)
            if not semantic_stack_check(g, prefix):
                report.counterexamples.append(f"semantic stack: {''.join(prefix)}")
            elif prefix and count_runs(g.vpa, prefix) != count_runs(v, prefix[:-1]):
                report.counterexamples.append(f"run count: {''.join(prefix)}")
        report.ok = bounded.passed and not report.counterexamples
        report.verdicts.update(
            eve_wins_bounded_g1=bounded.eve_wins, copy_certified=bounded.copy_certified,
            bound_limited=bounded.bound_limited, prefixes=len(lassos),
        )
        report.details["arena_nodes"] = bounded.arena_nodes
        return report

    def _ghost_uniform(self, u: UniformAutomaton, verify: bool, samples: int, seed: int, bound: int) -> Report:
        ghost = delay_uniform(u)
        report = Report("ghost", True, {"states": ghost.num_states}, output=ghost)
        if verify:
            check = verify_ghost(expand(ghost, bound).automaton, expand(u, bound).automaton, samples=samples, seed=seed)
            self.telemetry.metrics.lassos_sampled.add(check.lassos_checked, {"purpose": "ghost"})
            report.ok = check.passed
            report.verdicts.update(eve_wins_g1=check.eve_wins_g1, bound=bound, lassos=check.lassos_checked)
            report.counterexamples = [str(lasso) for lasso in check.disagreements]
        return report

    def _ghost_timed(self, t: TimedAutomaton, verify: bool, samples: int, seed: int) -> Report:
        g = delay_timed(t)
        report = Report("ghost", True, {"states": g.automaton.num_states}, output=g.automaton)
        if not verify:
            return report
        rng = random.Random(seed)
        limit = self.config.workbench_frontier_limit
        for i in range(samples):
            stamped = random_timed_word(rng.randint(0, TIMED_WORD_LENGTH), seed + i, alphabet=t.alphabet)
            w = TimedWord.from_timestamps(stamped)
            if accepts(t, w) != accepts_ghost(g, w, limit):
                report.counterexamples.append(f"acceptance: {w}")
                continue
            invariants = ghost_copy_invariants(g, w, limit)
            if not invariants.holds:
                report.counterexamples.append(f"{invariants.failed_check} at round {invariants.failed_round}: {w}")
        report.ok = not report.counterexamples
        report.verdicts.update(words=samples, failures=len(report.counterexamples))
        return report

    # ---- spoilers ----

    def spoiler(
        self, a: Automaton, monitor: Automaton | None = None, linearize: bool = False, samples: int | None = None,
        seed: int | None = None,
    ) -> Report:
        seed, samples = self._seed(seed), self._samples(samples)
        with self.telemetry.create_span("spoiler", attributes={"automaton": a.name, "linearize": linearize}) as span:
            timer = self.telemetry.metrics.timer()
            try:
                result = build_spoiler(a, monitor, linearize, samples, seed, self.config.workbench_arena_node_limit)
            except HistoryDeterministicError:
                logger.info(f"No spoiler for {a.name or 'automaton'}: it is history-deterministic")
                return Report("spoiler", False, {"history_deterministic": True}, seed=seed)
            elapsed = timer()
            cert = result.certificate
            self.telemetry.metrics.construction_latency.record(elapsed, {"operation": "spoiler"})
            self.telemetry.metrics.lassos_sampled.add(cert.lassos_tested, {"purpose": "spoiler"})
            self._certificate("spoiler", cert.passed)
            span.set_attribute("passed", cert.passed)
            document = SpoilerCertificateDocument(
                sim_verdict="adam" if cert.adam_wins_sim else "eve", lassos_tested=cert.lassos_tested,
                linear=cert.linear,
            )
            return Report(
                "spoiler",
                cert.passed,
                {"certificate": document.model_dump(by_alias=True), "states": result.automaton.num_states},
                [str(lasso) for lasso in cert.counterexamples],
                {"total": elapsed},
                seed,
                {"transducer_states": result.transducer.num_states, "plays_states": result.plays.automaton.num_states},
                output=result.automaton,
            )

    # ---- gallery ----

    def gallery_list(self) -> Report:
        return Report("gallery list", True, details={name: e.description for name, e in GALLERY.items()})

    def gallery_show(self, name: str) -> Report:
        entry = get_entry(name)
        details = {"description": entry.description, "facts": entry.facts}
        return Report("gallery show", True, details=details, output=entry.build())

    def gallery_verify(self, name: str, samples: int | None = None, seed: int | None = None) -> Report:
        """Re-check the expected facts of one entry, or of every entry for "all"."""
        seed, samples = self._seed(seed), self._samples(samples)
        names = sorted(GALLERY) if name == "all" else [name]
        report = Report("gallery verify", True, seed=seed)
        with self.telemetry.create_span("gallery_verify", attributes={"entries": len(names)}):
            for entry_name in names:
                timer = self.telemetry.metrics.timer()
                entry_report = verify_entry(entry_name, samples, seed)
                report.timings[entry_name] = timer()
                report.verdicts[entry_name] = entry_report.passed
                report.ok &= entry_report.passed
                for check in entry_report.checks:
                    if not check.ok:
                        report.counterexamples.append(
                            f"{entry_name}.{check.fact}: expected {check.expected}, got {check.actual}"
                        )
        return report

    # ---- sampling ----

    def sample_lassos(
        self, alphabet: list[str] | None = None, automaton: Automaton | None = None, count: int | None = None,
        seed: int | None = None,
    ) -> Report:
        """Sample lassos over an alphabet; with an automaton, annotate each with its membership."""
        seed, count = self._seed(seed), self._samples(count)
        if automaton is not None:
            alphabet = list(automaton.alphabet)
        if not alphabet:
            raise InputError("sample-lassos needs an alphabet or an automaton")
        lassos = sample_lassos(
            alphabet, count, self.config.workbench_max_prefix, self.config.workbench_max_cycle, seed
        )
        self.telemetry.metrics.lassos_sampled.add(len(lassos), {"purpose": "cli"})
        if automaton is None:
            details = {"lassos": [str(lasso) for lasso in lassos]}
        else:
            annotated = [{"lasso": str(lasso), "member": lasso_membership(automaton, lasso)} for lasso in lassos]
            details = {"lassos": annotated}
        return Report("sample-lassos", True, {"count": len(lassos)}, seed=seed, details=details)
