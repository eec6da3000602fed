"""
Champion/challenger evolution loop

Each round: select a scope, ask the programmer agent for a patch, admit and
apply it, build, run the hard gate, benchmark, diagnose, then promote or roll
back. Every round is recorded whatever its outcome, and state.json is saved
after each one so a run can resume.
"""
import logging
import tempfile
from pathlib import Path

from pdrsmith.bench import load_suite, write_metrics
from pdrsmith.errors import (
    AgentError, BuildFailed, ConfigError, PatchApplyError, PatchRejected, PromptOverflowError,
)
from pdrsmith.evolve.agent import AgentEvaluator, EvaluationContext, RubricEvaluator, make_agent
from pdrsmith.evolve.gate import PROMOTE, REVERT, BenchSettings, admit_report, bench_checkout, hard_gate, promote
from pdrsmith.evolve.moves import MoveSet
from pdrsmith.evolve.patch import apply_patch, check_patch, load_manifest, parse_patch
from pdrsmith.evolve.policy import PolicyState, Scope, SweepState, compass_jump
from pdrsmith.evolve.prompt import assemble_prompt, code_snippets
from pdrsmith.evolve.provenance import RunDirectory, RunState
from pdrsmith.evolve.schemas import GateSummary, IterationRecord
from pdrsmith.evolve.workspace import Workspace, copy_tree, purge_bytecode
from pdrsmith.utils import sha256_text, tree_hash

logger = logging.getLogger(__name__)


def bench_settings(config):
    return BenchSettings(
        timeout=config.timeout,
        parallelism=config.parallelism,
        command=tuple(config.bench_command),
        pythonpath=tuple(str(p) for p in config.pythonpath),
        clock=config.clock,
        effort_rate=config.effort_rate,
    )


def check_gate_suite(config):
    """The gate suite must exercise both artifact kinds"""
    labels = {entry.expected for entry in load_suite([str(p) for p in config.gate_suite])}
    if not {'SAFE', 'UNSAFE'} <= labels:
        raise ConfigError("gate suite needs at least one instance labelled SAFE and one labelled UNSAFE")


class Evolution:
    """
    One evolution run over a RunConfig.

    Args:
        config: resolved RunConfig
        agent: programmer agent (built from config.agent when None)
        evaluator: object with diagnose(EvaluationContext) (rubric by default)
    """

    def __init__(self, config, agent=None, evaluator=None):
        self.config = config
        self.manifest = load_manifest(config.manifest_path())
        self.slots = self.manifest.names
        self.workspace = Workspace(config.checkout, config.run_dir)
        self.run_dir = RunDirectory(config.run_dir)
        self.settings = bench_settings(config)
        self.agent = agent
        self.evaluator = evaluator
        self.state = None

    # ------------------------------------------------------------------
    # Setup
    # ------------------------------------------------------------------

    def _agent(self):
        if self.agent is None:
            self.agent = make_agent(self.config.agent, self.slots)
        return self.agent

    def _evaluator(self):
        if self.evaluator is None:
            if self.config.evaluator == 'agent':
                self.evaluator = AgentEvaluator(self._agent(), self._render_evaluator)
            else:
                self.evaluator = RubricEvaluator()
        return self.evaluator

    def start(self, resume=False):
        """Fresh run (baseline gate + benchmark) or resume from state.json"""
        if self.run_dir.has_state():
            if not resume:
                raise ConfigError(f"{self.config.run_dir} already holds a run; pass --resume to continue it")
            self.state = self.run_dir.load_state(self.slots)
            self.run_dir.truncate_index(self.state.round)
            if self.workspace.hash() != self.state.champion_hash:
                logger.warning("checkout differs from the recorded champion, restoring")
                self.workspace.restore(self.state.champion_hash)
            return self.state
        if resume:
            raise ConfigError(f"nothing to resume in {self.config.run_dir}")

        check_gate_suite(self.config)
        self.run_dir.save_config(self.config)
        purge_bytecode(self.config.checkout)
        self.workspace.snapshot_baseline()
        champion_hash = self.workspace.snapshot_champion()
        self.workspace.build(self.config.build_command)

        gate = hard_gate(self.config.checkout, self._suite(self.config.gate_suite), self.settings)
        if not gate.passed:
            raise ConfigError("the baseline checkout fails the gate suite: " + "; ".join(gate.reasons))
        report = bench_checkout(self.config.checkout, self._suite(self.config.evolution_suite), self.settings)
        admitted, reasons = admit_report(report)
        if admitted is None:
            raise ConfigError("the baseline checkout fails on the evolution suite: " + "; ".join(reasons))
        write_metrics(report, self.config.run_dir / 'baseline_metrics.json')

        policy_cfg = self.config.policy
        self.state = RunState(
            policy=PolicyState(p_jump=policy_cfg.p_jump, p_min=policy_cfg.p_min, p_max=policy_cfg.p_max,
                               jump_size=policy_cfg.jump_size, weights=tuple(policy_cfg.weights),
                               seed=self.config.seed),
            sweep=SweepState(order=list(self.slots), patience=policy_cfg.sweep_patience),
            champion_hash=champion_hash,
            champion_report=report,
            best_par2=report.par2.avg_sec,
        )
        self.run_dir.save_state(self.state)
        logger.info("baseline par2 %.4f solved %d", report.par2.avg_sec, report.solved)
        return self.state

    def _suite(self, paths):
        return [str(p) for p in paths]

    # ------------------------------------------------------------------
    # Scope
    # ------------------------------------------------------------------

    def select_scope(self, mode, rng):
        state = self.state
        if mode == 'sweep':
            slot = state.sweep.slot
            guidance = [m for m in state.moveset if m.slot == slot][:1]
            return Scope([slot], guidance, state.policy.p_jump)
        moveset = MoveSet.of(state.moveset, state.policy.weights)
        return compass_jump(self.slots, moveset, state.policy.history, state.policy, rng)

    # ------------------------------------------------------------------
    # Prompts
    # ------------------------------------------------------------------

    def _programmer_prompt(self, scope, slim=False):
        snippets = code_snippets(self.config.checkout, self.manifest, scope.allowed,
                                 self.config.prompt.snippet_chars)
        return assemble_prompt(
            self.state.last_patch, self.state.champion_report, self.state.champion_report,
            self.config.kb_dir, scope.allowed, self.config.prompt, snippets=snippets,
            moves=scope.guidance, caps=self.config.caps, slim=slim,
        )

    def _render_evaluator(self, ctx):
        extra = {'gate_passed': ctx.gate_passed, 'build_failed': ctx.build_failed,
                 'gate_reasons': '; '.join(ctx.gate_reasons) or '-', 'promotion': ctx.promotion or '-'}
        if ctx.challenger is not None:
            extra.update(par2=f"{ctx.challenger.par2.avg_sec:.4f}", solved=ctx.challenger.solved,
                         timeouts=ctx.challenger.timeouts)
        return assemble_prompt(ctx.patch, ctx.champion, ctx.challenger, self.config.kb_dir, ctx.slots,
                               self.config.prompt, moves=self.state.moveset, template='evaluator.j2',
                               extra=extra).text

    def _propose(self, scope):
        """Proposal and the prompt used; one slim retry on any agent failure"""
        agent = self._agent()
        last_error = None
        for slim in (False, True):
            try:
                prompt = self._programmer_prompt(scope, slim=slim)
            except PromptOverflowError as exc:
                last_error = exc
                break
            try:
                return agent.propose(prompt.text), prompt
            except AgentError as exc:
                logger.warning("programmer agent failed (%s prompt): %s", 'slim' if slim else 'full', exc)
                last_error = exc
        return None, last_error

    # ------------------------------------------------------------------
    # Iteration
    # ------------------------------------------------------------------

    def run_iteration(self):
        """Execute the next round and return its IterationRecord"""
        state = self.state
        round_no = state.round + 1
        phase = self.config.phase_at(round_no)
        if phase is None:
            raise ConfigError(f"round {round_no} is past the configured schedule")
        rng = state.policy.rng()
        scope = self.select_scope(phase.mode, rng)
        state.policy.save_rng(rng)
        if phase.mode == 'compass_jump':
            state.policy.p_jump = scope.p_jump
        champion = state.champion_report

        base = dict(round=round_no, mode=phase.mode, allowed=scope.allowed, guidance=scope.guidance,
                    jumped=scope.jumped, p_jump=state.policy.p_jump)
        artifacts = {}
        proposal, prompt = self._propose(scope)
        if proposal is None:
            record = IterationRecord(**base, status='aborted', reasons=[str(prompt)], promotion=REVERT,
                                     champion_hash=state.champion_hash)
            return self._finish(record, improved=False, artifacts=artifacts)

        patch = proposal.patch
        base.update(slim_prompt=prompt.slim, patch_sha256=sha256_text(patch),
                    primary_slot=proposal.hypothesis.primary_slot)
        artifacts.update(patch=patch, hypothesis=proposal.hypothesis, prompt=prompt.text)

        ctx = EvaluationContext(slots=self.slots, champion=champion, patch=patch)
        try:
            files = parse_patch(patch)
            touched = check_patch(files, self.manifest, scope.allowed, self.config.caps)
            if proposal.hypothesis.primary_slot not in scope.allowed:
                raise PatchRejected([f"primary slot {proposal.hypothesis.primary_slot} is outside the round's scope"])
        except PatchRejected as exc:
            record = IterationRecord(**base, status='rejected', reasons=exc.reasons, promotion=REVERT,
                                     champion_hash=state.champion_hash)
            state.last_patch = patch
            return self._finish(record, improved=False, artifacts=artifacts)
        base['touched'] = touched

        try:
            apply_patch(self.config.checkout, files)
        except PatchApplyError as exc:
            self.workspace.restore(state.champion_hash)
            record = IterationRecord(**base, status='apply_failed', reasons=[str(exc)], promotion=REVERT,
                                     champion_hash=state.champion_hash)
            state.last_patch = patch
            return self._finish(record, improved=False, artifacts=artifacts)

        try:
            artifacts['build_log'] = self.workspace.build(self.config.build_command)
        except BuildFailed as exc:
            artifacts['build_log'] = exc.log
            ctx.build_failed = True
            diagnosis = self._evaluator().diagnose(ctx)
            artifacts['diagnosis'] = diagnosis
            self.workspace.restore(state.champion_hash)
            record = IterationRecord(**base, status='build_failed', reasons=[str(exc)], decision=diagnosis.decision,
                                     promotion=REVERT, champion_hash=state.champion_hash)
            state.last_patch = patch
            return self._finish(record, improved=False, artifacts=artifacts, moves=diagnosis.moveset)

        gate = hard_gate(self.config.checkout, self._suite(self.config.gate_suite), self.settings)
        gate_summary = GateSummary(passed=gate.passed, reasons=gate.reasons)
        artifacts['gate'] = gate_summary.model_dump()
        challenger = None
        promotion = REVERT
        reasons = list(gate.reasons)
        if gate.passed:
            challenger = bench_checkout(self.config.checkout, self._suite(self.config.evolution_suite), self.settings)
            artifacts['report'] = challenger
            admitted, failures = admit_report(challenger)
            if admitted is None:
                gate_summary = GateSummary(passed=False, reasons=failures)
                artifacts['gate'] = gate_summary.model_dump()
                reasons = failures
            else:
                champion_admitted, _ = admit_report(champion)
                promotion = promote(champion_admitted, admitted, self.config.regression_budget)
        else:
            artifacts['report'] = gate.report

        ctx.challenger = challenger
        ctx.gate_passed = gate_summary.passed
        ctx.gate_reasons = tuple(gate_summary.reasons)
        ctx.promotion = promotion
        diagnosis = self._evaluator().diagnose(ctx)
        artifacts['diagnosis'] = diagnosis

        if promotion == PROMOTE:
            new_hash = self.workspace.snapshot_champion()
            state.champion_report = challenger
            state.champion_hash = new_hash
            state.promoted.append(round_no)
            status = 'promoted'
        else:
            self.workspace.restore(state.champion_hash)
            status = 'reverted' if gate_summary.passed else 'gate_failed'
        state.last_patch = patch

        record = IterationRecord(
            **base, status=status, reasons=reasons, gate=gate_summary,
            par2=challenger.par2.avg_sec if challenger else None,
            solved=challenger.solved if challenger else None,
            decision=diagnosis.decision, promotion=promotion, champion_hash=state.champion_hash,
        )
        return self._finish(record, improved=promotion == PROMOTE, artifacts=artifacts, moves=diagnosis.moveset)

    def _finish(self, record, improved, artifacts, moves=None):
        state = self.state
        new_best = state.champion_report.par2.avg_sec
        state.policy.history.append(new_best - state.best_par2)
        state.best_par2 = min(state.best_par2, new_best)
        if record.mode == 'sweep':
            state.sweep.record(improved)
        if moves is not None:
            state.moveset = list(moves)
        state.round = record.round
        self.run_dir.write_round(record, **artifacts)
        self.run_dir.save_state(state)
        return record

    def run(self, rounds=None, on_round=None):
        """Run rounds until the schedule ends or `rounds` more have executed"""
        records = []
        remaining = self.config.total_rounds - self.state.round
        if rounds is not None:
            remaining = min(remaining, rounds)
        for _ in range(max(0, remaining)):
            record = self.run_iteration()
            records.append(record)
            if on_round:
                on_round(record, self.state)
        return records


# ============================================================================
# REPLAY
# ============================================================================

def rebuild_champion(run_dir, target):
    """
    Rebuild the champion from the baseline snapshot and the promoted diffs.

    Returns:
        (tree hash of the rebuild, recorded champion hash)
    """
    run = RunDirectory(run_dir)
    state = run.load_state()
    copy_tree(Path(run_dir) / 'baseline', target)
    for round_no, diff in run.promoted_patches():
        logger.info("replaying round %d", round_no)
        apply_patch(target, parse_patch(diff))
    return tree_hash(target), state.champion_hash


def replay_run(config, run_dir=None):
    """
    Rebuild the recorded champion in a scratch directory and gate it.

    Returns:
        (hash_matches, GateResult)
    """
    run_dir = Path(run_dir or config.run_dir)
    with tempfile.TemporaryDirectory(prefix='pdrsmith-replay-') as scratch:
        target = Path(scratch) / 'checkout'
        rebuilt, recorded = rebuild_champion(run_dir, target)
        Workspace(target, Path(scratch) / 'run').build(config.build_command)
        gate = hard_gate(target, [str(p) for p in config.gate_suite], bench_settings(config))
    return rebuilt == recorded, gate
