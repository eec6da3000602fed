"""
Versioned documents exchanged with the agents, plus the run configuration

hypothesis_v1 and diagnosis_v1 are validated on ingest; RunConfig is read
from TOML or JSON with ``version = 1``.
"""
import json
import tomllib
from pathlib import Path
from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from pdrsmith.bench import DEFAULT_COMMAND
from pdrsmith.config import get_settings
from pdrsmith.errors import ConfigError
from pdrsmith.evolve.moves import DEFAULT_WEIGHTS, Move

HYPOTHESIS_SCHEMA = 'hypothesis_v1'
DIAGNOSIS_SCHEMA = 'diagnosis_v1'

DECISIONS = ('ACCEPT', 'REVERT', 'RETRY')


# ============================================================================
# AGENT DOCUMENTS
# ============================================================================

class Hypothesis(BaseModel):
    model_config = ConfigDict(extra='forbid', populate_by_name=True)

    schema_name: Literal['hypothesis_v1'] = Field(default=HYPOTHESIS_SCHEMA, alias='schema')
    primary_slot: str
    cross_slot_touches: List[str] = Field(default_factory=list)
    expected_metrics: Dict[str, Literal['up', 'down', 'same']] = Field(default_factory=dict)
    rationale: str = ''
    fallback: str


class Diagnosis(BaseModel):
    model_config = ConfigDict(extra='forbid', populate_by_name=True)

    schema_name: Literal['diagnosis_v1'] = Field(default=DIAGNOSIS_SCHEMA, alias='schema')
    decision: Literal['ACCEPT', 'REVERT', 'RETRY']
    reasons: List[str] = Field(min_length=3, max_length=6)
    evidence: str = ''
    moveset: List[Move] = Field(default_factory=list)
    build_failed: bool = False

    @model_validator(mode='after')
    def moveset_present(self):
        if not self.moveset and not self.build_failed:
            raise ValueError("moveset may only be empty after a fatal build error")
        return self


def dump_document(model):
    return json.dumps(model.model_dump(mode='json', by_alias=True), indent=2, sort_keys=True) + "\n"


# ============================================================================
# RUN CONFIGURATION
# ============================================================================

class Phase(BaseModel):
    model_config = ConfigDict(extra='forbid')

    mode: Literal['sweep', 'compass_jump']
    rounds: int = Field(ge=0)


class PolicyConfig(BaseModel):
    model_config = ConfigDict(extra='forbid')

    weights: List[float] = Field(default_factory=lambda: list(DEFAULT_WEIGHTS), min_length=3, max_length=3)
    p_jump: float = Field(default=0.2, ge=0.0, le=1.0)
    p_min: float = Field(default=0.05, ge=0.0, le=1.0)
    p_max: float = Field(default=0.6, ge=0.0, le=1.0)
    jump_size: int = Field(default=2, ge=2, le=3)
    sweep_patience: int = Field(default=5, ge=1)

    @model_validator(mode='after')
    def bounds_ordered(self):
        if not self.p_min <= self.p_jump <= self.p_max:
            raise ValueError("need p_min <= p_jump <= p_max")
        return self


class AgentConfig(BaseModel):
    model_config = ConfigDict(extra='forbid')

    kind: Literal['scripted', 'http'] = 'scripted'
    transcript: Optional[Path] = None
    endpoint: Optional[str] = None
    api_key: Optional[str] = None
    model: Optional[str] = None
    timeout: float = Field(default=120.0, gt=0)


class PatchCaps(BaseModel):
    model_config = ConfigDict(extra='forbid')

    max_added_lines: int = Field(default=80, ge=1)
    max_files: int = Field(default=3, ge=1)
    extensions: List[str] = Field(default_factory=lambda: ['.py'])


class PromptBudgets(BaseModel):
    """Character and line limits for prompt sections"""
    model_config = ConfigDict(extra='forbid')

    total_chars: int = Field(default=24000, gt=0)
    snippet_chars: int = Field(default=8000, gt=0)
    metrics_chars: int = Field(default=3000, gt=0)
    log_lines: int = Field(default=40, gt=0)
    log_chars: int = Field(default=3000, gt=0)
    kb_chars: int = Field(default=4000, gt=0)
    top_k_percent: float = Field(default=10.0, gt=0, le=100)


class RunConfig(BaseModel):
    model_config = ConfigDict(extra='forbid')

    version: Literal[1]
    checkout: Path
    run_dir: Path = Path('evolve-run')
    manifest: Optional[Path] = None
    build_command: List[str] = Field(default_factory=lambda: ['{python}', '-m', 'compileall', '-q', '.'])
    bench_command: List[str] = Field(default_factory=lambda: list(DEFAULT_COMMAND))
    pythonpath: List[Path] = Field(default_factory=list)
    gate_suite: List[Path]
    evolution_suite: List[Path]
    timeout: float = Field(default=10.0, gt=0)
    parallelism: int = Field(default=1, ge=1)
    clock: Literal['wall', 'effort'] = 'wall'
    effort_rate: float = Field(default=10000.0, gt=0)
    schedule: List[Phase] = Field(default_factory=lambda: [Phase(mode='compass_jump', rounds=10)])
    policy: PolicyConfig = Field(default_factory=PolicyConfig)
    agent: AgentConfig = Field(default_factory=AgentConfig)
    evaluator: Literal['rubric', 'agent'] = 'rubric'
    regression_budget: int = Field(default=1, ge=0)
    seed: int = 0
    caps: PatchCaps = Field(default_factory=PatchCaps)
    prompt: PromptBudgets = Field(default_factory=PromptBudgets)
    kb_dir: Optional[Path] = None

    @property
    def total_rounds(self):
        return sum(phase.rounds for phase in self.schedule)

    def phase_at(self, round_no):
        """Phase of the 1-based round number, or None past the schedule"""
        end = 0
        for phase in self.schedule:
            end += phase.rounds
            if round_no <= end:
                return phase
        return None

    def manifest_path(self):
        if self.manifest:
            return self.manifest
        packaged = self.checkout / 'pdrsmith' / 'slots.json'
        return packaged if packaged.exists() else self.checkout / 'slots.json'


def _resolve(base, value):
    path = Path(value)
    return path if path.is_absolute() else (base / path).resolve()


def resolve_paths(config, base):
    """Absolute paths, relative entries taken against base"""
    updates = dict(
        checkout=_resolve(base, config.checkout),
        run_dir=_resolve(base, config.run_dir),
        pythonpath=[_resolve(base, p) for p in config.pythonpath],
        gate_suite=[_resolve(base, p) for p in config.gate_suite],
        evolution_suite=[_resolve(base, p) for p in config.evolution_suite],
    )
    if config.manifest:
        updates['manifest'] = _resolve(base, config.manifest)
    if config.kb_dir:
        updates['kb_dir'] = _resolve(base, config.kb_dir)
    agent = config.agent
    if agent.transcript:
        agent = agent.model_copy(update={'transcript': _resolve(base, agent.transcript)})
    settings = get_settings()
    agent = agent.model_copy(update={
        'endpoint': agent.endpoint or settings.agent_endpoint,
        'api_key': agent.api_key or settings.agent_api_key,
        'model': agent.model or settings.agent_model,
    })
    updates['agent'] = agent
    return config.model_copy(update=updates)


def load_run_config(path):
    """
    Read and validate a run configuration.

    Raises:
        ConfigError: unreadable file, unknown keys, wrong version or bad values
    """
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    try:
        data = tomllib.loads(raw.decode('utf-8')) if path.suffix == '.toml' else json.loads(raw)
    except (tomllib.TOMLDecodeError, json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ConfigError(f"{path}: {exc}") from None
    try:
        config = RunConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    config = resolve_paths(config, path.parent.resolve())
    checkout = config.checkout.resolve()
    if config.run_dir.resolve().is_relative_to(checkout):
        raise ConfigError("run_dir must not live inside the checkout")
    return config


# ============================================================================
# PROVENANCE RECORDS
# ============================================================================

class GateSummary(BaseModel):
    passed: bool
    reasons: List[str] = Field(default_factory=list)


class IterationRecord(BaseModel):
    """
    Everything a round decided. Only deterministic values are kept here;
    timings live in the round's metrics.json.
    """
    model_config = ConfigDict(extra='forbid')

    round: int
    mode: Literal['sweep', 'compass_jump']
    allowed: List[str]
    guidance: List[Move] = Field(default_factory=list)
    jumped: bool = False
    p_jump: float
    slim_prompt: bool = False
    patch_sha256: Optional[str] = None
    touched: List[str] = Field(default_factory=list)
    primary_slot: Optional[str] = None
    status: Literal['promoted', 'reverted', 'rejected', 'apply_failed', 'build_failed', 'gate_failed', 'aborted']
    reasons: List[str] = Field(default_factory=list)
    gate: Optional[GateSummary] = None
    par2: Optional[float] = None
    solved: Optional[int] = None
    decision: Optional[Literal['ACCEPT', 'REVERT', 'RETRY']] = None
    promotion: Literal['PROMOTE', 'REVERT']
    champion_hash: str
