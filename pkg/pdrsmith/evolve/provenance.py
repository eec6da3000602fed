"""
Run directory layout

    run_dir/
      config.json          resolved RunConfig
      state.json           resumable loop state
      index.jsonl          one IterationRecord per line, append-only
      baseline/            checkout as it was before round 1
      champion/            current champion snapshot
      baseline_metrics.json
      rounds/r001/         patch.diff, Hypothesis.json, build.log, gate.json,
                           metrics.json, diagnosis.json, prompt.txt, record.json
"""
import json
import logging
from pathlib import Path
from typing import List

from pydantic import BaseModel, ConfigDict, Field

from pdrsmith.bench import BenchReport, dump_metrics
from pdrsmith.evolve.moves import Move
from pdrsmith.evolve.policy import PolicyState, SweepState
from pdrsmith.evolve.schemas import IterationRecord, dump_document

logger = logging.getLogger(__name__)

STATE_VERSION = 1


class RunState(BaseModel):
    model_config = ConfigDict(extra='forbid')

    version: int = STATE_VERSION
    round: int = 0
    policy: PolicyState
    sweep: SweepState
    champion_hash: str
    champion_report: BenchReport
    best_par2: float
    moveset: List[Move] = Field(default_factory=list)
    last_patch: str = ''
    promoted: List[int] = Field(default_factory=list)


class RunDirectory:
    def __init__(self, root):
        self.root = Path(root)

    @property
    def state_path(self):
        return self.root / 'state.json'

    @property
    def index_path(self):
        return self.root / 'index.jsonl'

    def round_dir(self, round_no):
        return self.root / 'rounds' / f"r{round_no:03d}"

    def has_state(self):
        return self.state_path.exists()

    def save_state(self, state):
        self.root.mkdir(parents=True, exist_ok=True)
        tmp = self.state_path.with_suffix('.tmp')
        tmp.write_text(json.dumps(state.model_dump(mode='json', by_alias=True), indent=2, sort_keys=True) + "\n")
        tmp.replace(self.state_path)

    def load_state(self, slots=None):
        context = {'slots': list(slots)} if slots else None
        return RunState.model_validate_json(self.state_path.read_text(), context=context)

    def save_config(self, config):
        self.root.mkdir(parents=True, exist_ok=True)
        (self.root / 'config.json').write_text(config.model_dump_json(indent=2) + "\n")

    def write_round(self, record, patch=None, hypothesis=None, build_log=None, gate=None,
                    report=None, diagnosis=None, prompt=None):
        """Write the round's artifacts, then append its record to the index"""
        target = self.round_dir(record.round)
        target.mkdir(parents=True, exist_ok=True)
        if patch is not None:
            (target / 'patch.diff').write_text(patch)
        if hypothesis is not None:
            (target / 'Hypothesis.json').write_text(dump_document(hypothesis))
        if build_log is not None:
            (target / 'build.log').write_text(build_log)
        if gate is not None:
            (target / 'gate.json').write_text(json.dumps(gate, indent=2, sort_keys=True) + "\n")
        if report is not None:
            (target / 'metrics.json').write_text(dump_metrics(report))
        if diagnosis is not None:
            (target / 'diagnosis.json').write_text(dump_document(diagnosis))
        if prompt is not None:
            (target / 'prompt.txt').write_text(prompt)
        line = record.model_dump_json()
        (target / 'record.json').write_text(line + "\n")
        with self.index_path.open('a') as fh:
            fh.write(line + "\n")
        logger.info("round %d recorded in %s", record.round, target)

    def records(self):
        if not self.index_path.exists():
            return []
        return [IterationRecord.model_validate_json(line)
                for line in self.index_path.read_text().splitlines() if line.strip()]

    def promoted_patches(self):
        """(round, diff text) for every promoted round, in order"""
        out = []
        for record in self.records():
            if record.promotion == 'PROMOTE':
                out.append((record.round, (self.round_dir(record.round) / 'patch.diff').read_text()))
        return out

    def truncate_index(self, last_round):
        """Drop index lines past last_round (a crash between index and state writes)"""
        if not self.index_path.exists():
            return
        kept = [r for r in self.records() if r.round <= last_round]
        self.index_path.write_text("".join(r.model_dump_json() + "\n" for r in kept))
