"""
Unified-diff parsing, admission and application

Patches are checked against the slot manifest before anything touches the
checkout: size caps, file extensions, forbidden prefixes and the round's
allowed slots. Application is all-or-nothing.
"""
import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path, PurePosixPath

from pdrsmith.errors import ConfigError, PatchApplyError, PatchRejected, ScopeViolation

logger = logging.getLogger(__name__)

HUNK_RE = re.compile(r'^@@ -(?P<old>\d+)(?:,(?P<old_len>\d+))? \+(?P<new>\d+)(?:,(?P<new_len>\d+))? @@')
DEV_NULL = '/dev/null'


# ============================================================================
# SLOT MANIFEST
# ============================================================================

@dataclass
class SlotManifest:
    slots: dict
    forbidden: list = field(default_factory=list)

    @property
    def names(self):
        return list(self.slots)

    def files(self, slots):
        out = []
        for slot in slots:
            for path in self.slots[slot]['files']:
                if path not in out:
                    out.append(path)
        return out

    def functions(self, slot):
        return list(self.slots[slot].get('functions', []))


def load_manifest(path):
    """slots.json: {"slots": {name: {"files": [...], "functions": [...]}}, "forbidden": [...]}"""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"slot manifest {path}: {exc}") from None
    slots = data.get('slots')
    if not isinstance(slots, dict) or not slots:
        raise ConfigError(f"slot manifest {path} declares no slots")
    for name, entry in slots.items():
        if not entry.get('files'):
            raise ConfigError(f"slot {name} in {path} lists no files")
    return SlotManifest(slots=slots, forbidden=list(data.get('forbidden', [])))


# ============================================================================
# PARSING
# ============================================================================

@dataclass
class Hunk:
    old_start: int
    old_len: int
    new_start: int
    new_len: int
    lines: list = field(default_factory=list)

    def before(self):
        return [l[1:] for l in self.lines if l[:1] in (' ', '-')]

    def after(self):
        return [l[1:] for l in self.lines if l[:1] in (' ', '+')]

    def complete(self):
        return len(self.before()) >= self.old_len and len(self.after()) >= self.new_len


@dataclass
class FilePatch:
    old_path: str
    new_path: str
    hunks: list = field(default_factory=list)

    @property
    def path(self):
        return self.old_path if self.new_path == DEV_NULL else self.new_path

    @property
    def created(self):
        return self.old_path == DEV_NULL

    @property
    def deleted(self):
        return self.new_path == DEV_NULL

    def added_lines(self):
        return sum(1 for h in self.hunks for l in h.lines if l.startswith('+'))


def _strip_prefix(name):
    name = name.split('\t', 1)[0].strip()
    if name == DEV_NULL:
        return name
    if name.startswith(('a/', 'b/')):
        name = name[2:]
    return name


def parse_patch(text):
    """
    Split a unified diff into FilePatch objects.

    Raises:
        PatchRejected: malformed headers or hunk bodies
    """
    files = []
    current = None
    hunk = None
    lines = text.splitlines()
    i = 0
    while i < len(lines):
        line = lines[i]
        if line.startswith('--- ') and i + 1 < len(lines) and lines[i + 1].startswith('+++ '):
            current = FilePatch(_strip_prefix(line[4:]), _strip_prefix(lines[i + 1][4:]))
            files.append(current)
            hunk = None
            i += 2
            continue
        m = HUNK_RE.match(line)
        if m:
            if current is None:
                raise PatchRejected([f"hunk before any file header (line {i + 1})"])
            hunk = Hunk(int(m['old']), int(m['old_len'] or 1), int(m['new']), int(m['new_len'] or 1))
            current.hunks.append(hunk)
        elif hunk is not None and line[:1] in (' ', '+', '-'):
            hunk.lines.append(line)
        elif hunk is not None and line == '':
            if not hunk.complete():
                hunk.lines.append(' ')
        elif line.startswith('\\'):
            pass
        elif hunk is not None and not line.startswith(('diff ', 'index ')):
            raise PatchRejected([f"unexpected line {i + 1} in hunk: {line[:40]!r}"])
        i += 1
    for fp in files:
        for h in fp.hunks:
            if len(h.before()) != h.old_len or len(h.after()) != h.new_len:
                raise PatchRejected([f"{fp.path}: hunk @@ -{h.old_start},{h.old_len} +{h.new_start},{h.new_len} @@ "
                                     f"has {len(h.before())}/{len(h.after())} lines"])
    return files


# ============================================================================
# ADMISSION
# ============================================================================

def check_patch(files, manifest, allowed, caps):
    """
    Admission checks; returns the touched paths.

    Raises:
        PatchRejected: empty patch, caps exceeded, bad extension, deletion
            or a forbidden prefix
        ScopeViolation: a touched file outside the allowed slots' files
    """
    if not files:
        raise PatchRejected(["empty patch"])
    reasons = []
    touched = []
    for fp in files:
        if fp.path not in touched:
            touched.append(fp.path)
    added = sum(fp.added_lines() for fp in files)
    if added > caps.max_added_lines:
        reasons.append(f"{added} added lines exceed the cap of {caps.max_added_lines}")
    if len(touched) > caps.max_files:
        reasons.append(f"{len(touched)} files exceed the cap of {caps.max_files}")
    for fp in files:
        path = PurePosixPath(fp.path)
        if path.is_absolute() or '..' in path.parts:
            reasons.append(f"{fp.path}: path escapes the checkout")
        if path.suffix not in caps.extensions:
            reasons.append(f"{fp.path}: extension not in {', '.join(caps.extensions)}")
        if fp.deleted:
            reasons.append(f"{fp.path}: file deletion is not allowed")
        for prefix in manifest.forbidden:
            if fp.path == prefix.rstrip('/') or fp.path.startswith(prefix):
                reasons.append(f"{fp.path}: forbidden path ({prefix})")
    if reasons:
        raise PatchRejected(reasons)
    scope = set(manifest.files(allowed))
    outside = [p for p in touched if p not in scope]
    if outside:
        raise ScopeViolation([f"{p}: outside the allowed slots ({', '.join(allowed)})" for p in outside])
    return touched


# ============================================================================
# APPLICATION
# ============================================================================

def _locate(lines, before, hint):
    """Index where `before` matches, trying the stated position first"""
    if not before:
        return min(max(hint, 0), len(lines))
    n = len(before)
    if lines[hint:hint + n] == before:
        return hint
    for delta in range(1, len(lines) + 1):
        for pos in (hint - delta, hint + delta):
            if 0 <= pos <= len(lines) - n and lines[pos:pos + n] == before:
                return pos
    return None


def patched_text(original, fp):
    """New file contents after applying every hunk of fp"""
    lines = original.splitlines() if original else []
    trailing = original.endswith('\n') if original else True
    offset = 0
    for h in fp.hunks:
        anchor = h.old_start - 1 if h.old_len else h.old_start
        pos = _locate(lines, h.before(), max(anchor, 0) + offset)
        if pos is None:
            raise PatchApplyError(f"{fp.path}: hunk @@ -{h.old_start},{h.old_len} @@ does not match")
        lines[pos:pos + len(h.before())] = h.after()
        offset = pos + len(h.after()) - (max(anchor, 0) + h.old_len)
    return "\n".join(lines) + ("\n" if trailing and lines else "")


def apply_patch(root, files):
    """Apply parsed file patches under root; nothing is written unless all hunks fit"""
    root = Path(root)
    staged = {}
    for fp in files:
        target = root / fp.path
        if fp.created:
            if target.exists():
                raise PatchApplyError(f"{fp.path}: already exists")
            original = ''
        else:
            if not target.exists():
                raise PatchApplyError(f"{fp.path}: no such file")
            original = staged.get(target, target.read_text())
        staged[target] = patched_text(original, fp)
    for target, text in staged.items():
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text)
    logger.info("applied patch to %d file(s)", len(staged))
    return [str(t.relative_to(root)) for t in staged]
