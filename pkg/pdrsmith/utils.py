"""
Utility functions for pdrsmith
"""
import hashlib
import logging
import re
from pathlib import Path

from rich.console import Console
from rich.logging import RichHandler

IGNORED_DIRS = {'__pycache__', '.pytest_cache', '.git'}
IGNORED_SUFFIXES = {'.pyc', '.pyo'}


def setup_logging(verbosity=0, default='WARNING'):
    """
    Route library logging through Rich on standard error.

    Args:
        verbosity: 0 keeps `default`, 1 is INFO, 2+ is DEBUG
    """
    if verbosity >= 2:
        level = logging.DEBUG
    elif verbosity == 1:
        level = logging.INFO
    else:
        level = getattr(logging, str(default).upper(), logging.WARNING)
    root = logging.getLogger()
    for handler in list(root.handlers):
        if isinstance(handler, RichHandler):
            root.removeHandler(handler)
    handler = RichHandler(console=Console(stderr=True), show_path=False, rich_tracebacks=False)
    handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
    root.addHandler(handler)
    root.setLevel(level)


def instance_id(path):
    """
    Stable instance name: file name without the AIGER extension

    Example:
        suite/counter4_b10.aag -> "counter4_b10"
    """
    name = Path(path).name
    for ext in ('.aag', '.aig'):
        if name.endswith(ext):
            return name[:-len(ext)]
    return name


def bucket_key(name):
    """
    Instance family: file name prefix before the first run of digits

    Example:
        "counter4_b10" -> "counter"
        "rand_s17" -> "rand_s"
    """
    match = re.match(r'^([^0-9]*)', instance_id(name))
    prefix = match.group(1) if match else ''
    return prefix or 'other'


def artifact_paths(instance, artifact_dir=None):
    """(.cert path, .cex path) beside the instance or inside artifact_dir"""
    instance = Path(instance)
    base = Path(artifact_dir) if artifact_dir else instance.parent
    stem = instance_id(instance)
    return base / f"{stem}.cert", base / f"{stem}.cex"


def sha256_text(text):
    if isinstance(text, str):
        text = text.encode('utf-8')
    return hashlib.sha256(text).hexdigest()


def tree_files(root):
    """Relative POSIX paths of all files under root, build litter excluded"""
    root = Path(root)
    out = []
    for path in sorted(root.rglob('*')):
        rel = path.relative_to(root)
        if any(part in IGNORED_DIRS for part in rel.parts):
            continue
        if path.is_file() and path.suffix not in IGNORED_SUFFIXES:
            out.append(rel.as_posix())
    return out


def tree_hash(root):
    """Content hash over relative paths and file bytes"""
    root = Path(root)
    digest = hashlib.sha256()
    for rel in tree_files(root):
        digest.update(rel.encode('utf-8') + b'\0')
        digest.update(hashlib.sha256((root / rel).read_bytes()).digest())
    return digest.hexdigest()
