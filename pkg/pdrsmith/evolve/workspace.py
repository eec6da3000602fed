"""
Champion checkout management

The checkout is edited in place. A snapshot of the champion lives in the run
directory so any rejected challenger can be rolled back exactly.
"""
import logging
import shutil
import subprocess
import sys
from pathlib import Path

from pdrsmith.errors import BuildFailed, InternalError
from pdrsmith.utils import tree_files, tree_hash

logger = logging.getLogger(__name__)


def copy_tree(src, dst):
    """Mirror src's tracked files into dst, removing files dst has extra"""
    src, dst = Path(src), Path(dst)
    dst.mkdir(parents=True, exist_ok=True)
    wanted = set(tree_files(src))
    for rel in tree_files(dst):
        if rel not in wanted:
            (dst / rel).unlink()
    for rel in sorted(wanted):
        target = dst / rel
        target.parent.mkdir(parents=True, exist_ok=True)
        shutil.copyfile(src / rel, target)


def purge_bytecode(root):
    for cache in Path(root).rglob('__pycache__'):
        shutil.rmtree(cache, ignore_errors=True)


class Workspace:
    """A checkout plus its champion snapshot"""

    def __init__(self, checkout, run_dir):
        self.checkout = Path(checkout)
        self.run_dir = Path(run_dir)
        self.champion_dir = self.run_dir / 'champion'
        self.baseline_dir = self.run_dir / 'baseline'

    def hash(self):
        return tree_hash(self.checkout)

    def snapshot_baseline(self):
        copy_tree(self.checkout, self.baseline_dir)

    def snapshot_champion(self):
        copy_tree(self.checkout, self.champion_dir)
        return self.hash()

    def restore(self, expected_hash=None):
        """Roll the checkout back to the champion snapshot"""
        copy_tree(self.champion_dir, self.checkout)
        purge_bytecode(self.checkout)
        current = self.hash()
        if expected_hash is not None and current != expected_hash:
            raise InternalError("rollback left the checkout off the champion hash",
                                {'expected': expected_hash, 'actual': current})
        logger.info("checkout restored to champion %s", current[:12])
        return current

    def build(self, command, timeout=600):
        """
        Run the build command in the checkout.

        Returns:
            build log text

        Raises:
            BuildFailed: non-zero exit or timeout, with the log attached
        """
        purge_bytecode(self.checkout)
        argv = [part.format(python=sys.executable) for part in command]
        try:
            proc = subprocess.run(argv, cwd=self.checkout, capture_output=True, text=True, timeout=timeout)
        except subprocess.TimeoutExpired:
            raise BuildFailed(f"build timed out after {timeout}s", log='') from None
        except OSError as exc:
            raise BuildFailed(f"build command failed to start: {exc}", log='') from None
        log = f"$ {' '.join(argv)}\n{proc.stdout}{proc.stderr}"
        if proc.returncode != 0:
            raise BuildFailed(f"build exited with {proc.returncode}", log=log)
        return log
