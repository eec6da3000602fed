"""pdrsmith commands"""
from pdrsmith.commands.version_cmd import version
from pdrsmith.commands.check_cmd import check
from pdrsmith.commands.certify_cmd import certify, replay
from pdrsmith.commands.bench_cmd import bench
from pdrsmith.commands.corpus_cmd import corpus
from pdrsmith.commands.evolve_cmd import evolve
from pdrsmith.commands.help_cmd import help_cmd

__all__ = ['version', 'check', 'certify', 'replay', 'bench', 'corpus', 'evolve', 'help_cmd']
