"""Allow ``python -m pdrsmith``"""
from pdrsmith.cli import cli

if __name__ == '__main__':
    cli()
