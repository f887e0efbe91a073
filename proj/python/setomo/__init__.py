import json

from ._setomo import *  # noqa: F401,F403
from ._setomo import SetomoError, __version__, _run_scenario


def run_scenario(config, scenario):
    """Run one CLI scenario in memory; returns (files, summary)."""
    text = config if isinstance(config, str) else json.dumps(config)
    files, summary = _run_scenario(text, scenario)
    return files, json.loads(summary)
