"""JSON schemas for CLI records: ``record`` for the envelope, one per command for ``outputs``."""
import json
from importlib import resources


def load_schema(name: str) -> dict:
    return json.loads(resources.files(__name__).joinpath(f"{name}.json").read_text())


def outputs_schema_name(command: str) -> str:
    """'series power-structure' -> 'series_power_structure'."""
    return command.replace(" ", "_").replace("-", "_")
