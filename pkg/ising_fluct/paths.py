from pathlib import Path

base_path = Path(__file__).parent

configuration_path = base_path / "configuration"
default_config_path = configuration_path / "defaults.yaml"
