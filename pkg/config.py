import os
import yaml
from dotenv import load_dotenv

SETTINGS_FILE = os.environ.get("LANGEVIN_SETTINGS", "settings.yaml")

load_dotenv()

config = {}
if os.path.exists(SETTINGS_FILE):
    with open(SETTINGS_FILE, "r") as file:
        config = yaml.safe_load(file) or {}

# Get settings
DEBUG = str(os.environ.get("LANGEVIN_DEBUG", config.get("DEBUG", False))).lower() in ("1", "true", "yes")
LOG_FILE = config.get("LOG_FILE", "langevin.log")
OUTPUT_DIR = config.get("OUTPUT_DIR", "results")
CODE_VERSION = config.get("CODE_VERSION", "0.3.0")
DEFAULT_WORKERS = int(os.environ.get("LANGEVIN_WORKERS", config.get("DEFAULT_WORKERS", 1)))

# Numerical defaults shared by the experiment handlers
DEFAULT_NS_FINE = int(config.get("DEFAULT_NS_FINE", 4096))
REFERENCE_RATIO = int(config.get("REFERENCE_RATIO", 64))
