# Keeps tests/helpers.py importable when pytest is launched from anywhere.
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))
