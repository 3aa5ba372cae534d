import sys
from pathlib import Path

# make the sibling helper modules (oracle, support) importable from any cwd
sys.path.insert(0, str(Path(__file__).parent))
