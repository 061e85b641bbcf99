import sys
from pathlib import Path

# Make plot_results importable when tests run from the repository root.
sys.path.insert(0, str(Path(__file__).resolve().parents[1]))
