import sys
from pathlib import Path

TESTS_DIR = Path(__file__).parent
if str(TESTS_DIR) not in sys.path:
    sys.path.insert(0, str(TESTS_DIR))

# Committed reference documents live with the verification core's test
# fixtures; they are read as plain files (the core is never imported here).
GOLDEN_DIR = TESTS_DIR.parents[1] / "tests" / "fixtures" / "golden"
