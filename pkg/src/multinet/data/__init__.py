from pathlib import Path

#: Directory of the 12-node synthetic governance fixture.
FIXTURE12 = Path(__file__).parent / "fixture12"
