from pathlib import Path

from gossip_lab.tables import action_token

GOLDEN = Path(__file__).parent / "golden"


def load_cells(name):
    """Transcribed run-table: rows of cell tokens plus the used counts."""
    rows, used = [], None
    for line in (GOLDEN / name).read_text().splitlines():
        if not line.strip():
            continue
        if line.startswith("used"):
            used = [int(x) for x in line.split()[1:]]
        else:
            rows.append(line.split())
    return rows, used


def cell_tokens(rt):
    return [[action_token(a) for a in row] for row in rt.actions]
