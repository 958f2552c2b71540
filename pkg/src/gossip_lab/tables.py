"""Text and machine renderings of runs, plus the inverse text parser.

The text layout is grep-able ASCII: cells are S<j>, R<j>, ws, wr; the
`--unicode` variant restores the published wait glyphs.  Rendered
tables parse back into identical RunTable values, which is what makes
golden-file testing possible.
"""

from __future__ import annotations

from fractions import Fraction

from .core import RECEIVE, SEND, WAIT_RECEIVE, WAIT_SEND, Action, Metrics, RunTable

UNICODE_WAIT_SEND = "↷"  # arrow the published tables use for ws
UNICODE_WAIT_RECEIVE = "↶"


def action_token(action: Action, unicode: bool = False) -> str:
    if action.kind == SEND:
        return f"S{action.peer}"
    if action.kind == RECEIVE:
        return f"R{action.peer}"
    if action.kind == WAIT_SEND:
        return UNICODE_WAIT_SEND if unicode else WAIT_SEND
    return UNICODE_WAIT_RECEIVE if unicode else WAIT_RECEIVE


def parse_token(token: str) -> Action:
    if token in (WAIT_SEND, UNICODE_WAIT_SEND):
        return Action.wait_send()
    if token in (WAIT_RECEIVE, UNICODE_WAIT_RECEIVE):
        return Action.wait_receive()
    if token[:1] in (SEND, RECEIVE) and token[1:].isdigit():
        kind = token[:1]
        return Action(kind, int(token[1:]))
    raise ValueError(f"unrecognized cell {token!r}")


def mu_text(mu: Fraction) -> str:
    return f"{float(mu):.4f}"


def efficiency_text(eff: Fraction) -> str:
    return f"{float(eff) * 100:.2f}%"


def metrics_footer(m: Metrics) -> str:
    return f"lambda={m.length} mu={mu_text(m.mu)} efficiency={efficiency_text(m.efficiency)}"


def render_run_table(rt: RunTable, unicode: bool = False) -> str:
    """Fixed-width table: one row per process, one column per step,
    then the used-slots row."""
    lam = rt.length
    cells = [
        [action_token(a, unicode) for a in row] for row in rt.actions
    ]
    width = max(
        2,
        len(str(lam)),
        max(len(c) for row in cells for c in row),
    )
    id_width = max(len("used"), len(str(rt.n)), len("id"))

    def line(label, tokens):
        return f"{label:>{id_width}} |" + "".join(f" {tok:>{width}}" for tok in tokens)

    out = [line("id", [str(t) for t in range(1, lam + 1)])]
    out += [line(str(i), row) for i, row in enumerate(cells)]
    out.append(line("used", [str(v) for v in rt.nu]))
    return "\n".join(out)


def parse_run_table(text: str) -> RunTable:
    """Rebuild a RunTable from its rendered text.

    Trailing metric footers are ignored; the used row must agree with
    the recounted action columns.
    """
    rows: list[tuple[Action, ...]] = []
    nu: tuple[int, ...] | None = None
    for raw in text.splitlines():
        raw = raw.strip()
        if not raw or raw.startswith("lambda="):
            continue
        label, _, rest = raw.partition("|")
        label = label.strip()
        tokens = rest.split()
        if label == "id":
            continue
        if label == "used":
            nu = tuple(int(tok) for tok in tokens)
            continue
        if int(label) != len(rows):
            raise ValueError(f"row {label} out of order")
        rows.append(tuple(parse_token(tok) for tok in tokens))
    if not rows or nu is None:
        raise ValueError("missing table rows or used row")
    n = len(rows) - 1
    counted = tuple(
        sum(1 for row in rows if row[t].is_comm) for t in range(len(nu))
    )
    if counted != nu:
        raise ValueError(f"used row {nu} disagrees with actions {counted}")
    return RunTable(n, tuple(rows), nu)


def fraction_payload(value: Fraction, text: str | None = None) -> dict:
    payload = {"num": value.numerator, "den": value.denominator}
    payload["text"] = text if text is not None else mu_text(value)
    return payload


def run_json_payload(rt: RunTable, m: Metrics, meta: dict) -> dict:
    """Machine view of a run; key order is fixed so diffs stay small."""
    payload = dict(meta)
    payload.update(
        {
            "tie_break": "lowest-sender-id",
            "cap_rule": "ascending-receiver-id",
            "lambda": m.length,
            "mu": fraction_payload(m.mu),
            "efficiency": fraction_payload(m.efficiency, efficiency_text(m.efficiency)),
            "nu": list(rt.nu),
            "actions": [[action_token(a) for a in row] for row in rt.actions],
        }
    )
    return payload


def run_csv_lines(rt: RunTable) -> list[str]:
    lines = ["process,step,action,peer"]
    for i, row in enumerate(rt.actions):
        for t, a in enumerate(row, start=1):
            peer = "" if a.peer is None else a.peer
            lines.append(f"{i},{t},{a.kind},{peer}")
    return lines
