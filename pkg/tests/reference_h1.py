"""Reference 16x16 payoff matrix for player 1 as a literal token pattern, free of construction logic.

Rows/columns follow the system basis |a1 a2> with a in (Nc, Fc, Nq, Fq).
"""

import numpy as np

PATTERN = """
r 0 r 0 0 0 0 0 r 0 r 0 0 0 0 0
0 s 0 is 0 0 0 0 0 s 0 is 0 0 0 0
r 0 r 0 0 0 0 0 r 0 r 0 0 0 0 0
0 -is 0 s 0 0 0 0 0 -is 0 s 0 0 0 0
0 0 0 0 t 0 t 0 0 0 0 0 it 0 it 0
0 0 0 0 0 p 0 ip 0 0 0 0 0 ip 0 -p
0 0 0 0 t 0 t 0 0 0 0 0 it 0 it 0
0 0 0 0 0 -ip 0 p 0 0 0 0 0 p 0 ip
r 0 r 0 0 0 0 0 r 0 r 0 0 0 0 0
0 s 0 is 0 0 0 0 0 s 0 is 0 0 0 0
r 0 r 0 0 0 0 0 r 0 r 0 0 0 0 0
0 -is 0 s 0 0 0 0 0 -is 0 s 0 0 0 0
0 0 0 0 -it 0 -it 0 0 0 0 0 t 0 t 0
0 0 0 0 0 -ip 0 p 0 0 0 0 0 p 0 ip
0 0 0 0 -it 0 -it 0 0 0 0 0 t 0 t 0
0 0 0 0 0 -p 0 -ip 0 0 0 0 0 -ip 0 p
"""

TOKENS = [line.split() for line in PATTERN.strip().splitlines()]


def _token_value(tok: str, values: dict) -> complex:
    if tok == "0":
        return 0.0
    sign = -1.0 if tok.startswith("-") else 1.0
    tok = tok.lstrip("-")
    unit = 1.0
    if tok.startswith("i"):
        unit, tok = 1j, tok[1:]
    return sign * unit * values[tok]


def evaluate(r, s, t, p) -> np.ndarray:
    values = {"r": r, "s": s, "t": t, "p": p}
    return np.array([[_token_value(tok, values) for tok in row] for row in TOKENS], dtype=complex)
