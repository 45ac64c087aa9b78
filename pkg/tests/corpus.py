"""Malformed expression corpus: (text, dim, expected position (line, col))."""

MALFORMED = [
    ("", 3, (1, 1)),
    ("   ", 3, (1, 4)),
    ("x", 3, (1, 1)),
    ("x0", 3, (1, 1)),
    ("x4", 3, (1, 1)),
    ("x12", 6, (1, 1)),
    ("y1", 3, (1, 1)),
    ("foo(x1)", 3, (1, 1)),
    ("sin x1", 3, (1, 5)),
    ("sin(x1", 3, (1, 7)),
    ("sin(x1))", 3, (1, 8)),
    ("(x1 + x2", 3, (1, 9)),
    ("x1 +", 3, (1, 5)),
    ("+ x1", 3, (1, 1)),
    ("x1 * * x2", 3, (1, 6)),
    ("x1 x2", 3, (1, 4)),
    ("x1 ^ x2", 3, (1, 6)),
    ("x1 ^ (2)", 3, (1, 6)),
    ("x1 ^ -2", 3, (1, 6)),
    ("x1 ^", 3, (1, 5)),
    ("2 ** 3", 3, (1, 4)),
    ("1..5", 3, (1, 3)),
    ("1e", 3, (1, 2)),
    ("x1 @ x2", 3, (1, 4)),
    ("exp()", 3, (1, 5)),
    ("exp(,x1)", 3, (1, 5)),
    ("exp(x1,x2)", 3, (1, 7)),
    ("sqrt", 3, (1, 5)),
    ("()", 3, (1, 2)),
    ("x1 +\n* x2", 3, (2, 1)),
]
