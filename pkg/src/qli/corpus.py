"""Test and benchmark diagrams: braid closures, named links, random diagrams, move pairs."""

from __future__ import annotations

import os
import random
from typing import Sequence

from qli.diagram import mirror, parse_pd, render_pd

__all__ = [
    "braid_closure",
    "torus2",
    "NAMED",
    "corpus",
    "random_braid",
    "random_diagram",
    "reidemeister_pairs",
    "add_twist_pair",
    "rng_from_env",
]


def rng_from_env(default: int = 20240611) -> random.Random:
    """Random generator seeded from ``QLI_SEED`` when set."""
    return random.Random(int(os.environ.get("QLI_SEED", default)))


def braid_closure(word: Sequence[int], n: int) -> str:
    """PD text of the closure of a braid word on ``n`` strands.

    Letters are ``±i`` for ``σ_i^{±1}`` (1-based).  Strands run upward; arc
    labels are consecutive along each component.
    """
    if n < 1:
        raise ValueError("need at least one strand")
    used = {abs(g) for g in word}
    if any(not 1 <= g < n for g in used):
        raise ValueError("generator index out of range")
    cur = list(range(n))
    fresh = n
    nxt: dict[int, int] = {}
    raw = []
    for g in word:
        i = abs(g) - 1
        a, b = cur[i], cur[i + 1]
        oi, oj = fresh, fresh + 1  # leaving at positions i and i+1
        fresh += 2
        nxt[a] = oj
        nxt[b] = oi
        if g > 0:
            raw.append((b, oj, oi, a))
        else:
            raw.append((a, b, oj, oi))
        cur[i], cur[i + 1] = oi, oj
    alias = {}
    for j, top in enumerate(cur):
        if top == j:
            raise ValueError(f"strand {j + 1} meets no crossing")
        alias[top] = j

    def canon(x):
        return alias.get(x, x)

    succ = {canon(k): canon(v) for k, v in nxt.items()}
    label = {}
    counter = 1
    for start in sorted(succ):
        if start in label:
            continue
        x = start
        while x not in label:
            label[x] = counter
            counter += 1
            x = succ[x]
    xs = [tuple(label[canon(x)] for x in c) for c in raw]
    return " ".join(f"X[{a},{b},{c},{d}]" for a, b, c, d in xs)


def torus2(k: int) -> str:
    """Standard diagram of the (2, k) torus link (closure of σ_1^k)."""
    return braid_closure([1] * k, 2)


_LEFT_TREFOIL = "X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]"

NAMED: dict[str, str] = {
    "unknot": "T[+,1] T[-,1]",
    "hopf": "X[1,4,2,3] X[3,2,4,1]",
    "left_trefoil": _LEFT_TREFOIL,
    "right_trefoil": render_pd(mirror(parse_pd(_LEFT_TREFOIL))),
    "figure_eight": "X[4,2,5,1] X[8,6,1,5] X[6,3,7,4] X[2,7,3,8]",
    "torus_2_4": torus2(4),
    "torus_2_5": torus2(5),
    "torus_2_6": torus2(6),
    "borromean": braid_closure([1, -2] * 3, 3),
    "braid3_111_2_m1_2": braid_closure([1, 1, 1, 2, -1, 2], 3),
    "kinked_unknot": "X[1,1,2,2]",
    "framed_trefoil": "framing 1 2\n" + _LEFT_TREFOIL,
    "twisted_hopf": "X[1,4,2,3] X[3,2,4,1] T[+,1] T[+,4] T[-,2]",
}


def random_braid(rng: random.Random, max_crossings: int = 8, max_strands: int = 4):
    """Random braid word using every generator, so the closure is connected."""
    n = rng.randint(2, max_strands)
    length = rng.randint(n - 1, max(n - 1, max_crossings))
    word = [rng.choice([1, -1]) * g for g in range(1, n)]
    while len(word) < length:
        word.append(rng.choice([1, -1]) * rng.randint(1, n - 1))
    rng.shuffle(word)
    return word, n


def random_diagram(rng: random.Random, max_crossings: int = 8, twists: bool = True) -> str:
    word, n = random_braid(rng, max_crossings)
    text = braid_closure(word, n)
    if twists and rng.random() < 0.5:
        d = parse_pd(text)
        arcs = sorted({a for c in d.crossings for a in c.arcs})
        toks = [f"T[{rng.choice('+-')},{rng.choice(arcs)}]" for _ in range(rng.randint(1, 2))]
        text = text + " " + " ".join(toks)
    return text


def add_twist_pair(text: str, arc: int | None = None) -> str:
    """Insert a cancelling twist pair on ``arc`` (default: smallest label)."""
    d = parse_pd(text)
    if arc is None:
        arc = min(a for arcs in d.component_arcs.values() for a in arcs)
    return f"{text} T[+,{arc}] T[-,{arc}]"


def reidemeister_pairs(rng: random.Random | None = None) -> list[tuple[str, str, str]]:
    """``(move, before, after)`` PD pairs related by a Reidemeister or framing move."""
    rng = rng or rng_from_env()
    pairs = [
        ("R1+ (stabilisation)", braid_closure([1, 1, 1], 2), braid_closure([1, 1, 1, 2], 3)),
        ("R1- (stabilisation)", braid_closure([1, -2, 1, -2], 3), braid_closure([1, -2, 1, -2, -3], 4)),
        ("R1 kink", "T[+,1] T[-,1]", "X[1,1,2,2]"),
        ("R2", braid_closure([1, 1, 1], 2), braid_closure([1, 1, 1, 1, -1], 2)),
        ("R2 mixed", braid_closure([1, -2, 1, -2], 3), braid_closure([1, -2, -1, 1, 1, -2], 3)),
        ("R3", braid_closure([1, 2, 1, 2, 2], 3), braid_closure([2, 1, 2, 2, 2], 3)),
        ("R3 inverse", braid_closure([-1, -2, -1, 1], 3), braid_closure([-2, -1, -2, 1], 3)),
        ("conjugation", braid_closure([1, -2, 1, -2], 3), braid_closure([2, 1, -2, 1, -2, -2], 3)),
        ("twist pair", NAMED["left_trefoil"], add_twist_pair(NAMED["left_trefoil"], 3)),
    ]
    word, n = random_braid(rng, 6, 3)
    i = rng.randint(1, n - 1)
    pairs.append(("R2 random", braid_closure(word, n),
                  braid_closure(word + [i, -i], n)))
    return pairs


def corpus(include_random: bool = True, n_random: int = 5, seed: int | None = None) -> dict[str, str]:
    """Named diagrams plus ``n_random`` seeded random closures (≤ 8 crossings)."""
    out = dict(NAMED)
    if include_random:
        rng = random.Random(seed) if seed is not None else rng_from_env()
        for i in range(n_random):
            out[f"random_{i}"] = random_diagram(rng)
    return out
