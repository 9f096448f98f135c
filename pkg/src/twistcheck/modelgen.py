"""Recipes for the shipped surface files.

Run ``python -m twistcheck.modelgen [outdir]`` to regenerate them.  The
ribbon surfaces are Seifert surfaces of positive braid closures: the torus
link of type (k, k) for the F_{k,k} family, with ``(sigma_1)^n`` giving the
chain neighborhoods.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Dict, List

from .ribbon import ModelSpec, RibbonGraph, braid_closure_surface, build_surface_data

DATA_DIR = Path(__file__).parent / "data" / "surfaces"


def _alpha(i: int, j: int):
    return [(f"B{i}_{j}", 1), (f"B{i}_{j + 1}", -1)]


def annulus() -> ModelSpec:
    return ModelSpec(
        name="annulus",
        graph=braid_closure_surface(2, [1, 1]),
        tree=["B1_1"],
        loop_names={"B1_2": "x"},
        curves={"core": _alpha(1, 1)},
        loops={},
    )


def s11() -> ModelSpec:
    g = RibbonGraph({"p": [("a", "+"), ("b", "+"), ("a", "-"), ("b", "-")]})
    # basepoint corner chosen so that the twist along a sends b to b a
    start = g.faces()[0][3]
    return ModelSpec(
        name="S_1_1",
        graph=g,
        tree=[],
        loop_names={"a": "a", "b": "b"},
        curves={"a": [("a", 1)], "b": [("b", 1)]},
        face_starts=[start],
        boundary_names=["d"],
    )


def s12() -> ModelSpec:
    return ModelSpec(
        name="S_1_2",
        graph=braid_closure_surface(2, [1, 1, 1, 1]),
        tree=["B1_1"],
        loop_names={"B1_2": "x2", "B1_3": "x3", "B1_4": "x4"},
        curves={"a1": _alpha(1, 1), "a2": _alpha(1, 2), "a3": _alpha(1, 3)},
        loops={"u": [("x2", 1)], "v": [("x3", 1)]},
    )


def s13() -> ModelSpec:
    # alpha_{1,1}, alpha_{1,2}, alpha_{2,1}, alpha_{2,2} are b, g, r, p
    return ModelSpec(
        name="S_1_3",
        graph=braid_closure_surface(3, [1, 2] * 3),
        tree=["B1_2", "B2_2"],
        loop_names={"B1_1": "xb", "B1_3": "xg", "B2_1": "xr", "B2_3": "xp"},
        curves={"b": _alpha(1, 1), "g": _alpha(1, 2), "p": _alpha(2, 2), "r": _alpha(2, 1)},
        loops={"u": [("xg", 1)], "v": [("xp", 1)]},
        derived={"y": ("g", "r")},
    )


def fkk(k: int) -> ModelSpec:
    """Homology-level model of F_{k,k} with the alpha_{i,j} as loop basis."""
    names = {f"B{i}_{j}": f"x{i}_{j}" for i in range(1, k) for j in range(2, k + 1)}
    loops: Dict[str, List] = {}
    curves: Dict[str, List] = {}
    for i in range(1, k):
        for j in range(1, k):
            word = [] if j == 1 else [(f"x{i}_{j}", 1)]
            loops[f"a{i}_{j}"] = word + [(f"x{i}_{j + 1}", -1)]
            curves[f"{i}_{j}"] = _alpha(i, j)
    return ModelSpec(
        name=f"F_{k}_{k}",
        graph=braid_closure_surface(k, list(range(1, k)) * k),
        tree=[f"B{i}_1" for i in range(1, k)],
        loop_names=names,
        curves=curves,
        loops=loops,
        exact=False,
    )


def builtin_specs() -> List[ModelSpec]:
    return [annulus(), s11(), s12(), s13()] + [fkk(k) for k in (4, 5, 6)]


def write_all(outdir: Path = DATA_DIR) -> List[Path]:
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    for spec in builtin_specs():
        path = outdir / f"{spec.name}.json"
        path.write_text(json.dumps(build_surface_data(spec), indent=1) + "\n")
        written.append(path)
    return written


if __name__ == "__main__":
    for p in write_all(Path(sys.argv[1]) if len(sys.argv) > 1 else DATA_DIR):
        print(p)
