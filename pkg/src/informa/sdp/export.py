"""SDPA sparse format writer and reader.

The file describes

    minimize cᵀx  subject to  Σ xᵢ Fᵢ - F0 ⪰ 0

so the constant matrix is stored with the opposite sign of
``SdpProblem`` blocks (F0 + Σ xᵢ Fᵢ ⪰ 0). Lines:

    "name
    *var name sym|mat rows cols      (one per variable, in order)
    *block index name                (one per block)
    num_vars
    num_blocks
    block sizes
    objective vector
    matrix_index block row col value     (one per upper-triangle nonzero)

Indices in entry lines are 1-based except ``matrix_index`` where 0 is the
constant term. Values carry 17 significant digits, which reproduces
float64 exactly on read-back. Lines starting with ``"`` or ``*`` are
comments to other SDPA readers; ours reads the ``*var`` and ``*block``
lines back into the variable layout and block names.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..errors import DataFormatError
from .problem import LmiBlock, SdpProblem, VarLayout


def format_value(v: float) -> str:
    """17 significant digits with a bare exponent, e.g. ``1.0000000000000000e0``."""
    mantissa, exponent = f"{float(v):.16e}".split("e")
    return f"{mantissa}e{int(exponent)}"


def _layout_lines(problem: SdpProblem) -> list[str]:
    lines = []
    for s in problem.layout.slices:
        kind = "sym" if s.symmetric else "mat"
        lines.append(f"*var {s.name} {kind} {s.shape[0]} {s.shape[1]}")
    lines += [f"*block {i} {b.name}" for i, b in enumerate(problem.blocks, start=1)]
    return lines


def export_standard_form(problem: SdpProblem, path: Path | str) -> None:
    """Write ``problem`` in SDPA sparse format with LF line endings."""
    c = problem.objective if problem.objective is not None else np.zeros(problem.num_vars)
    lines = [f'"{problem.name}', *_layout_lines(problem)]
    lines += [
        str(problem.num_vars),
        str(len(problem.blocks)),
        " ".join(str(s) for s in problem.block_sizes),
        " ".join(format_value(v) for v in c),
    ]
    for b_idx, block in enumerate(problem.blocks, start=1):
        iu = np.triu_indices(block.size)
        matrices = [-block.F0] + [block.Fi[i] for i in range(problem.num_vars)]
        for k, M in enumerate(matrices):
            vals = M[iu]
            for r, col, v in zip(iu[0][vals != 0], iu[1][vals != 0], vals[vals != 0]):
                lines.append(f"{k} {b_idx} {r + 1} {col + 1} {format_value(v)}")

    with open(path, "w", encoding="ascii", newline="\n") as f:
        f.write("\n".join(lines) + "\n")


def _parse_layout(path: Path, var_lines: list[str]) -> VarLayout:
    layout = VarLayout()
    for line in var_lines:
        fields = line.split()
        try:
            name, kind, rows, cols = fields[1], fields[2], int(fields[3]), int(fields[4])
        except (IndexError, ValueError) as e:
            raise DataFormatError(f"{path}: bad variable line '{line}': {e}") from e
        if kind == "sym":
            if rows != cols:
                raise DataFormatError(f"{path}: symmetric variable '{name}' is {rows}x{cols}")
            layout = layout.symmetric(name, rows)
        elif kind == "mat":
            layout = layout.matrix(name, rows, cols)
        else:
            raise DataFormatError(f"{path}: unknown variable kind '{kind}'")
    return layout


def read_standard_form(path: Path | str) -> SdpProblem:
    """Read a file written by :func:`export_standard_form`.

    Variable names and shapes and block names are restored from the
    ``*var`` and ``*block`` comment lines. Files without them (written by
    other tools) get a single flat variable ``x`` and blocks named
    ``block1``, ``block2``, ... ``SdpProblem.meta`` is not stored.

    Raises:
        DataFormatError: malformed file, or a stored layout that does not
            cover the declared number of variables
    """
    path = Path(path)
    name = path.stem
    body: list[str] = []
    var_lines: list[str] = []
    block_names: dict[int, str] = {}
    for line in path.read_text(encoding="ascii").splitlines():
        if line.startswith('"') or line.startswith("*"):
            if body:
                continue
            if line.startswith('"'):
                name = line[1:].strip() or name
            elif line.startswith("*var "):
                var_lines.append(line)
            elif line.startswith("*block "):
                fields = line.split()
                if len(fields) == 3 and fields[1].isdigit():
                    block_names[int(fields[1])] = fields[2]
            continue
        if line.strip():
            body.append(line)

    try:
        num_vars = int(body[0])
        num_blocks = int(body[1])
        sizes = [abs(int(s)) for s in body[2].replace("{", " ").replace("}", " ").replace(",", " ").split()]
        c = np.array([float(v) for v in body[3].split()], dtype=float)
    except (IndexError, ValueError) as e:
        raise DataFormatError(f"{path}: bad header: {e}") from e
    if len(sizes) != num_blocks or c.shape != (num_vars,):
        raise DataFormatError(f"{path}: header counts disagree")

    F0s = [np.zeros((s, s)) for s in sizes]
    Fis = [np.zeros((num_vars, s, s)) for s in sizes]
    for lineno, line in enumerate(body[4:], start=5):
        fields = line.split()
        try:
            k, blk, r, col = (int(v) for v in fields[:4])
            v = float(fields[4])
        except (IndexError, ValueError) as e:
            raise DataFormatError(f"{path}: entry {lineno}: {e}") from e
        if not (0 <= k <= num_vars and 1 <= blk <= num_blocks):
            raise DataFormatError(f"{path}: entry {lineno} out of range")
        target = F0s[blk - 1] if k == 0 else Fis[blk - 1][k - 1]
        value = -v if k == 0 else v
        target[r - 1, col - 1] = value
        target[col - 1, r - 1] = value

    if var_lines:
        layout = _parse_layout(path, var_lines)
        if layout.num_vars != num_vars:
            raise DataFormatError(f"{path}: layout covers {layout.num_vars} variables, header says {num_vars}")
    else:
        layout = VarLayout().matrix("x", num_vars, 1) if num_vars else VarLayout()
    blocks = tuple(
        LmiBlock(name=block_names.get(i + 1, f"block{i + 1}"), F0=F0s[i], Fi=Fis[i]) for i in range(num_blocks)
    )
    objective = c if np.any(c) else None
    return SdpProblem(name=name, layout=layout, blocks=blocks, objective=objective)
