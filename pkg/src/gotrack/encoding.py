"""Multi-object target encoding into a shared training feature map.

Each tracked object is bound to one row of a learned embedding pool. The
object's Gaussian center map and its dense LTRB box map (projected to
feature width by a small MLP) are both multiplied by that embedding and
added onto the training-frame features, so a single feature map carries
every target and the downstream decoder can tell them apart by embedding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch
from torch import nn

from .geometry import Box, GridSpec, gaussian_map, ltrb_map


@dataclass(frozen=True)
class TargetAnnotationSet:
    """Objects to encode on one frame: distinct pool indices with their boxes."""

    entries: tuple[tuple[int, Box], ...]
    grid: GridSpec

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        indices = [i for i, _ in self.entries]
        if len(set(indices)) != len(indices):
            raise ValueError(f"duplicate embedding indices: {indices}")

    @property
    def indices(self) -> list[int]:
        return [i for i, _ in self.entries]


class ObjectEmbeddingPool(nn.Module):
    """Learned pool of m object embeddings of width c.

    Rows are sampled without replacement per sequence, so the pool size is
    a hard upper bound on the number of jointly tracked objects.
    """

    def __init__(self, pool_size: int, channels: int):
        super().__init__()
        self.pool_size = pool_size
        self.channels = channels
        init = torch.randn(pool_size, channels) / channels**0.5
        self.embeddings = nn.Parameter(init)

    def row(self, index: int) -> torch.Tensor:
        if not 0 <= index < self.pool_size:
            raise IndexError(f"embedding index {index} outside pool of {self.pool_size}")
        return self.embeddings[index]

    def rows(self, indices) -> torch.Tensor:
        for i in indices:
            if not 0 <= i < self.pool_size:
                raise IndexError(f"embedding index {i} outside pool of {self.pool_size}")
        return self.embeddings[list(indices)]


class BoxEncoder(nn.Module):
    """Two-layer MLP lifting the 4-channel LTRB map to feature width, per cell."""

    def __init__(self, channels: int, hidden: int | None = None):
        super().__init__()
        hidden = hidden or channels
        self.fc1 = nn.Linear(4, hidden)
        self.fc2 = nn.Linear(hidden, channels)
        self.act = nn.GELU()

    def forward(self, ltrb: torch.Tensor) -> torch.Tensor:
        """(h, w, 4) -> (c, h, w)."""
        out = self.fc2(self.act(self.fc1(ltrb)))
        return out.permute(2, 0, 1)


def encode_targets(
    f_train: torch.Tensor,
    ann: TargetAnnotationSet,
    pool: ObjectEmbeddingPool,
    box_encoder: BoxEncoder,
    sigma_cells: float,
) -> torch.Tensor:
    """Fold the annotated targets into the training features.

    For each entry (i, box): adds ``e_i * gaussian(box)`` (the embedding
    broadcast over the spatial Gaussian) and ``e_i * mlp(ltrb(box))``
    (channel-wise product with the lifted box map). With no entries the
    input features are returned unchanged. Terms are summed in ascending
    pool-index order so the result is independent of entry order.
    """
    grid = ann.grid
    if f_train.shape != (pool.channels, grid.height_cells, grid.width_cells):
        raise ValueError(
            f"features {tuple(f_train.shape)} do not match grid "
            f"{(pool.channels, grid.height_cells, grid.width_cells)}"
        )
    if not ann.entries:
        return f_train
    out = f_train
    for index, box in sorted(ann.entries, key=lambda e: e[0]):
        e = pool.row(index)
        y = gaussian_map(box, grid, sigma_cells).values
        y_t = torch.as_tensor(y, dtype=f_train.dtype, device=f_train.device)
        b = ltrb_map(box, grid).values
        b_t = torch.as_tensor(b, dtype=f_train.dtype, device=f_train.device)
        out = out + e[:, None, None] * y_t[None, :, :]
        out = out + e[:, None, None] * box_encoder(b_t)
    return out


def sample_embedding_indices(n: int, m: int, rng_seed: int) -> list[int]:
    """Draw n distinct pool indices uniformly at random, deterministic per seed."""
    if n > m:
        raise ValueError(f"pool exhausted: {n} objects exceed pool size {m}")
    rng = np.random.default_rng(rng_seed)
    return [int(i) for i in rng.permutation(m)[:n]]
