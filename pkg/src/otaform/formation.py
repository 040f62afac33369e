"""Formation specification and the jump (reference-update) dynamics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .topology import ChannelRealization, normalized_aggregate


@dataclass(frozen=True)
class FormationSpec:
    """Displacement vectors d_i; agreement on p_i - d_i realizes the shape."""

    displacements: np.ndarray  # (n, 2)

    def __post_init__(self):
        d = np.asarray(self.displacements, dtype=float)
        if d.ndim != 2 or d.shape[1] != 2:
            raise ValueError(f"displacements must be (n, 2), got {d.shape}")
        d = d.copy()
        d.setflags(write=False)
        object.__setattr__(self, "displacements", d)

    @property
    def n(self) -> int:
        return self.displacements.shape[0]


def regular_polygon(n: int, radius: float) -> FormationSpec:
    """Vertices of a regular n-gon, agent i at angle 2*pi*i/n."""
    ang = 2.0 * np.pi * np.arange(n) / n
    return FormationSpec(radius * np.column_stack((np.cos(ang), np.sin(ang))))


@dataclass(frozen=True)
class ReferenceState:
    refs: np.ndarray  # (n, 2), held constant over the flow interval
    valid_from: int   # instant index k

    def __post_init__(self):
        r = np.asarray(self.refs, dtype=float).copy()
        r.setflags(write=False)
        object.__setattr__(self, "refs", r)


def jump_update(positions, spec: FormationSpec,
                real: ChannelRealization) -> ReferenceState:
    """OTA reference update: each agent broadcasts p_i - d_i, receives the
    normalized aggregate, and re-adds its own displacement. Positions do not
    jump."""
    p = np.asarray(positions, dtype=float)
    shifted = p - spec.displacements
    refs = np.empty_like(p)
    for i in range(spec.n):
        refs[i] = spec.displacements[i] + normalized_aggregate(real, i, shifted)
    return ReferenceState(refs=refs, valid_from=real.instant)


def shifted_state(positions, spec: FormationSpec) -> np.ndarray:
    """Stacked displacement-shifted coordinates, agent-major."""
    p = np.asarray(positions, dtype=float)
    return (p - spec.displacements).reshape(-1)
