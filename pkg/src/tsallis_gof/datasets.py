"""Real data sets used in the worked examples.

``birth_weights`` is the published 15-value listing.  Its sum disagrees with
the published mean of 3.07, and the published statistics are reproduced only
when the listed 3.88 reads 3.38; that reading is kept separately as
``birth_weights_as_analyzed``.  The three censored sets were drawn from the
mileage data and are stored verbatim together with their removal schemes.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .censoring import CensoringScheme, PC2Sample

BIRTH_WEIGHTS = (
    2.79, 2.56, 3.64, 3.01, 2.16, 2.25, 3.19, 3.06,
    2.61, 3.10, 3.42, 3.55, 3.88, 3.51, 3.82,
)

BIRTH_WEIGHTS_AS_ANALYZED = tuple(3.38 if v == 3.88 else v for v in BIRTH_WEIGHTS)

MILEAGES = (
    162, 200, 271, 320, 393, 508, 539, 629, 706, 778,
    884, 1003, 1101, 1182, 1463, 1603, 1984, 2355, 2880,
)

APPLIANCE_CYCLES = (
    0.014, 0.034, 0.059, 0.061, 0.069, 0.080, 0.123, 0.142, 0.165, 0.210,
    0.381, 0.464, 0.479, 0.556, 0.574, 0.839, 0.917, 0.969, 0.991, 1.064,
    1.088, 1.091, 1.174, 1.270, 1.275, 1.355, 1.397, 1.477, 1.578, 1.649,
    1.702, 1.893, 1.932, 2.001, 2.161, 2.292, 2.326, 2.337, 2.628, 2.785,
    2.811, 2.886, 2.993, 3.122, 3.248, 3.715, 3.790, 3.857, 3.912, 4.100,
)

_PC2 = {
    "mileages_pc2_1": ((162, 200, 393, 508, 539, 778, 884, 1003, 1463, 1984), "9,0*9"),
    "mileages_pc2_2": ((162, 200, 271, 393, 508, 539, 629, 706, 778, 884), "0*9,9"),
    "mileages_pc2_3": ((162, 200, 271, 320, 393, 539, 706, 778, 1003, 1182), "5,0*8,4"),
}


@dataclass(frozen=True)
class Dataset:
    name: str
    values: tuple[float, ...]
    description: str
    scheme: str | None = None

    def array(self) -> np.ndarray:
        return np.array(self.values, dtype=float)

    def pc2(self) -> PC2Sample:
        if self.scheme is None:
            raise ValueError(f"{self.name} is a complete sample")
        return PC2Sample(self.array(), CensoringScheme.parse(self.scheme, n=len(MILEAGES)))

    def checksum(self) -> str:
        text = ",".join(repr(float(v)) for v in self.values)
        if self.scheme:
            text += "|" + self.scheme
        return hashlib.sha256(text.encode()).hexdigest()


REGISTRY: dict[str, Dataset] = {
    "birth_weights": Dataset(
        "birth_weights", BIRTH_WEIGHTS, "birth weights in kg of 15 babies (published listing)"
    ),
    "birth_weights_as_analyzed": Dataset(
        "birth_weights_as_analyzed",
        BIRTH_WEIGHTS_AS_ANALYZED,
        "birth weights with 3.88 read as 3.38 (matches the published mean 3.07 and sd 0.4899)",
    ),
    "mileages": Dataset(
        "mileages", tuple(float(v) for v in MILEAGES),
        "mileages at failure of 19 military personnel carriers",
    ),
    "appliance_cycles": Dataset(
        "appliance_cycles", APPLIANCE_CYCLES,
        "thousands of cycles to failure of 50 electrical appliances",
    ),
}
for _name, (_times, _scheme) in _PC2.items():
    REGISTRY[_name] = Dataset(
        _name, tuple(float(v) for v in _times),
        f"progressively censored sample from the mileages, R=({_scheme})", _scheme,
    )

ALIASES = {
    "birth-weights": "birth_weights",
    "ds1": "birth_weights",
    "ds2": "mileages",
    "ds3": "appliance_cycles",
    "appliances": "appliance_cycles",
}


def get(name: str) -> Dataset:
    key = ALIASES.get(name, name).replace("-", "_")
    try:
        return REGISTRY[key]
    except KeyError:
        raise KeyError(f"unknown dataset {name!r}; known: {', '.join(sorted(REGISTRY))}") from None
