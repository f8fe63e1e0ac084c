"""JSON encodings shared by the library and the command line.

Complex scalars are encoded as ``[re, im]`` pairs; matrices as nested
lists of such pairs.  Representation files carry the presentation data
(genus, boundary count, relator and separating words as letter lists),
the generator images and the sampling seed.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import InvalidRepresentationError
from .reps import Representation
from .words import Word, surface_presentation


def encode_complex(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def decode_complex(pair) -> complex:
    return complex(pair[0], pair[1])


def encode_matrix(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[encode_complex(z) for z in row] for row in m]


def decode_matrix(rows) -> np.ndarray:
    return np.array([[decode_complex(z) for z in row] for row in rows],
                    dtype=complex)


def encode_word(w: Word) -> list:
    return [[i, e] for i, e in w.letters]


def decode_word(letters) -> Word:
    return Word(tuple((int(i), int(e)) for i, e in letters))


def rep_to_json(rep: Representation) -> dict:
    pres = rep.presentation
    return {
        "presentation": {
            "genus": pres.genus,
            "boundary": pres.boundary_count,
            "relator": (encode_word(pres.relators[0]) if pres.relators else []),
            "separating": {name: encode_word(w)
                           for name, w in pres.boundary_words.items()},
        },
        "images": [encode_matrix(g) for g in rep.images],
        "seed": rep.seed,
    }


def rep_from_json(data: dict) -> Representation:
    p = data["presentation"]
    pres = surface_presentation(int(p["genus"]), int(p["boundary"]))
    stored = decode_word(p.get("relator", []))
    if pres.relators and stored != pres.relators[0]:
        raise InvalidRepresentationError(
            "stored relator does not match the standard surface relator")
    images = [decode_matrix(m) for m in data["images"]]
    return Representation(pres, images, seed=data.get("seed"))


def dump(obj, path=None, indent=None) -> str:
    text = json.dumps(obj, indent=indent, sort_keys=True)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    return text
