"""Feature-vector matching, plain and encrypted, plus modality scoring.

Real-valued templates are compared with cosine similarity. For the
encrypted path templates are binarized, packed into ring polynomials and
matched with a single homomorphic multiplication (see lwe). Quantization
bridges real vectors into the integer domain the encryption works in.

CNN shape arithmetic (convolution / pooling output sizes) lives here too
because template dimensionality is derived from it, as does the weighted
scoring of biometric modalities used to pick which modality may gate a
node.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from importlib import resources

import numpy as np

from . import lwe


class DimensionMismatch(Exception):
    pass


class ZeroVector(Exception):
    pass


class NonIntegralOutput(Exception):
    pass


class MatchResult(Enum):
    MATCH = "match"
    NO_MATCH = "no_match"


@dataclass(frozen=True)
class FeatureVector:
    """A template vector; `normalized` asserts unit Euclidean length."""

    values: tuple[float, ...]
    normalized: bool = False

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        if not np.isfinite(arr).all():
            raise ValueError("feature vector must be finite")
        if self.normalized and abs(np.linalg.norm(arr) - 1.0) > 1e-9:
            raise ValueError("vector flagged normalized but has non-unit norm")

    @classmethod
    def unit(cls, values) -> "FeatureVector":
        arr = np.asarray(values, dtype=float)
        norm = np.linalg.norm(arr)
        if norm == 0.0:
            raise ZeroVector("cannot normalize a zero vector")
        return cls(values=tuple(float(x) for x in arr / norm), normalized=True)


def _as_array(v) -> np.ndarray:
    return np.asarray(getattr(v, "values", v), dtype=float)


def cosine_similarity(a, b) -> float:
    """Dot product over the product of Euclidean norms, in [-1, 1]."""
    a = _as_array(a)
    b = _as_array(b)
    if a.shape != b.shape or a.ndim != 1:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape}")
    if not (np.isfinite(a).all() and np.isfinite(b).all()):
        raise ValueError("vectors must be finite")
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise ZeroVector("cosine similarity of a zero vector is undefined")
    return float(np.dot(a, b) / (na * nb))


def match_decision(score: float, threshold: float) -> MatchResult:
    """Threshold comparison; the boundary counts as a match."""
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must be in (0, 1)")
    return MatchResult.MATCH if score >= threshold else MatchResult.NO_MATCH


@dataclass(frozen=True)
class QuantizedVector:
    values: tuple[int, ...]
    scale: int


def quantize(v, scale: int) -> QuantizedVector:
    """Fixed-point quantization: values[i] = round(v[i] * scale).

    Meant for unit vectors; a FeatureVector explicitly flagged
    non-normalized is rejected, raw arrays are taken at face value.
    """
    if isinstance(v, FeatureVector) and not v.normalized:
        raise ValueError("quantization expects a normalized vector")
    arr = _as_array(v)
    return QuantizedVector(
        values=tuple(int(x) for x in np.rint(arr * scale)), scale=scale
    )


def dot_q(q1: QuantizedVector, q2: QuantizedVector) -> int:
    if len(q1.values) != len(q2.values):
        raise DimensionMismatch("quantized vectors differ in dimension")
    return sum(x * y for x, y in zip(q1.values, q2.values))


def encrypted_match(
    params: lwe.LweParams,
    keys: lwe.LweKeyPair,
    template_bits: list[int],
    probe_bits: list[int],
    threshold_count: int,
    rng_seed: int = 0,
) -> MatchResult:
    """Match two binary templates without ever decrypting them individually.

    Pipeline: pack template forward and probe reversed, encrypt both,
    multiply the ciphertexts once, and read the dot product out of the
    known coefficient of the decrypted product.
    """
    if len(template_bits) != len(probe_bits):
        raise DimensionMismatch("template and probe lengths differ")
    n = len(template_bits)
    ct_t = lwe.lwe_encrypt(params, keys.pk, lwe.encode_forward(params, template_bits), rng_seed)
    ct_p = lwe.lwe_encrypt(params, keys.pk, lwe.encode_reverse(params, probe_bits), rng_seed + 1)
    product = lwe.lwe_mul(ct_t, ct_p)
    score = lwe.extract_inner_product(params, keys.sk, product, n)
    return MatchResult.MATCH if score >= threshold_count else MatchResult.NO_MATCH


@dataclass(frozen=True)
class CnnShape:
    W: int  # input spatial size
    F: int  # kernel size
    P: int  # padding
    S: int  # stride
    D: int = 1  # depth


def conv_out_size(shape: CnnShape) -> int:
    """(W - F + 2P) / S + 1, rejecting non-integral strides."""
    num = shape.W - shape.F + 2 * shape.P
    if num < 0 or num % shape.S != 0:
        raise NonIntegralOutput(f"(W-F+2P)={num} not divisible by stride {shape.S}")
    return num // shape.S + 1


def pool_out_size(W: int, F: int, S: int) -> int:
    """(W - F) / S + 1 for a pooling window without padding."""
    num = W - F
    if num < 0 or num % S != 0:
        raise NonIntegralOutput(f"(W-F)={num} not divisible by stride {S}")
    return num // S + 1


FACTOR_WEIGHTS = (6, 6, 5, 5, 10, 8, 10, 3, 10, 8)
ELIGIBILITY_CUTOFF = 147  # strictly above the median score qualifies


@dataclass(frozen=True)
class ModalityProfile:
    """Ten factor levels, each 1..3, circumvention already inverted
    (3 = hard to circumvent)."""

    name: str
    levels: tuple[int, ...]

    def __post_init__(self):
        if len(self.levels) != 10 or any(l not in (1, 2, 3) for l in self.levels):
            raise ValueError("profile needs ten levels, each in {1,2,3}")


def modality_score(profile: ModalityProfile) -> int:
    return sum(l * w for l, w in zip(profile.levels, FACTOR_WEIGHTS))


def load_modality_fixture() -> list[dict]:
    text = resources.files("bionode.data").joinpath("modalities.json").read_text()
    return json.loads(text)["modalities"]


def score_table(profiles: list[ModalityProfile]) -> list[dict]:
    """Rank profiles by score, flagging the ones eligible to gate a node."""
    rows = [
        {
            "name": p.name,
            "score": modality_score(p),
            "eligible": modality_score(p) > ELIGIBILITY_CUTOFF,
        }
        for p in profiles
    ]
    rows.sort(key=lambda r: (-r["score"], r["name"]))
    return rows
