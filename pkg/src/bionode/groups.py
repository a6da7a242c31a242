"""Prime-order multiplicative groups and the ElGamal cryptosystem.

The group is the order-q subgroup of Z_p* for a safe prime p = 2q + 1.
Messages are group elements; integer payloads are carried in the exponent
(encode_exponent), so every homomorphic operation below stays inside the
subgroup. All randomness is drawn from explicitly seeded generators, which
makes every operation replayable.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass


class GroupError(Exception):
    pass


class MessageNotInSubgroup(GroupError):
    pass


class InvalidCiphertext(GroupError):
    pass


class ParamsMismatch(GroupError):
    pass


class EmptyParticipantSet(GroupError):
    pass


# 1024-bit MODP group (RFC 2409, Oakley group 2). p is a safe prime; the
# squares of Z_p* form the prime-order subgroup we use, generated by 4 = 2^2.
_MODP_1024 = int(
    "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD129024E088A67CC74"
    "020BBEA63B139B22514A08798E3404DDEF9519B3CD3A431B302B0A6DF25F1437"
    "4FE1356D6D51C245E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED"
    "EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE65381FFFFFFFFFFFFFFFF",
    16,
)

_PINNED_SAFE_PRIMES = {1024: _MODP_1024}

_SMALL_PRIMES = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]


def is_prime(n: int, rounds: int = 40) -> bool:
    """Miller-Rabin primality test (deterministic bases below 3.3e24)."""
    if n < 2:
        return False
    for sp in _SMALL_PRIMES:
        if n == sp:
            return True
        if n % sp == 0:
            return False
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    if n < 3_317_044_064_679_887_385_961_981:
        bases = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41]
    else:
        # witnesses derived from n so the test itself stays deterministic
        rng = random.Random(n)
        bases = [rng.randrange(2, n - 1) for _ in range(rounds)]
    for a in bases:
        a %= n
        if a < 2:
            continue
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = pow(x, 2, n)
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class GroupParams:
    """Multiplicative group description: modulus p, subgroup order q, generator g.

    q divides p - 1 and g generates the order-q subgroup. We keep the
    modulus and the subgroup order as two separate values even though they
    are often conflated informally.
    """

    p: int
    q: int
    g: int

    def contains(self, x: int) -> bool:
        """Membership test for the order-q subgroup."""
        return 0 < x < self.p and pow(x, self.q, self.p) == 1

    def to_json(self, pk: int | None = None) -> str:
        doc = {"p": str(self.p), "q": str(self.q), "g": str(self.g)}
        if pk is not None:
            doc["pk"] = str(pk)
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "GroupParams":
        doc = json.loads(text)
        return cls(p=int(doc["p"]), q=int(doc["q"]), g=int(doc["g"]))


@dataclass(frozen=True)
class KeyPair:
    sk: int
    pk: int


@dataclass(frozen=True)
class Ciphertext:
    """ElGamal ciphertext (c, d) = (g^r, pk^r * m) under `params`."""

    c: int
    d: int
    params: GroupParams

    def to_json(self) -> str:
        return json.dumps({"c": str(self.c), "d": str(self.d)})

    @classmethod
    def from_json(cls, text: str, params: GroupParams) -> "Ciphertext":
        doc = json.loads(text)
        return cls(c=int(doc["c"]), d=int(doc["d"]), params=params)


@dataclass(frozen=True)
class CollectiveKey:
    pk_agg: int
    participant_count: int


def generate_params(bits: int, seed: int = 0) -> GroupParams:
    """Build a safe-prime group with a `bits`-bit modulus.

    For well-known production sizes a pinned standard modulus is returned
    (searching for a fresh 1024-bit safe prime takes minutes and buys
    nothing here); smaller test sizes are searched deterministically from
    the seed.
    """
    if bits < 16:
        raise ValueError("modulus below 16 bits is not a group, it is a toy")
    if bits in _PINNED_SAFE_PRIMES:
        p = _PINNED_SAFE_PRIMES[bits]
        return GroupParams(p=p, q=(p - 1) // 2, g=4)
    rng = random.Random(seed)
    while True:
        q = rng.getrandbits(bits - 1) | (1 << (bits - 2)) | 1
        if not is_prime(q):
            continue
        p = 2 * q + 1
        if p.bit_length() != bits or not is_prime(p):
            continue
        # any non-identity square generates the order-q subgroup
        while True:
            h = rng.randrange(2, p - 1)
            g = pow(h, 2, p)
            if g != 1:
                return GroupParams(p=p, q=q, g=g)


def keygen(params: GroupParams, rng_seed: int) -> KeyPair:
    """Draw sk uniformly from [1, q-1] and set pk = g^sk."""
    rng = random.Random(rng_seed)
    sk = rng.randrange(1, params.q)
    return KeyPair(sk=sk, pk=pow(params.g, sk, params.p))


def encode_exponent(params: GroupParams, x: int) -> int:
    """Encode the integer x as the group element g^x."""
    return pow(params.g, x % params.q, params.p)


def encrypt_with_nonce(params: GroupParams, pk: int, m: int, r: int) -> Ciphertext:
    """Encrypt with explicit randomness r (provers need to retain it)."""
    if not params.contains(m):
        raise MessageNotInSubgroup(f"{m} is not in the order-{params.q} subgroup")
    c = pow(params.g, r % params.q, params.p)
    d = pow(pk, r % params.q, params.p) * m % params.p
    return Ciphertext(c=c, d=d, params=params)


def encrypt(params: GroupParams, pk: int, m: int, rng_seed: int) -> Ciphertext:
    rng = random.Random(rng_seed)
    r = rng.randrange(1, params.q)
    return encrypt_with_nonce(params, pk, m, r)


def decrypt(params: GroupParams, sk: int, ct: Ciphertext) -> int:
    """Recover m = d / c^sk."""
    if not (params.contains(ct.c) or ct.c == 1) or not (
        params.contains(ct.d) or ct.d == 1
    ):
        raise InvalidCiphertext("ciphertext component outside the subgroup")
    shared = pow(ct.c, sk % params.q, params.p)
    return ct.d * pow(shared, -1, params.p) % params.p


def hom_mul(ct1: Ciphertext, ct2: Ciphertext) -> Ciphertext:
    """Componentwise product: decrypts to the product of the two plaintexts."""
    if ct1.params != ct2.params:
        raise ParamsMismatch("ciphertexts come from different groups")
    p = ct1.params.p
    return Ciphertext(c=ct1.c * ct2.c % p, d=ct1.d * ct2.d % p, params=ct1.params)


def hom_scalar(ct: Ciphertext, k: int) -> Ciphertext:
    """Componentwise k-th power: decrypts to m^k (scalar action in the exponent)."""
    p, q = ct.params.p, ct.params.q
    e = k % q
    return Ciphertext(c=pow(ct.c, e, p), d=pow(ct.d, e, p), params=ct.params)


def aggregate_keys(params: GroupParams, partials: list[int]) -> CollectiveKey:
    """Multiply partial public keys into one collective key.

    A ciphertext under the collective key can only be opened when every
    participant contributes a partial decryption; see partial_decrypt /
    combine_partial_decryptions.
    """
    if not partials:
        raise EmptyParticipantSet("need at least one partial key")
    agg = 1
    for pk in partials:
        if not params.contains(pk):
            raise MessageNotInSubgroup(f"partial key {pk} outside subgroup")
        agg = agg * pk % params.p
    return CollectiveKey(pk_agg=agg, participant_count=len(partials))


def partial_decrypt(params: GroupParams, sk_share: int, ct: Ciphertext) -> int:
    """One participant's decryption share c^sk_i."""
    return pow(ct.c, sk_share % params.q, params.p)


def combine_partial_decryptions(
    params: GroupParams, ct: Ciphertext, shares: list[int]
) -> int:
    """Divide d by the product of all decryption shares."""
    if not shares:
        raise EmptyParticipantSet("no decryption shares supplied")
    blind = 1
    for s in shares:
        blind = blind * s % params.p
    return ct.d * pow(blind, -1, params.p) % params.p
