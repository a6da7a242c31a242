"""Verifiable encrypted linear computation.

A prover holds inputs x_1..x_n encrypted as ElGamal ciphertexts of g^{x_i}
and wants to convince anyone that a published output ciphertext encrypts
g^y for y = sum(a_i * x_i) with public coefficients a_i, without revealing
the x_i or y. Three pieces cooperate:

* Feldman-style commitments (vss_commit / vss_verify_share) make the
  coefficient vector publicly checkable.
* aggregate() folds the input ciphertexts with the public coefficients:
  C = prod c_i^{a_i}, D = prod d_i^{a_i} is itself an encryption of g^y.
* A Chaum-Pedersen discrete-log-equality proof on the componentwise
  quotient of the aggregate and the published output shows both encrypt
  the same plaintext. The Fiat-Shamir challenge binds the whole statement.

Sliding-window convolution reduces to the same primitive; conv_as_linear
lays out one coefficient vector per output position.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass

from .groups import (
    Ciphertext,
    GroupParams,
    ParamsMismatch,
    encrypt_with_nonce,
)


class WitnessInconsistent(Exception):
    pass


class KernelLargerThanInput(Exception):
    pass


@dataclass(frozen=True)
class VssCommitment:
    """Exponent commitments h_i = g^{a_i}, one per polynomial coefficient."""

    h_list: tuple[int, ...]


@dataclass(frozen=True)
class LinearStatement:
    coefficients: tuple[int, ...]
    input_cts: tuple[Ciphertext, ...]
    output_ct: Ciphertext


@dataclass(frozen=True)
class LogEqProof:
    """Proof (A, B, t) that two elements share a discrete log: A = g1^r,
    B = g2^r, t = r + w*z mod q with challenge z derived from the statement."""

    A: int
    B: int
    t: int

    def to_json(self) -> str:
        return json.dumps({"A": str(self.A), "B": str(self.B), "t": str(self.t)})

    @classmethod
    def from_json(cls, text: str) -> "LogEqProof":
        doc = json.loads(text)
        return cls(A=int(doc["A"]), B=int(doc["B"]), t=int(doc["t"]))


def vss_commit(params: GroupParams, coefficients: list[int]) -> VssCommitment:
    return VssCommitment(
        h_list=tuple(pow(params.g, a % params.q, params.p) for a in coefficients)
    )


def poly_eval(coefficients: list[int], x: int, modulus: int) -> int:
    """Horner evaluation of sum(a_i x^i) mod modulus."""
    acc = 0
    for a in reversed(coefficients):
        acc = (acc * x + a) % modulus
    return acc


def vss_verify_share(
    params: GroupParams, commitment: VssCommitment, share: tuple[int, int]
) -> bool:
    """Check g^b == prod h_i^{a^i} for a share (a, b) claimed to be (a, f(a))."""
    a, b = share
    lhs = pow(params.g, b % params.q, params.p)
    rhs = 1
    power = 1  # a^i mod q
    for h_i in commitment.h_list:
        rhs = rhs * pow(h_i, power, params.p) % params.p
        power = power * a % params.q
    return lhs == rhs


def aggregate(params: GroupParams, pk: int, statement: LinearStatement) -> Ciphertext:
    """Fold inputs with public coefficients: (C, D) = (prod c_i^{a_i}, prod d_i^{a_i})."""
    if len(statement.coefficients) != len(statement.input_cts):
        raise ValueError("coefficient/input length mismatch")
    C, D = 1, 1
    for a, ct in zip(statement.coefficients, statement.input_cts):
        if ct.params != params:
            raise ParamsMismatch("input ciphertext from a different group")
        e = a % params.q
        C = C * pow(ct.c, e, params.p) % params.p
        D = D * pow(ct.d, e, params.p) % params.p
    return Ciphertext(c=C, d=D, params=params)


_CHALLENGE_TAG = b"bionode/logeq/v1"


def _challenge(params: GroupParams, g1, h1, g2, h2, A, B) -> int:
    """Fiat-Shamir challenge bound to the full statement, reduced mod q."""
    h = hashlib.sha256()
    h.update(_CHALLENGE_TAG)
    for v in (params.p, params.q, params.g, g1, h1, g2, h2, A, B):
        raw = v.to_bytes((v.bit_length() + 7) // 8 or 1, "big")
        h.update(len(raw).to_bytes(4, "big"))
        h.update(raw)
    return int.from_bytes(h.digest(), "big") % params.q


def logeq_prove(
    params: GroupParams,
    g1: int,
    h1: int,
    g2: int,
    h2: int,
    witness: int,
    rng_seed: int,
) -> LogEqProof:
    """Prove h1 = g1^w and h2 = g2^w for the same (secret) w."""
    w = witness % params.q
    if pow(g1, w, params.p) != h1 or pow(g2, w, params.p) != h2:
        raise WitnessInconsistent("witness does not satisfy the statement")
    rng = random.Random(rng_seed)
    r = rng.randrange(0, params.q)
    A = pow(g1, r, params.p)
    B = pow(g2, r, params.p)
    z = _challenge(params, g1, h1, g2, h2, A, B)
    t = (r + w * z) % params.q
    return LogEqProof(A=A, B=B, t=t)


def logeq_verify(
    params: GroupParams, g1: int, h1: int, g2: int, h2: int, proof: LogEqProof
) -> bool:
    """Check g1^t == A * h1^z and g2^t == B * h2^z with recomputed z."""
    for v in (g1, h1, g2, h2, proof.A, proof.B):
        if not (params.contains(v) or v == 1):
            return False
    if not 0 <= proof.t < params.q:
        return False
    z = _challenge(params, g1, h1, g2, h2, proof.A, proof.B)
    lhs1 = pow(g1, proof.t, params.p)
    rhs1 = proof.A * pow(h1, z, params.p) % params.p
    lhs2 = pow(g2, proof.t, params.p)
    rhs2 = proof.B * pow(h2, z, params.p) % params.p
    return lhs1 == rhs1 and lhs2 == rhs2


def prove_linear(
    params: GroupParams,
    pk: int,
    inputs_plain: list[int],
    randomness: list[int],
    coefficients: list[int],
    rng_seed: int,
) -> tuple[LinearStatement, LogEqProof]:
    """Publish Enc(g^{x_i}), a fresh Enc(g^y), and a proof they are consistent.

    The prover knows the inputs and every encryption nonce r_i, so it can
    compute the aggregate nonce r' = sum(a_i r_i) and run the equality
    proof on the quotient of the aggregate and the output ciphertext with
    witness r' - r_out. Nothing about the x_i or y leaks beyond the claim.
    """
    if not inputs_plain:
        raise ValueError("empty input vector")
    if not (len(inputs_plain) == len(randomness) == len(coefficients)):
        raise ValueError("inputs, randomness, coefficients must align")
    q, p, g = params.q, params.p, params.g
    rng = random.Random(rng_seed)

    input_cts = tuple(
        encrypt_with_nonce(params, pk, pow(g, x % q, p), r)
        for x, r in zip(inputs_plain, randomness)
    )
    y = sum(a * x for a, x in zip(coefficients, inputs_plain)) % q
    r_out = rng.randrange(1, q)
    output_ct = encrypt_with_nonce(params, pk, pow(g, y, p), r_out)
    statement = LinearStatement(
        coefficients=tuple(coefficients), input_cts=input_cts, output_ct=output_ct
    )

    r_prime = sum(a * r for a, r in zip(coefficients, randomness)) % q
    agg = aggregate(params, pk, statement)
    u1 = agg.c * pow(output_ct.c, -1, p) % p
    u2 = agg.d * pow(output_ct.d, -1, p) % p
    witness = (r_prime - r_out) % q
    proof = logeq_prove(params, g, u1, pk, u2, witness, rng.randrange(2**63))
    return statement, proof


def verify_linear(
    params: GroupParams, pk: int, statement: LinearStatement, proof: LogEqProof
) -> bool:
    """Accept iff the quotient of aggregate and output encrypts the identity."""
    if not statement.input_cts:
        return False
    if len(statement.coefficients) != len(statement.input_cts):
        return False
    try:
        agg = aggregate(params, pk, statement)
    except ParamsMismatch:
        return False
    p = params.p
    u1 = agg.c * pow(statement.output_ct.c, -1, p) % p
    u2 = agg.d * pow(statement.output_ct.d, -1, p) % p
    return logeq_verify(params, params.g, u1, pk, u2, proof)


def conv_as_linear(n: int, kernel: list[int]) -> list[list[int]]:
    """Coefficient layouts for a length-n input convolved with the kernel.

    Output j is sum_i kernel[i] * x[j+i]; each layout is a full-length
    coefficient vector with the kernel placed at window j, so each window
    can be proven with prove_linear independently.
    """
    m = len(kernel)
    if m > n:
        raise KernelLargerThanInput(f"kernel {m} longer than input {n}")
    layouts = []
    for j in range(n - m + 1):
        row = [0] * n
        row[j : j + m] = kernel
        layouts.append(row)
    return layouts
