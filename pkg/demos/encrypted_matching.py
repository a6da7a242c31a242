"""Walkthrough: matching biometric templates without decrypting them.

A verifier holds an encrypted reference template. A fresh probe is
encrypted, the two ciphertexts are multiplied once, and the match score
(the dot product) appears in a known coefficient of the product -- the
verifier never sees either template in the clear.
"""

import numpy as np

from bionode import lwe
from bionode.biometrics import (
    cosine_similarity,
    dot_q,
    encrypted_match,
    match_decision,
    quantize,
)

rng = np.random.default_rng(7)

# --- plaintext reference: cosine similarity on real feature vectors -------

enrolled = rng.normal(size=128)
enrolled /= np.linalg.norm(enrolled)

same_person = enrolled + rng.normal(scale=0.15, size=128)
same_person /= np.linalg.norm(same_person)

stranger = rng.normal(size=128)
stranger /= np.linalg.norm(stranger)

print("cosine(enrolled, same person) =", round(cosine_similarity(enrolled, same_person), 4))
print("cosine(enrolled, stranger)    =", round(cosine_similarity(enrolled, stranger), 4))
print("decision at threshold 0.8:",
      match_decision(cosine_similarity(enrolled, same_person), 0.8).value,
      "/", match_decision(cosine_similarity(enrolled, stranger), 0.8).value)

# --- fixed-point quantization bridges real vectors to integers ------------

S = 1000
q_enrolled = quantize(enrolled, S)
q_same = quantize(same_person, S)
approx = dot_q(q_enrolled, q_same) / S**2
exact = float(np.dot(enrolled, same_person))
print(f"\nquantized dot/S^2 = {approx:.6f} vs exact {exact:.6f} "
      f"(error {abs(approx - exact):.2e})")

# --- the encrypted path: binarized templates, one ciphertext multiply -----

params = lwe.PROFILES["default"]
keys = lwe.lwe_keygen(params, rng_seed=1)

template = [int(b) for b in rng.integers(0, 2, size=32)]
probe_same = list(template)
probe_other = [1 - b for b in template]

for label, probe in (("same", probe_same), ("other", probe_other)):
    result = encrypted_match(params, keys, template, probe,
                             threshold_count=max(1, sum(template) - 2), rng_seed=3)
    print(f"encrypted match vs {label} template:", result.value)

# show the packing trick explicitly
P, Q = [1, 0, 1, 1], [1, 1, 0, 1]
ct = lwe.lwe_mul(
    lwe.lwe_encrypt(params, keys.pk, lwe.encode_forward(params, P), 5),
    lwe.lwe_encrypt(params, keys.pk, lwe.encode_reverse(params, Q), 6),
)
score = lwe.extract_inner_product(params, keys.sk, ct, len(P))
print(f"\npacked dot product of {P} and {Q} read from one ciphertext:", score,
      "(plaintext:", sum(p * q for p, q in zip(P, Q)), ")")
