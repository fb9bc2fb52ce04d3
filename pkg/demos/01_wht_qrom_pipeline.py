"""End-to-end tour of the Walsh-Hadamard QROM pipeline.

Quantize a smooth surface, look at how fast its spectrum concentrates,
synthesize the lookup circuit, check it against the spectral
reconstruction, and read off the exact gate bill.
"""

import numpy as np

from whqrom import qrom, wht
from whqrom.synthetic import separable_harmonic

ETA = 12
DIGITS = 15
EPSILON = 2.0**-10

print("== sampling a separable harmonic surface on 2^%d points ==" % ETA)
pes = separable_harmonic(dims=2)
theta = pes.sample(ETA)
f = wht.quantize(theta, DIGITS)
print(f"eta = {f.eta}, d = {f.d}, values in [{f.values.min()}, {f.values.max()}]")

spectrum = wht.wht_forward(f)
magnitudes = np.sort(np.abs(spectrum.coeffs))[::-1]
nonzero = int(np.count_nonzero(magnitudes))
print(f"nonzero WH coefficients: {nonzero} of {f.n}")
print("largest ten:", magnitudes[:10].tolist())

print("\n== truncation search ==")
trunc = wht.minimal_truncation(f, EPSILON)
print(f"smallest k with diag_error < 2^-10: k = {trunc.k}")
print(f"achieved error: {trunc.error(f):.3e}")
curve = wht.truncation_error_curve(f, upto=trunc.k)
for k in range(0, trunc.k + 1, max(1, trunc.k // 8)):
    print(f"  k = {k:3d}  error = {curve[k]:.3e}")

print("\n== synthesis ==")
circuit = qrom.synthesize(trunc, qrom.Ordering.GRAY_CODE)
optimized = qrom.pair_cancel(circuit, trunc)
print(f"gates before/after pair cancellation: {len(circuit.gates)} / {len(optimized.gates)}")

table = qrom.simulate_table(optimized, y0=0)
expected = trunc.reconstruction_numerators() % (1 << (f.eta + f.d))
print("simulate matches 2^eta * g(x) on every input:", bool(np.array_equal(table, expected)))

for label, circ in (("plain", circuit), ("pair-cancelled", optimized)):
    r = qrom.cost(circ)
    print(
        f"{label:15s} T = {r.t_count:6d}  Toffoli = {r.toffoli_count:5d}  "
        f"CNOT = {r.cnot_count:5d}  qubits = {r.qubit_count:3d}  volume = {r.quantum_volume}"
    )

print("\n== wire format round trip ==")
text = qrom.circuit_to_lines(optimized)
print("\n".join(text.splitlines()[:6]), "...")
assert qrom.circuit_from_lines(text) == optimized
print("parsed back identically")
