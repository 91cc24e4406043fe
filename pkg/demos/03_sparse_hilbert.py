"""
Invertibility of truncated Hilbert matrices
===========================================

Zeroing column i of the Hilbert matrix below row l_i keeps it invertible in
every case we can enumerate.  For a single truncation a rank-one update
explains why: det H_n(l) = (1 - Z(l, n)/n^2) det H_n, and Z never equals n^2.
"""

from avgctrl.hilbert import (
    invertibility_scan,
    peak_index,
    sparse_hilbert,
    verify_single_truncation,
    z_value,
)

print(sparse_hilbert(5, (2, 2, 3)))

# |Z(l, n)| climbs to a peak near n/sqrt(2), then falls back.
n = 12
print(f"\nn={n}, peak at l={peak_index(n)}")
for ell in range(1, n):
    print(f"  l={ell:>2}  Z = {z_value(ell, n)}")

bad = [n for n in range(2, 26) if not verify_single_truncation(n).ok]
print("\nsingle-truncation violations for n = 2..25:", bad or "none")

# Full enumeration of every admissible truncation sequence.
for n in range(2, 8):
    s = invertibility_scan(n).summary()
    print(f"n={n}: {s['total']:>4} sequences, singular: {len(s['singular'])}, "
          f"smallest |det| {s['min_abs_det']} at {s['min_at']}")
