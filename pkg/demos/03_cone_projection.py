"""Split a queue matrix into its collapsed part and the rest.

Heavily loaded switches concentrate near the cone of matrices
q_ij = w_i + wt_j with nonnegative w, wt: queue buildup lives in per-port
workloads, not in arbitrary per-queue patterns.  The projection onto
that cone splits any state q into q_para (inside the cone) plus q_perp,
with q_perp orthogonal to q_para and pointing away from the cone.
"""

import numpy as np

from iqswitch import cone_membership, project_onto_cone

rng = np.random.default_rng(11)
q = rng.integers(0, 12, size=(3, 3)).astype(np.float64)

d = project_onto_cone(q)
print("state q:")
print(q.astype(int))
print("collapsed part q_para = w_i + wt_j:")
print(np.round(d.q_para, 4))
print(f"  with w  = {np.round(d.w, 4)}")
print(f"  and  wt = {np.round(d.w_tilde, 4)}")
print("residual q_perp:")
print(np.round(d.q_perp, 4))
print()

ip = float((d.q_para * d.q_perp).sum())
sq = (q**2).sum()
print(f"<q_para, q_perp> = {ip:.2e} (orthogonal split)")
print(f"||q||^2 = {sq:.4f} = {float((d.q_para**2).sum()):.4f} + "
      f"{float((d.q_perp**2).sum()):.4f} (Pythagoras)")
print(f"row directions see q_perp with inner product <= "
      f"{max(d.q_perp.sum(axis=1).max(), d.q_perp.sum(axis=0).max()):.2e}")
print(f"solver certificate {d.kkt_residual:.2e} after {d.iterations} iterations")
print()

inside = d.q_para + 0.0
print(f"membership of q_para itself: {cone_membership(inside)}")
neg = inside.copy()
neg[0, 0] -= 1.0
print(f"membership after pushing one entry down by 1: {cone_membership(neg)}")
print()
print("fraction of ||q||^2 outside the cone: "
      f"{float((d.q_perp**2).sum()) / sq:.3f}")
