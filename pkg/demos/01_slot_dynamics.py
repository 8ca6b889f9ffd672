"""Walk through the slotted dynamics of the crossbar switch by hand.

Each virtual output queue q[i, j] holds packets from input port i bound
for output port j.  Every slot: arrivals land, the scheduler picks a
permutation (one packet per input, one per output), and matched nonempty
queues send one packet.  The script steps a 3x3 switch for a few slots
and checks the conservation identity that the analysis leans on.
"""

import numpy as np

from iqswitch import bernoulli_uniform, max_weight_matching
from iqswitch.model import arrival_block, step

model = bernoulli_uniform(3, epsilon=0.2)
rng = np.random.default_rng(7)

print(f"model: n={model.n}, epsilon={model.epsilon}, per-queue rate "
      f"{model.lam[0, 0]:.4f}")
print(f"total arrival rate {model.lam.sum():.3f} vs service capacity {model.n}")
print()

q = np.zeros((3, 3), dtype=np.int64)
arrivals = arrival_block(model, 6, rng)

for t in range(6):
    a = arrivals[t]
    res = max_weight_matching(q.astype(np.float64))
    schedule = [int(c) for c in res.perm]
    out = step(q, schedule, a)
    q_next, unused = out.q_next, out.unused

    served = [(i, schedule[i]) for i in range(3) if q[i, schedule[i]] + a[i, schedule[i]] > 0]
    hits = [(int(i), int(j)) for i, j in zip(*np.nonzero(a))]
    print(f"slot {t}: arrivals at {hits or 'none'}")
    print(f"  schedule picks column {schedule} per row, weight {res.weight:.0f}")
    print(f"  served {served or 'nothing'}, unused offers {int(unused.sum())}")

    # conservation: queue growth = arrivals - n + wasted service
    lhs = q_next.sum() - q.sum()
    rhs = a.sum() - 3 + unused.sum()
    assert lhs == rhs
    # service is never wasted on a queue that could have sent
    assert (unused * (q + a)).sum() == 0
    q = q_next

print()
print("final queue matrix:")
print(q)
print("conservation held every slot: growth = arrivals - n + unused")
