"""Convolution fusion rules and braiding scalars for S3 acting on a point."""

from __future__ import annotations

from orbidouble import GroupAction, InertiaAction, symmetric_group
from orbidouble.double import fusion_data

G = symmetric_group(3)
inert = InertiaAction(GroupAction.point(G))
fd = fusion_data(inert, 7)

names = [f"({G.labels[h]}; {','.join(map(str, ch))})" for _, h, ch in fd.labels]
for i, a in enumerate(names):
    print(f"{a} * {a} = " + " + ".join(
        (f"{m} " if m > 1 else "") + names[k] for k, m in enumerate(fd.multiplicity[i][i]) if m))
print("self-braiding scalars:", [fd.braiding[i][i] for i in range(len(names))])
