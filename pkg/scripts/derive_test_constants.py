#!/usr/bin/env python3
"""Independent derivation of the frozen constants used in the unit tests.

Pure python math only (no package imports), so the expected values are
computed by a second implementation path. Run it and paste the printed
values into the tests when a constant needs updating.
"""

import math


def show(label, value):
    print(f"{label:44s} {value!r}")


print("# pacing")
show("linear l0=0.1 b=1 tg=10 t=5", 0.1 + 0.9 * 5 / 10)
show("convex l0=0.1 b=1 tg=10 t=5", 0.1 + 0.9 * math.sin(5 / 10 * math.pi / 2))
show("concave l0=0.1 b=1 tg=10 t=5", 0.1 + 0.9 * (1 - math.cos(5 / 10 * math.pi / 2)))
show("exponential l0=0.5 b=1 g=0.5 t=1", 0.5 + 0.5 * (1 - 0.5 ** 1))
show("exponential l0=0.5 b=1 g=0.5 t=3", 0.5 + 0.5 * (1 - 0.5 ** 3))

print("# hardness")
show("logistic margin 0 (ln 2)", math.log(2.0))
show("logistic pos z=2 tau=1", math.log(1 + math.exp(-2.0)))
show("logistic pos z=-2 tau=1", math.log(1 + math.exp(2.0)))
show("sigmoid unlabeled z=2 tau=1", 1 / (1 + math.exp(-2.0)))
show("sigmoid pos z=1 tau=0.5", 1 / (1 + math.exp(2.0)))

print("# weighting")
show("welsch d=lam^2 (1/e)", math.exp(-1.0))
show("welsch d=0.5 lam=1", math.exp(-0.5))
show("welsch d=0.02 lam=0.1 (exp(-2))", math.exp(-0.02 / 0.01))

print("# tiny MLP forward: w1=[[1,-1]] b1=[0.5,0] w2=[2,-1] b2=[0.25]")
for x in (1.0, -2.0):
    h = [max(x * 1.0 + 0.5, 0.0), max(x * -1.0 + 0.0, 0.0)]
    z = 2.0 * h[0] - 1.0 * h[1] + 0.25
    q = 1 / (1 + math.exp(-z))
    show(f"x={x}: logit", z)
    show(f"x={x}: prob", q)

print("# weighted BCE on that model, batch x=[1,-2], y=[1,0], w=[1,0.5]")
z1, z2 = 3.25, 0.25 - 2.0  # from above
q1 = 1 / (1 + math.exp(-z1))
q2 = 1 / (1 + math.exp(-z2))
loss = (1.0 * -math.log(q1) + 0.5 * -math.log(1 - q2)) / 2
show("loss", loss)
show("dlogit1 = w*(q-y)/n", 1.0 * (q1 - 1.0) / 2)
show("dlogit2", 0.5 * (q2 - 0.0) / 2)

print("# adam: p0=1.0 g=0.3 lr=0.1 two steps (wd=0), then one step wd=0.5")
b1, b2, eps = 0.9, 0.999, 1e-8
m = v = 0.0
p = 1.0
for t in (1, 2):
    m = b1 * m + (1 - b1) * 0.3
    v = b2 * v + (1 - b2) * 0.3 ** 2
    mh = m / (1 - b1 ** t)
    vh = v / (1 - b2 ** t)
    p -= 0.1 * mh / (math.sqrt(vh) + eps)
    show(f"p after step {t}", p)
m3 = b1 * m + (1 - b1) * 0.3
v3 = b2 * v + (1 - b2) * 0.3 ** 2
mh = m3 / (1 - b1 ** 3)
vh = v3 / (1 - b2 ** 3)
show("p after step 3 (wd=0.5)", p - 0.1 * (mh / (math.sqrt(vh) + eps) + 0.5 * p))

print("# risk compositions (combiner arithmetic)")
show("upu pi=.5 rp+=.3 ru-=.2 rp-=.6", 0.5 * 0.3 + 0.2 - 0.5 * 0.6)
show("nnpu same (clamped)", 0.5 * 0.3 + max(0.0, 0.2 - 0.5 * 0.6))

print("# sample std of [0.1, 0.2] (ddof=1)")
show("std", math.sqrt(((0.1 - 0.15) ** 2 + (0.2 - 0.15) ** 2) / 1))
