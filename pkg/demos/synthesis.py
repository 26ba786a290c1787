"""Building rotation numbers with prescribed growth of M_n(0) and m_n(0)."""
# %%
from rotsub import GrowthTarget, PartialQuotients, RatioTarget, closed_form_zero, growth_theta, ratio_theta
from rotsub.stats import zero_length
from rotsub.synth import SequenceSpec
from rotsub.word import Renormalization

# %% both extremes should follow ceil(sqrt(n))
sq = SequenceSpec.of("ceil_pow", num=1, den=2)
theta = growth_theta(GrowthTarget(sq, sq))
print(theta.digits(7))
r = Renormalization(theta)
for k in range(6):
    n = zero_length(r, k)
    _, M, m = closed_form_zero(r, k)
    print(k, n, M, m, sq(n))

# %% M / |m| oscillating between 1 and 3
theta = ratio_theta(RatioTarget(1, 3))
r = Renormalization(theta)
ratios = []
for k in range(2, 400):
    _, M, m = closed_form_zero(r, k)
    if m < 0:
        ratios.append(M / -m)
print(min(ratios[50:]), max(ratios[50:]))

# %% the arithmetic digits 1, 2, 3, ... have ratio two in the limit, approached slowly
theta = PartialQuotients.generated("arithmetic")
for depth in (10, 40, 160, 640):
    _, M, m = closed_form_zero(theta, depth)
    print(depth, M, m, M / -m)
