"""Walk through theta = sqrt(2) - 1 = [2, 2, 2, ...]: substitutions, lengths, sums."""
# %%
from rotsub import PartialQuotients, closed_form_zero, code_orbit, sums
from rotsub.exact import to_exact
from rotsub.stats import length_pair, zero_length
from rotsub.word import Renormalization, limit_prefix, sigma_of

theta = PartialQuotients.periodic((2,))
print(theta, float(to_exact(theta)))

# %% one substitution: every level of the renormalization uses the same map
sigma = sigma_of(theta)
print(sigma.images)

# %% the limit word codes x(theta) = 0 since every odd digit is even
print(limit_prefix(theta, 40))
print(code_orbit(0, theta, 40).word)

# %% lengths grow like (3 + 2 sqrt 2)^n, computed from letter counts only
r = Renormalization(theta)
for n in (1, 2, 3, 6, 20):
    print(n, length_pair(r, n).len_AB)

# %% the maximum of S_n(0) climbs by one per level, the minimum stays at 1
for n in range(8):
    print(n, zero_length(r, n), closed_form_zero(r, n))

# %% cross-check one level against a direct count
L = zero_length(r, 5)
res = sums(0, theta, L)
print(res.series.max(), res.series.min(), res.series[-1])
