"""The golden mean: theta > 1/2 flips the sign, and x(theta) is not 0."""
# %%
from rotsub import PartialQuotients, x_of_theta, zero_orbit_prefix, sums
from rotsub.synth import heaviness_witness

theta = PartialQuotients.periodic((1,))
x = x_of_theta(theta)
print("x(theta) =", x, float(x))

# %% the coding of 0 and of x(theta)
print(zero_orbit_prefix(theta, 21))
print(sums(x, theta, 21).series)
print(sums(0, theta, 21).series)

# %% the first digit is odd, so some S_n(theta) is already negative
print(heaviness_witness(theta, 100).to_json())
