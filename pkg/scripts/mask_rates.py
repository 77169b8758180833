"""Print sampling rates of the radial masks for the 128 and 196 image sizes."""

from wasstv.forward import make_radial_mask

for n, spokes in [(128, 5), (128, 10), (128, 15), (196, 10), (196, 20), (196, 30)]:
    rate = make_radial_mask(n, n, spokes).rate
    print(f"{n}x{n} spokes={spokes:2d} rate={100 * rate:6.2f}%")
