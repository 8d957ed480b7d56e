"""Shared numerical constants."""

import math

# Euler-Mascheroni constant, 20-digit literal (rounds to the nearest double).
EULER_GAMMA = 0.57721566490153286061

TWO_PI = 2.0 * math.pi
