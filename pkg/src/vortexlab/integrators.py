"""Classical fixed-step RK4 on particle positions.

Both the point-vortex system and the particle cloud advance through this one
function, so a one-particle-per-component cloud with zero blob radius follows
the point-vortex trajectory bitwise.
"""


def rk4_positions(xy, dt, rhs):
    k1 = rhs(xy)
    k2 = rhs(xy + (0.5 * dt) * k1)
    k3 = rhs(xy + (0.5 * dt) * k2)
    k4 = rhs(xy + dt * k3)
    return xy + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
