"""Extended-precision oracle for the detachment and sonic angles.

Uses the u2 formulation of state_two_oracle.py. Detachment: the two roots in
u2 merge, i.e. f = df/du2 = 0 in (u2, theta_w). Sonic: the a-branch
pseudo-speed at P0 equals c2.
"""
from mpmath import mp, mpf, pi, tan, diff, findroot, hypot

from state_two_oracle import residual, incident

mp.dps = 40


def f(u, tw, g, r0, r1):
    return residual(u, tw, g, r0, r1)[0] / u


def detachment(g, r0, r1, guess_tw, guess_u):
    sol = findroot(lambda u, tw: (f(u, tw, g, r0, r1), diff(lambda v: f(v, tw, g, r0, r1), u)),
                   (mpf(guess_u), mpf(guess_tw)), tol=mpf(10) ** -30)
    return sol[1]


def sonic(g, r0, r1, guess_tw, guess_u):
    u1, xi0 = incident(g, r0, r1)

    def eqs(u, tw):
        res, rho2 = residual(u, tw, g, r0, r1)
        c2 = rho2 ** ((g - 1) / 2)
        q = hypot(u - xi0, (u - xi0) * tan(tw))
        return (res / u, q - c2)

    sol = findroot(eqs, (mpf(guess_u), mpf(guess_tw)), tol=mpf(10) ** -30)
    return sol[1]


if __name__ == "__main__":
    g, r0 = mpf('1.4'), mpf(1)
    for r1, td, ts, ud, us in [(2, 48.93, 50.01, 0.55, 0.45), (mpf('1.5'), 45.6, 46.57, 0.4, 0.3),
                               (4, 50.69, 52.03, 0.8, 0.7)]:
        r1 = mpf(r1)
        d = detachment(g, r0, r1, td * pi / 180, ud)
        s = sonic(g, r0, r1, ts * pi / 180, us)
        print(mp.nstr(r1, 5), 'theta_d', mp.nstr(d * 180 / pi, 20), 'theta_s', mp.nstr(s * 180 / pi, 20))
