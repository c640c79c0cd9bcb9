#!/usr/bin/env python3
"""Independent high-precision values frozen into tests/support/expected_values.hpp.

Run from the repository root:
    python3 tests/oracles/derive_expected.py > tests/support/expected_values.hpp
"""
import mpmath as mp

mp.mp.dps = 50


def kl(p, q):
    return mp.fsum(pi * mp.log(pi / qi) for pi, qi in zip(p, q) if pi > 0)


def renyi(p, q, a):
    return mp.log(mp.fsum(pi**a * qi**(1 - a) for pi, qi in zip(p, q))) / (a - 1)


def dpd(p, q, a):
    return mp.fsum(pi**a - a * pi * qi**(a - 1) + (a - 1) * qi**a for pi, qi in zip(p, q)) / (a - 1)


def rae(p, q, a):
    s1 = mp.fsum(pi * qi**(a - 1) for pi, qi in zip(p, q))
    s2 = mp.fsum(pi**a for pi in p)
    s3 = mp.fsum(qi**a for qi in q)
    return a / (1 - a) * mp.log(s1) - mp.log(s2) / (1 - a) + mp.log(s3)


def alpha_exponential(q, f, theta, a):
    w = [(qi**(1 - a) + (1 - a) * theta * fi)**(1 / (1 - a)) for qi, fi in zip(q, f)]
    s = mp.fsum(w)
    return [x / s for x in w]


def alpha_power_law(q, f, theta, a):
    w = [(qi**(a - 1) + (1 - a) * theta * fi)**(1 / (a - 1)) for qi, fi in zip(q, f)]
    s = mp.fsum(w)
    return [x / s for x in w]


def escort(p, a):
    s = mp.fsum(x**a for x in p)
    return [x**a / s for x in p]


def forward_b(q, f, target, a):
    # Full-support forward projection: P = [Q^(a-1) + (1-a)(Z + theta f)]^(1/(a-1)).
    def p_of(theta, z):
        return [(qi**(a - 1) + (1 - a) * (z + theta * fi))**(1 / (a - 1)) for qi, fi in zip(q, f)]

    def eqs(theta, z):
        p = p_of(theta, z)
        return [mp.fsum(p) - 1, mp.fsum(pi * fi for pi, fi in zip(p, f)) - target]

    theta, z = mp.findroot(eqs, (mp.mpf(0), mp.mpf(0)))
    return p_of(theta, z), theta, z


def emit(name, value):
    print(f"inline constexpr double {name} = {mp.nstr(value, 20)};")


def emit_vec(name, values):
    body = ", ".join(mp.nstr(v, 20) for v in values)
    print(f"inline constexpr double {name}[] = {{{body}}};")


half = [mp.mpf(1) / 2, mp.mpf(1) / 2]
quarter = [mp.mpf(1) / 4, mp.mpf(3) / 4]

print("#pragma once")
print("// Generated by tests/oracles/derive_expected.py (mpmath, 50 digits). Do not edit.")
print()
print("namespace divproj::expected {")
emit_vec("kEscortQuarterAlpha2", escort(quarter, 2))
emit("kAlphaNormHalf2", mp.sqrt(mp.fsum(x**2 for x in half)))
emit("kAlphaNormQuarter2", mp.sqrt(mp.fsum(x**2 for x in quarter)))
emit("kKlHalfQuarter", kl(half, quarter))
emit("kKlQuarterHalf", kl(quarter, half))
emit("kRenyiHalfQuarter2", renyi(half, quarter, 2))
emit("kRenyiHalfQuarterHalf", renyi(half, quarter, mp.mpf("0.5")))
emit("kDpdHalfQuarter2", dpd(half, quarter, 2))
emit("kDpdSkewed2", dpd([mp.mpf("0.9"), mp.mpf("0.1")], [mp.mpf("0.1"), mp.mpf("0.9")], 2))
emit("kRaeHalfQuarter2", rae(half, quarter, 2))
emit("kRaeQuarterHalf2", rae(quarter, half, 2))

p3 = [mp.mpf("0.2"), mp.mpf("0.3"), mp.mpf("0.5")]
q3 = [mp.mpf("0.4"), mp.mpf("0.4"), mp.mpf("0.2")]
for a, tag in [(mp.mpf("0.3"), "03"), (mp.mpf("3"), "3")]:
    emit(f"kRenyiTri{tag}", renyi(p3, q3, a))
    emit(f"kDpdTri{tag}", dpd(p3, q3, a))
    emit(f"kRaeTri{tag}", rae(p3, q3, a))
emit("kKlTri", kl(p3, q3))

emit("kLogit07", mp.log(mp.mpf(7) / 3))
emit("kEscortThetaPrimeHalf", -2 * 1 / (mp.sqrt(mp.mpf("0.5"))**(-1)))
emit("kEscortThetaPrimeQuarter", -2 * mp.mpf("0.3") / (mp.sqrt(mp.mpf("0.625"))**(-1)))

f01 = [0, 1]
e_member = alpha_exponential(half, f01, mp.mpf("0.2"), 2)
emit_vec("kAlphaExpHalf02", e_member)
emit_vec("kAlphaExpHalf02Escort", escort(e_member, 2))
theta_prime = -2 * mp.mpf("0.2") / (mp.sqrt(mp.mpf("0.5"))**(-1))
emit_vec("kEscortTargetHalf02", alpha_power_law(escort(half, 2), f01, theta_prime, mp.mpf("0.5")))

q_fwd = [mp.mpf("0.2"), mp.mpf("0.5"), mp.mpf("0.3")]
p_fwd, th_fwd, z_fwd = forward_b(q_fwd, [0, 1, 2], mp.mpf("0.85"), mp.mpf("0.5"))
emit_vec("kForwardHalfP", p_fwd)
emit("kForwardHalfTheta", th_fwd)
emit("kForwardHalfZ", z_fwd)

# Phi at theta = 0: E_Q[f] mean(Q^(a-1)) / ||Q||_a^a on a 3-symbol instance.
q_phi = [mp.mpf("0.2"), mp.mpf("0.3"), mp.mpf("0.5")]
f_phi = [0, 1, 2]
emp = [mp.mpf("0.5"), mp.mpf("0.25"), mp.mpf("0.25")]
for a, tag in [(mp.mpf("0.5"), "Half"), (mp.mpf(2), "2")]:
    ef = mp.fsum(qi * fi for qi, fi in zip(q_phi, f_phi))
    mq = mp.fsum(ei * qi**(a - 1) for ei, qi in zip(emp, q_phi))
    emit(f"kPhiZero{tag}", ef * mq / mp.fsum(qi**a for qi in q_phi))
print("}  // namespace divproj::expected")
