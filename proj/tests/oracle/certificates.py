"""Independent high-precision evaluation of the certificate constants.

Prints the values frozen in the C++ unit tests. Uses mpmath at 50 digits
and its own root finder, sharing no code with the library.
"""
from mpmath import mp, mpf, sqrt, findroot

mp.dps = 50


def razumikhin(k0, k1, k2, w, gamma, m, m2, h, mu, alpha, delta, margin=mpf("1e-3")):
    e = mu - 1
    r = alpha * k1 / k0
    k4 = 2 * h * m * m2 * k2 * r ** (mu / gamma) * (1 + r ** (e / gamma))
    H = (w / k4) ** (1 / e)
    k5 = w - k4 * delta ** e
    kappa = (k0 / k1) ** (1 / gamma)
    K = (1 + e * m * h * (kappa * delta) ** e) ** (1 / e)
    target = kappa * delta / K
    Delta = findroot(lambda d: d + m * h * d ** mu - target, target)
    eg = e / gamma
    d_bar = k5 * k1 ** (-(gamma + e) / gamma)
    cap2 = (alpha ** eg - 1) / (2 * h * eg * k0 ** eg * delta ** e)
    cap3 = 1 / (eg * k1 ** eg * K ** e * h * Delta ** e)
    rho = (1 - margin) * min(d_bar, cap2, cap3)
    A = delta / Delta
    B = rho * eg * k1 ** eg * (K * (1 + m * h * Delta ** e)) ** e
    den = 1 - B * h * Delta ** e
    return dict(k4=k4, H=H, k5=k5, kappa=kappa, K=K, Delta=Delta, d_bar=d_bar,
                cap2=cap2, cap3=cap3, rho=rho, A=A, B=B,
                c1=A / den ** (1 / e), c2=B / den)


def krasovskii_scalar(a1_, a2_, h, mu, chi, w1, w2, delta):
    e = mu - 1
    a2abs = abs(a2_)
    w = -2 * (a1_ + a2_)
    w0 = w - w1 - h * w2
    de = delta ** e
    H1 = (w1 * chi ** 2 / a2abs) ** (1 / e)
    a1 = 1 - chi ** 2 * h * a2abs
    a2 = w1 - a2abs * de / chi ** 2
    b = max(1 + a2abs * h, (a2abs * (1 + a2abs * h) * de + w1 + h * w2) * de)
    beta = (2 * a2abs + a2_ ** 2 * h * de + w1 + h * w2) * h
    L = a2abs * abs(a1_ + a2_)
    c = min(w0 - h * L * de, w2 - L * de)
    H2 = min(w2 / L, w0 / (h * L)) ** (1 / e)
    Delta = findroot(lambda d: d ** 2 + beta * d ** (mu + 1) - a1 * delta ** 2,
                     delta * sqrt(a1))
    num = 1 + beta * Delta ** e
    c1 = sqrt(num / a1)
    c2 = (c * e / b) * (num / (2 * b * (1 + h))) ** (e / 2)
    return dict(w0=w0, H1=H1, H2=H2, a1=a1, a2=a2, b=b, beta=beta, L=L, c=c,
                Delta=Delta, c1=c1, c2=c2)


def krasovskii_general(k0, k1, k2, k3, w, gamma, m, m1, h, mu, chi, w1, w2, delta):
    e = mu - 1
    w0 = w - w1 - h * w2
    de = delta ** e
    spread = h * k2 * m * (1 + chi ** (-2 * mu))
    H1 = (k0 / spread) ** (1 / e)
    a1 = k0 - spread * de
    a2 = w1 - k2 * m * chi ** (2 * (gamma - 1))
    b = max(k1 + 2 * h * m * k2 * de, (m * k2 + w1 + h * w2) * de)
    beta = (2 * k2 * m + w1 + h * w2) * h
    L = m * m1 * k2 + m * m * k3
    c = min(w0 - 4 * h * L * de, w2 - 2 * L * de)
    H2 = min(w0 / (4 * h * L), w1 / (2 * h * L), w2 / (2 * L)) ** (1 / e)
    p = gamma + e
    Delta = findroot(lambda d: k1 * d ** gamma + beta * d ** p - a1 * delta ** gamma,
                     (a1 / k1) ** (1 / gamma) * delta)
    num = k1 + beta * Delta ** e
    c1 = (num / a1) ** (1 / gamma)
    c2 = (c / b) * (e / gamma) * (num / (2 * b * max(1, h))) ** (e / gamma)
    return dict(w0=w0, H1=H1, H2=H2, a1=a1, a2=a2, b=b, beta=beta, L=L, c=c,
                Delta=Delta, c1=c1, c2=c2)


def example2(zeta=mpf("0.1"), mu=mpf(3)):
    z = zeta
    eta = min(z, 1 - z * (mu + 1), (z / (1 + z)) * (1 - z * (1 + mu) ** 2 / 4))
    return dict(gamma=mu + 1, w=eta / 2 ** (mu - 1),
                k0=mpf("0.5") ** ((mu - 1) / 2) * (1 / (mu + 1) - z),
                k1=1 / (mu + 1) + z,
                k2=sqrt((1 + z * mu) ** 2 + (1 + z) ** 2),
                k3=mu * (1 + z * mu), m=sqrt(2), m1=mu, m2=mu)


def show(title, d):
    print(title)
    for k, v in d.items():
        print(f"  {k:6s} {mp.nstr(v, 17)}")


if __name__ == "__main__":
    one, two = mpf(1), mpf(2)
    show("ex1 razumikhin delta=0.01",
         razumikhin(one, one, two, one, two, one, mpf("1.5"), mpf(10), mpf(3), two, mpf("0.01")))
    k4 = razumikhin(one, one, two, one, two, one, mpf("1.5"), mpf(10), mpf(3), two, mpf("0.01"))["k4"]
    Hx = (1 / k4) ** mpf("0.5")
    show("ex1 razumikhin delta=H(1-1e-6)",
         razumikhin(one, one, two, one, two, one, mpf("1.5"), mpf(10), mpf(3), two, Hx * (1 - mpf("1e-6"))))
    e2 = example2()
    show("ex2 razumikhin delta=0.001",
         razumikhin(e2["k0"], e2["k1"], e2["k2"], e2["w"], e2["gamma"], e2["m"], e2["m2"],
                    one, mpf(3), two, mpf("0.001")))
    show("ex1 scalar table1",
         krasovskii_scalar(-one, mpf("0.5"), mpf(10), mpf(3), mpf("0.32"), mpf("0.05"),
                           mpf("0.07"), mpf("0.1011")))
    show("ex1 scalar table2",
         krasovskii_scalar(-one, mpf("0.5"), mpf(10), mpf(3), mpf("0.015"), mpf("0.5"),
                           mpf("0.017"), mpf("0.01")))
    show("ex2 general table3",
         krasovskii_general(e2["k0"], e2["k1"], e2["k2"], e2["k3"], e2["w"], e2["gamma"],
                            e2["m"], e2["m1"], one, mpf(3), mpf("0.39"), mpf("0.0092"),
                            mpf("0.0022"), mpf("0.001")))
