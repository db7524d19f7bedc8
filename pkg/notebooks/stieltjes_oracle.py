"""Independent oracle for the frozen recurrence values in tests/test_ortho.py.

Stieltjes procedure with mpmath quadrature inner products; no Hankel
matrices involved.  Weight exp(-x^2) (1 + theta(x - 1/2)).
"""
import mpmath as mp
mp.mp.dps = 60
t = mp.mpf("0.5")
w = lambda x: mp.exp(-x*x) * (1 + (1 if x > t else 0))
ip = lambda f, g: mp.quad(lambda x: f(x)*g(x)*w(x), [-mp.inf, t, mp.inf])
P = [lambda x: mp.mpf(0), lambda x: mp.mpf(1)]
h, al, be = [], [], []
for n in range(4):
    pn, pm = P[-1], P[-2]
    hn = ip(pn, pn); h.append(hn)
    an = ip(lambda x: x*pn(x), pn) / hn; al.append(an)
    bn = hn / h[-2] if n else mp.mpf(0); be.append(bn)
    P.append((lambda pn, pm, an, bn: lambda x: (x-an)*pn(x) - bn*pm(x))(pn, pm, an, bn))
for n in range(4):
    Pn = P[n+1](t); Pm = P[n](t)
    R = mp.exp(-t*t) * Pn**2 / h[n]
    r = mp.exp(-t*t) * Pn*Pm / h[n-1] if n else 0
    print(n, mp.nstr(h[n], 40), mp.nstr(al[n], 40), mp.nstr(be[n], 40), mp.nstr(R, 40), mp.nstr(r, 40))
