"""Independent undetermined-coefficient oracle for the large-s coefficients of v1, v2, v3.

Substitutes R = v1 e + v2 e^3 + v3 e^5 (e = n^{-1/6}) into the edge-scaled
second-order equation for R_n, splits by powers of e and solves each order for
power series in 1/s with sympy.  Independent of hpk.asymptotics: it works from
the raw equation, not the reduced v1/v2/v3 equations.  Run time about 6 s.
"""
import sympy as sp
s,e=sp.symbols('s e',positive=True)  # e = 1/m = n^{-1/6}
v1,v2,v3=[sp.Function(f'v{i}')(s) for i in (1,2,3)]
m=1/e
R=v1*e+v2*e**3+v3*e**5
sod1 = 2*R*sp.diff(R,s,2) - sp.diff(R,s)**2 - 2*R*(sp.Rational(3,4)*e**2*R**3 - sp.sqrt(2)*(2*m+s*e**3)*R**2 + (s**2*e**4/2+2*s-e**2)*R)
E=sp.expand(sod1)
P=sp.Poly(E,e)
c=dict((k[0],v) for k,v in P.terms())
ks=sorted(c)[:3]; print(ks)
d=lambda f,k=1: sp.diff(f,s,k)
us=2*v1*d(v1,2)-d(v1)**2+4*sp.sqrt(2)*v1**3-4*s*v1**2
vs=2*v1**2*d(v2,2)-2*v1*d(v1)*d(v2)+(d(v1)**2+8*sp.sqrt(2)*v1**3-4*s*v1**2)*v2+2*v1**3
ws=(2*v1**3*d(v3,2)-2*v1**2*d(v1)*d(v3)+(v1*d(v1)**2+8*sp.sqrt(2)*v1**4-4*s*v1**3)*v3-v1**2*d(v2)**2+2*v1*d(v1)*v2*d(v2)-d(v1)**2*v2**2-s**2*v1**4+2*sp.sqrt(2)*s*v1**5-sp.Rational(3,2)*v1**6+2*v1**3*v2+4*sp.sqrt(2)*v1**3*v2**2)
# exact orders: order-k equation includes lower-order eqs' multiples; reduce using lower eqs
print(sp.simplify(c[ks[0]]/us))
# second: eq2 contains v2*(d/dv1 of us) ... compare after substituting nothing: just ratio check may fail; print forms
for k in ks[1:]:
    print(k, sp.factor(sp.expand(c[k])))
y=sp.symbols('y',positive=True)
K=17
a=sp.symbols(f'a0:{K}'); b=sp.symbols(f'b0:{K}'); cc=sp.symbols(f'c0:{K+3}')
V1=s/sp.sqrt(2)+sum(a[k]*s**(-k) for k in range(K))
V2=sum(b[k]*s**(-k) for k in range(K))
V3=sum(cc[k]*s**(-(k-2)) for k in range(K+3))
def expand_in_y(expr, upto):
    ex=sp.expand(expr.subs(s,1/y))
    return sp.Poly(sp.expand(ex*y**12), y)  # shift to make polynomial
def solve_seq(expr, unknowns, sub):
    ex=sp.expand(expr.subs(sub).doit().subs(s,1/y))
    ex=sp.expand(ex*y**20)
    P=sp.Poly(ex,y); sol={}
    for k in range(0,60):
        co=P.coeff_monomial(y**k)
        co=sp.expand(co.subs(sol))
        free=[u for u in unknowns if co.has(u) and u not in sol]
        if not free: continue
        # the unknown entering linearly at this order: the lowest-index free one
        u=free[0]
        r=sp.solve(co,u)
        if len(r)!=1: print("nonunique",k,u,r); break
        sol[u]=sp.nsimplify(r[0]) if False else sp.simplify(r[0])
        if len(sol)==len(unknowns): break
    return sol
import time; t0=time.time()
sol1=solve_seq(c[ks[0]], list(a), {v1:V1})
print("v1", [sol1[a[k]] for k in range(12)], time.time()-t0)
V1s=V1.subs(sol1)
sol2=solve_seq(c[ks[1]], list(b), {v1:V1s, v2:V2})
print("v2", [sol2[b[k]] for k in range(13)], time.time()-t0)
V2s=V2.subs(sol2)
sol3=solve_seq(c[ks[2]], list(cc), {v1:V1s, v2:V2s, v3:V3})
print("v3", [(k-2, sol3.get(cc[k])) for k in range(16)], time.time()-t0)
