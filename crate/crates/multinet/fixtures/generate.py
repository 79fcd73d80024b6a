# Regenerates synthetic12/ and rank3/. Requires numpy and pandas.
# Run from this directory: python3 generate.py
import numpy as np, pandas as pd, itertools
rng = np.random.default_rng(20130101)
d = "synthetic12/"
labels = list("ABCDEFGHIJKL")
open(d+"roster.txt","w").write("\n".join(labels)+"\n")
sh = [("A","B",0.05),("B","C",0.10),("C","D",0.03),("D","A",0.20),
      ("E","F",0.04),("F","G",0.02),("G","H",0.07),("H","E",0.12),
      ("A","E",0.08),("I","A",0.06),("A","J",0.09),
      ("B","D",0.015),("C","C",0.30)]
with open(d+"shareholding.csv","w") as f:
    f.write("src,dst,weight\n")
    for s,t,w in sh: f.write(f"{s},{t},{w}\n")
board = [("A","d1"),("A","d2"),("C","d2"),("C","d3"),("D","d4"),("H","d4"),("H","d5"),("F","d5"),
         ("K","d6"),("K","d7"),("L","d6"),("L","d7"),("I","d8"),("B","d9"),("A","d1")]
with open(d+"board.csv","w") as f:
    f.write("company,director\n")
    for c,x in board: f.write(f"{c},{x}\n")
T = 250
tick = [l for l in labels if l != "J"]
f1 = rng.normal(size=T); f2 = rng.normal(size=T)
R = {}
for t in tick:
    if t in "ABCE": R[t] = f1 + 0.2*rng.normal(size=T)
    elif t in "GH": R[t] = f2 + 0.85*rng.normal(size=T)
    else: R[t] = rng.normal(size=T)
dates = pd.bdate_range("2013-01-02", periods=T+1)
P = {}
for t in tick:
    p = [100.0]
    for r in R[t]: p.append(p[-1]*(1+0.01*r))
    P[t] = np.round(np.array(p), 6)
df = pd.DataFrame(P, index=[x.strftime("%Y-%m-%d") for x in dates])
df.loc[df.index[[10, 11, 57]], "I"] = np.nan
df.index.name = "date"
df.to_csv(d+"prices.csv", float_format="%.6f", na_rep="")
# verify from the written file
back = pd.read_csv(d+"prices.csv", index_col=0)
ret = back / back.shift(1) - 1
C = ret.corr(min_periods=2)
for a,b in itertools.combinations(tick,2):
    c = C.loc[a,b]
    if c > 0.3 or (a,b)==("G","H"): print(a,b,round(c,4))
print("max other", max(abs(C.loc[a,b]) for a,b in itertools.combinations(tick,2) if not (set(a+b)<=set("ABCE")) and (a,b)!=("G","H")))

# exact rank-3 tensor
n, l, R3 = 6, 3, 3
def sep(rows):
    m = rng.uniform(size=(rows,R3))*0.5
    for i in range(rows): m[i, i % R3] += 2.0
    return m/np.linalg.norm(m,axis=0)
U,V,W = sep(n), sep(n), sep(l)
lam = [6.0, 3.5, 1.5]
X = np.einsum("r,ir,jr,kr->ijk", lam, U, V, W)
with open("rank3/tensor.txt","w") as f:
    f.write(f"{n} {n} {l}\n")
    for k in range(l):
        for j in range(n):
            for i in range(n):
                f.write(f"{i} {j} {k} {float(X[i,j,k])!r}\n")
open("rank3/labels.txt","w").write("\n".join(f"N{i}" for i in range(n))+"\n")
open("rank3/layers.txt","w").write("X\nY\nZ\n")
