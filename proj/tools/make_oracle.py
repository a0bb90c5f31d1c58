#!/usr/bin/env python3
"""Independent reference values for the C++ test suite.

Everything here is built from scratch with numpy/scipy dense linear algebra in
generous truncations; nothing is shared with the C++ sources. The output is
frozen into tests/oracle/golden.json and only regenerated deliberately:

    python3 tools/make_oracle.py > tests/oracle/golden.json
"""
import json
import math
import sys

import numpy as np
from scipy.linalg import expm
from scipy.special import erf, eval_hermite

D_BIG = 90


def ann(d):
    return np.diag(np.sqrt(np.arange(1, d)), 1).astype(complex)


def fock(n, d):
    v = np.zeros(d, complex)
    v[n] = 1.0
    return v


def displacement(beta, d, d_work=None):
    dw = d_work or d + 60
    a = ann(dw)
    return expm(beta * a.conj().T - np.conj(beta) * a)[:d, :d]


def coherent(alpha, d):
    return displacement(alpha, d) @ fock(0, d)


def hybrid_pre(alpha_i, d2, phi=0.0):
    coh = coherent(alpha_i, d2 + 1)
    added = (ann(d2 + 1).conj().T @ coh)[:d2] / math.sqrt(alpha_i**2 + 1)
    psi = np.kron(fock(1, 3), coh[:d2]) + np.exp(1j * phi) * np.kron(fock(0, 3), added)
    return psi / math.sqrt(2)


def ideal_hybrid(alpha, d2):
    return (np.kron(fock(0, 3), coherent(alpha, d2)) + np.kron(fock(1, 3), coherent(-alpha, d2))) / math.sqrt(2)


def gain(alpha):
    return 0.5 + math.sqrt(0.25 + 1.0 / alpha**2)


def npt_dense(psi, d1, d2):
    rho = np.outer(psi, psi.conj()).reshape(d1, d2, d1, d2)
    pt = rho.transpose(2, 1, 0, 3).reshape(d1 * d2, d1 * d2)
    ev = np.linalg.eigvalsh(pt)
    return float(-ev[ev < 0].sum())


def beam_splitter(theta, d):
    db = 2 * d
    a = np.kron(ann(db), np.eye(db))
    b = np.kron(np.eye(db), ann(db))
    u = expm(theta * (a.conj().T @ b - a @ b.conj().T)).reshape(db, db, db, db)
    return u[:d, :d, :d, :d].reshape(d * d, d * d)


def teleamp(alpha_i, afp, d=20, dp=25):
    g = gain(alpha_i)
    af = (g - 1) * alpha_i / 2
    beta = (1 + g) * alpha_i / 2
    pre = hybrid_pre(alpha_i, 60).reshape(3, 60)
    disp = displacement(-beta, 60, 140)
    psi_s = (pre @ disp.T)[:, :d]
    nprime = 1.0 / math.sqrt(2 * (1 - math.exp(-2 * af**2 - 2 * afp**2)))
    ch = nprime * (np.kron(coherent(af, d), coherent(afp, dp)) - np.kron(coherent(-af, d), coherent(-afp, dp)))
    joint = np.einsum("ab,cd->abcd", psi_s, ch.reshape(d, dp))
    bs = beam_splitter(math.pi / 4, d).reshape(d, d, d, d)
    mixed = np.einsum("bcxy,axyd->abcd", bs, joint)
    out10 = mixed[:, 1, 0, :].reshape(-1)
    parity = np.exp(1j * math.pi * np.arange(dp))
    out01 = (mixed[:, 0, 1, :] * parity[None, :]).reshape(-1)
    p10 = float(np.vdot(out10, out10).real)
    p01 = float(np.vdot(out01, out01).real)
    n10 = out10 / math.sqrt(p10)
    n01 = out01 / math.sqrt(p01)
    ideal = ideal_hybrid(afp, dp)
    return {
        "alpha_i": alpha_i,
        "alpha_f_prime": afp,
        "alpha_f": af,
        "displacement": beta,
        "fidelity_prime": float(abs(np.vdot(ideal, n10)) ** 2),
        "p_10": p10,
        "p_01": p01,
        "outcome_overlap": float(abs(np.vdot(n10, n01))),
    }


def wigner_point(rho, x, p):
    # Pad before displacing so no amplitude is cropped away.
    d = rho.shape[0] + 40
    padded = np.zeros((d, d), complex)
    padded[: rho.shape[0], : rho.shape[0]] = rho
    beta = (x + 1j * p) / math.sqrt(2)
    dm = displacement(-beta, d, d + 80)
    moved = dm @ padded @ dm.conj().T
    parity = (-1.0) ** np.arange(d)
    return float((np.diag(moved).real * parity).sum() / math.pi)


def hermite_fn(n, x):
    return eval_hermite(n, x) * np.exp(-x * x / 2) / math.sqrt(2**n * math.factorial(n) * math.sqrt(math.pi))


def main():
    out = {}

    out["gain_alpha_2"] = gain(2.0) * 2.0
    pacs = {}
    for alpha in (1.0, 2.0, 4.0):
        v = ann(D_BIG).conj().T @ coherent(alpha, D_BIG)
        v /= np.linalg.norm(v)
        pacs[str(alpha)] = float(abs(np.vdot(coherent(gain(alpha) * alpha, D_BIG), v)) ** 2)
    out["pacs_fidelity"] = pacs

    sym = {}
    for alpha_i in (1.0, 2.0):
        g = gain(alpha_i)
        af = (g - 1) * alpha_i / 2
        beta = (1 + g) * alpha_i / 2
        pre = hybrid_pre(alpha_i, 60).reshape(3, 60)
        moved = (pre @ displacement(-beta, 60, 140).T).reshape(-1)
        sym[str(alpha_i)] = {"alpha_f": af, "fidelity": float(abs(np.vdot(ideal_hybrid(af, 60), moved)) ** 2)}
    out["symmetric"] = sym

    out["npt_hybrid_pre"] = {str(a): npt_dense(hybrid_pre(a, 80), 3, 80) for a in (1.0, 1.4, 2.0, 3.25)}

    out["teleamp"] = [teleamp(1.0, 1.0), teleamp(2.0, 1.5)]

    # Vacuum-heralded branch of hybrid_pre(1.4): the normalized photon-added coherent state.
    v = ann(60).conj().T @ coherent(1.4, 60)
    v /= np.linalg.norm(v)
    rho_pacs = np.outer(v, v.conj())
    out["wigner"] = {
        "vacuum_origin": wigner_point(np.outer(fock(0, 10), fock(0, 10)), 0.0, 0.0),
        "one_photon_origin": wigner_point(np.outer(fock(1, 10), fock(1, 10)), 0.0, 0.0),
        "one_photon_x1_p05": wigner_point(np.outer(fock(1, 10), fock(1, 10)), 1.0, 0.5),
        "pacs_1_4": [{"x": x, "p": p, "w": wigner_point(rho_pacs, x, p)} for x, p in ((0.0, 0.0), (-0.8, 0.3), (1.5, -1.0))],
    }

    xs = [-1.3, 0.0, 0.7, 2.1]
    out["hermite"] = {"x": xs, "psi": [[float(hermite_fn(n, x)) for n in range(6)] for x in xs]}

    # Probability that a vacuum quadrature falls in [0, 0.2) and [1.0, 1.2).
    out["vacuum_bins"] = {
        "0": float(0.5 * (erf(0.2) - erf(0.0))),
        "1.0": float(0.5 * (erf(1.2) - erf(1.0))),
    }

    json.dump(out, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
