"""Second-order pair observables and the X-state density matrix.

The two building blocks, for kernel power n and model prefactor c
(model_coefficient), with omega = sum_i |k_i| and measure
d mu(k) = d^3k e^{-eps|k|} / (2 (2pi)^3 |k|):

  L_gn = c lam_g lam_n int prod_i dmu(k_i)
         conj(chi_g~(omega + gap_g)) chi_n~(omega + gap_n) S_gn(k_1..k_n)
  M    = -c lam_A lam_B int prod_i dmu(k_i) S~(k_1..k_n)
         [G_AB(omega) + G_BA(omega)]

where G is the time-ordered switching weight (nested_time_weight) and S the
smearing factor: center-of-mass mode uses the detector profiles of the total
momentum K = sum k_i; per-leg mode one profile factor per k_i.  After
orientation averaging every spatial phase reduces to j0(K d) with
d = |x_g - x_n|.

Reductions: n=1 -> radial; n=2 center-of-mass -> triangle domain
|k1-k2| <= K <= k1+k2 (K dK = k1 k2 dcos), with the K leg integrated in
closed form; n=2 per-leg -> 2D radial; n>=3 -> importance-sampled Monte
Carlo (exploratory).  Sign and phase conventions are pinned by the literal
position-space oracle, which is ground truth.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import wofz

from .quadrature import Estimate, integrate_adaptive, nested_time_weight
from .scenario import (DetectorParams, Scenario, SmearingMode, switching_ft,
                       validate)
from .wightman import WightmanKernel, kernel_power_eval, model_coefficient

__all__ = [
    "ElementSet",
    "PerturbativityViolated",
    "compute_L",
    "compute_M",
    "compute_elements",
    "oracle_position_space",
    "assemble_rho",
    "scenario_fingerprint",
]

_INV_4PI2 = 1.0 / (4.0 * math.pi**2)
_INV_32PI4 = 1.0 / (32.0 * math.pi**4)


class PerturbativityViolated(ValueError):
    """Raised when L_AA + L_BB exceeds 1 and the leading-order state is void."""


# ---------------------------------------------------------------------------
# small numeric kernels

def _j0(x):
    """Spherical Bessel j0 = sin(x)/x, stable at 0."""
    return np.sinc(np.asarray(x) / math.pi)


def _sk_com(k1, k2, s, d):
    """int_{|k1-k2|}^{k1+k2} dK K e^{-s K^2/4} j0(K d).

    Closed form via the Faddeeva function, evaluated on the stable
    upper-half-plane branch.  k1, k2 arrays; s > 0, d >= 0 scalars.
    """
    a = 0.25 * s
    sqa = math.sqrt(a)
    km = np.abs(k1 - k2)
    kp = k1 + k2
    if d < 1e-8 * sqa:
        return (np.exp(-a * km * km) - np.exp(-a * kp * kp)) / (2.0 * a)
    y = d / (2.0 * sqa)

    def phi(x):
        return -np.imag(np.exp(-x * x - 2j * x * y) * wofz(-y + 1j * x))

    pref = math.sqrt(math.pi) / (2.0 * sqa * d)
    return pref * (phi(sqa * km) - phi(sqa * kp))


def _leg_damping(k, eps, delta):
    """Soft UV factor per momentum leg, with optional vertex-splitting width."""
    w = np.exp(-eps * k)
    if delta > 0.0:
        w = w * np.exp(-0.25 * delta * delta * k * k)
    return w


# ---------------------------------------------------------------------------
# time factors

def _tf_L(det_g: DetectorParams, det_n: DetectorParams, omega):
    if det_g is det_n:
        # diagonal element: |chi~|^2, real by construction
        ft = switching_ft(det_g, omega + det_g.gap)
        return ft.real**2 + ft.imag**2
    return (np.conj(switching_ft(det_g, omega + det_g.gap))
            * switching_ft(det_n, omega + det_n.gap))


def _tf_M(da: DetectorParams, db: DetectorParams, omega):
    g_ab = nested_time_weight(da.gap, db.gap, da.T, db.T,
                              da.switch_center, db.switch_center, omega)
    g_ba = nested_time_weight(db.gap, da.gap, db.T, da.T,
                              db.switch_center, da.switch_center, omega)
    return g_ab + g_ba


# ---------------------------------------------------------------------------
# domains

def _pair_geometry(dg: DetectorParams, dn: DetectorParams):
    d = float(np.linalg.norm(np.asarray(dg.center) - np.asarray(dn.center)))
    s = dg.sigma**2 + dn.sigma**2
    return d, s


def _kmax(scn: Scenario) -> float:
    r = scn.quad.tail_radius
    smin = min(scn.detector_a.sigma, scn.detector_b.sigma)
    tmin = min(scn.detector_a.T, scn.detector_b.T)
    return max(5.0 * r / smin, 5.0 * r / tmin, 10.0 / scn.epsilon)


def _log_breaks(k_small: float, kmax: float) -> list[float]:
    """Power-of-two panels so small-scale structure is never skipped."""
    out = []
    k = min(k_small, kmax / 4.0)
    while k < kmax:
        out.append(k)
        k *= 2.0
    return out


def _structure_scale(scn: Scenario, d: float) -> float:
    da, db = scn.detector_a, scn.detector_b
    scales = [1.0 / max(da.sigma, db.sigma), 1.0 / max(da.T, db.T)]
    if d > 0:
        scales.append(math.pi / d)
    return 0.5 * min(scales)


# ---------------------------------------------------------------------------
# deterministic reducers

def _n1_radial(scn: Scenario, pref, tf, d, s, delta=0.0) -> Estimate:
    eps = scn.epsilon
    # the pair smearing Gaussian kills the integrand long before the generic
    # momentum ceiling at small epsilon
    kmax = max(min(_kmax(scn), 60.0 / math.sqrt(s)), 1.0 / math.sqrt(s))

    def integrand(pts):
        k = pts[:, 0]
        return (_INV_4PI2 * k * _leg_damping(k, eps, delta)
                * np.exp(-0.25 * s * k * k) * _j0(k * d) * tf(k))

    breaks = _log_breaks(_structure_scale(scn, d), kmax)
    est = integrate_adaptive(integrand, [0.0], [kmax], scn.quad,
                             initial_splits=[breaks])
    return est.scaled(pref)


def _n2_com(scn: Scenario, pref, tf, d, s, delta=0.0) -> Estimate:
    """Dedicated two-leg center-of-mass reduction in (u, q) = (k1+k2, k1-k2)."""
    eps = scn.epsilon
    umax = 2.0 * _kmax(scn)
    qcut = min(umax, 60.0 / math.sqrt(s))

    def integrand(pts):
        u = pts[:, 0]
        q = pts[:, 1]
        k1 = 0.5 * (u + q)
        k2 = 0.5 * (u - q)
        ok = (k1 > 0.0) & (k2 > 0.0)
        k1s = np.where(ok, k1, 1.0)
        k2s = np.where(ok, k2, 1.0)
        w = _leg_damping(k1s, eps, delta) * _leg_damping(k2s, eps, delta)
        val = (0.5 * _INV_32PI4) * w * _sk_com(k1s, k2s, s, d) * tf(u)
        return np.where(ok, val, 0.0)

    ks = _structure_scale(scn, d)
    ubreaks = _log_breaks(ks, umax)
    qb = _log_breaks(ks, qcut)
    qbreaks = sorted([-x for x in qb] + [0.0] + qb)
    est = integrate_adaptive(integrand, [0.0, -qcut], [umax, qcut], scn.quad,
                             initial_splits=[ubreaks, qbreaks])
    return est.scaled(pref)


def _n2_perleg(scn: Scenario, pref, tf, d, s, delta=0.0) -> Estimate:
    """Dedicated two-leg reduction with one smearing factor per leg."""
    eps = scn.epsilon
    kcut = min(_kmax(scn), 60.0 / math.sqrt(s))

    def integrand(pts):
        k1 = pts[:, 0]
        k2 = pts[:, 1]
        f1 = (_INV_4PI2 * k1 * _leg_damping(k1, eps, delta)
              * np.exp(-0.25 * s * k1 * k1) * _j0(k1 * d))
        f2 = (_INV_4PI2 * k2 * _leg_damping(k2, eps, delta)
              * np.exp(-0.25 * s * k2 * k2) * _j0(k2 * d))
        return f1 * f2 * tf(k1 + k2)

    breaks = _log_breaks(_structure_scale(scn, d), kcut)
    est = integrate_adaptive(integrand, [0.0, 0.0], [kcut, kcut], scn.quad,
                             initial_splits=[breaks, breaks])
    return est.scaled(pref)


def _npower_generic(scn: Scenario, n: int, pref, tf, d, s, *, seed_tag: int,
                    delta=0.0) -> Estimate:
    """Generic n-kernel-power path used by the multi-field model."""
    eps = scn.epsilon
    per_leg = scn.smearing_mode is SmearingMode.PER_LEG
    if n == 1:
        kmax = max(min(_kmax(scn), 60.0 / math.sqrt(s)), 1.0 / math.sqrt(s))

        def integrand(pts):
            k = pts[:, 0]
            legs = np.ones_like(k)
            for _ in range(n):
                legs = legs * (k * _leg_damping(k, eps, delta))
            return (_INV_4PI2 * legs * np.exp(-0.25 * s * k * k)
                    * _j0(k * d) * tf(k))

        breaks = _log_breaks(_structure_scale(scn, d), kmax)
        est = integrate_adaptive(integrand, [0.0], [kmax], scn.quad,
                                 initial_splits=[breaks])
        return est.scaled(pref)
    if n == 2 and not per_leg:
        umax = 2.0 * _kmax(scn)
        qcut = min(umax, 60.0 / math.sqrt(s))

        def integrand(pts):
            u = pts[:, 0]
            q = pts[:, 1]
            ks = [0.5 * (u + q), 0.5 * (u - q)]
            ok = (ks[0] > 0.0) & (ks[1] > 0.0)
            ksafe = [np.where(ok, k, 1.0) for k in ks]
            w = np.ones_like(u)
            for k in ksafe:
                w = w * _leg_damping(k, eps, delta)
            val = (0.5 * _INV_32PI4) * w * _sk_com(ksafe[0], ksafe[1], s, d) * tf(u)
            return np.where(ok, val, 0.0)

        kss = _structure_scale(scn, d)
        ubreaks = _log_breaks(kss, umax)
        qb = _log_breaks(kss, qcut)
        qbreaks = sorted([-x for x in qb] + [0.0] + qb)
        est = integrate_adaptive(integrand, [0.0, -qcut], [umax, qcut],
                                 scn.quad, initial_splits=[ubreaks, qbreaks])
        return est.scaled(pref)
    if n == 2 and per_leg:
        kcut = min(_kmax(scn), 60.0 / math.sqrt(s))

        def integrand(pts):
            ks = [pts[:, 0], pts[:, 1]]
            w = np.ones_like(ks[0])
            for k in ks:
                w = w * (_INV_4PI2 * k * _leg_damping(k, eps, delta)
                         * np.exp(-0.25 * s * k * k) * _j0(k * d))
            return w * tf(ks[0] + ks[1])

        breaks = _log_breaks(_structure_scale(scn, d), kcut)
        est = integrate_adaptive(integrand, [0.0, 0.0], [kcut, kcut],
                                 scn.quad, initial_splits=[breaks, breaks])
        return est.scaled(pref)
    return _mc_npower(scn, n, pref, tf, d, s, seed_tag=seed_tag, delta=delta)


def _mc_npower(scn: Scenario, n: int, pref, tf, d, s, *, seed_tag: int,
               delta=0.0, time_decay_scale=None) -> Estimate:
    """Monte Carlo over momentum magnitudes and angles for n >= 3.

    Proposal: legs 1..n-1 isotropic with Gamma(2, rate) magnitudes; in
    center-of-mass mode the last momentum is placed so the total K is
    Gaussian with the profile width (covers the back-to-back region that
    dominates at small epsilon).  Unbiased: the proposal density divides out.
    """
    eps = scn.epsilon
    per_leg = scn.smearing_mode is SmearingMode.PER_LEG
    rate = eps
    if time_decay_scale is not None:
        rate = eps + 2.0 * (n - 1) * time_decay_scale
    if per_leg:
        rate += 0.5 * math.sqrt(s)  # each leg is smeared individually
    rng = np.random.Generator(np.random.PCG64(
        np.random.SeedSequence((scn.mc.seed, seed_tag))))
    nsamp = scn.mc.samples
    chunk = 131_072
    tot = 0.0 + 0.0j
    tot_re2 = 0.0
    tot_im2 = 0.0
    done = 0
    meas_norm = 1.0 / (2.0 * (2.0 * math.pi) ** 3)
    sig_p2 = 2.0 / s
    while done < nsamp:
        m = min(chunk, nsamp - done)
        mags = rng.gamma(2.0, 1.0 / rate, size=(m, n - 1))
        dirs = rng.normal(size=(m, n - 1, 3))
        dirs /= np.linalg.norm(dirs, axis=2, keepdims=True)
        vecs = mags[:, :, None] * dirs
        logq = np.sum(2.0 * math.log(rate) - rate * mags - np.log(mags)
                      - math.log(4.0 * math.pi), axis=1)
        if per_leg:
            last_mag = rng.gamma(2.0, 1.0 / rate, size=m)
            last_dir = rng.normal(size=(m, 3))
            last_dir /= np.linalg.norm(last_dir, axis=1, keepdims=True)
            last = last_mag[:, None] * last_dir
            logq += (2.0 * math.log(rate) - rate * last_mag
                     - np.log(last_mag) - math.log(4.0 * math.pi))
        else:
            u = rng.normal(scale=math.sqrt(sig_p2), size=(m, 3))
            last = u - vecs.sum(axis=1)
            logq += (-1.5 * math.log(2.0 * math.pi * sig_p2)
                     - np.sum(u * u, axis=1) / (2.0 * sig_p2))
        allv = np.concatenate([vecs, last[:, None, :]], axis=1)
        kmags = np.linalg.norm(allv, axis=2)
        kmags = np.maximum(kmags, 1e-300)
        ktot = allv.sum(axis=1)
        kk = np.linalg.norm(ktot, axis=1)
        omega = kmags.sum(axis=1)
        logh = np.sum(-eps * kmags - np.log(kmags), axis=1) \
            + n * math.log(meas_norm)
        if delta > 0.0:
            logh += np.sum(-0.25 * delta * delta * kmags**2, axis=1)
        if per_leg:
            spatial = np.prod(np.exp(-0.25 * s * kmags**2)
                              * _j0(kmags * d), axis=1)
        else:
            spatial = np.exp(-0.25 * s * kk * kk) * _j0(kk * d)
        vals = np.exp(logh - logq) * spatial * tf(omega)
        tot += vals.sum()
        tot_re2 += float(np.sum(vals.real**2))
        tot_im2 += float(np.sum(vals.imag**2))
        done += m
    mean = tot / nsamp
    var_re = max(tot_re2 / nsamp - mean.real**2, 0.0)
    var_im = max(tot_im2 / nsamp - mean.imag**2, 0.0)
    stderr = math.sqrt((var_re + var_im) / nsamp)
    return Estimate(pref * mean, abs(pref) * stderr, nsamp, True)


# ---------------------------------------------------------------------------
# public element computations

_SEED_TAGS = {"L_AA": 11, "L_AB": 12, "L_BA": 13, "L_BB": 14,
              "M_AB": 15, "M_BA": 16, "M": 17}


def _check(scn: Scenario):
    report = validate(scn)
    if not report.ok:
        raise ValueError("invalid scenario: " + "; ".join(report.violations))


def _dispatch(scn: Scenario, pref, tf, d, s, *, seed_tag: int,
              delta=0.0, time_decay_scale=None) -> Estimate:
    name = scn.model.name
    n = model_coefficient(scn.model).n
    per_leg = scn.smearing_mode is SmearingMode.PER_LEG
    if name == "linear":
        return _n1_radial(scn, pref, tf, d, s, delta)
    if name in ("quadratic_real", "quadratic_complex"):
        if per_leg:
            return _n2_perleg(scn, pref, tf, d, s, delta)
        return _n2_com(scn, pref, tf, d, s, delta)
    if name == "bilinear":
        if n >= 3:
            return _mc_npower(scn, n, pref, tf, d, s, seed_tag=seed_tag,
                              delta=delta, time_decay_scale=time_decay_scale)
        return _npower_generic(scn, n, pref, tf, d, s, seed_tag=seed_tag,
                               delta=delta)
    raise ValueError(f"unknown model {name!r}")


def compute_L(scn: Scenario, gamma: str, nu: str, *, delta: float = 0.0) -> Estimate:
    """L_{gamma nu}; diagonal entries are each detector's excitation
    probability, the off-diagonal one feeds the correlation block."""
    _check(scn)
    dg = scn.detector(gamma)
    dn = scn.detector(nu)
    coeff = model_coefficient(scn.model)
    pref = coeff.c * dg.lam * dn.lam
    if pref == 0.0:
        return Estimate(0.0 + 0.0j, 0.0, 0, True)
    d, s = _pair_geometry(dg, dn)

    def tf(omega):
        return _tf_L(dg, dn, omega)

    tag = _SEED_TAGS.get(f"L_{gamma}{nu}", 19)
    return _dispatch(scn, pref, tf, d, s, seed_tag=tag, delta=delta,
                     time_decay_scale=min(dg.T, dn.T))


def compute_M(scn: Scenario, *, delta: float = 0.0) -> Estimate:
    """The non-local element M = M_AB + M_BA coupling the double ground
    state to the double excited state."""
    _check(scn)
    da, db = scn.detector_a, scn.detector_b
    coeff = model_coefficient(scn.model)
    pref = -coeff.c * da.lam * db.lam
    if pref == 0.0:
        return Estimate(0.0 + 0.0j, 0.0, 0, True)
    d, s = _pair_geometry(da, db)

    def tf(omega):
        return _tf_M(da, db, omega)

    return _dispatch(scn, pref, tf, d, s, seed_tag=_SEED_TAGS["M"],
                     delta=delta, time_decay_scale=None)


# ---------------------------------------------------------------------------
# position-space oracle (ground truth for conventions)

def _sample_leg(rng, det: DetectorParams, m: int):
    t = rng.normal(det.switch_center, det.T / math.sqrt(2.0), size=m)
    x = rng.normal(np.asarray(det.center), det.sigma / math.sqrt(2.0),
                   size=(m, 3))
    return t, x


def _oracle_pair(scn, dg, dn, kind, seed_tag, samples, seed):
    """MC over the literal (t, t', x, x') integral with Gaussian sampling.

    kind 'L': integrand conj-phase on the gamma leg, unordered times.
    kind 'M': both phases positive, restricted to t' < t.
    """
    n = model_coefficient(scn.model).n
    kernel = WightmanKernel(scn.epsilon)
    nsamp = samples
    rng = np.random.Generator(np.random.PCG64(
        np.random.SeedSequence((seed, seed_tag))))
    pref_abs = math.pi * dg.T * dn.T
    chunk = 262_144
    tot = 0.0 + 0.0j
    tot_re2 = 0.0
    tot_im2 = 0.0
    done = 0
    while done < nsamp:
        m = min(chunk, nsamp - done)
        t1, x1 = _sample_leg(rng, dg, m)
        t2, x2 = _sample_leg(rng, dn, m)
        r = np.linalg.norm(x1 - x2, axis=1)
        w = kernel_power_eval(kernel, n, t1 - t2, r)
        if kind == "L":
            phase = np.exp(-1j * dg.gap * t1 + 1j * dn.gap * t2)
            vals = phase * w
        else:
            phase = np.exp(1j * (dg.gap * t1 + dn.gap * t2))
            vals = np.where(t2 < t1, phase * w, 0.0)
        tot += vals.sum()
        tot_re2 += float(np.sum(vals.real**2))
        tot_im2 += float(np.sum(vals.imag**2))
        done += m
    mean = tot / nsamp
    var_re = max(tot_re2 / nsamp - mean.real**2, 0.0)
    var_im = max(tot_im2 / nsamp - mean.imag**2, 0.0)
    stderr = pref_abs * math.sqrt((var_re + var_im) / nsamp)
    return pref_abs * mean, stderr, nsamp


def oracle_position_space(scn: Scenario, which: str, *,
                          samples: int | None = None,
                          seed: int | None = None) -> Estimate:
    """Monte Carlo estimate of the literal position-space integral for one
    element.  This is the binding definition the reduced paths must match."""
    _check(scn)
    which = which.upper()
    samples = scn.mc.samples if samples is None else samples
    seed = scn.mc.seed if seed is None else seed
    coeff = model_coefficient(scn.model)
    da, db = scn.detector_a, scn.detector_b
    if which in ("L_AA", "L_AB", "L_BA", "L_BB"):
        g, n_lab = which[2], which[3]
        dg, dn = scn.detector(g), scn.detector(n_lab)
        pref = coeff.c * dg.lam * dn.lam
        if pref == 0.0:
            return Estimate(0.0 + 0.0j, 0.0, 0, True)
        val, err, ns = _oracle_pair(scn, dg, dn, "L",
                                    100 + _SEED_TAGS[which], samples, seed)
        return Estimate(pref * val, abs(pref) * err, ns, True)
    if which == "M":
        pref = -coeff.c * da.lam * db.lam
        if pref == 0.0:
            return Estimate(0.0 + 0.0j, 0.0, 0, True)
        vab, eab, n1 = _oracle_pair(scn, da, db, "M",
                                    100 + _SEED_TAGS["M_AB"], samples, seed)
        vba, eba, n2 = _oracle_pair(scn, db, da, "M",
                                    100 + _SEED_TAGS["M_BA"], samples, seed)
        err = math.hypot(eab, eba)
        return Estimate(pref * (vab + vba), abs(pref) * err, n1 + n2, True)
    raise ValueError(f"unknown element id {which!r}")


# ---------------------------------------------------------------------------
# element set and density matrix

def scenario_fingerprint(scn: Scenario) -> str:
    da, db = scn.detector_a, scn.detector_b
    parts = [scn.model.name, str(scn.model.n_fields),
             scn.smearing_mode.value, repr(scn.epsilon)]
    for det in (da, db):
        parts.extend([det.label, repr(det.lam), repr(det.gap),
                      repr(tuple(det.center)), repr(det.switch_center),
                      repr(det.sigma), repr(det.T)])
    parts.extend([repr(scn.quad.rel_tol), repr(scn.quad.abs_tol),
                  str(scn.quad.max_evals), repr(scn.quad.tail_radius),
                  str(scn.mc.samples), str(scn.mc.seed)])
    return hashlib.sha256("|".join(parts).encode()).hexdigest()[:16]


@dataclass(frozen=True)
class ElementSet:
    """The four second-order matrix elements with error estimates.

    L_BA is conj(L_AB) by construction and is not stored.
    """

    L_AA: float
    L_BB: float
    L_AB: complex
    M: complex
    err_AA: float = 0.0
    err_BB: float = 0.0
    err_AB: float = 0.0
    err_M: float = 0.0
    fingerprint: str = ""
    flags: tuple[str, ...] = ()

    def __post_init__(self):
        for name, v, e in (("L_AA", self.L_AA, self.err_AA),
                           ("L_BB", self.L_BB, self.err_BB)):
            if v < -max(10.0 * e, 1e-12):
                raise ValueError(f"{name} must be non-negative, got {v}")


def _diag_value(est: Estimate, name: str) -> float:
    v = est.value
    if abs(v.imag) > max(10.0 * est.err, 1e-12) * max(1.0, abs(v)):
        raise ValueError(f"{name} should be real, got {v}")
    return max(float(v.real), 0.0)


def compute_elements(scn: Scenario) -> ElementSet:
    """All four elements for one scenario."""
    e_aa = compute_L(scn, "A", "A")
    e_bb = compute_L(scn, "B", "B")
    e_ab = compute_L(scn, "A", "B")
    e_m = compute_M(scn)
    flags = tuple(f"non_converged:{n}" for n, e in
                  (("L_AA", e_aa), ("L_BB", e_bb), ("L_AB", e_ab), ("M", e_m))
                  if not e.converged)
    return ElementSet(
        L_AA=_diag_value(e_aa, "L_AA"),
        L_BB=_diag_value(e_bb, "L_BB"),
        L_AB=complex(e_ab.value),
        M=complex(e_m.value),
        err_AA=e_aa.err, err_BB=e_bb.err, err_AB=e_ab.err, err_M=e_m.err,
        fingerprint=scenario_fingerprint(scn),
        flags=flags,
    )


def assemble_rho(elements: ElementSet, *, swap_inner: bool = False) -> np.ndarray:
    """The leading-order X-state in the basis |gg>, |ge>, |eg>, |ee>.

    Follows the printed convention that places L_AA on the second basis
    vector; swap_inner=True permutes the two single-excitation slots (the
    published alternative).  Valid to fourth order in the couplings.
    """
    tot = elements.L_AA + elements.L_BB
    if tot > 1.0:
        raise PerturbativityViolated(
            f"L_AA + L_BB = {tot} exceeds 1; perturbative state invalid")
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = 1.0 - tot
    rho[1, 1] = elements.L_AA
    rho[2, 2] = elements.L_BB
    rho[1, 2] = elements.L_AB
    rho[2, 1] = np.conj(elements.L_AB)
    rho[0, 3] = np.conj(elements.M)
    rho[3, 0] = elements.M
    if swap_inner:
        perm = np.array([0, 2, 1, 3])
        rho = rho[np.ix_(perm, perm)]
    return rho
