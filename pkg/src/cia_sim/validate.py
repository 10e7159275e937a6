"""Invariant checks on small instances, run by ``cia-sim validate``."""

from __future__ import annotations

import numpy as np

from .errors import VfdmFailure
from .metrics import (diagonal_spectral_efficiency, primary_leakage,
                      primary_spectral_efficiency, secondary_spectral_efficiency)
from .power import eigenmode_loading, stream_loading, waterfill, whitened_channel
from .precoders import cia_precoder, kernel_basis, nonunitary_baseline, vfdm_root_precoder
from .signal_model import (PDP_PRESETS, OfdmConfig, conv_matrix, cp_insertion_matrix,
                           cp_removal_matrix, derive_seed, dft_matrix, generate_channel,
                           reduced_channel)

SMALL = OfdmConfig(n_subcarriers=16, cp_length=4, channel_order=4, noise_var=0.1)


class _Check:
    def __init__(self, name):
        self.name = name
        self.worst = 0.0
        self.failures = []

    def record(self, ok: bool, value: float, where: str):
        self.worst = max(self.worst, float(value))
        if not ok:
            self.failures.append(where)

    def report(self) -> dict:
        return {"check": self.name, "passed": not self.failures,
                "worst": self.worst, "failures": self.failures[:10]}


def run_validation(cfg: OfdmConfig = SMALL, realizations: int = 25, seed: int = 7) -> list[dict]:
    names = ["cp_transparency", "dft_unitary", "conv_oracle", "reduced_two_ways",
             "kernel_dimension", "alignment", "semi_unitary", "dominance",
             "waterfill_kkt", "det_vs_diagonal", "primary_protection"]
    checks = {n: _Check(n) for n in names}
    N, L, M = cfg.n_subcarriers, cfg.cp_length, cfg.block_length
    A, B, F = cp_insertion_matrix(cfg), cp_removal_matrix(cfg), dft_matrix(N)

    err = np.abs(B @ A - np.eye(N)).max()
    checks["cp_transparency"].record(err == 0, err, "B A")
    err = np.abs(F @ F.conj().T - np.eye(N)).max()
    checks["dft_unitary"].record(err < 1e-12, err, "F F^H")

    budget = cfg.power_budget
    S = cfg.noise_var * np.eye(N, dtype=complex)
    for pdp_name, pdp in PDP_PRESETS.items():
        for t in range(realizations):
            where = f"{pdp_name}#{t}"
            rng = np.random.default_rng(derive_seed(seed, t, 99))
            h_sp = generate_channel(cfg, pdp, derive_seed(seed, t, 0))
            h_ss = generate_channel(cfg, pdp, derive_seed(seed, t, 1))
            h_pp = generate_channel(cfg, pdp, derive_seed(seed, t, 2))
            Hc = conv_matrix(h_sp, cfg)

            x = rng.standard_normal(M) + 1j * rng.standard_normal(M)
            h = np.zeros(M, dtype=complex)
            h[:h_sp.taps.size] = h_sp.taps
            direct = np.array([sum(h[k] * x[(r - k) % M] for k in range(M)) for r in range(M)])
            rel = np.linalg.norm(Hc @ x - direct) / np.linalg.norm(direct)
            checks["conv_oracle"].record(rel < 1e-12, rel, where)

            Hsp = reduced_channel(h_sp, cfg)
            rel = np.linalg.norm(F @ B @ Hc - Hsp.matrix) / np.linalg.norm(Hsp.matrix)
            checks["reduced_two_ways"].record(rel < 1e-12, rel, where)

            s = np.linalg.svd(Hsp.matrix, compute_uv=False)
            ratio = s[-1] / s[0]
            checks["kernel_dimension"].record(ratio > 1e-9, 1.0 / ratio, where)

            Hss = reduced_channel(h_ss, cfg)
            V = kernel_basis(Hsp)
            cia, eig = cia_precoder(V, Hss, S)
            P_cia = waterfill(eig, budget)
            se_cia = secondary_spectral_efficiency(Hss, cia, P_cia, S)
            precs = {"cia": (cia, P_cia)}
            nu = nonunitary_baseline(V, derive_seed(seed, t, 3))
            precs["nonunitary"] = eigenmode_loading(
                nu.E, whitened_channel(S, Hss.matrix @ nu.E), budget)
            try:
                vf = vfdm_root_precoder(h_sp, cfg)
                precs["vfdm"] = (vf, stream_loading(whitened_channel(S, Hss.matrix @ vf.E), budget))
            except VfdmFailure:
                vf = None

            scale = np.linalg.norm(Hc)
            for kind, (E, P) in precs.items():
                _, post = primary_leakage(Hc, E, cfg)
                checks["alignment"].record(post < 1e-10 * scale, post / scale, f"{where}/{kind}")
                se = secondary_spectral_efficiency(Hss, E, P, S)
                checks["dominance"].record(se <= se_cia + 1e-9, se - se_cia, f"{where}/{kind}")

            for kind, E in (("cia", cia.E), ("vfdm", None if vf is None else vf.E)):
                if E is not None:
                    dev = np.abs(np.linalg.svd(E, compute_uv=False) - 1).max()
                    checks["semi_unitary"].record(dev < 1e-8, dev, f"{where}/{kind}")

            p, mu = P_cia.p, P_cia.mu
            act = p > 0
            kkt = max(np.abs(mu - 1 / eig[act] - p[act]).max(initial=0),
                      np.max(mu - 1 / eig[~act], initial=-np.inf).clip(0))
            checks["waterfill_kkt"].record(kkt < 1e-9 and p.sum() <= budget * (1 + 1e-9),
                                           kkt, where)

            diag = diagonal_spectral_efficiency(eig, P_cia, cfg)
            rel = abs(diag - se_cia) / max(se_cia, 1e-300)
            checks["det_vs_diagonal"].record(rel < 1e-9, rel, where)

            Hpp = reduced_channel(h_pp, cfg)
            off = primary_spectral_efficiency(Hpp, cfg)
            on = primary_spectral_efficiency(Hpp, cfg, True, cia, P_cia, Hsp)
            checks["primary_protection"].record(on == off, abs(on - off), where)

    return [c.report() for c in checks.values()]
