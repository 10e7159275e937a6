"""Monte Carlo driver for the secondary-link spectral efficiency sweeps."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from .errors import VfdmFailure
from .metrics import secondary_spectral_efficiency
from .power import (NoiseModel, eigenmode_loading, interference_covariance,
                    stream_loading, waterfill, whitened_channel)
from .precoders import (PrecoderKind, cia_precoder, kernel_basis, nonunitary_baseline,
                        vfdm_root_precoder)
from .signal_model import (OfdmConfig, PdpKind, PdpModel, derive_seed, generate_channel,
                           reduced_channel)

log = logging.getLogger(__name__)

# stream ids for derive_seed
LINK_PP, LINK_PS, LINK_SP, LINK_SS, LINK_GAMMA = range(5)

SNR_NOTE = ("SNR = P_s / sigma^2 in dB with P_s fixed; power budget (N+L)*P_s; "
            "spectral efficiency normalized by N+L; channels reused across the "
            "SNR sweep (common random numbers); VFDM mean over non-failed trials")

CSV_COLUMNS = ("snr_db", "precoder", "mean_se_bps_hz", "stderr_se", "trials", "failure_rate")

WORKERS_ENV = "CIA_SIM_WORKERS"


@dataclass(frozen=True)
class ExperimentConfig:
    cfg: OfdmConfig = field(default_factory=OfdmConfig)
    pdp: PdpModel = field(default_factory=PdpModel)
    precoders: tuple = (PrecoderKind.CIA_OPTIMAL, PrecoderKind.VFDM_ROOT,
                        PrecoderKind.NON_UNITARY)
    snr_db: tuple = (0.0, 30.0, 5.0)
    trials: int = 500
    master_seed: int = 1
    include_primary_interference: bool = False
    output_path: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "precoders",
                           tuple(PrecoderKind(k) for k in self.precoders))
        object.__setattr__(self, "snr_db", tuple(float(x) for x in self.snr_db))
        start, stop, step = self.snr_db
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not step > 0 or start > stop:
            raise ValueError("SNR sweep needs step > 0 and start <= stop")
        if not self.precoders:
            raise ValueError("no precoder requested")

    def snr_points(self) -> list[float]:
        start, stop, step = self.snr_db
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [start + i * step for i in range(n)]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pdp"] = {"kind": self.pdp.kind.value, "decay_ratio": self.pdp.decay_ratio}
        d["precoders"] = [k.value for k in self.precoders]
        d["snr_db"] = list(self.snr_db)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        d["cfg"] = OfdmConfig(**d["cfg"])
        d["pdp"] = PdpModel(PdpKind(d["pdp"]["kind"]), d["pdp"]["decay_ratio"])
        return cls(**d)


@dataclass(frozen=True)
class SimPoint:
    snr_db: float
    precoder: str
    mean_se: float | None
    stderr_se: float | None
    trials: int
    failure_rate: float

    @property
    def delivered_se(self) -> float:
        """Mean over all trials, failed trials counted as zero rate."""
        if self.mean_se is None:
            return 0.0
        return self.mean_se * (1.0 - self.failure_rate)


@dataclass(frozen=True)
class SimResult:
    config: ExperimentConfig
    points: tuple

    def point(self, snr_db: float, precoder) -> SimPoint:
        name = PrecoderKind(precoder).value
        for pt in self.points:
            if pt.precoder == name and abs(pt.snr_db - snr_db) < 1e-9:
                return pt
        raise KeyError((snr_db, name))

    def curve(self, precoder) -> list[SimPoint]:
        name = PrecoderKind(precoder).value
        return [pt for pt in self.points if pt.precoder == name]

    def to_json(self) -> str:
        doc = {
            "note": SNR_NOTE,
            "config": self.config.to_dict(),
            "results": [asdict(pt) for pt in self.points],
        }
        return json.dumps(doc, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "SimResult":
        doc = json.loads(text)
        pts = tuple(SimPoint(**pt) for pt in doc["results"])
        return cls(ExperimentConfig.from_dict(doc["config"]), pts)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# {SNR_NOTE}\n")
        c = self.config
        buf.write(f"# N={c.cfg.n_subcarriers} L={c.cfg.cp_length} l={c.cfg.channel_order} "
                  f"pdp={c.pdp.kind.value} decay_ratio={c.pdp.decay_ratio} "
                  f"trials={c.trials} seed={c.master_seed} "
                  f"primary_interference={c.include_primary_interference}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for pt in self.points:
            w.writerow([repr(pt.snr_db), pt.precoder, _fmt(pt.mean_se), _fmt(pt.stderr_se),
                        pt.trials, repr(pt.failure_rate)])
        return buf.getvalue()


def _fmt(x):
    return "nan" if x is None else repr(x)


def run_trial(ec: ExperimentConfig, trial: int) -> dict:
    """Spectral efficiency of every requested precoder on one channel draw.

    Returns a mapping ``precoder value -> list of SE per SNR point``; the list
    is ``None`` when the VFDM construction failed on this draw.
    """
    cfg = ec.cfg
    seed = lambda link: derive_seed(ec.master_seed, trial, link)  # noqa: E731
    with threadpool_limits(1):
        h_sp = generate_channel(cfg, ec.pdp, seed(LINK_SP))
        h_ss = generate_channel(cfg, ec.pdp, seed(LINK_SS))
        H_sp = reduced_channel(h_sp, cfg)
        H_ss = reduced_channel(h_ss, cfg)
        H_ps = None
        if ec.include_primary_interference:
            H_ps = reduced_channel(generate_channel(cfg, ec.pdp, seed(LINK_PS)), cfg)
        V = kernel_basis(H_sp)

        vfdm = nonunit = None
        if PrecoderKind.VFDM_ROOT in ec.precoders:
            try:
                vfdm = vfdm_root_precoder(h_sp, cfg)
            except VfdmFailure as exc:
                log.debug("trial %d: VFDM failed: %s", trial, exc)
        if PrecoderKind.NON_UNITARY in ec.precoders:
            nonunit = nonunitary_baseline(V, seed(LINK_GAMMA))

        out = {k.value: [] for k in ec.precoders}
        budget = cfg.power_budget
        for snr in ec.snr_points():
            noise_var = cfg.p_secondary / 10 ** (snr / 10)
            noise = NoiseModel(noise_var, ec.include_primary_interference, cfg.p_primary)
            S = interference_covariance(noise, H_ps, cfg)
            for kind in ec.precoders:
                if kind is PrecoderKind.CIA_OPTIMAL:
                    prec, eig = cia_precoder(V, H_ss, S)
                    se = secondary_spectral_efficiency(H_ss, prec, waterfill(eig, budget), S)
                elif kind is PrecoderKind.VFDM_ROOT:
                    if vfdm is None:
                        out[kind.value] = None
                        continue
                    G = whitened_channel(S, H_ss.matrix @ vfdm.E)
                    se = secondary_spectral_efficiency(H_ss, vfdm, stream_loading(G, budget), S)
                else:
                    G = whitened_channel(S, H_ss.matrix @ nonunit.E)
                    E_l, P = eigenmode_loading(nonunit.E, G, budget)
                    se = secondary_spectral_efficiency(H_ss, E_l, P, S)
                out[kind.value].append(se)
    return out


def _trial_job(args):
    ec, trial = args
    return trial, run_trial(ec, trial)


def default_workers() -> int:
    return max(1, int(os.environ.get(WORKERS_ENV, "1")))


def run_experiment(ec: ExperimentConfig, workers: int | None = None) -> SimResult:
    """Run all trials and reduce them to per-(SNR, precoder) statistics.

    Trials are reduced in trial-index order with compensated summation, so
    the result does not depend on ``workers``.
    """
    workers = default_workers() if workers is None else max(1, int(workers))
    jobs = [(ec, t) for t in range(ec.trials)]
    if workers == 1:
        outcomes = [_trial_job(j) for j in jobs]
    else:
        chunk = max(1, ec.trials // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_trial_job, jobs, chunksize=chunk))
    outcomes.sort(key=lambda o: o[0])

    snrs = ec.snr_points()
    points = []
    for kind in ec.precoders:
        ok = [o[kind.value] for _, o in outcomes if o[kind.value] is not None]
        failure_rate = 1.0 - len(ok) / ec.trials
        for i, snr in enumerate(snrs):
            mean, stderr = _mean_stderr([row[i] for row in ok])
            points.append(SimPoint(snr, kind.value, mean, stderr, len(ok), failure_rate))
    result = SimResult(ec, tuple(points))
    _check_monotone(result)
    return result


def _mean_stderr(values):
    n = len(values)
    if n == 0:
        return None, None
    mean = math.fsum(values) / n
    if n < 2:
        return mean, None
    var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, math.sqrt(var / n)


def _check_monotone(result: SimResult):
    strict_cia = not result.config.include_primary_interference
    for kind in result.config.precoders:
        means = [pt.mean_se for pt in result.curve(kind) if pt.mean_se is not None]
        if all(b >= a for a, b in zip(means, means[1:])):
            continue
        msg = f"mean SE of {kind.value} is not non-decreasing in SNR"
        if kind is PrecoderKind.CIA_OPTIMAL and strict_cia:
            raise RuntimeError(msg)
        log.warning(msg)


def emit_results(r: SimResult, fmt: str, path) -> None:
    if fmt == "csv":
        text = r.to_csv()
    elif fmt == "json":
        text = r.to_json()
    else:
        raise ValueError(f"unknown format {fmt!r}")
    Path(path).write_text(text)


def load_results(path) -> SimResult:
    return SimResult.from_json(Path(path).read_text())
