"""Quality-of-transmission estimation for both network segments.

Access feeders are short and amplifier-noise limited, so they are scored
with a plain OSNR: launch power minus total loss (fiber, polarization,
and the passive splitter for point-to-multipoint trees), against the ASE
of one post-loss EDFA whose gain exactly compensates the loss.

Metro-core lightpaths run far enough that nonlinear interference
matters.  Each link is cut into equal spans of at most ``max_span_km``,
one amplifier per span at gain = span loss.  Per-span NLI comes from a
closed-form single-coefficient model of self- and cross-channel mixing
over the full WDM comb (an incoherent eta * P^3 law with an arcsinh
bandwidth factor), optionally tilted per channel by a linear
inter-channel Raman transfer.  Span SNRs accumulate incoherently
(1/SNR_total = sum of 1/SNR_i), combine with the transceiver's
back-to-back SNR, and margins (aging, filter-cascade penalty) are then
subtracted in dB.

Everything here is a pure function of immutable inputs; units are SI
internally (W, Hz, m) with dB/km/THz at the interfaces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .model import FiberParams
from .routing import Path

PLANCK_J_S = 6.62607015e-34

DEFAULT_FREQUENCY_THZ = 193.4
DEFAULT_MAX_SPAN_KM = 80.0


class QotError(ValueError):
    pass


class AtmScenario(str, Enum):
    PTP = "ptp"
    PTMP = "ptmp"


def db2lin(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def lin2db(x: float) -> float:
    if x <= 0:
        raise QotError(f"cannot convert non-positive ratio {x} to dB")
    return 10.0 * math.log10(x)


def dbm2w(p_dbm: float) -> float:
    return 10.0 ** ((p_dbm - 30.0) / 10.0)


@dataclass(frozen=True)
class AtmChannelPlan:
    """Access-segment channel plan (50 GHz grid, 27.95 GBaud)."""

    spacing_ghz: float = 50.0
    symbol_rate_gbaud: float = 27.95
    launch_power_dbm: float = 0.0
    fanout: int = 1
    frequency_thz: float = DEFAULT_FREQUENCY_THZ

    def __post_init__(self) -> None:
        if self.symbol_rate_gbaud > self.spacing_ghz:
            raise QotError("symbol rate exceeds channel spacing")
        if self.fanout < 1:
            raise QotError(f"fanout must be >= 1, got {self.fanout}")


@dataclass(frozen=True)
class MtcChannelPlan:
    """Metro-core channel plan (75 GHz grid, 64 GBaud over a 6 THz comb)."""

    spacing_ghz: float = 75.0
    symbol_rate_gbaud: float = 64.0
    total_bandwidth_thz: float = 6.0
    launch_power_dbm: float = 0.0
    center_frequency_thz: float = DEFAULT_FREQUENCY_THZ

    def __post_init__(self) -> None:
        if self.symbol_rate_gbaud > self.spacing_ghz:
            raise QotError("symbol rate exceeds channel spacing")
        n_ch = self.total_bandwidth_thz * 1e3 / self.spacing_ghz
        if n_ch < 1:
            raise QotError("comb bandwidth below one channel spacing")


@dataclass(frozen=True)
class AmpModel:
    """EDFA model; gain is set per evaluation to compensate the loss."""

    noise_figure_db: float = 4.5

    def __post_init__(self) -> None:
        if self.noise_figure_db <= 0:
            raise QotError(f"noise figure must be > 0 dB, got {self.noise_figure_db}")


@dataclass(frozen=True)
class WssSchedule:
    """Filter-cascade penalty: first stage, per-stage increment, cap (dB)."""

    first_db: float = 0.3
    step_db: float = 0.7
    cap_db: float = 8.0

    def penalty_db(self, stages: int) -> float:
        if stages < 0:
            raise QotError(f"stage count must be >= 0, got {stages}")
        if stages == 0:
            return 0.0
        return min(self.first_db + self.step_db * (stages - 1), self.cap_db)


@dataclass(frozen=True)
class MarginModel:
    aging_db: float = 1.0
    b2b_snr_db: float = 36.0
    wss: WssSchedule = field(default_factory=WssSchedule)


@dataclass(frozen=True)
class QotBreakdown:
    total_loss_db: float = 0.0
    gain_db: float = 0.0
    ase_w: float = 0.0
    nli_w: float = 0.0
    raw_snr_db: float = 0.0
    wss_penalty_db: float = 0.0
    aging_db: float = 0.0


@dataclass(frozen=True)
class QotResult:
    metric: str
    value_db: float
    breakdown: QotBreakdown
    feasible: bool
    threshold_db: float
    limiting: str | None = None


@dataclass(frozen=True)
class ReachVerdict:
    feasible: bool
    limiting: str | None
    path_km: float
    reach_km: float | None


def splitter_loss(fanout: int) -> float:
    """Passive 1:N splitter loss, 10 log10(N) dB; 0 for N = 1."""
    if fanout < 1:
        raise QotError(f"fanout must be >= 1, got {fanout}")
    return 10.0 * math.log10(fanout)


ATM_ALPHA_DB_KM = 0.2
ATM_POLARIZATION_LOSS_DB = 0.5


def atm_total_loss(
    length_km: float,
    fanout: int,
    scenario: AtmScenario,
    alpha_db_km: float = ATM_ALPHA_DB_KM,
    polarization_loss_db: float = ATM_POLARIZATION_LOSS_DB,
) -> float:
    """Feeder loss: alpha*L + polarization penalty (+ splitter for PtMP)."""
    if length_km < 0:
        raise QotError(f"length must be >= 0, got {length_km}")
    loss = alpha_db_km * length_km + polarization_loss_db
    if scenario is AtmScenario.PTMP:
        loss += splitter_loss(fanout)
    return loss


def ase_power(gain_db: float, bandwidth_hz: float, noise_figure_db: float,
              frequency_hz: float) -> float:
    """Amplifier spontaneous-emission power (G-1) * h * nu * B * F in watts."""
    if bandwidth_hz <= 0 or frequency_hz <= 0:
        raise QotError("bandwidth and frequency must be positive")
    g_lin = db2lin(gain_db)
    f_lin = db2lin(noise_figure_db)
    return (g_lin - 1.0) * PLANCK_J_S * frequency_hz * bandwidth_hz * f_lin


def osnr_atm(
    length_km: float,
    fanout: int,
    plan: AtmChannelPlan,
    amp: AmpModel,
    scenario: AtmScenario,
    margins: MarginModel | None = None,
    threshold_db: float = 13.0,
) -> QotResult:
    """Feeder OSNR with a single post-loss amplifier at gain = total loss."""
    margins = margins or MarginModel()
    loss_db = atm_total_loss(length_km, fanout, scenario)
    gain_db = loss_db
    bw_hz = plan.symbol_rate_gbaud * 1e9
    p_ase = ase_power(gain_db, bw_hz, amp.noise_figure_db, plan.frequency_thz * 1e12)
    p_rx = dbm2w(plan.launch_power_dbm - loss_db)
    osnr_db = lin2db(p_rx / p_ase)
    margined = osnr_db - margins.aging_db
    feasible = margined >= threshold_db
    return QotResult(
        metric="osnr",
        value_db=margined,
        breakdown=QotBreakdown(
            total_loss_db=loss_db,
            gain_db=gain_db,
            ase_w=p_ase,
            nli_w=0.0,
            raw_snr_db=osnr_db,
            wss_penalty_db=0.0,
            aging_db=margins.aging_db,
        ),
        feasible=feasible,
        threshold_db=threshold_db,
        limiting=None if feasible else "snr",
    )


# -- metro-core nonlinear model ----------------------------------------------


def _attenuation_per_m(alpha_db_km: float) -> float:
    """Power attenuation coefficient (2*alpha_field) in 1/m."""
    return alpha_db_km * math.log(10.0) / 10.0 / 1000.0


def nli_coefficient(fiber: FiberParams, span_km: float, plan: MtcChannelPlan) -> float:
    """Closed-form per-span NLI coefficient eta in 1/W^2 (P_NLI = eta * P^3).

    Incoherent single-span form for the center channel of a fully loaded
    comb: (8/27) gamma^2 L_eff^2 asinh(pi^2 |beta2| L_eff,a B_wdm^2 / 2)
    / (pi |beta2| L_eff,a B_ch^2).
    """
    if span_km <= 0:
        raise QotError(f"span must be > 0 km, got {span_km}")
    gamma = fiber.gamma_w_km / 1000.0
    if gamma == 0.0:
        return 0.0
    beta2 = abs(fiber.beta2_ps2_km) * 1e-27
    if beta2 == 0.0:
        raise QotError("nonlinear model needs non-zero dispersion")
    a2 = _attenuation_per_m(fiber.alpha_db_km)
    span_m = span_km * 1000.0
    l_eff = (1.0 - math.exp(-a2 * span_m)) / a2
    l_eff_a = 1.0 / a2
    b_wdm = plan.total_bandwidth_thz * 1e12
    b_ch = plan.symbol_rate_gbaud * 1e9
    arg = math.pi**2 * beta2 * l_eff_a * b_wdm**2 / 2.0
    return (8.0 / 27.0) * gamma**2 * l_eff**2 * math.asinh(arg) / (
        math.pi * beta2 * l_eff_a * b_ch**2
    )


def isrs_tilt_factor(channel_offset_thz: float, tilt_db_per_thz: float = 0.5) -> float:
    """Linear power factor from the inter-channel Raman tilt.

    Power transfers from the high-frequency side of the comb to the low
    side; channels above center lose, below center gain.  The tilt is a
    fixed dB-per-THz slope per span (calibrated at 0 dBm/ch launch) so
    the cubic power law of the NLI term is preserved.
    """
    return db2lin(-tilt_db_per_thz * channel_offset_thz)


def nli_power_span(
    fiber: FiberParams,
    span_km: float,
    plan: MtcChannelPlan,
    p_ch_w: float,
    channel_offset_thz: float = 0.0,
    tilt_db_per_thz: float = 0.5,
) -> float:
    """Per-span NLI power eta * (tilted channel power)^3 in watts."""
    if p_ch_w <= 0:
        raise QotError(f"channel power must be > 0 W, got {p_ch_w}")
    eta = nli_coefficient(fiber, span_km, plan)
    p_eff = p_ch_w * isrs_tilt_factor(channel_offset_thz, tilt_db_per_thz)
    return eta * p_eff**3


@dataclass(frozen=True)
class Span:
    length_km: float
    fiber: FiberParams


def make_spans(length_km: float, fiber: FiberParams,
               max_span_km: float = DEFAULT_MAX_SPAN_KM) -> list[Span]:
    """Cut a link into equal spans no longer than the span cap."""
    if length_km <= 0:
        raise QotError(f"link length must be > 0, got {length_km}")
    n = max(1, math.ceil(length_km / max_span_km))
    return [Span(length_km=length_km / n, fiber=fiber)] * n


def path_spans(path: Path, fibers: dict[str, FiberParams],
               max_span_km: float = DEFAULT_MAX_SPAN_KM) -> list[Span]:
    spans: list[Span] = []
    for link in path.links:
        spans.extend(make_spans(link.length_km, fibers[link.fiber], max_span_km))
    return spans


def gsnr_path(
    spans: list[Span],
    plan: MtcChannelPlan,
    amp: AmpModel,
    margins: MarginModel | None = None,
    wss_stages: int = 0,
    channel_offset_thz: float = 0.0,
    tilt_db_per_thz: float = 0.5,
    threshold_db: float = 16.0,
) -> QotResult:
    """Generalized SNR of a multi-span lightpath.

    Per span: SNR_i = P / (P_ASE,i + P_NLI,i) with amplifier gain equal
    to span loss.  Accumulation is incoherent and order-independent
    (exact compensated sum), the back-to-back SNR joins the same inverse
    sum, then aging and the filter-cascade penalty subtract in dB.
    """
    margins = margins or MarginModel()
    p_w = dbm2w(plan.launch_power_dbm)
    bw_hz = plan.symbol_rate_gbaud * 1e9
    freq_hz = (plan.center_frequency_thz + channel_offset_thz) * 1e12

    inv_terms: list[float] = []
    total_loss_db = 0.0
    ase_total = 0.0
    nli_total = 0.0
    for span in spans:
        loss_db = span.fiber.alpha_db_km * span.length_km
        total_loss_db += loss_db
        p_ase = ase_power(loss_db, bw_hz, amp.noise_figure_db, freq_hz)
        p_nli = nli_power_span(span.fiber, span.length_km, plan, p_w,
                               channel_offset_thz, tilt_db_per_thz)
        ase_total += p_ase
        nli_total += p_nli
        inv_terms.append((p_ase + p_nli) / p_w)
    inv_terms.append(1.0 / db2lin(margins.b2b_snr_db))
    # fsum is exact, so accumulation order (span permutation) cannot matter
    inv_total = math.fsum(inv_terms)
    raw_snr_db = lin2db(1.0 / inv_total)

    wss_db = margins.wss.penalty_db(wss_stages)
    value = raw_snr_db - margins.aging_db - wss_db
    feasible = value >= threshold_db
    return QotResult(
        metric="gsnr",
        value_db=value,
        breakdown=QotBreakdown(
            total_loss_db=total_loss_db,
            gain_db=total_loss_db,
            ase_w=ase_total,
            nli_w=nli_total,
            raw_snr_db=raw_snr_db,
            wss_penalty_db=wss_db,
            aging_db=margins.aging_db,
        ),
        feasible=feasible,
        threshold_db=threshold_db,
        limiting=None if feasible else "snr",
    )


def reach_feasible(path_km: float, reach_km: float | None, qot: QotResult) -> ReachVerdict:
    """Distance gate and QoT verdict combined: feasible iff both hold."""
    if path_km < 0:
        raise QotError(f"path length must be >= 0, got {path_km}")
    if reach_km is not None and path_km > reach_km:
        return ReachVerdict(feasible=False, limiting="reach", path_km=path_km, reach_km=reach_km)
    if not qot.feasible:
        return ReachVerdict(feasible=False, limiting="snr", path_km=path_km, reach_km=reach_km)
    return ReachVerdict(feasible=True, limiting=None, path_km=path_km, reach_km=reach_km)
