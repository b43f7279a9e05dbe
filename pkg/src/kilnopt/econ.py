"""SNCR ammonia stoichiometry and the money attached to NOx abatement.

The chain runs: NOx concentration [PPM] -> mass intensity [mg/kg
clinker] -> minute-level mass flow [mg/min] -> integrated annual tonnage
-> ammonia demand via the normalized stoichiometric ratio -> USD.

Concentration converts to mass through the NO2-equivalent gas density
(molar mass over molar volume) and a configured specific flue-gas volume
per kilogram of clinker. Both constants live in the config: plant-scale
regressions can bypass the conversion entirely by injecting annual
aggregates into the arithmetic tail (`summary_from_aggregates`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import TimeSeriesDataset

MINUTES_PER_YEAR = 525_600


class EconError(ValueError):
    """Invalid techno-economic request."""


@dataclass(frozen=True)
class EconConfig:
    nsr: float = 1.2
    m_nh3_g_per_mol: float = 17.03
    m_no2_g_per_mol: float = 46.01
    nh3_price_usd_per_t: float = 450.0
    eta_normal: float = 0.34
    eta_stress: float = 0.64
    stress_threshold_ppm: float = 500.0
    molar_volume_l_per_mol: float = 22.414
    # specific flue-gas volume: an engineering assumption, not a measured
    # plant value; the regression path never touches it
    flue_gas_nm3_per_kg_clinker: float = 1.7

    def __post_init__(self):
        if self.nsr < 0:
            raise EconError("NSR must be non-negative")
        if not (0.0 <= self.eta_normal < 1.0 and 0.0 <= self.eta_stress < 1.0):
            raise EconError("reduction factors must lie in [0, 1)")
        if self.stress_threshold_ppm <= 0:
            raise EconError("stress threshold must be positive")
        if self.m_nh3_g_per_mol <= 0 or self.m_no2_g_per_mol <= 0:
            raise EconError("molar masses must be positive")
        if self.molar_volume_l_per_mol <= 0:
            raise EconError("molar volume must be positive")
        if self.flue_gas_nm3_per_kg_clinker <= 0:
            raise EconError("specific flue-gas volume must be positive")


def alpha_nh3(config: EconConfig) -> float:
    """Ammonia mass required per unit NOx removed: NSR times the molar
    mass ratio. 1.2 * 17.03 / 46.01 = 0.444."""
    return config.nsr * config.m_nh3_g_per_mol / config.m_no2_g_per_mol


def ppm_to_mg_per_nm3(config: EconConfig) -> float:
    """One PPM of NO2-equivalent in mg per normal cubic meter:
    46.01 g/mol over 22.414 L/mol = 2.0528."""
    return config.m_no2_g_per_mol / config.molar_volume_l_per_mol


def nox_mass_flow(concentration_ppm, clinker_flow_t_per_h, config: EconConfig) -> np.ndarray:
    """Minute-level NOx mass flow [mg/min]: concentration -> intensity
    [mg/kg clinker] -> times clinker flow [kg/min]."""
    c = np.asarray(concentration_ppm, dtype=float)
    flow = np.asarray(clinker_flow_t_per_h, dtype=float)
    if c.shape != flow.shape:
        raise EconError("concentration and clinker flow series must align")
    if np.any(flow <= 0):
        raise EconError("clinker flow must be positive")
    intensity_mg_per_kg = c * ppm_to_mg_per_nm3(config) * config.flue_gas_nm3_per_kg_clinker
    flow_kg_per_min = flow * (1000.0 / 60.0)
    return intensity_mg_per_kg * flow_kg_per_min


def apply_controller_reduction(concentration_ppm, config: EconConfig) -> np.ndarray:
    """Concentration after the controller: scaled by (1 - eta), with the
    low eta at or below the threshold and the high eta above it."""
    c = np.asarray(concentration_ppm, dtype=float)
    factor = np.where(
        c <= config.stress_threshold_ppm,
        1.0 - config.eta_normal,
        1.0 - config.eta_stress,
    )
    return c * factor


@dataclass(frozen=True)
class EconSummary:
    m_clk_t_per_yr: float
    m_nox_base_t_per_yr: float
    m_nox_ctrl_t_per_yr: float
    e_nox_base_kg_per_t: float
    e_nox_ctrl_kg_per_t: float
    delta_e_nox_kg_per_t: float
    delta_m_nox_t_per_yr: float
    alpha_nh3: float
    delta_e_nh3_kg_per_t: float
    delta_m_nh3_t_per_yr: float
    savings_usd_per_t: float
    savings_usd_per_yr: float
    minutes_integrated: int = 0

    def __str__(self) -> str:
        return "\n".join(
            [
                f"clinker production:      {self.m_clk_t_per_yr:14.1f} t/yr",
                f"NOx mass, baseline:      {self.m_nox_base_t_per_yr:14.2f} t/yr",
                f"NOx mass, controlled:    {self.m_nox_ctrl_t_per_yr:14.2f} t/yr",
                f"NOx intensity, baseline: {self.e_nox_base_kg_per_t:14.4f} kg/t",
                f"NOx intensity, ctrl:     {self.e_nox_ctrl_kg_per_t:14.4f} kg/t",
                f"intensity reduction:     {self.delta_e_nox_kg_per_t:14.4f} kg/t",
                f"mass reduction:          {self.delta_m_nox_t_per_yr:14.2f} t/yr",
                f"NH3 per NOx (alpha):     {self.alpha_nh3:14.4f} kg/kg",
                f"NH3 demand avoided:      {self.delta_m_nh3_t_per_yr:14.2f} t/yr",
                f"NH3 intensity avoided:   {self.delta_e_nh3_kg_per_t:14.5f} kg/t",
                f"savings:                 {self.savings_usd_per_t:14.5f} USD/t",
                f"savings:                 {self.savings_usd_per_yr:14.0f} USD/yr",
            ]
        )


def _summary_from_totals(
    total_base_mg: float,
    total_ctrl_mg: float,
    total_clk_kg: float,
    n_minutes: int,
    config: EconConfig,
) -> EconSummary:
    scale = MINUTES_PER_YEAR / n_minutes
    m_base = total_base_mg * 1e-9 * scale
    m_ctrl = total_ctrl_mg * 1e-9 * scale
    m_clk = total_clk_kg * 1e-3 * scale
    return summary_from_aggregates(m_base, m_ctrl, m_clk, config, minutes=n_minutes)


def summary_from_aggregates(
    m_nox_base_t_per_yr: float,
    m_nox_ctrl_t_per_yr: float,
    m_clk_t_per_yr: float,
    config: EconConfig,
    minutes: int = 0,
) -> EconSummary:
    """Arithmetic tail of the chain, starting from annual aggregates.
    This is the entry point for plant-scale figures whose raw telemetry
    is not available."""
    if m_clk_t_per_yr <= 0:
        raise EconError("clinker production must be positive")
    alpha = alpha_nh3(config)
    e_base = m_nox_base_t_per_yr / m_clk_t_per_yr * 1000.0
    e_ctrl = m_nox_ctrl_t_per_yr / m_clk_t_per_yr * 1000.0
    delta_e = e_base - e_ctrl
    delta_m = m_nox_base_t_per_yr - m_nox_ctrl_t_per_yr
    delta_m_nh3 = alpha * delta_m
    delta_e_nh3 = alpha * delta_e
    return EconSummary(
        m_clk_t_per_yr=m_clk_t_per_yr,
        m_nox_base_t_per_yr=m_nox_base_t_per_yr,
        m_nox_ctrl_t_per_yr=m_nox_ctrl_t_per_yr,
        e_nox_base_kg_per_t=e_base,
        e_nox_ctrl_kg_per_t=e_ctrl,
        delta_e_nox_kg_per_t=delta_e,
        delta_m_nox_t_per_yr=delta_m,
        alpha_nh3=alpha,
        delta_e_nh3_kg_per_t=delta_e_nh3,
        delta_m_nh3_t_per_yr=delta_m_nh3,
        savings_usd_per_t=delta_e_nh3 * config.nh3_price_usd_per_t / 1000.0,
        savings_usd_per_yr=delta_m_nh3 * config.nh3_price_usd_per_t,
        minutes_integrated=minutes,
    )


def annual_summary(dataset: TimeSeriesDataset, config: EconConfig = None) -> EconSummary:
    """Integrate baseline and controller-adjusted NOx mass over the
    dataset's operating minutes, annualize, and price the ammonia.

    Each dataset row is one operating minute; annualization scales by
    observed minutes, so telemetry gaps count as downtime rather than
    being extrapolated over."""
    config = config if config is not None else EconConfig()
    for ch in ("NOX", "CLINKER_FLOW"):
        if ch not in dataset.emissions:
            raise EconError(f"dataset lacks the {ch} channel")
    ok = dataset.emission_valid["NOX"] & dataset.emission_valid["CLINKER_FLOW"]
    if not ok.any():
        raise EconError("no rows with valid NOx and clinker flow")
    c = dataset.emissions["NOX"][ok]
    flow = dataset.emissions["CLINKER_FLOW"][ok]

    base = nox_mass_flow(c, flow, config)
    ctrl = nox_mass_flow(apply_controller_reduction(c, config), flow, config)
    total_base = math.fsum(base)
    total_ctrl = math.fsum(ctrl)
    total_clk_kg = math.fsum(flow * (1000.0 / 60.0))
    return _summary_from_totals(total_base, total_ctrl, total_clk_kg, int(ok.sum()), config)
