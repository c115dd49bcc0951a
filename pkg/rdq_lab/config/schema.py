"""Pydantic configuration models for RDQ Lab.

Defines the validated config structure using the versioned v1 format::

    version: "1"
    qsr: { directions: 8, distance_bands: 2, field_radius: 2 }
    env: { max_steps: 200 }
    rules: { min_support: 10, ... }
    agent: { gamma: 0.99, ... }
    train: { episodes: 500 }
    experiment: { domain: frozenlake, ... }

Settings whose sensible value depends on the domain (novelty and
recovery thresholds) default to ``None`` and are resolved through
:func:`resolve_domain_default`.
"""

from __future__ import annotations

from typing import Any, List, Literal, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from rdq_lab.constants import DEFAULT_MAX_STEPS, DEFAULT_OUT_DIR, DOMAIN_DEFAULTS, DOMAINS

AgentKindName = Literal["dqn", "rdq"]


def resolve_domain_default(domain: str, key: str, value: Optional[float]) -> float:
    """Return *value* if set, otherwise the per-domain default for *key*."""
    if value is not None:
        return value
    if domain not in DOMAIN_DEFAULTS:
        raise ValueError(f"Unknown domain '{domain}'. Expected one of {list(DOMAINS)}.")
    return float(DOMAIN_DEFAULTS[domain][key])


# ── Section models ───────────────────────────────────────────────────────


class QsrConfig(BaseModel):
    """Granularity of the qualitative spatial representation."""

    directions: int = Field(default=8, ge=4, description="Number of direction cones (D).")
    distance_bands: int = Field(default=2, ge=1, description="Number of distance rings (K).")
    field_radius: int = Field(
        default=2,
        ge=1,
        description="Half-width in cells of the square observation field.",
    )

    @model_validator(mode="after")
    def _bands_fit_radius(self) -> "QsrConfig":
        if self.distance_bands > self.field_radius:
            raise ValueError(
                f"distance_bands ({self.distance_bands}) cannot exceed "
                f"field_radius ({self.field_radius})"
            )
        return self


class EnvSettings(BaseModel):
    """Environment settings shared by both domains."""

    max_steps: int = Field(
        default=DEFAULT_MAX_STEPS,
        ge=1,
        description="Episode truncation length (terminal, not a failure).",
    )
    render: bool = Field(default=False, description="Print ASCII frames to standard output.")


class RuleConfig(BaseModel):
    """Failure memory, rule induction and rule-update cadence."""

    min_support: int = Field(
        default=10,
        ge=1,
        description="Failure pairs seen fewer times than this are treated as outliers.",
    )
    max_body_len: int = Field(
        default=2,
        ge=1,
        le=4,
        description="Maximum number of relation literals in a rule body.",
    )
    fp_tolerance: float = Field(
        default=0.0,
        ge=0.0,
        le=1.0,
        description="Allowed false-positive rate on the consistency sample.",
    )
    support: Literal["body", "state"] = Field(
        default="body",
        description=(
            "Where min_support is counted: over all failures a rule covers ('body') "
            "or per exact (state, action) pair before induction ('state')."
        ),
    )
    consistency_capacity: int = Field(
        default=10_000,
        ge=1,
        description="Number of recent non-failure (state, action) pairs kept for induction.",
    )
    rule_update_interval: int = Field(
        default=2_000,
        ge=1,
        description="Environment steps between induction runs while learning rules.",
    )
    stable_episodes: int = Field(
        default=5,
        ge=1,
        description="Consecutive episodes above threshold before induction pauses.",
    )


class AgentConfig(BaseModel):
    """Hyper-parameters shared by the DQN baseline and the RDQ agent."""

    gamma: float = Field(default=0.99, ge=0.0, lt=1.0, description="Discount factor.")
    epsilon_start: float = Field(default=1.0, ge=0.0, le=1.0)
    epsilon_end: float = Field(default=0.05, ge=0.0, le=1.0)
    epsilon_decay_steps: int = Field(
        default=10_000, ge=1, description="Steps for the linear ε decay."
    )
    epsilon_restart: float = Field(
        default=0.3,
        ge=0.0,
        le=1.0,
        description="ε value the schedule restarts from when novelty is detected.",
    )
    target_sync_period: int = Field(
        default=1_000, ge=1, description="Copy online weights into the target every C steps."
    )
    kl_weight: float = Field(default=1.0, ge=0.0, description="Lagrangian multiplier λ.")
    batch_size: int = Field(default=64, ge=1)
    buffer_capacity: int = Field(default=50_000, ge=1)
    learning_starts: int = Field(
        default=500, ge=1, description="Replay size before optimization begins."
    )
    train_frequency: int = Field(default=1, ge=1, description="Environment steps per update.")
    learning_rate: float = Field(default=1e-3, gt=0.0)
    adam_beta1: float = Field(default=0.9, ge=0.0, lt=1.0)
    adam_beta2: float = Field(default=0.999, ge=0.0, lt=1.0)
    adam_eps: float = Field(default=1e-8, gt=0.0)
    hidden_sizes: List[int] = Field(default_factory=lambda: [64, 64])
    activation: Literal["relu", "tanh"] = "relu"
    temperature: float = Field(default=1.0, gt=0.0, description="Softmax temperature τ.")
    kl_floor: float = Field(default=1e-6, gt=0.0, lt=1.0, description="Teacher floor ε_f.")
    q_loss: Literal["smooth_l1", "squared"] = "smooth_l1"
    teacher_normalization: Literal["safe", "renormalize"] = Field(
        default="safe",
        description=(
            "'safe' divides the unsafe mass by |A_safe|; 'renormalize' divides by |A_bad| "
            "and renormalizes afterwards."
        ),
    )
    kl_only_when_rules_nonempty: bool = False
    shield_enabled: bool = Field(
        default=True, description="Filter actions through the rules (rdq only)."
    )
    novelty_threshold: Optional[float] = Field(
        default=None,
        description="Episode reward below which novelty is declared (None: domain default).",
    )

    @field_validator("hidden_sizes")
    @classmethod
    def _validate_hidden(cls, v: List[int]) -> List[int]:
        if any(size < 1 for size in v):
            raise ValueError("hidden layer sizes must be positive")
        return v

    @model_validator(mode="after")
    def _epsilon_order(self) -> "AgentConfig":
        if self.epsilon_end > self.epsilon_start:
            raise ValueError("epsilon_end must not exceed epsilon_start")
        return self


class TrainConfig(BaseModel):
    """Single-run budget and artifact cadence."""

    episodes: int = Field(default=500, ge=1)
    checkpoint_every: int = Field(
        default=0, ge=0, description="Episodes between checkpoints (0 disables)."
    )
    export_rules_every: int = Field(
        default=0, ge=0, description="Episodes between rule-file exports (0 disables)."
    )


class ExperimentSpec(BaseModel):
    """A novelty sweep: baseline training followed by per-level adaptation runs."""

    domain: str = Field(default="frozenlake", description="'frozenlake' or 'crossroad'.")
    agents: List[AgentKindName] = Field(default_factory=lambda: ["dqn", "rdq"])
    novelties: List[str] = Field(default_factory=lambda: ["shuffled_holes"])
    levels_per_novelty: int = Field(default=20, ge=1)
    seeds: int = Field(default=5, ge=1, description="Seeds per level.")
    pre_episodes: int = Field(default=2_000, ge=1, description="Baseline training budget.")
    post_episodes: int = Field(default=300, ge=1, description="Post-novelty budget.")
    pre_window: int = Field(
        default=50, ge=1, description="Baseline episodes reported with negative indices."
    )
    post_window: int = Field(
        default=50, ge=1, description="Post-novelty episodes averaged for the drop metric."
    )
    recovery_threshold: Optional[float] = Field(
        default=None, description="Episode reward counting as recovered (None: domain default)."
    )
    root_seed: int = Field(default=0, ge=0)
    parallel: int = Field(default=1, ge=1, description="Worker processes for sweep cells.")
    output_dir: str = DEFAULT_OUT_DIR

    @field_validator("domain")
    @classmethod
    def _validate_domain(cls, v: str) -> str:
        if v not in DOMAINS:
            raise ValueError(f"unknown domain '{v}', expected one of {list(DOMAINS)}")
        return v

    @field_validator("agents")
    @classmethod
    def _validate_agents(cls, v: List[str]) -> List[str]:
        if not v:
            raise ValueError("at least one agent kind is required")
        if len(set(v)) != len(v):
            raise ValueError("agent kinds must be unique")
        return v

    @model_validator(mode="after")
    def _validate_novelties(self) -> "ExperimentSpec":
        from rdq_lab.envs.novelty import novelty_kinds

        known = novelty_kinds(self.domain)
        unknown = [k for k in self.novelties if k not in known]
        if unknown:
            raise ValueError(
                f"unknown novelty kind(s) {unknown} for {self.domain}; expected {list(known)}"
            )
        if not self.novelties:
            raise ValueError("at least one novelty kind is required")
        return self


# ── Top-level config ────────────────────────────────────────────────────


class LabConfig(BaseModel):
    """Top-level validated configuration for RDQ Lab.

    Supports version ``"1"`` format. Every section is optional; omitted
    sections take their defaults.
    """

    version: str = "1"
    qsr: QsrConfig = Field(default_factory=QsrConfig)
    env: EnvSettings = Field(default_factory=EnvSettings)
    rules: RuleConfig = Field(default_factory=RuleConfig)
    agent: AgentConfig = Field(default_factory=AgentConfig)
    train: TrainConfig = Field(default_factory=TrainConfig)
    experiment: ExperimentSpec = Field(default_factory=ExperimentSpec)

    @field_validator("version")
    @classmethod
    def _validate_version(cls, v: Any) -> str:
        if str(v) != "1":
            raise ValueError(f"unsupported config version '{v}' (expected '1')")
        return str(v)
