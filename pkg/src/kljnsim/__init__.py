"""KLJN key-exchange link simulator and key-distribution network planner."""

from .adversary import (
    Attack,
    AttackOutcome,
    CurrentInject,
    DetectionConfig,
    EveVerdict,
    MitmSplit,
    PassiveListen,
    apply_attack,
    detect_intrusion,
    eve_passive_guess,
    run_attacked_bep,
)
from .link import (
    BepRecord,
    BepState,
    KeyExchangeResult,
    LinkConfig,
    bep_duration,
    decide_state,
    exchange_key,
    expected_levels,
    key_time,
    noise_bandwidth,
    run_bep,
    wire_waveforms,
)
from .netfile import parse_network_spec, parse_network_text, serialize_network_spec
from .netspec import Link, LinkKind, NetSpecError, NetworkSpec, Station
from .noise import (
    NoiseScale,
    SampleStream,
    generate_noise,
    johnson_variance,
    make_rng,
    mean_cross,
    mean_square,
)
from .planner import (
    DistributionPlan,
    PlanError,
    Round,
    full_mesh_hardware,
    plan_full_mesh,
    plan_line,
    plan_star,
    plan_time_summary,
)
from .security import (
    SecurityClass,
    SecurityReport,
    classify_pairs,
    trust_score,
    unconditional_edges,
    unconditional_path,
)

__version__ = "0.1.0"
