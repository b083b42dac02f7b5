"""
Pydantic models for scenarios and reports.
"""

from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from linksim.engine import PS_PER_SECOND, PS_PER_US

MIN_FRAME_BYTES = 64
MAX_FRAME_BYTES = 1518

FORMAT_VERSION = 1
CSV_FORMAT_VERSION = 1


class LinkParams(BaseModel):
    """Hybrid TDM/WDM link: W fixed receivers, M tunable transmitters."""

    model_config = ConfigDict(frozen=True)

    channels: int = Field(default=16, ge=1)
    transmitters: int = Field(default=2, ge=1)
    line_rate_bps: int = Field(default=10**9, ge=1)
    ifg_bytes: int = Field(default=12, ge=0)
    tuning_time_ps: int = Field(default=0, ge=0)

    @property
    def capacity_bps(self) -> int:
        """Upper bound on simultaneous line rate: only min(M, W) pairs can be busy."""
        return min(self.channels, self.transmitters) * self.line_rate_bps


class UniformSize(BaseModel):
    """Frame sizes uniform on [min_bytes, max_bytes], inclusive."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["uniform"] = "uniform"
    min_bytes: int = Field(default=MIN_FRAME_BYTES, ge=MIN_FRAME_BYTES, le=MAX_FRAME_BYTES)
    max_bytes: int = Field(default=MAX_FRAME_BYTES, ge=MIN_FRAME_BYTES, le=MAX_FRAME_BYTES)

    @model_validator(mode="after")
    def check_bounds(self) -> "UniformSize":
        if self.min_bytes > self.max_bytes:
            raise ValueError(f"min_bytes {self.min_bytes} exceeds max_bytes {self.max_bytes}")
        return self

    @property
    def mean_bytes(self) -> float:
        return (self.min_bytes + self.max_bytes) / 2


class FixedSize(BaseModel):
    """Every frame has the same size."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["fixed"] = "fixed"
    size_bytes: int = Field(ge=MIN_FRAME_BYTES, le=MAX_FRAME_BYTES)

    @property
    def mean_bytes(self) -> float:
        return float(self.size_bytes)


SizeDistribution = Annotated[Union[UniformSize, FixedSize], Field(discriminator="kind")]


class FlowSpec(BaseModel):
    """One renewal-process flow. The flow id is also its destination channel."""

    model_config = ConfigDict(frozen=True)

    flow_id: int = Field(ge=0)
    mean_interframe_ps: int = Field(gt=0)
    size: SizeDistribution

    @property
    def mean_interframe_us(self) -> float:
        return self.mean_interframe_ps / PS_PER_US

    @property
    def mean_frame_bytes(self) -> float:
        return self.size.mean_bytes

    @property
    def max_frame_bytes(self) -> int:
        if isinstance(self.size, FixedSize):
            return self.size.size_bytes
        return self.size.max_bytes

    def offered_bps(self, ifg_bytes: int = 0) -> float:
        """Mean offered rate in bits/s, counting `ifg_bytes` per frame."""
        return (self.mean_frame_bytes + ifg_bytes) * 8 * PS_PER_SECOND / self.mean_interframe_ps


class SchedulerParams(BaseModel):
    """Scheduler choice and MCDRR knobs."""

    model_config = ConfigDict(frozen=True)

    name: Literal["mcdrr", "rr-baseline"] = "mcdrr"
    quantum: Union[int, list[int]] = MAX_FRAME_BYTES
    max_packets_per_visit: Optional[int] = Field(default=None, ge=1)
    accrue_quantum_when_busy: bool = True
    voq_capacity: int = Field(default=1000, ge=1)

    @field_validator("quantum")
    @classmethod
    def check_quantum(cls, v: Union[int, list[int]]) -> Union[int, list[int]]:
        values = v if isinstance(v, list) else [v]
        if not values or any(q < 1 for q in values):
            raise ValueError("quantum must be a positive integer or a list of them")
        return v

    def quanta(self, channels: int) -> list[int]:
        """Per-queue quanta for `channels` VOQs."""
        if isinstance(self.quantum, list):
            return list(self.quantum)
        return [self.quantum] * channels


class ScenarioConfig(BaseModel):
    """A complete experiment description."""

    model_config = ConfigDict(frozen=True)

    name: str = "custom"
    link: LinkParams = Field(default_factory=LinkParams)
    flows: list[FlowSpec]
    scheduler: SchedulerParams = Field(default_factory=SchedulerParams)
    duration_ps: int = Field(ge=0)
    warmup_ps: int = Field(default=0, ge=0)
    seed: int = Field(default=1, ge=0)
    check_invariants: bool = False
    output_dir: str = "results"
    output_prefix: Optional[str] = None

    @model_validator(mode="after")
    def check_consistency(self) -> "ScenarioConfig":
        channels = self.link.channels
        if len(self.flows) != channels:
            raise ValueError(f"{len(self.flows)} flows configured for {channels} channels")
        ids = sorted(flow.flow_id for flow in self.flows)
        if ids != list(range(channels)):
            raise ValueError(f"flow ids must be exactly 0..{channels - 1}, got {ids}")
        if isinstance(self.scheduler.quantum, list) and len(self.scheduler.quantum) != channels:
            raise ValueError(
                f"{len(self.scheduler.quantum)} quanta configured for {channels} channels"
            )
        if self.warmup_ps > self.duration_ps:
            raise ValueError("warmup is longer than the run")
        return self

    @property
    def duration_s(self) -> float:
        return self.duration_ps / PS_PER_SECOND

    @property
    def warmup_s(self) -> float:
        return self.warmup_ps / PS_PER_SECOND

    @property
    def prefix(self) -> str:
        return self.output_prefix or f"{self.name}-{self.scheduler.name}"

    def flows_by_id(self) -> list[FlowSpec]:
        return sorted(self.flows, key=lambda flow: flow.flow_id)

    def undersized_quanta(self) -> list[tuple[int, int, int]]:
        """
        (flow id, quantum, largest frame) for each MCDRR queue whose quantum
        cannot cover that flow's largest frame in a single visit.
        """
        if self.scheduler.name != "mcdrr":
            return []
        quanta = self.scheduler.quanta(self.link.channels)
        return [
            (flow.flow_id, quanta[flow.flow_id], flow.max_frame_bytes)
            for flow in self.flows_by_id()
            if quanta[flow.flow_id] < flow.max_frame_bytes
        ]

    def with_changes(self, **changes) -> "ScenarioConfig":
        """Validated copy with top-level fields replaced."""
        data = self.model_dump()
        for key, value in changes.items():
            data[key] = value.model_dump() if isinstance(value, BaseModel) else value
        return ScenarioConfig.model_validate(data)


class FlowReport(BaseModel):
    """Per-flow results at the end of a run."""

    flow_id: int
    frames_generated: int
    frames_delivered: int
    frames_dropped: int
    frames_queued: int
    frames_in_flight: int
    bytes_delivered: int
    bytes_measured: int
    throughput_bps: float
    mean_delay_ns: float
    max_delay_ns: float


class ScanReport(BaseModel):
    """Measured cost of dequeue scans."""

    scans: int = 0
    failed_scans: int = 0
    queues_visited: int = 0
    max_visited: int = 0

    @property
    def mean_visited(self) -> float:
        return self.queues_visited / self.scans if self.scans else 0.0


class Report(BaseModel):
    """Everything a run produces, serializable as the structured summary."""

    format_version: int = FORMAT_VERSION
    csv_format_version: int = CSV_FORMAT_VERSION
    scenario: str
    seed: int
    duration_s: float
    warmup_s: float
    link: LinkParams
    scheduler: SchedulerParams
    flow_specs: list[FlowSpec]
    check_invariants: bool = False
    flows: list[FlowReport]
    aggregate_throughput_bps: float
    jain_index: Optional[float] = Field(default=None, gt=0.0, le=1.0)
    max_min_ratio: Optional[float] = None
    offered_load_bps: float
    offered_load_no_ifg_bps: float
    channel_utilization: list[float]
    scan: ScanReport
    events_dispatched: int


class SweepEntry(BaseModel):
    seed: int
    aggregate_throughput_bps: float
    jain_index: Optional[float]
    max_min_ratio: Optional[float]
    csv_file: str


class SweepSummary(BaseModel):
    """Combined summary of one scenario run under several seeds."""

    format_version: int = FORMAT_VERSION
    csv_format_version: int = CSV_FORMAT_VERSION
    scenario: str
    duration_s: float
    link: LinkParams
    scheduler: SchedulerParams
    runs: list[SweepEntry]
    mean_jain_index: Optional[float] = None
    min_jain_index: Optional[float] = None
