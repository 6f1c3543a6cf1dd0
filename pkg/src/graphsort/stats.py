from dataclasses import asdict, dataclass, field

CSV_HEADER = ("sorter", "n", "trial", "seed", "comparisons", "swaps", "rounds",
              "sim_time", "sorted", "wall_ns")

SORTED = "sorted"
BUDGET_EXHAUSTED = "budget-exhausted"


@dataclass
class RunStats:
    """Measurements from one run of any engine.

    ``comparisons`` counts comparator operations (faulty ones included);
    ``rounds`` is 0 for the single-pair engine. ``extra`` carries
    engine-specific counters (per-worker loads, proposal counts) that are not
    part of the CSV schema.
    """

    n: int
    comparisons: int
    swaps: int
    sorted: bool
    rounds: int = 0
    sim_time: float = 0.0
    trial: int = 0
    seed: int = 0
    sorter: str = ""
    wall_ns: int = 0
    extra: dict = field(default_factory=dict)
    trace: list = field(default=None, repr=False)

    @property
    def status(self):
        return SORTED if self.sorted else BUDGET_EXHAUSTED

    def row(self):
        return (self.sorter, self.n, self.trial, self.seed, self.comparisons,
                self.swaps, self.rounds, repr(float(self.sim_time)),
                int(bool(self.sorted)), self.wall_ns)

    def to_dict(self):
        d = asdict(self)
        d.pop("trace")
        d["status"] = self.status
        return d
