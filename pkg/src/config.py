import os
from dataclasses import dataclass, field, asdict
from typing import Any, Dict, List, Optional


DEFAULT_BACKEND = "auto"
BACKENDS = ("auto", "exact-levelset", "exact-jet", "numeric")
DEFAULT_TOL = 1e-8
DEFAULT_MAX_DEGREE = 6
DEFAULT_SEED = 42
DEFAULT_UNIFORMITY_SAMPLES = 8

# Truncated jet solver
JET_START_OFFSET = 3
JET_STEP = 2
JET_ORDER_CAP = 24
JET_VERIFY_POINTS = 16
JET_VERIFY_SCALE = 2.5
JET_VERIFY_TOL = 1e-6

# Numeric backend: sampled rows >= OVERDETERMINATION * unknowns
OVERDETERMINATION = 4
SAMPLE_SCALE = 0.6

TRIPLE_TOL = 1e-6
EIGEN_MATCH_TOL = 1e-9
EV_TANGENCY_POINTS = 32
EV_TANGENCY_TOL = 1e-9

REPORT_SCHEMA_VERSION = "1.0"

DATA_DIR = os.path.abspath(os.path.join(os.path.dirname(__file__), os.pardir, "data"))
REPORTS_DIR = os.path.abspath(os.path.join(os.path.dirname(__file__), os.pardir, "reports"))


@dataclass
class Paths:
    data_dir: str = DATA_DIR
    reports_dir: str = REPORTS_DIR
    lightcone_json: str = os.path.join(DATA_DIR, "lightcone.json")
    ey1_json: str = os.path.join(DATA_DIR, "ey1.json")
    ex_m2_json: str = os.path.join(DATA_DIR, "ex_m2.json")


@dataclass
class RunConfig:
    command: str
    inputs: List[str] = field(default_factory=list)
    backend: str = DEFAULT_BACKEND
    tol: float = DEFAULT_TOL
    max_degree: int = DEFAULT_MAX_DEGREE
    max_k: Optional[int] = None  # None means the ambient dimension n
    seed: int = DEFAULT_SEED
    output_format: str = "text"
    n_jobs: int = 1
    params: Dict[str, Any] = field(default_factory=dict)

    def as_dict(self) -> Dict[str, Any]:
        return asdict(self)
