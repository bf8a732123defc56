"""
Experiment configuration: one TOML file with the tables [system], [basis],
[sampling], [solver], [noise], [analysis] and [output].
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Tuple
import hashlib
import logging
import tomllib

from canoe_lab.exceptions import ConfigurationError
from canoe_lab.experiments.toys import get_toy
from canoe_lab.solvers.hybrid_solver import SolverConfig, SolverMode

_TABLES = ("system", "basis", "sampling", "solver", "noise", "analysis", "output")
_MISSING = object()


def _number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _integer(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


# *****************************************************************************
class _Table:
    # *****************************************************************************
    """
    Typed access to one TOML table with dotted error locations.
    """

    def __init__(self, name: str, data: Dict[str, Any], known: Tuple[str, ...]) -> None:
        self.name = name
        self.data = data
        for key in data:
            if key not in known:
                raise ConfigurationError(f"unknown key (expected one of {', '.join(known)})", f"{name}.{key}")

    def _fetch(self, key: str, default: Any) -> Any:
        if key in self.data:
            return self.data[key]
        if default is _MISSING:
            raise ConfigurationError("required key is missing", f"{self.name}.{key}")
        return default

    def scalar(self, key: str, check: Callable[[Any], bool], expected: str, default: Any = _MISSING) -> Any:
        value = self._fetch(key, default)
        if value is not None and value is not default and not check(value):
            raise ConfigurationError(f"expected {expected}, got {value!r}", f"{self.name}.{key}")
        return value

    def array(self, key: str, check: Callable[[Any], bool], expected: str, default: Any = _MISSING) -> Tuple[Any, ...]:
        value = self._fetch(key, default)
        if not isinstance(value, (list, tuple)):
            raise ConfigurationError(f"expected a list of {expected}", f"{self.name}.{key}")
        if len(value) == 0:
            raise ConfigurationError("list must not be empty", f"{self.name}.{key}")
        for i, item in enumerate(value):
            if not check(item):
                raise ConfigurationError(f"expected {expected}, got {item!r}", f"{self.name}.{key}[{i}]")
        return tuple(value)


# *****************************************************************************
@dataclass(frozen=True)
class ExperimentConfig:
    # *****************************************************************************
    """
    Validated experiment description. Paths are resolved against the config
    file's directory.
    """
    path: Optional[str]
    config_hash: str
    system_name: str
    hamiltonian_path: Optional[str]
    toy: Optional[str]
    n_electrons: Optional[int]
    reference: Optional[str]
    determinants_path: Optional[str]
    ranking_path: Optional[str]
    n_classical: Tuple[int, ...]
    n_quantum: Tuple[int, ...]
    tau: Optional[float]
    batch_size: int
    shots: Tuple[int, ...]
    seeds: Tuple[int, ...]
    method: str
    shadow_groups: int
    shadow_reference: Optional[str]
    modes: Tuple[str, ...]
    rank_tols: Tuple[float, ...]
    tol: float
    maxiter: int
    n_restarts: int
    alphas: Tuple[float, ...]
    reference_shots: int
    epsilon: float
    delta: float
    target_nq: int
    target_qubits: int
    target_batches: int
    trotter_steps: int
    failure_delta: float
    curves: Tuple[str, ...]
    output_directory: str

    def solver_config(self, mode: Optional[str] = None, rank_tol: Optional[float] = None) -> SolverConfig:
        return SolverConfig(
            mode=mode or self.modes[0],
            rank_tol=self.rank_tols[0] if rank_tol is None else rank_tol,
            tol=self.tol,
            maxiter=self.maxiter,
            n_restarts=self.n_restarts,
        )


def _resolve(base: Optional[Path], value: Optional[str]) -> Optional[str]:
    if value is None:
        return None
    path = Path(value)
    if base is not None and not path.is_absolute():
        path = base / path
    return str(path)


def _require_file(path: Optional[str], location: str) -> None:
    if path is not None and not Path(path).is_file():
        raise ConfigurationError(f"file not found: {path}", location)


def parse_config(data: Dict[str, Any], config_hash: str, path: Optional[str] = None) -> ExperimentConfig:
    """
    Validate a parsed TOML document.
    :param data: The TOML document as a dictionary.
    :param config_hash: SHA-256 of the raw file.
    :param path: Source path, used to resolve relative file names.
    :return: The experiment configuration.
    """
    for key, value in data.items():
        if key not in _TABLES:
            raise ConfigurationError(f"unknown table (expected one of {', '.join(_TABLES)})", key)
        if not isinstance(value, dict):
            raise ConfigurationError("expected a table", key)
    base = Path(path).resolve().parent if path else None

    system = _Table("system", data.get("system", {}), (
        "name", "hamiltonian", "toy", "n_electrons", "reference", "determinants", "ranking"))
    basis = _Table("basis", data.get("basis", {}), ("n_classical", "n_quantum", "tau"))
    sampling = _Table("sampling", data.get("sampling", {}), (
        "shots", "seeds", "batch_size", "method", "shadow_groups", "shadow_reference"))
    solver = _Table("solver", data.get("solver", {}), ("modes", "rank_tol", "tol", "maxiter", "n_restarts"))
    noise = _Table("noise", data.get("noise", {}), ("alphas", "reference_shots"))
    analysis = _Table("analysis", data.get("analysis", {}), (
        "epsilon", "delta", "target_nq", "target_qubits", "target_batches", "trotter_steps",
        "failure_delta", "curves"))
    output = _Table("output", data.get("output", {}), ("directory",))

    is_str = lambda v: isinstance(v, str)
    positive_int = lambda v: _integer(v) and v > 0
    nonneg_int = lambda v: _integer(v) and v >= 0
    positive = lambda v: _number(v) and v > 0
    nonneg = lambda v: _number(v) and v >= 0
    unit = lambda v: _number(v) and 0 < v < 1

    hamiltonian = system.scalar("hamiltonian", is_str, "a path", None)
    toy = system.scalar("toy", is_str, "a toy system name", None)
    if (hamiltonian is None) == (toy is None):
        raise ConfigurationError("exactly one of 'hamiltonian' and 'toy' must be given", "system")
    if toy is not None:
        get_toy(toy)
    hamiltonian = _resolve(base, hamiltonian)
    _require_file(hamiltonian, "system.hamiltonian")
    determinants = _resolve(base, system.scalar("determinants", is_str, "a path", None))
    _require_file(determinants, "system.determinants")
    ranking = _resolve(base, system.scalar("ranking", is_str, "a path", None))
    _require_file(ranking, "system.ranking")
    reference = system.scalar("reference", lambda v: is_str(v) and set(v) <= {"0", "1"}, "a 0/1 string", None)

    method = sampling.scalar("method", lambda v: v in ("histogram", "shadow"), "'histogram' or 'shadow'", "histogram")
    modes = solver.array("modes", lambda v: v in [m.value for m in SolverMode], "a solver mode", ["deflation"])

    curves = analysis.array("curves", is_str, "a path", [""]) if "curves" in analysis.data else ()
    curves = tuple(_resolve(base, c) for c in curves)
    for i, c in enumerate(curves):
        _require_file(c, f"analysis.curves[{i}]")

    default_name = Path(hamiltonian).stem if hamiltonian else toy
    return ExperimentConfig(
        path=path,
        config_hash=config_hash,
        system_name=system.scalar("name", is_str, "a string", default_name),
        hamiltonian_path=hamiltonian,
        toy=toy,
        n_electrons=system.scalar("n_electrons", nonneg_int, "a nonnegative integer", None),
        reference=reference,
        determinants_path=determinants,
        ranking_path=ranking,
        n_classical=basis.array("n_classical", nonneg_int, "a nonnegative integer", [1]),
        n_quantum=basis.array("n_quantum", nonneg_int, "a nonnegative integer", [0]),
        tau=basis.scalar("tau", positive, "a positive number", None),
        batch_size=sampling.scalar("batch_size", positive_int, "a positive integer", 5000),
        shots=sampling.array("shots", nonneg_int, "a nonnegative integer", [0]),
        seeds=sampling.array("seeds", nonneg_int, "a nonnegative integer", [0]),
        method=method,
        shadow_groups=sampling.scalar("shadow_groups", positive_int, "a positive integer", 1),
        shadow_reference=sampling.scalar("shadow_reference", lambda v: is_str(v) and set(v) <= {"0", "1"},
                                         "a 0/1 string", None),
        modes=modes,
        rank_tols=solver.array("rank_tol", nonneg, "a nonnegative number", [1e-10]),
        tol=solver.scalar("tol", positive, "a positive number", 1e-8),
        maxiter=solver.scalar("maxiter", positive_int, "a positive integer", 300),
        n_restarts=solver.scalar("n_restarts", positive_int, "a positive integer", 3),
        alphas=noise.array("alphas", nonneg, "a nonnegative number", [0.0]),
        reference_shots=noise.scalar("reference_shots", positive_int, "a positive integer", 100000),
        epsilon=analysis.scalar("epsilon", positive, "a positive number", 1.5936e-3),
        delta=analysis.scalar("delta", unit, "a number in (0, 1)", 0.05),
        target_nq=analysis.scalar("target_nq", positive_int, "a positive integer", 64),
        target_qubits=analysis.scalar("target_qubits", positive_int, "a positive integer", 100),
        target_batches=analysis.scalar("target_batches", positive_int, "a positive integer", 1),
        trotter_steps=analysis.scalar("trotter_steps", positive_int, "a positive integer", 10),
        failure_delta=analysis.scalar("failure_delta", unit, "a number in (0, 1)", 1e-3),
        curves=curves,
        output_directory=_resolve(base, output.scalar("directory", is_str, "a path", "canoe_out")),
    )


def config_hash(raw: bytes) -> str:
    return hashlib.sha256(raw).hexdigest()


def load_config(path: str) -> ExperimentConfig:
    """
    Read and validate an experiment TOML file.
    :param path: Path to the file.
    :return: The experiment configuration.
    """
    logging.info(f"Loading experiment configuration: {path}")
    try:
        raw = Path(path).read_bytes()
    except OSError as err:
        raise ConfigurationError(f"cannot read configuration: {err}")
    try:
        data = tomllib.loads(raw.decode("utf-8"))
    except (tomllib.TOMLDecodeError, UnicodeDecodeError) as err:
        raise ConfigurationError(f"invalid TOML: {err}")
    return parse_config(data, config_hash(raw), path)


def parse_config_text(text: str, base_path: Optional[str] = None) -> ExperimentConfig:
    """
    Validate configuration text; relative paths resolve against ``base_path``'s directory.
    """
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as err:
        raise ConfigurationError(f"invalid TOML: {err}")
    return parse_config(data, config_hash(text.encode("utf-8")), base_path)
