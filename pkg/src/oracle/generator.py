"""Generator construction, global-balance solve and balance audits."""

from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
import structlog

from src.analysis.mixed import MixedAnalyzer, coefficients_c
from src.common.config import NumericsConfig, OracleConfig
from src.common.exceptions import OracleScopeError, OracleSolverError
from src.common.types import ActivityCycle, ActivityState
from src.model.scenario import PersistentUser, Scenario
from src.numeric.dft import convolution_expand, factors_for
from .enumeration import enumerate_all_c
from .states import StateSpace, enumerate_states, estimate_state_count

logger = structlog.get_logger(__name__)

BALANCE_TOLERANCE = 1e-10
COEFFICIENT_TOLERANCE = 1e-9
DENSE_MEMORY_LIMIT_MB = 4096

# rate matrix, solve system and the LAPACK work copy
DENSE_COPIES = 3
# elements per audit block
AUDIT_BLOCK_ELEMENTS = 1 << 22

I, W, T = ActivityState.IDLE, ActivityState.WAITING, ActivityState.TRANSMITTING


@dataclass(frozen=True)
class GeneratorMatrix:
    """Dense transition-rate matrix over enumerated states.

    Attributes:
        rates: q[w, z] for w != z; the diagonal is stored as zero
        states: The enumerated state space
    """

    rates: np.ndarray = field(repr=False)
    states: StateSpace = field(repr=False)

    def __post_init__(self):
        """Validate shape and sign conventions."""
        size = len(self.states)
        if self.rates.shape != (size, size):
            raise ValueError(f"rate matrix must be {size}x{size}, got {self.rates.shape}")
        if np.any(self.rates < 0):
            raise ValueError("transition rates must be non-negative")
        if np.any(np.diag(self.rates) != 0):
            raise ValueError("diagonal rates must be zero")

    @property
    def holding_rates(self) -> np.ndarray:
        """Total rate out of every state."""
        return self.rates.sum(axis=1)


@dataclass(frozen=True)
class BalanceViolation:
    """A state pair whose probability flows differ."""

    source: int
    target: int
    forward: float
    backward: float
    residual: float


def dense_memory_mb(states: int) -> float:
    """Peak memory of the dense solve over ``states`` states, in MiB."""
    return DENSE_COPIES * states * states * 8 / 2**20


def check_dense_memory(states: int, limit_mb: int = DENSE_MEMORY_LIMIT_MB) -> None:
    """Refuse state spaces whose dense matrices would not fit the budget.

    Raises:
        OracleScopeError: If the estimated peak exceeds ``limit_mb``
    """
    needed = dense_memory_mb(states)
    if needed > limit_mb:
        logger.warning("oracle_refused", states=states, memory_mb=round(needed), limit_mb=limit_mb)
        raise OracleScopeError(f"dense generator memory in MiB for {states} states", int(needed), limit_mb)


def build_generator(
    scenario: Scenario,
    states: StateSpace,
    cycle: ActivityCycle = ActivityCycle.RETURN_TO_WAITING,
) -> GeneratorMatrix:
    """Fill the rate matrix from the transition catalogue.

    Non-persistent class i: x_i -> x_i+1 at lambda_i theta(busy) and
    x_i -> x_i-1 at x_i mu_i. Persistent user j: I -> W at alpha_j,
    W -> I at beta_j, W -> T at u_j theta(busy) and T -> W at v_j (T -> I
    for ``ActivityCycle.RETURN_TO_IDLE``). Failed attempts leave the state
    unchanged and produce no entry.

    Args:
        scenario: The scenario
        states: Its enumerated state space
        cycle: Where transmitting users go after completion

    Returns:
        GeneratorMatrix: The rates
    """
    theta = scenario.profile
    size = len(states)
    rates = np.zeros((size, size))
    after_transmit = W if cycle is ActivityCycle.RETURN_TO_WAITING else I

    for state in states:
        w = state.index
        busy = state.busy
        success = theta[busy]
        x, a = list(state.x), list(state.a)

        for i, cls in enumerate(scenario.classes):
            if success > 0:
                up = x.copy()
                up[i] += 1
                rates[w, states.index_of(up, a)] += cls.lam * success
            if x[i] > 0:
                down = x.copy()
                down[i] -= 1
                rates[w, states.index_of(down, a)] += x[i] * cls.mu

        for j, user in enumerate(scenario.users):
            def moved(target: ActivityState) -> int:
                changed = a.copy()
                changed[j] = target
                return states.index_of(x, changed)

            if a[j] is I:
                rates[w, moved(W)] += user.alpha
            elif a[j] is W:
                rates[w, moved(I)] += user.beta
                if success > 0:
                    rates[w, moved(T)] += user.u * success
            else:
                rates[w, moved(after_transmit)] += user.v

    logger.debug("generator_built", states=size, cycle=cycle.value)
    return GeneratorMatrix(rates, states)


def solve_global_balance(generator: GeneratorMatrix) -> np.ndarray:
    """Stationary distribution from the global balance equations.

    The transposed generator is solved with balance row 0 replaced by the
    normalization sum(pi) = 1.

    Raises:
        OracleSolverError: If the system is singular or the solution is not
            a probability vector
    """
    system = generator.rates.T.copy()
    np.fill_diagonal(system, -generator.holding_rates)
    system[0, :] = 1.0
    rhs = np.zeros(len(system))
    rhs[0] = 1.0
    try:
        pi = np.linalg.solve(system, rhs)
    except np.linalg.LinAlgError as e:
        raise OracleSolverError(f"global balance system is singular: {e}")
    if not np.all(np.isfinite(pi)):
        raise OracleSolverError("global balance solution is not finite")
    if np.any(pi < -1e-12):
        raise OracleSolverError(f"global balance solution has negative entry {pi.min():.3e}")
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


def global_balance_residual(generator: GeneratorMatrix, pi: np.ndarray) -> float:
    """max_w |sum_z pi(z) q(z, w) - pi(w) q(w)|."""
    if len(pi) == 0:
        return 0.0
    return float(np.max(np.abs(pi @ generator.rates - pi * generator.holding_rates)))


def _flow_scale(generator: GeneratorMatrix, pi: np.ndarray) -> float:
    # largest single flow pi(w) q(w, z)
    if len(pi) == 0:
        return 0.0
    return float(np.max(pi * generator.rates.max(axis=1)))


def _imbalance_blocks(
    generator: GeneratorMatrix, pi: np.ndarray, scale: float
) -> Iterator[Tuple[int, np.ndarray, np.ndarray, np.ndarray]]:
    """Relative flow imbalance a block of rows at a time.

    Yields:
        (first row, forward flows, backward flows, relative imbalance)
    """
    size = len(pi)
    rows = max(1, AUDIT_BLOCK_ELEMENTS // max(size, 1))
    for lo in range(0, size, rows):
        hi = min(lo + rows, size)
        forward = pi[lo:hi, None] * generator.rates[lo:hi]
        backward = (generator.rates[:, lo:hi] * pi[:, None]).T
        relative = np.abs(forward - backward) / np.maximum(scale, forward)
        yield lo, forward, backward, relative


def detailed_balance_residual(generator: GeneratorMatrix, pi: np.ndarray) -> float:
    """Largest relative pairwise flow imbalance.

    The imbalance |pi(w) q(w,z) - pi(z) q(z,w)| is divided by the larger of
    the forward flow and the largest single flow in the chain.
    """
    scale = _flow_scale(generator, pi)
    if scale == 0.0:
        return 0.0
    return max(
        float(relative.max()) for _, _, _, relative in _imbalance_blocks(generator, pi, scale)
    )


def audit_detailed_balance(
    generator: GeneratorMatrix,
    pi: np.ndarray,
    tolerance: float = BALANCE_TOLERANCE,
) -> List[BalanceViolation]:
    """Every ordered state pair whose relative imbalance exceeds ``tolerance``."""
    scale = _flow_scale(generator, pi)
    if scale == 0.0:
        return []
    violations: List[BalanceViolation] = []
    worst = 0.0
    for lo, forward, backward, relative in _imbalance_blocks(generator, pi, scale):
        worst = max(worst, float(relative.max()))
        for r, z in zip(*np.nonzero(relative > tolerance)):
            violations.append(BalanceViolation(
                int(lo + r), int(z), float(forward[r, z]), float(backward[r, z]), float(relative[r, z])
            ))
    if violations:
        logger.info("detailed_balance_violated", pairs=len(violations), worst=worst)
    return violations


def coefficient_discrepancy(
    users: Sequence[PersistentUser],
    oracle: Optional[OracleConfig] = None,
    numerics: Optional[NumericsConfig] = None,
) -> Optional[float]:
    """Largest relative error of the transform coefficients c_b.

    The reference is direct enumeration up to ``oracle.enumeration_limit``
    users, then repeated convolution up to ``numerics.convolution_limit``;
    beyond both limits there is no reference and None is returned.
    """
    oracle = oracle or OracleConfig()
    numerics = numerics or NumericsConfig()
    n = len(users)
    if n <= oracle.enumeration_limit:
        reference = enumerate_all_c(users, limit=oracle.enumeration_limit)
    elif n <= numerics.convolution_limit:
        reference = convolution_expand(factors_for(users), limit=numerics.convolution_limit).to_array().real
    else:
        logger.debug("coefficient_check_skipped", users=n)
        return None
    computed = coefficients_c(users, numerics=numerics).to_array().real
    return float(np.max(np.abs(computed - reference) / reference))


def product_form_discrepancy(
    scenario: Scenario,
    states: StateSpace,
    pi: np.ndarray,
    numerics: Optional[NumericsConfig] = None,
) -> float:
    """max_w |p(w) - pi(w)| between the product form and the oracle solve."""
    analyzer = MixedAnalyzer(scenario, numerics)
    if len(states) == 0:
        return 0.0
    masses = np.array([analyzer.joint_mass(s.x, s.a) for s in states])
    return float(np.max(np.abs(masses - pi)))


def aggregate_by_total(states: StateSpace, pi: np.ndarray) -> Dict[Tuple[int, Tuple[ActivityState, ...]], float]:
    """Sum pi over states with the same (sum(x), a)."""
    totals: Dict[Tuple[int, Tuple[ActivityState, ...]], float] = {}
    for state in states:
        key = (sum(state.x), state.a)
        totals[key] = totals.get(key, 0.0) + float(pi[state.index])
    return totals


@dataclass(frozen=True)
class VerificationSummary:
    """Outcome of checking a scenario against the brute-force oracle.

    ``coefficient_discrepancy`` is None when the population is beyond both
    coefficient reference limits.
    """

    states: int
    global_residual: float
    detailed_residual: float
    violations: int
    product_form_discrepancy: float
    coefficient_discrepancy: Optional[float] = None

    def passed(
        self,
        tolerance: float = BALANCE_TOLERANCE,
        coefficient_tolerance: float = COEFFICIENT_TOLERANCE,
    ) -> bool:
        return (
            self.violations == 0
            and self.global_residual <= tolerance
            and self.product_form_discrepancy <= tolerance
            and (self.coefficient_discrepancy is None or self.coefficient_discrepancy <= coefficient_tolerance)
        )

    def to_dict(self) -> Dict[str, Optional[float]]:
        return {
            "states": self.states,
            "global_balance_residual": self.global_residual,
            "detailed_balance_residual": self.detailed_residual,
            "violations": self.violations,
            "product_form_discrepancy": self.product_form_discrepancy,
            "coefficient_discrepancy": self.coefficient_discrepancy,
        }


def verify_scenario(
    scenario: Scenario,
    oracle: Optional[OracleConfig] = None,
    numerics: Optional[NumericsConfig] = None,
) -> VerificationSummary:
    """Enumerate, solve and audit a scenario.

    Raises:
        OracleScopeError: If the state count exceeds the configured limit or
            the dense matrices exceed the memory budget
    """
    oracle = oracle or OracleConfig()
    estimate = estimate_state_count(scenario)
    if estimate <= oracle.state_limit:
        check_dense_memory(estimate, oracle.dense_memory_limit_mb)
    states = enumerate_states(scenario, limit=oracle.state_limit)
    generator = build_generator(scenario, states)
    pi = solve_global_balance(generator)
    summary = VerificationSummary(
        states=len(states),
        global_residual=global_balance_residual(generator, pi),
        detailed_residual=detailed_balance_residual(generator, pi),
        violations=len(audit_detailed_balance(generator, pi, tolerance=oracle.balance_tolerance)),
        product_form_discrepancy=product_form_discrepancy(scenario, states, pi, numerics),
        coefficient_discrepancy=coefficient_discrepancy(scenario.users, oracle, numerics),
    )
    logger.info(
        "scenario_verified",
        states=summary.states,
        estimate=estimate,
        detailed_residual=summary.detailed_residual,
        discrepancy=summary.product_form_discrepancy,
        coefficient_discrepancy=summary.coefficient_discrepancy,
    )
    return summary
