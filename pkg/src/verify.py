"""Self-checks behind the `verify` command.

Three suites:

* ``gradient``: analytic gradients against central finite differences, through
  the circuit, the mapping model, the composed generator, the policy and a
  frozen training trajectory.
* ``oracle``: the tensor simulator against dense 2^n x 2^n unitaries built
  with Kronecker products.
* ``env``: the gridworld contract.

Floored-relative errors use ``|a - b| / max(|b|, 1)``.
"""

import logging
from collections.abc import Callable, Iterable
from functools import reduce

import numpy as np

from .exceptions import ContractViolationError, ValidationError
from .gridworld import (
    MAX_STEPS,
    OBS_SIZE,
    Action,
    Direction,
    GridWorld,
    random_agent_success_rate,
)
from .mapper import MapInput, init_mapping_params, map_backward, map_backward_all, map_forward
from .models import CheckResult, GradientMethod, Trajectory
from .policy import QT_TOPOLOGY, PolicyTopology, init_policy_params, log_prob, logpi_grad
from .qsim import (
    QuantumParams,
    StateVector,
    adjoint_weighted_prob_gradient,
    apply_cnot,
    apply_u3,
    init_quantum_params,
    probabilities,
    run_ansatz,
    u3_matrix,
    weighted_prob_gradient,
)
from .qtgen import GlobalModel
from .trainer import compute_returns, episode_gradient, standardize

logger = logging.getLogger(__name__)

FD_STEP = 1e-6
TINY_TOPOLOGY = PolicyTopology(obs_dim=2, hidden=2, n_actions=3)

SHIFT_TOL = 1e-6
ADJOINT_TOL = 1e-9
MAPPER_TOL = 1e-6
COMPOSED_TOL = 1e-5
POLICY_TOL = 1e-6
TRAJECTORY_TOL = 1e-5
ORACLE_TOL = 1e-10
NORM_TOL = 1e-12
ORACLE_CASES = 50
SHIFT_DRAWS = 20
MAPPER_DRAWS = 50

Check = Callable[[], CheckResult]


def finite_difference(f: Callable[[np.ndarray], float], x: np.ndarray) -> np.ndarray:
    x = np.array(x, dtype=np.float64, copy=True)
    grad = np.empty_like(x)
    for j in range(x.size):
        saved = x[j]
        x[j] = saved + FD_STEP
        plus = f(x)
        x[j] = saved - FD_STEP
        minus = f(x)
        x[j] = saved
        grad[j] = (plus - minus) / (2 * FD_STEP)
    return grad


def max_abs_error(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b)), initial=0.0))


def max_floored_rel_error(a: np.ndarray, b: np.ndarray) -> float:
    b = np.asarray(b)
    return float(
        np.max(np.abs(np.asarray(a) - b) / np.maximum(np.abs(b), 1.0), initial=0.0)
    )


# gradient suite


def _shift_rule_check() -> CheckResult:
    rng = np.random.default_rng(101)
    worst = 0.0
    for draw in range(SHIFT_DRAWS):
        n, layers = 1 + draw % 6, 1 + draw % 3
        params = init_quantum_params(n, layers, rng)
        weights = rng.normal(size=1 << n)

        def f(angles: np.ndarray, params: QuantumParams = params, w: np.ndarray = weights) -> float:
            return float(w @ probabilities(run_ansatz(params.with_angles(angles))))

        numeric = finite_difference(f, params.angles)
        worst = max(worst, max_abs_error(weighted_prob_gradient(params, weights), numeric))
    return CheckResult(
        "gradient", "qsim shift rule", worst, SHIFT_TOL, f"{SHIFT_DRAWS} draws, n <= 6, L <= 3"
    )


def _adjoint_check() -> CheckResult:
    rng = np.random.default_rng(102)
    worst = 0.0
    for n, layers in ((1, 3), (3, 2), (5, 2)):
        params = init_quantum_params(n, layers, rng)
        weights = rng.normal(size=1 << n)
        worst = max(
            worst,
            max_abs_error(
                adjoint_weighted_prob_gradient(params, weights),
                weighted_prob_gradient(params, weights),
            ),
        )
    return CheckResult("gradient", "qsim adjoint vs shift", worst, ADJOINT_TOL)


def _mapper_check() -> CheckResult:
    rng = np.random.default_rng(103)
    n = 4
    worst = 0.0
    for _ in range(MAPPER_DRAWS):
        beta = init_mapping_params(n, rng)
        index = int(rng.integers(1 << n))
        prob = float(rng.uniform(0.01, 0.2))
        inp = MapInput.for_basis(index, n, prob)
        grad_beta, grad_prob = map_backward(beta, inp, 1.0)
        numeric_beta = finite_difference(
            lambda v, beta=beta, inp=inp: map_forward(beta.with_values(v), inp),
            beta.values,
        )
        numeric_prob = finite_difference(
            lambda p, beta=beta, index=index: map_forward(
                beta, MapInput.for_basis(index, n, p[0])
            ),
            np.array([prob]),
        )
        worst = max(
            worst,
            max_floored_rel_error(grad_beta, numeric_beta),
            max_floored_rel_error([grad_prob], numeric_prob),
        )
    return CheckResult(
        "gradient", "mapper backward", worst, MAPPER_TOL, f"{MAPPER_DRAWS} draws"
    )


def _mapper_batch_check() -> CheckResult:
    rng = np.random.default_rng(104)
    n, k = 4, 13
    beta = init_mapping_params(n, rng)
    probs = rng.dirichlet(np.ones(1 << n))
    upstream = rng.normal(size=k)
    batch_beta, batch_prob = map_backward_all(beta, probs, k, upstream)
    loop_beta = np.zeros_like(batch_beta)
    loop_prob = np.zeros(k)
    for i in range(k):
        g_beta, g_prob = map_backward(beta, MapInput.for_basis(i, n, probs[i]), upstream[i])
        loop_beta += g_beta
        loop_prob[i] = g_prob
    worst = max(max_abs_error(batch_beta, loop_beta), max_abs_error(batch_prob, loop_prob))
    return CheckResult("gradient", "mapper batched backward", worst, 1e-10)


def tiny_model(seed: int = 105, layers: int = 2) -> GlobalModel:
    """n = 4 model generating the 15 weights of TINY_TOPOLOGY."""
    rng = np.random.default_rng(seed)
    return GlobalModel(
        phi=init_quantum_params(4, layers, rng),
        beta=init_mapping_params(4, rng),
        k=TINY_TOPOLOGY.size,
        policy=TINY_TOPOLOGY,
        enforce_compression=False,
    )


def _composed_check() -> CheckResult:
    model = tiny_model()
    v = np.random.default_rng(106).normal(size=model.k)
    numeric = finite_difference(
        lambda flat: float(v @ model.with_parameters(flat).generate_theta()),
        model.parameters(),
    )
    worst = 0.0
    for method in GradientMethod:
        worst = max(worst, max_abs_error(model.pullback(v, method).flat, numeric))
    return CheckResult("gradient", "qt-gen composed Jacobian", worst, COMPOSED_TOL)


def _policy_check() -> CheckResult:
    rng = np.random.default_rng(107)
    theta = init_policy_params(QT_TOPOLOGY, rng)
    obs = rng.uniform(size=QT_TOPOLOGY.obs_dim)
    worst = 0.0
    for action in range(QT_TOPOLOGY.n_actions):
        numeric = finite_difference(lambda t, a=action: log_prob(t, obs, a), theta)
        worst = max(worst, max_floored_rel_error(logpi_grad(theta, obs, action), numeric))
    return CheckResult("gradient", "policy log-prob", worst, POLICY_TOL)


def frozen_trajectory() -> Trajectory:
    rng = np.random.default_rng(108)
    traj = Trajectory()
    for action, reward in ((0, 0.0), (2, 0.0), (1, 1.0)):
        traj.append(rng.uniform(size=TINY_TOPOLOGY.obs_dim), action, reward)
    return traj


def _trajectory_check() -> CheckResult:
    model = tiny_model()
    traj = frozen_trajectory()
    gamma = 0.9
    returns = standardize(compute_returns(traj.rewards, gamma))

    def objective(flat: np.ndarray) -> float:
        theta = model.with_parameters(flat).generate_theta()
        total = sum(
            log_prob(theta, s.obs, s.action, TINY_TOPOLOGY) * g
            for s, g in zip(traj.steps, returns, strict=True)
        )
        return float(total / len(traj))

    numeric = finite_difference(objective, model.parameters())
    worst = 0.0
    for method in GradientMethod:
        packet = episode_gradient(model, traj, gamma, True, method)
        worst = max(worst, max_abs_error(packet.flat, numeric))
    return CheckResult(
        "gradient", "trainer frozen trajectory", worst, TRAJECTORY_TOL, "n = 4, T = 3"
    )


# oracle suite


def _dense_single(gate: np.ndarray, qubit: int, n: int) -> np.ndarray:
    ops = [np.eye(2, dtype=np.complex128)] * n
    ops[qubit] = gate
    return reduce(np.kron, ops)


def _dense_cnot(control: int, target: int, n: int) -> np.ndarray:
    dim = 1 << n
    c_mask = 1 << (n - 1 - control)
    t_mask = 1 << (n - 1 - target)
    matrix = np.zeros((dim, dim), dtype=np.complex128)
    for i in range(dim):
        matrix[i ^ t_mask if i & c_mask else i, i] = 1.0
    return matrix


def dense_ansatz_unitary(params: QuantumParams) -> np.ndarray:
    """Brute-force product of every gate of the ansatz."""
    n = params.n
    unitary = np.eye(1 << n, dtype=np.complex128)
    for block in params.blocks():
        for q in range(n):
            unitary = _dense_single(u3_matrix(*block[q]), q, n) @ unitary
        if n > 1:
            for q in range(n):
                unitary = _dense_cnot(q, (q + 1) % n, n) @ unitary
    return unitary


def _oracle_check() -> CheckResult:
    rng = np.random.default_rng(201)
    worst = 0.0
    for case in range(ORACLE_CASES):
        n = case % 4 + 1
        params = init_quantum_params(n, int(rng.integers(1, 4)), rng)
        expected = dense_ansatz_unitary(params)[:, 0]
        worst = max(worst, max_abs_error(run_ansatz(params).amplitudes, expected))
    return CheckResult(
        "oracle", "ansatz vs dense unitary", worst, ORACLE_TOL, f"{ORACLE_CASES} cases"
    )


def _norm_check() -> CheckResult:
    rng = np.random.default_rng(202)
    worst = 0.0
    for n in range(1, 7):
        params = init_quantum_params(n, 4, rng)
        worst = max(worst, abs(run_ansatz(params).norm_squared - 1.0))
    return CheckResult("oracle", "statevector norm drift", worst, NORM_TOL)


def _bell_check() -> CheckResult:
    # U3(π/2, 0, π) is a Hadamard
    state = apply_cnot(apply_u3(StateVector.zero(2), 0, np.pi / 2, 0.0, np.pi), 0, 1)
    expected = np.array([1, 0, 0, 1]) / np.sqrt(2)
    return CheckResult(
        "oracle", "Bell state", max_abs_error(state.amplitudes, expected), ORACLE_TOL
    )


# env suite


def _flag(suite: str, name: str, ok: bool, detail: str = "") -> CheckResult:
    return CheckResult(suite, name, 0.0 if ok else 1.0, 0.0, detail)


def _env_checks() -> list[CheckResult]:
    env = GridWorld()
    state, first = env.reset()
    _, again = env.reset()
    results = [
        _flag(
            "env",
            "reset layout",
            state.agent_pos == (1, 1) and state.agent_dir is Direction.EAST,
        ),
        _flag("env", "reset determinism", bool(np.array_equal(first, again))),
        _flag(
            "env",
            "observation range",
            first.shape == (OBS_SIZE,) and bool(np.all((first >= 0) & (first <= 1))),
        ),
        _flag(
            "env",
            "goal visible at egocentric offset",
            bool(np.isclose(first.reshape(7, 7, 3)[5, 4, 0], 0.8)),
        ),
    ]

    env.reset()
    reward, done = 0.0, False
    for action in (Action.FORWARD, Action.FORWARD, Action.RIGHT, Action.FORWARD, Action.FORWARD):
        _, _, reward, done = env.step(action)
    results.append(
        CheckResult("env", "shortest path reward", abs(reward - 0.955), 1e-12, f"done={done}")
    )

    env.reset()
    env.step(Action.LEFT)
    blocked, _, _, _ = env.step(Action.FORWARD)
    results.append(
        _flag(
            "env",
            "wall blocking",
            blocked.agent_pos == (1, 1) and blocked.step_count == 2,
        )
    )

    env.reset()
    steps = 0
    done = False
    while not done:
        _, _, reward, done = env.step(Action.LEFT)
        steps += 1
    results.append(_flag("env", "step cap", steps == MAX_STEPS and reward == 0.0))

    try:
        env.step(Action.FORWARD)
    except ContractViolationError:
        refused = True
    else:
        refused = False
    results.append(_flag("env", "finished episode refuses steps", refused))

    rate, _ = random_agent_success_rate(1000, seed=0)
    results.append(_flag("env", "random agent succeeds", rate > 0, f"rate={rate:.3f}"))
    return results


SUITES: dict[str, Callable[[], list[CheckResult]]] = {
    "gradient": lambda: [
        _shift_rule_check(),
        _adjoint_check(),
        _mapper_check(),
        _mapper_batch_check(),
        _composed_check(),
        _policy_check(),
        _trajectory_check(),
    ],
    "oracle": lambda: [_oracle_check(), _norm_check(), _bell_check()],
    "env": _env_checks,
}


def run_suites(names: Iterable[str]) -> list[CheckResult]:
    """Run the named suites in order; "all" expands to every suite."""
    selected: list[str] = []
    for name in names:
        if name == "all":
            selected.extend(SUITES)
        elif name in SUITES:
            selected.append(name)
        else:
            raise ValidationError(
                f"Unknown verify suite '{name}'. Choose from: all, {', '.join(SUITES)}"
            )
    results: list[CheckResult] = []
    for name in dict.fromkeys(selected):
        logger.info(f"Running {name} checks")
        results.extend(SUITES[name]())
    return results
