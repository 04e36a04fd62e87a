"""
Pairwise attribute model over a fully connected graph of boolean
attributes.

A pair (i, j) in states (s_i, s_j) scores

    q_i(s_i) / m_i(s_i) * q_j(s_j) / m_j(s_j) * P(A_i=s_i, A_j=s_j)

where q is the detector posterior and m the prior marginal. The joint
objective of an assignment is the product of pair scores over all i < j,
so every evidence ratio enters (n - 1) times.
"""
import json
import logging
import typing as ty
from dataclasses import dataclass

import numpy as np

from .exceptions import DataError, PreconditionError

_LOGGER = logging.getLogger(__name__)

DEFAULT_ALPHA = 1.0
DEFAULT_SWEEPS = 10
PRIORS_FILE = 'priors.json'

# (s_i, s_j) enumeration order, also the tie-break order of pair_map
PAIR_STATES = ((True, True), (True, False), (False, True), (False, False))


@dataclass(frozen=True)
class AttributePosterior:
    p_obs: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.p_obs, dtype=float)
        if values.ndim != 1:
            raise PreconditionError('posterior must be a vector')
        if values.size and (values.min() < 0 or values.max() > 1):
            raise PreconditionError('posteriors must lie in [0,1]')
        object.__setattr__(self, 'p_obs', values)

    def q(self, i: int, state: bool) -> float:
        return float(self.p_obs[i] if state else 1.0 - self.p_obs[i])

    def __len__(self):
        return self.p_obs.size


class AttributePriorModel:
    """
    Marginals P(A_i) and pairwise joints P(A_i, A_j) over boolean states.
    joint[i, j, s_i, s_j] is stored for every ordered pair with
    joint[j, i] equal to the transpose of joint[i, j].
    """

    def __init__(self, names: ty.Sequence[str], marginal: np.ndarray,
                 joint: np.ndarray, n_sets: int = 0,
                 alpha: float = DEFAULT_ALPHA) -> None:
        self.names = tuple(names)
        self.marginal = np.asarray(marginal, dtype=float)
        self.joint = np.asarray(joint, dtype=float)
        self.n_sets = n_sets
        self.alpha = alpha
        k = len(self.names)
        if self.marginal.shape != (k,) or self.joint.shape != (k, k, 2, 2):
            raise PreconditionError('prior model shape mismatch')

    def __len__(self):
        return len(self.names)

    def m(self, i: int, state: bool) -> float:
        return float(self.marginal[i] if state else 1.0 - self.marginal[i])

    def pair_table(self, i: int, j: int) -> np.ndarray:
        """2x2 table indexed by [s_i, s_j] with 1 = present"""
        return self.joint[i, j]

    def check(self, tolerance: float = 1e-9) -> None:
        if np.any(self.marginal <= 0) or np.any(self.marginal >= 1):
            raise PreconditionError('marginals must lie strictly in (0,1)')
        k = len(self)
        for i in range(k):
            for j in range(i + 1, k):
                table = self.joint[i, j]
                if abs(table.sum() - 1.0) > tolerance:
                    raise PreconditionError(
                        f'joint {self.names[i]},{self.names[j]} does not '
                        f'sum to 1',
                    )
                for axis, n in ((1, i), (0, j)):
                    present = table.sum(axis=axis)[1]
                    if abs(present - self.marginal[n]) > tolerance:
                        raise PreconditionError(
                            f'joint {self.names[i]},{self.names[j]} is '
                            f'inconsistent with the marginal of '
                            f'{self.names[n]}',
                        )

    def as_dict(self) -> ty.Dict[str, ty.Any]:
        k = len(self)
        joints: ty.Dict[str, ty.Dict[str, ty.List[ty.List[float]]]] = {}
        for i in range(k):
            for j in range(i + 1, k):
                # [[P(0,0), P(0,1)], [P(1,0), P(1,1)]]
                joints.setdefault(self.names[i], {})[self.names[j]] = \
                    self.joint[i, j].tolist()
        return {
            'attributes': list(self.names),
            'alpha': self.alpha,
            'n_sets': self.n_sets,
            'marginals': self.marginal.tolist(),
            'joints': joints,
        }

    @classmethod
    def from_dict(cls, raw: ty.Mapping[str, ty.Any]) -> 'AttributePriorModel':
        try:
            names = list(raw['attributes'])
            marginal = np.array(raw['marginals'], dtype=float)
            k = len(names)
            index = {name: n for n, name in enumerate(names)}
            joint = np.zeros((k, k, 2, 2))
            for a, row in raw['joints'].items():
                for b, table in row.items():
                    i, j = index[a], index[b]
                    joint[i, j] = np.array(table, dtype=float)
                    joint[j, i] = joint[i, j].T
            for i in range(k):
                joint[i, i] = np.diag([1 - marginal[i], marginal[i]])
        except (KeyError, TypeError, ValueError) as e:
            raise DataError(f'invalid priors: {e}') from e
        model = cls(names, marginal, joint, int(raw.get('n_sets', 0)),
                    float(raw.get('alpha', DEFAULT_ALPHA)))
        model.check()
        return model


def save_priors(model: AttributePriorModel, path) -> None:
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(model.as_dict(), f, indent=2, sort_keys=True)


def load_priors(path) -> AttributePriorModel:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            raw = json.load(f)
    except (OSError, ValueError) as e:
        raise DataError(f'cannot read priors: {e}', source=str(path)) from e
    return AttributePriorModel.from_dict(raw)


def estimate_priors(sets: ty.Sequence[ty.AbstractSet[str]],
                    vocabulary: ty.Sequence[str],
                    alpha: float = DEFAULT_ALPHA) -> AttributePriorModel:
    """
    Smoothed marginals (c_i + a) / (N + 2a) and joints with a/2 pseudo
    counts per cell over N + 2a, so every joint table marginalizes to the
    smoothed marginals exactly.
    """
    if not sets:
        raise PreconditionError('cannot estimate priors from no attribute sets')
    if not alpha > 0:
        raise PreconditionError(f'smoothing alpha must be > 0, got {alpha}')

    vocabulary = tuple(vocabulary)
    index = {name: n for n, name in enumerate(vocabulary)}
    x = np.zeros((len(sets), len(vocabulary)))
    for row, attribute_set in enumerate(sets):
        for name in attribute_set:
            if name in index:
                x[row, index[name]] = 1.0

    n = float(len(sets))
    counts = x.sum(axis=0)
    both = x.T @ x
    only_i = counts[:, None] - both
    only_j = counts[None, :] - both
    neither = n - both - only_i - only_j

    denominator = n + 2 * alpha
    joint = np.empty((len(vocabulary), len(vocabulary), 2, 2))
    joint[:, :, 1, 1] = both
    joint[:, :, 1, 0] = only_i
    joint[:, :, 0, 1] = only_j
    joint[:, :, 0, 0] = neither
    joint = (joint + alpha / 2) / denominator
    marginal = (counts + alpha) / denominator

    model = AttributePriorModel(vocabulary, marginal, joint, len(sets), alpha)
    _LOGGER.debug(f'Estimated priors over {len(vocabulary)} attributes '
                  f'from {len(sets)} sets')
    return model


def pair_score(i: int, j: int, s_i: bool, s_j: bool,
               posterior: AttributePosterior,
               priors: AttributePriorModel) -> float:
    m_i = priors.m(i, s_i)
    m_j = priors.m(j, s_j)
    if m_i <= 0 or m_j <= 0:
        raise PreconditionError('prior marginals must lie strictly in (0,1)')
    return (
        posterior.q(i, s_i) / m_i *
        posterior.q(j, s_j) / m_j *
        float(priors.joint[i, j, int(s_i), int(s_j)])
    )


@dataclass(frozen=True)
class PairMap:
    state: ty.Tuple[bool, bool]
    distribution: ty.Dict[ty.Tuple[bool, bool], float]


def pair_map(i: int, j: int, posterior: AttributePosterior,
             priors: AttributePriorModel) -> PairMap:
    scores = [
        pair_score(i, j, s_i, s_j, posterior, priors)
        for s_i, s_j in PAIR_STATES
    ]
    total = sum(scores)
    if total <= 0:
        raise PreconditionError(
            f'all pair scores of {priors.names[i]},{priors.names[j]} are '
            f'zero, priors are degenerate',
        )
    distribution = {
        state: score / total for state, score in zip(PAIR_STATES, scores)
    }
    # first maximum in PAIR_STATES order: true before false, i before j
    best = max(range(len(PAIR_STATES)), key=lambda n: (scores[n], -n))
    return PairMap(state=PAIR_STATES[best], distribution=distribution)


@dataclass(frozen=True)
class IcmResult:
    assignment: np.ndarray
    objective: float
    converged: bool
    sweeps: int
    flips: int
    # objective at the start and after every accepted flip
    trace: ty.Tuple[float, ...] = ()

    def present(self, names: ty.Sequence[str]) -> ty.FrozenSet[str]:
        return frozenset(
            name for name, on in zip(names, self.assignment) if on
        )


class PairwiseObjective:
    """Log-domain objective sum_{i<j} log pair_score(i, j, s_i, s_j)"""

    def __init__(self, posterior: AttributePosterior,
                 priors: AttributePriorModel) -> None:
        if len(posterior) != len(priors):
            raise PreconditionError(
                f'posterior has {len(posterior)} entries, priors '
                f'{len(priors)}',
            )
        self.n = len(priors)
        p = posterior.p_obs
        m = priors.marginal
        with np.errstate(divide='ignore'):
            # unary[i, s], s = 1 present
            q = np.stack([1.0 - p, p], axis=1)
            prior = np.stack([1.0 - m, m], axis=1)
            self.unary = np.log(q) - np.log(prior)
            self.log_joint = np.log(priors.joint)
        # self pairs never enter the objective
        for i in range(self.n):
            self.log_joint[i, i] = 0.0

    def local(self, i: int, state: int, assignment: np.ndarray) -> float:
        """Every objective term involving node i, with s_i = state"""
        others = np.flatnonzero(np.arange(self.n) != i)
        s = assignment.astype(int)
        pair = self.log_joint[i, others, state, s[others]].sum()
        return (self.n - 1) * self.unary[i, state] + pair

    def value(self, assignment: np.ndarray) -> float:
        if self.n < 2:
            return 0.0
        s = assignment.astype(int)
        unary = (self.n - 1) * self.unary[np.arange(self.n), s].sum()
        upper = np.triu_indices(self.n, k=1)
        pair = self.log_joint[upper[0], upper[1], s[upper[0]],
                              s[upper[1]]].sum()
        return float(unary + pair)

    def is_local_max(self, assignment: np.ndarray) -> bool:
        s = assignment.astype(int)
        return all(
            not self.local(i, 1 - s[i], assignment) >
            self.local(i, s[i], assignment)
            for i in range(self.n)
        )


def joint_map_icm(posterior: AttributePosterior,
                  priors: AttributePriorModel,
                  max_sweeps: int = DEFAULT_SWEEPS) -> IcmResult:
    if max_sweeps < 1:
        raise PreconditionError('max_sweeps must be >= 1')
    objective = PairwiseObjective(posterior, priors)
    n = objective.n

    if n == 2:
        # the pair case is solved exactly
        state = pair_map(0, 1, posterior, priors).state
        assignment = np.array(state, dtype=bool)
        return IcmResult(assignment, objective.value(assignment), True, 0, 0)

    assignment = posterior.p_obs >= 0.5
    if n < 2:
        return IcmResult(assignment, 0.0, True, 0, 0)

    flips = 0
    sweeps = 0
    converged = False
    trace = [objective.value(assignment)]
    while sweeps < max_sweeps:
        sweeps += 1
        changed = False
        for i in range(n):
            current = int(assignment[i])
            if objective.local(i, 1 - current, assignment) > \
                    objective.local(i, current, assignment):
                assignment[i] = not assignment[i]
                flips += 1
                trace.append(objective.value(assignment))
                changed = True
        if not changed:
            converged = True
            break
    if not converged:
        # the last sweep may have reached a fixed point without proof
        converged = objective.is_local_max(assignment)

    return IcmResult(
        assignment=assignment,
        objective=trace[-1],
        converged=converged,
        sweeps=sweeps,
        flips=flips,
        trace=tuple(trace),
    )


def brute_force_map(posterior: AttributePosterior,
                    priors: AttributePriorModel) -> IcmResult:
    """Exhaustive MAP, for validation on small models"""
    objective = PairwiseObjective(posterior, priors)
    n = objective.n
    if n > 20:
        raise PreconditionError('exhaustive MAP is limited to 20 attributes')
    best: ty.Optional[np.ndarray] = None
    best_value = -np.inf
    for code in range(2 ** n):
        assignment = np.array(
            [(code >> (n - 1 - i)) & 1 for i in range(n)], dtype=bool,
        )
        value = objective.value(assignment)
        if best is None or value > best_value:
            best, best_value = assignment, value
    assert best is not None
    return IcmResult(best, float(best_value), True, 0, 0)


def rescore(vectors: ty.Mapping[int, np.ndarray],
            names: ty.Sequence[str],
            priors: AttributePriorModel,
            max_sweeps: int = DEFAULT_SWEEPS,
            ) -> ty.Dict[int, ty.FrozenSet[str]]:
    """Attribute sets from the joint MAP assignment of each item"""
    result = {}
    not_converged = 0
    for item_id, vector in vectors.items():
        icm = joint_map_icm(AttributePosterior(vector), priors, max_sweeps)
        if not icm.converged:
            not_converged += 1
        result[item_id] = icm.present(names)
    if not_converged:
        _LOGGER.warning(
            f'ICM did not converge for {not_converged} of {len(result)} '
            f'items in {max_sweeps} sweeps',
        )
    return result
