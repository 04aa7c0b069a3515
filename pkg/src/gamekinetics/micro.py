"""Finite-N agent-based Monte Carlo of the pair-interaction dynamic.

Agents hold mixed strategies on the simplex.  Pair events fire at total
rate N/2 (so each agent interacts at unit rate); in each event both
agents draw a pure strategy from their mixed one, play the game, and
shift probability mass of size delta * h(p) from the losing pure
strategy to the winning one, plus an optional mean-zero simplex noise
r * (q - 1/d) * G(p).  Every update provably stays on the simplex.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .games import PayoffMatrix, StepFunctionParams, h_eval, sample_pure

SUM_DRIFT_TOL = 1e-12


class ConfigInvalid(ValueError):
    pass


def make_generator(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator for a (seed, stream) pair.

    Philox keys are cheap to derive, so parallel sweeps get independent,
    reproducible streams keyed by (seed, stream index); output never
    depends on thread scheduling.
    """
    return np.random.Generator(np.random.Philox(key=np.array([seed, stream], dtype=np.uint64)))


@dataclass(frozen=True)
class MicroConfig:
    """Parameters of the microscopic interaction dynamic.

    delta is the payoff-step intensity, r the noise intensity (their sum
    must stay below 1 so updates cannot leave the simplex), c the cap of
    the step function h.  noise_scale_fn selects G: "use_h" for G = h
    (the default), or any callable with G(p) <= min_i p_i.  clock chooses
    between exponential event increments of mean 2/N (the Markov jump
    process; pair events at total rate N/2 give every agent unit rate)
    and the cheaper fixed increment dt = 2/N.
    """

    delta: float
    r: float = 0.0
    c: float = 0.1
    n_agents: int = 2
    seed: int = 0
    noise_scale_fn: object = "use_h"
    clock: str = "exponential"

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ConfigInvalid(f"delta must be in (0,1), got {self.delta}")
        if self.r < 0.0:
            raise ConfigInvalid(f"r must be >= 0, got {self.r}")
        if self.delta + self.r >= 1.0:
            raise ConfigInvalid(f"need delta + r < 1, got {self.delta + self.r}")
        if self.n_agents < 2:
            raise ConfigInvalid(f"need at least 2 agents, got {self.n_agents}")
        if not 0.0 < self.c < 1.0:
            raise ConfigInvalid(f"step cap c must be in (0,1), got {self.c}")
        if self.clock not in ("exponential", "fixed"):
            raise ConfigInvalid(f"clock must be 'exponential' or 'fixed', got {self.clock!r}")

    @property
    def step(self) -> StepFunctionParams:
        return StepFunctionParams(self.c)

    def noise_scale(self, p) -> float:
        if self.noise_scale_fn == "use_h":
            return h_eval(p, self.step)
        return float(self.noise_scale_fn(p))


@dataclass
class AgentPopulation:
    """Strategies of N agents at a point in simulation time."""

    strategies: np.ndarray  # (N, d)
    time: float = 0.0

    @property
    def n_agents(self) -> int:
        return self.strategies.shape[0]

    @property
    def dim(self) -> int:
        return self.strategies.shape[1]

    def copy(self) -> "AgentPopulation":
        return AgentPopulation(strategies=self.strategies.copy(), time=self.time)


@dataclass
class InteractionEvent:
    """One pair event: who met, their pure-strategy draws, noise and clock.

    l and m (the sampled pure strategies) are filled in by interact_pair.
    """

    i: int
    j: int
    zeta: float
    zeta_tilde: float
    dt: float
    q: np.ndarray | None = None
    q_tilde: np.ndarray | None = None
    l: int | None = None
    m: int | None = None


@dataclass
class RunStats:
    """Counters reported with every run."""

    n_events: int = 0
    renorm_count: int = 0


@dataclass
class MicroRun:
    snapshots: list = field(default_factory=list)  # [(time, AgentPopulation)]
    stats: RunStats = field(default_factory=RunStats)


def sample_simplex_uniform(rng: np.random.Generator, n: int, d: int) -> np.ndarray:
    """n points uniform on the simplex: unit exponentials normalized by their sum."""
    e = rng.standard_exponential((n, d))
    return e / e.sum(axis=1, keepdims=True)


def _renormalize_if_needed(p: np.ndarray, stats: RunStats | None) -> None:
    s = p.sum()
    if abs(s - 1.0) > SUM_DRIFT_TOL:
        p /= s
        if stats is not None:
            stats.renorm_count += 1


def interact_pair(p, p_tilde, event: InteractionEvent, cfg: MicroConfig, matrix: PayoffMatrix,
                  stats: RunStats | None = None):
    """Apply one interaction, returning the pair of updated strategies.

    Both agents move along a_lm * (e_l - e_m) scaled by their own step
    delta * h(.), where l, m are the pure strategies drawn via the
    event's uniforms; when l == m the payoff term vanishes identically
    and only the noise (if any) applies.  Coordinate sums are
    renormalized only if float drift exceeds 1e-12, which is counted.
    """
    if cfg.delta + cfg.r >= 1.0:
        raise ConfigInvalid("delta + r must be < 1")
    p = np.asarray(p, dtype=float)
    pt = np.asarray(p_tilde, dtype=float)
    l = sample_pure(p, event.zeta)
    m = sample_pure(pt, event.zeta_tilde)
    event.l, event.m = l, m

    p_star = p.copy()
    pt_star = pt.copy()
    if l != m:
        a_lm = matrix.a[l, m]
        step = cfg.delta * a_lm
        amt = step * min(np.prod(p), cfg.c)
        p_star[l] += amt
        p_star[m] -= amt
        amt_t = step * min(np.prod(pt), cfg.c)
        pt_star[l] += amt_t
        pt_star[m] -= amt_t
    if cfg.r > 0.0:
        d = p.size
        p_star += cfg.r * (event.q - 1.0 / d) * cfg.noise_scale(p)
        pt_star += cfg.r * (event.q_tilde - 1.0 / d) * cfg.noise_scale(pt)
    _renormalize_if_needed(p_star, stats)
    _renormalize_if_needed(pt_star, stats)
    return p_star, pt_star


def interact_batch(p, p_tilde, zetas, zetas_tilde, cfg: MicroConfig, matrix: PayoffMatrix,
                   qs=None, qs_tilde=None):
    """Vectorized interactions: row k of the inputs defines event k.

    Same rule as interact_pair without the renormalization correction,
    so tests can assert raw float drift.  Returns (p_star, p_tilde_star)
    arrays of shape (n_events, d).
    """
    P = np.atleast_2d(np.asarray(p, dtype=float))
    Pt = np.atleast_2d(np.asarray(p_tilde, dtype=float))
    z = np.asarray(zetas, dtype=float)
    zt = np.asarray(zetas_tilde, dtype=float)
    n = z.size
    if P.shape[0] == 1:
        P = np.broadcast_to(P, (n, P.shape[1]))
    if Pt.shape[0] == 1:
        Pt = np.broadcast_to(Pt, (n, Pt.shape[1]))
    d = P.shape[1]

    cum = np.cumsum(P, axis=1)
    l = np.minimum((cum <= z[:, None]).sum(axis=1), d - 1)
    cum_t = np.cumsum(Pt, axis=1)
    m = np.minimum((cum_t <= zt[:, None]).sum(axis=1), d - 1)

    a_lm = matrix.a[l, m]
    h_p = np.minimum(np.prod(P, axis=1), cfg.c)
    h_pt = np.minimum(np.prod(Pt, axis=1), cfg.c)

    p_star = P.copy()
    pt_star = Pt.copy()
    rows = np.arange(n)
    amt = cfg.delta * a_lm * h_p
    amt_t = cfg.delta * a_lm * h_pt
    # l == m contributes zero because the add and subtract cancel exactly
    p_star[rows, l] += amt
    p_star[rows, m] -= amt
    pt_star[rows, l] += amt_t
    pt_star[rows, m] -= amt_t
    if cfg.r > 0.0:
        if cfg.noise_scale_fn != "use_h":
            g = np.array([cfg.noise_scale(row) for row in P])
            g_t = np.array([cfg.noise_scale(row) for row in Pt])
        else:
            g, g_t = h_p, h_pt
        p_star += cfg.r * (np.asarray(qs) - 1.0 / d) * g[:, None]
        pt_star += cfg.r * (np.asarray(qs_tilde) - 1.0 / d) * g_t[:, None]
    return p_star, pt_star


def expected_drift(p, p_tilde, cfg: MicroConfig, matrix: PayoffMatrix) -> np.ndarray:
    """Analytic one-event expectation of p* - p.

    Component i equals delta * h(p) * sum_k a_ik (p_i pt_k + p_k pt_i);
    the simplex noise is mean-zero and contributes nothing.  Components
    sum to zero by antisymmetry.
    """
    p = np.asarray(p, dtype=float)
    pt = np.asarray(p_tilde, dtype=float)
    ap_t = matrix.a @ pt
    ap = matrix.a @ p
    return cfg.delta * h_eval(p, cfg.step) * (p * ap_t + pt * ap)


def _draw_event_block(rng, n_agents: int, d: int, block: int, with_noise: bool,
                      clock: str = "exponential"):
    """Fixed per-event draw protocol, consumed in blocks for speed."""
    i = rng.integers(0, n_agents, size=block)
    j = rng.integers(0, n_agents - 1, size=block)
    j = j + (j >= i)
    zetas = rng.random((block, 2))
    if clock == "fixed":
        dts = np.full(block, 2.0 / n_agents)
    else:
        dts = rng.exponential(scale=2.0 / n_agents, size=block)
    noise = rng.standard_exponential((block, 2, d)) if with_noise else None
    return i, j, zetas, dts, noise


def step(pop: AgentPopulation, cfg: MicroConfig, matrix: PayoffMatrix,
         rng: np.random.Generator) -> AgentPopulation:
    """One pair event: uniform unordered pair, exponential clock of mean 2/N."""
    n = pop.n_agents
    d = pop.dim
    i, j, zetas, dts, noise = _draw_event_block(rng, n, d, 1, cfg.r > 0.0, cfg.clock)
    event = InteractionEvent(i=int(i[0]), j=int(j[0]), zeta=zetas[0, 0],
                             zeta_tilde=zetas[0, 1], dt=float(dts[0]))
    if noise is not None:
        event.q = noise[0, 0] / noise[0, 0].sum()
        event.q_tilde = noise[0, 1] / noise[0, 1].sum()
    out = pop.copy()
    p_star, pt_star = interact_pair(pop.strategies[event.i], pop.strategies[event.j],
                                    event, cfg, matrix)
    out.strategies[event.i] = p_star
    out.strategies[event.j] = pt_star
    out.time = pop.time + event.dt
    return out


_EVENT_BLOCK = 8192  # fixed so trajectories depend only on (seed, config)


def run_micro(pop0: AgentPopulation, t_end: float, cfg: MicroConfig, matrix: PayoffMatrix,
              snapshot_every: float, rescale_time: bool = False,
              rng: np.random.Generator | None = None) -> MicroRun:
    """Run pair events until time t_end, recording snapshots at a fixed cadence.

    With rescale_time=True, t_end and snapshot_every are interpreted (and
    snapshot times reported) in the rescaled time tau = delta * t used by
    the grazing-limit experiments.  Deterministic given (cfg.seed, config);
    the event loop is sequential by construction.

    The inner loop is a scalar-arithmetic replica of interact_pair and
    must keep its exact operation order: the two paths are required to
    produce bitwise-identical states.
    """
    if snapshot_every <= 0:
        raise ConfigInvalid("snapshot_every must be > 0")
    scale = cfg.delta if rescale_time else 1.0
    t_end_phys = t_end / scale
    snap_phys = snapshot_every / scale
    if rng is None:
        rng = make_generator(cfg.seed)

    run = MicroRun()
    n, d = pop0.strategies.shape
    rows = [list(map(float, r)) for r in pop0.strategies]
    t = 0.0
    run.snapshots.append((0.0, AgentPopulation(strategies=np.array(rows), time=0.0)))
    next_mark = snap_phys
    a_rows = [list(map(float, r)) for r in matrix.a]
    with_noise = cfg.r > 0.0
    custom_g = with_noise and cfg.noise_scale_fn != "use_h"
    stats = run.stats
    delta = cfg.delta
    c = cfg.c
    r_noise = cfg.r
    inv_d = 1.0 / d
    rng_d = range(d)

    def take_snapshot(mark):
        run.snapshots.append(
            (mark * scale, AgentPopulation(strategies=np.array(rows), time=mark * scale)))

    done = t >= t_end_phys
    while not done:
        idx_i, idx_j, zetas, dts, noise = _draw_event_block(rng, n, d, _EVENT_BLOCK,
                                                           with_noise, cfg.clock)
        ii = idx_i.tolist()
        jj = idx_j.tolist()
        zl = zetas[:, 0].tolist()
        ztl = zetas[:, 1].tolist()
        dtl = dts.tolist()
        nl = noise.tolist() if with_noise else None
        for k in range(_EVENT_BLOCK):
            t_next = t + dtl[k]
            while next_mark <= t_next and next_mark <= t_end_phys + 1e-12:
                take_snapshot(next_mark)
                next_mark += snap_phys
            if t_next > t_end_phys:
                done = True
                break
            t = t_next
            pi = rows[ii[k]]
            pj = rows[jj[k]]

            z = zl[k]
            acc = 0.0
            l = d - 1
            for idx in rng_d:
                acc += pi[idx]
                if z < acc:
                    l = idx
                    break
            z = ztl[k]
            acc = 0.0
            m = d - 1
            for idx in rng_d:
                acc += pj[idx]
                if z < acc:
                    m = idx
                    break

            if with_noise:
                # noise scale G is evaluated at the pre-update strategies
                if custom_g:
                    g_i = cfg.noise_scale(pi)
                    g_j = cfg.noise_scale(pj)
                else:
                    g_i = 1.0
                    for v in pi:
                        g_i *= v
                    if g_i > c:
                        g_i = c
                    g_j = 1.0
                    for v in pj:
                        g_j *= v
                    if g_j > c:
                        g_j = c
            if l != m:
                step_lm = delta * a_rows[l][m]
                prod = 1.0
                for v in pi:
                    prod *= v
                amt = step_lm * (prod if prod < c else c)
                pi[l] += amt
                pi[m] -= amt
                prod = 1.0
                for v in pj:
                    prod *= v
                amt = step_lm * (prod if prod < c else c)
                pj[l] += amt
                pj[m] -= amt
            if with_noise:
                raw = nl[k][0]
                qsum = 0.0
                for v in raw:
                    qsum += v
                for idx in rng_d:
                    pi[idx] += (r_noise * (raw[idx] / qsum - inv_d)) * g_i
                raw = nl[k][1]
                qsum = 0.0
                for v in raw:
                    qsum += v
                for idx in rng_d:
                    pj[idx] += (r_noise * (raw[idx] / qsum - inv_d)) * g_j
            # renormalize only if float drift exceeds the tolerance
            s_sum = 0.0
            for v in pi:
                s_sum += v
            if abs(s_sum - 1.0) > SUM_DRIFT_TOL:
                for idx in rng_d:
                    pi[idx] /= s_sum
                stats.renorm_count += 1
            s_sum = 0.0
            for v in pj:
                s_sum += v
            if abs(s_sum - 1.0) > SUM_DRIFT_TOL:
                for idx in rng_d:
                    pj[idx] /= s_sum
                stats.renorm_count += 1
            stats.n_events += 1

    return run
