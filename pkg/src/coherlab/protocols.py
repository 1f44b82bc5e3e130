"""Executable two-party protocols.

Incoherent teleportation, assisted coherence distillation for pure and for
maximally correlated states, the steering search certifying that non-QI
states let Alice steer Bob to a coherent state, the SQI-to-SI pinching
reduction, the incoherent-ancilla reduction, domino-state discrimination
and the single-shot state-merging witness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channels import (
    KrausChannel,
    LocalProtocol,
    ProductKrausChannel,
    ProtocolRound,
    classify,
    is_incoherent_operator,
)
from .exceptions import (
    DimensionMismatchError,
    EnsembleMismatchError,
    IncompleteChannelError,
    InvalidStateError,
    NotMaximallyCorrelatedError,
    NotSIError,
    NotSQIError,
)
from .linalg import (
    DensityMatrix,
    PureState,
    partial_trace,
    permute_subsystems,
    trace_norm,
    von_neumann_entropy,
)
from .measures import (
    Bipartition,
    MeasureReport,
    c_r,
    coherence_of_assistance,
    dephase,
    qi_relative_entropy,
)
from .states import (
    SIGMA_X,
    SIGMA_Z,
    bell_states,
    domino_states,
    fourier_mc_basis,
    ket,
    merging_state,
)

__all__ = [
    "ProtocolResult",
    "SteeringWitness",
    "MergingWitnessResult",
    "incoherent_teleport",
    "assisted_distill_pure",
    "assisted_distill_mc",
    "find_steering_measurement",
    "sqi_to_si_reduce",
    "ancilla_reduce",
    "domino_discrimination_channel",
    "discriminate_domino",
    "merging_witness",
]


@dataclass(frozen=True, eq=False)
class ProtocolResult:
    """Outcome ensemble of a protocol run plus named summary metrics.
    ``details`` carries non-scalar artifacts (operators, permutations)."""

    outcomes: tuple[tuple[float, DensityMatrix, tuple], ...]
    metrics: dict[str, float]
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        total = sum(p for p, _, _ in self.outcomes)
        if abs(total - 1.0) > 1e-9:
            raise IncompleteChannelError(f"outcome probabilities sum to {total}, not 1")

    @property
    def probabilities(self) -> list[float]:
        return [p for p, _, _ in self.outcomes]


@dataclass(frozen=True, eq=False)
class SteeringWitness:
    """An incoherent Kraus operator on Alice's side whose outcome leaves Bob
    in a coherent state with positive probability."""

    kraus_op: np.ndarray
    probability: float
    bob_post_state: DensityMatrix
    bob_coherence: float

    def __post_init__(self):
        if self.probability <= 0.0:
            raise InvalidStateError("steering witness needs positive probability")
        if self.bob_coherence <= 0.0:
            raise InvalidStateError("steering witness needs a coherent post-state")
        if not is_incoherent_operator(self.kraus_op):
            raise InvalidStateError("steering operator must be incoherent")


def _bob_fidelity(state: DensityMatrix, psi: PureState, bob_index: int) -> float:
    bob = partial_trace(state, {bob_index})
    return float(np.real(psi.vec.conj() @ bob.mat @ psi.vec))


def incoherent_teleport(psi: PureState) -> ProtocolResult:
    """Teleport an unknown qubit using one maximally entangled pair and two
    classical bits, with both parties restricted to incoherent instruments.

    Subsystem order is (A', A, B): A' carries the input, (A, B) the shared
    pair.  Alice's four Kraus operators |00><phi_i| are incoherent in her
    two-qubit basis; Bob's corrections are Pauli operators.  Every branch
    has probability 1/4 and leaves Bob holding the input state exactly.
    """
    if psi.dims != (2,):
        raise DimensionMismatchError("teleportation input must be a single qubit")
    pair = bell_states()[0]
    total = psi.tensor(pair)

    zero2 = np.kron(ket(0, 2), ket(0, 2))
    alice_ops = tuple(np.outer(zero2, phi.vec.conj()) for phi in bell_states())
    alice = KrausChannel(alice_ops, (2, 2), (2, 2))
    corrections = (
        np.eye(2, dtype=complex),
        SIGMA_Z,
        SIGMA_X,
        SIGMA_X @ SIGMA_Z,
    )
    branches = tuple(
        ProtocolRound("B", KrausChannel((corr,), (2,), (2,)), None)
        for corr in corrections
    )
    protocol = LocalProtocol(
        a_dims=(2, 2),
        b_dims=(2,),
        root=ProtocolRound("A", alice, branches),
        incoherent_parties=frozenset({"A", "B"}),
    )
    leaves = protocol.run(total.to_density())
    fidelities = [_bob_fidelity(state, psi, 2) for _, state, _ in leaves]
    metrics = {
        "min_fidelity": min(fidelities),
        "mean_fidelity": float(np.mean(fidelities)),
        "max_probability_error": max(abs(p - 0.25) for p, _, _ in leaves),
    }
    return ProtocolResult(tuple(leaves), metrics, details={"protocol": protocol})


def _ensemble_average(ensemble) -> np.ndarray:
    return sum(p * np.outer(s.vec, s.vec.conj()) for p, s in ensemble)


def assisted_distill_pure(
    psi: PureState,
    ensemble: list[tuple[float, PureState]] | None = None,
    budget: int = 16,
    seed: int = 0,
) -> ProtocolResult:
    """Single-copy assisted distillation on a bipartite pure state.

    Writes psi = sum_i sqrt(p_i) |e_i>^A |psi_i>^B for the supplied Bob
    ensemble (default: the one found by ``coherence_of_assistance`` on
    Bob's marginal), measures Alice with the incoherent operators
    K_i = |i><e_i| and reports the average post-measurement coherence on
    Bob's side, which equals the ensemble's average coherence.
    """
    if len(psi.dims) != 2:
        raise DimensionMismatchError("assisted distillation needs a bipartite pure state")
    da, db = psi.dims
    rho_b = partial_trace(psi.to_density(), {1})
    if ensemble is None:
        _, ensemble = coherence_of_assistance(rho_b, budget=budget, seed=seed)
    gap = np.abs(_ensemble_average(ensemble) - rho_b.mat).max()
    if gap > 1e-8:
        raise EnsembleMismatchError(
            f"ensemble average deviates from Bob's state by {gap:.3e} > 1e-8"
        )

    # Schmidt data: psi_ab = sum_k u_k s_k vh_kb.
    m = psi.vec.reshape(da, db)
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    keep = s > 1e-12
    u, s, vh = u[:, keep], s[keep], vh[keep, :]
    lam = s**2
    r = lam.size

    # Transition matrix from the Schmidt ensemble to the supplied one;
    # exact ensembles give an isometry, which we enforce by polar correction.
    probs = np.array([p for p, _ in ensemble])
    members = np.array([st.vec for _, st in ensemble])
    w = (np.sqrt(probs)[:, None] * (members @ vh.conj().T)) / s[None, :]
    gram = w.conj().T @ w
    gw, vw = np.linalg.eigh(gram)
    w = w @ (vw / np.sqrt(np.maximum(gw, 1e-30))) @ vw.conj().T

    n = len(ensemble)
    alice_vectors = [u @ w[i, :].conj() for i in range(n)]
    # Complete with the orthogonal complement of the Schmidt span (those
    # outcomes never fire on psi).
    if r < da:
        full = np.linalg.qr(
            np.concatenate([u, np.random.default_rng(0).standard_normal((da, da - r))], axis=1)
        )[0]
        alice_vectors += [full[:, r + j] for j in range(da - r)]
    n_out = len(alice_vectors)
    ops = tuple(
        np.outer(ket(i, n_out), vec.conj()) for i, vec in enumerate(alice_vectors)
    )
    instrument = KrausChannel(ops, (da,), (n_out,))
    if not instrument.is_incoherent():
        raise InvalidStateError("distillation instrument must be incoherent")

    # Alice's outcome space is larger than her input space, so embed her
    # operators with identity on Bob and expand by hand.
    joint = psi.to_density()
    leaves = []
    for i, op in enumerate(ops):
        embedded = np.kron(op, np.eye(db))
        post = embedded @ joint.mat @ embedded.conj().T
        p = float(np.trace(post).real)
        if p > 1e-12:
            leaves.append((p, DensityMatrix(post / p, (n_out, db)), (("A", i),)))
    total = sum(p for p, _, _ in leaves)
    leaves = [(p / total, st, t) for p, st, t in leaves]

    bob_cohs = [c_r(partial_trace(state, {1})) for _, state, _ in leaves]
    average = float(sum(p * coh for (p, _, _), coh in zip(leaves, bob_cohs)))
    supplied_average = float(sum(p * c_r(st.to_density()) for p, st in ensemble))
    metrics = {
        "average_coherence": average,
        "supplied_ensemble_average": supplied_average,
        "bob_dephased_entropy": von_neumann_entropy(dephase(rho_b, range(rho_b.n_subsystems))),
    }
    return ProtocolResult(tuple(leaves), metrics, details={"instrument": instrument})


def assisted_distill_mc(rho: DensityMatrix, u: np.ndarray | None = None) -> ProtocolResult:
    """Assisted distillation for states maximally correlated in the
    incoherent basis (optionally twisted by a local unitary on A).

    Alice measures in a mutually orthogonal maximally coherent basis
    (composed with U' when supplied); every outcome leaves Bob with
    coherence S(dephase_B(rho)) - S(rho), and the diagonal unitary mapping
    each outcome to the canonical coefficient state is recorded.
    """
    if len(rho.dims) != 2 or rho.dims[0] != rho.dims[1]:
        raise NotMaximallyCorrelatedError("state must live on a (d, d) system")
    d = rho.dims[0]
    mat = rho.mat
    if u is not None:
        u = np.asarray(u, dtype=complex)
        full = np.kron(u.conj().T, np.eye(d))
        mat = full @ mat @ full.conj().T
    # Coefficients on the |ii> subspace must reproduce the state.
    coeffs = np.zeros((d, d), dtype=complex)
    for i in range(d):
        for j in range(d):
            coeffs[i, j] = mat[i * d + i, j * d + j]
    rebuilt = np.zeros_like(mat)
    for i in range(d):
        for j in range(d):
            rebuilt[i * d + i, j * d + j] = coeffs[i, j]
    residual = trace_norm(mat - rebuilt)
    if residual > 1e-9:
        raise NotMaximallyCorrelatedError(
            f"state leaks off the diagonal subspace by {residual:.3e} > 1e-9"
        )

    basis = fourier_mc_basis(d)
    target = float(
        von_neumann_entropy(dephase(rho, (1,))) - von_neumann_entropy(rho)
    )
    ops = []
    for j, psi_j in enumerate(basis):
        op = np.outer(ket(j, d), psi_j.vec.conj())
        if u is not None:
            op = op @ u.conj().T
        ops.append(op)
    instrument = KrausChannel(tuple(ops), (d,), (d,))

    leaves = []
    unitaries = []
    coherences = []
    for j, op in enumerate(instrument.ops):
        full = np.kron(op, np.eye(d))
        post = full @ rho.mat @ full.conj().T
        p = float(np.trace(post).real)
        state = DensityMatrix(post / p, (d, d))
        bob = partial_trace(state, {1})
        coherences.append(c_r(bob))
        phases = np.angle(basis[j].vec * math.sqrt(d))
        unitaries.append(np.diag(np.exp(1j * phases)))
        leaves.append((p, state, (("A", j),)))
    metrics = {
        "target_coherence": target,
        "min_outcome_coherence": min(coherences),
        "max_outcome_coherence": max(coherences),
        "max_deviation": max(abs(c - target) for c in coherences),
    }
    return ProtocolResult(
        tuple(leaves),
        metrics,
        details={"incoherent_unitaries": unitaries, "instrument": instrument},
    )


def _offdiag_mass(mat: np.ndarray) -> float:
    return float(np.abs(mat - np.diag(np.diag(mat))).max())


def _golden_refine(f, lo: float, hi: float, iters: int = 60):
    """Golden-section maximization of f on [lo, hi]."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c, d = b - inv_phi * (b - a), a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    x = (a + b) / 2.0
    return x, f(x)


def find_steering_measurement(
    rho: DensityMatrix,
    theta_grid: int = 64,
    coherence_tol: float = 1e-8,
    probability_tol: float = 1e-10,
) -> SteeringWitness | None:
    """Search for an incoherent Alice measurement outcome that leaves Bob
    coherent.

    Decomposes rho = sum_ij |e_i><e_j| x N_ij in the eigenbasis of Alice's
    marginal.  A coherent diagonal block N_ii gives the witness |i><e_i|
    directly; otherwise coherent off-diagonal blocks are converted via
    projectors onto cos(theta)|e_k> + sin(theta)|e_l> (or the i-phased
    variant), scanning theta on a grid with golden-section refinement.
    Returns None exactly when no outcome exceeds the tolerances, i.e. when
    rho is quantum-incoherent up to numerics.
    """
    if len(rho.dims) != 2:
        raise DimensionMismatchError("steering search needs a bipartite state")
    da, db = rho.dims
    rho_a = partial_trace(rho, {0})
    w, e = np.linalg.eigh(rho_a.mat)
    e = e[:, ::-1]  # descending order, deterministic canonical basis

    tensor = rho.mat.reshape(da, db, da, db)
    blocks = np.einsum("ai,abcd,cj->ijbd", e.conj(), tensor, e)

    def witness_from_vector(vec: np.ndarray) -> SteeringWitness | None:
        post = np.einsum("a,abcd,c->bd", vec.conj(), tensor, vec)
        p = float(np.trace(post).real)
        if p <= probability_tol:
            return None
        bob = DensityMatrix(post / p, (db,))
        coherence = c_r(bob)
        if coherence <= coherence_tol:
            return None
        return SteeringWitness(
            kraus_op=np.outer(ket(0, da), vec.conj()),
            probability=p,
            bob_post_state=bob,
            bob_coherence=coherence,
        )

    # Diagonal blocks first.
    for i in range(da):
        if _offdiag_mass(blocks[i, i]) > coherence_tol:
            witness = witness_from_vector(e[:, i])
            if witness is not None:
                return witness

    # Off-diagonal blocks via the two Hermitian combinations.
    def post_coherence(vec: np.ndarray) -> float:
        post = np.einsum("a,abcd,c->bd", vec.conj(), tensor, vec)
        p = float(np.trace(post).real)
        if p <= probability_tol:
            return -1.0
        return c_r(DensityMatrix(post / p, (db,)))

    thetas = np.linspace(0.0, math.pi / 2.0, theta_grid + 2)[1:-1]
    for k in range(da):
        for l in range(k + 1, da):
            n_kl = blocks[k, l]
            p_comb = n_kl + n_kl.conj().T
            q_comb = 1j * (n_kl - n_kl.conj().T)
            for comb, phase in ((p_comb, 1.0), (q_comb, 1.0j)):
                if _offdiag_mass(comb) <= coherence_tol:
                    continue

                def vec_of(theta: float) -> np.ndarray:
                    return math.cos(theta) * e[:, k] + phase * math.sin(theta) * e[:, l]

                scores = [post_coherence(vec_of(t)) for t in thetas]
                best = int(np.argmax(scores))
                if scores[best] <= coherence_tol:
                    continue
                lo = thetas[max(0, best - 1)]
                hi = thetas[min(len(thetas) - 1, best + 1)]
                theta, _ = _golden_refine(lambda t: post_coherence(vec_of(t)), lo, hi)
                witness = witness_from_vector(vec_of(theta))
                if witness is not None:
                    return witness
    return None


def sqi_to_si_reduce(ch: ProductKrausChannel) -> ProductKrausChannel:
    """Turn an SQI product channel into an SI one with the same reduced
    state on Bob, by pinching Alice's output in the incoherent basis:
    the new pairs are (|j><j| A_i, B_i) over all outcomes i and labels j."""
    if not classify(ch).separable_quantum_incoherent:
        raise NotSQIError("channel is not separable quantum-incoherent")
    d_a_out = math.prod(ch.a_out_dims)
    pairs = []
    for a_op, b_op in ch.pairs:
        for j in range(d_a_out):
            proj = np.zeros((d_a_out, d_a_out), dtype=complex)
            proj[j, j] = 1.0
            pairs.append((proj @ a_op, b_op))
    reduced = ProductKrausChannel(
        tuple(pairs), ch.a_in_dims, ch.b_in_dims, ch.a_out_dims, ch.b_out_dims
    )
    if not classify(reduced).separable_incoherent:
        raise NotSIError("pinched channel failed the SI check")
    return reduced


def ancilla_reduce(ch_tilde: ProductKrausChannel, ancilla_dims: tuple[int, int]) -> ProductKrausChannel:
    """Strip incoherent ancillas off an SI channel.

    ``ch_tilde`` acts on (A, A') x (B, B') with the ancilla as the last
    subsystem of each party, prepared in |0>.  The returned SI channel on
    A x B reproduces Tr_{A'B'}[ch_tilde(rho x |0><0| x |0><0|)] exactly,
    with operator entries A_kl = (1 x <l|) A~_k (1 x |0>) and likewise on B.
    """
    if not classify(ch_tilde).separable_incoherent:
        raise NotSIError("extended channel is not separable incoherent")
    da_anc, db_anc = (int(d) for d in ancilla_dims)
    if len(ch_tilde.a_in_dims) < 2 or ch_tilde.a_in_dims[-1] != da_anc:
        raise DimensionMismatchError("party A dims must end with the ancilla dimension")
    if len(ch_tilde.b_in_dims) < 2 or ch_tilde.b_in_dims[-1] != db_anc:
        raise DimensionMismatchError("party B dims must end with the ancilla dimension")
    da = math.prod(ch_tilde.a_in_dims) // da_anc
    db = math.prod(ch_tilde.b_in_dims) // db_anc

    pairs = []
    for a_tilde, b_tilde in ch_tilde.pairs:
        a_tensor = a_tilde.reshape(da, da_anc, da, da_anc)
        b_tensor = b_tilde.reshape(db, db_anc, db, db_anc)
        a_parts = [a_tensor[:, l, :, 0] for l in range(da_anc)]
        b_parts = [b_tensor[:, m, :, 0] for m in range(db_anc)]
        for a_part in a_parts:
            for b_part in b_parts:
                pairs.append((a_part, b_part))
    reduced = ProductKrausChannel(
        tuple(pairs),
        ch_tilde.a_in_dims[:-1],
        ch_tilde.b_in_dims[:-1],
    )
    if not classify(reduced).separable_incoherent:
        raise NotSIError("reduced channel failed the SI check")
    return reduced


def extend_with_ancillas(rho: DensityMatrix, ancilla_dims: tuple[int, int]) -> DensityMatrix:
    """Attach |0> ancillas to each party of a bipartite state, ordering the
    result as (A, A', B, B')."""
    if len(rho.dims) != 2:
        raise DimensionMismatchError("ancilla extension expects a bipartite (A, B) state")
    da_anc, db_anc = (int(d) for d in ancilla_dims)
    zero_a = np.zeros((da_anc, da_anc), dtype=complex)
    zero_a[0, 0] = 1.0
    zero_b = np.zeros((db_anc, db_anc), dtype=complex)
    zero_b[0, 0] = 1.0
    extended = DensityMatrix(
        np.kron(np.kron(rho.mat, zero_a), zero_b),
        rho.dims + (da_anc, db_anc),
    )
    # (A, B, A', B') -> (A, A', B, B')
    return permute_subsystems(extended, (0, 2, 1, 3))


def domino_discrimination_channel() -> ProductKrausChannel:
    """Separable incoherent channel whose outcome pairs are
    (|i><alpha_i|, |i><beta_i|): it identifies the nine domino states and
    records the result in an incoherent flag on each side."""
    family = domino_states()
    pairs = []
    for i in range(9):
        a_op = np.outer(ket(i, 9), family.alpha_parts[i].conj())
        b_op = np.outer(ket(i, 9), family.beta_parts[i].conj())
        pairs.append((a_op, b_op))
    return ProductKrausChannel(tuple(pairs), (3,), (3,), (9,), (9,))


def discriminate_domino(input_index: int) -> ProtocolResult:
    """Run the domino discrimination channel on the chosen domino state
    (1-based index).  The matching outcome fires with probability one and
    leaves the flag state |jj>."""
    if not 1 <= input_index <= 9:
        raise DimensionMismatchError(f"input index must be 1..9, got {input_index}")
    family = domino_states()
    channel = domino_discrimination_channel()
    state = family.states[input_index - 1].to_density()
    outcomes = channel.apply_instrument(state)
    leaves = tuple((o.probability, o.state, (("AB", o.outcome),)) for o in outcomes)
    target = input_index - 1
    p_correct = sum(o.probability for o in outcomes if o.outcome == target)
    flags = classify(channel)
    metrics = {
        "success_probability": p_correct,
        "n_outcomes_fired": float(len(outcomes)),
        "si": float(flags.separable_incoherent),
        "sqi": float(flags.separable_quantum_incoherent),
    }
    return ProtocolResult(leaves, metrics, details={"channel": channel})


@dataclass(frozen=True, eq=False)
class MergingWitnessResult:
    """The two QI relative entropies of the merging state, the verdict that
    the R|AB value strictly exceeds the RB|A value, and the residual of the
    explicit SQI merge simulation."""

    qire_r_ab: MeasureReport
    qire_rb_a: MeasureReport
    verdict: bool
    merge_residual: float


def merging_witness() -> MergingWitnessResult:
    """Evaluate the single-shot merging witness on the flagged domino
    mixture.

    Computes the QI relative entropy for the R|AB and RB|A splits (8/9 and
    4/9), asserts the first exceeds the second, and simulates the explicit
    SQI merge K_ij = |alpha_i><alpha_i| x |beta_i><j| x |0><beta_i| that
    moves Bob's share into Alice's register, checking the final (R, A, A')
    state reproduces the input with B relabeled to A'.
    """
    rho = merging_state()
    split_r_ab = Bipartition(a=(0,), b=(1, 2))
    split_rb_a = Bipartition(a=(0, 2), b=(1,))
    val_r_ab = qi_relative_entropy(rho, split_r_ab)
    val_rb_a = qi_relative_entropy(rho, split_rb_a)
    report_r_ab = MeasureReport(
        "qi_relative_entropy", val_r_ab, {"state": "merging", "split": "R|AB"}
    )
    report_rb_a = MeasureReport(
        "qi_relative_entropy", val_rb_a, {"state": "merging", "split": "RB|A"}
    )

    # Extended input (R, A, A', B) with Alice's register A' in |0>.
    zero3 = np.zeros((3, 3), dtype=complex)
    zero3[0, 0] = 1.0
    extended = DensityMatrix(np.kron(rho.mat, zero3), (9, 3, 3, 3))
    extended = permute_subsystems(extended, (0, 1, 3, 2))

    family = domino_states()
    ops = []
    for i in range(9):
        alpha, beta = family.alpha_parts[i], family.beta_parts[i]
        proj_alpha = np.outer(alpha, alpha.conj())
        bob_op = np.outer(ket(0, 3), beta.conj())
        for j in range(3):
            store = np.outer(beta, ket(j, 3).conj())
            ops.append(np.kron(np.eye(9), np.kron(proj_alpha, np.kron(store, bob_op))))
    merge = KrausChannel(tuple(ops), (9, 3, 3, 3), (9, 3, 3, 3))
    final = merge.apply(extended)
    final_raa = partial_trace(final, {0, 1, 2})
    residual = trace_norm(final_raa.mat - rho.mat)

    return MergingWitnessResult(
        qire_r_ab=report_r_ab,
        qire_rb_a=report_rb_a,
        verdict=bool(val_r_ab > val_rb_a),
        merge_residual=float(residual),
    )
