"""Acceptance checks behind the ``verify-all`` command.

Each check is a pure function returning a CriterionResult; ``run_all``
executes them in order with per-check seeds derived from one root seed and
appends the wall-time gate.  The same functions back the pytest acceptance
suite, so the CLI and the tests cannot drift apart.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .channel import (
    apply_channel,
    compression_mixture_channel,
    geometric_weights,
    pinching_channel,
    verify_channel,
)
from .expectation import MasaPartition, check_reduction, parse_blocks
from .idempotent import (
    idempotent_canonical,
    oblique_projection,
    random_idempotent,
    self_adjoint_defect,
)
from .linalg import haar_unitary, operator_norm
from .numrange import (
    OperatorModel,
    disc_in_nr,
    nr_boundary,
    nr_ellipse_2x2,
    optimal_disc_parameter,
    range_circle,
)
from .pinching import (
    hermitian_orbit_distance,
    realize_diagonal,
    realize_normal_blocks,
    strong_approx,
    two_orbit_average,
)

THREE_CYCLE = np.array([[0, 0, 1], [1, 0, 0], [0, 1, 0]], dtype=complex)


@dataclass(frozen=True)
class CriterionResult:
    index: int
    name: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag}  [{self.index:2d}] {self.name:<24s} ({self.seconds:7.3f} s)  {self.detail}"

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "name": self.name,
            "passed": self.passed,
            "detail": self.detail,
            "seconds": self.seconds,
        }


def hausdorff_distance(pts1, pts2) -> float:
    """Symmetric Hausdorff distance between two finite complex point sets."""
    pts1 = np.asarray(pts1, dtype=complex).reshape(-1)
    pts2 = np.asarray(pts2, dtype=complex).reshape(-1)
    dist = np.abs(pts1[:, None] - pts2[None, :])
    return float(max(dist.min(axis=1).max(), dist.min(axis=0).max()))


def _rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, index])


def _timed(index: int, name: str, fn) -> CriterionResult:
    start = time.perf_counter()
    passed, detail = fn()
    return CriterionResult(
        index=index,
        name=name,
        passed=passed,
        detail=detail,
        seconds=time.perf_counter() - start,
    )


def check_optimal_constant() -> CriterionResult:
    """Numeric minimizer of the disc-parameter curve vs the documented triple.

    The documented triple (r^2 = sqrt(5)-2, a^2 = 4+2 sqrt(5),
    norm = sqrt(5+2 sqrt(5))) lies on the curve a(r) = (1+r^2)/(r sqrt(1-r^2))
    but does not minimize it; the honest minimizer lands at r^2 = 1/3,
    a^2 = 8, norm 3, so this check fails by construction.  See the
    disc-threshold check for the minimality property itself.
    """

    def body():
        start = time.perf_counter()
        opt = optimal_disc_parameter()
        elapsed = time.perf_counter() - start
        ref_r2 = float(np.sqrt(5.0) - 2.0)
        ref_a2 = float(4.0 + 2.0 * np.sqrt(5.0))
        ref_norm = float(np.sqrt(5.0 + 2.0 * np.sqrt(5.0)))
        a2 = opt.a_star_numeric**2
        norm_num = float(np.sqrt(1.0 + a2))
        agree = (
            abs(opt.r_star_sq_numeric - ref_r2) <= 1e-9
            and abs(a2 - ref_a2) <= 1e-9
            and abs(norm_num - ref_norm) <= 1e-9
        )
        fast = elapsed < 0.1
        detail = (
            f"numeric minimum a^2={a2:.9f} at r^2={opt.r_star_sq_numeric:.9f} "
            f"(norm {norm_num:.9f}) vs reference a^2={ref_a2:.9f}, "
            f"r^2={ref_r2:.9f} (norm {ref_norm:.9f}); runtime {elapsed * 1e3:.1f} ms"
        )
        if not agree:
            detail += (
                "; reference point lies on a(r) but is not its minimum"
                f" (a({np.sqrt(ref_r2):.6f})={np.sqrt(ref_a2):.6f}"
                f" > min a = {opt.a_star_numeric:.6f})"
            )
        return agree and fast, detail

    return _timed(1, "optimal-constant", body)


def check_disc_threshold() -> CriterionResult:
    """Unit-disc containment flips exactly at the computed optimal parameter."""

    def body():
        opt = optimal_disc_parameter()
        hi = disc_in_nr(oblique_projection(opt.a_star * (1 + 1e-3)), 1.0, 10_000)
        lo = disc_in_nr(oblique_projection(opt.a_star * (1 - 1e-3)), 1.0, 10_000)
        center, radius = range_circle(opt.a_star, float(np.sqrt(opt.r_star_sq)))
        touch_gap = abs(abs(-1.0 - center) - radius)
        ok = hi and not lo and touch_gap <= 1e-9
        return ok, (
            f"contains at a*(1+1e-3): {hi}; at a*(1-1e-3): {lo}; "
            f"-1 off the critical circle by {touch_gap:.2e}"
        )

    return _timed(2, "disc-threshold", body)


def check_ellipse_oracle(seed: int) -> CriterionResult:
    """Support sweep agrees with the exact 2x2 elliptical range."""

    def body():
        rng = _rng(seed, 3)
        worst = 0.0
        for _ in range(100):
            a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            sweep = nr_boundary(a, 720)
            ellipse = nr_ellipse_2x2(a)
            gap = hausdorff_distance(
                sweep.points, ellipse.boundary_points(sweep.thetas)
            )
            worst = max(worst, gap / (1.0 + operator_norm(a)))
        return worst <= 1e-6, f"worst scaled Hausdorff gap {worst:.2e} over 100 matrices"

    return _timed(3, "ellipse-oracle", body)


def _random_diagonal_values(rng: np.random.Generator, n: int) -> np.ndarray:
    moduli = rng.uniform(0.0, 0.99, size=n)
    phases = np.exp(2j * np.pi * rng.uniform(size=n))
    return moduli * phases


def _random_normal_blocks(rng: np.random.Generator) -> list[np.ndarray]:
    blocks = []
    for _ in range(int(rng.integers(1, 4))):
        size = int(rng.integers(1, 4))
        eigs = _random_diagonal_values(rng, size)
        basis = haar_unitary(size, rng)
        blocks.append((basis * eigs) @ basis.conj().T)
    return blocks


def _spectrum_gap(plan) -> float:
    conj = plan.conjugated()
    eigs = np.sort_complex(np.linalg.eigvals(conj))
    half = conj.shape[0] // 2
    expected = np.concatenate([np.zeros(half), np.ones(half)])
    return float(np.max(np.abs(eigs - expected)))


def check_realization(seed: int) -> CriterionResult:
    """Prescribed diagonals and normal blocks are realized exactly."""

    def body():
        rng = _rng(seed, 4)
        worst_entry = worst_unit = worst_spec = 0.0
        for _ in range(100):
            values = _random_diagonal_values(rng, int(rng.integers(1, 17)))
            plan = realize_diagonal(values)
            n = len(values)
            worst_entry = max(
                worst_entry, float(np.max(np.abs(np.diag(plan.realized)[:n] - values)))
            )
            worst_unit = max(
                worst_unit,
                operator_norm(
                    plan.unitary @ plan.unitary.conj().T - np.eye(plan.ambient_dim)
                ),
            )
            worst_spec = max(worst_spec, _spectrum_gap(plan))
        for _ in range(20):
            blocks = _random_normal_blocks(rng)
            plan = realize_normal_blocks(blocks)
            offset = 0
            for block in blocks:
                size = block.shape[0]
                idx = np.arange(offset, offset + size)
                realized = plan.realized[np.ix_(idx, idx)]
                worst_entry = max(worst_entry, operator_norm(realized - block))
                offset += size
            worst_unit = max(
                worst_unit,
                operator_norm(
                    plan.unitary @ plan.unitary.conj().T - np.eye(plan.ambient_dim)
                ),
            )
            worst_spec = max(worst_spec, _spectrum_gap(plan))
        ok = worst_entry <= 1e-10 and worst_unit <= 1e-10 and worst_spec <= 1e-8
        return ok, (
            f"worst prescribed-entry error {worst_entry:.2e}, unitarity "
            f"{worst_unit:.2e}, spectrum gap {worst_spec:.2e}"
        )

    return _timed(4, "realization-exactness", body)


def check_averaging(seed: int) -> CriterionResult:
    """Two-unitary averages are exactly block diagonal for every plan."""

    def body():
        rng = _rng(seed, 5)
        worst_off = worst_identity = 0.0
        for trial in range(40):
            if trial % 2 == 0:
                plan = realize_diagonal(
                    _random_diagonal_values(rng, int(rng.integers(1, 9)))
                )
            else:
                plan = realize_normal_blocks(_random_normal_blocks(rng))
            u, v, average = two_orbit_average(plan)
            n = len(plan.prescribed_positions)
            worst_off = max(
                worst_off,
                operator_norm(average[:n, n:]),
                operator_norm(average[n:, :n]),
            )
            ambient = plan.ambient()
            recomputed = (
                u @ ambient @ u.conj().T + v @ ambient @ v.conj().T
            ) / 2.0
            worst_identity = max(worst_identity, operator_norm(recomputed - average))
        ok = worst_off <= 1e-10 and worst_identity <= 1e-10
        return ok, (
            f"worst off-diagonal block {worst_off:.2e}, worst identity residual "
            f"{worst_identity:.2e} over 40 plans"
        )

    return _timed(5, "averaging-identity", body)


def check_alignment() -> CriterionResult:
    """Per-column alignment errors vanish exactly on covered column supports."""

    def body():
        rng = _rng(0, 6)
        checked = violations = 0
        for m in (4, 6, 9):
            bands = [
                np.diag(rng.normal(size=m)).astype(complex),
                (
                    np.diag(rng.normal(size=m))
                    + np.diag(rng.normal(size=m - 1), 1)
                    + np.diag(rng.normal(size=m - 1), -1)
                ).astype(complex),
                rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m)),
            ]
            t = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
            for x in bands:
                for n in range(0, m + 1):
                    errors = strong_approx(x, t, n).errors
                    for j in range(m):
                        if not np.any(x[n:, j]):
                            checked += 1
                            if errors[j] != 0.0:
                                violations += 1
        return violations == 0, f"{checked} covered columns, {violations} nonzero errors"

    return _timed(6, "alignment-exactness", body)


def check_obstruction() -> CriterionResult:
    """Spectral distance from the half-identity to the doubled cycle model is 3/2."""

    def body():
        model = OperatorModel(
            exceptional=np.zeros((0, 0)), repeated=THREE_CYCLE, scale=2.0
        )
        ambient = model.truncation(4)
        herm = (ambient + ambient.conj().T) / 2.0
        dist = hermitian_orbit_distance(herm, 0.5 * np.eye(12))
        gap = abs(dist - 1.5)
        return gap <= 1e-12, (
            f"distance {dist!r} (Hermitian part has eigenvalues 2 and -1; "
            f"gap to 3/2 is {gap:.2e})"
        )

    return _timed(7, "orbit-obstruction", body)


def _random_partition(rng: np.random.Generator, dim: int) -> MasaPartition:
    order = [int(i) for i in rng.permutation(dim)]
    blocks, pos = [], 0
    while pos < dim:
        size = int(rng.integers(1, dim - pos + 1))
        blocks.append(tuple(order[pos : pos + size]))
        pos += size
    return MasaPartition(dim=dim, blocks=tuple(blocks))


def check_expectation_reduction(seed: int) -> CriterionResult:
    """Numerical range of a pinching stays inside the original range."""

    def body():
        rng = _rng(seed, 8)
        failures = 0
        worst = -np.inf
        for _ in range(500):
            dim = int(rng.integers(1, 9))
            z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
            masa = _random_partition(rng, dim)
            report = check_reduction(z, masa, samples=32, rng=rng)
            worst = max(worst, report.worst_excess)
            failures += 0 if report.passed else 1
        return failures == 0, (
            f"{failures} violations over 500 pairs, worst excess {worst:.2e}"
        )

    return _timed(8, "expectation-reduction", body)


def check_idempotent_suite(seed: int) -> CriterionResult:
    """Canonical reconstruction, norm law, and the defect inequality."""

    def body():
        rng = _rng(seed, 9)
        worst_rec = worst_norm = 0.0
        counterexamples = 0
        for _ in range(500):
            gen = random_idempotent(rng, max_dim=12)
            form = idempotent_canonical(gen.matrix)
            residual = operator_norm(
                form.basis.conj().T @ gen.matrix @ form.basis - form.canonical_matrix()
            )
            worst_rec = max(
                worst_rec, residual / (1.0 + operator_norm(gen.matrix))
            )
            worst_norm = max(
                worst_norm, abs(operator_norm(gen.matrix) - form.norm())
            )
            if not self_adjoint_defect(gen.matrix).holds:
                counterexamples += 1
        ok = worst_rec <= 1e-9 and worst_norm <= 1e-9 and counterexamples == 0
        return ok, (
            f"worst reconstruction {worst_rec:.2e}, worst norm-law gap "
            f"{worst_norm:.2e}, {counterexamples} defect counterexamples"
        )

    return _timed(9, "idempotent-suite", body)


def check_channel_suite(seed: int) -> CriterionResult:
    """Pinching channel fully verifies; the mixture reproduces its target and
    exhibits the expected finite-size trace failure with a structured witness."""

    def body():
        rng = _rng(seed, 10)
        masa = parse_blocks("1,2;3;4,5,6")
        pinch_report = verify_channel(pinching_channel(masa), trials=50, rng=rng)
        pinch_ok = (
            pinch_report.unital
            and pinch_report.trace_preserving
            and pinch_report.choi_min_eigenvalue >= -1e-9
            and pinch_report.declared_ok
        )

        values = np.array([0.5, -0.5j, 0.3 + 0.2j])
        plans = [
            realize_diagonal(values),
            realize_normal_blocks([np.diag(values)]),
            realize_normal_blocks([np.diag(values[:1]), np.diag(values[1:])]),
        ]
        mixture = compression_mixture_channel(plans, geometric_weights(3))
        reproduction = operator_norm(
            apply_channel(mixture, plans[0].ambient()) - np.diag(values)
        )
        mix_report = verify_channel(mixture, trials=50, rng=rng)
        witness_ok = (
            not mix_report.trace_preserving
            and mix_report.trace_witness is not None
            and mix_report.trace_witness.get("type") == "matrix_unit"
        )
        mix_ok = (
            mix_report.unital
            and mix_report.choi_min_eigenvalue >= -1e-9
            and mix_report.declared_ok
            and reproduction <= 1e-10
            and witness_ok
        )
        return pinch_ok and mix_ok, (
            f"pinching ok: {pinch_ok}; mixture unital/CP ok: "
            f"{mix_report.unital and mix_report.choi_min_eigenvalue >= -1e-9}, "
            f"reproduction {reproduction:.2e}, trace failure witnessed by "
            f"{mix_report.trace_witness} (violation {mix_report.trace_worst_violation:.3f})"
        )

    return _timed(10, "channel-suite", body)


def run_all(seed: int = 7, echo=None) -> list[CriterionResult]:
    """Run every acceptance check; the final entry is the wall-time gate."""
    checks = [
        check_optimal_constant,
        check_disc_threshold,
        lambda: check_ellipse_oracle(seed),
        lambda: check_realization(seed),
        lambda: check_averaging(seed),
        check_alignment,
        check_obstruction,
        lambda: check_expectation_reduction(seed),
        lambda: check_idempotent_suite(seed),
        lambda: check_channel_suite(seed),
    ]
    results = []
    start = time.perf_counter()
    for fn in checks:
        result = fn()
        results.append(result)
        if echo:
            echo(result.line())
    total = time.perf_counter() - start
    timing = CriterionResult(
        index=11,
        name="wall-time",
        passed=total < 60.0,
        detail=f"total {total:.2f} s (budget 60 s, single-threaded)",
        seconds=total,
    )
    results.append(timing)
    if echo:
        echo(timing.line())
        failed = [r.index for r in results if not r.passed]
        echo(
            f"{sum(r.passed for r in results)}/{len(results)} checks passed"
            + (f"; failing: {failed}" if failed else "")
        )
    return results
