"""Built-in self-checks with machine-parseable reports.

Every check measures one residual against one tolerance and also
declares the outcome it is *expected* to produce at the reference
working point.  Some expectations are deliberately FAIL: the executed
model is known to break commutator preservation and symplectic
positivity once the anomalous ground-coherence coupling and dephasing
are both switched on (see the project notes for the full account), and
the verification suite asserts that this documented state of affairs
still holds.  A check whose outcome differs from its expectation is a
genuine verification failure either way: an expected-FAIL check that
suddenly passes means the model changed underneath us.

The checks isolate the mechanism with controls:

* with the coupling off, propagation is a pure phase and commutators
  are exact to rounding;
* with the direct (as-printed) coupling and no dephasing, the diffusion
  table balances the damping exactly (residual ~1e-9 across the band);
* doubling the diffusion table must break that balance (fault
  injection);
* at the reference point with the anomalous coupling, the imbalance is
  amplified by the phase-matched gain around zero frequency.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import PhysicalParams, reference_params
from .steady_state import steady_state, dark_state_sigma
from . import langevin
from . import propagation
from . import entanglement


@dataclass(frozen=True)
class CheckReport:
    name: str
    scope: str
    residual: float
    tolerance: float
    expected_pass: bool = True

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance

    @property
    def surprising(self) -> bool:
        return self.passed != self.expected_pass

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        note = "" if not self.surprising else " UNEXPECTED"
        return (f"CHECK {self.name} residual={self.residual:.6e} "
                f"tol={self.tolerance:.1e} {status}"
                f" (expected {'PASS' if self.expected_pass else 'FAIL'})"
                f"{note} [{self.scope}]")


#: frequencies for the integrator cross-check, chosen away from the
#: optical resonances of both the direct and the mirrored sector so the
#: fixed-step oracle is itself accurate there
ORACLE_POINTS = tuple(np.concatenate([np.linspace(-3000.0, -1700.0, 8),
                                      np.linspace(-300.0, 1000.0, 8)]))

COMMUTATOR_GRID = tuple(np.linspace(-3000.0, 1000.0, 64))


def _worst_commutator_dev(p, ss, two_d, omegas, coupling) -> float:
    worst = 0.0
    for om in omegas:
        sol = propagation.transfer(om, p, ss, two_d, coupling=coupling)
        n = len(sol.modes)
        j0 = np.diag([1.0] * n + [-1.0] * n)
        worst = max(worst, float(np.max(np.abs(
            propagation.output_commutators(sol) - j0))))
    return worst


def check_commutators(p: PhysicalParams | None = None) -> list[CheckReport]:
    if p is None:
        p = reference_params()
    reports = []

    free = p.with_(coupling_scale=0.0)
    ss = steady_state(free)
    two_d = langevin.diffusion_matrix(free, ss)
    reports.append(CheckReport(
        name="commutators_free_propagation",
        scope="coupling off, 5 frequencies",
        residual=_worst_commutator_dev(free, ss, two_d,
                                       (-2000.0, -1000.0, -500.0, 0.0, 500.0),
                                       "as_printed"),
        tolerance=1e-13))

    nodeph = p.with_(gamma0=0.0)
    ss = steady_state(nodeph)
    two_d = langevin.diffusion_matrix(nodeph, ss)
    reports.append(CheckReport(
        name="commutators_undriven_balance",
        scope="direct coupling, no dephasing, 5 frequencies",
        residual=_worst_commutator_dev(nodeph, ss, two_d,
                                       (-2000.0, -1031.7, -1000.0, 0.0, 500.0),
                                       "as_printed"),
        tolerance=1e-6))

    reports.append(CheckReport(
        name="commutators_fault_injection",
        scope="same limit with the diffusion table doubled",
        residual=_worst_commutator_dev(nodeph, ss, 2.0 * two_d,
                                       (-2000.0, -1000.0, 0.0),
                                       "as_printed"),
        tolerance=1e-6,
        expected_pass=False))

    ss = steady_state(p)
    two_d = langevin.diffusion_matrix(p, ss)
    reports.append(CheckReport(
        name="commutators_reference",
        scope="anomalous coupling, reference point, 64-point grid",
        residual=_worst_commutator_dev(p, ss, two_d, COMMUTATOR_GRID,
                                       "parametric"),
        tolerance=1e-6,
        expected_pass=False))
    return reports


def check_oracle_equivalence(p: PhysicalParams | None = None,
                             n_steps: int = 100000) -> list[CheckReport]:
    """Doubling integrator against the naive fixed-step one."""
    if p is None:
        p = reference_params()
    ss = steady_state(p)
    two_d = langevin.diffusion_matrix(p, ss)
    worst = 0.0
    for om in ORACLE_POINTS:
        dm = propagation.drift_matrix(om, p, ss)
        g = dm.q @ langevin.sym_noise_matrix(two_d, dm.channels) \
            @ dm.q.conj().T
        t1, c1 = propagation.second_moment_transfer(dm.m, g, p.length)
        t2, c2 = propagation.transfer_step_oracle(dm.m, g, p.length, n_steps)
        worst = max(worst,
                    float(np.max(np.abs(t1 - t2)) / np.max(np.abs(t2))),
                    float(np.max(np.abs(c1 - c2)) / np.max(np.abs(c2))))
    return [CheckReport(
        name="oracle_equivalence",
        scope=f"{len(ORACLE_POINTS)} frequencies, {n_steps} oracle steps",
        residual=worst,
        tolerance=1e-8)]


def check_limits(p: PhysicalParams | None = None) -> list[CheckReport]:
    if p is None:
        p = reference_params()
    reports = []

    # pump off: the ground coherence vanishes, the pair decouples, and
    # the witness must sit at the vacuum benchmark
    pz = p.with_(omega_p=0.0)
    ss = steady_state(pz)
    two_d = langevin.diffusion_matrix(pz, ss)
    worst = 0.0
    for om in (-2500.0, -300.0, 400.0):
        ext = entanglement.covariance_with_spinwave(om, pz, ss, two_d)
        worst = max(worst, abs(ext.duan("a1", "b1").value - 4.0))
    reports.append(CheckReport(
        name="limit_uncoupled_pair_vacuum",
        scope="pump drive off, 3 benign frequencies",
        residual=worst, tolerance=1e-9))

    pd = p.with_(gamma0=0.0)
    ss = steady_state(pd)
    reports.append(CheckReport(
        name="limit_dark_state",
        scope="no dephasing, symmetric drives",
        residual=float(np.max(np.abs(ss.matrix
                                     - dark_state_sigma()))),
        tolerance=1e-6))

    ss = steady_state(p)
    two_d = langevin.diffusion_matrix(p, ss)
    vals = []
    for a in (0.0, 1.0, 1000.0):
        pa = p.with_(alpha1=a, alpha2=a)
        ext = entanglement.covariance_with_spinwave(-800.0, pa, ss, two_d)
        vals.append(ext.duan("a1", "b1").value)
    reports.append(CheckReport(
        name="limit_input_amplitude_independence",
        scope="coherent amplitudes 0, 1, 1000",
        residual=float((max(vals) - min(vals)) / abs(vals[0])),
        tolerance=1e-9))

    worst = np.inf
    for om in COMMUTATOR_GRID:
        sol = propagation.transfer(om, p, ss, two_d)
        quad = entanglement.quadrature_covariance(
            propagation.output_field_covariance(sol))
        m = quad.shape[0] // 2
        form = np.zeros((2 * m, 2 * m))
        form[:m, m:] = 2.0 * np.eye(m)
        form[m:, :m] = -2.0 * np.eye(m)
        ev = np.linalg.eigvals(quad + 1j * form)
        worst = min(worst, float(ev.real.min()))
    reports.append(CheckReport(
        name="symplectic_positivity",
        scope="field quadrature covariance, 64-point grid",
        residual=max(0.0, -worst),
        tolerance=1e-8,
        expected_pass=False))
    return reports


def run_all(p: PhysicalParams | None = None) -> list[CheckReport]:
    if p is None:
        p = reference_params()
    return (check_commutators(p) + check_oracle_equivalence(p)
            + check_limits(p))


def format_lines(reports) -> list[str]:
    return [r.line() for r in reports]


def verify_exit_code(reports) -> int:
    return 3 if any(r.surprising for r in reports) else 0


def convention_comparison(p: PhysicalParams | None = None) -> dict:
    """Witness values for every coupling/sideband combination.

    Feeds the comparison table of the validation notes; "overflow"
    marks combinations where the drift develops broadband exponential
    gain beyond the trust ceiling.
    """
    if p is None:
        p = reference_params()
    ss = steady_state(p)
    two_d = langevin.diffusion_matrix(p, ss)
    table = {}
    for coupling in propagation.COUPLINGS:
        for sideband in propagation.SIDEBANDS:
            key = f"{coupling}/{sideband}"
            row = {}
            for om in (-2000.0, -1000.0, 0.0):
                try:
                    sol = propagation.transfer(om, p, ss, two_d,
                                               coupling=coupling,
                                               sideband=sideband)
                    quad = entanglement.quadrature_covariance(
                        propagation.output_field_covariance(sol))
                    row[om] = entanglement.duan_min(quad, 0, 1).value
                except propagation.NumericalOverflowError:
                    row[om] = "overflow"
            table[key] = row
    return table
