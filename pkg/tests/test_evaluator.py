import cmath
import math

import numpy as np
import pytest
from scipy.integrate import simpson

from statransport.designer import PhysicalUnits, TransportSpec, build_trajectory
from statransport.errors import ResolutionWarning, SpecError
from statransport.evaluator import (
    _osc_form,
    classical_simulate,
    complex_amplitude,
    excitation_curve,
    excitation_joules,
    final_excitation,
    flatness_order,
    fourier_accel,
    fourier_factorized,
    lambda_metric,
)


def _protocol(freqs, tf=3.0, d=1.0):
    return build_trajectory(TransportSpec(d=d, t_f=tf, freqs=tuple(freqs)))


# -- oscillatory integral core ------------------------------------------------


def test_constant_integrand_closed_form():
    form = _osc_form((1.0,))
    assert form.integral(0.0) == 1.0
    for w in (1e-3, 0.1, 0.4999, 0.5001, 2.0, 10.0, 300.0):
        want = (1.0 - cmath.exp(-1j * w)) / (1j * w)
        got = form.integral(w)
        assert abs(got - want) <= 1e-13 * abs(want)


def test_linear_integrand_closed_form():
    # the closed form itself cancels badly below w ~ 0.1, so start at 0.3;
    # the dense-quadrature test covers the small-w side
    form = _osc_form((0.0, 1.0))
    for w in (0.3, 0.7, 5.0, 120.0):
        iw = 1j * w
        want = cmath.exp(-iw) / (-iw) + (1.0 - cmath.exp(-iw)) / (iw * iw)
        got = form.integral(w)
        assert abs(got - want) <= 1e-12 * max(abs(want), 1e-3)


def test_routes_agree_against_dense_quadrature():
    # an aggressive cross-check straddling the small/large W switchover
    rng = np.random.default_rng(3)
    coeffs = tuple(rng.uniform(-2.0, 2.0, size=6))
    form = _osc_form(coeffs)
    s = np.linspace(0.0, 1.0, 20001)
    p = np.polynomial.polynomial.polyval(s, np.array(coeffs))
    for w in (0.05, 0.3, 0.7, 2.5, 40.0, 200.0):
        ker = p * np.exp(-1j * w * s)
        want = complex(simpson(ker.real, x=s), simpson(ker.imag, x=s))
        got = form.integral(w)
        assert abs(got - want) <= 1e-10 * max(abs(want), 1e-6)


# -- transform of the trap acceleration ----------------------------------------


def test_fourier_accel_vs_quadrature():
    p = _protocol((0.98, 1.02))
    tf = p.dspec.t_f
    t = np.linspace(0.0, tf, 40001)
    a = p.a0(t / tf)
    for w in (0.5, 0.9, 1.3):
        ker = a * np.exp(-1j * w * t)
        want = complex(simpson(ker.real, x=t), simpson(ker.imag, x=t))
        got = fourier_accel(p, w)
        # the comparison floor is Simpson's own truncation at this step size
        assert abs(got - want) <= 1e-8 * max(abs(want), 1e-6)


def test_factorized_matches_collapsed_route():
    # away from the zeros the two routes must agree to full tolerance
    for freqs in ((1.0,), (0.98, 1.02)):
        p = _protocol(freqs)
        mags = []
        for w in np.linspace(0.05, 3.0, 60):
            fa = abs(fourier_accel(p, w))
            ff = fourier_factorized(p, w)
            mags.append((w, fa, ff))
        fmax = max(m[1] for m in mags)
        for w, fa, ff in mags:
            if max(fa, ff) > 1e-3 * fmax:
                assert abs(fa - ff) <= 1e-9 * max(fa, ff)


def test_final_excitation_exact_zero_at_design_freqs():
    p = _protocol((0.9, 1.0, 1.2), tf=6.0)
    for wi in (0.9, 1.0, 1.2):
        assert fourier_factorized(p, wi) == 0.0
        assert final_excitation(p, wi) == 0.0


def test_final_excitation_validation():
    p = _protocol((1.0,))
    with pytest.raises(SpecError):
        final_excitation(p, 0.0)
    with pytest.raises(SpecError):
        final_excitation(p, -1.0)


def test_excitation_scales_with_d_squared():
    p1 = _protocol((1.0,), d=1.0)
    p2 = _protocol((1.0,), d=2.0)
    for w in (0.8, 1.1, 1.4):
        assert final_excitation(p2, w) == pytest.approx(
            4.0 * final_excitation(p1, w), rel=1e-12
        )


def test_excitation_joules_needs_units():
    p = _protocol((1.0,))
    with pytest.raises(SpecError):
        excitation_joules(p, 1.1)


def test_excitation_joules_dimensional():
    from scipy import constants

    units = PhysicalUnits(mass_kg=39.9626 * constants.atomic_mass,
                          omega_ref=2.0 * np.pi * 1.41e6)
    spec = TransportSpec(
        d=1000.0 * units.length_scale,
        t_f=2.5 * np.pi / units.omega_ref,
        freqs=(units.omega_ref,),
        units=units,
    )
    p = build_trajectory(spec)
    w = 1.03  # probe in units of omega_ref
    quanta = final_excitation(p, w)
    joules = excitation_joules(p, w)
    assert joules == pytest.approx(quanta * constants.hbar * w * units.omega_ref, rel=1e-12)
    assert joules > 0.0


def test_excitation_curve_csv(tmp_path):
    p = _protocol((1.0, 1.05))
    ws = np.linspace(0.9, 1.1, 11)
    curve = excitation_curve(p, ws)
    path = tmp_path / "spectrum.csv"
    curve.to_csv(path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "omega,delta_e_quanta"
    back = np.loadtxt(path, delimiter=",", skiprows=1)
    assert np.array_equal(back[:, 0], np.array(curve.omegas))
    assert np.array_equal(back[:, 1], np.array(curve.quanta))


# -- classical oracle -----------------------------------------------------------


def test_classical_final_energy_matches_transform():
    p = _protocol((0.98, 1.02))
    for w in (0.9, 0.93, 1.07):
        want = final_excitation(p, w)
        got = classical_simulate(p, w, n_steps=8000).final_quanta
        assert got == pytest.approx(want, rel=1e-6)


def test_classical_rest_at_design_frequency():
    # at a design frequency the particle parks: residual motion ~ rounding
    p = _protocol((1.0, 1.1), tf=5.0)
    res = classical_simulate(p, 1.1, n_steps=6000)
    assert res.final_quanta < 1e-15


def test_classical_validation_and_warning():
    p = _protocol((1.0,), tf=50.0)
    with pytest.raises(SpecError):
        classical_simulate(p, 1.0, n_steps=50)
    with pytest.raises(SpecError):
        classical_simulate(p, -1.0)
    with pytest.warns(ResolutionWarning):
        classical_simulate(p, 3.0, n_steps=100)


def test_classical_starts_from_rest():
    res = classical_simulate(_protocol((1.0,)), 1.0, n_steps=1000)
    assert res.xi[0] == 0.0 and res.xi_dot[0] == 0.0
    assert res.quanta[0] == 0.0
    assert res.states.shape == (1001, 3)


def test_classical_csv(tmp_path):
    res = classical_simulate(_protocol((1.0,)), 1.0, n_steps=1000)
    path = tmp_path / "transient.csv"
    res.to_csv(path)
    back = np.loadtxt(path, delimiter=",", skiprows=1)
    assert back.shape == (1001, 2)
    assert back[-1, 1] == res.final_quanta


def test_amplitude_partial_transform_consistent():
    p = _protocol((0.95, 1.05), tf=6.0)
    w = 1.12
    assert complex_amplitude(p, w, 0.0) == 0.0
    wf = complex_amplitude(p, w, p.dspec.t_f)
    assert 0.5 * abs(wf) ** 2 / w == pytest.approx(final_excitation(p, w), rel=1e-9)
    # halfway through, amplitude must match the integrated oscillator state
    res = classical_simulate(p, w, n_steps=16000)
    mid = len(res.times) // 2
    w_mid = complex(res.xi_dot[mid], w * res.xi[mid])
    assert abs(complex_amplitude(p, w, res.times[mid])) == pytest.approx(
        abs(w_mid), rel=1e-5, abs=1e-12
    )
    with pytest.raises(SpecError):
        complex_amplitude(p, w, -0.1)


# -- band average and flatness ---------------------------------------------------


def test_lambda_matches_direct_quadrature():
    p = _protocol((0.98, 1.02))
    omega0, eta = 1.0, 0.04
    ws = np.linspace(omega0 * (1 - eta), omega0 * (1 + eta), 4001)
    f2 = np.array([fourier_factorized(p, w) ** 2 for w in ws])
    want = simpson(f2, x=ws) / (2.0 * omega0 * eta) / (2.0 * omega0)
    assert lambda_metric(p, omega0, eta) == pytest.approx(want, rel=1e-8)


def test_lambda_scales_with_d_squared():
    p1 = _protocol((1.0, 1.0), d=1.0)
    p2 = _protocol((1.0, 1.0), d=2.0)
    assert lambda_metric(p2, 1.0, 0.02) == pytest.approx(
        4.0 * lambda_metric(p1, 1.0, 0.02), rel=1e-12
    )


def test_lambda_validation():
    p = _protocol((1.0,))
    with pytest.raises(SpecError):
        lambda_metric(p, 1.0, 0.0)
    with pytest.raises(SpecError):
        lambda_metric(p, 0.0, 0.02)


def test_flatness_order_coincident_designs():
    for n, want in ((1, 2.0), (2, 4.0)):
        p = _protocol((1.0,) * n, tf=2.5 * np.pi)
        assert flatness_order(p, 1.0) == pytest.approx(want, abs=0.02)


def test_flatness_order_needs_coincident_freqs():
    p = _protocol((0.98, 1.02))
    with pytest.raises(SpecError):
        flatness_order(p, 1.0)
