"""This module implements the ``quditkit`` subcommands.

Every command takes the parsed arguments and a ``CommandContext`` and
returns the paths it wrote. Commands raise the library's errors unchanged;
``quditkit_cli.cli.main`` maps them to exit codes.
"""

import csv
import itertools
from dataclasses import dataclass

import numpy as np

from quditkit.analysis import (
    DensityMatrix,
    GateSequence,
    error_per_clifford,
    extract_delta_f,
    fit_ramsey_beat,
    fit_rb,
    reconstruct_state,
    simulate_tomography,
    state_fidelity,
    tomography_gate_set,
)
from quditkit.analysis.decay import rb_decay
from quditkit.analysis.ramsey import MHZ_PER_GHZ, beat_signal
from quditkit.config.device import DeviceConfig
from quditkit.coupling import build_joint, fit_j_from_shift, zz_shift_matrix
from quditkit.discriminate import (
    GaussianClassifier,
    assignment_matrix,
    classify,
    cross_validate,
    mitigate,
    mixture_log_likelihood,
    train,
)
from quditkit.dispersive import dressed_oracle, stark_and_lamb
from quditkit.errors import ArityError, CoverageError, DeviceFileError, InputError
from quditkit.hamiltonian import eigensolve
from quditkit.logger import Logger
from quditkit.noise_budget import RelaxationBudget, T1Series, read_t1_csv
from quditkit.paramfit import ModelFitter
from quditkit.readout import (
    integrated_iq,
    read_records_csv,
    state_pulled_frequency,
    synthesize_shots,
    write_manifest,
    write_records_csv,
)
from quditkit.spectrum import (
    asymptotic_relative_error,
    charge_dispersion_asymptotic,
    charge_dispersion_exact,
    dispersion_floor,
    spectrum_vs_ratio,
    transitions_and_anharmonicities,
)

from .output import CommandOutput

# E_J/E_C sweep of ``spectrum --plot-data``
RATIO_SWEEP = np.geomspace(1.0, 400.0, 60)
OFFSET_CHARGE_SWEEP = np.linspace(-1.0, 1.0, 41)
SIGMA_PER_SEPARATION = 1 / 20
DEFAULT_PHOTONS = 4


@dataclass
class CommandContext:
    """What every command shares: the logger and the global flags."""

    logger: Logger
    out_dir: str
    seed: int | None = None
    plot_data: bool = False

    def output(self, command: str) -> CommandOutput:
        """The output files of ``command``."""
        return CommandOutput(self.out_dir, command, plot_data=self.plot_data)

    def load_device(self, path: str, persist: bool = False) -> DeviceConfig:
        """Loads a device file and applies the global overrides.

        Overrides stay in memory unless ``persist`` is set.

        Raises:
            InputError: If an override is out of range for the device settings.
        """
        device = DeviceConfig(path)
        if self.seed is not None:
            try:
                device.update_config("seed", self.seed, temporary=not persist)
            except (TypeError, ValueError) as e:
                raise InputError(f"--seed: {e}") from e
        return device

    def seed_for(self, device: DeviceConfig | None = None) -> int:
        """The device's effective seed, else ``--seed``, else 0."""
        if device is not None:
            return device.seed
        return self.seed if self.seed is not None else 0


def _written(*paths: str | None) -> list[str]:
    return [p for p in paths if p is not None]


def _transition_columns(transitions: np.ndarray) -> dict[str, list]:
    return {f"f_{i}_{i + 1}_ghz": list(transitions[:, i]) for i in range(transitions.shape[1])}


def read_numeric_csv(path: str, first_column: str) -> tuple[list[str], np.ndarray]:
    """Reads a header plus numeric rows whose first column is ``first_column``.

    Raises:
        InputError: If the header or a row is malformed.
    """
    with open(path, newline="") as f:
        rows = [row for row in csv.reader(f) if row]
    if not rows or rows[0][0].strip() != first_column or len(rows[0]) < 2:
        raise InputError(f"{path} needs a '{first_column}, ...' header and at least two columns")
    header = [h.strip() for h in rows[0]]
    try:
        data = np.array([[float(v) for v in row] for row in rows[1:]], dtype=float)
    except ValueError as e:
        raise InputError(f"{path} holds a non-numeric value: {e}") from e
    if data.ndim != 2 or data.shape[0] == 0 or data.shape[1] != len(header):
        raise InputError(f"{path} rows do not match its {len(header)}-column header")
    return header, data


def parse_state_vector(text: str) -> np.ndarray:
    """Parses comma-separated complex amplitudes such as ``1,0,0,1j``.

    Raises:
        InputError: If an amplitude is not a number.
    """
    try:
        return np.array([complex(part.replace(" ", "")) for part in text.split(",")])
    except ValueError as e:
        raise InputError(f"cannot parse state vector {text!r}") from e


def check_device(args, ctx: CommandContext) -> list[str]:
    """Validates a device file and writes its canonical form."""
    device = ctx.load_device(args.device, persist=args.save)
    out = ctx.output("check")
    canonical = out.path(".device.json")
    device.dump(canonical)
    ctx.logger.info(
        "Device file is valid.",
        transmons=sorted(device.transmons),
        resonators=sorted(device.resonators),
        couplings=len(device.couplings),
    )
    report = out.write_report({"device": args.device, "canonical": canonical, **device.to_dict()})
    return _written(canonical, report)


def spectrum(args, ctx: CommandContext) -> list[str]:
    """Transitions, anharmonicities and confined levels of one transmon."""
    device = ctx.load_device(args.device)
    model = device.transmon_model(args.transmon)
    levels = args.levels or device.levels
    sol = eigensolve(model, levels)
    report = transitions_and_anharmonicities(sol, with_dispersion=args.dispersion)

    count = len(report.transitions)
    columns: dict[str, list] = {
        "index": list(range(count)),
        "transition_ghz": list(report.transitions),
        "anharmonicity_ghz": [None, *report.anharmonicities],
    }
    if report.dispersion is not None:
        eps = report.dispersion
        columns["delta_f_ghz"] = [abs(eps[i]) + abs(eps[i + 1]) for i in range(count)]
        flags = report.dispersion_resolved or ()
        columns["delta_f_resolved"] = [flags[i] and flags[i + 1] for i in range(count)]

    out = ctx.output("spectrum")
    table = out.write_table(columns)
    summary = out.write_report({"model": model.to_dict(), "levels": levels, **report.to_dict()})

    plot = None
    if out.plot_data:
        sweep = spectrum_vs_ratio(model.e_c, RATIO_SWEEP, levels, cutoff=model.cutoff)
        plot = out.write_plot({"ratio": list(RATIO_SWEEP), **_transition_columns(sweep)})
    ctx.logger.info("Solved spectrum.", levels=levels, n_levels=report.n_levels)
    return _written(table, summary, plot)


def dispersion(args, ctx: CommandContext) -> list[str]:
    """Exact and asymptotic charge dispersion and δf per transition."""
    device = ctx.load_device(args.device)
    model = device.transmon_model(args.transmon)
    levels = args.levels or device.levels

    exact = [charge_dispersion_exact(model, m) for m in range(levels)]
    asymptotic = [charge_dispersion_asymptotic(model.e_j[0], model.e_c, m) for m in range(levels)]
    error = [asymptotic_relative_error(model.e_j[0], model.e_c, m) for m in range(levels)]
    floor = dispersion_floor(model)
    resolved = [abs(eps) > floor for eps in exact]
    delta = [abs(exact[m]) + abs(exact[m + 1]) for m in range(levels - 1)] + [None]

    out = ctx.output("dispersion")
    table = out.write_table(
        {
            "level": list(range(levels)),
            "epsilon_exact_ghz": exact,
            "epsilon_asymptotic_ghz": asymptotic,
            "asymptotic_error": error,
            "resolved": resolved,
            "delta_f_ghz": delta,
        }
    )
    summary = out.write_report(
        {
            "model": model.to_dict(),
            "epsilon": exact,
            "epsilon_asymptotic": asymptotic,
            "asymptotic_error": error,
            "precision_floor": floor,
            "resolved": resolved,
            "delta_f": delta[:-1],
        }
    )

    plot = None
    if out.plot_data:
        sweep = np.vstack([eigensolve(model.replace(n_g=float(n_g)), levels).transitions() for n_g in OFFSET_CHARGE_SWEEP])
        plot = out.write_plot({"n_g": list(OFFSET_CHARGE_SWEEP), **_transition_columns(sweep)})
    ctx.logger.info("Computed charge dispersion.", levels=levels)
    return _written(table, summary, plot)


def dispersive(args, ctx: CommandContext) -> list[str]:
    """Dispersive shifts χ_i, Lamb-shifted energies and resonator pulls."""
    device = ctx.load_device(args.device)
    model = device.transmon_model(args.transmon)
    res = device.resonator_for(args.transmon)
    levels = args.levels or device.levels
    report = stark_and_lamb(eigensolve(model, levels), res, levels)

    columns: dict[str, list] = {
        "level": list(range(levels)),
        "chi_ghz": list(report.chi),
        "lamb_ghz": list(report.lamb),
        "delta_chi_ghz": [None, *report.delta_chi],
        "pulled_ghz": [res.f_r + chi for chi in report.chi],
    }
    document = {"resonator": res.to_dict(), **report.to_dict()}
    if args.dressed:
        dressed = dressed_oracle(model, res, n_transmon=levels + 5, n_photon=args.photons)
        columns["dressed_pulled_ghz"] = [dressed.pull(i) for i in range(levels)]
        document["dressed_pulled"] = columns["dressed_pulled_ghz"]
        document["photons"] = args.photons

    out = ctx.output("dispersive")
    table = out.write_table(columns)
    summary = out.write_report(document)
    plot = out.write_plot({"level": columns["level"], "chi_mhz": [1e3 * chi for chi in report.chi]})
    ctx.logger.info("Computed dispersive shifts.", levels=levels, window=report.window)
    return _written(table, summary, plot)


def _fitter(device: DeviceConfig, transmon: str | None, ctx: CommandContext) -> ModelFitter:
    kwargs = {}
    try:
        kwargs["kappa"] = device.resonator_for(transmon).kappa
    except DeviceFileError:
        pass
    return ModelFitter(ctx.logger, seed=ctx.seed_for(device), cutoff=device.cutoff, **kwargs)


def fit(args, ctx: CommandContext) -> list[str]:
    """Standard, M-harmonic or harmonics-series fit of measured frequencies."""
    device = ctx.load_device(args.device)
    obs = device.observations(args.transmon)
    fitter = _fitter(device, args.transmon, ctx)
    out = ctx.output("fit")

    if args.harmonics_sweep:
        fits = fitter.fit_harmonics_series(obs, args.harmonics_sweep)
        width = args.harmonics_sweep
        columns: dict[str, list] = {
            "harmonics": [f.harmonics for f in fits],
            "e_c_ghz": [f.model.e_c for f in fits],
        }
        for m in range(width):
            columns[f"e_j{m + 1}_ghz"] = [f.model.e_j[m] if m < f.harmonics else None for f in fits]
        columns["f_r_ghz"] = [None if f.resonator is None else f.resonator.f_r for f in fits]
        columns["g_ghz"] = [None if f.resonator is None else f.resonator.g for f in fits]
        columns["max_residual_ghz"] = [f.max_residual for f in fits]
        table = out.write_table(columns)
        summary = out.write_report({"fits": [f.to_dict() for f in fits]})
        return _written(table, summary)

    if args.harmonics:
        result = fitter.fit_harmonics(obs, args.harmonics)
    else:
        f01, f12 = obs.transition(0), obs.transition(1)
        if f01 is None or f12 is None:
            raise ArityError("standard fit needs measured f01 and f12")
        result = fitter.fit_standard(f01, f12)

    prediction = fitter.predict_observables(result, max(obs.indices) + 1)
    rows = prediction.residuals(obs)
    table = out.write_table({key: [row[key] for row in rows] for key in ("index", "measured", "model", "residual", "delta_f")})
    summary = out.write_report(
        {
            "fit": result.to_dict(),
            "prediction": {
                "transitions": list(prediction.transitions),
                "delta_f": list(prediction.delta_f),
                "dressed": prediction.dressed,
            },
        }
    )
    plot = out.write_plot(
        {
            "index": list(range(len(prediction.transitions))),
            "model_ghz": list(prediction.transitions),
            "measured_ghz": [obs.transition(i) for i in range(len(prediction.transitions))],
            "delta_f_ghz": list(prediction.delta_f),
        }
    )
    return _written(table, summary, plot)


def zz(args, ctx: CommandContext) -> list[str]:
    """Control-state-dependent shifts of the target's transitions."""
    device = ctx.load_device(args.device)
    coupling = device.coupling_strength(args.control, args.target)
    target = eigensolve(device.transmon_model(args.target), args.trunc)
    control = eigensolve(device.transmon_model(args.control), args.trunc)
    if args.levels + 1 > args.trunc:
        raise InputError(f"--levels {args.levels} needs --trunc above {args.levels}")

    joint = build_joint(target, control, coupling, trunc=args.trunc, check_levels=args.levels + 1)
    matrix = zz_shift_matrix(
        joint,
        control_levels=args.levels,
        target_transitions=args.levels,
        target="a",
        control_id=args.control,
        target_id=args.target,
    )

    columns: dict[str, list] = {"transition": list(range(args.levels))}
    for j in range(args.levels):
        columns[f"control_{j}_ghz"] = list(matrix.shifts[:, j])
    document = {
        **matrix.to_dict(),
        "trunc": args.trunc,
        "subspace_zz": [matrix.subspace_zz(k) for k in range(args.levels - 1)],
    }
    if args.measured_shift is not None:
        document["fitted_j"] = fit_j_from_shift(target, control, args.measured_shift, trunc=args.trunc)

    out = ctx.output("zz")
    table = out.write_table(columns)
    summary = out.write_report(document)
    plot = out.write_plot(
        {"subspace": list(range(args.levels - 1)), "zz_mhz": [1e3 * v for v in document["subspace_zz"]]}
    )
    ctx.logger.info("Computed ZZ shifts.", control=args.control, target=args.target, j=coupling)
    return _written(table, summary, plot)


def _measured_t1(args, device: DeviceConfig) -> T1Series:
    if args.t1_csv:
        return read_t1_csv(args.t1_csv)
    return device.t1_series(args.transmon)


def readout_sim(args, ctx: CommandContext) -> list[str]:
    """Synthesizes labeled multi-tone single shots."""
    device = ctx.load_device(args.device)
    model = device.transmon_model(args.transmon)
    res = device.resonator_for(args.transmon)
    tones = device.tone_set(args.tone_set)
    if args.integration is not None:
        tones = tones.with_integration(args.integration)
    states = list(range(args.states))

    report = stark_and_lamb(eigensolve(model, args.states), res, args.states)
    pulled = [state_pulled_frequency(res, report, j) for j in states]

    gamma1 = [0.0] * args.states
    if args.decay:
        series = _measured_t1(args, device)
        for level, t1 in zip(series.levels.tolist(), series.t1.tolist()):
            if 1 <= level < args.states:
                gamma1[level] = 1.0 / t1
        missing = [j for j in states[1:] if gamma1[j] == 0.0]
        if missing:
            raise CoverageError(f"no measured T1 for states {missing}")

    clean = np.array([integrated_iq(p, tones) for p in pulled])
    separation = min(np.linalg.norm(a - b) for a, b in itertools.combinations(clean, 2))
    sigma = args.sigma if args.sigma is not None else SIGMA_PER_SEPARATION * separation
    seed = ctx.seed_for(device)
    shot_set = synthesize_shots(states, tones, pulled, sigma, gamma1, args.shots, seed=seed)

    out = ctx.output("readout-sim")
    table = out.path(".csv")
    write_records_csv(table, shot_set.records)
    manifest = out.path(".manifest")
    write_manifest(manifest, shot_set)
    summary = out.write_report(
        {
            "tones": tones.to_dict(),
            "pulled": [complex(p) for p in pulled],
            "gamma1_per_us": gamma1,
            "noise_sigma": sigma,
            "separation": float(separation),
            "shots": args.shots,
            "seed": seed,
            "decayed_fraction": shot_set.decayed_fraction(),
        }
    )
    plot = out.write_plot(
        {"state": states, **{f"iq_{k}": list(clean[:, k]) for k in range(clean.shape[1])}}
    )
    ctx.logger.info("Synthesized shots.", states=args.states, shots=args.shots, noise_sigma=sigma)
    return _written(table, manifest, summary, plot)


def readout_train(args, ctx: CommandContext) -> list[str]:
    """Trains the Gaussian classifier on labeled records."""
    records = read_records_csv(args.records)
    options = {
        "refine_em": args.refine_em,
        "shared_covariance": args.shared_covariance,
        "use_weights": args.use_weights,
    }
    clf = train(records, **options)

    out = ctx.output("readout-train")
    classifier = out.path(".classifier.json")
    with open(classifier, "w") as f:
        f.write(clf.to_json())
        f.write("\n")

    columns: dict[str, list] = {"state": list(clf.states)}
    if clf.weights is not None:
        columns["weight"] = list(clf.weights)
    for k in range(clf.dimension):
        columns[f"mean_{k}"] = list(clf.means[:, k])
    table = out.write_table(columns)

    document = {
        "states": list(clf.states),
        "dimension": clf.dimension,
        "records": len(records),
        "log_likelihood": mixture_log_likelihood(clf, records),
        "options": options,
    }
    if args.folds > 1:
        document["cross_validation"] = cross_validate(records, folds=args.folds, seed=ctx.seed_for(), **options)
    summary = out.write_report(document)
    ctx.logger.info("Trained classifier.", states=len(clf.states), records=len(records))
    return _written(classifier, table, summary)


def _load_classifier(path: str) -> GaussianClassifier:
    with open(path) as f:
        return GaussianClassifier.from_json(f.read())


def readout_classify(args, ctx: CommandContext) -> list[str]:
    """Assigns records to states and reports measured populations."""
    clf = _load_classifier(args.classifier)
    records = read_records_csv(args.records)
    results = [classify(clf, record) for record in records]
    assigned = [label for label, _ in results]

    counts = np.array([assigned.count(s) for s in clf.states], dtype=float)
    populations = counts / counts.sum()
    document = {"states": list(clf.states), "populations": populations.tolist(), "records": len(records)}
    if args.calibration:
        am = assignment_matrix(clf, read_records_csv(args.calibration))
        document["assignment"] = am.to_dict()
        document["mitigated"] = mitigate(populations, am).tolist()

    out = ctx.output("readout-classify")
    table = out.write_table(
        {
            "index": list(range(len(records))),
            "true_label": [r.true_label for r in records],
            "assigned": assigned,
            "log_likelihood": [float(np.max(ll)) for _, ll in results],
        }
    )
    summary = out.write_report(document)
    return _written(table, summary)


def readout_confusion(args, ctx: CommandContext) -> list[str]:
    """Assignment matrix of a classifier on labeled test records."""
    clf = _load_classifier(args.classifier)
    am = assignment_matrix(clf, read_records_csv(args.records))

    columns: dict[str, list] = {"assigned": list(am.states)}
    for k, state in enumerate(am.states):
        columns[f"prepared_{state}"] = list(am.matrix[:, k])
    out = ctx.output("readout-confusion")
    table = out.write_table(columns)
    summary = out.write_report(am.to_dict())
    ctx.logger.info("Computed assignment matrix.", fidelity=am.fidelity)
    return _written(table, summary)


def t1_budget(args, ctx: CommandContext) -> list[str]:
    """Relaxation budget per level, optionally with a dielectric fit."""
    device = ctx.load_device(args.device)
    model = device.transmon_model(args.transmon)
    res = device.resonator_for(args.transmon)
    params = device.noise_params(args.noise)
    budget = RelaxationBudget(ctx.logger, eigensolve(model, args.levels + 1), res, params)
    rows = budget.breakdown(args.levels)

    columns: dict[str, list] = {
        "level": [r.level for r in rows],
        "gamma_qp_per_us": [r.qp for r in rows],
        "gamma_purcell_per_us": [r.purcell for r in rows],
        "gamma_dielectric_per_us": [r.dielectric for r in rows],
        "gamma_total_per_us": [r.total for r in rows],
        "t1_us": [r.t1 for r in rows],
    }
    document: dict = {"noise": params.to_dict(), "resonator": res.to_dict(), "breakdown": [r.to_dict() for r in rows]}
    epsilons = {params.epsilon}

    if args.fit_dielectric:
        series = _measured_t1(args, device)
        fitted = budget.fit_dielectric_params(series, weighted=args.weighted, include_qp=not args.no_qp)
        fitted_params = params.replace(q_diel0=fitted.q_diel0, epsilon=fitted.epsilon)
        if args.no_qp:
            fitted_params = fitted_params.replace(x_qp=0.0)
        refit = budget.breakdown(args.levels, fitted_params)
        measured = dict(zip(series.levels.tolist(), series.t1.tolist()))
        columns["t1_measured_us"] = [measured.get(r.level) for r in rows]
        columns["t1_fitted_us"] = [r.t1 for r in refit]
        document["fit"] = fitted.to_dict()
        document["fitted_breakdown"] = [r.to_dict() for r in refit]
        epsilons.add(fitted.epsilon)

    out = ctx.output("t1-budget")
    table = out.write_table(columns)
    summary = out.write_report(document)
    plot = None
    if out.plot_data:
        x_qp_values = sorted({params.x_qp * factor for factor in (0.1, 1.0, 10.0)})
        plot = out.write_plot(budget.scaling_table(args.levels, x_qp_values, sorted(epsilons)))
    return _written(table, summary, plot)


def rb_fit(args, ctx: CommandContext) -> list[str]:
    """Fits an RB survival CSV: ``depth`` then one column per randomization."""
    _, data = read_numeric_csv(args.csv, "depth")
    depths = data[:, 0]
    survival = data[:, 1] if data.shape[1] == 2 else data[:, 1:].T
    result, infidelity = fit_rb(depths, survival, d_subspace=args.d)

    mean = data[:, 1:].mean(axis=1)
    model = rb_decay(depths, result.amplitude, result.decay, result.offset)
    out = ctx.output("rb-fit")
    table = out.write_table({"depth": list(depths), "survival": list(mean), "model": list(model)})
    summary = out.write_report(
        {
            "fit": result.to_dict(),
            "r": result.decay,
            "r_stderr": result.decay_stderr,
            "process_infidelity": infidelity,
            "error_per_clifford": error_per_clifford(result.decay, args.d),
            "d_subspace": args.d,
            "randomizations": data.shape[1] - 1,
        }
    )
    plot = None
    if out.plot_data:
        dense = np.linspace(0.0, depths.max(), 200)
        plot = out.write_plot(
            {"depth": list(dense), "model": list(rb_decay(dense, result.amplitude, result.decay, result.offset))}
        )
    ctx.logger.info("Fitted RB decay.", r=result.decay, process_infidelity=infidelity)
    return _written(table, summary, plot)


def ramsey_fit(args, ctx: CommandContext) -> list[str]:
    """Fits the beating Ramsey model: ``time_us`` then one population column per trace."""
    header, data = read_numeric_csv(args.csv, "time_us")
    times = data[:, 0]
    fits = [fit_ramsey_beat(times, data[:, k]) for k in range(1, data.shape[1])]

    def model(fit, t):
        return beat_signal(
            t, fit.offset, fit.t2r, fit.a0, fit.a1, MHZ_PER_GHZ * fit.f_e, MHZ_PER_GHZ * fit.f_o, fit.phi0, fit.phi1
        )

    columns: dict[str, list] = {"time_us": list(times)}
    for k, result in enumerate(fits, start=1):
        columns[header[k]] = list(data[:, k])
        columns[f"{header[k]}_model"] = list(model(result, times))

    delta = extract_delta_f(fits)
    out = ctx.output("ramsey-fit")
    table = out.write_table(columns)
    summary = out.write_report({"fits": [f.to_dict() for f in fits], "delta_f": delta})
    plot = None
    if out.plot_data:
        dense = np.linspace(times.min(), times.max(), 10 * times.size)
        plot = out.write_plot({"time_us": list(dense), **{f"{header[k]}_model": list(model(f, dense)) for k, f in enumerate(fits, start=1)}})
    ctx.logger.info("Fitted Ramsey beating.", traces=len(fits), delta_f=delta)
    return _written(table, summary, plot)


def tomo_gates(args, ctx: CommandContext) -> list[str]:
    """Lists the tomography gate sequences for a d-level state."""
    gates = tomography_gate_set(args.d)
    out = ctx.output("tomo-gates")
    table = out.write_table(
        {
            "index": list(range(len(gates))),
            "gate": [g.to_mnemonic() for g in gates],
            "rotations": [len(g.rotations) for g in gates],
        }
    )
    summary = out.write_report({"d": args.d, "sequences": len(gates)})
    return _written(table, summary)


def _probability_columns(gates: list[GateSequence], probabilities: np.ndarray) -> dict[str, list]:
    columns: dict[str, list] = {"gate": [g.to_mnemonic() for g in gates]}
    for m in range(probabilities.shape[1]):
        columns[f"p_{m}"] = list(probabilities[:, m])
    return columns


def tomo_simulate(args, ctx: CommandContext) -> list[str]:
    """Samples tomography outcome frequencies for a pure state."""
    psi = parse_state_vector(args.state)
    gates = tomography_gate_set(psi.size)
    seed = ctx.seed_for()
    probabilities = simulate_tomography(DensityMatrix.pure(psi), gates, args.shots, seed=seed)
    out = ctx.output("tomo-simulate")
    table = out.write_table(_probability_columns(gates, probabilities))
    summary = out.write_report({"d": psi.size, "shots": args.shots, "seed": seed, "state": psi.tolist()})
    return _written(table, summary)


def tomo_reconstruct(args, ctx: CommandContext) -> list[str]:
    """Reconstructs ρ from a ``gate, p_0, ...`` outcome CSV."""
    with open(args.probabilities, newline="") as f:
        rows = [row for row in csv.reader(f) if row]
    if not rows or rows[0][0].strip() != "gate" or len(rows) < 2:
        raise InputError(f"{args.probabilities} needs a 'gate, p_0, ...' header and data rows")
    try:
        gates = [GateSequence.from_mnemonic(row[0]) for row in rows[1:]]
        probabilities = np.array([[float(v) for v in row[1:]] for row in rows[1:]], dtype=float)
    except ValueError as e:
        raise InputError(f"{args.probabilities} holds a non-numeric probability: {e}") from e

    rho = reconstruct_state(probabilities, gates)
    d = rho.dimension
    document: dict = {
        "d": d,
        "purity": rho.purity,
        "eigenvalues": np.linalg.eigvalsh(rho.matrix).tolist(),
        "rho": rho.to_dict(),
    }
    if args.target:
        document["fidelity"] = state_fidelity(rho, parse_state_vector(args.target))

    out = ctx.output("tomo-reconstruct")
    table = out.write_table(
        {
            "row": [j for j in range(d) for _ in range(d)],
            "col": [k for _ in range(d) for k in range(d)],
            "real": list(rho.matrix.real.ravel()),
            "imag": list(rho.matrix.imag.ravel()),
        }
    )
    summary = out.write_report(document)
    ctx.logger.info("Reconstructed state.", d=d, purity=rho.purity, fidelity=document.get("fidelity"))
    return _written(table, summary)

