"""Command-line front end.

Each command runs one estimator or report and writes a CSV convergence log
(one row per checkpoint) and/or a JSON report with final estimates, ledger
targets and deviations.  Identical configurations produce byte-identical
outputs; a --threads flag caps workers without changing any result.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from . import analytic, integrate, metrics as mx, sequences

OUT_ENV = "QSTATEVOL_OUT"

_SEQ_KINDS = {"halton": "halton", "faure-tezuka": "faure-tezuka",
              "stratified": "stratified", "plain": "plain"}
_METRIC_CHOICES = list(mx.METRIC_NAMES) + ["sd"]


def _out_dir(ctx) -> Path:
    d = ctx.obj.get("out_dir") or os.environ.get(OUT_ENV) or "."
    p = Path(d)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _write_json(path: Path, payload):
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _seq_config(seq: str, dim: int, seed: int) -> sequences.SequenceConfig:
    return sequences.SequenceConfig(kind=_SEQ_KINDS[seq], dim=dim, seed=seed)


def _metric_spec(name: str, tilde: bool) -> mx.MonotoneMetricSpec:
    return mx.builtin_metric(name, tilde=tilde)


def _target_info(metric: str, quantity: str):
    entry = analytic.conjecture_lookup("bures" if metric == "sd" else metric, quantity)
    if entry is None or not entry.exact.rational or entry.exact.infinite or entry.exact.unknown:
        if entry is not None and (entry.exact.infinite or entry.exact.unknown):
            return {"symbolic": str(entry.exact), "value": None, "status": entry.status}
        return None
    return {"symbolic": str(entry.exact), "value": entry.exact.value(), "status": entry.status}


def _deviation(estimate, target):
    if target is None or target.get("value") is None:
        return None
    t = target["value"]
    return {"absolute": estimate - t, "relative": estimate / t - 1.0}


@click.group()
@click.option("--out-dir", default=None, help=f"output directory (env {OUT_ENV} overrides default '.')")
@click.pass_context
def main(ctx, out_dir):
    """Volumes, boundary hyperareas and separability probabilities of
    two-qubit states under monotone Riemannian metrics."""
    ctx.ensure_object(dict)
    ctx.obj["out_dir"] = out_dir


def _common_run_echo(**kw):
    return {k: v for k, v in kw.items()}


@main.command()
@click.option("--metric", "metric_names", multiple=True, default=("sd",), type=click.Choice(_METRIC_CHOICES))
@click.option("--seq", default="faure-tezuka", type=click.Choice(list(_SEQ_KINDS)))
@click.option("--points", default=1e6, type=float)
@click.option("--seed", default=1, type=int)
@click.option("--checkpoint-every", default=1_000_000, type=int)
@click.option("--threads", default=1, type=int)
@click.option("--tilde/--no-tilde", default=True, help="x4 metric scaling convention")
@click.pass_context
def volume(ctx, metric_names, seq, points, seed, checkpoint_every, threads, tilde):
    """Estimate total/separable/nonseparable volumes (one CSV+JSON per metric)."""
    n = int(points)
    out = _out_dir(ctx)
    cfg = _seq_config(seq, 15, seed)
    specs = {name: _metric_spec(name, tilde) for name in metric_names}
    results = integrate.estimate_volume_multi(specs, cfg, n, checkpoint_every, threads)
    for name in metric_names:
        r = results[name]
        stem = f"volume_{name}_{seq}_{seed}"
        with open(out / f"{stem}.csv", "w") as fh:
            fh.write("points,estimate_total,estimate_sep,estimate_nonsep,prob_sep\n")
            for (c, vt), (_, vs), (_, vn) in zip(
                r.total.checkpoints, r.sep.checkpoints, r.nonsep.checkpoints
            ):
                fh.write(f"{c},{vt!r},{vs!r},{vn!r},{vs / vt!r}\n")
        key = "bures" if name == "sd" else name
        report = {
            "config": _common_run_echo(command="volume", metric=name, seq=seq,
                                       points=n, seed=seed, tilde=tilde,
                                       checkpoint_every=checkpoint_every),
            "final": {"V_total": r.total.final, "V_sep": r.sep.final,
                      "V_nonsep": r.nonsep.final, "prob_sep": r.prob_sep},
            "targets": {"V_total": _target_info(key, "V_total"),
                        "V_sep": _target_info(key, "V_sep"),
                        "P_sep": _target_info(key, "P_sep")},
            "deviations": {"V_total": _deviation(r.total.final, _target_info(key, "V_total")),
                           "V_sep": _deviation(r.sep.final, _target_info(key, "V_sep")),
                           "P_sep": _deviation(r.prob_sep, _target_info(key, "P_sep"))},
            "diagnostics": r.total.diagnostics,
            "seed": seed,
        }
        _write_json(out / f"{stem}.json", report)
        click.echo(f"{name}: V_total={r.total.final:.6g} V_sep={r.sep.final:.6g} "
                   f"prob_sep={r.prob_sep:.6g} -> {stem}.csv/.json")


@main.command()
@click.option("--metric", "metric_names", multiple=True, default=("sd",), type=click.Choice(_METRIC_CHOICES))
@click.option("--surface", default="rank4_sep", type=click.Choice(["rank3", "rank4_sep", "rank4_all"]))
@click.option("--seq", default="faure-tezuka", type=click.Choice(list(_SEQ_KINDS)))
@click.option("--points", default=1e5, type=float)
@click.option("--seed", default=1, type=int)
@click.option("--checkpoint-every", default=100_000, type=int)
@click.option("--threads", default=1, type=int)
@click.option("--tilde/--no-tilde", default=True)
@click.pass_context
def boundary(ctx, metric_names, surface, seq, points, seed, checkpoint_every, threads, tilde):
    """Estimate boundary hyperareas on the rank-3 stratum or the rank-4
    separability boundary."""
    n = int(points)
    out = _out_dir(ctx)
    cfg = _seq_config(seq, 14, seed)
    specs = {name: _metric_spec(name, tilde) for name in metric_names}
    try:
        results = integrate.estimate_boundary(specs, cfg, n, surface, checkpoint_every, threads)
    except mx.UnsupportedMetricError as exc:
        _write_json(out / f"boundary_error_{surface}_{seed}.json",
                    {"error": "unsupported-metric", "detail": str(exc),
                     "metrics": list(metric_names), "surface": surface})
        click.echo(json.dumps({"error": "unsupported-metric", "detail": str(exc)}), err=True)
        ctx.exit(2)
    for name in metric_names:
        r = results[name]
        stem = f"boundary_{surface}_{name}_{seq}_{seed}"
        with open(out / f"{stem}.csv", "w") as fh:
            fh.write("points,B_total,B_sep,beta\n")
            for (c, bt), (_, bs) in zip(r.total.checkpoints, r.sep.checkpoints):
                if surface == "rank3":
                    fh.write(f"{c},{bt!r},{bs!r},\n")
                else:
                    fh.write(f"{c},{bt!r},,{bs!r}\n")
        key = "bures" if name == "sd" else name
        quantity = {"rank3": "B_sep", "rank4_sep": "Beta", "rank4_all": "Beta"}
        tq = _target_info(key, "B_total" if surface == "rank3" else "Beta")
        report = {
            "config": _common_run_echo(command="boundary", metric=name, surface=surface,
                                       seq=seq, points=n, seed=seed, tilde=tilde,
                                       checkpoint_every=checkpoint_every),
            "final": {"B_total": r.total.final,
                      ("B_sep" if surface == "rank3" else "beta"): r.sep.final},
            "targets": {("B_total" if surface == "rank3" else "beta"): tq},
            "deviations": {("B_total" if surface == "rank3" else "beta"):
                           _deviation(r.total.final if surface == "rank3" else r.sep.final, tq)},
            "diagnostics": r.diagnostics,
            "seed": seed,
        }
        _write_json(out / f"{stem}.json", report)
        click.echo(f"{name}/{surface}: total={r.total.final:.6g} sep={r.sep.final:.6g} "
                   f"-> {stem}.csv/.json")


@main.command()
@click.option("--a", "a_values", multiple=True, type=float, default=(1.0, 0.1, 0.01, 0.001))
@click.option("--seq", default="faure-tezuka", type=click.Choice(list(_SEQ_KINDS)))
@click.option("--points", default=1e6, type=float)
@click.option("--seed", default=1, type=int)
@click.option("--threads", default=1, type=int)
@click.pass_context
def sweep(ctx, a_values, seq, points, seed, threads):
    """Separability-probability sweep across the interpolating metric family."""
    n = int(points)
    out = _out_dir(ctx)
    cfg = _seq_config(seq, 15, seed)
    rows = integrate.interpolation_sweep(list(a_values), cfg, n, threads=threads)
    stem = f"sweep_{seq}_{seed}"
    with open(out / f"{stem}.csv", "w") as fh:
        fh.write("a,V_total,V_sep,P_sep\n")
        for r in rows:
            fh.write(f"{r['a']!r},{r['V_total']!r},{r['V_sep']!r},{r['P_sep']!r}\n")
    _write_json(out / f"{stem}.json",
                {"config": _common_run_echo(command="sweep", a=list(a_values), seq=seq,
                                            points=n, seed=seed),
                 "rows": rows, "seed": seed})
    for r in rows:
        click.echo(f"a={r['a']:g}: P_sep={r['P_sep']:.6g}")


@main.command()
@click.option("--metric", default="maximal", type=click.Choice(_METRIC_CHOICES))
@click.option("--a", "a_value", default=None, type=float,
              help="use the interpolated-family metric instead of --metric")
@click.option("--replications", default=10, type=int)
@click.option("--points", default=1e6, type=float)
@click.option("--seed", default=1, type=int)
@click.option("--hypothesized", default=0.0, type=float)
@click.option("--threads", default=1, type=int)
@click.pass_context
def mc(ctx, metric, a_value, replications, points, seed, hypothesized, threads):
    """Replicated plain-MC runs of the separability probability with a
    t-statistic against a hypothesized value."""
    n = int(points)
    out = _out_dir(ctx)
    if a_value is not None:
        spec = mx.interpolated_metric(a_value, tilde=True)
        label = f"a{a_value:g}"
    else:
        spec = _metric_spec(metric, tilde=True)
        label = metric
    psep = []
    for rep in range(replications):
        cfg = sequences.SequenceConfig(kind="plain", dim=15, seed=seed + 1000 * rep)
        r = integrate.estimate_volume(spec, cfg, n, checkpoint_every=n, threads=threads)
        psep.append(r.prob_sep)
    st = sequences.replication_stats(psep, hypothesized)
    report = {
        "config": _common_run_echo(command="mc", metric=label, replications=replications,
                                   points=n, seed=seed, hypothesized=hypothesized),
        "P_sep_replications": psep,
        "mean": st.mean, "sd": st.sd, "t": st.t, "degenerate": st.degenerate,
        "seed": seed,
    }
    _write_json(out / f"mc_{label}_{seed}.json", report)
    click.echo(f"{label}: mean={st.mean:.6g} sd={st.sd:.6g} t={st.t:.4g}")


@main.command()
@click.pass_context
def conjectures(ctx):
    """Dump the symbolic conjecture ledger with decimal evaluations."""
    out = _out_dir(ctx)
    entries = [
        {"metric": e.metric, "quantity": e.quantity, "symbolic": str(e.exact),
         "value": (None if e.exact.unknown else
                   ("inf" if e.exact.infinite else e.exact.value())),
         "status": e.status, "superseded": e.superseded}
        for e in analytic.conjecture_table()
    ]
    payload = {"silver_mean": analytic.SILVER_MEAN, "entries": entries,
               "bures_total_volume_N4": analytic.bures_total_volume(4),
               "hall_constant_N2": analytic.hall_constant(2)}
    _write_json(out / "conjectures.json", payload)
    click.echo(f"{len(entries)} ledger entries -> conjectures.json")


@main.command()
@click.option("--min-trials", default=20000, type=int)
@click.option("--refinement", default=400, type=int)
@click.option("--seed", default=0, type=int)
@click.pass_context
def curvature(ctx, min_trials, refinement, seed):
    """Isoperimetric (Levy-Gromov style) report and Ricci minimization."""
    out = _out_dir(ctx)
    lg = analytic.levy_gromov_check()
    tr2 = analytic.ricci_trace(2)
    tr4 = analytic.ricci_trace(4)
    m3, _ = analytic.ricci_min_search(3, trials=min_trials, refinement=refinement, seed=seed)
    m4, _ = analytic.ricci_min_search(4, trials=min_trials, refinement=refinement, seed=seed)
    report = {
        "levy_gromov": lg,
        "ricci_trace": {"N2": tr2, "N4": tr4,
                        "note": "formula traces are 3/4 of the literature "
                                "values 24 (N=2) and 12/19 of 570 (N=4); "
                                "constant factors documented, not rescaled"},
        "ricci_min": {"N3": m3, "N4": m4},
        "seed": seed,
    }
    _write_json(out / "curvature.json", report)
    click.echo(f"Is={lg['Is_15']:.5f} ratio={lg['boundary_to_volume_ratio']:.5f} "
               f"verdict={lg['verdict']}; ricci min N3={m3:.4f} N4={m4:.4f}")


if __name__ == "__main__":
    main()
