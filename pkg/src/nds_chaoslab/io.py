"""CSV, text and SVG writers.

Floats are written with 17 significant digits so every derived column can be
recomputed from profiles.csv.  Nothing time- or host-dependent is written.
"""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np


def fmt(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def write_csv(path, header, rows):
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def write_text(path, text):
    path = Path(path)
    path.write_text(text, encoding="utf-8", newline="\n")
    return path


# ---------------------------------------------------------------------------
# tables
# ---------------------------------------------------------------------------

def profile_rows(records):
    for r in records:
        if r.profile is None:
            continue
        for t, d in zip(r.profile.times, r.profile.distances):
            yield r.pair_id, int(t), float(d)


def xi_times(N, points=48, checkpoints=()):
    """Log-spaced n in [1, N] together with the checkpoints."""
    ns = np.unique(np.round(np.geomspace(1, N, points)).astype(np.int64))
    extra = [int(c) for c in checkpoints if 1 <= c <= N]
    return np.unique(np.concatenate([ns, np.asarray(extra, dtype=np.int64), [N]]))


def xi_rows(records, points=48):
    """(pair_id, n, t, xi, delta) with xi = count/n and delta = 1 - xi."""
    for r in records:
        est = r.estimate
        if est is None:
            continue
        cps = est.ns if len(est.ns) < 64 else ()
        for n in xi_times(est.horizon, points, cps):
            for j, t in enumerate(est.t_grid):
                c = int(est.counts[j, n - 1])
                yield r.pair_id, int(n), float(t), c / int(n), (int(n) - c) / int(n)


def estimate_rows(records):
    for r in records:
        est = r.estimate
        if est is None:
            continue
        for j, t in enumerate(est.t_grid):
            yield r.pair_id, float(t), float(est.phi_lower[j]), float(est.phi_upper[j])


VERDICT_HEADER = ("pair_id", "system", "horizon", "li_yorke", "dc1", "dc2", "dc2prime", "dc3",
                  "dc3_t_lo", "dc3_t_hi", "eps_zero", "one_tol", "gap", "dc3_variant")


def verdict_rows(records):
    for r in records:
        v = r.verdict
        if v is None:
            continue
        lo, hi = v.dc3.witness if v.dc3.verdict else (None, None)
        th = v.thresholds
        yield (r.pair_id, r.system, v.horizon, None if v.li_yorke is None else v.li_yorke.verdict,
               v.dc1.verdict, v.dc2.verdict, v.dc2prime.verdict, v.dc3.verdict, lo, hi,
               th.get("eps_zero"), th.get("one_tol"), th.get("gap"), th.get("dc3_variant"))


def kato_rows(result, probes):
    for idx, (U, sep) in enumerate(zip(probes, result.sensitivity.separations)):
        yield idx, _point_text(U.center), U.radius, sep, sep > result.sensitivity.delta


def _point_text(p):
    if hasattr(p, "core"):
        return str(p)
    return " ".join(fmt(float(v)) for v in np.ravel(p))


def write_tables(out_dir, records, xi_points=48):
    out = Path(out_dir)
    records = list(records)
    write_csv(out / "profiles.csv", ("pair_id", "i", "d_i"), profile_rows(records))
    if any(r.estimate is not None for r in records):
        write_csv(out / "xi.csv", ("pair_id", "n", "t", "xi", "delta"), xi_rows(records, xi_points))
        write_csv(out / "estimates.csv", ("pair_id", "t", "phi_lower", "phi_upper"), estimate_rows(records))
    if any(r.verdict is not None for r in records):
        write_csv(out / "verdicts.csv", VERDICT_HEADER, verdict_rows(records))


# ---------------------------------------------------------------------------
# SVG
# ---------------------------------------------------------------------------

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2")


def line_chart(series, title, xlabel, width=640, height=400, logx=True):
    """SVG text for (label, xs, ys, dashed) series; y is fixed to [0, 1]."""
    m = 50
    w, h = width - 2 * m, height - 2 * m
    xs_all = np.concatenate([np.asarray(s[1], dtype=np.float64) for s in series])
    tf = np.log10 if logx else (lambda v: v)
    lo, hi = float(tf(xs_all.min())), float(tf(xs_all.max()))
    span = (hi - lo) or 1.0

    def pt(x, y):
        return "{:.3f},{:.3f}".format(m + w * (float(tf(x)) - lo) / span, m + h * (1.0 - y))

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="{m}" y="{m}" width="{w}" height="{h}" fill="none" stroke="#000"/>',
        f'<text x="{m}" y="{m - 10}" font-size="12">{title}</text>',
        f'<text x="{m}" y="{height - 15}" font-size="11">{xlabel} = {fmt(float(xs_all.min()))}</text>',
        f'<text x="{m + w - 90}" y="{height - 15}" font-size="11">{xlabel} = {fmt(float(xs_all.max()))}</text>',
        f'<text x="{m - 20}" y="{m + 4}" font-size="10">1</text>',
        f'<text x="{m - 20}" y="{m + h + 4}" font-size="10">0</text>',
    ]
    for k, (label, xs, ys, dashed) in enumerate(series):
        col = _COLORS[k % len(_COLORS)]
        dash = ' stroke-dasharray="4 3"' if dashed else ""
        pts = " ".join(pt(x, y) for x, y in zip(xs, ys))
        parts.append(f'<polyline fill="none" stroke="{col}"{dash} points="{pts}"/>')
        parts.append(f'<text x="{m + w + 4}" y="{m + 12 * (k + 1)}" font-size="10" fill="{col}">{label}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def estimate_svg(record):
    """Lower (dashed) and upper (solid) estimates against t."""
    e = record.estimate
    return line_chart([("upper", e.t_grid, e.phi_upper, False), ("lower", e.t_grid, e.phi_lower, True)],
                      f"{record.pair_id}: distribution estimates", "t")


def xi_svg(record, points=48, curves=4):
    """xi_n(t) against n for a few t spread over the grid."""
    e = record.estimate
    ns = xi_times(e.horizon, points)
    js = np.unique(np.linspace(0, len(e.t_grid) - 1, curves).round().astype(int))
    series = [(f"t={float(e.t_grid[j]):.3g}", ns, e.counts[j, ns - 1] / ns, False) for j in js]
    return line_chart(series, f"{record.pair_id}: xi_n(t)", "n")


def write_svgs(out_dir, records, points=48):
    out = Path(out_dir)
    for r in records:
        if r.estimate is None:
            continue
        write_text(out / f"{r.pair_id}_estimates.svg", estimate_svg(r))
        write_text(out / f"{r.pair_id}_xi.svg", xi_svg(r, points))
