"""Command-line front end.

Subcommands: embed, extract, attack, report, sweep-k, make-fixtures.
Exit codes: 0 success, 1 validation/usage error, 2 I/O error, 3 partial
failure (some corpus images failed, the rest were processed).

Arguments can come from a config file via the @file convention, one
argument per line: ``roimark report @report.cfg``.

Every output file starts with a comment line recording the tool version
and the parameter set that produced it; nothing in the output depends on
the clock or the host, so reruns are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, fixtures, rng
from .attacks import (
    DEFAULT_SP_DENSITY,
    KINDS,
    AttackSpec,
    apply_attack,
    parse_attack_spec,
    table1_specs,
)
from .codec import (
    DEFAULT_K_ALPHA,
    DEFAULT_STRENGTH_FLOOR,
    VOTES_PER_BIT,
    embed,
    extract,
    make_slot_plan,
)
from .exceptions import RoimarkError, ValidationError
from .io import (
    load_image,
    load_logo,
    load_mask,
    read_sideinfo,
    resize_bilinear,
    save_image,
    save_logo,
    write_sideinfo,
)
from .metrics import ber, nc_normalized, psnr, ssim
from .strength import ClassMask
from .validation import IMAGE_SIZE, LOGO_BITS, check_k_alpha

DEFAULT_K_GRID = "0.01,0.05,0.1,0.3,0.6,1.0"


# ---------------------------------------------------------------------------
# shared plumbing

def _parse_class(text: str) -> tuple[str, str, float]:
    """Parse ``name=<s>,mask=<path>,coeff=<float>``; mask may contain {stem}."""
    fields: dict[str, str] = {}
    for item in text.split(","):
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or key not in ("name", "mask", "coeff"):
            raise ValidationError(f"malformed class entry {item!r} in {text!r}")
        if key in fields:
            raise ValidationError(f"duplicate {key!r} in class entry {text!r}")
        fields[key] = value
    missing = [k for k in ("name", "mask", "coeff") if k not in fields]
    if missing:
        raise ValidationError(f"class entry {text!r} missing {', '.join(missing)}")
    try:
        coeff = float(fields["coeff"])
    except ValueError as exc:
        raise ValidationError(f"malformed coeff in class entry {text!r}") from exc
    return fields["name"], fields["mask"], coeff


def _load_host(path: str) -> np.ndarray:
    img = load_image(path)
    if img.shape != (IMAGE_SIZE, IMAGE_SIZE):
        img = resize_bilinear(img, IMAGE_SIZE, IMAGE_SIZE)
    return img


def _load_classes(entries, stem: str) -> tuple[ClassMask, ...]:
    classes = []
    for name, pattern, coeff in entries:
        mask = load_mask(pattern.replace("{stem}", stem))
        if mask.shape != (IMAGE_SIZE, IMAGE_SIZE):
            mask = (resize_bilinear(mask, IMAGE_SIZE, IMAGE_SIZE) >= 0.5).astype(np.float64)
        classes.append(ClassMask(name, mask, coeff))
    return tuple(classes)


def _load_logo_arg(path: str | None) -> np.ndarray:
    return load_logo(path) if path else fixtures.default_logo()


def _quantize(raster: np.ndarray, depth: int | None) -> np.ndarray:
    if depth is None:
        return raster
    maxval = (1 << depth) - 1
    return np.rint(raster * maxval) / maxval


def _header(command: str, pairs) -> str:
    params = " ".join(f"{key}={value}" for key, value in pairs)
    return f"roimark {__version__} {command}" + (f" {params}" if params else "")


def _corpus_hosts(corpus: str, pattern: str, entries) -> list[str]:
    """Host image paths: the glob matches minus any resolvable mask path."""
    root = Path(corpus)
    if not root.is_dir():
        raise ValidationError(f"corpus directory {corpus!r} does not exist")
    candidates = sorted(str(p) for p in root.glob(pattern))
    mask_paths = {
        os.path.normpath(mask_pattern.replace("{stem}", Path(c).stem))
        for c in candidates
        for _, mask_pattern, _ in entries
    }
    return [c for c in candidates if os.path.normpath(c) not in mask_paths]


def _run_indexed(fn, count: int, jobs: int) -> list:
    """fn(0..count-1) with results in index order regardless of schedule."""
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, range(count)))
    return [fn(i) for i in range(count)]


def _write_csv(path: str, header: str, columns, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# {header}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows(rows)


def _fmt(value: float) -> str:
    return repr(float(value))


def _parse_k_grid(text: str) -> tuple[float, ...]:
    grid = []
    for token in text.split(","):
        try:
            value = float(token)
        except ValueError as exc:
            raise ValidationError(f"malformed k value {token!r} in --k-grid") from exc
        grid.append(check_k_alpha(value))
    return tuple(grid)


# ---------------------------------------------------------------------------
# subcommands

def cmd_embed(args) -> int:
    entries = [_parse_class(c) for c in args.classes]
    host = _load_host(args.host)
    logo = _load_logo_arg(args.logo)
    classes = _load_classes(entries, Path(args.host).stem)
    wm, side = embed(
        host, logo, k_alpha=args.k_alpha, classes=classes, strength_floor=args.floor
    )
    header = _header(
        "embed",
        [
            ("host", args.host),
            ("logo", args.logo or "builtin"),
            ("k_alpha", _fmt(args.k_alpha)),
            ("floor", _fmt(args.floor)),
            ("classes", ";".join(args.classes) or "-"),
            ("depth", args.depth),
        ],
    )
    save_image(wm, args.out, depth=args.depth, comment=header)
    write_sideinfo(side, args.side, comment=header)
    print(f"psnr={psnr(host, wm):.4f} ssim={ssim(host, wm):.6f}")
    return 0


def cmd_extract(args) -> int:
    image = load_image(args.input)
    if image.shape != (IMAGE_SIZE, IMAGE_SIZE):
        raise ValidationError(
            f"watermarked image must be {IMAGE_SIZE}x{IMAGE_SIZE}, got {image.shape}"
        )
    side = read_sideinfo(args.side)
    logo, raw = extract(image, side)
    plan = make_slot_plan(side.blocks)
    votes = np.zeros(LOGO_BITS, dtype=np.int64)
    for slot, bit in zip(plan, raw):
        votes[slot.bit_index] += int(bit)
    header = _header("extract", [("in", args.input), ("side", args.side)])
    save_logo(logo, args.logo_out, comment=header)
    flat = logo.reshape(-1)
    rows = [
        (
            index,
            side.blocks[slot.block_ordinal],
            slot.band,
            slot.subrow,
            slot.subcol,
            slot.bit_index,
            int(bit),
            int(votes[slot.bit_index]),
            VOTES_PER_BIT - int(votes[slot.bit_index]),
            int(flat[slot.bit_index]),
        )
        for index, (slot, bit) in enumerate(zip(plan, raw))
    ]
    _write_csv(
        args.slots_out,
        header,
        ("slot", "block", "subband", "subrow", "subcol", "bit", "raw", "votes_one", "votes_zero", "agreed"),
        rows,
    )
    print("logo=" + "".join(str(int(b)) for b in flat))
    return 0


def cmd_attack(args) -> int:
    density = args.density
    if args.kind == "salt_pepper" and density is None:
        density = DEFAULT_SP_DENSITY
    spec = AttackSpec(
        kind=args.kind,
        variance=args.variance,
        density=density,
        quality=args.quality,
        seed=args.seed,
    )
    image = load_image(args.input)
    out = apply_attack(image, spec)
    header = _header(
        "attack", [("in", args.input), ("spec", spec.label()), ("seed", args.seed), ("depth", args.depth)]
    )
    save_image(out, args.out, depth=args.depth, comment=header)
    return 0


def cmd_report(args) -> int:
    entries = [_parse_class(c) for c in args.classes]
    hosts = _corpus_hosts(args.corpus, args.images, entries)
    if not hosts:
        raise ValidationError(f"no corpus images match {args.images!r} under {args.corpus!r}")
    logo = _load_logo_arg(args.logo)
    specs = (
        tuple(parse_attack_spec(s) for s in args.attack) if args.attack else table1_specs()
    )
    depth = None if args.quantize == "none" else int(args.quantize)

    def work(i: int):
        path = hosts[i]
        try:
            host = _load_host(path)
            classes = _load_classes(entries, Path(path).stem)
            wm, side = embed(
                host, logo, k_alpha=args.k_alpha, classes=classes, strength_floor=args.floor
            )
            wm = _quantize(wm, depth)
            cells = []
            for j, spec in enumerate(specs):
                attacked = apply_attack(wm, spec.with_seed(rng.derive_seed(args.seed, i, j)))
                got, _ = extract(attacked, side)
                cells.append((ber(logo, got), nc_normalized(logo, got)))
            return ("ok", cells)
        except (RoimarkError, OSError) as exc:
            return ("err", f"{path}: {exc}")

    results = _run_indexed(work, len(hosts), args.jobs)
    failures = [payload for status, payload in results if status == "err"]
    for message in failures:
        print(f"warning: {message}", file=sys.stderr)
    ok = [payload for status, payload in results if status == "ok"]

    header = _header(
        "report",
        [
            ("corpus", args.corpus),
            ("images", args.images),
            ("logo", args.logo or "builtin"),
            ("k_alpha", _fmt(args.k_alpha)),
            ("floor", _fmt(args.floor)),
            ("classes", ";".join(args.classes) or "-"),
            ("attacks", ";".join(s.label() for s in specs)),
            ("seed", args.seed),
            ("quantize", args.quantize),
        ],
    )
    rows = []
    if ok:
        for j, spec in enumerate(specs):
            rows.append(
                (
                    spec.label(),
                    len(ok),
                    _fmt(sum(cells[j][0] for cells in ok) / len(ok)),
                    _fmt(sum(cells[j][1] for cells in ok) / len(ok)),
                )
            )
    _write_csv(args.out, header, ("attack", "images", "mean_ber", "mean_nc"), rows)
    if args.details:
        ok_iter = iter(ok)
        detail_rows = []
        for i, (status, payload) in enumerate(results):
            if status != "ok":
                continue
            cells = next(ok_iter)
            for j, spec in enumerate(specs):
                detail_rows.append(
                    (Path(hosts[i]).name, spec.label(), _fmt(cells[j][0]), _fmt(cells[j][1]))
                )
        _write_csv(args.details, header, ("image", "attack", "ber", "nc"), detail_rows)
    print(f"wrote {args.out} ({len(ok)} of {len(hosts)} images, {len(specs)} attacks)")
    return 3 if failures else 0


def cmd_sweep_k(args) -> int:
    entries = [_parse_class(c) for c in args.classes]
    hosts = _corpus_hosts(args.corpus, args.images, entries)
    if not hosts:
        raise ValidationError(f"no corpus images match {args.images!r} under {args.corpus!r}")
    logo = _load_logo_arg(args.logo)
    grid = _parse_k_grid(args.k_grid)

    def work(i: int):
        path = hosts[i]
        try:
            host = _load_host(path)
            classes = _load_classes(entries, Path(path).stem)
            cells = []
            for k in grid:
                wm, _ = embed(
                    host, logo, k_alpha=k, classes=classes, strength_floor=args.floor
                )
                cells.append((psnr(host, wm), ssim(host, wm)))
            return ("ok", cells)
        except (RoimarkError, OSError) as exc:
            return ("err", f"{path}: {exc}")

    results = _run_indexed(work, len(hosts), args.jobs)
    failures = [payload for status, payload in results if status == "err"]
    for message in failures:
        print(f"warning: {message}", file=sys.stderr)
    ok = [payload for status, payload in results if status == "ok"]

    header = _header(
        "sweep-k",
        [
            ("corpus", args.corpus),
            ("images", args.images),
            ("logo", args.logo or "builtin"),
            ("k_grid", args.k_grid),
            ("floor", _fmt(args.floor)),
            ("classes", ";".join(args.classes) or "-"),
        ],
    )
    rows = []
    if ok:
        for j, k in enumerate(grid):
            rows.append(
                (
                    _fmt(k),
                    len(ok),
                    _fmt(sum(cells[j][0] for cells in ok) / len(ok)),
                    _fmt(sum(cells[j][1] for cells in ok) / len(ok)),
                )
            )
    _write_csv(args.out, header, ("k_alpha", "images", "mean_psnr", "mean_ssim"), rows)
    print(f"wrote {args.out} ({len(ok)} of {len(hosts)} images, {len(grid)} grid points)")
    return 3 if failures else 0


def cmd_make_fixtures(args) -> int:
    manifest = fixtures.write_corpus(args.out)
    for name in fixtures.FIXTURE_NAMES:
        print(manifest[name]["image"])
    return 0


# ---------------------------------------------------------------------------
# parser

class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; here 2 means I/O, so remap to 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_class_flag(p) -> None:
    p.add_argument(
        "--class",
        dest="classes",
        action="append",
        default=[],
        metavar="name=N,mask=P,coeff=C",
        help="class mask entry; repeatable; mask path may contain {stem}",
    )


def _add_corpus_flags(p) -> None:
    p.add_argument("--corpus", required=True, help="directory of host images")
    p.add_argument("--images", default="*.pgm", help="host glob inside the corpus (default *.pgm)")
    p.add_argument("--logo", help="logo text file (default: built-in pattern)")
    p.add_argument("--floor", type=float, default=DEFAULT_STRENGTH_FLOOR)
    p.add_argument("--jobs", type=int, default=1, help="parallel workers (output is schedule-independent)")
    p.add_argument("--out", required=True, help="output CSV path")
    _add_class_flag(p)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="roimark",
        description="Blind image watermarking with mask-adaptive strength.",
        fromfile_prefix_chars="@",
    )
    parser.add_argument("--version", action="version", version=f"roimark {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("embed", help="embed a logo into a host image")
    p.add_argument("--host", required=True)
    p.add_argument("--logo", help="logo text file (default: built-in pattern)")
    p.add_argument("--out", required=True, help="watermarked PGM path")
    p.add_argument("--side", required=True, help="side-information output path")
    p.add_argument("--k-alpha", type=float, default=DEFAULT_K_ALPHA)
    p.add_argument("--floor", type=float, default=DEFAULT_STRENGTH_FLOOR)
    p.add_argument("--depth", type=int, choices=(8, 16), default=16)
    _add_class_flag(p)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("extract", help="blind-extract a logo")
    p.add_argument("--in", dest="input", required=True, help="watermarked image")
    p.add_argument("--side", required=True, help="side-information file")
    p.add_argument("--logo-out", required=True, help="recovered logo path")
    p.add_argument("--slots-out", required=True, help="per-slot diagnostics CSV")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("attack", help="distort an image")
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--variance", type=float, help="gaussian only")
    p.add_argument("--density", type=float, help=f"salt_pepper only (default {DEFAULT_SP_DENSITY})")
    p.add_argument("--quality", type=int, help="jpeg only")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--depth", type=int, choices=(8, 16), default=16)
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("report", help="embed/attack/extract robustness table")
    _add_corpus_flags(p)
    p.add_argument("--k-alpha", type=float, default=DEFAULT_K_ALPHA)
    p.add_argument(
        "--attack",
        action="append",
        metavar="SPEC",
        help="kind[:key=value,...], e.g. gaussian:variance=0.01; repeatable; "
        "default: the standard nine-row battery",
    )
    p.add_argument("--seed", type=int, default=0, help="base seed for stochastic attacks")
    p.add_argument(
        "--quantize",
        choices=("8", "16", "none"),
        default="8",
        help="bit depth applied to the watermarked image before attacking",
    )
    p.add_argument("--details", help="optional per-image CSV path")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("sweep-k", help="fidelity vs embedding scale")
    _add_corpus_flags(p)
    p.add_argument("--k-grid", default=DEFAULT_K_GRID, help=f"comma list (default {DEFAULT_K_GRID})")
    p.set_defaults(func=cmd_sweep_k)

    p = sub.add_parser("make-fixtures", help="write the synthetic test corpus")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_make_fixtures)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
