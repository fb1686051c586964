"""Compare the compiled and pure-Python kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--chars 20000]

Each kernel gets realistic inputs (a laid-out document), results are checked
for equality across backends, and the best-of-N wall time is reported along
with an end-to-end layout + patch-cost-map pass.
"""
import argparse
import random
import timeit

import numpy as np

from vtcroute import kernels
from vtcroute.cost import PRESETS
from vtcroute.foveate import patch_cost_map
from vtcroute.render import RenderConfig, build_alignment, layout_document, page_inks

WORDS = "the quick brown fox jumps over a lazy dog while seven bright lanterns glow".split()


def make_inputs(chars, seed):
    rng = random.Random(seed)
    words = []
    while sum(len(w) + 1 for w in words) < chars:
        words.append(rng.choice(WORDS))
    text = " ".join(words)
    cfg = RenderConfig()
    doc = layout_document(text, cfg)
    page = doc.pages[0]
    x0, x1, y0, y1 = page.char_boxes()
    ink = page_inks(page, cfg)
    raster = kernels.rasterize(x0, x1, y0, y1, ink, page.width_px, page.height_px)
    adv_em, kinds, _ = cfg.metrics.encode(text)
    advances = adv_em * cfg.font_px / 1000.0
    a = np.array([rng.randrange(40) for _ in range(600)], dtype=np.int64)
    b = np.array([rng.randrange(40) for _ in range(600)], dtype=np.int64)
    return {
        "text": text,
        "cfg": cfg,
        "break_lines": (advances, kinds, cfg.content_width_px),
        "rasterize": (x0, x1, y0, y1, ink, page.width_px, page.height_px),
        "cell_stats": (raster, cfg.token_cell_px),
        "lcs_length": (a, b),
    }


def _same(u, v):
    if isinstance(u, tuple):
        return all(_same(p, q) for p, q in zip(u, v))
    return np.allclose(np.asarray(u, dtype=float), np.asarray(v, dtype=float), atol=1e-12)


def run(repeat, chars, seed):
    inp = make_inputs(chars, seed)
    names = ("break_lines", "rasterize", "cell_stats", "lcs_length")
    backends = kernels.available_backends()
    times, outputs = {}, {}
    for be in backends:
        kernels.use_backend(be)
        for name in names:
            fn, args = getattr(kernels, name), inp[name]
            outputs[be, name] = fn(*args)
            times[be, name] = min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))

        def pipeline():
            doc = layout_document(inp["text"], inp["cfg"])
            patch_cost_map(doc, build_alignment(doc), "lantern", PRESETS["4b"])

        times[be, "pipeline"] = min(timeit.repeat(pipeline, number=1, repeat=repeat))

    print(f"{'kernel':<14}" + "".join(f"{be:>14}" for be in backends) + ("     speedup" if len(backends) > 1 else ""))
    for name in names + ("pipeline",):
        row = f"{name:<14}" + "".join(f"{times[be, name] * 1e3:>12.2f}ms" for be in backends)
        if len(backends) > 1:
            row += f"{times['python', name] / times['cython', name]:>11.1f}x"
        print(row)
    if len(backends) > 1:
        agree = all(_same(outputs["cython", n], outputs["python", n]) for n in names)
        print(f"outputs agree across backends: {agree}")
    else:
        print("compiled backend not built; only the Python fallback was timed")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--chars", type=int, default=20_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    run(args.repeat, args.chars, args.seed)


if __name__ == "__main__":
    main()
