#!/usr/bin/env python3
"""Writes the hand-specified category fixtures under data/fixtures."""
import json
import pathlib
import sys

out = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "data/fixtures")
out.mkdir(parents=True, exist_ok=True)


def arrow_with_cyclic_loop(p):
    # x carries End(x) = C_p generated by t, one arrow u: x -> y, nothing back
    loop = ["id_x"] + [f"t{i}" for i in range(1, p)]
    src = {
        "objects": ["x", "y"],
        "morphisms": [{"id": m, "src": "x", "tgt": "x"} for m in loop]
        + [{"id": "id_y", "src": "y", "tgt": "y"}, {"id": "u", "src": "x", "tgt": "y"}],
        "identity": {"x": "id_x", "y": "id_y"},
        "compose": [[loop[i], loop[j], loop[(i + j) % p]] for i in range(1, p) for j in range(1, p)]
        + [["u", loop[i], "u"] for i in range(1, p)],
    }
    tgt = {
        "objects": ["x", "y"],
        "morphisms": [{"id": "id_x", "src": "x", "tgt": "x"}, {"id": "id_y", "src": "y", "tgt": "y"},
                      {"id": "v", "src": "x", "tgt": "y"}],
        "identity": {"x": "id_x", "y": "id_y"},
        "compose": [],
    }
    functor = {"objects": {"x": "x", "y": "y"},
               "morphisms": {**{m: "id_x" for m in loop}, "id_y": "id_y", "u": "v"}}
    return {"prime": p, "source": src, "target": {"category": tgt}, "functor": functor}


def idempotent_pair():
    # two objects, each with an idempotent, arrows both ways; composition multiplies 0/1 labels
    mors = {"1x": ("x", "x", 1), "0x": ("x", "x", 0), "1y": ("y", "y", 1), "0y": ("y", "y", 0),
            "0xy": ("x", "y", 0), "0yx": ("y", "x", 0)}
    def name(s, t, label):
        if s == t:
            return f"{label}{s}"
        return f"0{s}{t}"
    comp = []
    for g, (gs, gt, gl) in mors.items():
        for f, (fs, ft, fl) in mors.items():
            if ft == gs:
                comp.append([g, f, name(fs, gt, gl * fl)])
    cat = {
        "objects": ["x", "y"],
        "morphisms": [{"id": k, "src": v[0], "tgt": v[1]} for k, v in mors.items()],
        "identity": {"x": "1x", "y": "1y"},
        "compose": comp,
    }
    # functor to B(Z) recorded as integer labels
    labels = {"1x": 0, "0x": 0, "1y": 0, "0y": 0, "0xy": 1, "0yx": -1}
    return {"category": cat, "integer_labels": labels}


for p in (2, 3):
    (out / f"arrow_with_cyclic_loop_p{p}.json").write_text(json.dumps(arrow_with_cyclic_loop(p), indent=1) + "\n")
(out / "idempotent_pair.json").write_text(json.dumps(idempotent_pair(), indent=1) + "\n")
